//! Test-only oracles shared by the integration suites.
//!
//! `dd` re-implements the training loss in double-double arithmetic
//! (~106-bit mantissa). Central differences of that loss resolve gradients
//! far below the f64 cancellation floor of `(L(θ+h) - L(θ-h)) / 2h`.

#![allow(dead_code)]

pub mod dd;

use dd::{Dd, DdJet};
use pinn::networks::NetworkModel;
use pinn::{Backend, SampleSet};

/// Total loss evaluated entirely in double-double at parameters `theta`.
pub fn dd_total_loss(model: &NetworkModel, theta: &[Dd], samples: &SampleSet, alpha: f64) -> Dd {
    let mut interior = Dd::ZERO;
    for p in &samples.interior {
        let u = dd_forward(model, theta, p[0], p[1]);
        let r = -(u.dxx + u.dyy);
        interior = interior + r * r;
    }
    let interior = interior / Dd::from(samples.interior.len() as f64);
    let mut boundary = Dd::ZERO;
    for b in &samples.boundary {
        let e = dd_forward(model, theta, b.x, b.y).val - Dd::from(b.target);
        boundary = boundary + e * e;
    }
    let boundary = boundary / Dd::from(samples.boundary.len() as f64);
    Dd::from(alpha) * interior + boundary
}

/// `(L(θ + h e_k) - L(θ - h e_k)) / 2h` in double-double, rounded to f64.
pub fn dd_central_difference(model: &NetworkModel, samples: &SampleSet, alpha: f64, k: usize, h: f64) -> f64 {
    let base: Vec<Dd> = model.params().iter().map(|&p| Dd::from(p)).collect();
    let shifted = |sign: f64| {
        let mut t = base.clone();
        t[k] = t[k] + Dd::from(sign * h);
        dd_total_loss(model, &t, samples, alpha)
    };
    ((shifted(1.0) - shifted(-1.0)) / Dd::from(2.0 * h)).to_f64()
}

pub fn dd_forward(model: &NetworkModel, theta: &[Dd], x: f64, y: f64) -> DdJet {
    let jx = DdJet::var_x(Dd::from(x));
    let jy = DdJet::var_y(Dd::from(y));
    match model.backend() {
        Backend::Mlp => mlp_forward(model.layer_widths(), theta, jx, jy),
        Backend::Kan => kan_forward(model, theta, jx, jy),
    }
}

fn mlp_forward(widths: &[usize], theta: &[Dd], x: DdJet, y: DdJet) -> DdJet {
    let centre = |t: DdJet| t.scale(Dd::from(2.0)) + DdJet::constant(Dd::from(-1.0));
    let mut act = vec![centre(x), centre(y)];
    let mut off = 0;
    let layers = widths.len() - 1;
    for l in 0..layers {
        let (ni, no) = (widths[l], widths[l + 1]);
        let mut next = Vec::with_capacity(no);
        for q in 0..no {
            let mut z = DdJet::constant(theta[off + ni * no + q]);
            for p in 0..ni {
                z = z + act[p].scale(theta[off + q * ni + p]);
            }
            next.push(if l + 1 == layers { z } else { z.tanh() });
        }
        act = next;
        off += ni * no + no;
    }
    act[0]
}

/// Cox–de Boor on the span that [`SplineBasis`] would select, returning
/// `(B_j, B_j', B_j'')` for every basis function. Lower-order functions are
/// taken on the same span so the result continues polynomially outside
/// the grid range.
fn spline_triples(knots: &[Dd], order: usize, grid: usize, t: Dd) -> Vec<[Dd; 3]> {
    let k = order;
    let last = k + grid - 1;
    let tf = t.to_f64();
    let span = if tf < knots[k + 1].to_f64() {
        k
    } else if tf >= knots[last].to_f64() {
        last
    } else {
        (k..last).rev().find(|&i| knots[i].to_f64() <= tf).unwrap()
    };
    // b[p][j]: order-p basis j on this span; db / ddb its derivatives.
    let n_knots = knots.len();
    let mut b = vec![vec![Dd::ZERO; n_knots]; k + 1];
    let mut db = b.clone();
    let mut ddb = b.clone();
    b[0][span] = Dd::ONE;
    for p in 1..=k {
        for j in 0..n_knots - p - 1 {
            let l = knots[j + p] - knots[j];
            let r = knots[j + p + 1] - knots[j + 1];
            let (b0, b1) = (b[p - 1][j], b[p - 1][j + 1]);
            let (d0, d1) = (db[p - 1][j], db[p - 1][j + 1]);
            let pf = Dd::from(p as f64);
            b[p][j] = (t - knots[j]) / l * b0 + (knots[j + p + 1] - t) / r * b1;
            db[p][j] = pf * (b0 / l - b1 / r);
            ddb[p][j] = pf * (d0 / l - d1 / r);
        }
    }
    (0..grid + k).map(|j| [b[k][j], db[k][j], ddb[k][j]]).collect()
}

fn kan_forward(model: &NetworkModel, theta: &[Dd], x: DdJet, y: DdJet) -> DdJet {
    let hyper = model.kan_hyper().unwrap();
    let basis = model.spline_basis().unwrap();
    let knots: Vec<Dd> = basis.knots().iter().map(|&v| Dd::from(v)).collect();
    let nb = basis.len();
    let per_edge = nb + 2;
    let [lo, hi] = hyper.grid_range;
    let (lo, scale) = (Dd::from(lo), Dd::from(hi - lo));
    let mut act = vec![
        x.scale(scale) + DdJet::constant(lo),
        y.scale(scale) + DdJet::constant(lo),
    ];
    let widths = model.layer_widths();
    let mut off = 0;
    for w in widths.windows(2) {
        let (ni, no) = (w[0], w[1]);
        let mut next = vec![DdJet::constant(Dd::ZERO); no];
        for (p, a) in act.iter().enumerate() {
            let silu = a.silu();
            let triples = spline_triples(&knots, hyper.spline_order, hyper.grid_size, a.val);
            for (q, out) in next.iter_mut().enumerate() {
                let e = off + (q * ni + p) * per_edge;
                let mut s = [Dd::ZERO; 3];
                for (j, tr) in triples.iter().enumerate() {
                    for d in 0..3 {
                        s[d] = s[d] + theta[e + 2 + j] * tr[d];
                    }
                }
                let spline = a.compose(s);
                *out = *out + silu.scale(theta[e]) + spline.scale(theta[e + 1]);
            }
        }
        act = next;
        off += ni * no * per_edge;
    }
    act[0]
}
