use super::spline::{LocalBasis, SplineBasis};
use super::NetworkModel;
use crate::autodiff::{Activation, Jet2};

/// One KAN edge: `w_b * silu(t) + w_s * Σ_j coeffs[j] * B_j(t)`, as a jet.
///
/// `coeffs` must hold one coefficient per basis function.
pub fn kan_edge(t: Jet2, w_b: f64, w_s: f64, coeffs: &[f64], basis: &SplineBasis) -> Jet2 {
    assert_eq!(coeffs.len(), basis.len(), "one coefficient per basis function");
    let silu = Activation::Silu.derivatives(t.val);
    let mut local = LocalBasis::default();
    basis.local(t.val, &mut local);
    let spline = spline_derivatives(&local, coeffs, basis.order());
    t.compose([
        w_b * silu[0] + w_s * spline[0],
        w_b * silu[1] + w_s * spline[1],
        w_b * silu[2] + w_s * spline[2],
    ])
}

/// `[S, S', S'', S''']` of the spline `Σ_j coeffs[j] B_j` at the cached point.
#[inline]
fn spline_derivatives(local: &LocalBasis, coeffs: &[f64], order: usize) -> [f64; 4] {
    let c = &coeffs[local.first..=local.first + order];
    let mut s = [0.0; 4];
    for (d, out) in s.iter_mut().enumerate() {
        *out = c.iter().zip(&local.ders[d]).map(|(c, b)| c * b).sum();
    }
    s
}

/// Per-source-node quantities shared by all outgoing edges.
#[derive(Clone, Copy, Debug, Default)]
struct NodeCache {
    silu: [f64; 4],
    basis: LocalBasis,
}

#[derive(Debug, Clone)]
pub struct KanScratch {
    nodes: Vec<Vec<Jet2>>,
    cache: Vec<Vec<NodeCache>>,
    offsets: Vec<usize>,
    adj: Vec<Jet2>,
    adj_next: Vec<Jet2>,
}

impl KanScratch {
    pub fn new(widths: &[usize]) -> Self {
        let max = widths.iter().copied().max().unwrap_or(1);
        KanScratch {
            nodes: widths.iter().map(|&w| vec![Jet2::ZERO; w]).collect(),
            cache: widths[..widths.len() - 1]
                .iter()
                .map(|&w| vec![NodeCache::default(); w])
                .collect(),
            offsets: Vec::new(),
            adj: vec![Jet2::ZERO; max],
            adj_next: vec![Jet2::ZERO; max],
        }
    }
}

fn layer_offsets(widths: &[usize], per_edge: usize) -> Vec<usize> {
    let mut off = 0;
    widths
        .windows(2)
        .map(|w| {
            let o = off;
            off += w[0] * w[1] * per_edge;
            o
        })
        .collect()
}

// Inputs on [0, 1] are mapped affinely onto the spline grid range.
fn input_map(model: &NetworkModel) -> (f64, f64) {
    let [lo, hi] = model.kan_hyper().expect("KAN model").grid_range;
    (lo, hi - lo)
}

pub(super) fn forward(model: &NetworkModel, x: Jet2, y: Jet2, s: &mut KanScratch) -> Jet2 {
    let basis = model.spline_basis().expect("KAN model");
    let widths = model.layer_widths();
    let params = model.params();
    let order = basis.order();
    let nb = basis.len();
    let per_edge = nb + 2;
    if s.offsets.is_empty() {
        s.offsets = layer_offsets(widths, per_edge);
    }
    let (lo, scale) = input_map(model);
    s.nodes[0][0] = x.scale(scale) + Jet2::constant(lo);
    s.nodes[0][1] = y.scale(scale) + Jet2::constant(lo);

    for l in 0..widths.len() - 1 {
        let (ni, no) = (widths[l], widths[l + 1]);
        let off = s.offsets[l];
        for p in 0..ni {
            let t = s.nodes[l][p].val;
            let c = &mut s.cache[l][p];
            c.silu = Activation::Silu.derivatives(t);
            basis.local(t, &mut c.basis);
        }
        let (done, todo) = s.nodes.split_at_mut(l + 1);
        let input = &done[l];
        for q in 0..no {
            let mut acc = Jet2::ZERO;
            for p in 0..ni {
                let e = off + (q * ni + p) * per_edge;
                let (w_b, w_s) = (params[e], params[e + 1]);
                let c = &s.cache[l][p];
                let sp = spline_derivatives(&c.basis, &params[e + 2..e + 2 + nb], order);
                acc += input[p].compose([
                    w_b * c.silu[0] + w_s * sp[0],
                    w_b * c.silu[1] + w_s * sp[1],
                    w_b * c.silu[2] + w_s * sp[2],
                ]);
            }
            todo[0][q] = acc;
        }
    }
    s.nodes[widths.len() - 1][0]
}

pub(super) fn backward(model: &NetworkModel, adjoint: Jet2, s: &mut KanScratch, grad: &mut [f64]) {
    let basis = model.spline_basis().expect("KAN model");
    let widths = model.layer_widths();
    let params = model.params();
    let order = basis.order();
    let nb = basis.len();
    let per_edge = nb + 2;
    s.adj[0] = adjoint;

    for l in (0..widths.len() - 1).rev() {
        let (ni, no) = (widths[l], widths[l + 1]);
        let off = s.offsets[l];
        if l > 0 {
            s.adj_next[..ni].fill(Jet2::ZERO);
        }
        for q in 0..no {
            let o = s.adj[q];
            for p in 0..ni {
                let a = s.nodes[l][p];
                let c = &s.cache[l][p];
                let e = off + (q * ni + p) * per_edge;
                let (w_b, w_s) = (params[e], params[e + 1]);

                // <o, a.compose([f0, f1, f2])> = o.val f0 + p1 f1 + p2 f2
                let p1 = o.dx * a.dx + o.dy * a.dy + o.dxx * a.dxx + o.dyy * a.dyy;
                let p2 = o.dxx * a.dx * a.dx + o.dyy * a.dy * a.dy;
                let contract = |f0: f64, f1: f64, f2: f64| o.val * f0 + p1 * f1 + p2 * f2;

                let coeffs = &params[e + 2..e + 2 + nb];
                let sp = spline_derivatives(&c.basis, coeffs, order);
                grad[e] += contract(c.silu[0], c.silu[1], c.silu[2]);
                grad[e + 1] += contract(sp[0], sp[1], sp[2]);
                let d = &c.basis.ders;
                for r in 0..=order {
                    grad[e + 2 + c.basis.first + r] += w_s * contract(d[0][r], d[1][r], d[2][r]);
                }

                if l > 0 {
                    let phi = [
                        w_b * c.silu[1] + w_s * sp[1],
                        w_b * c.silu[2] + w_s * sp[2],
                        w_b * c.silu[3] + w_s * sp[3],
                    ];
                    s.adj_next[p] += a.compose_adjoint(phi, o);
                }
            }
        }
        if l > 0 {
            std::mem::swap(&mut s.adj, &mut s.adj_next);
        }
    }
}

pub(super) fn eval(model: &NetworkModel, x: f64, y: f64) -> f64 {
    let basis = model.spline_basis().expect("KAN model");
    let widths = model.layer_widths();
    let params = model.params();
    let nb = basis.len();
    let per_edge = nb + 2;
    let (lo, scale) = input_map(model);
    let mut act = vec![lo + scale * x, lo + scale * y];
    let mut off = 0;
    let mut local = [0.0; super::MAX_SPLINE_ORDER + 1];
    for w in widths.windows(2) {
        let (ni, no) = (w[0], w[1]);
        let mut next = vec![0.0; no];
        for (p, &t) in act.iter().enumerate() {
            let base = Activation::Silu.eval(t);
            let first = basis.local_values(t, &mut local);
            for (q, out) in next.iter_mut().enumerate() {
                let e = off + (q * ni + p) * per_edge;
                let coeffs = &params[e + 2 + first..=e + 2 + first + basis.order()];
                let spline: f64 = coeffs.iter().zip(&local).map(|(c, b)| c * b).sum();
                *out += params[e] * base + params[e + 1] * spline;
            }
        }
        act = next;
        off += ni * no * per_edge;
    }
    act[0]
}
