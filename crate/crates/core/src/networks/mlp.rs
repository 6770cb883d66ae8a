use super::NetworkModel;
use crate::autodiff::Jet2;

const COMPONENTS: usize = 5;

/// Recorded forward pass, stored component-major: for a layer of width `w`,
/// entries `c * w .. (c + 1) * w` hold component `c` (val, dx, dy, dxx, dyy)
/// of every neuron.
#[derive(Debug, Clone)]
pub struct MlpScratch {
    pre: Vec<Vec<f64>>,
    post: Vec<Vec<f64>>,
    offsets: Vec<usize>,
    /// Transposed weight matrices `[in][out]`, filled on first use.
    weights_t: Vec<Vec<f64>>,
    adj: Vec<f64>,
    adj_next: Vec<f64>,
}

impl MlpScratch {
    pub fn new(widths: &[usize]) -> Self {
        let max = widths.iter().copied().max().unwrap_or(1);
        let mut offsets = Vec::with_capacity(widths.len() - 1);
        let mut off = 0;
        for w in widths.windows(2) {
            offsets.push(off);
            off += w[0] * w[1] + w[1];
        }
        MlpScratch {
            pre: widths[1..].iter().map(|&w| vec![0.0; COMPONENTS * w]).collect(),
            post: widths.iter().map(|&w| vec![0.0; COMPONENTS * w]).collect(),
            offsets,
            weights_t: Vec::new(),
            adj: vec![0.0; COMPONENTS * max],
            adj_next: vec![0.0; COMPONENTS * max],
        }
    }

    fn prepare(&mut self, widths: &[usize], params: &[f64]) {
        if !self.weights_t.is_empty() {
            return;
        }
        self.weights_t = widths
            .windows(2)
            .zip(&self.offsets)
            .map(|(w, &off)| {
                let (ni, no) = (w[0], w[1]);
                let mut t = vec![0.0; ni * no];
                for q in 0..no {
                    for p in 0..ni {
                        t[p * no + q] = params[off + q * ni + p];
                    }
                }
                t
            })
            .collect();
    }
}

#[inline]
fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    for (y, x) in y.iter_mut().zip(x) {
        *y += a * x;
    }
}

// Inputs on [0, 1] are centred onto [-1, 1] before the first layer.
fn centre(t: Jet2) -> Jet2 {
    t.scale(2.0) + Jet2::constant(-1.0)
}

pub(super) fn forward(model: &NetworkModel, x: Jet2, y: Jet2, s: &mut MlpScratch) -> Jet2 {
    let widths = model.layer_widths();
    let params = model.params();
    s.prepare(widths, params);
    let layers = widths.len() - 1;
    let (x, y) = (centre(x), centre(y));
    for (c, (vx, vy)) in x.to_array().into_iter().zip(y.to_array()).enumerate() {
        s.post[0][2 * c] = vx;
        s.post[0][2 * c + 1] = vy;
    }
    for l in 0..layers {
        let (ni, no) = (widths[l], widths[l + 1]);
        let off = s.offsets[l];
        let z = &mut s.pre[l];
        z.fill(0.0);
        z[..no].copy_from_slice(&params[off + ni * no..off + ni * no + no]);
        let input = &s.post[l];
        let wt = &s.weights_t[l];
        for p in 0..ni {
            let col = &wt[p * no..(p + 1) * no];
            for c in 0..COMPONENTS {
                axpy(&mut z[c * no..(c + 1) * no], input[c * ni + p], col);
            }
        }
        let out = &mut s.post[l + 1];
        if l + 1 == layers {
            out.copy_from_slice(z);
            continue;
        }
        let (zv, rest) = z.split_at(no);
        let (zdx, rest) = rest.split_at(no);
        let (zdy, rest) = rest.split_at(no);
        let (zdxx, zdyy) = rest.split_at(no);
        for q in 0..no {
            let t = zv[q].tanh();
            let d1 = 1.0 - t * t;
            let d2 = -2.0 * t * d1;
            out[q] = t;
            out[no + q] = d1 * zdx[q];
            out[2 * no + q] = d1 * zdy[q];
            out[3 * no + q] = d2 * zdx[q] * zdx[q] + d1 * zdxx[q];
            out[4 * no + q] = d2 * zdy[q] * zdy[q] + d1 * zdyy[q];
        }
    }
    let o = &s.post[layers];
    Jet2 {
        val: o[0],
        dx: o[1],
        dy: o[2],
        dxx: o[3],
        dyy: o[4],
    }
}

pub(super) fn backward(model: &NetworkModel, adjoint: Jet2, s: &mut MlpScratch, grad: &mut [f64]) {
    let widths = model.layer_widths();
    let params = model.params();
    let layers = widths.len() - 1;
    s.adj[..COMPONENTS].copy_from_slice(&adjoint.to_array());
    for l in (0..layers).rev() {
        let (ni, no) = (widths[l], widths[l + 1]);
        let off = s.offsets[l];

        // adjoint w.r.t. the pre-activations, in place
        if l + 1 != layers {
            let t = &s.post[l + 1][..no];
            let z = &s.pre[l];
            let a = &mut s.adj;
            for q in 0..no {
                let (tq, zdx, zdy, zdxx, zdyy) = (t[q], z[no + q], z[2 * no + q], z[3 * no + q], z[4 * no + q]);
                let (ov, odx, ody, odxx, odyy) = (a[q], a[no + q], a[2 * no + q], a[3 * no + q], a[4 * no + q]);
                let g1 = 1.0 - tq * tq;
                let g2 = -2.0 * tq * g1;
                let g3 = -2.0 * g1 * (1.0 - 3.0 * tq * tq);
                a[q] = ov * g1
                    + g2 * (odx * zdx + ody * zdy + odxx * zdxx + odyy * zdyy)
                    + g3 * (odxx * zdx * zdx + odyy * zdy * zdy);
                a[no + q] = odx * g1 + 2.0 * g2 * odxx * zdx;
                a[2 * no + q] = ody * g1 + 2.0 * g2 * odyy * zdy;
                a[3 * no + q] = odxx * g1;
                a[4 * no + q] = odyy * g1;
            }
        }

        let input = &s.post[l];
        let (a0, rest) = input.split_at(ni);
        let (a1, rest) = rest.split_at(ni);
        let (a2, rest) = rest.split_at(ni);
        let (a3, a4) = rest.split_at(ni);
        for q in 0..no {
            let zb = [
                s.adj[q],
                s.adj[no + q],
                s.adj[2 * no + q],
                s.adj[3 * no + q],
                s.adj[4 * no + q],
            ];
            let row = &mut grad[off + q * ni..off + (q + 1) * ni];
            for p in 0..ni {
                row[p] += zb[0] * a0[p] + zb[1] * a1[p] + zb[2] * a2[p] + zb[3] * a3[p] + zb[4] * a4[p];
            }
            grad[off + ni * no + q] += zb[0];
        }

        if l > 0 {
            let weights = &params[off..off + ni * no];
            let next = &mut s.adj_next[..COMPONENTS * ni];
            next.fill(0.0);
            for q in 0..no {
                let row = &weights[q * ni..(q + 1) * ni];
                for c in 0..COMPONENTS {
                    axpy(&mut next[c * ni..(c + 1) * ni], s.adj[c * no + q], row);
                }
            }
            std::mem::swap(&mut s.adj, &mut s.adj_next);
        }
    }
}

pub(super) fn eval(model: &NetworkModel, x: f64, y: f64) -> f64 {
    let widths = model.layer_widths();
    let params = model.params();
    let layers = widths.len() - 1;
    let mut act = vec![2.0 * x - 1.0, 2.0 * y - 1.0];
    let mut off = 0;
    for l in 0..layers {
        let (ni, no) = (widths[l], widths[l + 1]);
        let weights = &params[off..off + ni * no];
        let bias = &params[off + ni * no..off + ni * no + no];
        act = (0..no)
            .map(|q| {
                let z = weights[q * ni..(q + 1) * ni]
                    .iter()
                    .zip(&act)
                    .fold(bias[q], |z, (w, a)| z + w * a);
                if l + 1 == layers {
                    z
                } else {
                    z.tanh()
                }
            })
            .collect();
        off += ni * no + no;
    }
    act[0]
}
