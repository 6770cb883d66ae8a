use rayon::prelude::*;

use super::Jet2;
use crate::error::{Error, Result};

/// A model whose output jet can be differentiated with respect to its
/// parameters by a reverse sweep over the last recorded forward pass.
pub trait JetModel: Sync {
    /// Per-thread workspace holding the intermediates of one forward pass.
    type Scratch: Send;

    fn param_count(&self) -> usize;

    fn new_scratch(&self) -> Self::Scratch;

    /// Forward pass that records everything [`JetModel::backward`] needs.
    fn forward_recorded(&self, x: Jet2, y: Jet2, scratch: &mut Self::Scratch) -> Jet2;

    /// Adds `∂⟨adjoint, output⟩/∂θ` for the last recorded pass into `grad`.
    ///
    /// Implementations must add to each entry of `grad` at most once per call;
    /// the deterministic reduction in [`parameter_gradient`] depends on it.
    fn backward(&self, adjoint: Jet2, scratch: &mut Self::Scratch, grad: &mut [f64]);
}

/// Contribution of one collocation point: a diagnostic value (typically the
/// squared error) and the adjoint `∂loss/∂output_jet` for that point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointLoss {
    pub value: f64,
    pub adjoint: Jet2,
}

#[derive(Clone, Copy, Debug)]
pub struct GradOptions {
    /// When set, the batch sum is bitwise identical to the sequential
    /// left-to-right sum over points regardless of thread count.
    pub deterministic: bool,
}

impl Default for GradOptions {
    fn default() -> Self {
        GradOptions { deterministic: true }
    }
}

/// `∂loss/∂θ`, ordered like the model's parameter vector.
#[derive(Clone, Debug, PartialEq)]
pub struct GradientVector {
    pub values: Vec<f64>,
}

impl GradientVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }
}

#[derive(Clone, Debug)]
pub struct GradientEval {
    /// `PointLoss::value` for every point, in input order.
    pub values: Vec<f64>,
    pub gradient: GradientVector,
}

/// Points per parallel block in the deterministic path.
const BLOCK_PER_THREAD: usize = 32;

/// Gradient of `Σ_i loss_i(model(points[i]))` with respect to the model
/// parameters, where `point_loss(i, jet)` supplies each term's adjoint.
///
/// Fails with [`Error::NonFiniteLoss`] if any point's value or adjoint is not
/// finite, and with [`Error::NonFiniteGradient`] if the summed gradient is not.
pub fn parameter_gradient<M, F>(
    model: &M,
    points: &[[f64; 2]],
    point_loss: F,
    opts: GradOptions,
) -> Result<GradientEval>
where
    M: JetModel,
    F: Fn(usize, &Jet2) -> PointLoss + Sync,
{
    let threads = rayon::current_num_threads();
    let (values, grad) = if threads == 1 {
        sequential(model, points, &point_loss)?
    } else if opts.deterministic {
        blocked(model, points, &point_loss, threads)?
    } else {
        unordered(model, points, &point_loss)?
    };
    if let Some(index) = grad.iter().position(|g| !g.is_finite()) {
        return Err(Error::NonFiniteGradient { index });
    }
    Ok(GradientEval {
        values,
        gradient: GradientVector { values: grad },
    })
}

fn point_step<M: JetModel, F: Fn(usize, &Jet2) -> PointLoss>(
    model: &M,
    index: usize,
    p: [f64; 2],
    point_loss: &F,
    scratch: &mut M::Scratch,
    grad: &mut [f64],
) -> Result<f64> {
    let out = model.forward_recorded(Jet2::var_x(p[0]), Jet2::var_y(p[1]), scratch);
    let pl = point_loss(index, &out);
    if !pl.value.is_finite() || !pl.adjoint.is_finite() {
        return Err(Error::NonFiniteLoss { index });
    }
    model.backward(pl.adjoint, scratch, grad);
    Ok(pl.value)
}

// Accumulating straight into the total adds each parameter's per-point
// contribution exactly once, so this is the reference summation order.
fn sequential<M: JetModel, F: Fn(usize, &Jet2) -> PointLoss>(
    model: &M,
    points: &[[f64; 2]],
    point_loss: &F,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut grad = vec![0.0; model.param_count()];
    let mut scratch = model.new_scratch();
    let values = points
        .iter()
        .enumerate()
        .map(|(i, &p)| point_step(model, i, p, point_loss, &mut scratch, &mut grad))
        .collect::<Result<Vec<_>>>()?;
    Ok((values, grad))
}

// Per-point gradients are computed in parallel into a row buffer, then
// added to the total in point order.
fn blocked<M: JetModel, F: Fn(usize, &Jet2) -> PointLoss + Sync>(
    model: &M,
    points: &[[f64; 2]],
    point_loss: &F,
    threads: usize,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let n_params = model.param_count();
    let block = BLOCK_PER_THREAD * threads;
    let mut grad = vec![0.0; n_params];
    let mut values = vec![0.0; points.len()];
    let mut rows = vec![0.0; block * n_params];
    for (b, chunk) in points.chunks(block).enumerate() {
        let base = b * block;
        let used = &mut rows[..chunk.len() * n_params];
        used.fill(0.0);
        used.par_chunks_mut(n_params)
            .zip(values[base..base + chunk.len()].par_iter_mut())
            .enumerate()
            .try_for_each_init(
                || model.new_scratch(),
                |scratch, (k, (row, value))| {
                    *value = point_step(model, base + k, chunk[k], point_loss, scratch, row)?;
                    Ok::<_, Error>(())
                },
            )?;
        for row in used.chunks(n_params) {
            for (g, r) in grad.iter_mut().zip(row) {
                *g += r;
            }
        }
    }
    Ok((values, grad))
}

fn unordered<M: JetModel, F: Fn(usize, &Jet2) -> PointLoss + Sync>(
    model: &M,
    points: &[[f64; 2]],
    point_loss: &F,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let n_params = model.param_count();
    let mut values = vec![0.0; points.len()];
    let grad = points
        .par_iter()
        .zip(values.par_iter_mut())
        .enumerate()
        .try_fold(
            || (vec![0.0; n_params], model.new_scratch()),
            |(mut grad, mut scratch), (i, (&p, value))| {
                *value = point_step(model, i, p, point_loss, &mut scratch, &mut grad)?;
                Ok::<_, Error>((grad, scratch))
            },
        )
        .map(|r| r.map(|(g, _)| g))
        .try_reduce(
            || vec![0.0; n_params],
            |mut a, b| {
                a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
                Ok(a)
            },
        )?;
    Ok((values, grad))
}
