//! Physics-informed loss: `alpha * mean(|∇²u|²)` over interior points plus
//! `mean((u - g)²)` over boundary points.

use crate::autodiff::{parameter_gradient, seed_input, GradOptions, GradientVector, Jet2, PointLoss};
use crate::error::Result;
use crate::networks::NetworkModel;
use crate::sampling::{BoundaryPoint, SampleSet};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LossBreakdown {
    pub interior: f64,
    pub boundary: f64,
    pub total: f64,
    pub alpha: f64,
}

impl LossBreakdown {
    fn new(interior: f64, boundary: f64, alpha: f64) -> Self {
        LossBreakdown {
            interior,
            boundary,
            total: alpha * interior + boundary,
            alpha,
        }
    }
}

/// `-(u_xx + u_yy)` at `point`.
pub fn pde_residual(model: &NetworkModel, point: [f64; 2]) -> f64 {
    let (jx, jy) = seed_input(point[0], point[1]);
    -model.forward(jx, jy).laplacian()
}

fn mean(values: impl Iterator<Item = f64>, n: usize) -> f64 {
    values.fold(0.0, |acc, v| acc + v) / n as f64
}

/// Mean squared residual, without the `alpha` weight.
pub fn interior_loss(model: &NetworkModel, points: &[[f64; 2]]) -> f64 {
    mean(points.iter().map(|&p| pde_residual(model, p).powi(2)), points.len())
}

pub fn boundary_loss(model: &NetworkModel, records: &[BoundaryPoint]) -> f64 {
    mean(
        records.iter().map(|b| (model.eval(b.x, b.y) - b.target).powi(2)),
        records.len(),
    )
}

pub fn total_loss(model: &NetworkModel, samples: &SampleSet, alpha: f64) -> LossBreakdown {
    LossBreakdown::new(
        interior_loss(model, &samples.interior),
        boundary_loss(model, &samples.boundary),
        alpha,
    )
}

/// Loss and its gradient with respect to every model parameter.
///
/// The reported breakdown uses the same per-point terms and summation order
/// as [`total_loss`].
pub fn loss_and_gradient(
    model: &NetworkModel,
    samples: &SampleSet,
    alpha: f64,
    opts: GradOptions,
) -> Result<(LossBreakdown, GradientVector)> {
    let n_i = samples.interior.len();
    let n_b = samples.boundary.len();
    let w_i = alpha / n_i as f64;
    let w_b = 1.0 / n_b as f64;
    let points = samples.all_points();
    let eval = parameter_gradient(
        model,
        &points,
        |k, jet: &Jet2| {
            if k < n_i {
                let r = -jet.laplacian();
                let g = -2.0 * w_i * r;
                PointLoss {
                    value: r * r,
                    adjoint: Jet2 { dxx: g, dyy: g, ..Jet2::ZERO },
                }
            } else {
                let e = jet.val - samples.boundary[k - n_i].target;
                PointLoss {
                    value: e * e,
                    adjoint: Jet2::constant(2.0 * w_b * e),
                }
            }
        },
        opts,
    )?;
    let interior = mean(eval.values[..n_i].iter().copied(), n_i);
    let boundary = mean(eval.values[n_i..].iter().copied(), n_b);
    Ok((LossBreakdown::new(interior, boundary, alpha), eval.gradient))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::networks::{init_model, Backend};
    use crate::sampling::sample_boundary;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn model(backend: Backend, seed: u64) -> NetworkModel {
        init_model(backend, &backend.default_widths(), backend.default_hyper(), seed).unwrap()
    }

    fn zero_mlp() -> NetworkModel {
        model(Backend::Mlp, 0).with_params(vec![0.0; 1185]).unwrap()
    }

    /// MLP whose output bias is 1 and every other parameter 0.
    fn constant_one() -> NetworkModel {
        let mut p = vec![0.0; 1185];
        p[1184] = 1.0;
        model(Backend::Mlp, 0).with_params(p).unwrap()
    }

    #[test]
    fn zero_network() {
        let m = zero_mlp();
        assert_eq!(pde_residual(&m, [0.3, 0.6]), 0.0);
        let samples = SampleSet::new(2500, 50, 42);
        assert_eq!(interior_loss(&m, &samples.interior), 0.0);
        assert_eq!(boundary_loss(&m, &samples.boundary), 0.25);
        let l = total_loss(&m, &samples, 1.0);
        assert_eq!((l.interior, l.boundary, l.total), (0.0, 0.25, 0.25));
    }

    #[test]
    fn constant_one_boundary_loss() {
        assert_eq!(boundary_loss(&constant_one(), &sample_boundary(50)), 0.75);
    }

    #[test]
    fn zero_targets_reduce_to_plain_square() {
        let m = model(Backend::Kan, 4);
        let b: Vec<_> = sample_boundary(10)
            .into_iter()
            .map(|p| BoundaryPoint { target: 0.0, ..p })
            .collect();
        let plain = b.iter().map(|p| m.eval(p.x, p.y).powi(2)).sum::<f64>() / b.len() as f64;
        assert_eq!(boundary_loss(&m, &b), plain);
    }

    #[test]
    fn residual_matches_stencil() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for backend in [Backend::Mlp, Backend::Kan] {
            let m = model(backend, 17);
            for _ in 0..10 {
                let (x, y) = (rng.random_range(0.0..1.0), rng.random_range(0.0..1.0));
                let h = 1e-4;
                let lap = (m.eval(x + h, y) + m.eval(x - h, y) + m.eval(x, y + h) + m.eval(x, y - h)
                    - 4.0 * m.eval(x, y))
                    / (h * h);
                assert!((pde_residual(&m, [x, y]) + lap).abs() <= 1e-5);
            }
        }
    }

    #[test]
    fn residual_flips_with_output_layer() {
        let m = model(Backend::Mlp, 2);
        let mut p = m.params().to_vec();
        for v in &mut p[1185 - 33..] {
            *v = -*v;
        }
        let neg = m.with_params(p).unwrap();
        for pt in [[0.2, 0.3], [0.7, 0.9]] {
            assert_eq!(pde_residual(&m, pt), -pde_residual(&neg, pt));
        }
    }

    #[test]
    fn single_point_and_permutation() {
        let m = model(Backend::Mlp, 3);
        let p = [0.41, 0.27];
        assert_eq!(interior_loss(&m, &[p]), pde_residual(&m, p).powi(2));
        let pts: Vec<_> = SampleSet::new(8, 1, 5).interior;
        let mut rev = pts.clone();
        rev.reverse();
        let (a, b) = (interior_loss(&m, &pts), interior_loss(&m, &rev));
        assert!((a - b).abs() <= 1e-15 * a);
    }

    #[test]
    fn alpha_weights_interior_only() {
        let m = model(Backend::Kan, 1);
        let s = SampleSet::new(50, 5, 2);
        let one = total_loss(&m, &s, 1.0);
        let two = total_loss(&m, &s, 2.0);
        assert_eq!(one.total, one.interior + one.boundary);
        assert_eq!(two.total, 2.0 * one.interior + one.boundary);
        assert!(one.total >= one.boundary && two.total >= two.boundary);
    }

    #[test]
    fn gradient_path_agrees_with_loss() {
        for backend in [Backend::Mlp, Backend::Kan] {
            let m = model(backend, 7);
            let s = SampleSet::new(30, 4, 3);
            let (l, _) = loss_and_gradient(&m, &s, 1.5, GradOptions::default()).unwrap();
            assert_eq!(l, total_loss(&m, &s, 1.5));
        }
    }

    #[test]
    fn zero_output_has_zero_boundary_gradient() {
        let m = zero_mlp();
        let s = SampleSet {
            interior: vec![[0.5, 0.5]],
            boundary: sample_boundary(3)
                .into_iter()
                .map(|b| BoundaryPoint { target: 0.0, ..b })
                .collect(),
        };
        let (_, g) = loss_and_gradient(&m, &s, 1.0, GradOptions::default()).unwrap();
        assert!(g.values.iter().all(|&v| v == 0.0));
    }

    // f64 central differences cannot resolve the tiny gradients of KAN
    // coefficients whose support barely meets the batch; the double-double
    // oracle in tests/gradient_oracle.rs covers both backends.
    #[test]
    fn total_loss_gradient_matches_finite_differences() {
        for backend in [Backend::Mlp] {
            let m = model(backend, 42);
            let s = SampleSet::new(12, 2, 8);
            let (_, g) = loss_and_gradient(&m, &s, 1.0, GradOptions::default()).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(10);
            for _ in 0..10 {
                let k = rng.random_range(0..m.param_count());
                let h = 1e-6;
                let shifted = |d: f64| {
                    let mut p = m.params().to_vec();
                    p[k] += d;
                    total_loss(&m.with_params(p).unwrap(), &s, 1.0).total
                };
                let fd = (shifted(h) - shifted(-h)) / (2.0 * h);
                let an = g.values[k];
                assert!((an - fd).abs() / an.abs().max(1e-8) <= 1e-5, "{backend} {k}: {an} vs {fd}");
            }
        }
    }
}
