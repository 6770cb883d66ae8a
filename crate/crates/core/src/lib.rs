//! Physics-informed neural networks for the Laplace equation on the unit square.
//!
//! The crate trains either a tanh multilayer perceptron or a Kolmogorov–Arnold
//! network (B-spline edge activations) so that its output satisfies
//! `-∇²u = 0` inside the box with `u = 1` on the `y = 1` side and `u = 0` on the
//! other three sides. Laplacians come from second-order forward jets, parameter
//! gradients from a hand-written reverse sweep over those jets.
//!
//! Module map:
//!
//! - [`autodiff`]: [`Jet2`] arithmetic and the batched parameter-gradient driver.
//! - [`networks`]: the MLP and KAN backends behind [`NetworkModel`].
//! - [`sampling`]: interior and boundary collocation points.
//! - [`objective`]: residuals and the weighted interior + boundary loss.
//! - [`training`]: Adam and the full-batch training loop.
//! - [`oracle`]: Fourier-series ground truth and an SOR finite-difference cross-check.
//! - [`evaluation`]: grid evaluation, error statistics, CSV and PGM output.

pub mod autodiff;
pub mod error;
pub mod evaluation;
pub mod networks;
pub mod objective;
pub mod oracle;
pub mod sampling;
pub mod training;

pub use autodiff::{seed_input, Activation, GradOptions, GradientVector, Jet2, PointLoss};
pub use error::{Error, Result};
pub use evaluation::{DiffStats, HeatmapRange};
pub use networks::{init_model, Backend, KanHyper, NetworkModel};
pub use objective::LossBreakdown;
pub use oracle::GridField;
pub use sampling::{BoundaryPoint, SampleSet};
pub use training::{TrainConfig, TrainHistory};
