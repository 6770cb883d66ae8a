//! Second-order forward jets in two spatial inputs, plus the reverse sweep
//! that turns per-point output adjoints into parameter gradients.
//!
//! Only the pure second derivatives are carried; the Laplacian never needs
//! the mixed partial.

mod gradient;
mod jet;

pub use gradient::{parameter_gradient, GradOptions, GradientEval, GradientVector, JetModel, PointLoss};
pub use jet::{seed_input, Activation, Jet2};
