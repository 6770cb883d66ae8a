//! The two PINN backends behind one model type.
//!
//! Parameters live in a single flat vector. MLP layout, per layer: weights
//! row-major `[out][in]`, then biases. KAN layout, per layer and per edge
//! `(target q, source p)` in order `q * in + p`: `w_b`, `w_s`, then the
//! `G + k` spline coefficients.

mod kan;
mod mlp;
mod spline;

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::autodiff::{Jet2, JetModel};
use crate::error::{Error, Result};

pub use kan::{kan_edge, KanScratch};
pub use mlp::MlpScratch;
pub use spline::{bspline_basis, LocalBasis, SplineBasis, MAX_SPLINE_ORDER};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Mlp,
    Kan,
}

impl Backend {
    /// Two hidden layers: 32 tanh units each for the MLP, 5 nodes each for the KAN.
    pub fn default_widths(self) -> Vec<usize> {
        match self {
            Backend::Mlp => vec![2, 32, 32, 1],
            Backend::Kan => vec![2, 5, 5, 1],
        }
    }

    pub fn default_hyper(self) -> Option<KanHyper> {
        match self {
            Backend::Mlp => None,
            Backend::Kan => Some(KanHyper::default()),
        }
    }
}

impl std::fmt::Display for Backend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Backend::Mlp => "mlp",
            Backend::Kan => "kan",
        })
    }
}

impl std::str::FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mlp" => Ok(Backend::Mlp),
            "kan" => Ok(Backend::Kan),
            other => Err(Error::Config(format!("unknown backend {other:?}"))),
        }
    }
}

/// Spline hyperparameters shared by every KAN edge.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KanHyper {
    pub grid_size: usize,
    pub spline_order: usize,
    pub grid_range: [f64; 2],
}

impl Default for KanHyper {
    fn default() -> Self {
        KanHyper {
            grid_size: 5,
            spline_order: 3,
            grid_range: [-1.0, 1.0],
        }
    }
}

impl KanHyper {
    /// Parameters per edge: `w_b`, `w_s` and `G + k` coefficients.
    pub fn params_per_edge(&self) -> usize {
        self.grid_size + self.spline_order + 2
    }
}

/// Parameter count of an architecture, or a configuration error.
pub fn param_count(backend: Backend, widths: &[usize], hyper: Option<&KanHyper>) -> Result<usize> {
    validate_widths(widths)?;
    let pairs = widths.windows(2);
    match (backend, hyper) {
        (Backend::Mlp, None) => Ok(pairs.map(|w| w[0] * w[1] + w[1]).sum()),
        (Backend::Kan, Some(h)) => {
            SplineBasis::uniform(h.grid_size, h.spline_order, h.grid_range)?;
            Ok(pairs.map(|w| w[0] * w[1]).sum::<usize>() * h.params_per_edge())
        }
        (Backend::Mlp, Some(_)) => Err(Error::Config("MLP models take no KAN hyperparameters".into())),
        (Backend::Kan, None) => Err(Error::Config("KAN models need spline hyperparameters".into())),
    }
}

fn validate_widths(widths: &[usize]) -> Result<()> {
    if widths.len() < 2 {
        return Err(Error::Config("need at least an input and an output layer".into()));
    }
    if widths[0] != 2 || widths[widths.len() - 1] != 1 {
        return Err(Error::Config(format!(
            "layer widths must start with 2 and end with 1, got {widths:?}"
        )));
    }
    if widths.contains(&0) {
        return Err(Error::Config(format!("zero-width layer in {widths:?}")));
    }
    Ok(())
}

/// Architecture plus flat parameter vector for either backend.
#[derive(Clone, Debug, PartialEq)]
pub struct NetworkModel {
    backend: Backend,
    layer_widths: Vec<usize>,
    kan_hyper: Option<KanHyper>,
    basis: Option<SplineBasis>,
    params: Vec<f64>,
    seed: u64,
}

/// On-disk form of a [`NetworkModel`].
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelDocument {
    format_version: u32,
    backend: Backend,
    layer_widths: Vec<usize>,
    kan_hyper: Option<KanHyper>,
    seed: u64,
    params: Vec<f64>,
}

/// Builds a freshly initialized model.
///
/// MLP weights are uniform in `±sqrt(6 / (fan_in + fan_out))` with zero
/// biases. KAN edges get `w_b` from the same uniform law, `w_s = 1` and
/// spline coefficients drawn from `N(0, 0.1²)`.
pub fn init_model(
    backend: Backend,
    layer_widths: &[usize],
    kan_hyper: Option<KanHyper>,
    seed: u64,
) -> Result<NetworkModel> {
    let n = param_count(backend, layer_widths, kan_hyper.as_ref())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut params = Vec::with_capacity(n);
    for w in layer_widths.windows(2) {
        let (fan_in, fan_out) = (w[0], w[1]);
        let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
        match kan_hyper {
            None => {
                params.extend((0..fan_in * fan_out).map(|_| rng.random_range(-limit..=limit)));
                params.extend(std::iter::repeat_n(0.0, fan_out));
            }
            Some(h) => {
                let normal = Normal::new(0.0, 0.1).expect("valid normal");
                for _ in 0..fan_in * fan_out {
                    params.push(rng.random_range(-limit..=limit));
                    params.push(1.0);
                    params.extend((0..h.grid_size + h.spline_order).map(|_| normal.sample(&mut rng)));
                }
            }
        }
    }
    debug_assert_eq!(params.len(), n);
    NetworkModel::from_parts(backend, layer_widths.to_vec(), kan_hyper, params, seed)
}

impl NetworkModel {
    pub fn from_parts(
        backend: Backend,
        layer_widths: Vec<usize>,
        kan_hyper: Option<KanHyper>,
        params: Vec<f64>,
        seed: u64,
    ) -> Result<Self> {
        let n = param_count(backend, &layer_widths, kan_hyper.as_ref())?;
        if params.len() != n {
            return Err(Error::Config(format!(
                "expected {n} parameters for {backend} {layer_widths:?}, got {}",
                params.len()
            )));
        }
        if let Some(i) = params.iter().position(|p| !p.is_finite()) {
            return Err(Error::Config(format!("parameter {i} is not finite")));
        }
        let basis = match kan_hyper {
            Some(h) => Some(SplineBasis::uniform(h.grid_size, h.spline_order, h.grid_range)?),
            None => None,
        };
        Ok(NetworkModel {
            backend,
            layer_widths,
            kan_hyper,
            basis,
            params,
            seed,
        })
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn layer_widths(&self) -> &[usize] {
        &self.layer_widths
    }

    pub fn kan_hyper(&self) -> Option<&KanHyper> {
        self.kan_hyper.as_ref()
    }

    pub fn spline_basis(&self) -> Option<&SplineBasis> {
        self.basis.as_ref()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn with_params(&self, params: Vec<f64>) -> Result<Self> {
        Self::from_parts(
            self.backend,
            self.layer_widths.clone(),
            self.kan_hyper,
            params,
            self.seed,
        )
    }

    pub fn param_count(&self) -> usize {
        self.params.len()
    }

    /// Output jet for input jets `x` and `y`.
    pub fn forward(&self, x: Jet2, y: Jet2) -> Jet2 {
        let mut scratch = self.new_scratch();
        self.forward_recorded(x, y, &mut scratch)
    }

    /// Plain scalar forward pass, no derivatives.
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match self.backend {
            Backend::Mlp => mlp::eval(self, x, y),
            Backend::Kan => kan::eval(self, x, y),
        }
    }

    pub fn to_json(&self) -> String {
        let doc = ModelDocument {
            format_version: FORMAT_VERSION,
            backend: self.backend,
            layer_widths: self.layer_widths.clone(),
            kan_hyper: self.kan_hyper,
            seed: self.seed,
            params: self.params.clone(),
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("model serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ModelDocument = serde_json::from_str(text)?;
        if doc.format_version != FORMAT_VERSION {
            return Err(Error::Config(format!(
                "unsupported model format_version {} (expected {FORMAT_VERSION})",
                doc.format_version
            )));
        }
        Self::from_parts(doc.backend, doc.layer_widths, doc.kan_hyper, doc.params, doc.seed)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// Recorded intermediates for either backend.
#[derive(Debug)]
pub enum ModelScratch {
    Mlp(MlpScratch),
    Kan(KanScratch),
}

impl JetModel for NetworkModel {
    type Scratch = ModelScratch;

    fn param_count(&self) -> usize {
        self.params.len()
    }

    fn new_scratch(&self) -> ModelScratch {
        match self.backend {
            Backend::Mlp => ModelScratch::Mlp(MlpScratch::new(&self.layer_widths)),
            Backend::Kan => ModelScratch::Kan(KanScratch::new(&self.layer_widths)),
        }
    }

    fn forward_recorded(&self, x: Jet2, y: Jet2, scratch: &mut ModelScratch) -> Jet2 {
        match scratch {
            ModelScratch::Mlp(s) => mlp::forward(self, x, y, s),
            ModelScratch::Kan(s) => kan::forward(self, x, y, s),
        }
    }

    fn backward(&self, adjoint: Jet2, scratch: &mut ModelScratch, grad: &mut [f64]) {
        match scratch {
            ModelScratch::Mlp(s) => mlp::backward(self, adjoint, s, grad),
            ModelScratch::Kan(s) => kan::backward(self, adjoint, s, grad),
        }
    }
}
