//! Collocation points: random interior points and a corner-free lattice on
//! each side of the unit square.

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Potential on the excitation side `y = 1`.
pub const EXCITATION: f64 = 1.0;

// Separate ChaCha stream so sample positions are independent of the
// parameter initialization drawn from the same seed.
const SAMPLING_STREAM: u64 = 1;

/// A boundary collocation point with its Dirichlet target.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryPoint {
    pub x: f64,
    pub y: f64,
    pub target: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampleSet {
    pub interior: Vec<[f64; 2]>,
    pub boundary: Vec<BoundaryPoint>,
}

impl SampleSet {
    pub fn new(n_interior: usize, per_side: usize, seed: u64) -> Self {
        SampleSet {
            interior: sample_interior(n_interior, seed),
            boundary: sample_boundary(per_side),
        }
    }

    /// Interior points followed by boundary points, the order used by the loss.
    pub fn all_points(&self) -> Vec<[f64; 2]> {
        self.interior
            .iter()
            .copied()
            .chain(self.boundary.iter().map(|b| [b.x, b.y]))
            .collect()
    }
}

/// `n` points i.i.d. uniform on the open unit square.
pub fn sample_interior(n: usize, seed: u64) -> Vec<[f64; 2]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(SAMPLING_STREAM);
    (0..n)
        .map(|_| [rng.sample(Open01), rng.sample(Open01)])
        .collect()
}

/// `per_side` points at `(j + 0.5) / per_side` along each side, in the order
/// bottom, right, top, left.
pub fn sample_boundary(per_side: usize) -> Vec<BoundaryPoint> {
    let s = |j: usize| (j as f64 + 0.5) / per_side as f64;
    let side = |f: &dyn Fn(f64) -> BoundaryPoint| (0..per_side).map(|j| f(s(j))).collect::<Vec<_>>();
    let mut out = Vec::with_capacity(4 * per_side);
    out.extend(side(&|t| BoundaryPoint { x: t, y: 0.0, target: 0.0 }));
    out.extend(side(&|t| BoundaryPoint { x: 1.0, y: t, target: 0.0 }));
    out.extend(side(&|t| BoundaryPoint { x: t, y: 1.0, target: EXCITATION }));
    out.extend(side(&|t| BoundaryPoint { x: 0.0, y: t, target: 0.0 }));
    out
}
