use crate::error::{Error, Result};

/// Highest spline order accepted by [`SplineBasis::uniform`].
pub const MAX_SPLINE_ORDER: usize = 7;

/// B-spline basis of order `k` on a uniform grid of `G` intervals over
/// `[lo, hi]`, padded with `k` knots of the same spacing on each side.
///
/// The basis has `G + k` functions. Inside `[lo, hi]` they form a partition of
/// unity; outside it each function continues as the polynomial piece of the
/// nearest boundary interval.
#[derive(Clone, Debug, PartialEq)]
pub struct SplineBasis {
    knots: Vec<f64>,
    order: usize,
    grid_size: usize,
}

/// Nonzero basis functions at one point and their derivatives up to third
/// order: `ders[d][r]` is the `d`-th derivative of basis `first + r`.
#[derive(Clone, Copy, Debug)]
pub struct LocalBasis {
    pub first: usize,
    pub ders: [[f64; MAX_SPLINE_ORDER + 1]; 4],
}

impl Default for LocalBasis {
    fn default() -> Self {
        LocalBasis {
            first: 0,
            ders: [[0.0; MAX_SPLINE_ORDER + 1]; 4],
        }
    }
}

impl SplineBasis {
    pub fn uniform(grid_size: usize, order: usize, range: [f64; 2]) -> Result<Self> {
        let [lo, hi] = range;
        if grid_size == 0 {
            return Err(Error::Config("spline grid size must be at least 1".into()));
        }
        if order == 0 || order > MAX_SPLINE_ORDER {
            return Err(Error::Config(format!(
                "spline order must be in 1..={MAX_SPLINE_ORDER}, got {order}"
            )));
        }
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::Config(format!("invalid spline grid range [{lo}, {hi}]")));
        }
        let h = (hi - lo) / grid_size as f64;
        let knots = (0..grid_size + 2 * order + 1)
            .map(|i| lo + (i as f64 - order as f64) * h)
            .collect();
        Ok(SplineBasis {
            knots,
            order,
            grid_size,
        })
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn grid_size(&self) -> usize {
        self.grid_size
    }

    /// Number of basis functions, `G + k`.
    pub fn len(&self) -> usize {
        self.grid_size + self.order
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn range(&self) -> [f64; 2] {
        [self.knots[self.order], self.knots[self.order + self.grid_size]]
    }

    /// Knot interval whose polynomial piece is used at `t`, clamped to the
    /// intervals inside the grid range.
    fn span(&self, t: f64) -> usize {
        let k = self.order;
        let last = k + self.grid_size - 1;
        if t < self.knots[k + 1] {
            k
        } else if t >= self.knots[last] {
            last
        } else {
            self.knots[k + 1..last].partition_point(|&u| u <= t) + k
        }
    }

    /// Values and derivatives (up to the third) of the `k + 1` basis
    /// functions that are nonzero on the span containing `t`.
    pub fn local(&self, t: f64, out: &mut LocalBasis) {
        const M: usize = MAX_SPLINE_ORDER + 1;
        let p = self.order;
        let span = self.span(t);
        let u = &self.knots;

        // ndu: upper triangle holds basis values of increasing order,
        // lower triangle the knot differences.
        let mut ndu = [[0.0; M]; M];
        let mut left = [0.0; M];
        let mut right = [0.0; M];
        ndu[0][0] = 1.0;
        for j in 1..=p {
            left[j] = t - u[span + 1 - j];
            right[j] = u[span + j] - t;
            let mut saved = 0.0;
            for r in 0..j {
                ndu[j][r] = right[r + 1] + left[j - r];
                let temp = ndu[r][j - 1] / ndu[j][r];
                ndu[r][j] = saved + right[r + 1] * temp;
                saved = left[j - r] * temp;
            }
            ndu[j][j] = saved;
        }

        out.first = span - p;
        out.ders = [[0.0; M]; 4];
        for j in 0..=p {
            out.ders[0][j] = ndu[j][p];
        }

        let n = p.min(3);
        let mut a = [[0.0; M]; 2];
        for r in 0..=p {
            let (mut s1, mut s2) = (0, 1);
            a[0][0] = 1.0;
            for k in 1..=n {
                let mut d = 0.0;
                let rk = r as isize - k as isize;
                let pk = p - k;
                if r >= k {
                    let rk = rk as usize;
                    a[s2][0] = a[s1][0] / ndu[pk + 1][rk];
                    d = a[s2][0] * ndu[rk][pk];
                }
                let j1 = if rk >= -1 { 1 } else { (-rk) as usize };
                let j2 = if r as isize - 1 <= pk as isize { k - 1 } else { p - r };
                for j in j1..=j2 {
                    let idx = (rk + j as isize) as usize;
                    a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][idx];
                    d += a[s2][j] * ndu[idx][pk];
                }
                if r <= pk {
                    a[s2][k] = -a[s1][k - 1] / ndu[pk + 1][r];
                    d += a[s2][k] * ndu[r][pk];
                }
                out.ders[k][r] = d;
                std::mem::swap(&mut s1, &mut s2);
            }
        }

        let mut factor = p as f64;
        for k in 1..=n {
            for j in 0..=p {
                out.ders[k][j] *= factor;
            }
            factor *= (p - k) as f64;
        }
    }

    /// Values of the local basis functions only.
    pub fn local_values(&self, t: f64, out: &mut [f64; MAX_SPLINE_ORDER + 1]) -> usize {
        let p = self.order;
        let span = self.span(t);
        let u = &self.knots;
        let mut left = [0.0; MAX_SPLINE_ORDER + 1];
        let mut right = [0.0; MAX_SPLINE_ORDER + 1];
        *out = [0.0; MAX_SPLINE_ORDER + 1];
        out[0] = 1.0;
        for j in 1..=p {
            left[j] = t - u[span + 1 - j];
            right[j] = u[span + j] - t;
            let mut saved = 0.0;
            for r in 0..j {
                let temp = out[r] / (right[r + 1] + left[j - r]);
                out[r] = saved + right[r + 1] * temp;
                saved = left[j - r] * temp;
            }
            out[j] = saved;
        }
        span - p
    }
}

/// All `G + k` basis values at `t`.
pub fn bspline_basis(t: f64, basis: &SplineBasis) -> Vec<f64> {
    let mut local = [0.0; MAX_SPLINE_ORDER + 1];
    let first = basis.local_values(t, &mut local);
    let mut all = vec![0.0; basis.len()];
    all[first..=first + basis.order].copy_from_slice(&local[..=basis.order]);
    all
}
