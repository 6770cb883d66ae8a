use std::ops::{Add, AddAssign, Mul, Neg, Sub};

/// Value of a scalar quantity together with its first and pure second
/// derivatives with respect to the inputs `x` and `y`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Jet2 {
    pub val: f64,
    pub dx: f64,
    pub dy: f64,
    pub dxx: f64,
    pub dyy: f64,
}

/// Seeds for the two input coordinates: `x` varies along `dx`, `y` along `dy`.
pub fn seed_input(x: f64, y: f64) -> (Jet2, Jet2) {
    (Jet2::var_x(x), Jet2::var_y(y))
}

impl Jet2 {
    pub const ZERO: Jet2 = Jet2::constant(0.0);

    pub const fn constant(val: f64) -> Self {
        Jet2 {
            val,
            dx: 0.0,
            dy: 0.0,
            dxx: 0.0,
            dyy: 0.0,
        }
    }

    pub const fn var_x(val: f64) -> Self {
        Jet2 {
            val,
            dx: 1.0,
            dy: 0.0,
            dxx: 0.0,
            dyy: 0.0,
        }
    }

    pub const fn var_y(val: f64) -> Self {
        Jet2 {
            val,
            dx: 0.0,
            dy: 1.0,
            dxx: 0.0,
            dyy: 0.0,
        }
    }

    #[inline]
    pub fn scale(self, c: f64) -> Self {
        Jet2 {
            val: self.val * c,
            dx: self.dx * c,
            dy: self.dy * c,
            dxx: self.dxx * c,
            dyy: self.dyy * c,
        }
    }

    /// `self + c * other`, componentwise.
    #[inline]
    pub fn mul_add(self, c: f64, other: Jet2) -> Self {
        Jet2 {
            val: self.val + c * other.val,
            dx: self.dx + c * other.dx,
            dy: self.dy + c * other.dy,
            dxx: self.dxx + c * other.dxx,
            dyy: self.dyy + c * other.dyy,
        }
    }

    /// Euclidean inner product over the five components.
    #[inline]
    pub fn dot(&self, other: &Jet2) -> f64 {
        self.val * other.val
            + self.dx * other.dx
            + self.dy * other.dy
            + self.dxx * other.dxx
            + self.dyy * other.dyy
    }

    #[inline]
    pub fn laplacian(&self) -> f64 {
        self.dxx + self.dyy
    }

    pub fn is_finite(&self) -> bool {
        self.val.is_finite()
            && self.dx.is_finite()
            && self.dy.is_finite()
            && self.dxx.is_finite()
            && self.dyy.is_finite()
    }

    pub fn to_array(self) -> [f64; 5] {
        [self.val, self.dx, self.dy, self.dxx, self.dyy]
    }

    /// Chain rule for a scalar function `g` given `[g, g', g'']` at `self.val`.
    #[inline]
    pub fn compose(self, d: [f64; 3]) -> Jet2 {
        let [g0, g1, g2] = d;
        Jet2 {
            val: g0,
            dx: g1 * self.dx,
            dy: g1 * self.dy,
            dxx: g2 * self.dx * self.dx + g1 * self.dxx,
            dyy: g2 * self.dy * self.dy + g1 * self.dyy,
        }
    }

    /// Adjoint of [`Jet2::compose`] with respect to its input jet.
    ///
    /// `d` holds `[g', g'', g''']` at `self.val` and `out_adj` is the adjoint
    /// of the composed jet.
    #[inline]
    pub fn compose_adjoint(self, d: [f64; 3], out_adj: Jet2) -> Jet2 {
        let [g1, g2, g3] = d;
        let o = out_adj;
        Jet2 {
            val: o.val * g1
                + g2 * (o.dx * self.dx + o.dy * self.dy + o.dxx * self.dxx + o.dyy * self.dyy)
                + g3 * (o.dxx * self.dx * self.dx + o.dyy * self.dy * self.dy),
            dx: o.dx * g1 + 2.0 * g2 * o.dxx * self.dx,
            dy: o.dy * g1 + 2.0 * g2 * o.dyy * self.dy,
            dxx: o.dxx * g1,
            dyy: o.dyy * g1,
        }
    }

    #[inline]
    pub fn unary(self, act: Activation) -> Jet2 {
        match act {
            Activation::Identity => self,
            _ => {
                let [g0, g1, g2, _] = act.derivatives(self.val);
                self.compose([g0, g1, g2])
            }
        }
    }

    pub fn tanh(self) -> Jet2 {
        self.unary(Activation::Tanh)
    }

    pub fn silu(self) -> Jet2 {
        self.unary(Activation::Silu)
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    #[inline]
    fn add(self, b: Jet2) -> Jet2 {
        Jet2 {
            val: self.val + b.val,
            dx: self.dx + b.dx,
            dy: self.dy + b.dy,
            dxx: self.dxx + b.dxx,
            dyy: self.dyy + b.dyy,
        }
    }
}

impl AddAssign for Jet2 {
    #[inline]
    fn add_assign(&mut self, b: Jet2) {
        *self = *self + b;
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    #[inline]
    fn sub(self, b: Jet2) -> Jet2 {
        self + (-b)
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    #[inline]
    fn neg(self) -> Jet2 {
        Jet2 {
            val: -self.val,
            dx: -self.dx,
            dy: -self.dy,
            dxx: -self.dxx,
            dyy: -self.dyy,
        }
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    #[inline]
    fn mul(self, b: Jet2) -> Jet2 {
        let a = self;
        Jet2 {
            val: a.val * b.val,
            dx: a.dx * b.val + a.val * b.dx,
            dy: a.dy * b.val + a.val * b.dy,
            dxx: a.dxx * b.val + 2.0 * a.dx * b.dx + a.val * b.dxx,
            dyy: a.dyy * b.val + 2.0 * a.dy * b.dy + a.val * b.dyy,
        }
    }
}

impl Mul<f64> for Jet2 {
    type Output = Jet2;
    #[inline]
    fn mul(self, c: f64) -> Jet2 {
        self.scale(c)
    }
}

/// Pointwise nonlinearities available to the networks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Activation {
    Tanh,
    /// `x * sigmoid(x)`, the base branch of every KAN edge.
    Silu,
    Identity,
}

impl Activation {
    /// `[f, f', f'', f''']` at `x`. The third derivative feeds the reverse
    /// sweep through second-order jets.
    #[inline]
    pub fn derivatives(self, x: f64) -> [f64; 4] {
        match self {
            Activation::Identity => [x, 1.0, 0.0, 0.0],
            Activation::Tanh => {
                let t = x.tanh();
                let s = 1.0 - t * t;
                [t, s, -2.0 * t * s, -2.0 * s * (1.0 - 3.0 * t * t)]
            }
            Activation::Silu => {
                let sig = sigmoid(x);
                let p = sig * (1.0 - sig);
                let q = 1.0 - 2.0 * sig;
                [
                    x * sig,
                    sig + x * p,
                    p * (2.0 + x * q),
                    p * (q * (3.0 + x * q) - 2.0 * x * p),
                ]
            }
        }
    }

    pub fn eval(self, x: f64) -> f64 {
        match self {
            Activation::Identity => x,
            Activation::Tanh => x.tanh(),
            Activation::Silu => x * sigmoid(x),
        }
    }
}

#[inline]
fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}
