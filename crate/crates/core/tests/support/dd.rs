//! Double-double arithmetic: an unevaluated sum `hi + lo` of two f64.

use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

const LN2: Dd = Dd {
    hi: 6.931_471_805_599_453e-1,
    lo: 2.319_046_813_846_299_6e-17,
};

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    fn ldexp(self, k: i32) -> Dd {
        let f = 2f64.powi(k);
        Dd { hi: self.hi * f, lo: self.lo * f }
    }

    pub fn exp(self) -> Dd {
        if self.hi > 700.0 {
            return Dd::from(f64::INFINITY);
        }
        if self.hi < -700.0 {
            return Dd::ZERO;
        }
        let k = (self.hi / LN2.hi).round();
        let r = (self - LN2 * Dd::from(k)).ldexp(-10);
        // Taylor series of exp(r) - 1 for |r| < 4e-4.
        let mut term = r;
        let mut sum = r;
        for n in 2..=14 {
            term = term * r / Dd::from(n as f64);
            sum = sum + term;
        }
        // (1 + s)^2 - 1 = s (2 + s), applied ten times.
        for _ in 0..10 {
            sum = sum * (Dd::from(2.0) + sum);
        }
        (sum + Dd::ONE).ldexp(k as i32)
    }

    pub fn tanh(self) -> Dd {
        let neg = self.hi < 0.0;
        let a = if neg { -self } else { self };
        let e = (Dd::from(-2.0) * a).exp();
        let t = (Dd::ONE - e) / (Dd::ONE + e);
        if neg {
            -t
        } else {
            t
        }
    }

    pub fn sigmoid(self) -> Dd {
        if self.hi >= 0.0 {
            Dd::ONE / (Dd::ONE + (-self).exp())
        } else {
            let e = self.exp();
            e / (Dd::ONE + e)
        }
    }
}

impl From<f64> for Dd {
    fn from(v: f64) -> Dd {
        Dd { hi: v, lo: 0.0 }
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, b: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, b: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        let r = self - b * Dd::from(q1);
        let q2 = r.hi / b.hi;
        let r = r - b * Dd::from(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo } + Dd::from(q3)
    }
}

/// Second-order jet over double-double scalars.
#[derive(Clone, Copy, Debug)]
pub struct DdJet {
    pub val: Dd,
    pub dx: Dd,
    pub dy: Dd,
    pub dxx: Dd,
    pub dyy: Dd,
}

impl DdJet {
    pub fn constant(val: Dd) -> Self {
        DdJet { val, dx: Dd::ZERO, dy: Dd::ZERO, dxx: Dd::ZERO, dyy: Dd::ZERO }
    }

    pub fn var_x(val: Dd) -> Self {
        DdJet { dx: Dd::ONE, ..Self::constant(val) }
    }

    pub fn var_y(val: Dd) -> Self {
        DdJet { dy: Dd::ONE, ..Self::constant(val) }
    }

    pub fn scale(self, c: Dd) -> Self {
        DdJet {
            val: self.val * c,
            dx: self.dx * c,
            dy: self.dy * c,
            dxx: self.dxx * c,
            dyy: self.dyy * c,
        }
    }

    /// Chain rule given `[g, g', g'']` at `self.val`.
    pub fn compose(self, g: [Dd; 3]) -> Self {
        DdJet {
            val: g[0],
            dx: g[1] * self.dx,
            dy: g[1] * self.dy,
            dxx: g[2] * self.dx * self.dx + g[1] * self.dxx,
            dyy: g[2] * self.dy * self.dy + g[1] * self.dyy,
        }
    }

    pub fn tanh(self) -> Self {
        let t = self.val.tanh();
        let s = Dd::ONE - t * t;
        self.compose([t, s, Dd::from(-2.0) * t * s])
    }

    pub fn silu(self) -> Self {
        let x = self.val;
        let sig = x.sigmoid();
        let p = sig * (Dd::ONE - sig);
        let q = Dd::ONE - Dd::from(2.0) * sig;
        self.compose([x * sig, sig + x * p, p * (Dd::from(2.0) + x * q)])
    }
}

impl Add for DdJet {
    type Output = DdJet;
    fn add(self, b: DdJet) -> DdJet {
        DdJet {
            val: self.val + b.val,
            dx: self.dx + b.dx,
            dy: self.dy + b.dy,
            dxx: self.dxx + b.dxx,
            dyy: self.dyy + b.dyy,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_beats_f64() {
        let third = Dd::ONE / Dd::from(3.0);
        let back = third * Dd::from(3.0) - Dd::ONE;
        assert!(back.to_f64().abs() < 1e-30);
        for x in [-3.7, -0.4, 0.0, 0.25, 1.0, 5.5] {
            let e = Dd::from(x).exp();
            assert!((e.to_f64() - x.exp()).abs() <= 2e-16 * x.exp());
            let t = Dd::from(x).tanh().to_f64();
            assert!((t - x.tanh()).abs() <= 2e-16);
        }
        // exp(a) * exp(-a) == 1 to double-double accuracy
        let a = Dd::from(0.731);
        assert!((a.exp() * (-a).exp() - Dd::ONE).to_f64().abs() < 1e-30);
    }
}
