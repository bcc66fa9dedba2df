//! Double-double arithmetic (about 106 bits of mantissa).
//!
//! Used wherever a phase `t * ln n` has to be reduced modulo `2*pi` for
//! heights far beyond what a single `f64` resolves, and for the exact
//! geometric-sum identities in [`crate::kronecker`].

use std::cmp::Ordering;
use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DoubleDouble {
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

pub const PI: DoubleDouble = DoubleDouble::new(std::f64::consts::PI, 1.2246467991473532e-16);
pub const TWO_PI: DoubleDouble = DoubleDouble::new(std::f64::consts::TAU, 2.4492935982947064e-16);
pub const HALF_PI: DoubleDouble = DoubleDouble::new(std::f64::consts::FRAC_PI_2, 6.123233995736766e-17);
pub const LN2: DoubleDouble = DoubleDouble::new(std::f64::consts::LN_2, 2.3190468138462996e-17);

impl DoubleDouble {
    pub const ZERO: DoubleDouble = DoubleDouble::new(0.0, 0.0);
    pub const ONE: DoubleDouble = DoubleDouble::new(1.0, 0.0);

    pub const fn new(hi: f64, lo: f64) -> Self {
        DoubleDouble { hi, lo }
    }

    pub const fn from_f64(x: f64) -> Self {
        DoubleDouble { hi: x, lo: 0.0 }
    }

    /// Exact product of two doubles.
    pub fn product(a: f64, b: f64) -> Self {
        let (p, e) = two_prod(a, b);
        DoubleDouble { hi: p, lo: e }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }

    pub fn mul_f64(self, b: f64) -> Self {
        let (p, mut e) = two_prod(self.hi, b);
        e += self.lo * b;
        let (hi, lo) = quick_two_sum(p, e);
        DoubleDouble { hi, lo }
    }

    pub fn div_f64(self, b: f64) -> Self {
        let q1 = self.hi / b;
        let r = self - DoubleDouble::product(q1, b);
        let q2 = r.hi / b;
        let r = r - DoubleDouble::product(q2, b);
        let q3 = r.hi / b;
        let (hi, lo) = quick_two_sum(q1, q2);
        DoubleDouble { hi, lo } + DoubleDouble::from_f64(q3)
    }

    /// `self * 2^k`, exact.
    pub fn ldexp(self, k: i32) -> Self {
        let s = 2f64.powi(k);
        DoubleDouble {
            hi: self.hi * s,
            lo: self.lo * s,
        }
    }

    /// Remainder modulo `2*pi` in `(-pi, pi]`.
    ///
    /// Accurate for `|self|` up to about `2^52`; the reduction error is
    /// roughly `|self| * 2^-104`.
    pub fn rem_two_pi(self) -> Self {
        let q = (self.hi / TWO_PI.hi).round();
        let mut r = self - TWO_PI.mul_f64(q);
        if r > PI {
            r = r - TWO_PI;
        } else if r <= -PI {
            r = r + TWO_PI;
        }
        r
    }

    pub fn exp(self) -> Self {
        if self.hi > 709.0 {
            return DoubleDouble::from_f64(f64::INFINITY);
        }
        if self.hi < -745.0 {
            return DoubleDouble::ZERO;
        }
        let k = (self.hi / LN2.hi).round();
        let r = (self - LN2.mul_f64(k)).ldexp(-10);
        // expm1(r) by Taylor; |r| < 4e-4 so 10 terms reach 2^-106
        let mut term = r;
        let mut sum = r;
        for n in 2..=11 {
            term = (term * r).div_f64(n as f64);
            sum = sum + term;
        }
        // (1 + p)^2 - 1 = 2p + p^2 keeps the small part accurate
        for _ in 0..10 {
            sum = sum.mul_f64(2.0) + sum * sum;
        }
        (sum + DoubleDouble::ONE).ldexp(k as i32)
    }

    /// Natural logarithm of a positive value (two Newton steps on `exp`).
    pub fn ln(self) -> Self {
        assert!(self.hi > 0.0, "ln of non-positive double-double");
        let mut y = DoubleDouble::from_f64(self.hi.ln());
        for _ in 0..2 {
            y = y + self * (-y).exp() - DoubleDouble::ONE;
        }
        y
    }

    /// `(sin x, cos x)`, accurate to about `1e-31` after reduction.
    pub fn sin_cos(self) -> (Self, Self) {
        let r = self.rem_two_pi();
        let quadrant = (r.hi / HALF_PI.hi).round();
        let t = r - HALF_PI.mul_f64(quadrant);
        let t2 = t * t;
        let mut s = t;
        let mut c = DoubleDouble::ONE;
        let mut ts = t;
        let mut tc = DoubleDouble::ONE;
        let mut n = 1.0;
        loop {
            ts = -(ts * t2).div_f64((n + 1.0) * (n + 2.0));
            tc = -(tc * t2).div_f64(n * (n + 1.0));
            s = s + ts;
            c = c + tc;
            n += 2.0;
            if ts.hi.abs() < 1e-34 && tc.hi.abs() < 1e-34 {
                break;
            }
        }
        match quadrant as i64 {
            0 => (s, c),
            1 => (c, -s),
            -1 => (-c, s),
            _ => (-s, -c),
        }
    }
}

impl From<f64> for DoubleDouble {
    fn from(x: f64) -> Self {
        DoubleDouble::from_f64(x)
    }
}

impl Add for DoubleDouble {
    type Output = DoubleDouble;
    fn add(self, o: DoubleDouble) -> DoubleDouble {
        let (s, mut e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        e += t;
        let (s, mut e) = quick_two_sum(s, e);
        e += f;
        let (hi, lo) = quick_two_sum(s, e);
        DoubleDouble { hi, lo }
    }
}

impl Neg for DoubleDouble {
    type Output = DoubleDouble;
    fn neg(self) -> DoubleDouble {
        DoubleDouble {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Sub for DoubleDouble {
    type Output = DoubleDouble;
    fn sub(self, o: DoubleDouble) -> DoubleDouble {
        self + (-o)
    }
}

impl Mul for DoubleDouble {
    type Output = DoubleDouble;
    fn mul(self, o: DoubleDouble) -> DoubleDouble {
        let (p, mut e) = two_prod(self.hi, o.hi);
        e += self.hi * o.lo + self.lo * o.hi;
        let (hi, lo) = quick_two_sum(p, e);
        DoubleDouble { hi, lo }
    }
}

impl Div for DoubleDouble {
    type Output = DoubleDouble;
    fn div(self, o: DoubleDouble) -> DoubleDouble {
        let q1 = self.hi / o.hi;
        let r = self - o.mul_f64(q1);
        let q2 = r.hi / o.hi;
        let r = r - o.mul_f64(q2);
        let q3 = r.hi / o.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        DoubleDouble { hi, lo } + DoubleDouble::from_f64(q3)
    }
}

impl PartialOrd for DoubleDouble {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&o.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&o.lo),
            other => other,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_are_consistent() {
        assert_eq!(PI.mul_f64(2.0), TWO_PI);
        assert_eq!(PI.ldexp(-1), HALF_PI);
    }

    #[test]
    fn exact_product() {
        let a = 1.0 + f64::EPSILON;
        let p = DoubleDouble::product(a, a);
        assert_eq!(p.hi, 1.0 + 2.0 * f64::EPSILON);
        assert_eq!(p.lo, f64::EPSILON * f64::EPSILON);
    }

    #[test]
    fn division_roundtrip() {
        let x = DoubleDouble::from_f64(1.0) / DoubleDouble::from_f64(3.0);
        let back = x.mul_f64(3.0) - DoubleDouble::ONE;
        assert!(back.to_f64().abs() < 1e-31);
    }

    #[test]
    fn exp_ln_inverse() {
        for x in [1e-8, 0.3, 1.0, 2.5, 17.0, 123.456] {
            let d = DoubleDouble::from_f64(x);
            let back = d.ln().exp();
            assert!(((back - d) / d).to_f64().abs() < 1e-30, "x = {x}");
        }
        assert!((LN2 - DoubleDouble::from_f64(2.0).ln()).to_f64().abs() < 1e-31);
    }

    #[test]
    fn sin_cos_identities() {
        for x in [0.1, 1.0, -2.0, 3.0, 100.0, 12345.678] {
            let (s, c) = DoubleDouble::from_f64(x).sin_cos();
            let one = s * s + c * c - DoubleDouble::ONE;
            assert!(one.to_f64().abs() < 1e-30, "x = {x}");
            assert!((s.to_f64() - x.sin()).abs() < 1e-15);
            assert!((c.to_f64() - x.cos()).abs() < 1e-15);
        }
    }

    #[test]
    fn reduction_range() {
        for x in [-10.0, -3.2, 0.0, 3.2, 1e6, 1.5e12] {
            let r = DoubleDouble::from_f64(x).rem_two_pi();
            assert!(r > -PI && r <= PI, "x = {x}");
        }
    }
}
