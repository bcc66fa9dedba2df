//! Fixed-point binary floats on top of `num-bigint`.
//!
//! An [`ExtFloat`] stores `mant / 2^bits` for a signed big integer `mant`.
//! Precision is absolute rather than relative, which is what partial sums of
//! Dirichlet series want: every term is bounded by one in modulus. Transcendental
//! functions run with guard bits and round back to the caller's precision.

use std::cell::RefCell;
use std::collections::HashMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

const GUARD: u32 = 32;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtFloat {
    mant: BigInt,
    bits: u32,
}

thread_local! {
    static CONSTS: RefCell<HashMap<u32, (ExtFloat, ExtFloat)>> = RefCell::new(HashMap::new());
}

fn ldexp(x: f64, e: i64) -> f64 {
    // split to avoid overflow in the intermediate power
    let e = e.clamp(-2200, 2200) as i32;
    let half = e / 2;
    x * 2f64.powi(half) * 2f64.powi(e - half)
}

fn shift(m: &BigInt, by: i64) -> BigInt {
    if by >= 0 {
        m << (by as usize)
    } else {
        // round half up
        let s = (-by) as usize;
        (m + (BigInt::from(1) << (s - 1))) >> s
    }
}

impl ExtFloat {
    pub fn zero(bits: u32) -> Self {
        ExtFloat {
            mant: BigInt::zero(),
            bits,
        }
    }

    pub fn from_i64(v: i64, bits: u32) -> Self {
        ExtFloat {
            mant: BigInt::from(v) << bits as usize,
            bits,
        }
    }

    /// Exact conversion of a finite double (rounded to `bits` fractional bits).
    pub fn from_f64(x: f64, bits: u32) -> Self {
        assert!(x.is_finite(), "non-finite value {x}");
        if x == 0.0 {
            return ExtFloat::zero(bits);
        }
        let b = x.abs().to_bits();
        let exp = ((b >> 52) & 0x7ff) as i64;
        let frac = b & ((1u64 << 52) - 1);
        let (m, e) = if exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), exp - 1075)
        };
        let mut mant = shift(&BigInt::from(m), e + bits as i64);
        if x < 0.0 {
            mant = -mant;
        }
        ExtFloat { mant, bits }
    }

    pub fn from_ratio(r: &BigRational, bits: u32) -> Self {
        let num: BigInt = r.numer() << bits as usize;
        ExtFloat {
            mant: num / r.denom(),
            bits,
        }
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    /// Same value at a different precision.
    pub fn with_bits(&self, bits: u32) -> Self {
        ExtFloat {
            mant: shift(&self.mant, bits as i64 - self.bits as i64),
            bits,
        }
    }

    pub fn to_f64(&self) -> f64 {
        if self.mant.is_zero() {
            return 0.0;
        }
        let nb = self.mant.bits() as i64;
        let excess = (nb - 62).max(0);
        let top = (&self.mant >> excess as usize).to_i64().expect("fits in 63 bits");
        ldexp(top as f64, excess - self.bits as i64)
    }

    pub fn abs(&self) -> Self {
        ExtFloat {
            mant: self.mant.abs(),
            bits: self.bits,
        }
    }

    /// `self * 2^k`.
    pub fn ldexp(&self, k: i64) -> Self {
        ExtFloat {
            mant: shift(&self.mant, k),
            bits: self.bits,
        }
    }

    pub fn div(&self, o: &ExtFloat) -> Self {
        assert!(!o.mant.is_zero(), "division by zero");
        let o = o.with_bits(self.bits);
        ExtFloat {
            mant: (&self.mant << self.bits as usize) / &o.mant,
            bits: self.bits,
        }
    }

    pub fn div_i64(&self, d: i64) -> Self {
        ExtFloat {
            mant: &self.mant / d,
            bits: self.bits,
        }
    }

    pub fn pi(bits: u32) -> Self {
        consts(bits).0
    }

    pub fn ln2(bits: u32) -> Self {
        consts(bits).1
    }

    pub fn exp(&self) -> Self {
        let w = self.bits + GUARD;
        let x = self.with_bits(w);
        let ln2 = ExtFloat::ln2(w);
        let k = (x.to_f64() / std::f64::consts::LN_2).round() as i64;
        let r = (&x - &ln2.mul_i64(k)).ldexp(-8);
        let one = ExtFloat::from_i64(1, w);
        let mut sum = one.clone();
        let mut term = one;
        let mut n = 1;
        loop {
            term = (&term * &r).div_i64(n);
            if term.is_zero() {
                break;
            }
            sum = &sum + &term;
            n += 1;
        }
        for _ in 0..8 {
            sum = &sum * &sum;
        }
        sum.ldexp(k).with_bits(self.bits)
    }

    /// Natural logarithm; panics unless `self > 0`.
    pub fn ln(&self) -> Self {
        assert!(self.mant.is_positive(), "ln of non-positive value");
        let w = self.bits + GUARD;
        let x = self.with_bits(w);
        // x = y * 2^k with y in [1, 2)
        let k = x.mant.bits() as i64 - 1 - w as i64;
        let y = x.ldexp(-k);
        let one = ExtFloat::from_i64(1, w);
        let z = (&y - &one).div(&(&y + &one));
        let z2 = &z * &z;
        let mut pow = z.clone();
        let mut sum = z;
        let mut n = 3;
        loop {
            pow = &pow * &z2;
            let term = pow.div_i64(n);
            if term.is_zero() {
                break;
            }
            sum = &sum + &term;
            n += 2;
        }
        (&sum.ldexp(1) + &ExtFloat::ln2(w).mul_i64(k)).with_bits(self.bits)
    }

    /// `(sin x, cos x)`.
    pub fn sin_cos(&self) -> (Self, Self) {
        let w = self.bits + GUARD + (self.to_f64().abs().log2().max(0.0) as u32);
        let x = self.with_bits(w);
        let two_pi = ExtFloat::pi(w).ldexp(1);
        let q = (x.to_f64() / std::f64::consts::TAU).round() as i64;
        let r = (&x - &two_pi.mul_i64(q)).ldexp(-6);
        let r2 = &r * &r;
        let one = ExtFloat::from_i64(1, w);
        let (mut s, mut c) = (r.clone(), one.clone());
        let (mut ts, mut tc) = (r, one);
        let mut n: i64 = 1;
        loop {
            ts = -(&ts * &r2).div_i64((n + 1) * (n + 2));
            tc = -(&tc * &r2).div_i64(n * (n + 1));
            if ts.is_zero() && tc.is_zero() {
                break;
            }
            s = &s + &ts;
            c = &c + &tc;
            n += 2;
        }
        for _ in 0..6 {
            let s2 = (&s * &c).ldexp(1);
            c = &(&c * &c) - &(&s * &s);
            s = s2;
        }
        (s.with_bits(self.bits), c.with_bits(self.bits))
    }

    pub fn mul_i64(&self, k: i64) -> Self {
        ExtFloat {
            mant: &self.mant * k,
            bits: self.bits,
        }
    }
}

fn consts(bits: u32) -> (ExtFloat, ExtFloat) {
    CONSTS.with(|c| {
        c.borrow_mut()
            .entry(bits)
            .or_insert_with(|| {
                let w = bits + GUARD;
                // Machin: pi = 16 atan(1/5) - 4 atan(1/239)
                let pi = &atan_inv(5, w).mul_i64(16) - &atan_inv(239, w).mul_i64(4);
                // ln 2 = 2 atanh(1/3)
                let ln2 = atanh_inv(3, w).ldexp(1);
                (pi.with_bits(bits), ln2.with_bits(bits))
            })
            .clone()
    })
}

fn atan_inv(x: i64, w: u32) -> ExtFloat {
    series_inv(x, w, true)
}

fn atanh_inv(x: i64, w: u32) -> ExtFloat {
    series_inv(x, w, false)
}

fn series_inv(x: i64, w: u32, alternating: bool) -> ExtFloat {
    let mut pow = ExtFloat::from_i64(1, w).div_i64(x);
    let mut sum = pow.clone();
    let x2 = x * x;
    let mut n = 3;
    let mut sign = -1;
    loop {
        pow = pow.div_i64(x2);
        if pow.is_zero() {
            break;
        }
        let term = pow.div_i64(n);
        if alternating && sign < 0 {
            sum = &sum - &term;
        } else {
            sum = &sum + &term;
        }
        sign = -sign;
        n += 2;
    }
    sum
}

impl Add for &ExtFloat {
    type Output = ExtFloat;
    fn add(self, o: &ExtFloat) -> ExtFloat {
        debug_assert_eq!(self.bits, o.bits);
        ExtFloat {
            mant: &self.mant + &o.mant,
            bits: self.bits,
        }
    }
}

impl Sub for &ExtFloat {
    type Output = ExtFloat;
    fn sub(self, o: &ExtFloat) -> ExtFloat {
        debug_assert_eq!(self.bits, o.bits);
        ExtFloat {
            mant: &self.mant - &o.mant,
            bits: self.bits,
        }
    }
}

impl Mul for &ExtFloat {
    type Output = ExtFloat;
    fn mul(self, o: &ExtFloat) -> ExtFloat {
        debug_assert_eq!(self.bits, o.bits);
        ExtFloat {
            mant: shift(&(&self.mant * &o.mant), -(self.bits as i64)),
            bits: self.bits,
        }
    }
}

impl Neg for ExtFloat {
    type Output = ExtFloat;
    fn neg(self) -> ExtFloat {
        ExtFloat {
            mant: -self.mant,
            bits: self.bits,
        }
    }
}

/// Complex number with [`ExtFloat`] parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtComplex {
    pub re: ExtFloat,
    pub im: ExtFloat,
}

impl ExtComplex {
    pub fn new(re: ExtFloat, im: ExtFloat) -> Self {
        ExtComplex { re, im }
    }

    pub fn zero(bits: u32) -> Self {
        ExtComplex::new(ExtFloat::zero(bits), ExtFloat::zero(bits))
    }

    pub fn from_c64(z: Complex64, bits: u32) -> Self {
        ExtComplex::new(ExtFloat::from_f64(z.re, bits), ExtFloat::from_f64(z.im, bits))
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn add(&self, o: &ExtComplex) -> ExtComplex {
        ExtComplex::new(&self.re + &o.re, &self.im + &o.im)
    }

    pub fn sub(&self, o: &ExtComplex) -> ExtComplex {
        ExtComplex::new(&self.re - &o.re, &self.im - &o.im)
    }

    pub fn mul(&self, o: &ExtComplex) -> ExtComplex {
        ExtComplex::new(
            &(&self.re * &o.re) - &(&self.im * &o.im),
            &(&self.re * &o.im) + &(&self.im * &o.re),
        )
    }

    pub fn scale(&self, r: &ExtFloat) -> ExtComplex {
        ExtComplex::new(&self.re * r, &self.im * r)
    }

    pub fn div(&self, o: &ExtComplex) -> ExtComplex {
        let den = &(&o.re * &o.re) + &(&o.im * &o.im);
        let num = ExtComplex::new(
            &(&self.re * &o.re) + &(&self.im * &o.im),
            &(&self.im * &o.re) - &(&self.re * &o.im),
        );
        ExtComplex::new(num.re.div(&den), num.im.div(&den))
    }

    /// `exp(-s * ln_x)` for a real logarithm `ln_x`.
    pub fn exp_neg_mul(s: &ExtComplex, ln_x: &ExtFloat) -> ExtComplex {
        let modulus = (-(&s.re * ln_x)).exp();
        let (sin, cos) = (&s.im * ln_x).sin_cos();
        ExtComplex::new(&modulus * &cos, -(&modulus * &sin))
    }
}
