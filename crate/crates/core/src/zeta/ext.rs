//! Point evaluation in [`ExtFloat`] arithmetic, following the same plan as
//! the double-precision path.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::One;

use super::bernoulli::bernoulli;
use super::{Plan, Route};
use crate::dd::DoubleDouble;
use crate::extended::{ExtComplex, ExtFloat};

pub(crate) fn zeta_extended(sigma: f64, t: DoubleDouble, plan: &Plan, bits: u32) -> Complex64 {
    let re = ExtFloat::from_f64(sigma, bits);
    let im = &ExtFloat::from_f64(t.hi, bits) + &ExtFloat::from_f64(t.lo, bits);
    let s = ExtComplex::new(re, im);
    let mut acc = ExtComplex::zero(bits);
    for n in 1..=plan.sum_len() {
        let ln = ExtFloat::from_i64(n as i64, bits).ln();
        acc = acc.add(&ExtComplex::exp_neg_mul(&s, &ln));
    }
    if plan.route == Route::EulerMaclaurin {
        acc = acc.add(&em_tail(&s, plan.cut, plan.order, bits));
    }
    acc.to_c64()
}

fn em_tail(s: &ExtComplex, m: u64, order: usize, bits: u32) -> ExtComplex {
    let one = ExtFloat::from_i64(1, bits);
    let mf = ExtFloat::from_i64(m as i64, bits);
    let m_neg_s = ExtComplex::exp_neg_mul(s, &mf.ln());
    let s_minus_1 = ExtComplex::new(&s.re - &one, s.im.clone());
    let mut out = m_neg_s
        .scale(&mf)
        .div(&s_minus_1)
        .add(&m_neg_s.scale(&one.ldexp(-1)));
    let m2 = &mf * &mf;
    let mut c = s.mul(&m_neg_s);
    c = ExtComplex::new(c.re.div(&mf), c.im.div(&mf));
    let mut fact = BigInt::one();
    for k in 1..=order {
        fact *= BigInt::from(2 * k - 1) * BigInt::from(2 * k);
        let b = bernoulli(2 * k) / BigRational::from_integer(fact.clone());
        out = out.add(&c.scale(&ExtFloat::from_ratio(&b, bits)));
        let shift = |d: i64| ExtComplex::new(&s.re + &ExtFloat::from_i64(d, bits), s.im.clone());
        c = c.mul(&shift(2 * k as i64 - 1)).mul(&shift(2 * k as i64));
        c = ExtComplex::new(c.re.div(&m2), c.im.div(&m2));
    }
    out
}
