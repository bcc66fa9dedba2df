//! Bernoulli numbers, exact and as doubles.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Largest Euler–Maclaurin order supported; the remainder needs `B_{2p+2}`.
pub const MAX_ORDER: usize = 60;

const TABLE_LEN: usize = 2 * MAX_ORDER + 3;

fn exact_table() -> &'static [BigRational] {
    static TABLE: OnceLock<Vec<BigRational>> = OnceLock::new();
    TABLE.get_or_init(|| {
        // sum_{j=0}^{m} C(m+1, j) B_j = 0
        let mut b: Vec<BigRational> = Vec::with_capacity(TABLE_LEN);
        b.push(BigRational::one());
        for m in 1..TABLE_LEN {
            if m >= 3 && m % 2 == 1 {
                b.push(BigRational::zero());
                continue;
            }
            let mut binom = BigInt::one();
            let mut acc = BigRational::zero();
            for (j, bj) in b.iter().enumerate() {
                if !bj.is_zero() {
                    acc += BigRational::from_integer(binom.clone()) * bj;
                }
                binom = binom * BigInt::from(m + 1 - j) / BigInt::from(j + 1);
            }
            b.push(-acc / BigRational::from_integer(BigInt::from(m + 1)));
        }
        b
    })
}

/// `B_n` as an exact rational, for `n <= 2 * MAX_ORDER + 2`.
pub fn bernoulli(n: usize) -> BigRational {
    exact_table()[n].clone()
}

fn ratio_to_f64(r: &BigRational) -> f64 {
    // numerator and denominator can exceed the double range separately
    let shift = r.numer().bits() as i64 - r.denom().bits() as i64;
    let scaled = if shift >= 0 {
        BigRational::new(r.numer().clone(), r.denom() << (shift as usize))
    } else {
        BigRational::new(r.numer() << ((-shift) as usize), r.denom().clone())
    };
    let f = scaled.numer().to_f64().unwrap_or(f64::NAN) / scaled.denom().to_f64().unwrap_or(f64::NAN);
    if f.is_finite() {
        f * 2f64.powi(shift as i32)
    } else {
        // both parts beyond the double range: fall back to 64 leading bits
        let nb = scaled.numer().bits().saturating_sub(64) as usize;
        let db = scaled.denom().bits().saturating_sub(64) as usize;
        let n = (scaled.numer() >> nb).to_f64().unwrap_or(0.0);
        let d = (scaled.denom() >> db).to_f64().unwrap_or(1.0);
        n / d * 2f64.powi(shift as i32 + nb as i32 - db as i32)
    }
}

/// `B_{2k} / (2k)!` for `k = 0..=MAX_ORDER + 1`.
pub fn scaled_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut fact = BigInt::one();
        let mut out = Vec::with_capacity(MAX_ORDER + 2);
        for k in 0..=MAX_ORDER + 1 {
            if k > 0 {
                fact *= BigInt::from(2 * k - 1) * BigInt::from(2 * k);
            }
            let r = bernoulli(2 * k) / BigRational::from_integer(fact.clone());
            out.push(ratio_to_f64(&r));
        }
        out
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn known_values() {
        assert_eq!(bernoulli(0), q(1, 1));
        assert_eq!(bernoulli(1), q(-1, 2));
        assert_eq!(bernoulli(2), q(1, 6));
        assert_eq!(bernoulli(4), q(-1, 30));
        assert_eq!(bernoulli(12), q(-691, 2730));
        assert_eq!(bernoulli(20), q(-174611, 330));
        assert!(bernoulli(15).is_zero());
    }

    #[test]
    fn scaled_values_match_even_zeta() {
        // zeta(2k) = (-1)^{k+1} (2 pi)^{2k} B_{2k} / (2 (2k)!)
        let t = scaled_table();
        let pi = std::f64::consts::PI;
        let closed = [pi.powi(2) / 6.0, pi.powi(4) / 90.0, pi.powi(6) / 945.0];
        for k in 1..=MAX_ORDER + 1 {
            let zeta_2k: f64 = if k <= 3 {
                closed[k - 1]
            } else {
                (1..200).map(|n| (n as f64).powi(-2 * k as i32)).sum()
            };
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            let from_b = sign * t[k] * std::f64::consts::TAU.powi(2 * k as i32) / 2.0;
            assert!((from_b - zeta_2k).abs() < 1e-13 * zeta_2k, "k = {k}");
        }
    }
}
