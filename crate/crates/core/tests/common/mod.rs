#![allow(dead_code, clippy::needless_range_loop)]

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, ToPrimitive, Zero};
use recur_core::dd::DoubleDouble;

/// `zeta(s)` from the alternating series `eta(s) = sum (-1)^{n-1} n^{-s}`,
/// accelerated with Borwein's weights `d_k` (computed exactly as integers).
/// Valid for `Re(s) > 0`, `2^{1-s} != 1`.
pub fn zeta_eta_oracle(s: Complex64) -> Complex64 {
    let t = s.im.abs();
    let n = ((std::f64::consts::PI * t + 50.0 + (1.0 + 2.0 * t).ln()) / (3.0 + 8f64.sqrt()).ln())
        .ceil() as usize;
    // d_k = n sum_{i<=k} (n+i-1)! 4^i / ((n-i)! (2i)!)
    let mut term = BigInt::one(); // i = 0 term without the factor n: (n-1)!/n! = 1/n
    let mut partial = vec![BigInt::zero(); n + 1];
    let mut acc = BigInt::zero();
    for i in 0..=n {
        if i > 0 {
            // ratio (n+i-1)(n-i+1) * 4 / ((2i-1)(2i))
            term = term * BigInt::from(n + i - 1) * BigInt::from(n - i + 1) * 4;
            term /= BigInt::from((2 * i - 1) * 2 * i);
        }
        acc += &term;
        partial[i] = acc.clone();
    }
    let dn = &partial[n];
    let scale = BigInt::one() << 80usize;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut comp = Complex64::new(0.0, 0.0);
    for k in 0..n {
        let w = ((dn - &partial[k]) * &scale / dn).to_f64().unwrap() / 2f64.powi(80);
        let m = (k + 1) as f64;
        let ln = DoubleDouble::from_f64(m).ln();
        let phase = (DoubleDouble::from_f64(s.im) * ln).rem_two_pi().to_f64();
        let v = Complex64::from_polar((-s.re * ln.to_f64()).exp() * w, -phase);
        let v = if k % 2 == 0 { v } else { -v };
        // Kahan summation
        let y = v - comp;
        let tmp = sum + y;
        comp = (tmp - sum) - y;
        sum = tmp;
    }
    let two = Complex64::new(2.0, 0.0);
    sum / (Complex64::new(1.0, 0.0) - two.powc(Complex64::new(1.0, 0.0) - s))
}
