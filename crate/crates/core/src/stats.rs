//! Binomial confidence intervals and the two-sample Kolmogorov–Smirnov
//! statistic.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Two-sided normal quantile for a confidence level in `(0, 1)`.
pub fn z_value(confidence: f64) -> Result<f64> {
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::invalid(format!(
            "confidence must be in (0, 1), got {confidence}"
        )));
    }
    let n = Normal::new(0.0, 1.0).expect("standard normal");
    Ok(n.inverse_cdf(0.5 + confidence / 2.0))
}

/// Wilson score interval for `hits` successes out of `n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub low: f64,
    pub high: f64,
}

impl Interval {
    pub fn half_width(&self) -> f64 {
        (self.high - self.low) / 2.0
    }

    pub fn overlaps(&self, other: &Interval) -> bool {
        self.low <= other.high && other.low <= self.high
    }
}

pub fn wilson(hits: usize, n: usize, confidence: f64) -> Result<Interval> {
    if n == 0 {
        return Err(Error::invalid("wilson interval needs n >= 1"));
    }
    if hits > n {
        return Err(Error::invalid(format!("hits {hits} exceed trials {n}")));
    }
    let z = z_value(confidence)?;
    let nf = n as f64;
    let p = hits as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let half = z * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    Ok(Interval {
        low: (center - half).max(0.0),
        high: (center + half).min(1.0),
    })
}

/// `sup_x |F_a(x) - F_b(x)|` for the empirical distribution functions of two
/// samples. Both slices are sorted in place; NaNs are rejected.
pub fn ks_two_sample(a: &mut [f64], b: &mut [f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::invalid("KS statistic needs two nonempty samples"));
    }
    if a.iter().chain(b.iter()).any(|x| x.is_nan()) {
        return Err(Error::invalid("KS statistic got NaN values"));
    }
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normal_quantile() {
        assert!((z_value(0.95).unwrap() - 1.959963984540054).abs() < 1e-9);
        assert!(z_value(1.0).is_err());
    }

    #[test]
    fn wilson_edges() {
        let i = wilson(0, 100, 0.95).unwrap();
        assert_eq!(i.low, 0.0);
        assert!(i.high > 0.0 && i.high < 0.05);
        let i = wilson(100, 100, 0.95).unwrap();
        assert_eq!(i.high, 1.0);
        assert!(i.low > 0.95);
        // textbook value: 50/100 at 95% is 0.5 +- 0.0962
        let i = wilson(50, 100, 0.95).unwrap();
        assert!((i.half_width() - 0.0962).abs() < 5e-4);
        assert!(wilson(3, 2, 0.95).is_err());
    }

    #[test]
    fn ks_known_cases() {
        let mut a = vec![1.0, 2.0, 3.0];
        let mut b = vec![1.0, 2.0, 3.0];
        assert_eq!(ks_two_sample(&mut a, &mut b).unwrap(), 0.0);
        let mut a = vec![0.0, 0.1];
        let mut b = vec![1.0, 1.1];
        assert_eq!(ks_two_sample(&mut a, &mut b).unwrap(), 1.0);
        let mut a = vec![1.0, 2.0, 3.0, 4.0];
        let mut b = vec![2.5];
        assert_eq!(ks_two_sample(&mut a, &mut b).unwrap(), 0.5);
        assert!(ks_two_sample(&mut [], &mut b).is_err());
    }

    #[test]
    fn ks_matches_brute_force() {
        let a: Vec<f64> = (0..37).map(|i| ((i * 7919) % 101) as f64 / 10.0).collect();
        let b: Vec<f64> = (0..23).map(|i| ((i * 104729) % 89) as f64 / 9.0).collect();
        let brute = a
            .iter()
            .chain(&b)
            .map(|&x| {
                let fa = a.iter().filter(|&&v| v <= x).count() as f64 / a.len() as f64;
                let fb = b.iter().filter(|&&v| v <= x).count() as f64 / b.len() as f64;
                (fa - fb).abs()
            })
            .fold(0.0, f64::max);
        let got = ks_two_sample(&mut a.clone(), &mut b.clone()).unwrap();
        assert!((got - brute).abs() < 1e-15);
    }
}
