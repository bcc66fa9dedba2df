//! The smoothed series `zeta_N(s) = sum n^{-s} exp(-(n/N)^sigma1)`, its
//! finite form `zeta_{N,M}`, and the mean gap between `zeta_N` and `zeta`
//! along vertical shifts.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dd::DoubleDouble;
use crate::error::{Error, Result};
use crate::target::RecurrenceTarget;
use crate::zeta::{dirichlet_kernel, grid_max, zeta_diff_on_grid, CompactRect, EvalConfig, Region};

const ZETA_2: f64 = std::f64::consts::PI * std::f64::consts::PI / 6.0;

/// Where the smoothed series is cut.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cut {
    /// Keep exactly `M` terms.
    Fixed(u64),
    /// Keep enough terms that the dropped tail is below the target error.
    Adaptive,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MollifierParams {
    pub n: u64,
    pub sigma1: f64,
    pub m: Cut,
}

impl MollifierParams {
    pub fn adaptive(n: u64, sigma1: f64) -> Self {
        MollifierParams {
            n,
            sigma1,
            m: Cut::Adaptive,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::invalid("mollifier N must be >= 1"));
        }
        if !(self.sigma1 > 0.5) || !self.sigma1.is_finite() {
            return Err(Error::invalid(format!("sigma1 must exceed 1/2, got {}", self.sigma1)));
        }
        Ok(())
    }

    /// `exp(-(n/N)^sigma1)`.
    pub fn weight(&self, n: u64) -> f64 {
        (-(n as f64 / self.n as f64).powf(self.sigma1)).exp()
    }

    /// Number of terms actually summed.
    pub fn cut(&self, cfg: &EvalConfig) -> Result<u64> {
        self.validate()?;
        match self.m {
            Cut::Fixed(m) => Ok(m),
            Cut::Adaptive => adaptive_cut(self, cfg),
        }
    }
}

/// `ln(n^2 zeta(2) w(n))`; decreasing once `(n/N)^sigma1 >= 2/sigma1`.
fn log_tail_weight(p: &MollifierParams, n: f64) -> f64 {
    -(n / p.n as f64).powf(p.sigma1) + 2.0 * n.ln() + ZETA_2.ln()
}

/// First `n` past the peak of `n^2 w(n)` with `w(n) < target / (n^2 zeta(2))`.
/// Every later term then satisfies the same inequality, so the dropped tail
/// is at most `target * sum_{m > n} 1/(m^2 zeta(2)) < target`.
fn adaptive_cut(p: &MollifierParams, cfg: &EvalConfig) -> Result<u64> {
    let ln_target = cfg.target_abs_error.ln();
    let peak = (p.n as f64 * (2.0 / p.sigma1).powf(1.0 / p.sigma1)).ceil().max(1.0);
    let ok = |n: f64| log_tail_weight(p, n) < ln_target;
    let limit = cfg.max_terms as f64;
    let mut lo = peak;
    if ok(lo) {
        return Ok(lo as u64);
    }
    let mut hi = 2.0 * lo;
    while !ok(hi) {
        if hi >= limit {
            return Err(Error::AccuracyExhausted {
                achieved: log_tail_weight(p, limit).exp(),
                target: cfg.target_abs_error,
                terms: cfg.max_terms,
            });
        }
        lo = hi;
        hi = (2.0 * hi).min(limit);
    }
    while hi - lo > 1.0 {
        let mid = ((lo + hi) / 2.0).floor();
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    if hi > limit {
        return Err(Error::AccuracyExhausted {
            achieved: log_tail_weight(p, limit).exp(),
            target: cfg.target_abs_error,
            terms: cfg.max_terms,
        });
    }
    Ok(hi as u64)
}

/// `zeta_{N,M}(s)` with `M` fixed or chosen adaptively.
pub fn zeta_mollified(s: Complex64, params: &MollifierParams, cfg: &EvalConfig) -> Result<Complex64> {
    cfg.validate()?;
    if !(s.re > 0.0) {
        return Err(Error::invalid(format!("need Re(s) > 0, got s = {s}")));
    }
    let m = params.cut(cfg)?;
    let w = |n: u64| params.weight(n);
    Ok(dirichlet_kernel(&CompactRect::point(s), &[(DoubleDouble::ZERO, 1.0)], Some(&w), m)[0])
}

/// `T^{-1} int_0^T max_K |zeta_N(s+ij tau) - zeta_N(s+ik tau) - zeta(s+ij tau) + zeta(s+ik tau)| d tau`
/// by the midpoint rule on `tau_samples` points.
pub fn mean_gap(
    t_end: f64,
    params: &MollifierParams,
    target: &RecurrenceTarget,
    k_rect: &CompactRect,
    tau_samples: usize,
    cfg: &EvalConfig,
) -> Result<f64> {
    cfg.validate()?;
    params.validate()?;
    k_rect.validate()?;
    let (j, k) = match *target {
        RecurrenceTarget::Rational { j, k } => (j, k),
        _ => return Err(Error::invalid("mean_gap needs a rational target (j, k)")),
    };
    target.validate()?;
    if k_rect.region() == Region::Mixed {
        return Err(Error::invalid(
            "mean_gap needs a rectangle in the critical strip or in Re(s) > 1",
        ));
    }
    if !(t_end > 0.0) || tau_samples == 0 {
        return Err(Error::invalid("mean_gap needs T > 0 and tau_samples >= 1"));
    }
    if j == k {
        return Ok(0.0);
    }
    // fixed order makes the result exactly symmetric in (j, k)
    let (a, b) = (j.min(k) as f64, j.max(k) as f64);
    let m = params.cut(cfg)?;
    let w = |n: u64| params.weight(n);
    let gaps = (0..tau_samples)
        .into_par_iter()
        .map(|i| {
            let tau = (i as f64 + 0.5) * t_end / tau_samples as f64;
            let (sa, sb) = (DoubleDouble::product(a, tau), DoubleDouble::product(b, tau));
            let smooth = dirichlet_kernel(k_rect, &[(sa, 1.0), (sb, -1.0)], Some(&w), m);
            let exact = zeta_diff_on_grid(k_rect, sa, sb, cfg).map_err(|e| Error::SampleFailed {
                tau,
                source: Box::new(e),
            })?;
            let gap: Vec<Complex64> = smooth.iter().zip(&exact).map(|(x, y)| x - y).collect();
            Ok(grid_max(&gap).1)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(gaps.iter().sum::<f64>() / tau_samples as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zeta::zeta;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn small_example_against_direct_sum() {
        // sum n^-2 e^-n, tail after 60 terms below e^-60
        let p = MollifierParams::adaptive(1, 1.0);
        let got = zeta_mollified(c(2.0, 0.0), &p, &EvalConfig::default()).unwrap();
        let oracle: f64 = (1..=60).rev().map(|n| (-(n as f64)).exp() / (n * n) as f64).sum();
        assert!((got.re - oracle).abs() < 1e-12);
        assert!((got.re - 0.408754287348896).abs() < 1e-12);
    }

    #[test]
    fn empty_sum() {
        let p = MollifierParams { n: 5, sigma1: 1.0, m: Cut::Fixed(0) };
        assert_eq!(zeta_mollified(c(2.0, 1.0), &p, &EvalConfig::default()).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn weights_and_prefix() {
        let p = MollifierParams { n: 10, sigma1: 1.5, m: Cut::Fixed(30) };
        for n in 1..200 {
            let w = p.weight(n);
            assert!((0.0..=1.0).contains(&w));
        }
        let cfg = EvalConfig::default();
        let s = c(1.2, 3.0);
        let short = zeta_mollified(s, &p, &cfg).unwrap();
        let long = zeta_mollified(s, &MollifierParams { m: Cut::Fixed(31), ..p }, &cfg).unwrap();
        let term = (-s * 31f64.ln()).exp() * p.weight(31);
        assert!((long - short - term).norm() < 1e-15);
    }

    #[test]
    fn converges_to_zeta_monotonically() {
        let cfg = EvalConfig::default();
        let z = zeta(c(2.0, 0.0), &cfg).unwrap();
        let mut prev = f64::INFINITY;
        for n in [10, 100, 1000] {
            let v = zeta_mollified(c(2.0, 0.0), &MollifierParams::adaptive(n, 2.0), &cfg).unwrap();
            let gap = (v - z).norm();
            assert!(gap < prev);
            prev = gap;
        }
    }

    #[test]
    fn adaptive_cut_respects_limits() {
        let cfg = EvalConfig { max_terms: 100, ..EvalConfig::default() };
        let p = MollifierParams::adaptive(1000, 2.0);
        assert!(matches!(p.cut(&cfg), Err(Error::AccuracyExhausted { .. })));
        assert!(MollifierParams::adaptive(10, 0.5).validate().is_err());
    }

    #[test]
    fn mean_gap_trivial_and_symmetric() {
        let k = CompactRect::new((1.5, 1.6), (0.0, 0.1), 2, 2).unwrap();
        let p = MollifierParams::adaptive(20, 2.0);
        let cfg = EvalConfig::default();
        let same = RecurrenceTarget::Rational { j: 1, k: 1 };
        assert_eq!(mean_gap(50.0, &p, &same, &k, 10, &cfg).unwrap(), 0.0);
        let a = mean_gap(50.0, &p, &RecurrenceTarget::Rational { j: 1, k: 2 }, &k, 10, &cfg).unwrap();
        let b = mean_gap(50.0, &p, &RecurrenceTarget::Rational { j: 2, k: 1 }, &k, 10, &cfg).unwrap();
        assert!(a > 0.0);
        assert_eq!(a, b);
        let mixed = CompactRect::new((0.8, 1.2), (0.0, 0.1), 2, 2).unwrap();
        assert!(mean_gap(50.0, &p, &same, &mixed, 10, &cfg).is_err());
    }

    #[test]
    fn mean_gap_vanishes_for_large_n() {
        let k = CompactRect::new((1.5, 1.6), (0.0, 0.1), 2, 2).unwrap();
        let cfg = EvalConfig::default();
        let t = RecurrenceTarget::Rational { j: 1, k: 2 };
        let big = mean_gap(100.0, &MollifierParams::adaptive(100_000, 2.0), &t, &k, 5, &cfg).unwrap();
        assert!(big < 0.01, "{big}");
    }
}
