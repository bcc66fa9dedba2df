//! Empirical densities of `tau` with `sup_K |zeta(s + i a tau) - zeta(s + i b tau)| < eps`,
//! their behaviour along increasing `T`, and the comparison of the vertical
//! shift ensemble with the Haar-random Euler products.

mod demo;

pub use demo::{theorem41_demo, DemoOptions, DemoReport, StageLog};

use std::collections::HashMap;
use std::sync::Mutex;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dd::DoubleDouble;
use crate::error::{Error, Result};
use crate::rng::item_rng;
use crate::stats::{ks_two_sample, wilson, Interval};
use crate::target::RecurrenceTarget;
use crate::torus::check_coprime;
use crate::zeta::{sup_diff_on_grid, zeta_shifted, CompactRect, EulerGrid, EvalConfig, Region};

/// Smallest sample count for a reported estimate.
pub const MIN_SAMPLES: usize = 100;
/// Largest tolerated fraction of failed evaluations.
pub const MAX_FAILURE_RATE: f64 = 0.01;
pub const DEFAULT_CONFIDENCE: f64 = 0.95;

/// Label attached to running-minimum reports.
pub const LIMINF_LABEL: &str =
    "finite-T surrogate: running minimum of density estimates; the liminf itself is not finitely decidable";

fn default_confidence() -> f64 {
    DEFAULT_CONFIDENCE
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub target: RecurrenceTarget,
    #[serde(rename = "K")]
    pub k_rect: CompactRect,
    pub eps: f64,
    #[serde(rename = "T")]
    pub t_end: f64,
    pub tau_samples: usize,
    pub seed: u64,
    #[serde(default)]
    pub eval: EvalConfig,
    #[serde(default = "default_confidence")]
    pub confidence: f64,
}

impl ScanConfig {
    /// Checks the invariants and returns the target's warnings.
    pub fn validate(&self) -> Result<Vec<String>> {
        let warnings = self.target.validate()?;
        self.k_rect.validate()?;
        self.eval.validate()?;
        if !(self.eps > 0.0) {
            return Err(Error::invalid(format!("eps must be positive, got {}", self.eps)));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::invalid(format!("T must be positive and finite, got {}", self.t_end)));
        }
        if self.tau_samples < MIN_SAMPLES {
            return Err(Error::invalid(format!(
                "tau_samples must be at least {MIN_SAMPLES}, got {}",
                self.tau_samples
            )));
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return Err(Error::invalid(format!("confidence must be in (0, 1), got {}", self.confidence)));
        }
        Ok(warnings)
    }

    /// The same experiment written with `tau' = j tau`: shifts `(tau', (k/j) tau')`
    /// over `[0, |j| T]`. Only rational targets can be rescaled.
    pub fn rescaled(&self) -> Result<ScanConfig> {
        match self.target {
            RecurrenceTarget::Rational { j, k } => {
                let (j, k) = if j < 0 { (-j, -k) } else { (j, k) };
                Ok(ScanConfig {
                    target: RecurrenceTarget::Real { d: k as f64 / j as f64 },
                    t_end: self.t_end * j as f64,
                    ..self.clone()
                })
            }
            _ => Err(Error::invalid("only rational targets can be rescaled")),
        }
    }

    fn shifts(&self) -> (f64, f64) {
        match self.target {
            // a fixed order makes (j, k) and (k, j) bitwise identical
            RecurrenceTarget::Rational { j, k } => (j.min(k) as f64, j.max(k) as f64),
            _ => self.target.multipliers(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityEstimate {
    #[serde(rename = "T")]
    pub t_end: f64,
    /// Samples evaluated successfully.
    pub samples: usize,
    pub hits: usize,
    pub value: f64,
    pub ci_half_width: f64,
    pub interval: Interval,
    pub confidence: f64,
    pub failures: usize,
    pub eps: f64,
    pub target: RecurrenceTarget,
    #[serde(rename = "K")]
    pub k_rect: CompactRect,
    /// Set for rectangles reaching into the critical strip, where no
    /// theoretical density accompanies the estimate.
    pub exploratory: bool,
    #[serde(default)]
    pub warnings: Vec<String>,
}

/// Grid sups at the sampled heights; `None` marks a failed evaluation.
#[derive(Clone, Debug, PartialEq)]
pub struct SupSamples {
    pub taus: Vec<f64>,
    pub sups: Vec<Option<f64>>,
}

impl SupSamples {
    pub fn failures(&self) -> usize {
        self.sups.iter().filter(|s| s.is_none()).count()
    }
}

/// `tau_i = (i + u_i) T / n` with `u_i` in `(0, 1]` from the item stream `(seed, i)`.
pub fn sample_tau(seed: u64, i: usize, n: usize, t_end: f64) -> f64 {
    let u = 1.0 - item_rng(seed, i as u64).random::<f64>();
    (i as f64 + u) * t_end / n as f64
}

/// Cache of grid sups keyed by the exact height, shared across a curve.
type SupCache = Mutex<HashMap<u64, Option<f64>>>;

fn sample_cached(cfg: &ScanConfig, cache: Option<&SupCache>) -> Result<SupSamples> {
    cfg.validate()?;
    let n = cfg.tau_samples;
    let (a, b) = cfg.shifts();
    let taus: Vec<f64> = (0..n).map(|i| sample_tau(cfg.seed, i, n, cfg.t_end)).collect();
    let sups = taus
        .par_iter()
        .map(|&tau| {
            if let Some(hit) = cache.and_then(|c| c.lock().expect("cache lock").get(&tau.to_bits()).copied()) {
                return hit;
            }
            let sup = if a == b {
                Some(0.0)
            } else {
                sup_diff_on_grid(&cfg.k_rect, DoubleDouble::product(a, tau), DoubleDouble::product(b, tau), &cfg.eval)
                    .ok()
            };
            if let Some(c) = cache {
                c.lock().expect("cache lock").insert(tau.to_bits(), sup);
            }
            sup
        })
        .collect();
    Ok(SupSamples { taus, sups })
}

/// Grid sups at the jittered equispaced heights of `cfg`.
pub fn sample_sups(cfg: &ScanConfig) -> Result<SupSamples> {
    sample_cached(cfg, None)
}

/// Counts hits `sup < eps` among `samples`; rejects the run when more than
/// 1% of the evaluations failed.
pub fn estimate_from(samples: &SupSamples, cfg: &ScanConfig, eps: f64) -> Result<DensityEstimate> {
    let warnings = cfg.validate()?;
    if !(eps > 0.0) {
        return Err(Error::invalid(format!("eps must be positive, got {eps}")));
    }
    let total = samples.sups.len();
    let failures = samples.failures();
    if failures as f64 > MAX_FAILURE_RATE * total as f64 || failures == total {
        return Err(Error::RunRejected { failures, total });
    }
    let ok = total - failures;
    let hits = samples.sups.iter().flatten().filter(|&&s| s < eps).count();
    let interval = wilson(hits, ok, cfg.confidence)?;
    Ok(DensityEstimate {
        t_end: cfg.t_end,
        samples: ok,
        hits,
        value: hits as f64 / ok as f64,
        ci_half_width: interval.half_width(),
        interval,
        confidence: cfg.confidence,
        failures,
        eps,
        target: cfg.target.clone(),
        k_rect: cfg.k_rect,
        exploratory: cfg.k_rect.region() != Region::Absolute,
        warnings,
    })
}

/// Empirical `nu_T`: the fraction of sampled `tau` in `(0, T]` whose grid sup
/// is below `eps`.
pub fn nu_t(cfg: &ScanConfig) -> Result<DensityEstimate> {
    estimate_from(&sample_sups(cfg)?, cfg, cfg.eps)
}

/// One estimate per `T` of a strictly increasing schedule.
pub fn density_curve(cfg: &ScanConfig, schedule: &[f64]) -> Result<Vec<DensityEstimate>> {
    if schedule.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::invalid("T schedule must be strictly increasing"));
    }
    let cache = SupCache::default();
    schedule
        .iter()
        .map(|&t| {
            let c = ScanConfig { t_end: t, ..cfg.clone() };
            estimate_from(&sample_cached(&c, Some(&cache))?, &c, c.eps)
        })
        .collect()
}

/// Running minimum of a density curve, the finite-T stand-in for the liminf.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LiminfProxy {
    pub label: String,
    pub schedule: Vec<f64>,
    pub running_min: Vec<f64>,
    /// Running minimum of the lower confidence limits.
    pub running_min_lower: Vec<f64>,
    pub burn_in: f64,
    pub floor: f64,
    /// Whether every lower limit past the burn-in stays above the floor.
    pub holds: bool,
}

pub fn liminf_proxy(curve: &[DensityEstimate], burn_in: f64, floor: f64) -> LiminfProxy {
    let mut running_min = Vec::with_capacity(curve.len());
    let mut running_min_lower = Vec::with_capacity(curve.len());
    let (mut m, mut ml) = (f64::INFINITY, f64::INFINITY);
    let mut holds = true;
    for e in curve {
        m = m.min(e.value);
        ml = ml.min(e.interval.low);
        running_min.push(m);
        running_min_lower.push(ml);
        if e.t_end >= burn_in && !(e.interval.low > floor) {
            holds = false;
        }
    }
    LiminfProxy {
        label: LIMINF_LABEL.to_string(),
        schedule: curve.iter().map(|e| e.t_end).collect(),
        running_min,
        running_min_lower,
        burn_in,
        floor,
        holds,
    }
}

/// Two-sample Kolmogorov–Smirnov comparison at a single point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KsReport {
    /// `max(re_statistic, im_statistic)`.
    pub statistic: f64,
    pub re_statistic: f64,
    pub im_statistic: f64,
    pub tau_samples: usize,
    pub haar_trials: usize,
    pub failures: usize,
}

/// Parameters of [`compare_distributions`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareConfig {
    pub s0: Complex64,
    pub j: i64,
    pub k: i64,
    #[serde(rename = "T")]
    pub t_end: f64,
    pub tau_samples: usize,
    pub haar_trials: usize,
    pub n_primes: usize,
    pub seed: u64,
    #[serde(default)]
    pub eval: EvalConfig,
}

/// KS statistic between `zeta(s0 + i j tau) - zeta(s0 + i k tau)` over the
/// sampled `tau` and `zeta_N(s0, omega^j) - zeta_N(s0, omega^k)` over Haar
/// samples, maximized over the real and imaginary marginals.
#[allow(clippy::too_many_arguments)]
pub fn compare_distributions(
    s0: Complex64,
    j: i64,
    k: i64,
    t_end: f64,
    tau_samples: usize,
    haar_trials: usize,
    n_primes: usize,
    seed: u64,
    cfg: &EvalConfig,
) -> Result<f64> {
    let c = CompareConfig {
        s0,
        j,
        k,
        t_end,
        tau_samples,
        haar_trials,
        n_primes,
        seed,
        eval: *cfg,
    };
    Ok(compare_report(&c)?.statistic)
}

pub fn compare_report(c: &CompareConfig) -> Result<KsReport> {
    c.eval.validate()?;
    if !(c.s0.re > 1.0) {
        return Err(Error::invalid(format!("need Re(s0) > 1, got {}", c.s0)));
    }
    if c.j == 0 || c.k == 0 {
        return Err(Error::invalid("j and k must be nonzero"));
    }
    check_coprime(c.j, c.k)?;
    if !(c.t_end > 0.0) || c.tau_samples == 0 || c.haar_trials == 0 || c.n_primes == 0 {
        return Err(Error::invalid("need T > 0 and positive sample, trial and prime counts"));
    }
    if c.j == c.k {
        return Ok(KsReport {
            statistic: 0.0,
            re_statistic: 0.0,
            im_statistic: 0.0,
            tau_samples: c.tau_samples,
            haar_trials: c.haar_trials,
            failures: 0,
        });
    }
    let (j, k) = (c.j as f64, c.k as f64);
    let shifted: Vec<Option<Complex64>> = (0..c.tau_samples)
        .into_par_iter()
        .map(|i| {
            let tau = sample_tau(c.seed, i, c.tau_samples, c.t_end);
            let a = zeta_shifted(c.s0, DoubleDouble::product(j, tau), &c.eval).ok()?;
            let b = zeta_shifted(c.s0, DoubleDouble::product(k, tau), &c.eval).ok()?;
            Some(a - b)
        })
        .collect();
    let failures = shifted.iter().filter(|v| v.is_none()).count();
    if failures as f64 > MAX_FAILURE_RATE * c.tau_samples as f64 || failures == c.tau_samples {
        return Err(Error::RunRejected {
            failures,
            total: c.tau_samples,
        });
    }
    let shifted: Vec<Complex64> = shifted.into_iter().flatten().collect();
    let haar = haar_ensemble(c)?;
    let (mut ar, mut ai): (Vec<f64>, Vec<f64>) = shifted.iter().map(|z| (z.re, z.im)).unzip();
    let (mut br, mut bi): (Vec<f64>, Vec<f64>) = haar.iter().map(|z| (z.re, z.im)).unzip();
    let re = ks_two_sample(&mut ar, &mut br)?;
    let im = ks_two_sample(&mut ai, &mut bi)?;
    Ok(KsReport {
        statistic: re.max(im),
        re_statistic: re,
        im_statistic: im,
        tau_samples: c.tau_samples,
        haar_trials: c.haar_trials,
        failures,
    })
}

/// Haar samples of the truncated random Euler product difference.
///
/// Angles are Latin-hypercube stratified: for each prime the trials occupy
/// the `haar_trials` equal arcs of the circle in a random order, with a
/// uniform offset inside each arc, so every single sample is still Haar.
pub fn haar_ensemble(c: &CompareConfig) -> Result<Vec<Complex64>> {
    let n = c.haar_trials;
    let stream = c.seed.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let columns: Vec<Vec<f64>> = (0..c.n_primes)
        .into_par_iter()
        .map(|p| {
            let mut rng = item_rng(stream, p as u64);
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut rng);
            order
                .into_iter()
                .map(|cell| std::f64::consts::TAU * (cell as f64 + rng.random::<f64>()) / n as f64)
                .collect()
        })
        .collect();
    let grid = EulerGrid::new(vec![c.s0], c.n_primes)?;
    (0..n)
        .into_par_iter()
        .map(|i| {
            let angles: Vec<f64> = columns.iter().map(|col| col[i]).collect();
            Ok(grid.diff(&angles, c.j, c.k)?[0])
        })
        .collect()
}
