//! The truncation, phase and approximation steps of the existence proof run
//! as a pipeline, each stage logged with the bound it establishes.

use serde::{Deserialize, Serialize};

use crate::dd::DoubleDouble;
use crate::error::{Error, Result};
use crate::kronecker::{find_tau_lattice, rational_condition_transfer, ExtraTarget, KroneckerQuery, TauWindow};
use crate::primes::shared_table;
use crate::target::RecurrenceTarget;
use crate::zeta::{choose_truncation, ln_dd, log_tail_bound, sup_diff_on_grid, zeta, CompactRect, EvalConfig};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DemoOptions {
    /// Largest `tau` the lattice search may return.
    pub search_bound: f64,
    /// Relative slack on the final `2 eps` check.
    pub margin: f64,
    /// Evaluation settings for the final check; by default the target error
    /// is `eps * 1e-4`, which keeps the direct series short at large `tau`.
    #[serde(default)]
    pub eval: Option<EvalConfig>,
}

impl Default for DemoOptions {
    fn default() -> Self {
        DemoOptions {
            search_bound: 4e12,
            margin: 0.05,
            eval: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageLog {
    pub stage: String,
    pub value: f64,
    pub bound: f64,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DemoReport {
    #[serde(rename = "K")]
    pub k_rect: CompactRect,
    pub eps: f64,
    pub target: RecurrenceTarget,
    /// Number of primes kept in the product.
    pub truncation: usize,
    pub tail_bound: f64,
    /// Largest phase error allowed per prime.
    pub phase_bound: f64,
    pub delta: f64,
    pub query: KroneckerQuery,
    pub window: TauWindow,
    pub tau: f64,
    /// `2 * tail + sum_n L_n (|phase_a| + |phase_b|)` at `tau`.
    pub log_bound: f64,
    /// `zeta(sigma_min) * (exp(log_bound) - 1)`.
    pub staged_bound: f64,
    pub sup: f64,
    pub threshold: f64,
    pub stages: Vec<StageLog>,
}

fn stage_failed(stage: &'static str, e: Error) -> Error {
    match e {
        Error::StageFailed { .. } => e,
        other => Error::StageFailed {
            stage,
            detail: other.to_string(),
        },
    }
}

/// `|d/dphi log(1 - e^{i phi} p^{-s})^{-1}| <= p^{-sigma} / (1 - p^{-sigma})`.
fn phase_lipschitz(p: u64, sigma: f64) -> f64 {
    let x = (p as f64).powf(-sigma);
    x / (1.0 - x)
}

/// Runs truncation, phase budget, transfer, lattice search and the final
/// check `sup_K |zeta(s + i a tau) - zeta(s + i b tau)| < 2 eps (1 + margin)`.
pub fn theorem41_demo(
    k_rect: &CompactRect,
    eps: f64,
    target: &RecurrenceTarget,
    opts: &DemoOptions,
) -> Result<DemoReport> {
    k_rect.validate()?;
    if !(k_rect.sigma_min > 1.0) {
        return Err(Error::invalid(format!("demo needs sigma_min > 1, got {}", k_rect.sigma_min)));
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::invalid(format!("eps must be positive, got {eps}")));
    }
    target.validate()?;
    let sigma = k_rect.sigma_min;
    let mut stages = Vec::new();

    let n = choose_truncation(k_rect, eps).map_err(|e| stage_failed("truncation", e))?;
    let tail = log_tail_bound(sigma, n).map_err(|e| stage_failed("truncation", e))?;
    stages.push(StageLog {
        stage: "truncation".into(),
        value: tail,
        bound: eps / 2.0,
        passed: tail < eps / 2.0,
        detail: format!("N = {n} primes; log tail bound {tail:e}"),
    });

    let primes = shared_table(n).primes()[..n].to_vec();
    let lipschitz: Vec<f64> = primes.iter().map(|&p| phase_lipschitz(p, sigma)).collect();
    let total: f64 = lipschitz.iter().sum();
    let phase_bound = (eps / total).min(std::f64::consts::PI);
    let delta = (2.0 * (phase_bound / 2.0).sin()).min(2.0);
    stages.push(StageLog {
        stage: "delta".into(),
        value: phase_bound * total,
        bound: eps,
        passed: true,
        detail: format!("phase bound {phase_bound:e} from sum of Lipschitz constants {total:e}; delta = {delta:e}"),
    });

    let base = KroneckerQuery::new(primes.clone(), delta).map_err(|e| stage_failed("transfer", e))?;
    let (a, b) = target.multipliers();
    let query = match *target {
        RecurrenceTarget::Rational { j, k } => {
            rational_condition_transfer(j, k, &base).map_err(|e| stage_failed("transfer", e))?
        }
        RecurrenceTarget::Irrational { d, .. } | RecurrenceTarget::Real { d } => KroneckerQuery {
            extra_targets: primes
                .iter()
                .map(|&p| ExtraTarget {
                    log_value: d * (p as f64).ln(),
                    delta,
                    independent: false,
                })
                .collect(),
            ..base
        },
    };
    stages.push(StageLog {
        stage: "transfer".into(),
        value: query.delta,
        bound: delta,
        passed: query.delta <= delta,
        detail: format!(
            "{} prime conditions at delta {:e}, {} extra conditions",
            query.primes.len(),
            query.delta,
            query.extra_targets.len()
        ),
    });

    let window = find_tau_lattice(&query, opts.search_bound).map_err(|e| stage_failed("kronecker", e))?;
    let tau = window.midpoint();
    stages.push(StageLog {
        stage: "kronecker".into(),
        value: tau,
        bound: opts.search_bound,
        passed: window.certified,
        detail: format!("window [{}, {}]", window.tau_lo, window.tau_hi),
    });

    // achieved phases at tau, each at most the phase bound
    let wrap = |m: f64, p: u64| (DoubleDouble::product(m, tau) * ln_dd(p)).rem_two_pi().to_f64().abs();
    let phase_sum: f64 = primes
        .iter()
        .zip(&lipschitz)
        .map(|(&p, l)| l * (wrap(a, p) + wrap(b, p)))
        .sum();
    let log_bound = 2.0 * tail + phase_sum;
    let eval = opts.eval.unwrap_or_else(|| EvalConfig::default().with_target(eps * 1e-4));
    let zeta_max = zeta(num_complex::Complex64::new(sigma, 0.0), &eval)
        .map_err(|e| stage_failed("verification", e))?
        .re;
    let staged_bound = zeta_max * log_bound.exp_m1();
    stages.push(StageLog {
        stage: "phases".into(),
        value: phase_sum,
        bound: 2.0 * eps,
        passed: phase_sum <= 2.0 * eps,
        detail: format!("log-difference bound {log_bound:e}; staged bound {staged_bound:e}"),
    });

    let sup = if a == b {
        0.0
    } else {
        sup_diff_on_grid(k_rect, DoubleDouble::product(a, tau), DoubleDouble::product(b, tau), &eval)
            .map_err(|e| stage_failed("verification", e))?
    };
    let threshold = 2.0 * eps * (1.0 + opts.margin);
    // both evaluations carry the configured error
    let slack = 2.0 * eval.target_abs_error;
    let passed = sup < threshold && sup <= staged_bound + slack;
    stages.push(StageLog {
        stage: "verification".into(),
        value: sup,
        bound: threshold.min(staged_bound + slack),
        passed,
        detail: format!("grid sup {sup:e} at tau = {tau}; threshold {threshold:e}; staged bound {staged_bound:e}"),
    });
    if !passed {
        return Err(Error::StageFailed {
            stage: "verification",
            detail: format!("grid sup {sup:e} vs threshold {threshold:e} and staged bound {staged_bound:e}"),
        });
    }

    Ok(DemoReport {
        k_rect: *k_rect,
        eps,
        target: target.clone(),
        truncation: n,
        tail_bound: tail,
        phase_bound,
        delta,
        query,
        window,
        tau,
        log_bound,
        staged_bound,
        sup,
        threshold,
        stages,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn huge_eps_is_trivial() {
        let k = CompactRect::new((2.0, 2.2), (0.0, 0.1), 3, 3).unwrap();
        let t = RecurrenceTarget::Rational { j: 1, k: 2 };
        let r = theorem41_demo(&k, 100.0, &t, &DemoOptions::default()).unwrap();
        assert_eq!(r.truncation, 1);
        assert_eq!(r.delta, 2.0f64.min(r.delta));
        assert!(r.sup < r.threshold);
    }

    #[test]
    fn rejects_strip() {
        let k = CompactRect::new((0.6, 0.8), (0.0, 0.1), 3, 3).unwrap();
        let t = RecurrenceTarget::Rational { j: 1, k: 2 };
        assert!(theorem41_demo(&k, 0.1, &t, &DemoOptions::default()).is_err());
    }
}
