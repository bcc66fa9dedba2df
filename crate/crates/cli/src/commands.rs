//! Resolution of merged arguments into core configurations, and the runners.

use std::path::PathBuf;

use num_complex::Complex64;
use recur_core::kronecker::{find_tau_lattice, find_tau_scan, theoretical_density, KroneckerQuery};
use recur_core::scanner::{
    compare_report, density_curve, liminf_proxy, nu_t, theorem41_demo, CompareConfig, DemoOptions, ScanConfig,
    DEFAULT_CONFIDENCE,
};
use recur_core::target::RecurrenceTarget;
use recur_core::torus::{support_mass, support_witness};
use recur_core::zeta::{CompactRect, EvalConfig, Precision};

use crate::args::{
    Cli, Command, CommonArgs, CompareArgs, CurveArgs, DemoArgs, KroneckerArgs, RectArgs, ScanArgs, TargetArgs,
    WitnessArgs,
};
use crate::config::{merge, RunConfig};
use crate::record::{CurveReport, Payload, ResultRecord, WindowReport, WitnessSummary};
use crate::CliError;

/// Environment variable naming the directory of the default results file.
pub const OUTPUT_DIR_ENV: &str = "RECUR_OUTPUT_DIR";
pub const DEFAULT_RESULTS_FILE: &str = "recur-results.jsonl";
pub const DEFAULT_EXTENDED_BITS: u32 = 256;

/// What a finished command hands back to `run`.
#[derive(Debug)]
pub struct Outcome {
    pub record: ResultRecord,
    pub output: PathBuf,
    pub summary: String,
}

fn core(stage: &'static str) -> impl FnOnce(recur_core::Error) -> CliError {
    move |source| CliError::Core { stage, source }
}

fn parse_range(name: &str, s: &str) -> Result<(f64, f64), CliError> {
    let bad = || CliError::Usage(format!("--{name} expects `lo:hi`, got `{s}`"));
    let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    Ok((lo, hi))
}

pub fn parse_precision(s: &str) -> Result<Precision, CliError> {
    let bad = || CliError::Usage(format!("precision must be `double` or `extended[:BITS]`, got `{s}`"));
    match s.split_once(':') {
        None if s == "double" => Ok(Precision::Double),
        None if s == "extended" => Ok(Precision::Extended {
            mantissa_bits: DEFAULT_EXTENDED_BITS,
        }),
        Some(("extended", bits)) => Ok(Precision::Extended {
            mantissa_bits: bits.parse().map_err(|_| bad())?,
        }),
        _ => Err(bad()),
    }
}

struct RectDefaults {
    sigma: &'static str,
    t: &'static str,
    grid_sigma: usize,
    grid_t: usize,
}

const SCAN_RECT: RectDefaults = RectDefaults {
    sigma: "1.5:1.6",
    t: "0:0.2",
    grid_sigma: 4,
    grid_t: 5,
};
const WITNESS_RECT: RectDefaults = RectDefaults {
    sigma: "1.8:2",
    t: "0:0.5",
    grid_sigma: 4,
    grid_t: 6,
};
const DEMO_RECT: RectDefaults = RectDefaults {
    sigma: "2:2.2",
    t: "0:0.1",
    grid_sigma: 5,
    grid_t: 5,
};

fn resolve_rect(r: &RectArgs, d: &RectDefaults) -> Result<(RectArgs, CompactRect), CliError> {
    let full = RectArgs {
        sigma: Some(r.sigma.clone().unwrap_or_else(|| d.sigma.into())),
        t: Some(r.t.clone().unwrap_or_else(|| d.t.into())),
        grid_sigma: Some(r.grid_sigma.unwrap_or(d.grid_sigma)),
        grid_t: Some(r.grid_t.unwrap_or(d.grid_t)),
    };
    let rect = CompactRect::new(
        parse_range("sigma", full.sigma.as_deref().unwrap_or_default())?,
        parse_range("t", full.t.as_deref().unwrap_or_default())?,
        full.grid_sigma.unwrap_or_default(),
        full.grid_t.unwrap_or_default(),
    )
    .map_err(core("rectangle"))?;
    Ok((full, rect))
}

fn pair(j: Option<i64>, k: Option<i64>) -> Result<(i64, i64), CliError> {
    match (j, k) {
        (Some(j), Some(k)) => Ok((j, k)),
        (None, None) => Ok((1, 2)),
        _ => Err(CliError::Usage("give both --j and --k, or neither".into())),
    }
}

fn resolve_target(t: &TargetArgs) -> Result<(TargetArgs, RecurrenceTarget), CliError> {
    let irrational = t.irrational.unwrap_or(false);
    match t.d {
        Some(d) => {
            if t.j.is_some() || t.k.is_some() {
                return Err(CliError::Usage("--d cannot be combined with --j/--k".into()));
            }
            if t.a_d.is_some() && !irrational {
                return Err(CliError::Usage("--a-d needs --irrational".into()));
            }
            let target = if irrational {
                RecurrenceTarget::Irrational {
                    d,
                    declared_a_d: t.a_d.clone().unwrap_or_default(),
                }
            } else {
                RecurrenceTarget::Real { d }
            };
            let full = TargetArgs {
                d: Some(d),
                irrational: Some(irrational),
                a_d: irrational.then(|| t.a_d.clone().unwrap_or_default()),
                ..Default::default()
            };
            Ok((full, target))
        }
        None => {
            if irrational || t.a_d.is_some() {
                return Err(CliError::Usage("--irrational and --a-d need --d".into()));
            }
            let (j, k) = pair(t.j, t.k)?;
            let full = TargetArgs {
                j: Some(j),
                k: Some(k),
                ..Default::default()
            };
            Ok((full, RecurrenceTarget::Rational { j, k }))
        }
    }
}

/// Common settings with defaults filled in. `target_error` stays unset when
/// not given, since its default depends on the command.
fn resolve_common(c: &CommonArgs) -> Result<(CommonArgs, EvalConfig, f64), CliError> {
    let output = match &c.output {
        Some(p) => p.clone(),
        None => {
            let dir = std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("."));
            dir.join(DEFAULT_RESULTS_FILE)
        }
    };
    let precision = c.precision.clone().unwrap_or_else(|| "double".into());
    let mut eval = EvalConfig {
        precision: parse_precision(&precision)?,
        ..EvalConfig::default()
    };
    if let Some(t) = c.target_error {
        eval.target_abs_error = t;
    }
    let confidence = c.confidence.unwrap_or(DEFAULT_CONFIDENCE);
    let full = CommonArgs {
        output: Some(output),
        plot_dir: c.plot_dir.clone(),
        confidence: Some(confidence),
        precision: Some(precision),
        target_error: c.target_error,
    };
    Ok((full, eval, confidence))
}

#[allow(clippy::too_many_arguments)]
fn scan_config(
    target: &TargetArgs,
    rect: &RectArgs,
    eps: Option<f64>,
    t_end: f64,
    samples: Option<usize>,
    seed: Option<u64>,
    eval: EvalConfig,
    confidence: f64,
) -> Result<(TargetArgs, RectArgs, ScanConfig), CliError> {
    let (target_full, target) = resolve_target(target)?;
    let (rect_full, k_rect) = resolve_rect(rect, &SCAN_RECT)?;
    let cfg = ScanConfig {
        target,
        k_rect,
        eps: eps.unwrap_or(0.5),
        t_end,
        tau_samples: samples.unwrap_or(10_000),
        seed: seed.unwrap_or(0),
        eval,
        confidence,
    };
    Ok((target_full, rect_full, cfg))
}

fn density_line(e: &recur_core::scanner::DensityEstimate) -> String {
    format!(
        "T = {}: nu_T = {:.6} +/- {:.6} ({} of {} samples, {} failed)",
        e.t_end, e.value, e.ci_half_width, e.hits, e.samples, e.failures
    )
}

fn run_scan(a: &ScanArgs, eval: EvalConfig, confidence: f64) -> Result<(RunConfig, Payload, String), CliError> {
    let t_end = a.t_end.unwrap_or(1e4);
    let (target, rect, cfg) = scan_config(&a.target, &a.rect, a.eps, t_end, a.samples, a.seed, eval, confidence)?;
    let est = nu_t(&cfg).map_err(core("scan"))?;
    let resolved = ScanArgs {
        target,
        rect,
        eps: Some(cfg.eps),
        t_end: Some(cfg.t_end),
        samples: Some(cfg.tau_samples),
        seed: Some(cfg.seed),
    };
    let summary = density_line(&est);
    Ok((
        RunConfig {
            scan: Some(resolved),
            ..Default::default()
        },
        Payload::Density(est),
        summary,
    ))
}

fn run_curve(a: &CurveArgs, eval: EvalConfig, confidence: f64) -> Result<(RunConfig, Payload, String), CliError> {
    let schedule = a.schedule.clone().unwrap_or_else(|| vec![1e2, 1e3, 1e4]);
    let t_last = schedule.last().copied().unwrap_or(1.0);
    let (target, rect, cfg) = scan_config(&a.target, &a.rect, a.eps, t_last, a.samples, a.seed, eval, confidence)?;
    cfg.validate().map_err(core("curve"))?;
    let estimates = density_curve(&cfg, &schedule).map_err(core("curve"))?;
    let (burn_in, floor) = (a.burn_in.unwrap_or(0.0), a.floor.unwrap_or(0.0));
    let liminf = liminf_proxy(&estimates, burn_in, floor);
    let summary = match estimates.last() {
        Some(e) => format!(
            "{} points, last {}; running min {:.6}; floor {} {}",
            estimates.len(),
            density_line(e),
            liminf.running_min.last().copied().unwrap_or(f64::NAN),
            floor,
            if liminf.holds { "held" } else { "not held" }
        ),
        None => "empty schedule".into(),
    };
    let resolved = CurveArgs {
        target,
        rect,
        eps: Some(cfg.eps),
        schedule: Some(schedule),
        samples: Some(cfg.tau_samples),
        seed: Some(cfg.seed),
        burn_in: Some(burn_in),
        floor: Some(floor),
    };
    Ok((
        RunConfig {
            curve: Some(resolved),
            ..Default::default()
        },
        Payload::Curve(CurveReport { estimates, liminf }),
        summary,
    ))
}

fn run_kronecker(a: &KroneckerArgs) -> Result<(RunConfig, Payload, String), CliError> {
    let primes = a.primes.clone().unwrap_or_else(|| vec![2, 3, 5]);
    let delta = a.delta.unwrap_or(0.5);
    let query = KroneckerQuery::new(primes.clone(), delta).map_err(core("kronecker"))?;
    let density = theoretical_density(&query);
    let (report, resolved) = match a.search_bound {
        Some(bound) => {
            if a.t_end.is_some() || a.step.is_some() {
                return Err(CliError::Usage("--search-bound cannot be combined with --T/--step".into()));
            }
            let w = find_tau_lattice(&query, bound).map_err(core("lattice search"))?;
            let report = WindowReport {
                query,
                mode: "lattice".into(),
                t_end: None,
                step: None,
                search_bound: Some(bound),
                total_measure: w.width(),
                windows: vec![w],
                measure_fraction: None,
                theoretical_density: density,
            };
            let resolved = KroneckerArgs {
                primes: Some(primes),
                delta: Some(delta),
                search_bound: Some(bound),
                ..Default::default()
            };
            (report, resolved)
        }
        None => {
            let t_end = a.t_end.unwrap_or(1e4);
            let step = match a.step {
                Some(s) => s,
                None => query.max_step().map_err(core("kronecker"))?,
            };
            let windows = find_tau_scan(&query, t_end, step).map_err(core("kronecker scan"))?;
            let total: f64 = windows.iter().map(|w| w.width()).sum();
            let report = WindowReport {
                query,
                mode: "scan".into(),
                t_end: Some(t_end),
                step: Some(step),
                search_bound: None,
                windows,
                total_measure: total,
                measure_fraction: Some(total / t_end),
                theoretical_density: density,
            };
            let resolved = KroneckerArgs {
                primes: Some(primes),
                delta: Some(delta),
                t_end: Some(t_end),
                step: Some(step),
                search_bound: None,
            };
            (report, resolved)
        }
    };
    let summary = match report.mode.as_str() {
        "lattice" => {
            let w = &report.windows[0];
            format!("first window [{}, {}], width {:e}", w.tau_lo, w.tau_hi, w.width())
        }
        _ => format!(
            "{} windows, measure/T = {:.6} (independent-phase density {:.6})",
            report.windows.len(),
            report.measure_fraction.unwrap_or(0.0),
            report.theoretical_density
        ),
    };
    Ok((
        RunConfig {
            kronecker: Some(resolved),
            ..Default::default()
        },
        Payload::Windows(report),
        summary,
    ))
}

fn run_witness(a: &WitnessArgs, eval: EvalConfig) -> Result<(RunConfig, Payload, String), CliError> {
    let (j, k) = pair(a.j, a.k)?;
    let (rect, k_rect) = resolve_rect(&a.rect, &WITNESS_RECT)?;
    let eps = a.eps.unwrap_or(0.1);
    let seed = a.seed.unwrap_or(0);
    let trials = a.trials.unwrap_or(2000);
    let w = support_witness(&k_rect, eps, j, k, seed, &eval).map_err(core("witness"))?;
    let refined_sup = w.reverify(2).map_err(core("witness refinement"))?;
    let mass = if trials > 0 {
        Some(support_mass(&k_rect, eps, &w, j, k, trials, seed, &eval).map_err(core("support mass"))?)
    } else {
        None
    };
    let summary = format!(
        "N = {}, sup = {:e} (refined {:e}) < eps = {}{}",
        w.truncation,
        w.sup_norm,
        refined_sup,
        eps,
        mass.as_ref()
            .map(|m| format!(", mass {:.6} in [{:.6}, {:.6}]", m.value, m.interval.low, m.interval.high))
            .unwrap_or_default()
    );
    let payload = Payload::Witness(WitnessSummary {
        k_rect,
        eps,
        j,
        k,
        truncation: w.truncation,
        support_size: w.omega.len(),
        sup_norm: w.sup_norm,
        refined_sup,
        analytic_bound: w.analytic_bound,
        heuristic: w.heuristic,
        mass,
    });
    let resolved = WitnessArgs {
        j: Some(j),
        k: Some(k),
        rect,
        eps: Some(eps),
        seed: Some(seed),
        trials: Some(trials),
    };
    Ok((
        RunConfig {
            witness: Some(resolved),
            ..Default::default()
        },
        payload,
        summary,
    ))
}

fn run_compare(a: &CompareArgs, eval: EvalConfig) -> Result<(RunConfig, Payload, String), CliError> {
    let (j, k) = pair(a.j, a.k)?;
    let resolved = CompareArgs {
        sigma0: Some(a.sigma0.unwrap_or(2.0)),
        t0: Some(a.t0.unwrap_or(0.0)),
        j: Some(j),
        k: Some(k),
        t_end: Some(a.t_end.unwrap_or(1e5)),
        samples: Some(a.samples.unwrap_or(2000)),
        haar_trials: Some(a.haar_trials.unwrap_or(2000)),
        n_primes: Some(a.n_primes.unwrap_or(200)),
        seed: Some(a.seed.unwrap_or(7)),
    };
    let c = CompareConfig {
        s0: Complex64::new(resolved.sigma0.unwrap_or_default(), resolved.t0.unwrap_or_default()),
        j,
        k,
        t_end: resolved.t_end.unwrap_or_default(),
        tau_samples: resolved.samples.unwrap_or_default(),
        haar_trials: resolved.haar_trials.unwrap_or_default(),
        n_primes: resolved.n_primes.unwrap_or_default(),
        seed: resolved.seed.unwrap_or_default(),
        eval,
    };
    let report = compare_report(&c).map_err(core("compare"))?;
    let summary = format!(
        "KS = {:.6} (re {:.6}, im {:.6}), {} tau vs {} Haar",
        report.statistic, report.re_statistic, report.im_statistic, report.tau_samples, report.haar_trials
    );
    Ok((
        RunConfig {
            compare: Some(resolved),
            ..Default::default()
        },
        Payload::Ks(report),
        summary,
    ))
}

fn run_demo(a: &DemoArgs, common: &CommonArgs, eval: EvalConfig) -> Result<(RunConfig, Payload, String), CliError> {
    let (target, t) = resolve_target(&a.target)?;
    let (rect, k_rect) = resolve_rect(&a.rect, &DEMO_RECT)?;
    let eps = a.eps.unwrap_or(0.1);
    let defaults = DemoOptions::default();
    let explicit_eval = common.target_error.is_some() || eval.precision != Precision::Double;
    let opts = DemoOptions {
        search_bound: a.search_bound.unwrap_or(defaults.search_bound),
        margin: a.margin.unwrap_or(defaults.margin),
        eval: explicit_eval.then_some(eval),
    };
    let report = theorem41_demo(&k_rect, eps, &t, &opts).map_err(core("demo41"))?;
    let summary = format!(
        "N = {}, delta = {:.6}, tau = {:e}, sup = {:e} < {:e}",
        report.truncation, report.delta, report.tau, report.sup, report.threshold
    );
    let resolved = DemoArgs {
        target,
        rect,
        eps: Some(eps),
        search_bound: Some(opts.search_bound),
        margin: Some(opts.margin),
    };
    Ok((
        RunConfig {
            demo41: Some(resolved),
            ..Default::default()
        },
        Payload::Demo(report),
        summary,
    ))
}

/// Loads the config file, merges the flags over it, fills in defaults and
/// runs the subcommand. The record is not written here.
pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let file = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let common = merge(Some(&file.common), &cli.common)?;
    let (common, eval, confidence) = resolve_common(&common)?;
    let (mut config, payload, summary) = match &cli.command {
        Command::Scan(a) => run_scan(&merge(file.scan.as_ref(), a)?, eval, confidence)?,
        Command::Curve(a) => run_curve(&merge(file.curve.as_ref(), a)?, eval, confidence)?,
        Command::Kronecker(a) => run_kronecker(&merge(file.kronecker.as_ref(), a)?)?,
        Command::Witness(a) => run_witness(&merge(file.witness.as_ref(), a)?, eval)?,
        Command::Compare(a) => run_compare(&merge(file.compare.as_ref(), a)?, eval)?,
        Command::Demo41(a) => run_demo(&merge(file.demo41.as_ref(), a)?, &common, eval)?,
    };
    let output = common.output.clone().unwrap_or_default();
    config.common = common;
    Ok(Outcome {
        record: ResultRecord::new(cli.command.name(), config, payload),
        output,
        summary,
    })
}

/// Writes the record and, when asked, the plot data next to it.
pub fn persist(outcome: &Outcome) -> Result<Vec<PathBuf>, CliError> {
    crate::record::append_record(&outcome.output, &outcome.record)?;
    match &outcome.record.config.common.plot_dir {
        Some(dir) => crate::plot::export_plot_data(std::slice::from_ref(&outcome.record), dir, &outcome.record.command),
        None => Ok(Vec::new()),
    }
}
