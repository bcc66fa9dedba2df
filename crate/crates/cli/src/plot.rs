//! Comma-separated plot data, one file per payload kind.

use std::path::{Path, PathBuf};

use crate::record::{Payload, ResultRecord};
use crate::CliError;

pub const DENSITY_HEADER: &[&str] = &["T", "nu_T", "ci_half_width", "ci_low", "ci_high", "hits", "samples", "failures", "eps"];
pub const CURVE_HEADER: &[&str] = &["T", "nu_T", "ci_half_width", "ci_low", "ci_high", "running_min", "running_min_lower"];
pub const WINDOW_HEADER: &[&str] = &["tau_lo", "tau_hi", "width", "certified"];
pub const WITNESS_HEADER: &[&str] = &[
    "eps",
    "truncation",
    "sup_norm",
    "refined_sup",
    "analytic_bound",
    "mass",
    "mass_low",
    "mass_high",
];
pub const KS_HEADER: &[&str] = &["statistic", "re_statistic", "im_statistic", "tau_samples", "haar_trials", "failures"];
pub const DEMO_HEADER: &[&str] = &["stage", "value", "bound", "passed"];

fn kind(p: &Payload) -> &'static str {
    match p {
        Payload::Density(_) => "density",
        Payload::Curve(_) => "curve",
        Payload::Windows(_) => "windows",
        Payload::Witness(_) => "witness",
        Payload::Ks(_) => "ks",
        Payload::Demo(_) => "demo",
    }
}

fn header(kind: &str) -> &'static [&'static str] {
    match kind {
        "density" => DENSITY_HEADER,
        "curve" => CURVE_HEADER,
        "windows" => WINDOW_HEADER,
        "witness" => WITNESS_HEADER,
        "ks" => KS_HEADER,
        _ => DEMO_HEADER,
    }
}

// `Display` for f64 prints the shortest string that parses back to the same value.
fn num(x: f64) -> String {
    x.to_string()
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn rows(p: &Payload) -> Vec<Vec<String>> {
    match p {
        Payload::Density(e) => vec![vec![
            num(e.t_end),
            num(e.value),
            num(e.ci_half_width),
            num(e.interval.low),
            num(e.interval.high),
            e.hits.to_string(),
            e.samples.to_string(),
            e.failures.to_string(),
            num(e.eps),
        ]],
        Payload::Curve(c) => c
            .estimates
            .iter()
            .enumerate()
            .map(|(i, e)| {
                vec![
                    num(e.t_end),
                    num(e.value),
                    num(e.ci_half_width),
                    num(e.interval.low),
                    num(e.interval.high),
                    opt(c.liminf.running_min.get(i).copied()),
                    opt(c.liminf.running_min_lower.get(i).copied()),
                ]
            })
            .collect(),
        Payload::Windows(w) => w
            .windows
            .iter()
            .map(|w| vec![num(w.tau_lo), num(w.tau_hi), num(w.width()), w.certified.to_string()])
            .collect(),
        Payload::Witness(w) => vec![vec![
            num(w.eps),
            w.truncation.to_string(),
            num(w.sup_norm),
            num(w.refined_sup),
            opt(w.analytic_bound),
            opt(w.mass.as_ref().map(|m| m.value)),
            opt(w.mass.as_ref().map(|m| m.interval.low)),
            opt(w.mass.as_ref().map(|m| m.interval.high)),
        ]],
        Payload::Ks(k) => vec![vec![
            num(k.statistic),
            num(k.re_statistic),
            num(k.im_statistic),
            k.tau_samples.to_string(),
            k.haar_trials.to_string(),
            k.failures.to_string(),
        ]],
        Payload::Demo(d) => d
            .stages
            .iter()
            .map(|s| vec![s.stage.clone(), num(s.value), num(s.bound), s.passed.to_string()])
            .collect(),
    }
}

/// Writes `<dir>/<stem>_<kind>.csv` for every payload kind among `records`,
/// rows in record order. Returns the files written.
pub fn export_plot_data(records: &[ResultRecord], dir: &Path, stem: &str) -> Result<Vec<PathBuf>, CliError> {
    if records.is_empty() {
        return Err(CliError::Usage("no records to export".into()));
    }
    let io = |path: &Path| {
        let path = path.display().to_string();
        move |source| CliError::Io { path, source }
    };
    std::fs::create_dir_all(dir).map_err(io(dir))?;
    let mut kinds: Vec<&'static str> = Vec::new();
    for r in records {
        let k = kind(&r.payload);
        if !kinds.contains(&k) {
            kinds.push(k);
        }
    }
    let mut written = Vec::new();
    for k in kinds {
        let path = dir.join(format!("{stem}_{k}.csv"));
        let csv_err = |e: csv::Error| CliError::Io {
            path: path.display().to_string(),
            source: e.into(),
        };
        let mut w = csv::Writer::from_path(&path).map_err(csv_err)?;
        w.write_record(header(k)).map_err(csv_err)?;
        for r in records.iter().filter(|r| kind(&r.payload) == k) {
            for row in rows(&r.payload) {
                w.write_record(&row).map_err(csv_err)?;
            }
        }
        w.flush().map_err(io(&path))?;
        written.push(path);
    }
    Ok(written)
}
