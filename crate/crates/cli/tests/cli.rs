use std::path::Path;
use std::process::Command;

use clap::Parser;
use recur_cli::record::Payload;
use recur_cli::{execute, export_plot_data, read_records, run, Cli, ResultRecord, RunConfig};

fn recur(args: &[&str], out: &Path) -> i32 {
    let mut argv = vec!["recur".to_string()];
    argv.extend(args.iter().map(|s| s.to_string()));
    argv.push("--output".into());
    argv.push(out.display().to_string());
    run(argv)
}

fn only_record(path: &Path) -> ResultRecord {
    let mut recs = read_records(path).unwrap();
    assert_eq!(recs.len(), 1);
    recs.pop().unwrap()
}

#[test]
fn scan_example_writes_one_density_record() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.jsonl");
    let code = recur(
        &["scan", "--j", "1", "--k", "2", "--sigma", "1.5:1.6", "--t", "0:0.2", "--eps", "0.5", "--T", "1e4", "--samples", "10000", "--seed", "7"],
        &out,
    );
    assert_eq!(code, 0);
    let rec = only_record(&out);
    assert_eq!(rec.command, "scan");
    assert_eq!(rec.failures, 0);
    match rec.payload {
        Payload::Density(e) => {
            assert_eq!(e.samples, 10_000);
            assert!(e.value > 0.0 && e.value < 1.0, "{}", e.value);
        }
        other => panic!("unexpected payload {other:?}"),
    }
}

#[test]
fn equal_shifts_give_density_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.jsonl");
    assert_eq!(recur(&["scan", "--j", "1", "--k", "1", "--samples", "200", "--eps", "1e-9"], &out), 0);
    match only_record(&out).payload {
        Payload::Density(e) => assert_eq!(e.value, 1.0),
        other => panic!("unexpected payload {other:?}"),
    }
}

#[test]
fn kronecker_example_has_positive_measure() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.jsonl");
    assert_eq!(recur(&["kronecker", "--primes", "2,3,5", "--delta", "0.5", "--T", "1e4"], &out), 0);
    match only_record(&out).payload {
        Payload::Windows(w) => {
            let total: f64 = w.windows.iter().map(|w| w.width()).sum();
            assert!(total > 0.0);
            assert_eq!(w.measure_fraction, Some(total / 1e4));
            assert!(w.windows.iter().all(|w| w.certified));
        }
        other => panic!("unexpected payload {other:?}"),
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.jsonl");
    assert_eq!(recur(&["scan", "--bogus"], &out), 1);
    assert_eq!(recur(&["scan", "--j", "2", "--k", "4", "--samples", "200"], &out), 1);
    assert_eq!(recur(&["scan", "--j", "1", "--samples", "200"], &out), 1);
    assert_eq!(recur(&["scan", "--sigma", "1.5-1.6", "--samples", "200"], &out), 1);
    // ran, but the witness does not verify
    assert_eq!(
        recur(&["witness", "--sigma", "0.6:0.7", "--t", "0:30", "--eps", "1e-3", "--trials", "0"], &out),
        2
    );
    assert_eq!(
        recur(&["kronecker", "--primes", "2,3,5,7,11,13", "--delta", "0.05", "--search-bound", "100"], &out),
        2
    );
    assert!(!out.exists(), "failed runs must not write records");
}

#[test]
fn binary_reports_usage_errors_and_honors_output_dir() {
    let dir = tempfile::tempdir().unwrap();
    let bin = env!("CARGO_BIN_EXE_recur");
    let st = Command::new(bin).args(["nonsense"]).status().unwrap();
    assert_eq!(st.code(), Some(1));
    let st = Command::new(bin)
        .args(["kronecker", "--primes", "2,3", "--delta", "0.5", "--T", "100"])
        .env("RECUR_OUTPUT_DIR", dir.path())
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(0));
    let rec = only_record(&dir.path().join("recur-results.jsonl"));
    assert_eq!(rec.command, "kronecker");
}

#[test]
fn unknown_config_field_is_reported_with_its_path() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "[scan]\nsamples = 200\n[scan.rect]\ngrid_tt = 3\n").unwrap();
    let cli = Cli::try_parse_from(["recur", "--config", cfg.to_str().unwrap(), "scan"]).unwrap();
    let err = execute(&cli).unwrap_err();
    assert_eq!(err.exit_code(), 1);
    let msg = err.to_string();
    assert!(msg.contains("scan.rect") && msg.contains("grid_tt"), "{msg}");
}

#[test]
fn flags_override_config_values() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        "[common]\nconfidence = 0.9\n\n[scan]\nsamples = 150\nseed = 4\neps = 0.3\n\n[scan.rect]\ngrid_t = 2\ngrid_sigma = 2\n",
    )
    .unwrap();
    let cli = Cli::try_parse_from(["recur", "--config", cfg.to_str().unwrap(), "scan", "--eps", "0.6", "--grid-t", "3"]).unwrap();
    let rec = execute(&cli).unwrap().record;
    let scan = rec.config.scan.unwrap();
    assert_eq!(scan.eps, Some(0.6));
    assert_eq!(scan.samples, Some(150));
    assert_eq!(scan.seed, Some(4));
    assert_eq!(scan.rect.grid_t, Some(3));
    assert_eq!(scan.rect.grid_sigma, Some(2));
    assert_eq!(rec.config.common.confidence, Some(0.9));
    match rec.payload {
        Payload::Density(e) => {
            assert_eq!(e.eps, 0.6);
            assert_eq!(e.confidence, 0.9);
            assert_eq!((e.k_rect.grid_sigma, e.k_rect.grid_t), (2, 3));
        }
        other => panic!("unexpected payload {other:?}"),
    }
}

#[test]
fn echoed_config_reproduces_the_payload() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.jsonl");
    let args = ["curve", "--d", "1.5", "--samples", "150", "--schedule", "50,100", "--seed", "3"];
    assert_eq!(recur(&args, &out), 0);
    let first = only_record(&out);

    // the echo is complete: feeding it back as a config file with no flags
    // gives the same payload
    let cfg = dir.path().join("echo.toml");
    std::fs::write(&cfg, first.config.to_toml().unwrap()).unwrap();
    assert_eq!(RunConfig::load(&cfg).unwrap(), first.config);
    let cli = Cli::try_parse_from(["recur", "--config", cfg.to_str().unwrap(), "curve"]).unwrap();
    let second = execute(&cli).unwrap().record;
    assert_eq!(second.config, first.config);
    assert_eq!(
        serde_json::to_string(&second.payload).unwrap(),
        serde_json::to_string(&first.payload).unwrap()
    );
}

#[test]
fn records_from_another_schema_version_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.jsonl");
    assert_eq!(recur(&["kronecker", "--primes", "2", "--delta", "0.5", "--T", "20"], &out), 0);
    let text = std::fs::read_to_string(&out).unwrap();
    std::fs::write(&out, text.replace("\"schema_version\":1", "\"schema_version\":2")).unwrap();
    assert!(read_records(&out).is_err());
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|row| row.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

#[test]
fn curve_csv_has_one_row_per_schedule_point_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.jsonl");
    let plots = dir.path().join("plots");
    let code = recur(
        &["curve", "--samples", "150", "--schedule", "100,1000,3000", "--plot-dir", plots.to_str().unwrap()],
        &out,
    );
    assert_eq!(code, 0);
    let rec = only_record(&out);
    let Payload::Curve(curve) = &rec.payload else {
        panic!("unexpected payload");
    };
    let (header, rows) = read_csv(&plots.join("curve_curve.csv"));
    assert_eq!(header[..2], ["T", "nu_T"]);
    assert_eq!(rows.len(), 3);
    for (row, e) in rows.iter().zip(&curve.estimates) {
        let v: Vec<f64> = row.iter().map(|x| x.parse().unwrap()).collect();
        assert_eq!(v[0], e.t_end);
        assert_eq!(v[1], e.value);
        assert_eq!(v[2], e.ci_half_width);
        assert_eq!(v[3], e.interval.low);
        assert_eq!(v[4], e.interval.high);
    }
}

#[test]
fn empty_curve_gives_header_only_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.jsonl");
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "[curve]\nschedule = []\nsamples = 100\n").unwrap();
    let cli = Cli::try_parse_from(["recur", "--config", cfg.to_str().unwrap(), "--output", out.to_str().unwrap(), "curve"]).unwrap();
    let rec = execute(&cli).unwrap().record;
    let files = export_plot_data(&[rec], dir.path(), "empty").unwrap();
    assert_eq!(files.len(), 1);
    let text = std::fs::read_to_string(&files[0]).unwrap();
    assert_eq!(text.lines().count(), 1);
    assert!(text.starts_with("T,nu_T,"));
}

#[test]
fn window_csv_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.jsonl");
    assert_eq!(recur(&["kronecker", "--primes", "2,3", "--delta", "0.4", "--T", "500"], &out), 0);
    let rec = only_record(&out);
    let files = export_plot_data(std::slice::from_ref(&rec), dir.path(), "k").unwrap();
    let Payload::Windows(w) = &rec.payload else {
        panic!("unexpected payload");
    };
    let (header, rows) = read_csv(&files[0]);
    assert_eq!(header, ["tau_lo", "tau_hi", "width", "certified"]);
    assert_eq!(rows.len(), w.windows.len());
    for (row, win) in rows.iter().zip(&w.windows) {
        assert_eq!(row[0].parse::<f64>().unwrap(), win.tau_lo);
        assert_eq!(row[1].parse::<f64>().unwrap(), win.tau_hi);
        assert_eq!(row[3], win.certified.to_string());
    }
}

#[test]
fn export_needs_a_record() {
    let dir = tempfile::tempdir().unwrap();
    assert!(export_plot_data(&[], dir.path(), "x").is_err());
}

#[test]
fn other_subcommands_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.jsonl");
    assert_eq!(recur(&["witness", "--trials", "100"], &out), 0);
    assert_eq!(recur(&["compare", "--samples", "200", "--haar-trials", "200", "--T", "1000"], &out), 0);
    assert_eq!(recur(&["demo41"], &out), 0);
    assert_eq!(recur(&["kronecker", "--primes", "2,3,5", "--delta", "0.4", "--search-bound", "1e6"], &out), 0);
    let kinds: Vec<String> = read_records(&out).unwrap().into_iter().map(|r| r.command).collect();
    assert_eq!(kinds, ["witness", "compare", "demo41", "kronecker"]);
}
