use num_complex::Complex64;
use recur_core::dd::DoubleDouble;
use recur_core::scanner::*;
use recur_core::target::RecurrenceTarget;
use recur_core::zeta::{zeta, zeta_shifted, CompactRect, EvalConfig};

fn rect() -> CompactRect {
    CompactRect::new((1.5, 1.6), (0.0, 0.2), 3, 4).unwrap()
}

fn cfg(target: RecurrenceTarget, eps: f64, t_end: f64, n: usize) -> ScanConfig {
    ScanConfig {
        target,
        k_rect: rect(),
        eps,
        t_end,
        tau_samples: n,
        seed: 42,
        eval: EvalConfig::default(),
        confidence: 0.95,
    }
}

#[test]
fn monotone_in_eps_on_shared_samples() {
    let c = cfg(RecurrenceTarget::Rational { j: 1, k: 2 }, 0.5, 1e3, 400);
    let s = sample_sups(&c).unwrap();
    let mut prev = 0.0;
    for eps in [0.05, 0.2, 0.5, 1.0, 2.0, 4.0] {
        let v = estimate_from(&s, &c, eps).unwrap().value;
        assert!(v >= prev);
        prev = v;
    }
}

#[test]
fn swap_invariance() {
    let a = nu_t(&cfg(RecurrenceTarget::Rational { j: 1, k: 2 }, 0.5, 1e3, 300)).unwrap();
    let b = nu_t(&cfg(RecurrenceTarget::Rational { j: 2, k: 1 }, 0.5, 1e3, 300)).unwrap();
    assert_eq!(a.value, b.value);
    assert_eq!(a.hits, b.hits);
}

#[test]
fn above_uniform_bound_everything_hits() {
    let z = zeta(Complex64::new(1.5, 0.0), &EvalConfig::default()).unwrap().re;
    let bound = 2.0 * (z - 1.0);
    assert!(bound < 4.0);
    let e = nu_t(&cfg(RecurrenceTarget::Rational { j: 1, k: 2 }, bound * 1.0001, 1e3, 200)).unwrap();
    assert_eq!(e.value, 1.0);
    let e = nu_t(&cfg(RecurrenceTarget::Real { d: 1.0 }, 1e-12, 1e3, 100)).unwrap();
    assert_eq!(e.value, 1.0);
}

#[test]
fn curve_is_reproducible() {
    let c = cfg(RecurrenceTarget::Rational { j: 1, k: 2 }, 1.0, 1e2, 100);
    let a = density_curve(&c, &[1e1, 1e2]).unwrap();
    let b = density_curve(&c, &[1e1, 1e2]).unwrap();
    assert_eq!(a, b);
    let p = liminf_proxy(&a, 0.0, 0.0);
    assert_eq!(p.running_min.len(), 2);
    assert!(p.running_min[1] <= p.running_min[0]);
    assert!(p.label.contains("finite-T"));
}

#[test]
fn haar_mean_is_small() {
    // E omega(p)^m = 0 for m != 0, so the difference has mean zero
    let c = CompareConfig {
        s0: Complex64::new(2.0, 0.0),
        j: 1,
        k: 2,
        t_end: 1e3,
        tau_samples: 100,
        haar_trials: 2000,
        n_primes: 50,
        seed: 9,
        eval: EvalConfig::default(),
    };
    let h = haar_ensemble(&c).unwrap();
    let n = h.len() as f64;
    let mean = h.iter().sum::<Complex64>() / n;
    let std = (h.iter().map(|z| (z - mean).norm_sqr()).sum::<f64>() / (n - 1.0)).sqrt();
    assert!(mean.norm() <= 4.0 / n.sqrt() * std, "{mean} vs {std}");
    let r = compare_report(&c).unwrap();
    assert!(r.statistic > 0.0 && r.statistic < 1.0);
    assert_eq!(r.failures, 0);
}

#[test]
fn demo_end_to_end_cross_checked() {
    let k = CompactRect::new((2.0, 2.2), (0.0, 0.1), 4, 3).unwrap();
    let target = RecurrenceTarget::Rational { j: 1, k: 2 };
    let r = theorem41_demo(&k, 0.1, &target, &DemoOptions::default()).unwrap();
    assert!(r.window.certified);
    assert!(r.sup < 0.2 * 1.05);
    assert!(r.sup <= r.staged_bound + 1e-4);
    let names: Vec<&str> = r.stages.iter().map(|s| s.stage.as_str()).collect();
    assert_eq!(names, ["truncation", "delta", "transfer", "kronecker", "phases", "verification"]);
    assert!(r.stages.iter().all(|s| s.passed));
    // independent pointwise evaluation at the returned tau
    let cfg = EvalConfig::default().with_target(1e-6);
    let direct = k
        .nodes()
        .into_iter()
        .map(|s| {
            let a = zeta_shifted(s, DoubleDouble::product(1.0, r.tau), &cfg).unwrap();
            let b = zeta_shifted(s, DoubleDouble::product(2.0, r.tau), &cfg).unwrap();
            (a - b).norm()
        })
        .fold(0.0, f64::max);
    assert!((direct - r.sup).abs() < 1e-4, "{direct} vs {}", r.sup);
}

#[test]
fn demo_with_d_zero_compares_to_unshifted() {
    let k = CompactRect::new((2.0, 2.2), (0.0, 0.1), 3, 3).unwrap();
    let r = theorem41_demo(&k, 0.2, &RecurrenceTarget::Real { d: 0.0 }, &DemoOptions::default()).unwrap();
    assert!(r.query.extra_targets.iter().all(|x| x.log_value == 0.0));
    let cfg = EvalConfig::default().with_target(1e-6);
    for s in k.nodes() {
        let shifted = zeta_shifted(s, DoubleDouble::from_f64(r.tau), &cfg).unwrap();
        let base = zeta(s, &cfg).unwrap();
        assert!((shifted - base).norm() <= r.sup + 1e-5);
    }
    assert!(r.sup < 0.4 * 1.05);
}
