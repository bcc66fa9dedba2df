mod common;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use recur_core::zeta::{zeta, EvalConfig, Precision};

#[test]
fn eta_oracle_known_values() {
    let z = common::zeta_eta_oracle(Complex64::new(0.5, 0.0));
    assert!((z.re + 1.4603545088095868).abs() < 1e-13);
    let z = common::zeta_eta_oracle(Complex64::new(2.0, 0.0));
    assert!((z.re - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-14);
    // first nontrivial zero
    let z = common::zeta_eta_oracle(Complex64::new(0.5, 14.134725141734693));
    assert!(z.norm() < 1e-12);
}

#[test]
fn euler_maclaurin_matches_eta_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let cfg = EvalConfig::default().with_target(1e-12);
    for _ in 0..20 {
        let s = Complex64::new(rng.random_range(0.6..3.0), rng.random_range(-1000.0..1000.0));
        let a = zeta(s, &cfg).unwrap();
        let b = common::zeta_eta_oracle(s);
        assert!((a - b).norm() < 1e-10, "s = {s}: {a} vs {b}");
    }
}

#[test]
fn extended_mode_matches_eta_oracle() {
    let cfg = EvalConfig {
        precision: Precision::Extended { mantissa_bits: 96 },
        ..EvalConfig::default().with_target(1e-14)
    };
    for s in [Complex64::new(0.75, 30.0), Complex64::new(1.25, -7.5)] {
        let a = zeta(s, &cfg).unwrap();
        assert!((a - common::zeta_eta_oracle(s)).norm() < 1e-12);
    }
}
