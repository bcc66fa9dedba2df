//! Points of the (truncated) infinite torus, the random element
//! `zeta(s, omega^j) - zeta(s, omega^k)`, support witnesses and Monte Carlo
//! support mass.

use std::f64::consts::TAU;

use num_complex::Complex64;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::primes::shared_table;
use crate::rng::item_rng;
use crate::stats::{wilson, Interval};
use crate::zeta::{choose_truncation, euler_product, grid_max, log_tail_bound, zeta};
use crate::zeta::{CompactRect, EulerGrid, EvalConfig, Region};

/// Minimum number of primes carried by a sampled torus point.
pub const DEFAULT_SUPPORT: usize = 1000;

/// Truncation used for witnesses outside the region of absolute convergence.
pub const HEURISTIC_TRUNCATION: usize = 100;

/// A point of the torus restricted to `p_1, ..., p_R`, stored as angles in
/// `[0, 2 pi)` so that `|omega(p)| = 1` holds exactly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusPoint {
    angles: Vec<f64>,
}

impl TorusPoint {
    /// The point with every angle reduced into `[0, 2 pi)`.
    pub fn from_angles(angles: Vec<f64>) -> Result<Self> {
        if angles.is_empty() {
            return Err(Error::invalid("a torus point needs at least one angle"));
        }
        if let Some(a) = angles.iter().find(|a| !a.is_finite()) {
            return Err(Error::invalid(format!("non-finite angle {a}")));
        }
        Ok(TorusPoint {
            angles: angles.into_iter().map(reduce_angle).collect(),
        })
    }

    /// `omega = 1` on the first `r` primes.
    pub fn identity(r: usize) -> Self {
        TorusPoint {
            angles: vec![0.0; r.max(1)],
        }
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    /// `omega(p_n)` for 1-based `n`.
    pub fn at_prime(&self, n: usize) -> Option<Complex64> {
        n.checked_sub(1)
            .and_then(|i| self.angles.get(i))
            .map(|&a| Complex64::from_polar(1.0, a))
    }

    /// `omega(m) = prod_p omega(p)^{v(m; p)}`; every prime factor of `m`
    /// must lie in the support.
    pub fn at(&self, m: u64) -> Result<Complex64> {
        let f = crate::primes::factorize(m)?;
        let table = shared_table(self.len());
        let mut angle = 0.0;
        for &(p, e) in f.entries() {
            let idx = table
                .index_of(p)
                .filter(|&i| i <= self.len())
                .ok_or_else(|| Error::invalid(format!("prime {p} outside the support of omega")))?;
            let e = e.to_integer().to_f64().expect("integer exponent");
            angle += e * self.angles[idx - 1];
        }
        Ok(Complex64::from_polar(1.0, reduce_angle(angle)))
    }
}

fn reduce_angle(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Haar-random angles for `r` primes, reproducible from `seed`.
pub fn sample_omega(r: usize, seed: u64) -> Result<TorusPoint> {
    if r == 0 {
        return Err(Error::invalid("support size must be >= 1"));
    }
    let mut rng = item_rng(seed, 0);
    Ok(TorusPoint {
        angles: haar_angles(&mut rng, r),
    })
}

pub(crate) fn haar_angles<R: Rng>(rng: &mut R, r: usize) -> Vec<f64> {
    (0..r).map(|_| reduce_angle(rng.random::<f64>() * TAU)).collect()
}

pub(crate) fn check_coprime(j: i64, k: i64) -> Result<()> {
    if j.gcd(&k) != 1 {
        return Err(Error::invalid(format!("j = {j} and k = {k} must be coprime")));
    }
    Ok(())
}

/// `zeta(s, omega^j) - zeta(s, omega^k)` through the Euler products over the
/// first `n` primes. `j == k` gives zero without further checks.
pub fn random_zeta_diff(
    s: Complex64,
    omega: &TorusPoint,
    j: i64,
    k: i64,
    n: usize,
    cfg: &EvalConfig,
) -> Result<Complex64> {
    if j == k {
        return Ok(Complex64::new(0.0, 0.0));
    }
    check_coprime(j, k)?;
    Ok(euler_product(s, omega, j, n, cfg)? - euler_product(s, omega, k, n, cfg)?)
}

/// A small function `x(s)` in the support of the random element, sampled on
/// a grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessFunction {
    pub rect: CompactRect,
    pub eps: f64,
    pub j: i64,
    pub k: i64,
    /// Number of leading primes with `omega(p) = 1`.
    pub truncation: usize,
    pub omega: TorusPoint,
    /// `x(s)` at the grid nodes, sigma-major.
    pub values: Vec<Complex64>,
    pub sup_norm: f64,
    /// `2 zeta(sigma_min) (e^B - 1)` with `B` the log tail bound, in the
    /// absolute region only.
    pub analytic_bound: Option<f64>,
    /// True outside `Re(s) > 1`, where nothing certifies the truncation.
    pub heuristic: bool,
}

impl WitnessFunction {
    /// Grid sup of `x` on a grid refined by `factor`, with the same `omega`.
    pub fn reverify(&self, factor: usize) -> Result<f64> {
        let fine = self.rect.refined(factor);
        let grid = EulerGrid::new(fine.nodes(), self.omega.len())?;
        let v = grid.diff(self.omega.angles(), self.j, self.k)?;
        let sup = grid_max(&v).1;
        if !(sup < self.eps) {
            return Err(Error::WitnessFailed {
                achieved: sup,
                eps: self.eps,
            });
        }
        Ok(sup)
    }
}

/// Builds a witness: `omega(p) = 1` for the first `N` primes, Haar-random on
/// the rest, with `N` from the log tail bound so both tails stay below
/// `eps / 2`. The grid sup of `x(s)` must come out below `eps`.
pub fn support_witness(
    k_rect: &CompactRect,
    eps: f64,
    j: i64,
    k: i64,
    seed: u64,
    cfg: &EvalConfig,
) -> Result<WitnessFunction> {
    cfg.validate()?;
    k_rect.validate()?;
    if !(eps > 0.0) {
        return Err(Error::invalid(format!("eps must be positive, got {eps}")));
    }
    if j != k {
        check_coprime(j, k)?;
    }
    if !(k_rect.sigma_min > 0.5) {
        return Err(Error::invalid(format!(
            "witnesses need sigma_min > 1/2, got {}",
            k_rect.sigma_min
        )));
    }
    let heuristic = k_rect.region() != Region::Absolute;
    let n = if heuristic {
        HEURISTIC_TRUNCATION
    } else {
        choose_truncation(k_rect, eps)?
    };
    let r = n.max(DEFAULT_SUPPORT);
    let mut omega = sample_omega(r, seed)?;
    omega.angles[..n].fill(0.0);

    let grid = EulerGrid::new(k_rect.nodes(), r)?;
    let values = if j == k {
        vec![Complex64::new(0.0, 0.0); k_rect.node_count()]
    } else {
        grid.diff(omega.angles(), j, k)?
    };
    let sup_norm = grid_max(&values).1;
    let analytic_bound = if heuristic {
        None
    } else {
        let b = log_tail_bound(k_rect.sigma_min, n)?;
        let z = zeta(Complex64::new(k_rect.sigma_min, 0.0), cfg)?.re;
        Some(2.0 * z * b.exp_m1())
    };
    if !(sup_norm < eps) {
        return Err(Error::WitnessFailed {
            achieved: sup_norm,
            eps,
        });
    }
    Ok(WitnessFunction {
        rect: *k_rect,
        eps,
        j,
        k,
        truncation: n,
        omega,
        values,
        sup_norm,
        analytic_bound,
        heuristic,
    })
}

/// Monte Carlo estimate of the Haar measure of the `2 eps` grid-sup ball
/// around a witness.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MassEstimate {
    pub trials: usize,
    pub hits: usize,
    pub value: f64,
    pub confidence: f64,
    pub interval: Interval,
    pub ci_half_width: f64,
}

#[allow(clippy::too_many_arguments)]
pub fn support_mass(
    k_rect: &CompactRect,
    eps: f64,
    witness: &WitnessFunction,
    j: i64,
    k: i64,
    trials: usize,
    seed: u64,
    cfg: &EvalConfig,
) -> Result<MassEstimate> {
    cfg.validate()?;
    if trials == 0 {
        return Err(Error::invalid("trials must be >= 1"));
    }
    if !(eps > 0.0) {
        return Err(Error::invalid(format!("eps must be positive, got {eps}")));
    }
    if witness.rect != *k_rect {
        return Err(Error::invalid("witness was built on a different rectangle"));
    }
    if j != k {
        check_coprime(j, k)?;
    }
    let r = witness.omega.len();
    let grid = EulerGrid::new(k_rect.nodes(), r)?;
    let radius = 2.0 * eps;
    let hits = (0..trials as u64)
        .into_par_iter()
        .map(|i| -> Result<usize> {
            let mut rng = item_rng(seed, i);
            let angles = haar_angles(&mut rng, r);
            let v = if j == k {
                vec![Complex64::new(0.0, 0.0); k_rect.node_count()]
            } else {
                grid.diff(&angles, j, k)?
            };
            let dist = v
                .iter()
                .zip(&witness.values)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            Ok(usize::from(dist < radius))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .sum::<usize>();
    let confidence = 0.95;
    let interval = wilson(hits, trials, confidence)?;
    Ok(MassEstimate {
        trials,
        hits,
        value: hits as f64 / trials as f64,
        confidence,
        interval,
        ci_half_width: interval.half_width(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn cfg() -> EvalConfig {
        EvalConfig::default()
    }

    #[test]
    fn sampling_is_deterministic_and_in_range() {
        let a = sample_omega(50, 11).unwrap();
        assert_eq!(a, sample_omega(50, 11).unwrap());
        assert_ne!(a, sample_omega(50, 12).unwrap());
        assert!(a.angles().iter().all(|&x| (0.0..TAU).contains(&x)));
        assert_eq!(sample_omega(1, 3).unwrap().len(), 1);
        assert!(sample_omega(0, 3).is_err());
    }

    #[test]
    fn empirical_mean_of_unit_vectors() {
        let a = sample_omega(10_000, 99).unwrap();
        let mean: Complex64 =
            a.angles().iter().map(|&x| Complex64::from_polar(1.0, x)).sum::<Complex64>() / 1e4;
        assert!(mean.norm() <= 0.03);
    }

    #[test]
    fn composite_values() {
        let w = TorusPoint::from_angles(vec![0.5, 1.0, 2.0]).unwrap();
        // 12 = 2^2 * 3
        let v = w.at(12).unwrap();
        assert!((v - Complex64::from_polar(1.0, 2.0)).norm() < 1e-15);
        assert_eq!(w.at(1).unwrap(), c(1.0, 0.0));
        assert!(w.at(7).is_err());
        assert!((w.at_prime(3).unwrap() - Complex64::from_polar(1.0, 2.0)).norm() < 1e-15);
        let reduced = TorusPoint::from_angles(vec![-0.5, 7.0]).unwrap();
        assert!((reduced.angles()[0] - (TAU - 0.5)).abs() < 1e-15);
        assert!((reduced.angles()[1] - (7.0 - TAU)).abs() < 1e-15);
    }

    #[test]
    fn random_diff_examples() {
        let one = TorusPoint::identity(10);
        assert_eq!(random_zeta_diff(c(2.0, 1.0), &one, 1, 2, 10, &cfg()).unwrap(), c(0.0, 0.0));
        let w = sample_omega(10, 4).unwrap();
        assert_eq!(random_zeta_diff(c(2.0, 1.0), &w, 3, 3, 10, &cfg()).unwrap(), c(0.0, 0.0));
        let mut angles = vec![0.0; 10];
        angles[0] = PI;
        let w = TorusPoint::from_angles(angles).unwrap();
        let d = random_zeta_diff(c(2.0, 0.0), &w, 1, 2, 1, &cfg()).unwrap();
        assert!((d - c(0.8 - 4.0 / 3.0, 0.0)).norm() < 1e-15);
        assert!((d.re + 8.0 / 15.0).abs() < 1e-15);
        assert!(random_zeta_diff(c(2.0, 0.0), &w, 2, 4, 1, &cfg()).is_err());
    }

    #[test]
    fn haar_moment_identity() {
        let s = c(1.5, 0.3);
        let trials = 4000;
        let vals: Vec<Complex64> = (0..trials)
            .map(|i| {
                let mut rng = item_rng(5, i);
                let w = TorusPoint::from_angles(haar_angles(&mut rng, 100)).unwrap();
                random_zeta_diff(s, &w, 1, 2, 100, &cfg()).unwrap()
            })
            .collect();
        let n = trials as f64;
        let mean: Complex64 = vals.iter().sum::<Complex64>() / n;
        let var = vals.iter().map(|v| (v - mean).norm_sqr()).sum::<f64>() / (n - 1.0);
        assert!(mean.norm() <= 4.0 / n.sqrt() * var.sqrt());
    }

    #[test]
    fn witness_trivial_cases() {
        let k = CompactRect::new((1.5, 2.0), (0.0, 1.0), 3, 3).unwrap();
        let w = support_witness(&k, 10.0, 1, 2, 1, &cfg()).unwrap();
        assert!(w.sup_norm < 10.0);
        assert!(!w.heuristic);
        let w = support_witness(&k, 0.5, 1, 1, 1, &cfg()).unwrap();
        assert_eq!(w.sup_norm, 0.0);
        assert!(support_witness(&k, 0.0, 1, 2, 1, &cfg()).is_err());
    }

    #[test]
    fn witness_with_all_angles_zero_vanishes() {
        let k = CompactRect::new((1.5, 2.0), (0.0, 1.0), 3, 3).unwrap();
        let grid = EulerGrid::new(k.nodes(), 1000).unwrap();
        let v = grid.diff(TorusPoint::identity(1000).angles(), 1, 2).unwrap();
        assert_eq!(grid_max(&v).1, 0.0);
    }

    #[test]
    fn antisymmetry() {
        let w = sample_omega(30, 8).unwrap();
        let s = c(1.3, 2.0);
        let a = random_zeta_diff(s, &w, 1, 2, 30, &cfg()).unwrap();
        let b = random_zeta_diff(s, &w, 2, 1, 30, &cfg()).unwrap();
        assert_eq!(a, -b);
    }

    #[test]
    fn mass_is_one_for_huge_radius() {
        let k = CompactRect::new((1.5, 2.0), (0.0, 1.0), 3, 3).unwrap();
        let w = support_witness(&k, 10.0, 1, 2, 1, &cfg()).unwrap();
        // 2 (zeta(1.5) - 1) bounds every sample, and |x| < 10
        let m = support_mass(&k, 10.0, &w, 1, 2, 200, 3, &cfg()).unwrap();
        assert_eq!(m.value, 1.0);
        let m = support_mass(&k, 1e9, &w, 1, 2, 50, 3, &cfg()).unwrap();
        assert_eq!(m.hits, 50);
    }

    #[test]
    fn critical_strip_witness_is_flagged() {
        let k = CompactRect::new((0.7, 0.8), (0.0, 0.5), 3, 3).unwrap();
        match support_witness(&k, 5.0, 1, 2, 2, &cfg()) {
            Ok(w) => assert!(w.heuristic && w.analytic_bound.is_none()),
            Err(Error::WitnessFailed { .. }) => {}
            Err(e) => panic!("unexpected {e}"),
        }
    }
}
