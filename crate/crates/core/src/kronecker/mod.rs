//! Heights `tau` at which every phase `tau * ln p` is close to a multiple of
//! `2*pi`, i.e. `|exp(i tau ln p) - 1| < delta` for a finite set of primes.

mod lattice;

use std::collections::HashSet;
use std::f64::consts::PI;

use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dd::{self, DoubleDouble};
use crate::error::{Error, Result};
use crate::primes::{is_prime, rational_to_f64, Factorization};
use crate::zeta::ln_dd;

const LLL_DELTA: f64 = 0.99;
/// Reduced vectors combined with coefficients in {-1, 0, 1} per level.
const COMBO_VECTORS: usize = 6;
/// Interior points checked when certifying a window (the midpoint included).
const INTERIOR_CHECKS: usize = 11;

/// An extra phase condition `|exp(i tau x) - 1| < delta` for a given `x`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtraTarget {
    pub log_value: f64,
    pub delta: f64,
    /// Set when `log_value` is known to be independent of the queried prime
    /// logarithms; only then does it enter [`theoretical_density`].
    #[serde(default)]
    pub independent: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KroneckerQuery {
    pub primes: Vec<u64>,
    pub delta: f64,
    #[serde(default)]
    pub extra_targets: Vec<ExtraTarget>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TauWindow {
    pub tau_lo: f64,
    pub tau_hi: f64,
    pub certified: bool,
}

impl TauWindow {
    pub fn width(&self) -> f64 {
        self.tau_hi - self.tau_lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.tau_lo + self.tau_hi)
    }

    pub fn contains(&self, tau: f64) -> bool {
        self.tau_lo <= tau && tau <= self.tau_hi
    }
}

/// One phase condition `|wrap(tau * freq)| < theta`, where
/// `theta = 2 arcsin(delta / 2)` is the arc equivalent of the chord bound.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Condition {
    freq: DoubleDouble,
    theta: f64,
    delta: f64,
}

impl Condition {
    fn new(freq: DoubleDouble, delta: f64) -> Self {
        Condition {
            freq,
            theta: arc(delta),
            delta,
        }
    }

    /// `tau * freq` reduced into `(-pi, pi]`.
    fn phase(&self, tau: f64) -> f64 {
        (DoubleDouble::from_f64(tau) * self.freq).rem_two_pi().to_f64()
    }

    fn holds(&self, tau: f64) -> bool {
        self.phase(tau).abs() < self.theta
    }
}

fn arc(delta: f64) -> f64 {
    2.0 * (delta / 2.0).min(1.0).asin()
}

impl KroneckerQuery {
    pub fn new(primes: Vec<u64>, delta: f64) -> Result<Self> {
        let q = KroneckerQuery {
            primes,
            delta,
            extra_targets: Vec::new(),
        };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        check_delta(self.delta)?;
        let mut seen = HashSet::new();
        for &p in &self.primes {
            if !is_prime(p) {
                return Err(Error::invalid(format!("{p} is not prime")));
            }
            if !seen.insert(p) {
                return Err(Error::invalid(format!("prime {p} listed twice")));
            }
        }
        for x in &self.extra_targets {
            if !x.log_value.is_finite() {
                return Err(Error::invalid(format!("extra target log value {} is not finite", x.log_value)));
            }
            check_delta(x.delta)?;
        }
        Ok(())
    }

    /// Nonvacuous conditions; a zero frequency holds identically and is dropped.
    pub(crate) fn conditions(&self) -> Result<Vec<Condition>> {
        self.validate()?;
        let primes = self.primes.iter().map(|&p| Condition::new(ln_dd(p), self.delta));
        let extras = self
            .extra_targets
            .iter()
            .filter(|x| x.log_value != 0.0)
            .map(|x| Condition::new(DoubleDouble::from_f64(x.log_value.abs()), x.delta));
        Ok(primes.chain(extras).collect())
    }

    /// Whether every condition holds at `tau`.
    pub fn holds_at(&self, tau: f64) -> Result<bool> {
        Ok(holds_all(&self.conditions()?, tau))
    }

    /// Largest admissible scan step: `min delta / (2 freq)` over the conditions.
    pub fn max_step(&self) -> Result<f64> {
        Ok(max_step(&self.conditions()?))
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta <= 2.0) {
        return Err(Error::invalid(format!("delta must lie in (0, 2], got {delta}")));
    }
    Ok(())
}

fn holds_all(conds: &[Condition], tau: f64) -> bool {
    conds.iter().all(|c| c.holds(tau))
}

fn max_step(conds: &[Condition]) -> f64 {
    conds
        .iter()
        .map(|c| c.delta / (2.0 * c.freq.to_f64()))
        .fold(f64::INFINITY, f64::min)
}

/// Checks the conditions at both endpoints and at interior points
/// (including the midpoint).
fn certify(conds: &[Condition], lo: f64, hi: f64) -> bool {
    let inner = (1..=INTERIOR_CHECKS).map(|i| lo + (hi - lo) * i as f64 / (INTERIOR_CHECKS + 1) as f64);
    [lo, hi].into_iter().chain(inner).all(|t| holds_all(conds, t))
}

/// Windows in `[0, T]` found by sampling the lattice `tau = i * step`.
///
/// Runs of consecutive lattice points where all conditions hold are merged
/// into one window, and each end is refined by bisection to `step / 100`.
pub fn find_tau_scan(q: &KroneckerQuery, t_end: f64, step: f64) -> Result<Vec<TauWindow>> {
    let conds = q.conditions()?;
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::invalid(format!("T must be positive and finite, got {t_end}")));
    }
    if !(step > 0.0) {
        return Err(Error::invalid(format!("step must be positive, got {step}")));
    }
    let limit = max_step(&conds);
    if step > limit * (1.0 + 1e-12) {
        return Err(Error::invalid(format!(
            "step {step} too coarse: the fastest condition allows at most {limit}"
        )));
    }
    let n = (t_end / step).floor() as u64;
    let count = n + 1 + u64::from((n as f64) * step < t_end);
    if count > 1 << 31 {
        return Err(Error::invalid(format!("scan of {count} points is too large")));
    }
    let point = |i: u64| if i <= n { i as f64 * step } else { t_end };
    let flags: Vec<bool> = (0..count).into_par_iter().map(|i| holds_all(&conds, point(i))).collect();

    let mut runs = Vec::new();
    let mut start = None;
    for (i, &f) in flags.iter().enumerate() {
        match (f, start) {
            (true, None) => start = Some(i as u64),
            (false, Some(s)) => {
                runs.push((s, i as u64 - 1));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        runs.push((s, count - 1));
    }

    let tol = step / 100.0;
    let bisect = |mut good: f64, mut bad: f64| {
        while (good - bad).abs() > tol {
            let mid = 0.5 * (good + bad);
            if holds_all(&conds, mid) {
                good = mid;
            } else {
                bad = mid;
            }
        }
        good
    };
    let windows = runs
        .par_iter()
        .filter_map(|&(a, b)| {
            let lo = if a > 0 { bisect(point(a), point(a - 1)) } else { point(a) };
            let hi = if b + 1 < count { bisect(point(b), point(b + 1)) } else { point(b) };
            (lo < hi).then(|| TauWindow {
                tau_lo: lo,
                tau_hi: hi,
                certified: certify(&conds, lo, hi),
            })
        })
        .collect();
    Ok(windows)
}

/// A certified window with `0 < tau_lo` and `tau_hi <= search_bound`, found
/// by simultaneous Diophantine approximation.
///
/// The fastest condition `r` fixes `tau = 2 pi q / f_r` for integer `q`, so
/// its phase vanishes; LLL on the lattice of `(q / Q, (q f_c / f_r - p_c) * 2 pi / theta_c)`
/// then yields `q` with every other phase small. `Q` is doubled from 1 until
/// it passes `search_bound`. Around each candidate the exact set where all
/// arcs intersect is computed and certified in double-double. The window with
/// the smallest `tau_lo` is returned.
pub fn find_tau_lattice(q: &KroneckerQuery, search_bound: f64) -> Result<TauWindow> {
    let conds = q.conditions()?;
    if !(search_bound > 0.0 && search_bound.is_finite()) {
        return Err(Error::invalid(format!("search bound must be positive, got {search_bound}")));
    }
    if conds.is_empty() {
        return Err(Error::invalid("query has no nonvacuous condition"));
    }
    let r = (0..conds.len())
        .max_by(|&a, &b| conds[a].freq.to_f64().total_cmp(&conds[b].freq.to_f64()))
        .expect("nonempty");
    let reference = conds[r];
    let others: Vec<Condition> = conds.iter().enumerate().filter(|&(i, _)| i != r).map(|(_, c)| *c).collect();
    let ratios: Vec<DoubleDouble> = others.iter().map(|c| c.freq / reference.freq).collect();
    let scales: Vec<f64> = others.iter().map(|c| 2.0 * PI / c.theta).collect();
    let period = (dd::TWO_PI / reference.freq).to_f64();
    let radius = 1.01 * reference.theta / reference.freq.to_f64();
    let q_max = (search_bound / period).ceil().max(1.0);
    if q_max > 2f64.powi(52) {
        return Err(Error::invalid(format!("search bound {search_bound:e} is beyond double precision")));
    }

    let m = others.len() + 1;
    let mut seen = HashSet::new();
    let mut best: Option<TauWindow> = None;
    let mut big_q = 1.0f64;
    while big_q <= 2.0 * q_max {
        let embed = |b: &[i128]| {
            let qd = DoubleDouble::from_f64(b[0] as f64);
            let mut v = Vec::with_capacity(m);
            v.push(b[0] as f64 / big_q);
            for c in 0..others.len() {
                let err = qd * ratios[c] - DoubleDouble::from_f64(b[c + 1] as f64);
                v.push(err.to_f64() * scales[c]);
            }
            v
        };
        let identity: Vec<Vec<i128>> = (0..m).map(|i| (0..m).map(|j| i128::from(i == j)).collect()).collect();
        let reduced = lattice::lll(identity, embed, LLL_DELTA);
        for qi in combination_multipliers(&reduced) {
            if !seen.insert(qi) {
                continue;
            }
            let tau0 = (dd::TWO_PI.mul_f64(qi as f64) / reference.freq).to_f64();
            if tau0 - radius > search_bound {
                continue;
            }
            if best.is_some_and(|w| tau0 - radius >= w.tau_lo) {
                continue;
            }
            for w in local_windows(&conds, tau0, radius) {
                if w.certified && w.tau_lo > 0.0 && w.tau_hi <= search_bound && best.is_none_or(|b| w.tau_lo < b.tau_lo) {
                    best = Some(w);
                }
            }
        }
        if let Some(w) = best {
            if big_q > 8.0 * (w.tau_lo / period + 1.0) {
                break;
            }
        }
        big_q *= 2.0;
    }
    best.ok_or(Error::NotFound { search_bound })
}

/// Positive `q` values of small combinations of the reduced basis vectors.
fn combination_multipliers(basis: &[Vec<i128>]) -> Vec<i64> {
    let used = basis.len().min(COMBO_VECTORS);
    let mut out = Vec::new();
    let total = 3usize.pow(used as u32);
    for code in 1..total {
        let mut c = code;
        let mut q: i128 = 0;
        for v in basis.iter().take(used) {
            let coef = (c % 3) as i128 - 1;
            c /= 3;
            q += coef * v[0];
        }
        if q != 0 && q.unsigned_abs() < 1u128 << 52 {
            out.push(q.unsigned_abs() as i64);
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Exact intersection of the arcs of every condition within
/// `[center - radius, center + radius]`, shrunk by a rounding margin and
/// certified.
fn local_windows(conds: &[Condition], center: f64, radius: f64) -> Vec<TauWindow> {
    let mut acc = vec![(-radius, radius)];
    for c in conds {
        let f = c.freq.to_f64();
        let phi = c.phase(center);
        let lo_m = ((phi - c.theta - radius * f) / (2.0 * PI)).floor() as i64;
        let hi_m = ((phi + c.theta + radius * f) / (2.0 * PI)).ceil() as i64;
        let arcs: Vec<(f64, f64)> = (lo_m..=hi_m)
            .map(|m| {
                let base = 2.0 * PI * m as f64 - phi;
                ((base - c.theta) / f, (base + c.theta) / f)
            })
            .collect();
        acc = intersect(&acc, &arcs);
        if acc.is_empty() {
            return Vec::new();
        }
    }
    let ulp = 4.0 * f64::EPSILON * center.abs().max(1.0);
    acc.into_iter()
        .filter_map(|(a, b)| {
            let margin = (1e-9 * (b - a)).max(ulp);
            let (lo, hi) = (center + a + margin, center + b - margin);
            (lo < hi).then(|| TauWindow {
                tau_lo: lo,
                tau_hi: hi,
                certified: certify(conds, lo, hi),
            })
        })
        .collect()
}

/// Pairwise intersection of two sorted lists of open intervals.
fn intersect(a: &[(f64, f64)], b: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for &(a0, a1) in a {
        for &(b0, b1) in b {
            let (lo, hi) = (a0.max(b0), a1.min(b1));
            if lo < hi {
                out.push((lo, hi));
            }
        }
    }
    out.sort_by(|x, y| x.0.total_cmp(&y.0));
    out
}

/// `prod 2 arcsin(delta / 2) / pi` over the primes and the extra targets
/// flagged independent.
pub fn theoretical_density(q: &KroneckerQuery) -> f64 {
    let per = |delta: f64| arc(delta) / PI;
    let primes = q.primes.iter().map(|_| per(q.delta));
    let extras = q.extra_targets.iter().filter(|x| x.independent).map(|x| per(x.delta));
    primes.chain(extras).product()
}

/// Both sides of `|e^{ij theta} - 1| = |e^{ik theta} - 1| |S_j| / |S_k|` with
/// `theta = tau ln p / k` and `S_n = sum_{m < n} e^{i m theta}`; negative
/// `j` or `k` use `|j|`, `|k|` since conjugation preserves each modulus.
pub fn rational_lift_check(j: i64, k: i64, tau: f64, p: u64) -> Result<(f64, f64)> {
    let parts = lift_parts(j, k, tau, p)?;
    if parts.denominator < 1e-14 {
        return Err(Error::SingularDirection { theta: parts.theta });
    }
    Ok((parts.chord_j, parts.chord_k * parts.numerator / parts.denominator))
}

/// `|sum_{m < |k|} e^{i m theta}|` with `theta = tau ln p / k`, the quantity
/// whose vanishing makes [`rational_lift_check`] singular.
pub fn lift_denominator(k: i64, tau: f64, p: u64) -> Result<f64> {
    Ok(lift_parts(1, k, tau, p)?.denominator)
}

struct LiftParts {
    theta: f64,
    chord_j: f64,
    chord_k: f64,
    numerator: f64,
    denominator: f64,
}

fn lift_parts(j: i64, k: i64, tau: f64, p: u64) -> Result<LiftParts> {
    if k == 0 || j.gcd(&k) != 1 {
        return Err(Error::invalid(format!("need k != 0 and gcd(j, k) = 1, got ({j}, {k})")));
    }
    if !is_prime(p) {
        return Err(Error::invalid(format!("{p} is not prime")));
    }
    if !tau.is_finite() {
        return Err(Error::invalid(format!("tau must be finite, got {tau}")));
    }
    let (ja, ka) = (j.unsigned_abs(), k.unsigned_abs());
    // theta mod 2 pi from (tau ln p) mod (2 pi |k|)
    let x = DoubleDouble::from_f64(tau) * ln_dd(p);
    let period = dd::TWO_PI.mul_f64(ka as f64);
    let turns = (x / period).to_f64().floor();
    let theta = (x - period.mul_f64(turns)).div_f64(ka as f64);
    let chord = |n: u64| {
        let (s, _) = theta.mul_f64(n as f64 / 2.0).sin_cos();
        2.0 * s.to_f64().abs()
    };
    let geometric = |n: u64| {
        let (mut re, mut im) = (DoubleDouble::ZERO, DoubleDouble::ZERO);
        for m in 0..n {
            let (s, c) = theta.mul_f64(m as f64).sin_cos();
            re = re + c;
            im = im + s;
        }
        re.to_f64().hypot(im.to_f64())
    };
    Ok(LiftParts {
        theta: theta.to_f64(),
        chord_j: chord(ja),
        chord_k: chord(ka),
        numerator: geometric(ja),
        denominator: geometric(ka),
    })
}

/// The query whose conditions imply `|e^{i j tau ln p} - 1| < delta` and
/// `|e^{i k tau ln p} - 1| < delta`: every threshold is divided by
/// `max(|j|, |k|)`, using `|e^{imx} - 1| <= |m| |e^{ix} - 1|`.
pub fn rational_condition_transfer(j: i64, k: i64, q: &KroneckerQuery) -> Result<KroneckerQuery> {
    if j == 0 || k == 0 || j.gcd(&k) != 1 {
        return Err(Error::invalid(format!("need coprime nonzero (j, k), got ({j}, {k})")));
    }
    q.validate()?;
    let scale = j.unsigned_abs().max(k.unsigned_abs()) as f64;
    Ok(KroneckerQuery {
        primes: q.primes.clone(),
        delta: q.delta / scale,
        extra_targets: q
            .extra_targets
            .iter()
            .map(|x| ExtraTarget { delta: x.delta / scale, ..*x })
            .collect(),
    })
}

/// `|e^{i tau ln a} - 1|` for `ln a = sum alpha_p ln p`, and the bound implied
/// by the per-prime conditions at `tau`.
///
/// With integer exponents the bound is `delta * sum |alpha|`. A fractional
/// exponent `a/b` needs the principal branch (the winding number of
/// `tau ln p` divisible by `b`); the bound is then the arc form
/// `sum |alpha| * 2 arcsin(delta / 2)`.
pub fn combination_bound_check(target: &Factorization, tau: f64, delta: f64) -> Result<(f64, f64)> {
    check_delta(delta)?;
    if !tau.is_finite() {
        return Err(Error::invalid(format!("tau must be finite, got {tau}")));
    }
    let theta = arc(delta);
    let mut total = DoubleDouble::ZERO;
    for &(p, alpha) in target.entries() {
        let x = DoubleDouble::from_f64(tau) * ln_dd(p);
        let r = x.rem_two_pi();
        if !(r.to_f64().abs() < theta) {
            return Err(Error::PreconditionFailed {
                prime: p,
                detail: format!("|exp(i tau ln {p}) - 1| = {} >= {delta}", 2.0 * (r.to_f64() / 2.0).sin().abs()),
            });
        }
        let b = *alpha.denom();
        if b != 1 {
            let winding = ((x - r) / dd::TWO_PI).to_f64().round() as i64;
            if winding.rem_euclid(b) != 0 {
                return Err(Error::PreconditionFailed {
                    prime: p,
                    detail: format!("winding number {winding} of tau ln {p} is not divisible by {b}"),
                });
            }
        }
        total = total + r.mul_f64(*alpha.numer() as f64).div_f64(b as f64);
    }
    let phase = total.rem_two_pi().to_f64();
    let achieved = 2.0 * (phase / 2.0).sin().abs();
    let bound = if target.has_integer_exponents() {
        delta * target.exponent_l1()
    } else {
        target.entries().iter().map(|&(_, a)| rational_to_f64(a).abs()).sum::<f64>() * theta
    };
    Ok((achieved, bound))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64;

    fn query(primes: &[u64], delta: f64) -> KroneckerQuery {
        KroneckerQuery::new(primes.to_vec(), delta).unwrap()
    }

    #[test]
    fn validation() {
        assert!(KroneckerQuery::new(vec![2, 3], 0.0).is_err());
        assert!(KroneckerQuery::new(vec![2, 3], 2.5).is_err());
        assert!(KroneckerQuery::new(vec![2, 2], 0.5).is_err());
        assert!(KroneckerQuery::new(vec![4], 0.5).is_err());
        assert!(KroneckerQuery::new(vec![2], 2.0).is_ok());
    }

    #[test]
    fn single_prime_scan() {
        let q = query(&[2], 0.5);
        let step = q.max_step().unwrap();
        let ws = find_tau_scan(&q, 100.0, step).unwrap();
        let period = 2.0 * PI / 2f64.ln();
        let half = 2.0 * (0.25f64).asin() / 2f64.ln();
        assert!((ws[0].tau_lo - 0.0).abs() < 1e-12);
        for (m, w) in ws.iter().enumerate().skip(1).filter(|(_, w)| w.tau_hi < 100.0) {
            assert!(w.certified);
            assert!((w.midpoint() - period * m as f64).abs() < step / 50.0);
            assert!((w.width() / 2.0 - half).abs() < step / 50.0);
        }
        assert_eq!(ws.len(), 1 + ((100.0 + half) / period).floor() as usize);
    }

    #[test]
    fn vacuous_scan() {
        let q = query(&[2, 3], 2.0);
        let ws = find_tau_scan(&q, 50.0, q.max_step().unwrap()).unwrap();
        assert_eq!(ws.len(), 1);
        assert_eq!((ws[0].tau_lo, ws[0].tau_hi), (0.0, 50.0));
    }

    #[test]
    fn coarse_step_rejected() {
        let q = query(&[2, 3], 0.5);
        let step = q.max_step().unwrap();
        assert!(find_tau_scan(&q, 10.0, step * 1.01).is_err());
        assert!(find_tau_scan(&q, 10.0, step).is_ok());
    }

    #[test]
    fn lattice_single_prime() {
        let w = find_tau_lattice(&query(&[2], 0.3), 100.0).unwrap();
        assert!(w.certified);
        assert!(w.contains(2.0 * PI / 2f64.ln()));
    }

    #[test]
    fn lattice_two_primes_matches_scan() {
        let q = query(&[2, 3], 0.3);
        let w = find_tau_lattice(&q, 1e4).unwrap();
        assert!(w.certified && w.tau_hi <= 1e4 && w.tau_lo > 0.0);
        let scan = find_tau_scan(&q, w.tau_hi + 1.0, q.max_step().unwrap()).unwrap();
        let first = scan.iter().find(|s| s.tau_lo > 0.0).unwrap();
        assert!(scan.iter().any(|s| s.tau_lo < w.tau_hi && w.tau_lo < s.tau_hi));
        assert!(w.tau_lo >= first.tau_lo - 1e-3);
    }

    #[test]
    fn density_closed_form() {
        assert!((theoretical_density(&query(&[2], 2.0)) - 1.0).abs() < 1e-15);
        assert!((theoretical_density(&query(&[2], 2f64.sqrt())) - 0.5).abs() < 1e-15);
        let d = theoretical_density(&query(&[2, 3, 5], 0.5));
        assert!((d - 0.0041625).abs() < 1e-6, "{d}");
    }

    #[test]
    fn lift_examples() {
        let (l, r) = rational_lift_check(1, 1, 3.7, 5).unwrap();
        assert_eq!(l, r);
        let tau = PI / 3.0 / 2f64.ln();
        let (l, r) = rational_lift_check(2, 1, tau, 2).unwrap();
        assert!((l - 3f64.sqrt()).abs() < 1e-14);
        assert!((r - 3f64.sqrt()).abs() < 1e-14);
        // theta = 2 pi / 3 is a nontrivial cube root of unity
        let tau = 2.0 * PI / 2f64.ln();
        assert!(matches!(rational_lift_check(1, 3, tau, 2), Err(Error::SingularDirection { .. })));
        assert!(rational_lift_check(2, 4, 1.0, 2).is_err());
    }

    #[test]
    fn transfer_thresholds() {
        let q = query(&[2, 3], 0.4);
        assert_eq!(rational_condition_transfer(1, 1, &q).unwrap(), q);
        assert!((rational_condition_transfer(2, 1, &q).unwrap().delta - 0.2).abs() < 1e-15);
        assert!((rational_condition_transfer(-1, 3, &q).unwrap().delta - 0.4 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn combination_examples() {
        let q = query(&[2, 3], 0.3);
        let w = find_tau_lattice(&q, 1e4).unwrap();
        let six = Factorization::new(vec![(2, Rational64::from(1)), (3, Rational64::from(1))]).unwrap();
        let (a, b) = combination_bound_check(&six, w.midpoint(), 0.3).unwrap();
        assert!(a < b && (b - 0.6).abs() < 1e-15);
        let one = Factorization::new(vec![]).unwrap();
        assert_eq!(combination_bound_check(&one, 5.0, 0.3).unwrap(), (0.0, 0.0));
        let bad = combination_bound_check(&six, 1.0, 0.3);
        assert!(matches!(bad, Err(Error::PreconditionFailed { prime: 2, .. })));
    }

    #[test]
    fn intersection() {
        let got = intersect(&[(0.0, 5.0)], &[(-1.0, 1.0), (2.0, 3.0), (4.5, 9.0)]);
        assert_eq!(got, vec![(0.0, 1.0), (2.0, 3.0), (4.5, 5.0)]);
        assert!(intersect(&[(0.0, 1.0)], &[(1.0, 2.0)]).is_empty());
    }
}
