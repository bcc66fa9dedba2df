use num_complex::Complex64;

use super::rect::CompactRect;
use super::EvalConfig;
use crate::error::{Error, Result};
use crate::primes::shared_table;
use crate::torus::TorusPoint;

/// Largest truncation `choose_truncation` will consider.
const MAX_TRUNCATION: usize = 50_000_000;

/// `omega(p)^power` for a stored angle.
#[inline]
pub(crate) fn twist(angle: f64, power: i64) -> Complex64 {
    let (s, c) = (angle * power as f64).sin_cos();
    Complex64::new(c, s)
}

/// `prod_{n <= N} (1 - omega(p_n)^power p_n^{-s})^{-1}`.
pub fn euler_product(
    s: Complex64,
    omega: &TorusPoint,
    power: i64,
    n: usize,
    cfg: &EvalConfig,
) -> Result<Complex64> {
    cfg.validate()?;
    if !(s.re > 0.5) {
        return Err(Error::invalid(format!("need Re(s) > 1/2, got s = {s}")));
    }
    if n == 0 || n > omega.len() {
        return Err(Error::invalid(format!(
            "N = {n} must be in 1..={} (support of omega)",
            omega.len()
        )));
    }
    let table = shared_table(n);
    let mut denom = Complex64::new(1.0, 0.0);
    for (&p, &angle) in table.primes()[..n].iter().zip(omega.angles()) {
        let z = (-s * (p as f64).ln()).exp();
        let f = Complex64::new(1.0, 0.0) - twist(angle, power) * z;
        if f.norm() == 0.0 {
            return Err(Error::SingularFactor { prime: p });
        }
        denom *= f;
    }
    Ok(denom.inv())
}

/// Bound on `|sum_{n > N} log(1 - z p_n^{-s})^{-1}|` for `|z| = 1`,
/// `Re(s) >= sigma_min`.
///
/// With `P = p_{N+1}` and `x = p^{-sigma} <= P^{-sigma}`, each term is at
/// most `x / (1 - x)`, and the prime sum is dominated by the integer sum
/// `P^{-sigma} + P^{1-sigma} / (sigma - 1)`.
pub fn log_tail_bound(sigma_min: f64, n: usize) -> Result<f64> {
    if !(sigma_min > 1.0) || !sigma_min.is_finite() {
        return Err(Error::invalid(format!(
            "log_tail_bound needs sigma_min > 1, got {sigma_min}"
        )));
    }
    let p = shared_table(n + 1).nth(n + 1).expect("table holds n + 1 primes") as f64;
    let x = p.powf(-sigma_min);
    Ok((x + p.powf(1.0 - sigma_min) / (sigma_min - 1.0)) / (1.0 - x))
}

/// Smallest `N` with `log_tail_bound(K.sigma_min, N) < eps / 2`.
pub fn choose_truncation(k: &CompactRect, eps: f64) -> Result<usize> {
    k.require_absolute()?;
    if !(eps > 0.0) {
        return Err(Error::invalid(format!("eps must be positive, got {eps}")));
    }
    let ok = |n: usize| log_tail_bound(k.sigma_min, n).map(|b| b < eps / 2.0);
    if ok(1)? {
        return Ok(1);
    }
    let mut hi = 2;
    while !ok(hi)? {
        if hi >= MAX_TRUNCATION {
            return Err(Error::invalid(format!(
                "eps = {eps} needs more than {MAX_TRUNCATION} primes at sigma_min = {}",
                k.sigma_min
            )));
        }
        hi = (hi * 2).min(MAX_TRUNCATION);
    }
    let mut lo = hi / 2;
    // invariant: !ok(lo), ok(hi)
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Powers `p_n^{-s}` cached per grid node, for evaluating many twisted
/// Euler products on the same nodes.
#[derive(Clone, Debug)]
pub struct EulerGrid {
    nodes: Vec<Complex64>,
    primes: Vec<u64>,
    pows: Vec<Complex64>,
}

impl EulerGrid {
    pub fn new(nodes: Vec<Complex64>, n_primes: usize) -> Result<Self> {
        if n_primes == 0 {
            return Err(Error::invalid("need at least one prime"));
        }
        if let Some(s) = nodes.iter().find(|s| !(s.re > 0.5)) {
            return Err(Error::invalid(format!("need Re(s) > 1/2, got s = {s}")));
        }
        let primes = shared_table(n_primes).primes()[..n_primes].to_vec();
        let mut pows = Vec::with_capacity(nodes.len() * n_primes);
        for s in &nodes {
            pows.extend(primes.iter().map(|&p| (-s * (p as f64).ln()).exp()));
        }
        Ok(EulerGrid {
            nodes,
            primes,
            pows,
        })
    }

    pub fn nodes(&self) -> &[Complex64] {
        &self.nodes
    }

    pub fn n_primes(&self) -> usize {
        self.primes.len()
    }

    /// Twisted Euler product at every node, using the first `n_primes` angles.
    pub fn product(&self, angles: &[f64], power: i64) -> Result<Vec<Complex64>> {
        let n = self.primes.len();
        if angles.len() < n {
            return Err(Error::invalid(format!(
                "need {n} angles, got {}",
                angles.len()
            )));
        }
        let w: Vec<Complex64> = angles[..n].iter().map(|&a| twist(a, power)).collect();
        let one = Complex64::new(1.0, 0.0);
        self.pows
            .chunks_exact(n)
            .map(|row| {
                let mut denom = one;
                for (i, (&z, &wi)) in row.iter().zip(&w).enumerate() {
                    let f = one - wi * z;
                    if f.norm() == 0.0 {
                        return Err(Error::SingularFactor {
                            prime: self.primes[i],
                        });
                    }
                    denom *= f;
                }
                Ok(denom.inv())
            })
            .collect()
    }

    /// `product(angles, j) - product(angles, k)`.
    pub fn diff(&self, angles: &[f64], j: i64, k: i64) -> Result<Vec<Complex64>> {
        let a = self.product(angles, j)?;
        let b = self.product(angles, k)?;
        Ok(a.into_iter().zip(b).map(|(x, y)| x - y).collect())
    }
}
