//! Which pair of shifted zeta values a scan compares.

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Denominator bound for the small-rational check on irrational targets.
pub const DEFAULT_HEIGHT: i64 = 1000;

/// Comparison `zeta(s + i a tau)` vs `zeta(s + i b tau)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RecurrenceTarget {
    /// Shifts `j tau` and `k tau` for coprime nonzero integers.
    Rational { j: i64, k: i64 },
    /// Shifts `tau` and `d tau` for an irrational `d`; `declared_a_d` lists
    /// the primes whose logarithms are not independent of `{d log p}`.
    Irrational {
        d: f64,
        #[serde(default)]
        declared_a_d: Vec<u64>,
    },
    /// Shifts `tau` and `d tau` for any real `d`.
    Real { d: f64 },
}

impl RecurrenceTarget {
    pub fn rational(j: i64, k: i64) -> Result<Self> {
        let t = RecurrenceTarget::Rational { j, k };
        t.validate()?;
        Ok(t)
    }

    /// Checks the invariants; returns warnings that do not make the target
    /// unusable (an "irrational" `d` close to a small rational).
    pub fn validate(&self) -> Result<Vec<String>> {
        match *self {
            RecurrenceTarget::Rational { j, k } => {
                if j == 0 || k == 0 {
                    return Err(Error::invalid(format!("j and k must be nonzero, got ({j}, {k})")));
                }
                if j.gcd(&k) != 1 {
                    return Err(Error::invalid(format!("j = {j} and k = {k} must be coprime")));
                }
                Ok(Vec::new())
            }
            RecurrenceTarget::Irrational { d, ref declared_a_d } => {
                if !d.is_finite() || d == 0.0 {
                    return Err(Error::invalid(format!("irrational d must be finite and nonzero, got {d}")));
                }
                if let Some(&p) = declared_a_d.iter().find(|&&p| !crate::primes::is_prime(p)) {
                    return Err(Error::invalid(format!("declared A_d entry {p} is not prime")));
                }
                Ok(small_rational_near(d, DEFAULT_HEIGHT)
                    .map(|(p, q)| {
                        format!("d = {d} is within 1e-12 of {p}/{q}; irrationality cannot be certified")
                    })
                    .into_iter()
                    .collect())
            }
            RecurrenceTarget::Real { d } => {
                if !d.is_finite() {
                    return Err(Error::invalid(format!("d must be finite, got {d}")));
                }
                Ok(Vec::new())
            }
        }
    }

    /// Multipliers `(a, b)` of `tau` in the two shifts.
    pub fn multipliers(&self) -> (f64, f64) {
        match *self {
            RecurrenceTarget::Rational { j, k } => (j as f64, k as f64),
            RecurrenceTarget::Irrational { d, .. } | RecurrenceTarget::Real { d } => (1.0, d),
        }
    }

    /// True when both shifts coincide, so the difference vanishes identically.
    pub fn is_trivial(&self) -> bool {
        let (a, b) = self.multipliers();
        a == b
    }

    /// The target with the two shifts exchanged, when that is expressible.
    pub fn swapped(&self) -> Option<Self> {
        match *self {
            RecurrenceTarget::Rational { j, k } => Some(RecurrenceTarget::Rational { j: k, k: j }),
            _ => None,
        }
    }
}

/// First continued-fraction convergent `p/q` with `q <= height` lying within
/// `1e-12 * max(1, |x|)` of `x`.
pub fn small_rational_near(x: f64, height: i64) -> Option<(i64, i64)> {
    let tol = 1e-12 * x.abs().max(1.0);
    let (mut p0, mut q0, mut p1, mut q1) = (0i64, 1i64, 1i64, 0i64);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a.abs() > 1e15 {
            break;
        }
        let a = a as i64;
        let (p2, q2) = (a.checked_mul(p1)?.checked_add(p0)?, a.checked_mul(q1)?.checked_add(q0)?);
        if q2 > height {
            break;
        }
        if (x - p2 as f64 / q2 as f64).abs() <= tol {
            return Some((p2, q2));
        }
        let frac = r - a as f64;
        if frac == 0.0 {
            break;
        }
        r = 1.0 / frac;
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
    }
    None
}
