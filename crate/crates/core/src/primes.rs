//! Prime generation and exact prime factorizations.
//!
//! [`PrimeTable`] holds every prime up to a limit together with its ordinal
//! (`p_1 = 2`, `p_2 = 3`, ...). [`Factorization`] stores `(prime, exponent)`
//! pairs with rational exponents so that both integer factorizations and
//! multiplicative combinations such as `sqrt(2) = 2^(1/2)` share one type.

use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SEGMENT: usize = 1 << 18;

/// All primes up to `limit`, in increasing order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeTable {
    limit: u64,
    primes: Vec<u64>,
}

impl PrimeTable {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    /// `p_n` with 1-based `n`.
    pub fn nth(&self, n: usize) -> Option<u64> {
        n.checked_sub(1).and_then(|i| self.primes.get(i).copied())
    }

    /// Ordinal `n` such that `p_n == p`.
    pub fn index_of(&self, p: u64) -> Option<usize> {
        self.primes.binary_search(&p).ok().map(|i| i + 1)
    }

    pub fn contains(&self, p: u64) -> bool {
        self.primes.binary_search(&p).is_ok()
    }

    /// A table holding at least the first `n` primes.
    pub fn with_count(n: usize) -> PrimeTable {
        let mut limit = nth_prime_upper_bound(n.max(1));
        loop {
            let table = sieve(limit).expect("limit >= 2");
            if table.len() >= n {
                return table;
            }
            limit = limit.saturating_mul(2);
        }
    }

    /// Factor `n` by trial division against this table.
    ///
    /// The table must reach `isqrt(n)`; any cofactor left after dividing out
    /// the table primes is then itself prime.
    pub fn factorize(&self, n: u64) -> Result<Factorization> {
        if n == 0 {
            return Err(Error::invalid("cannot factorize 0"));
        }
        let root = n.isqrt();
        if self.limit < root {
            return Err(Error::invalid(format!(
                "prime table limit {} does not reach sqrt({n})",
                self.limit
            )));
        }
        let mut rest = n;
        let mut entries = Vec::new();
        for &p in &self.primes {
            if p * p > rest {
                break;
            }
            let mut e = 0i64;
            while rest.is_multiple_of(p) {
                rest /= p;
                e += 1;
            }
            if e > 0 {
                entries.push((p, Rational64::from_integer(e)));
            }
        }
        if rest > 1 {
            entries.push((rest, Rational64::from_integer(1)));
        }
        Ok(Factorization { entries })
    }
}

/// A process-wide table holding at least the first `count` primes.
///
/// The table only grows, so repeated calls with small counts are cheap.
pub fn shared_table(count: usize) -> Arc<PrimeTable> {
    static SHARED: OnceLock<RwLock<Arc<PrimeTable>>> = OnceLock::new();
    let lock = SHARED.get_or_init(|| RwLock::new(Arc::new(PrimeTable::with_count(1000))));
    {
        let t = lock.read().expect("prime table lock");
        if t.len() >= count {
            return Arc::clone(&t);
        }
    }
    let mut t = lock.write().expect("prime table lock");
    if t.len() < count {
        *t = Arc::new(PrimeTable::with_count(count.max(2 * t.len())));
    }
    Arc::clone(&t)
}

/// Upper bound for `p_n` (Rosser's bound for n >= 6).
pub fn nth_prime_upper_bound(n: usize) -> u64 {
    if n < 6 {
        return 13;
    }
    let x = n as f64;
    (x * (x.ln() + x.ln().ln())).ceil() as u64 + 1
}

/// Sieve of Eratosthenes, segmented so memory stays bounded for large limits.
pub fn sieve(limit: u64) -> Result<PrimeTable> {
    if limit < 2 {
        return Err(Error::invalid(format!("sieve limit must be >= 2, got {limit}")));
    }
    let root = limit.isqrt();
    let base = simple_sieve(root.max(2));
    let mut primes: Vec<u64> = Vec::with_capacity(prime_count_estimate(limit));

    let mut low = 2u64;
    let mut marks = vec![true; SEGMENT];
    while low <= limit {
        let high = (low + SEGMENT as u64 - 1).min(limit);
        let span = (high - low + 1) as usize;
        marks[..span].fill(true);
        for &p in &base {
            if p * p > high {
                break;
            }
            let mut start = (low.div_ceil(p) * p).max(p * p);
            while start <= high {
                marks[(start - low) as usize] = false;
                start += p;
            }
        }
        primes.extend(
            marks[..span]
                .iter()
                .enumerate()
                .filter(|(_, &m)| m)
                .map(|(i, _)| low + i as u64),
        );
        low = high + 1;
    }
    Ok(PrimeTable { limit, primes })
}

fn simple_sieve(limit: u64) -> Vec<u64> {
    let n = limit as usize;
    let mut is_prime = vec![true; n + 1];
    is_prime[0] = false;
    if n >= 1 {
        is_prime[1] = false;
    }
    let mut i = 2;
    while i * i <= n {
        if is_prime[i] {
            let mut j = i * i;
            while j <= n {
                is_prime[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    is_prime
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(i, _)| i as u64)
        .collect()
}

fn prime_count_estimate(limit: u64) -> usize {
    let x = limit as f64;
    if x < 17.0 {
        return 8;
    }
    (1.26 * x / x.ln()) as usize
}

/// Factor `n` with a table built on the fly.
pub fn factorize(n: u64) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::invalid("cannot factorize 0"));
    }
    let table = sieve(n.isqrt().max(2))?;
    table.factorize(n)
}

/// A product `prod p^e` over distinct primes with nonzero rational exponents.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Factorization {
    entries: Vec<(u64, Rational64)>,
}

impl Factorization {
    /// Builds a factorization, sorting by prime and rejecting duplicates,
    /// zero exponents and composite bases.
    pub fn new(mut entries: Vec<(u64, Rational64)>) -> Result<Self> {
        entries.sort_by_key(|&(p, _)| p);
        for w in entries.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::invalid(format!("prime {} listed twice", w[0].0)));
            }
        }
        for &(p, e) in &entries {
            if e.is_zero() {
                return Err(Error::invalid(format!("zero exponent for prime {p}")));
            }
            if !is_prime(p) {
                return Err(Error::invalid(format!("{p} is not prime")));
            }
        }
        Ok(Factorization { entries })
    }

    pub fn entries(&self) -> &[(u64, Rational64)] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn has_integer_exponents(&self) -> bool {
        self.entries.iter().all(|(_, e)| e.is_integer())
    }

    /// The integer `prod p^e`, if every exponent is a nonnegative integer
    /// and the product fits in a `u64`.
    pub fn reconstruct(&self) -> Option<u64> {
        let mut acc: u64 = 1;
        for &(p, e) in &self.entries {
            if !e.is_integer() || e.is_negative() {
                return None;
            }
            let e = e.to_integer().to_u32()?;
            acc = acc.checked_mul(p.checked_pow(e)?)?;
        }
        Some(acc)
    }

    /// `sum e * ln p`.
    pub fn ln(&self) -> f64 {
        self.entries
            .iter()
            .map(|&(p, e)| rational_to_f64(e) * (p as f64).ln())
            .sum()
    }

    /// `sum |e|`.
    pub fn exponent_l1(&self) -> f64 {
        self.entries.iter().map(|&(_, e)| rational_to_f64(e.abs())).sum()
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return write!(f, "1");
        }
        for (i, (p, e)) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, " * ")?;
            }
            if *e == Rational64::from_integer(1) {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^({e})")?;
            }
        }
        Ok(())
    }
}

pub(crate) fn rational_to_f64(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Deterministic trial-division primality check.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_even() || n.is_multiple_of(3) {
        return false;
    }
    let mut d = 5u64;
    while d * d <= n {
        if n.is_multiple_of(d) || n.is_multiple_of(d + 2) {
            return false;
        }
        d += 6;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_sieves() {
        assert_eq!(sieve(10).unwrap().primes(), &[2, 3, 5, 7]);
        assert_eq!(sieve(2).unwrap().primes(), &[2]);
        assert!(sieve(1).is_err());
        assert!(sieve(0).is_err());
    }

    #[test]
    fn ordinals() {
        let t = sieve(100).unwrap();
        assert_eq!(t.nth(1), Some(2));
        assert_eq!(t.nth(25), Some(97));
        assert_eq!(t.nth(0), None);
        assert_eq!(t.index_of(97), Some(25));
        assert_eq!(t.index_of(91), None);
        for (i, &p) in t.primes().iter().enumerate() {
            assert_eq!(t.index_of(p), Some(i + 1));
        }
    }

    #[test]
    fn segment_boundary() {
        // crosses several segments; compare against the unsegmented sieve
        let limit = 3 * SEGMENT as u64 + 17;
        assert_eq!(sieve(limit).unwrap().primes(), simple_sieve(limit).as_slice());
    }

    #[test]
    fn with_count_reaches_requested_length() {
        for n in [1, 5, 6, 25, 1000] {
            assert!(PrimeTable::with_count(n).len() >= n);
        }
        assert_eq!(PrimeTable::with_count(1000).nth(1000), Some(7919));
    }

    #[test]
    fn factorize_examples() {
        let one = |e| Rational64::from_integer(e);
        assert_eq!(factorize(12).unwrap().entries(), &[(2, one(2)), (3, one(1))]);
        assert!(factorize(1).unwrap().is_empty());
        assert_eq!(factorize(97).unwrap().entries(), &[(97, one(1))]);
        assert!(factorize(0).is_err());
    }

    #[test]
    fn table_too_small_for_factorization() {
        let t = sieve(10).unwrap();
        assert!(t.factorize(1_000_003).is_err());
        assert_eq!(t.factorize(98).unwrap().reconstruct(), Some(98));
    }

    #[test]
    fn rational_factorization() {
        let half = Rational64::new(1, 2);
        let f = Factorization::new(vec![(2, half)]).unwrap();
        assert!((f.ln() - 2f64.sqrt().ln()).abs() < 1e-15);
        assert_eq!(f.reconstruct(), None);
        assert!(Factorization::new(vec![(4, half)]).is_err());
        assert!(Factorization::new(vec![(2, half), (2, half)]).is_err());
        assert!(Factorization::new(vec![(3, Rational64::from_integer(0))]).is_err());
    }

    #[test]
    fn primality() {
        let t = sieve(2000).unwrap();
        for n in 0..2000 {
            assert_eq!(is_prime(n), t.contains(n), "n = {n}");
        }
    }
}
