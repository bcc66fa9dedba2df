//! Vectorized partial sums of Dirichlet series over a rectangle grid.
//!
//! For node `(a, b)` with `s = sigma_min + a h_s + i (t_min + b h_t + shift)`
//! the term `n^-s` factors as
//! `n^-(sigma_min + i (t_min + shift)) * (n^-h_s)^a * (n^-i h_t)^b`,
//! so one transcendental evaluation per `n` serves the whole grid.

use std::sync::{Arc, OnceLock, RwLock};

use num_complex::Complex64;
use rayon::prelude::*;

use super::bernoulli::scaled_table;
use super::rect::CompactRect;
use crate::dd::DoubleDouble;

/// Above this value of `|t| ln n` phases are reduced in double-double.
const DD_PHASE_THRESHOLD: f64 = 1e4;

const CHUNK: u64 = 2048;

const LN_CACHE_MAX: u64 = 1 << 23;

/// Double-double `ln n` for `n = 0..len` (entry 0 unused).
pub(crate) fn ln_table(len: u64) -> Arc<Vec<DoubleDouble>> {
    static TABLE: OnceLock<RwLock<Arc<Vec<DoubleDouble>>>> = OnceLock::new();
    let lock = TABLE.get_or_init(|| RwLock::new(Arc::new(vec![DoubleDouble::ZERO; 2])));
    if len > LN_CACHE_MAX {
        return Arc::new(ln_range(0, len));
    }
    {
        let t = lock.read().expect("ln table lock");
        if t.len() as u64 >= len {
            return Arc::clone(&t);
        }
    }
    let mut t = lock.write().expect("ln table lock");
    let have = t.len() as u64;
    if have < len {
        let target = len.max(2 * have).min(LN_CACHE_MAX.max(len));
        let mut v = Vec::with_capacity(target as usize);
        v.extend_from_slice(&t);
        v.extend(ln_range(have, target));
        *t = Arc::new(v);
    }
    Arc::clone(&t)
}

fn ln_range(lo: u64, hi: u64) -> Vec<DoubleDouble> {
    (lo..hi)
        .into_par_iter()
        .map(|n| {
            if n < 2 {
                DoubleDouble::ZERO
            } else {
                ln_dd(n)
            }
        })
        .collect()
}

pub(crate) fn ln_dd(n: u64) -> DoubleDouble {
    DoubleDouble::from_f64(n as f64).ln()
}

/// `e^{-i phase}` where `phase = t * ln n`.
#[inline]
fn neg_phase(t: f64, t_dd: DoubleDouble, ln: f64, ln_dd: Option<&DoubleDouble>) -> Complex64 {
    let ph = match ln_dd {
        Some(l) => (t_dd * *l).rem_two_pi().to_f64(),
        None => t * ln,
    };
    let (s, c) = ph.sin_cos();
    Complex64::new(c, -s)
}

/// `sum_{n=1}^{len} w(n) sum_j c_j n^{-(s + i shift_j)}` at every node of `rect`.
pub(crate) fn dirichlet_kernel(
    rect: &CompactRect,
    terms: &[(DoubleDouble, f64)],
    weight: Option<&(dyn Fn(u64) -> f64 + Sync)>,
    len: u64,
) -> Vec<Complex64> {
    let (gs, gt) = (rect.grid_sigma, rect.grid_t);
    let nodes = gs * gt;
    if len == 0 {
        return vec![Complex64::new(0.0, 0.0); nodes];
    }
    let (hs, ht) = rect.spacing();
    let max_t = terms
        .iter()
        .map(|(sh, _)| {
            let s = sh.to_f64();
            (s + rect.t_min).abs().max((s + rect.t_max).abs())
        })
        .fold(0.0, f64::max);
    let use_dd = max_t * (len as f64).ln() > DD_PHASE_THRESHOLD;
    let lns = use_dd.then(|| ln_table(len + 1));
    let starts: Vec<(f64, DoubleDouble, f64)> = terms
        .iter()
        .map(|&(sh, c)| {
            let t = DoubleDouble::from_f64(rect.t_min) + sh;
            (t.to_f64(), t, c)
        })
        .collect();

    let chunks = len.div_ceil(CHUNK);
    let partials: Vec<Vec<Complex64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = vec![Complex64::new(0.0, 0.0); nodes];
            let lo = c * CHUNK + 1;
            let hi = ((c + 1) * CHUNK).min(len);
            for n in lo..=hi {
                let ln = (n as f64).ln();
                let mut w = (-rect.sigma_min * ln).exp();
                if let Some(f) = weight {
                    w *= f(n);
                    if w == 0.0 {
                        continue;
                    }
                }
                let ln_n = lns.as_ref().map(|t| &t[n as usize]);
                let mut base = Complex64::new(0.0, 0.0);
                for &(t, t_dd, coef) in &starts {
                    base += neg_phase(t, t_dd, ln, ln_n) * coef;
                }
                base *= w;
                if nodes == 1 {
                    acc[0] += base;
                    continue;
                }
                let rs = (-hs * ln).exp();
                let (st, ct) = (ht * ln).sin_cos();
                let rt = Complex64::new(ct, -st);
                let mut row = base;
                for a in 0..gs {
                    let mut v = row;
                    let out = &mut acc[a * gt..(a + 1) * gt];
                    for slot in out.iter_mut() {
                        *slot += v;
                        v *= rt;
                    }
                    row *= rs;
                }
            }
            acc
        })
        .collect();

    let mut out = vec![Complex64::new(0.0, 0.0); nodes];
    for p in partials {
        for (o, v) in out.iter_mut().zip(p) {
            *o += v;
        }
    }
    out
}

/// Euler–Maclaurin tail at cut `m` for `s = sigma + i t`:
/// `M^{1-s}/(s-1) + M^{-s}/2 + sum_{k<=p} B_{2k}/(2k)! (s)_{2k-1} M^{-s-2k+1}`.
pub(crate) fn em_tail(sigma: f64, t: DoubleDouble, m: u64, order: usize) -> Complex64 {
    let s = Complex64::new(sigma, t.to_f64());
    let ln_m = ln_dd(m);
    let phase = (t * ln_m).rem_two_pi().to_f64();
    let m_neg_s = Complex64::from_polar((-sigma * ln_m.to_f64()).exp(), -phase);
    let mf = m as f64;
    let mut out = m_neg_s * mf / (s - 1.0) + m_neg_s * 0.5;
    let table = scaled_table();
    let mut c = s * m_neg_s / mf;
    for (k, &b) in table.iter().enumerate().skip(1).take(order) {
        out += c * b;
        let k = k as f64;
        c = c * (s + (2.0 * k - 1.0)) * (s + 2.0 * k) / (mf * mf);
    }
    out
}
