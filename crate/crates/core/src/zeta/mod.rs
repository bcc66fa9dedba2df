//! Evaluation of `zeta(s)`, truncated and twisted Euler products, and tail
//! bounds for the logarithm of the Euler product.
//!
//! `zeta` uses Euler–Maclaurin summation with a user-set number of
//! correction terms. For `Re(s) > 1` a plain Dirichlet sum with an integral
//! tail bound is used instead whenever it needs fewer terms, which is the
//! case at very large heights.

pub mod bernoulli;
mod euler;
mod ext;
mod grid;
mod rect;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dd::DoubleDouble;
use crate::error::{Error, Result};

pub use euler::{choose_truncation, euler_product, log_tail_bound, EulerGrid};
pub use rect::{sup_on_grid, CompactRect, GridSup, Region};

pub(crate) use grid::{dirichlet_kernel, ln_dd};
pub(crate) use rect::grid_max;

/// Arithmetic used for point evaluations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum Precision {
    /// Binary64 with double-double phase reduction where needed.
    Double,
    /// Fixed-point big-integer arithmetic with `mantissa_bits` fractional bits.
    Extended { mantissa_bits: u32 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvalConfig {
    pub target_abs_error: f64,
    pub max_terms: usize,
    pub em_order: usize,
    pub precision: Precision,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            target_abs_error: 1e-10,
            max_terms: 50_000_000,
            em_order: 12,
            precision: Precision::Double,
        }
    }
}

impl EvalConfig {
    pub fn with_target(mut self, target_abs_error: f64) -> Self {
        self.target_abs_error = target_abs_error;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.target_abs_error > 0.0) || !self.target_abs_error.is_finite() {
            return Err(Error::invalid(format!(
                "target_abs_error must be positive, got {}",
                self.target_abs_error
            )));
        }
        if self.em_order == 0 || self.em_order > bernoulli::MAX_ORDER {
            return Err(Error::invalid(format!(
                "em_order must be in 1..={}, got {}",
                bernoulli::MAX_ORDER,
                self.em_order
            )));
        }
        if self.max_terms == 0 {
            return Err(Error::invalid("max_terms must be >= 1"));
        }
        if let Precision::Extended { mantissa_bits } = self.precision {
            if !(64..=8192).contains(&mantissa_bits) {
                return Err(Error::invalid(format!(
                    "mantissa_bits must be in 64..=8192, got {mantissa_bits}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Route {
    Direct,
    EulerMaclaurin,
}

/// Summation plan shared by every node of a grid.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Plan {
    pub route: Route,
    /// Euler–Maclaurin cut `M`, or the number of direct terms.
    pub cut: u64,
    pub order: usize,
    /// Worst-case truncation bound over the planned nodes.
    #[cfg_attr(not(test), allow(dead_code))]
    pub bound: f64,
}

impl Plan {
    pub fn sum_len(&self) -> u64 {
        match self.route {
            Route::Direct => self.cut,
            Route::EulerMaclaurin => self.cut - 1,
        }
    }
}

/// `ln` of the constant `C` in the remainder bound `C * M^{-(sigma + 2p + 1)}`.
fn em_log_coeff(s: Complex64, p: usize) -> f64 {
    let b = bernoulli::scaled_table()[p + 1].abs().ln();
    let mut l = b - (s.re + 2.0 * p as f64 + 1.0).ln();
    for i in 0..2 * p + 2 {
        l += (s + i as f64).norm().ln();
    }
    l
}

fn em_bound(s: Complex64, p: usize, m: f64) -> f64 {
    (em_log_coeff(s, p) - (s.re + 2.0 * p as f64 + 1.0) * m.ln()).exp()
}

fn em_cut(s: Complex64, p: usize, eps: f64) -> f64 {
    ((em_log_coeff(s, p) - eps.ln()) / (s.re + 2.0 * p as f64 + 1.0))
        .exp()
        .ceil()
        .max(1.0)
}

fn direct_bound(sigma: f64, m: f64) -> f64 {
    if sigma <= 1.0 {
        f64::INFINITY
    } else {
        m.powf(1.0 - sigma) / (sigma - 1.0)
    }
}

fn direct_cut(sigma: f64, eps: f64) -> f64 {
    if sigma <= 1.0 {
        f64::INFINITY
    } else {
        (eps * (sigma - 1.0)).powf(1.0 / (1.0 - sigma)).ceil().max(1.0)
    }
}

fn check_node(s: Complex64) -> Result<()> {
    if !(s.re.is_finite() && s.im.is_finite()) {
        return Err(Error::invalid(format!("non-finite argument {s}")));
    }
    if s.re <= 0.0 {
        return Err(Error::invalid(format!("need Re(s) > 0, got s = {s}")));
    }
    if s == Complex64::new(1.0, 0.0) {
        return Err(Error::Pole);
    }
    Ok(())
}

/// Cheapest plan meeting half of the target at every node (the other half is
/// left for rounding). Errors come back with the offending node.
pub(crate) fn plan(
    nodes: &[Complex64],
    cfg: &EvalConfig,
) -> std::result::Result<Plan, (Error, Complex64)> {
    let eps = cfg.target_abs_error / 2.0;
    let p = cfg.em_order;
    let mut m_em = (1.0, nodes[0]);
    let mut m_dir = (1.0, nodes[0]);
    for &s in nodes {
        check_node(s).map_err(|e| (e, s))?;
        let e = em_cut(s, p, eps);
        if e > m_em.0 {
            m_em = (e, s);
        }
        let d = direct_cut(s.re, eps);
        if d > m_dir.0 {
            m_dir = (d, s);
        }
    }
    let (route, (cut, worst)) = if m_dir.0 <= m_em.0 {
        (Route::Direct, m_dir)
    } else {
        (Route::EulerMaclaurin, m_em)
    };
    let worst_bound = |route: Route, m: f64| {
        nodes
            .iter()
            .map(|&s| match route {
                Route::Direct => direct_bound(s.re, m),
                Route::EulerMaclaurin => em_bound(s, p, m),
            })
            .fold(0.0, f64::max)
    };
    let limit = cfg.max_terms as f64;
    if cut > limit {
        let achieved = worst_bound(Route::Direct, limit).min(worst_bound(Route::EulerMaclaurin, limit));
        return Err((
            Error::AccuracyExhausted {
                achieved,
                target: cfg.target_abs_error,
                terms: cfg.max_terms,
            },
            worst,
        ));
    }
    Ok(Plan {
        route,
        cut: cut as u64,
        order: p,
        bound: worst_bound(route, cut),
    })
}

/// `zeta(s)` to within `cfg.target_abs_error`, for `Re(s) > 0`, `s != 1`.
pub fn zeta(s: Complex64, cfg: &EvalConfig) -> Result<Complex64> {
    zeta_shifted(s, DoubleDouble::ZERO, cfg)
}

/// `zeta(s + i shift)` with the shift carried in double-double, so that
/// shifts such as `k * tau` for huge `tau` lose nothing before reduction.
pub fn zeta_shifted(s: Complex64, shift: DoubleDouble, cfg: &EvalConfig) -> Result<Complex64> {
    cfg.validate()?;
    let rect = CompactRect::point(s);
    zeta_terms_on_grid(&rect, &[(shift, 1.0)], cfg).map_err(|e| match e {
        Error::EvaluationFailed { source, .. } => *source,
        other => other,
    })
    .map(|v| v[0])
}

/// `zeta(s + i shift)` at every node of `rect` (sigma-major order).
pub fn zeta_on_grid(rect: &CompactRect, shift: DoubleDouble, cfg: &EvalConfig) -> Result<Vec<Complex64>> {
    zeta_terms_on_grid(rect, &[(shift, 1.0)], cfg)
}

/// `zeta(s + i a) - zeta(s + i b)` at every node of `rect`.
pub fn zeta_diff_on_grid(
    rect: &CompactRect,
    a: DoubleDouble,
    b: DoubleDouble,
    cfg: &EvalConfig,
) -> Result<Vec<Complex64>> {
    if a == b {
        rect.validate()?;
        cfg.validate()?;
        return Ok(vec![Complex64::new(0.0, 0.0); rect.node_count()]);
    }
    zeta_terms_on_grid(rect, &[(a, 1.0), (b, -1.0)], cfg)
}

/// Grid sup of `|zeta(s + i a) - zeta(s + i b)|`.
pub fn sup_diff_on_grid(
    rect: &CompactRect,
    a: DoubleDouble,
    b: DoubleDouble,
    cfg: &EvalConfig,
) -> Result<f64> {
    let v = zeta_diff_on_grid(rect, a, b, cfg)?;
    Ok(grid_max(&v).1)
}

/// `sum_j c_j zeta(s + i shift_j)` at every node of `rect`.
pub(crate) fn zeta_terms_on_grid(
    rect: &CompactRect,
    terms: &[(DoubleDouble, f64)],
    cfg: &EvalConfig,
) -> Result<Vec<Complex64>> {
    cfg.validate()?;
    rect.validate()?;
    let base = rect.nodes();
    let shifted: Vec<Complex64> = terms
        .iter()
        .flat_map(|(sh, _)| base.iter().map(move |s| Complex64::new(s.re, s.im + sh.to_f64())))
        .collect();
    let plan = plan(&shifted, cfg).map_err(|(e, node)| Error::EvaluationFailed {
        node,
        source: Box::new(e),
    })?;

    if let Precision::Extended { mantissa_bits } = cfg.precision {
        return Ok(base
            .par_iter()
            .map(|s| {
                terms
                    .iter()
                    .map(|&(sh, c)| {
                        let t = DoubleDouble::from_f64(s.im) + sh;
                        ext::zeta_extended(s.re, t, &plan, mantissa_bits) * c
                    })
                    .sum()
            })
            .collect());
    }

    let mut out = dirichlet_kernel(rect, terms, None, plan.sum_len());
    if plan.route == Route::EulerMaclaurin {
        for (v, s) in out.iter_mut().zip(&base) {
            for &(sh, c) in terms {
                let t = DoubleDouble::from_f64(s.im) + sh;
                *v += grid::em_tail(s.re, t, plan.cut, plan.order) * c;
            }
        }
    }
    Ok(out)
}
