use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which half-plane a rectangle sits in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Region {
    /// `1/2 < sigma_min` and `sigma_max < 1`.
    CriticalStrip,
    /// `sigma_min > 1`.
    Absolute,
    /// Anything else (still valid for evaluation when `sigma_min > 0`).
    Mixed,
}

/// Axis-aligned rectangle `[sigma_min, sigma_max] x [t_min, t_max]` with a
/// sampling grid of `grid_sigma x grid_t` nodes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompactRect {
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub grid_sigma: usize,
    pub grid_t: usize,
}

impl CompactRect {
    pub fn new(
        sigma: (f64, f64),
        t: (f64, f64),
        grid_sigma: usize,
        grid_t: usize,
    ) -> Result<Self> {
        let r = CompactRect {
            sigma_min: sigma.0,
            sigma_max: sigma.1,
            t_min: t.0,
            t_max: t.1,
            grid_sigma,
            grid_t,
        };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        let vals = [self.sigma_min, self.sigma_max, self.t_min, self.t_max];
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("rectangle bounds must be finite"));
        }
        if self.sigma_min > self.sigma_max || self.t_min > self.t_max {
            return Err(Error::invalid(format!(
                "empty rectangle [{}, {}] x [{}, {}]",
                self.sigma_min, self.sigma_max, self.t_min, self.t_max
            )));
        }
        if self.grid_sigma == 0 || self.grid_t == 0 {
            return Err(Error::invalid("grid counts must be >= 1"));
        }
        Ok(())
    }

    pub fn region(&self) -> Region {
        if self.sigma_min > 1.0 {
            Region::Absolute
        } else if self.sigma_min > 0.5 && self.sigma_max < 1.0 {
            Region::CriticalStrip
        } else {
            Region::Mixed
        }
    }

    pub fn require_absolute(&self) -> Result<()> {
        self.validate()?;
        if self.region() != Region::Absolute {
            return Err(Error::invalid(format!(
                "rectangle must lie in Re(s) > 1, got sigma_min = {}",
                self.sigma_min
            )));
        }
        Ok(())
    }

    /// Grid spacing `(h_sigma, h_t)`; zero along an axis with one node.
    pub fn spacing(&self) -> (f64, f64) {
        let h = |lo: f64, hi: f64, n: usize| {
            if n > 1 {
                (hi - lo) / (n - 1) as f64
            } else {
                0.0
            }
        };
        (
            h(self.sigma_min, self.sigma_max, self.grid_sigma),
            h(self.t_min, self.t_max, self.grid_t),
        )
    }

    pub fn node_count(&self) -> usize {
        self.grid_sigma * self.grid_t
    }

    /// Node `(a, b)`: `a` indexes sigma, `b` indexes t.
    pub fn node(&self, a: usize, b: usize) -> Complex64 {
        let (hs, ht) = self.spacing();
        Complex64::new(self.sigma_min + a as f64 * hs, self.t_min + b as f64 * ht)
    }

    /// All nodes, sigma-major (`index = a * grid_t + b`).
    pub fn nodes(&self) -> Vec<Complex64> {
        (0..self.grid_sigma)
            .flat_map(|a| (0..self.grid_t).map(move |b| self.node(a, b)))
            .collect()
    }

    /// The same rectangle with each grid interval split into `factor` parts,
    /// so every original node is also a node of the result.
    pub fn refined(&self, factor: usize) -> CompactRect {
        let f = factor.max(1);
        let g = |n: usize| if n > 1 { (n - 1) * f + 1 } else { n };
        CompactRect {
            grid_sigma: g(self.grid_sigma),
            grid_t: g(self.grid_t),
            ..*self
        }
    }

    /// A single-node rectangle at `s`.
    pub fn point(s: Complex64) -> CompactRect {
        CompactRect {
            sigma_min: s.re,
            sigma_max: s.re,
            t_min: s.im,
            t_max: s.im,
            grid_sigma: 1,
            grid_t: 1,
        }
    }
}

/// Grid maximum of `|f|` with the spacing needed for a Lipschitz margin.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSup {
    pub sup: f64,
    pub argmax: Complex64,
    pub h_sigma: f64,
    pub h_t: f64,
}

/// Maximum of `|f(s)|` over the grid of `k`.
///
/// Nodes are evaluated in parallel; ties resolve to the first node in
/// sigma-major order, so the result does not depend on scheduling.
pub fn sup_on_grid<F>(f: F, k: &CompactRect) -> Result<GridSup>
where
    F: Fn(Complex64) -> Result<Complex64> + Sync,
{
    k.validate()?;
    if k.grid_sigma < 2 || k.grid_t < 2 {
        return Err(Error::invalid("sup_on_grid needs at least 2 nodes per axis"));
    }
    if k.sigma_min == k.sigma_max || k.t_min == k.t_max {
        return Err(Error::invalid("sup_on_grid needs a rectangle with nonzero extent"));
    }
    let nodes = k.nodes();
    let values = nodes
        .par_iter()
        .map(|&s| {
            f(s).map_err(|e| Error::EvaluationFailed {
                node: s,
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let (h_sigma, h_t) = k.spacing();
    let (idx, sup) = grid_max(&values);
    Ok(GridSup {
        sup,
        argmax: nodes[idx],
        h_sigma,
        h_t,
    })
}

/// Index and value of the largest modulus (first one on ties).
pub(crate) fn grid_max(values: &[Complex64]) -> (usize, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, v) in values.iter().enumerate() {
        let m = v.norm();
        if m > best.1 || m.is_nan() {
            best = (i, m);
            if m.is_nan() {
                break;
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regions() {
        let r = |a, b| CompactRect::new((a, b), (0.0, 1.0), 2, 2).unwrap().region();
        assert_eq!(r(1.5, 2.0), Region::Absolute);
        assert_eq!(r(0.6, 0.9), Region::CriticalStrip);
        assert_eq!(r(0.6, 1.2), Region::Mixed);
        assert_eq!(r(0.5, 0.9), Region::Mixed);
    }

    #[test]
    fn rejects_bad_rectangles() {
        assert!(CompactRect::new((2.0, 1.0), (0.0, 1.0), 2, 2).is_err());
        assert!(CompactRect::new((1.0, 2.0), (0.0, 1.0), 0, 2).is_err());
        assert!(CompactRect::new((1.0, f64::NAN), (0.0, 1.0), 2, 2).is_err());
    }

    #[test]
    fn corner_maximum() {
        let k = CompactRect::new((0.0, 1.0), (0.0, 1.0), 2, 2).unwrap();
        let g = sup_on_grid(Ok, &k).unwrap();
        assert!((g.sup - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(g.argmax, Complex64::new(1.0, 1.0));
        assert_eq!((g.h_sigma, g.h_t), (1.0, 1.0));
    }

    #[test]
    fn zero_function() {
        let k = CompactRect::new((1.5, 2.0), (-1.0, 1.0), 3, 4).unwrap();
        assert_eq!(sup_on_grid(|_| Ok(Complex64::new(0.0, 0.0)), &k).unwrap().sup, 0.0);
    }

    #[test]
    fn errors_carry_node() {
        let k = CompactRect::new((1.0, 2.0), (0.0, 1.0), 2, 2).unwrap();
        let err = sup_on_grid(
            |s| if s.re > 1.5 { Err(Error::Pole) } else { Ok(s) },
            &k,
        )
        .unwrap_err();
        match err {
            Error::EvaluationFailed { node, .. } => assert_eq!(node.re, 2.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn refinement_keeps_nodes() {
        let k = CompactRect::new((1.0, 2.0), (0.0, 3.0), 3, 4).unwrap();
        let f = k.refined(2);
        assert_eq!((f.grid_sigma, f.grid_t), (5, 7));
        for a in 0..3 {
            for b in 0..4 {
                assert!((f.node(2 * a, 2 * b) - k.node(a, b)).norm() < 1e-15);
            }
        }
    }
}
