//! Kelley cutting-plane maximization of a linear objective over a compact
//! convex set known only through a separation oracle.
//!
//! Each LP relaxation value is an upper bound; the caller-supplied recovery
//! map turns relaxation points into feasible points, giving a lower bound.
//! The loop stops once the bracket is narrower than `tol`.

use crate::linalg::dot;
use crate::lp::{solve, LinearProgram, LpError, LpStatus, Sense};

/// Half-space `⟨a, p⟩ ≤ b`.
#[derive(Debug, Clone)]
pub struct Cut {
    pub a: Vec<f64>,
    pub b: f64,
}

#[derive(Debug, Clone)]
pub struct KelleyResult {
    pub lo: f64,
    pub hi: f64,
    /// Best feasible point found (attains `lo`).
    pub point: Vec<f64>,
    pub iterations: usize,
}

pub struct Kelley<'a> {
    pub objective: Vec<f64>,
    /// Box containing the feasible set.
    pub bounds: Vec<(f64, f64)>,
    pub cuts: Vec<Cut>,
    /// Returns cuts violated by the point (empty means feasible).
    pub separate: Box<dyn FnMut(&[f64]) -> Vec<Cut> + 'a>,
    /// Maps a relaxation point to a feasible one with its objective value.
    pub recover: Box<dyn FnMut(&[f64]) -> Option<(f64, Vec<f64>)> + 'a>,
    pub tol: f64,
    pub max_iter: usize,
}

impl Kelley<'_> {
    pub fn run(mut self) -> Result<KelleyResult, LpError> {
        let n = self.objective.len();
        let mut lo = f64::NEG_INFINITY;
        let mut best = vec![0.0; n];
        let mut hi = f64::INFINITY;
        let mut iterations = 0;
        while iterations < self.max_iter {
            iterations += 1;
            let mut lp = LinearProgram::new(self.objective.clone());
            for (j, &(l, u)) in self.bounds.iter().enumerate() {
                lp.set_bounds(j, l, u);
            }
            for cut in &self.cuts {
                lp.add_row(&cut.a, Sense::Le, cut.b);
            }
            let sol = solve(&lp)?;
            if sol.status != LpStatus::Optimal {
                return Err(LpError::NumericalFailure(iterations));
            }
            hi = hi.min(sol.value);
            if let Some((v, p)) = (self.recover)(&sol.point) {
                if v > lo {
                    lo = v;
                    best = p;
                }
            }
            if hi - lo <= self.tol {
                break;
            }
            let new_cuts = (self.separate)(&sol.point);
            if new_cuts.is_empty() {
                lo = lo.max(sol.value);
                if lo >= sol.value {
                    best = sol.point.clone();
                }
                break;
            }
            // drop cuts the LP point already satisfies; they cannot help
            let before = self.cuts.len();
            self.cuts
                .extend(new_cuts.into_iter().filter(|c| dot(&c.a, &sol.point) > c.b));
            if self.cuts.len() == before {
                break;
            }
        }
        Ok(KelleyResult {
            lo,
            hi: hi.max(lo),
            point: best,
            iterations,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::norm2;

    #[test]
    fn disc_support() {
        // max x + y over the unit disc = √2
        let k = Kelley {
            objective: vec![1.0, 1.0],
            bounds: vec![(-1.0, 1.0); 2],
            cuts: vec![],
            separate: Box::new(|p: &[f64]| {
                let r = norm2(p);
                if r > 1.0 + 1e-13 {
                    vec![Cut {
                        a: p.iter().map(|v| v / r).collect(),
                        b: 1.0,
                    }]
                } else {
                    vec![]
                }
            }),
            recover: Box::new(|p: &[f64]| {
                let s = norm2(p).max(1.0);
                let q: Vec<f64> = p.iter().map(|v| v / s).collect();
                Some((q[0] + q[1], q))
            }),
            tol: 1e-9,
            max_iter: 200,
        };
        let r = k.run().unwrap();
        let t = std::f64::consts::SQRT_2;
        assert!(r.lo <= t + 1e-12 && r.hi >= t - 1e-12);
        assert!(r.hi - r.lo <= 1e-9, "{r:?}");
    }
}
