//! Dense two-phase primal simplex for the small polyhedral subproblems.
//!
//! Problems are stated as `max cᵀx` subject to row constraints with a sense
//! (`≤`, `=`, `≥`) and per-variable bounds (possibly infinite). Internally the
//! problem is shifted to nonnegative variables, rows get slack/surplus and
//! artificial columns, and a dense tableau is pivoted with Dantzig's rule,
//! falling back to Bland's rule after `5·(m+n)` consecutive degenerate pivots.
//!
//! Every row owns an identity column (slack for `≤`, artificial otherwise),
//! so the row multipliers are read straight off the final objective row.

use thiserror::Error;

use crate::linalg::{dot, Matrix};

const PIVOT_TOL: f64 = 1e-11;
const FEAS_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("simplex stalled after {0} pivots")]
    NumericalFailure(usize),
    #[error("inconsistent problem dimensions: {0}")]
    Dimension(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone)]
pub struct LinearProgram {
    /// Maximized.
    pub objective: Vec<f64>,
    pub constraints: Matrix,
    pub rhs: Vec<f64>,
    pub senses: Vec<Sense>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl LinearProgram {
    /// A program with `n` nonnegative variables and no rows.
    pub fn new(objective: Vec<f64>) -> Self {
        let n = objective.len();
        LinearProgram {
            objective,
            constraints: Matrix::zeros(0, n),
            rhs: Vec::new(),
            senses: Vec::new(),
            lower: vec![0.0; n],
            upper: vec![f64::INFINITY; n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn set_bounds(&mut self, j: usize, lower: f64, upper: f64) -> &mut Self {
        self.lower[j] = lower;
        self.upper[j] = upper;
        self
    }

    pub fn free(&mut self, j: usize) -> &mut Self {
        self.set_bounds(j, f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn add_row(&mut self, coeffs: &[f64], sense: Sense, rhs: f64) -> &mut Self {
        let n = self.num_vars();
        assert_eq!(coeffs.len(), n, "row length must match variable count");
        let mut rows = self.constraints.to_rows();
        rows.push(coeffs.to_vec());
        self.constraints = if rows.is_empty() {
            Matrix::zeros(0, n)
        } else {
            Matrix::from_rows(&rows)
        };
        self.rhs.push(rhs);
        self.senses.push(sense);
        self
    }

    fn validate(&self) -> Result<(), LpError> {
        let n = self.num_vars();
        let m = self.rhs.len();
        if self.constraints.rows() != m || (m > 0 && self.constraints.cols() != n) {
            return Err(LpError::Dimension(format!(
                "constraint matrix is {}x{}, expected {m}x{n}",
                self.constraints.rows(),
                self.constraints.cols()
            )));
        }
        if self.senses.len() != m || self.lower.len() != n || self.upper.len() != n {
            return Err(LpError::Dimension("sense/bound vectors".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    pub value: f64,
    pub point: Vec<f64>,
    /// Row multipliers: `≥ 0` on `≤` rows, `≤ 0` on `≥` rows, free on `=`.
    pub dual_point: Vec<f64>,
    /// `c - Aᵀy` in the original variables.
    pub reduced_costs: Vec<f64>,
    /// Unbounded: a primal ray with positive objective slope.
    /// Infeasible: phase-one row multipliers (a Farkas-type certificate).
    pub ray: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy)]
enum VarMap {
    /// x = offset + x'
    Shift(usize, f64),
    /// x = offset - x'
    Flip(usize, f64),
    /// x = x⁺ - x⁻
    Split(usize, usize),
}

struct Tableau {
    /// `m` rows of `[A | b]`, width `ncols + 1`.
    t: Vec<Vec<f64>>,
    /// Reduced-cost row, `z_j - c_j` convention for maximization, with the
    /// negated objective value in the last slot.
    obj: Vec<f64>,
    basis: Vec<usize>,
    ncols: usize,
    blocked: Vec<bool>,
    degenerate_run: usize,
    bland: bool,
    pivots: usize,
}

enum PivotOutcome {
    Optimal,
    Unbounded(usize),
}

impl Tableau {
    fn set_objective(&mut self, cost: &[f64]) {
        let w = self.ncols + 1;
        let mut obj = vec![0.0; w];
        for j in 0..self.ncols {
            obj[j] = -cost[j];
        }
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = cost[b];
            if cb != 0.0 {
                for j in 0..w {
                    obj[j] += cb * self.t[i][j];
                }
            }
        }
        self.obj = obj;
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.ncols + 1;
        let p = self.t[r][c];
        for j in 0..w {
            self.t[r][j] /= p;
        }
        self.t[r][c] = 1.0;
        let prow = self.t[r].clone();
        for i in 0..self.t.len() {
            if i == r {
                continue;
            }
            let f = self.t[i][c];
            if f != 0.0 {
                for j in 0..w {
                    self.t[i][j] -= f * prow[j];
                }
                self.t[i][c] = 0.0;
            }
        }
        let f = self.obj[c];
        if f != 0.0 {
            for j in 0..w {
                self.obj[j] -= f * prow[j];
            }
            self.obj[c] = 0.0;
        }
        self.basis[r] = c;
        self.pivots += 1;
    }

    fn run(&mut self, max_pivots: usize) -> Result<PivotOutcome, LpError> {
        let m = self.t.len();
        let degenerate_limit = 5 * (m + self.ncols);
        loop {
            if self.pivots > max_pivots {
                return Err(LpError::NumericalFailure(self.pivots));
            }
            let scale = 1.0
                + self.obj[..self.ncols]
                    .iter()
                    .fold(0.0f64, |a, v| a.max(v.abs()));
            let tol = 1e-10 * scale;
            let entering = if self.bland {
                (0..self.ncols).find(|&j| !self.blocked[j] && self.obj[j] < -tol)
            } else {
                (0..self.ncols)
                    .filter(|&j| !self.blocked[j] && self.obj[j] < -tol)
                    .min_by(|&a, &b| self.obj[a].total_cmp(&self.obj[b]))
            };
            let Some(c) = entering else {
                return Ok(PivotOutcome::Optimal);
            };
            let rhs = self.ncols;
            let mut best: Option<(usize, f64)> = None;
            for i in 0..m {
                let a = self.t[i][c];
                if a > PIVOT_TOL {
                    let ratio = self.t[i][rhs].max(0.0) / a;
                    best = match best {
                        None => Some((i, ratio)),
                        Some((bi, br)) => {
                            let better = ratio < br - 1e-12 * (1.0 + br)
                                || (ratio <= br + 1e-12 * (1.0 + br)
                                    && self.basis[i] < self.basis[bi]);
                            if better {
                                Some((i, ratio))
                            } else {
                                Some((bi, br))
                            }
                        }
                    };
                }
            }
            let Some((r, ratio)) = best else {
                return Ok(PivotOutcome::Unbounded(c));
            };
            if ratio <= 1e-12 {
                self.degenerate_run += 1;
                if self.degenerate_run > degenerate_limit {
                    self.bland = true;
                }
            } else {
                self.degenerate_run = 0;
            }
            self.pivot(r, c);
        }
    }

    fn values(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.ncols];
        for (i, &b) in self.basis.iter().enumerate() {
            x[b] = self.t[i][self.ncols];
        }
        x
    }
}

/// Solves a linear program. See the module docs for the conventions.
pub fn solve(lp: &LinearProgram) -> Result<LpSolution, LpError> {
    lp.validate()?;
    let n = lp.num_vars();

    // Variable substitution to x' >= 0.
    let mut maps = Vec::with_capacity(n);
    let mut nstd = 0usize;
    let mut bound_rows: Vec<(usize, f64)> = Vec::new();
    for j in 0..n {
        let (l, u) = (lp.lower[j], lp.upper[j]);
        if l > u {
            return Ok(infeasible_without_certificate(lp));
        }
        if l.is_finite() {
            maps.push(VarMap::Shift(nstd, l));
            if u.is_finite() {
                bound_rows.push((nstd, u - l));
            }
            nstd += 1;
        } else if u.is_finite() {
            maps.push(VarMap::Flip(nstd, u));
            nstd += 1;
        } else {
            maps.push(VarMap::Split(nstd, nstd + 1));
            nstd += 2;
        }
    }

    // Rows in the substituted variables: (coeffs, sense, rhs, sign, origin)
    struct Row {
        a: Vec<f64>,
        sense: Sense,
        b: f64,
    }
    let mut rows: Vec<Row> = Vec::new();
    for i in 0..lp.rhs.len() {
        let orig = lp.constraints.row(i);
        let mut a = vec![0.0; nstd];
        let mut b = lp.rhs[i];
        for (j, map) in maps.iter().enumerate() {
            let c = orig[j];
            if c == 0.0 {
                continue;
            }
            match *map {
                VarMap::Shift(k, off) => {
                    a[k] += c;
                    b -= c * off;
                }
                VarMap::Flip(k, off) => {
                    a[k] -= c;
                    b -= c * off;
                }
                VarMap::Split(p, q) => {
                    a[p] += c;
                    a[q] -= c;
                }
            }
        }
        rows.push(Row {
            a,
            sense: lp.senses[i],
            b,
        });
    }
    for &(k, width) in &bound_rows {
        let mut a = vec![0.0; nstd];
        a[k] = 1.0;
        rows.push(Row {
            a,
            sense: Sense::Le,
            b: width,
        });
    }

    let mut cost = vec![0.0; nstd];
    let mut obj_offset = 0.0;
    for (j, map) in maps.iter().enumerate() {
        let c = lp.objective[j];
        match *map {
            VarMap::Shift(k, off) => {
                cost[k] += c;
                obj_offset += c * off;
            }
            VarMap::Flip(k, off) => {
                cost[k] -= c;
                obj_offset += c * off;
            }
            VarMap::Split(p, q) => {
                cost[p] += c;
                cost[q] -= c;
            }
        }
    }

    // Normalize rhs >= 0 and lay out identity columns.
    let m = rows.len();
    let mut signs = vec![1.0; m];
    for (i, row) in rows.iter_mut().enumerate() {
        if row.b < 0.0 {
            signs[i] = -1.0;
            row.b = -row.b;
            row.a.iter_mut().for_each(|v| *v = -*v);
            row.sense = match row.sense {
                Sense::Le => Sense::Ge,
                Sense::Ge => Sense::Le,
                Sense::Eq => Sense::Eq,
            };
        }
    }
    let n_surplus = rows.iter().filter(|r| r.sense == Sense::Ge).count();
    let ncols = nstd + n_surplus + m;
    let mut t = vec![vec![0.0; ncols + 1]; m];
    let mut basis = vec![0usize; m];
    let mut identity_col = vec![0usize; m];
    let mut is_artificial = vec![false; ncols];
    let mut surplus_next = nstd;
    for (i, row) in rows.iter().enumerate() {
        t[i][..nstd].copy_from_slice(&row.a);
        t[i][ncols] = row.b;
        let id = nstd + n_surplus + i;
        t[i][id] = 1.0;
        identity_col[i] = id;
        basis[i] = id;
        match row.sense {
            Sense::Le => {}
            Sense::Ge => {
                t[i][surplus_next] = -1.0;
                surplus_next += 1;
                is_artificial[id] = true;
            }
            Sense::Eq => is_artificial[id] = true,
        }
    }

    let max_pivots = 50 * (m + ncols) + 1000;
    let mut tab = Tableau {
        t,
        obj: Vec::new(),
        basis,
        ncols,
        blocked: vec![false; ncols],
        degenerate_run: 0,
        bland: false,
        pivots: 0,
    };

    // Phase one: maximize -sum(artificials).
    if is_artificial.iter().any(|&a| a) {
        let phase1: Vec<f64> = is_artificial
            .iter()
            .map(|&a| if a { -1.0 } else { 0.0 })
            .collect();
        tab.set_objective(&phase1);
        tab.run(max_pivots)?;
        let infeas: f64 = tab
            .basis
            .iter()
            .enumerate()
            .filter(|(_, &b)| is_artificial[b])
            .map(|(i, _)| tab.t[i][ncols])
            .sum();
        let scale = 1.0 + rows.iter().map(|r| r.b).fold(0.0, f64::max);
        if infeas > FEAS_TOL * scale {
            // phase-one multipliers sit on the identity columns
            let y: Vec<f64> = (0..m)
                .filter(|&i| i < lp.rhs.len())
                .map(|i| {
                    let col = identity_col[i];
                    let rc = tab.obj[col] + if is_artificial[col] { -1.0 } else { 0.0 };
                    signs[i] * rc
                })
                .collect();
            let mut sol = infeasible_without_certificate(lp);
            sol.ray = Some(y);
            return Ok(sol);
        }
        // drive zero-valued artificials out of the basis where possible
        for i in 0..m {
            if is_artificial[tab.basis[i]] {
                if let Some(c) = (0..ncols)
                    .filter(|&j| !is_artificial[j])
                    .find(|&j| tab.t[i][j].abs() > 1e-9)
                {
                    tab.pivot(i, c);
                }
            }
        }
        for j in 0..ncols {
            tab.blocked[j] = is_artificial[j];
        }
        tab.bland = false;
        tab.degenerate_run = 0;
    }

    let mut phase2 = vec![0.0; ncols];
    phase2[..nstd].copy_from_slice(&cost);
    tab.set_objective(&phase2);
    let outcome = tab.run(max_pivots)?;

    let xstd = tab.values();
    let to_original = |xs: &[f64], with_offset: bool| -> Vec<f64> {
        maps.iter()
            .map(|map| match *map {
                VarMap::Shift(k, off) => xs[k] + if with_offset { off } else { 0.0 },
                VarMap::Flip(k, off) => (if with_offset { off } else { 0.0 }) - xs[k],
                VarMap::Split(p, q) => xs[p] - xs[q],
            })
            .collect()
    };
    let point = to_original(&xstd, true);

    match outcome {
        PivotOutcome::Unbounded(c) => {
            let mut dir = vec![0.0; ncols];
            dir[c] = 1.0;
            for (i, &b) in tab.basis.iter().enumerate() {
                dir[b] = -tab.t[i][c];
            }
            let ray = to_original(&dir[..nstd], false);
            Ok(LpSolution {
                status: LpStatus::Unbounded,
                value: f64::INFINITY,
                point,
                dual_point: vec![0.0; lp.rhs.len()],
                reduced_costs: vec![0.0; n],
                ray: Some(ray),
            })
        }
        PivotOutcome::Optimal => {
            let y: Vec<f64> = (0..lp.rhs.len())
                .map(|i| signs[i] * tab.obj[identity_col[i]])
                .collect();
            let aty = if lp.rhs.is_empty() {
                vec![0.0; n]
            } else {
                lp.constraints.tr_matvec(&y)
            };
            let reduced_costs = lp.objective.iter().zip(&aty).map(|(c, a)| c - a).collect();
            let value = dot(&lp.objective, &point);
            debug_assert!(
                (value - (dot(&cost, &xstd[..nstd]) + obj_offset)).abs()
                    < 1e-6 * (1.0 + value.abs())
            );
            Ok(LpSolution {
                status: LpStatus::Optimal,
                value,
                point,
                dual_point: y,
                reduced_costs,
                ray: None,
            })
        }
    }
}

fn infeasible_without_certificate(lp: &LinearProgram) -> LpSolution {
    LpSolution {
        status: LpStatus::Infeasible,
        value: f64::NEG_INFINITY,
        point: vec![0.0; lp.num_vars()],
        dual_point: vec![0.0; lp.rhs.len()],
        reduced_costs: vec![0.0; lp.num_vars()],
        ray: None,
    }
}

/// Largest violation of rows and bounds at `x`.
pub fn primal_residual(lp: &LinearProgram, x: &[f64]) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..lp.rhs.len() {
        let ax = dot(lp.constraints.row(i), x);
        let v = match lp.senses[i] {
            Sense::Le => ax - lp.rhs[i],
            Sense::Ge => lp.rhs[i] - ax,
            Sense::Eq => (ax - lp.rhs[i]).abs(),
        };
        worst = worst.max(v);
    }
    for j in 0..x.len() {
        worst = worst.max(lp.lower[j] - x[j]).max(x[j] - lp.upper[j]);
    }
    worst
}

/// Objective of the bound-aware dual, `bᵀy + Σ u_j d_j⁺ − Σ l_j d_j⁻`, and its
/// sign-feasibility residual. Infinite bounds with a nonzero matching reduced
/// cost count as an infinite residual.
pub fn dual_objective(lp: &LinearProgram, y: &[f64]) -> (f64, f64) {
    let mut residual = 0.0f64;
    for (i, &yi) in y.iter().enumerate() {
        let v = match lp.senses[i] {
            Sense::Le => -yi,
            Sense::Ge => yi,
            Sense::Eq => 0.0,
        };
        residual = residual.max(v);
    }
    let aty = if lp.rhs.is_empty() {
        vec![0.0; lp.num_vars()]
    } else {
        lp.constraints.tr_matvec(y)
    };
    let mut value = dot(&lp.rhs, y);
    for j in 0..lp.num_vars() {
        let d = lp.objective[j] - aty[j];
        if d > 0.0 {
            if lp.upper[j].is_finite() {
                value += lp.upper[j] * d;
            } else {
                residual = residual.max(d);
            }
        } else if d < 0.0 {
            if lp.lower[j].is_finite() {
                value += lp.lower[j] * d;
            } else {
                residual = residual.max(-d);
            }
        }
    }
    (value, residual)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn single_upper_bound() {
        let mut lp = LinearProgram::new(vec![1.0]);
        lp.add_row(&[1.0], Sense::Le, 2.0);
        let s = solve(&lp).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert_abs_diff_eq!(s.value, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.dual_point[0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn nu_lp_on_diagonal() {
        // max t s.t. t <= x_j, x = z(1,1), |x_j| <= 1; variables (z, t)
        let mut lp = LinearProgram::new(vec![0.0, 1.0]);
        lp.free(0).free(1);
        for _ in 0..2 {
            lp.add_row(&[-1.0, 1.0], Sense::Le, 0.0);
            lp.add_row(&[1.0, 0.0], Sense::Le, 1.0);
            lp.add_row(&[1.0, 0.0], Sense::Ge, -1.0);
        }
        let s = solve(&lp).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert_abs_diff_eq!(s.value, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.point[0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn contradictory_bounds_are_infeasible() {
        let mut lp = LinearProgram::new(vec![1.0]);
        lp.add_row(&[1.0], Sense::Ge, 3.0);
        lp.add_row(&[1.0], Sense::Le, 1.0);
        let s = solve(&lp).unwrap();
        assert_eq!(s.status, LpStatus::Infeasible);
        // Farkas: yᵀA >= 0 on x >= 0 while yᵀb < 0
        let y = s.ray.unwrap();
        assert!(y[0] <= 1e-12 && y[1] >= -1e-12);
        assert!(y[0] + y[1] >= -1e-12);
        assert!(3.0 * y[0] + y[1] < 0.0);
    }

    #[test]
    fn unbounded_with_ray() {
        let mut lp = LinearProgram::new(vec![1.0, 1.0]);
        lp.add_row(&[1.0, -1.0], Sense::Le, 1.0);
        let s = solve(&lp).unwrap();
        assert_eq!(s.status, LpStatus::Unbounded);
        let r = s.ray.unwrap();
        assert!(r[0] + r[1] > 0.0);
        assert!(r[0] - r[1] <= 1e-12);
        assert!(r.iter().all(|&v| v >= -1e-12));
    }

    #[test]
    fn equality_and_free_variables() {
        // max x - y s.t. x + y = 1, x in [-2, 3], y free, y >= -5 via row
        let mut lp = LinearProgram::new(vec![1.0, -1.0]);
        lp.set_bounds(0, -2.0, 3.0).free(1);
        lp.add_row(&[1.0, 1.0], Sense::Eq, 1.0);
        lp.add_row(&[0.0, 1.0], Sense::Ge, -5.0);
        let s = solve(&lp).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert_abs_diff_eq!(s.value, 5.0, epsilon = 1e-12);
        let (dual, res) = dual_objective(&lp, &s.dual_point);
        assert!(res <= 1e-9);
        assert_abs_diff_eq!(dual, s.value, epsilon = 1e-9);
    }

    #[test]
    fn degenerate_cycling_example() {
        // Beale's classic cycling instance under Dantzig's rule
        let mut lp = LinearProgram::new(vec![0.75, -20.0, 0.5, -6.0]);
        lp.add_row(&[0.25, -8.0, -1.0, 9.0], Sense::Le, 0.0);
        lp.add_row(&[0.5, -12.0, -0.5, 3.0], Sense::Le, 0.0);
        lp.add_row(&[0.0, 0.0, 1.0, 0.0], Sense::Le, 1.0);
        let s = solve(&lp).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert_abs_diff_eq!(s.value, 1.25, epsilon = 1e-10);
    }

    fn random_lp() -> impl Strategy<Value = LinearProgram> {
        (1usize..=20, 1usize..=20).prop_flat_map(|(m, n)| {
            (
                proptest::collection::vec(-5.0f64..5.0, n),
                proptest::collection::vec(-5.0f64..5.0, m * n),
                proptest::collection::vec(0.1f64..5.0, m),
                proptest::collection::vec(0.5f64..3.0, n),
            )
                .prop_map(move |(c, a, b, ub)| {
                    // x in [0, ub] keeps it bounded; b > 0 keeps x = 0 feasible
                    let mut lp = LinearProgram::new(c);
                    lp.constraints = Matrix::from_vec(m, n, a).unwrap();
                    lp.rhs = b;
                    lp.senses = vec![Sense::Le; m];
                    lp.upper = ub;
                    lp
                })
        })
    }

    proptest! {
        #[test]
        fn strong_duality(lp in random_lp()) {
            let s = solve(&lp).unwrap();
            prop_assert_eq!(s.status, LpStatus::Optimal);
            prop_assert!(primal_residual(&lp, &s.point) <= 1e-9);
            let (dual, res) = dual_objective(&lp, &s.dual_point);
            prop_assert!(res <= 1e-9, "dual residual {}", res);
            prop_assert!((dual - s.value).abs() <= 1e-8 * (1.0 + s.value.abs()));
        }
    }
}
