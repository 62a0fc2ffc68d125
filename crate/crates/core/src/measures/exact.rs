//! Exact solvers behind the measure dispatch.

use crate::cones::{symmetrize, Cone};
use crate::interval::Interval;
use crate::kelley::{Cut, Kelley};
use crate::linalg::{dot, norm2, orthonormalize, pinv, solve as solve_linear, sym_eigen, Matrix};
use crate::lp::{solve, LinearProgram, LpStatus, Sense};
use crate::norms::NormSpec;

use super::MeasureError;

/// Minimum of `‖Fᵀu‖₂` over unit `u` in the simplicial cone spanned by
/// `rays`, via the Gram form `M = FFᵀ`. The value is evaluated from `Fᵀu`
/// rather than as `√λ`, which would inflate rounding near zero.
///
/// A minimizer sits in the relative interior of some face `F`. There it is a
/// local minimum of the Rayleigh quotient on `span F`, so it is an
/// eigenvector for the smallest eigenvalue of the form restricted to that
/// span. When that eigenvalue is repeated, moving within the eigenspace
/// reaches a smaller face at the same value. Scanning every face and keeping
/// only eigenvectors that are nonnegative combinations of the face's rays
/// therefore finds the minimum.
pub(crate) fn face_enum(rays: &[Vec<f64>], f: &Matrix) -> Result<(f64, Vec<f64>), MeasureError> {
    let k = rays.len();
    let n = f.rows();
    let m = f.matmul(&f.transpose());
    let mut best = (f64::INFINITY, Vec::new());
    for mask in 1u64..(1u64 << k) {
        let face: Vec<Vec<f64>> = (0..k)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| rays[i].clone())
            .collect();
        let g = Matrix::from_cols(n, &face);
        let q = orthonormalize(&g);
        if q.cols() < face.len() {
            continue;
        }
        let h = symmetrize(&q.transpose().matmul(&m.matmul(&q)));
        let eig = sym_eigen(&h)?;
        let mut u = q.matvec(&eig.vectors.col(0));
        let coef = pinv(&g).matvec(&u);
        let slack = 1e-9 * coef.iter().fold(0.0f64, |a, c| a.max(c.abs()));
        if coef.iter().all(|&c| c <= slack) {
            u.iter_mut().for_each(|v| *v = -*v);
        } else if !coef.iter().all(|&c| c >= -slack) {
            continue;
        }
        if eig.values[0] < best.0 {
            best = (eig.values[0], u);
        }
    }
    if best.1.is_empty() {
        return Err(MeasureError::Numerical(
            "face enumeration found no candidate".into(),
        ));
    }
    Ok((norm2(&f.tr_matvec(&best.1)), best.1))
}

/// Optimal `(value, u, y)` of a distance LP.
#[derive(Debug, Clone)]
pub(crate) struct DistSol {
    pub value: f64,
    pub u: Vec<f64>,
    pub y: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Normalize {
    /// `⟨b, u⟩ ≥ 1`
    U,
    /// `⟨b, y⟩ ≥ 1`
    Y,
}

/// `min Φ(R(u − y))` over `u ∈ K*` and `y = Cs ∈ span(C)`, where `Φ` is the
/// max or the sum of absolute values of the rows `R`, subject to one
/// normalizing row. Minimizing over a vertex set of a polyhedral ball turns
/// the nonconvex constraint `‖u‖* = 1` (or `‖y‖* = 1`) into finitely many
/// LPs, since `‖w‖* ≥ 1` iff `⟨b, w⟩ ≥ 1` for some vertex `b`.
pub(crate) struct DistLp<'a> {
    /// `u ∈ K*` iff `⟨g, u⟩ ≥ 0` for every `g`.
    pub gens: &'a [Vec<f64>],
    pub rows: &'a [Vec<f64>],
    pub sum_type: bool,
    pub perp: &'a Matrix,
}

impl DistLp<'_> {
    fn solve_for(&self, b: &[f64], which: Normalize) -> Result<Option<DistSol>, MeasureError> {
        let n = b.len();
        let m = self.perp.cols();
        let k = self.rows.len();
        let naux = if self.sum_type { k } else { 1 };
        let nv = n + m + naux;
        let mut obj = vec![0.0; nv];
        obj[n + m..].iter_mut().for_each(|v| *v = -1.0);
        let mut lp = LinearProgram::new(obj);
        for j in 0..n + m {
            lp.free(j);
        }
        let mut row = vec![0.0; nv];
        for g in self.gens {
            row.iter_mut().for_each(|v| *v = 0.0);
            row[..n].copy_from_slice(g);
            lp.add_row(&row, Sense::Ge, 0.0);
        }
        row.iter_mut().for_each(|v| *v = 0.0);
        match which {
            Normalize::U => row[..n].copy_from_slice(b),
            Normalize::Y => {
                let cb = self.perp.tr_matvec(b);
                if norm2(&cb) <= 1e-12 * norm2(b) {
                    return Ok(None);
                }
                row[n..n + m].copy_from_slice(&cb);
            }
        }
        lp.add_row(&row, Sense::Ge, 1.0);
        for (i, a) in self.rows.iter().enumerate() {
            let ac = self.perp.tr_matvec(a);
            let t = if self.sum_type { n + m + i } else { n + m };
            for s in [1.0, -1.0] {
                row.iter_mut().for_each(|v| *v = 0.0);
                for j in 0..n {
                    row[j] = s * a[j];
                }
                for j in 0..m {
                    row[n + j] = -s * ac[j];
                }
                row[t] = -1.0;
                lp.add_row(&row, Sense::Le, 0.0);
            }
        }
        let sol = solve(&lp)?;
        match sol.status {
            LpStatus::Optimal => Ok(Some(DistSol {
                value: (-sol.value).max(0.0),
                u: sol.point[..n].to_vec(),
                y: self.perp.matvec(&sol.point[n..n + m]),
            })),
            LpStatus::Infeasible => Ok(None),
            LpStatus::Unbounded => Err(MeasureError::Numerical("distance LP unbounded".into())),
        }
    }

    /// Minimum over the normalizing vectors `bs`.
    pub fn min_over(&self, bs: &[Vec<f64>], which: Normalize) -> Result<DistSol, MeasureError> {
        let mut best: Option<DistSol> = None;
        for b in bs {
            if let Some(s) = self.solve_for(b, which)? {
                if best.as_ref().map_or(true, |cur| s.value < cur.value) {
                    best = Some(s);
                }
            }
        }
        best.ok_or_else(|| MeasureError::Numerical("no feasible normalization".into()))
    }
}

/// `min{‖y − u‖* : u ∈ K*}` for fixed `y` with a polyhedral dual ball, and
/// the nearest `u`.
pub(crate) fn dist_to_dual_cone_lp(
    gens: &[Vec<f64>],
    rows: &[Vec<f64>],
    sum_type: bool,
    y: &[f64],
) -> Result<(f64, Vec<f64>), MeasureError> {
    let n = y.len();
    let k = rows.len();
    let naux = if sum_type { k } else { 1 };
    let mut obj = vec![0.0; n + naux];
    obj[n..].iter_mut().for_each(|v| *v = -1.0);
    let mut lp = LinearProgram::new(obj);
    for j in 0..n {
        lp.free(j);
    }
    let mut row = vec![0.0; n + naux];
    for g in gens {
        row.iter_mut().for_each(|v| *v = 0.0);
        row[..n].copy_from_slice(g);
        lp.add_row(&row, Sense::Ge, 0.0);
    }
    for (i, a) in rows.iter().enumerate() {
        // |⟨a, y⟩ − ⟨a, u⟩| ≤ t
        let ay = dot(a, y);
        let t = if sum_type { n + i } else { n };
        for s in [1.0, -1.0] {
            row.iter_mut().for_each(|v| *v = 0.0);
            for j in 0..n {
                row[j] = -s * a[j];
            }
            row[t] = -1.0;
            lp.add_row(&row, Sense::Le, -s * ay);
        }
    }
    let sol = solve(&lp)?;
    if sol.status != LpStatus::Optimal {
        return Err(MeasureError::Numerical(
            "dual-cone distance LP failed".into(),
        ));
    }
    Ok(((-sol.value).max(0.0), sol.point[..n].to_vec()))
}

/// `min{max_j ⟨u, w_j⟩ : u ∈ K*, ⟨b, u⟩ ≥ 1}` minimized over `bs`.
pub(crate) fn min_cap_support(
    gens: &[Vec<f64>],
    verts: &[Vec<f64>],
    bs: &[Vec<f64>],
) -> Result<(f64, Vec<f64>), MeasureError> {
    let n = gens[0].len();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for b in bs {
        let mut obj = vec![0.0; n + 1];
        obj[n] = -1.0;
        let mut lp = LinearProgram::new(obj);
        for j in 0..=n {
            lp.free(j);
        }
        let mut row = vec![0.0; n + 1];
        for g in gens {
            row[..n].copy_from_slice(g);
            lp.add_row(&row, Sense::Ge, 0.0);
        }
        row[..n].copy_from_slice(b);
        lp.add_row(&row, Sense::Ge, 1.0);
        row[n] = -1.0;
        for w in verts {
            row[..n].copy_from_slice(w);
            lp.add_row(&row, Sense::Le, 0.0);
        }
        let sol = solve(&lp)?;
        if sol.status == LpStatus::Optimal {
            let v = -sol.value;
            if best.as_ref().map_or(true, |(cur, _)| v < *cur) {
                best = Some((v, sol.point[..n].to_vec()));
            }
        }
    }
    best.ok_or_else(|| MeasureError::Numerical("no feasible normalization".into()))
}

/// `max{λ_v(x) : x ∈ span(B), ⟨a, x⟩ ≤ 1 for a ∈ ball}` for a polyhedral
/// cone with facet normals `facets`. Returns the value, the maximizer and
/// `ū = Σ y_k r_k` built from the multipliers of the cone rows; `⟨ū, v⟩ = 1`
/// and `ū ∈ K*` by stationarity in `t`.
pub(crate) fn max_lambda_lp(
    facets: &[Vec<f64>],
    v: &[f64],
    basis: &Matrix,
    ball: &[Vec<f64>],
) -> Result<(f64, Vec<f64>, Vec<f64>), MeasureError> {
    let n = v.len();
    let d = basis.cols();
    let mut obj = vec![0.0; d + 1];
    obj[d] = 1.0;
    let mut lp = LinearProgram::new(obj);
    for j in 0..=d {
        lp.free(j);
    }
    let mut row = vec![0.0; d + 1];
    for r in facets {
        // ⟨r, Bz − t v⟩ ≥ 0
        let br = basis.tr_matvec(r);
        for j in 0..d {
            row[j] = -br[j];
        }
        row[d] = dot(r, v);
        lp.add_row(&row, Sense::Le, 0.0);
    }
    row[d] = 0.0;
    for a in ball {
        row[..d].copy_from_slice(&basis.tr_matvec(a));
        lp.add_row(&row, Sense::Le, 1.0);
    }
    let sol = solve(&lp)?;
    if sol.status != LpStatus::Optimal {
        return Err(MeasureError::Numerical("max-λ LP failed".into()));
    }
    let x = basis.matvec(&sol.point[..d]);
    let mut u = vec![0.0; n];
    for (r, y) in facets.iter().zip(&sol.dual_point) {
        for j in 0..n {
            u[j] += y.abs() * r[j];
        }
    }
    Ok((sol.value, x, u))
}

/// `max{λ_v(x) : x ∈ span(B), ‖x‖ ≤ 1}` by cutting planes, for cones and
/// norms without a polyhedral description. Returns the bracket and a
/// feasible maximizer.
pub(crate) fn max_lambda_kelley(
    cone: &Cone,
    v: &[f64],
    basis: &Matrix,
    norm: &NormSpec,
    tol: f64,
) -> Result<(Interval, Vec<f64>), MeasureError> {
    let n = v.len();
    let d = basis.cols();
    if d == 0 {
        return Ok((Interval::point(0.0), vec![0.0; n]));
    }
    let radius = norm.norm_to_l2(n);
    // λ_v(x) ≤ ⟨g, x⟩/⟨g, v⟩ for any g ∈ K*
    let g = cone.dual().canonical_e();
    let t_max = norm2(&g) * radius / dot(&g, v);
    let mut bounds = vec![(-radius, radius); d];
    bounds.push((0.0, t_max));
    let mut obj = vec![0.0; d + 1];
    obj[d] = 1.0;
    let separate = |p: &[f64]| -> Vec<Cut> {
        let x = basis.matvec(&p[..d]);
        let mut cuts = Vec::new();
        let w: Vec<f64> = x.iter().zip(v).map(|(a, b)| a - p[d] * b).collect();
        if let Ok(u) = cone.dual_witness(&w) {
            if dot(&u, &w) < -1e-13 {
                let mut a: Vec<f64> = basis.tr_matvec(&u).iter().map(|c| -c).collect();
                a.push(dot(&u, v));
                cuts.push(Cut { a, b: 0.0 });
            }
        }
        if let Ok(val) = norm.value(&x) {
            if val > 1.0 + 1e-13 {
                if let Ok(s) = norm.subgradient(&x) {
                    let mut a = basis.tr_matvec(&s);
                    a.push(0.0);
                    cuts.push(Cut { a, b: 1.0 });
                }
            }
        }
        cuts
    };
    let recover = |p: &[f64]| -> Option<(f64, Vec<f64>)> {
        let x = basis.matvec(&p[..d]);
        let s = norm.value(&x).ok()?.max(1.0);
        let z: Vec<f64> = p[..d].iter().map(|c| c / s).collect();
        let lam = cone.lambda_v(v, &basis.matvec(&z)).ok()?;
        if !lam.is_finite() {
            return None;
        }
        let mut q = z;
        q.push(lam);
        Some((lam, q))
    };
    let res = Kelley {
        objective: obj,
        bounds,
        cuts: Vec::new(),
        separate: Box::new(separate),
        recover: Box::new(recover),
        tol,
        max_iter: 3000,
    }
    .run()?;
    let lo = res.lo.max(0.0);
    let hi = res.hi.max(lo);
    let x = if res.point.len() == d + 1 {
        basis.matvec(&res.point[..d])
    } else {
        vec![0.0; n]
    };
    Ok((Interval::new(lo, hi.next_up()), x))
}

/// `max{⟨u, x⟩ : x ∈ K, ‖x‖ ≤ 1}` by cutting planes.
pub(crate) fn cap_support_kelley(
    cone: &Cone,
    norm: &NormSpec,
    u: &[f64],
) -> Result<Interval, MeasureError> {
    let n = u.len();
    let radius = norm.norm_to_l2(n);
    let separate = |x: &[f64]| -> Vec<Cut> {
        let mut cuts = Vec::new();
        if let Ok(w) = cone.dual_witness(x) {
            if dot(&w, x) < -1e-13 {
                cuts.push(Cut {
                    a: w.iter().map(|c| -c).collect(),
                    b: 0.0,
                });
            }
        }
        if let Ok(val) = norm.value(x) {
            if val > 1.0 + 1e-13 {
                if let Ok(s) = norm.subgradient(x) {
                    cuts.push(Cut { a: s, b: 1.0 });
                }
            }
        }
        cuts
    };
    let recover = |x: &[f64]| -> Option<(f64, Vec<f64>)> {
        let p = cone.project(x).ok()?;
        let s = norm.value(&p).ok()?.max(1.0);
        let p: Vec<f64> = p.iter().map(|c| c / s).collect();
        Some((dot(u, &p), p))
    };
    let scale = 1.0 + norm2(u) * radius;
    let res = Kelley {
        objective: u.to_vec(),
        bounds: vec![(-radius, radius); n],
        cuts: Vec::new(),
        separate: Box::new(separate),
        recover: Box::new(recover),
        tol: 1e-10 * scale,
        max_iter: 400,
    }
    .run()?;
    let lo = res.lo.max(0.0);
    Ok(Interval::new(lo, res.hi.max(lo).next_up()))
}

/// Vertices of `K ∩ {‖x‖ ≤ 1}` (including `0`) for polyhedral pairs.
pub(crate) fn cap_vertices(cone: &Cone, norm: &NormSpec) -> Option<Vec<Vec<f64>>> {
    let n = cone.ambient_dim();
    let boxes = |w: &[f64]| -> Vec<Vec<f64>> {
        (0..1usize << n)
            .map(|mask| {
                (0..n)
                    .map(|i| if mask >> i & 1 == 1 { w[i] } else { 0.0 })
                    .collect()
            })
            .collect()
    };
    if let Cone::Orthant(_) = cone {
        match norm {
            NormSpec::L1 => {
                let mut out = vec![vec![0.0; n]];
                for i in 0..n {
                    let mut e = vec![0.0; n];
                    e[i] = 1.0;
                    out.push(e);
                }
                return Some(out);
            }
            NormSpec::Linf => return Some(boxes(&vec![1.0; n])),
            NormSpec::Induced(k) if k.cone == *cone => return Some(boxes(&k.e.e)),
            _ => {}
        }
    }
    if !cone.is_polyhedral() || n > 4 {
        return None;
    }
    let facets = norm.polyhedral_ball_facets(n)?;
    let mut cons: Vec<(Vec<f64>, f64)> = cone
        .facet_normals()?
        .into_iter()
        .map(|r| (r.iter().map(|c| -c).collect(), 0.0))
        .collect();
    cons.extend(facets.into_iter().map(|a| (a, 1.0)));
    let mut out: Vec<Vec<f64>> = Vec::new();
    let mut pick = Vec::with_capacity(n);
    enumerate_vertices(&cons, n, 0, &mut pick, &mut out);
    Some(out)
}

fn enumerate_vertices(
    cons: &[(Vec<f64>, f64)],
    n: usize,
    start: usize,
    pick: &mut Vec<usize>,
    out: &mut Vec<Vec<f64>>,
) {
    if pick.len() == n {
        let a = Matrix::from_rows(&pick.iter().map(|&i| cons[i].0.clone()).collect::<Vec<_>>());
        let b: Vec<f64> = pick.iter().map(|&i| cons[i].1).collect();
        let Some(x) = solve_linear(&a, &b) else {
            return;
        };
        let feasible = cons
            .iter()
            .all(|(a, b)| dot(a, &x) <= b + 1e-9 * (1.0 + b.abs()));
        let fresh = out
            .iter()
            .all(|w| norm2(&w.iter().zip(&x).map(|(p, q)| p - q).collect::<Vec<_>>()) > 1e-9);
        if feasible && fresh {
            out.push(x);
        }
        return;
    }
    for i in start..cons.len() {
        pick.push(i);
        enumerate_vertices(cons, n, i + 1, pick, out);
        pick.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn face_enum_on_orthant_diagonal() {
        // M = projection onto span{(1,1)}: worst unit u ≥ 0 is a coordinate axis
        let f = Matrix::from_cols(2, &[vec![0.5f64.sqrt(), 0.5f64.sqrt()]]);
        let rays = Cone::Orthant(2).generators().unwrap();
        let (v, u) = face_enum(&rays, &f).unwrap();
        assert_abs_diff_eq!(v, 0.5f64.sqrt(), epsilon = 1e-14);
        assert!(u.iter().all(|&c| c >= -1e-14));
    }

    #[test]
    fn cap_vertices_of_wedge_with_linf() {
        let phi = std::f64::consts::FRAC_PI_4;
        let v = cap_vertices(&Cone::Wedge(phi), &NormSpec::Linf).unwrap();
        // triangle-like cap: 0, (1,1), (−1,1)
        assert_eq!(v.len(), 3);
        assert!(v.iter().any(|w| norm2(w) < 1e-12));
        assert!(v
            .iter()
            .any(|w| (w[0] - 1.0).abs() < 1e-12 && (w[1] - 1.0).abs() < 1e-12));
    }

    #[test]
    fn max_lambda_lp_on_orthant() {
        // L = span{(1,2)}, ℓ∞ ball: best x = (1/2, 1), λ = 1/2
        let basis = orthonormalize(&Matrix::from_cols(2, &[vec![1.0, 2.0]]));
        let facets = Cone::Orthant(2).facet_normals().unwrap();
        let ball = NormSpec::Linf.polyhedral_ball_facets(2).unwrap();
        let (v, x, u) = max_lambda_lp(&facets, &[1.0, 1.0], &basis, &ball).unwrap();
        assert_abs_diff_eq!(v, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(x[1], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(u.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
    }
}
