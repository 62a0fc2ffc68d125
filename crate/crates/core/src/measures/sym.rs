//! `sym(0, S)` for polytopes and the cone-subspace symmetry `Sym(L, K)`.

use crate::linalg::norm2;
use crate::lp::{solve, LinearProgram, LpStatus, Sense};
use crate::oracle::OracleOptions;

use super::{
    ratio_oracle, CertifiedValue, Ctx, MeasureError, Method, ProblemInstance, Witness, EXACT_PAD,
};
use crate::interval::Interval;

/// Values this close to zero are reported as zero.
const SNAP: f64 = 1e-11;

/// `max{t ≥ 0 : w ∈ S ⇒ −tw ∈ S}` for `S = conv(points)`. One LP per
/// point: the largest `t` with `−t·p_i ∈ S`. A set reduced to `{0}` has
/// symmetry 1 by convention.
pub fn sym_point(points: &[Vec<f64>]) -> Result<f64, MeasureError> {
    let Some(first) = points.first() else {
        return Err(MeasureError::ZeroNotInS);
    };
    let k = first.len();
    if points.iter().any(|p| p.len() != k) {
        return Err(MeasureError::DimensionMismatch(
            "points of different lengths".into(),
        ));
    }
    let scale = points.iter().map(|p| norm2(p)).fold(0.0, f64::max);
    if scale == 0.0 {
        return Ok(1.0);
    }
    // −t·p ∈ conv(points), as an LP in (λ, t)
    let hull_lp = |p: Option<&Vec<f64>>| {
        let m = points.len();
        let mut obj = vec![0.0; m + 1];
        obj[m] = if p.is_some() { 1.0 } else { 0.0 };
        let mut lp = LinearProgram::new(obj);
        if p.is_none() {
            lp.set_bounds(m, 0.0, 0.0);
        }
        let mut row = vec![0.0; m + 1];
        for i in 0..k {
            for (j, q) in points.iter().enumerate() {
                row[j] = q[i] / scale;
            }
            row[m] = p.map_or(0.0, |p| p[i] / scale);
            lp.add_row(&row, Sense::Eq, 0.0);
        }
        row.iter_mut().for_each(|v| *v = 1.0);
        row[m] = 0.0;
        lp.add_row(&row, Sense::Eq, 1.0);
        solve(&lp)
    };
    if hull_lp(None)?.status != LpStatus::Optimal {
        return Err(MeasureError::ZeroNotInS);
    }
    let mut best = 1.0f64;
    for p in points {
        if norm2(p) <= 1e-14 * scale {
            continue;
        }
        let sol = hull_lp(Some(p))?;
        match sol.status {
            LpStatus::Optimal => best = best.min(sol.value),
            _ => return Err(MeasureError::Numerical("symmetry LP failed".into())),
        }
    }
    Ok(if best <= SNAP { 0.0 } else { best.min(1.0) })
}

/// `Sym(L, K) = sym(0, A(K ∩ B))` for any `A` with `ker A = L`; here `A` maps
/// onto coordinates of `L⊥`.
pub fn sym_measure(inst: &ProblemInstance, tol: f64) -> Result<CertifiedValue, MeasureError> {
    let cx = Ctx::new(inst, tol)?;
    if cx.perp.cols() == 0 {
        return Ok(CertifiedValue::exact(
            1.0,
            Method::ExactLP,
            Witness::default(),
        ));
    }
    let cap = cx.cap();
    if let Some(verts) = cap.vertices() {
        let pts: Vec<Vec<f64>> = verts.iter().map(|w| cx.perp.tr_matvec(w)).collect();
        let s = sym_point(&pts)?;
        let mut v = CertifiedValue::exact(s, Method::ExactLP, Witness::default());
        v.upper = v.upper.min(1.0);
        v.lower = if s == 0.0 {
            0.0
        } else {
            Interval::around(s, EXACT_PAD).lo.min(s)
        };
        return Ok(v);
    }
    if perp_meets_dual(&cx)? {
        return Ok(CertifiedValue::exact(
            0.0,
            Method::ExactLP,
            Witness::default(),
        ));
    }
    sym_oracle_with(&cx)
}

/// Whether `L⊥ ∩ K* ≠ {0}`, which forces `Sym = 0`: some `y ∈ L⊥` is
/// nonnegative on `K ∩ B`, so one side of `A(K ∩ B)` collapses. Decided
/// by an LP on polyhedral cones, assumed false elsewhere.
fn perp_meets_dual(cx: &Ctx) -> Result<bool, MeasureError> {
    let Some(gens) = cx.cone().generators() else {
        return Ok(false);
    };
    // y = P z with ⟨g_i, y⟩ ≥ 0 and Σ_i ⟨g_i, y⟩ = 1
    let m = cx.perp.cols();
    let mut lp = LinearProgram::new(vec![0.0; m]);
    for j in 0..m {
        lp.free(j);
    }
    let rows: Vec<Vec<f64>> = gens.iter().map(|g| cx.perp.tr_matvec(g)).collect();
    for r in &rows {
        lp.add_row(r, Sense::Ge, 0.0);
    }
    let total: Vec<f64> = (0..m).map(|j| rows.iter().map(|r| r[j]).sum()).collect();
    lp.add_row(&total, Sense::Eq, 1.0);
    Ok(solve(&lp)?.status == LpStatus::Optimal)
}

/// `min h(y)/h(−y)` over `y ∈ L⊥`, with `h` the support function of
/// `K ∩ B`.
fn sym_oracle_with(cx: &Ctx) -> Result<CertifiedValue, MeasureError> {
    if cx.perp.cols() == 0 {
        return Ok(CertifiedValue::exact(
            1.0,
            Method::ExactLP,
            Witness::default(),
        ));
    }
    let cap = cx.cap();
    let r = ratio_oracle(
        &cx.perp_domain(),
        |y| cap.support(y),
        |y| cap.support(&y.iter().map(|c| -c).collect::<Vec<_>>()),
        (cx.radius(), cx.radius()),
        &cx.opts,
    )?;
    let lo = r.lo.clamp(0.0, 1.0);
    let hi = r.hi.clamp(lo, 1.0);
    let y = (!r.witness.is_empty()).then(|| r.witness.clone());
    Ok(CertifiedValue::bracket(
        Interval::new(lo, hi),
        Method::Oracle,
        cx.opts.tol,
        Witness {
            y,
            ..Witness::default()
        },
    ))
}

/// `Sym` on the oracle grid.
pub fn sym_measure_oracle(
    inst: &ProblemInstance,
    opts: &OracleOptions,
) -> Result<CertifiedValue, MeasureError> {
    let cx = Ctx::with_options(inst, opts)?;
    sym_oracle_with(&cx)
}
