//! Condition measures of a subspace `L` relative to a cone `K` and a norm.
//!
//! Each operation returns a [`CertifiedValue`] tagged with the solver that
//! produced it. The dispatch is closed: pairs without an exact path go to
//! the certified oracle, which refuses ambient dimensions above
//! [`oracle::MAX_DIM`].

mod bounds;
mod exact;
mod sym;

use std::fmt;

use thiserror::Error;

use crate::cones::{Cone, ConeError};
use crate::interval::Interval;
use crate::linalg::{dot, norm2, orthonormalize, pinv, LinalgError, Matrix};
use crate::lp::LpError;
use crate::norms::{NormError, NormSpec};
use crate::oracle::{
    self, certified_min, CertifiedExtremum, Domain, FnObjective, OracleError, OracleOptions, Ratio,
};
use crate::subspace::Subspace;

pub use bounds::{
    bound_values, check_bounds, pair_norm_min, pairing_min_max, verify_bounds, BoundValues,
    BoundsReport, Check, CheckStatus,
};
pub use sym::{sym_measure, sym_measure_oracle, sym_point};

use exact::{DistLp, Normalize};

/// Declared width of exact results.
pub const EXACT_TOL: f64 = 1e-8;
/// Relative padding applied to exact values to cover rounding.
pub(crate) const EXACT_PAD: f64 = 1e-12;
/// Relative padding for closed-form objective evaluations inside the oracle.
const EVAL_PAD: f64 = 1e-13;
/// Containment tolerance for subspaces inside a norm's domain.
const DOMAIN_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum MeasureError {
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("L⊥ is trivial")]
    TrivialComplement,
    #[error("0 is not in the convex hull")]
    ZeroNotInS,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("tolerance must be positive, got {0}")]
    BadTolerance(f64),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Norm(#[from] NormError),
    #[error(transparent)]
    Cone(#[from] ConeError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ExactLP,
    ExactAngle,
    FaceEnum,
    /// Maximum over the vertices of a polytope.
    Enumeration,
    ClosedForm,
    Iterative,
    Oracle,
    /// Derived from other certified values by interval arithmetic.
    Bound,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::ExactLP => "exact-lp",
            Method::ExactAngle => "exact-angle",
            Method::FaceEnum => "face-enum",
            Method::Enumeration => "vertex-enum",
            Method::ClosedForm => "closed-form",
            Method::Bound => "bound",
            Method::Iterative => "iterative",
            Method::Oracle => "oracle",
        }
    }

    pub fn is_exact(self) -> bool {
        matches!(
            self,
            Method::ExactLP
                | Method::ExactAngle
                | Method::FaceEnum
                | Method::Enumeration
                | Method::ClosedForm
        )
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Optimizers behind a value, when the solver exposes them.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Witness {
    /// Minimizing `u ∈ K*`.
    pub u: Option<Vec<f64>>,
    /// Minimizing `y ∈ L⊥`.
    pub y: Option<Vec<f64>>,
    /// A point of `L` certifying the value from the primal side.
    pub x: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertifiedValue {
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
    pub method: Method,
    pub tol: f64,
    pub witness: Witness,
}

impl CertifiedValue {
    pub(crate) fn exact(v: f64, method: Method, witness: Witness) -> CertifiedValue {
        let iv = Interval::around(v, EXACT_PAD);
        CertifiedValue {
            estimate: v,
            lower: iv.lo.max(0.0).min(v),
            upper: iv.hi,
            method,
            tol: EXACT_TOL,
            witness,
        }
    }

    pub(crate) fn bracket(
        iv: Interval,
        method: Method,
        tol: f64,
        witness: Witness,
    ) -> CertifiedValue {
        let lower = iv.lo.max(0.0);
        let upper = iv.hi.max(lower);
        let estimate = if upper.is_finite() {
            0.5 * (lower + upper)
        } else {
            lower
        };
        CertifiedValue {
            estimate,
            lower,
            upper,
            method,
            tol,
            witness,
        }
    }

    fn from_oracle(r: CertifiedExtremum, tol: f64, witness: Witness) -> CertifiedValue {
        CertifiedValue::bracket(
            Interval::new(r.lo, r.hi.max(r.lo)),
            Method::Oracle,
            tol,
            witness,
        )
    }

    pub fn interval(&self) -> Interval {
        Interval::new(self.lower, self.upper)
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Form {
    /// `L = Image(A)`.
    Image,
    /// `L = ker(A)`.
    Kernel,
}

#[derive(Debug, Clone)]
pub struct DataMatrix {
    pub a: Matrix,
    pub form: Form,
}

#[derive(Debug, Clone)]
pub struct ProblemInstance {
    pub cone: Cone,
    pub norm: NormSpec,
    pub subspace: Subspace,
    pub data: Option<DataMatrix>,
    pub second_norm: Option<NormSpec>,
}

impl ProblemInstance {
    pub fn new(cone: Cone, norm: NormSpec, subspace: Subspace) -> Result<Self, MeasureError> {
        cone.validate()?;
        let n = cone.ambient_dim();
        if subspace.ambient_dim() != n {
            return Err(MeasureError::DimensionMismatch(format!(
                "cone lives in dimension {n}, subspace in {}",
                subspace.ambient_dim()
            )));
        }
        check_norm_dim(&norm, n)?;
        Ok(ProblemInstance {
            cone,
            norm,
            subspace,
            data: None,
            second_norm: None,
        })
    }

    /// Instance whose subspace is the image or kernel of `a`.
    pub fn from_data(
        cone: Cone,
        norm: NormSpec,
        a: Matrix,
        form: Form,
    ) -> Result<Self, MeasureError> {
        let l = match form {
            Form::Image => Subspace::from_span(&a),
            Form::Kernel => Subspace::from_kernel(&a),
        };
        ProblemInstance::new(cone, norm, l)?.with_data(a, form)
    }

    pub fn with_data(mut self, a: Matrix, form: Form) -> Result<Self, MeasureError> {
        let n = self.dim();
        let ok = match form {
            Form::Image => a.rows() == n,
            Form::Kernel => a.cols() == n,
        };
        if !ok {
            return Err(MeasureError::DimensionMismatch(format!(
                "{}×{} data matrix for dimension {n}",
                a.rows(),
                a.cols()
            )));
        }
        self.data = Some(DataMatrix { a, form });
        Ok(self)
    }

    pub fn with_second_norm(mut self, norm: NormSpec) -> Result<Self, MeasureError> {
        check_norm_dim(&norm, self.dim())?;
        self.second_norm = Some(norm);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.cone.ambient_dim()
    }

    /// `e` when the norm is `‖·‖ₑ` for this cone (ℓ∞ on the orthant is the
    /// case `e = 1`).
    pub fn induced_e(&self) -> Option<Vec<f64>> {
        match (&self.norm, self.cone) {
            (NormSpec::Induced(k), c) if k.cone == c => Some(k.e.e.clone()),
            (NormSpec::Linf, Cone::Orthant(n)) => Some(vec![1.0; n]),
            _ => None,
        }
    }
}

fn check_norm_dim(norm: &NormSpec, n: usize) -> Result<(), MeasureError> {
    match norm.dim() {
        Some(d) if d != n => Err(MeasureError::DimensionMismatch(format!(
            "norm acts on dimension {d}, instance has {n}"
        ))),
        _ => Ok(()),
    }
}

/// Per-call state shared by the solvers.
struct Ctx<'a> {
    inst: &'a ProblemInstance,
    n: usize,
    l: &'a Matrix,
    perp: Matrix,
    opts: OracleOptions,
}

impl<'a> Ctx<'a> {
    fn new(inst: &'a ProblemInstance, tol: f64) -> Result<Self, MeasureError> {
        Ctx::with_options(inst, &OracleOptions::with_tol(tol))
    }

    fn with_options(inst: &'a ProblemInstance, opts: &OracleOptions) -> Result<Self, MeasureError> {
        if !(opts.tol > 0.0) {
            return Err(MeasureError::BadTolerance(opts.tol));
        }
        Ok(Ctx {
            inst,
            n: inst.dim(),
            l: inst.subspace.basis(),
            perp: inst.subspace.complement().basis().clone(),
            opts: opts.clone(),
        })
    }

    fn cone(&self) -> Cone {
        self.inst.cone
    }

    fn norm(&self) -> &NormSpec {
        &self.inst.norm
    }

    /// Polyhedral cone with a polyhedral norm on the whole space.
    fn polyhedral(&self) -> bool {
        self.inst.cone.is_polyhedral()
            && self.inst.norm.is_polyhedral()
            && self.inst.norm.domain_basis().is_none()
    }

    fn gens(&self) -> Vec<Vec<f64>> {
        self.inst.cone.generators().expect("polyhedral cone")
    }

    fn domain(&self) -> Domain {
        Domain::ConeBase {
            cone: self.cone().dual(),
            normal: self.cone().canonical_e(),
        }
    }

    fn perp_domain(&self) -> Domain {
        Domain::SubspaceSphere {
            basis: self.perp.clone(),
        }
    }

    fn radius(&self) -> f64 {
        self.norm().norm_to_l2(self.n)
    }

    fn second(&self) -> Option<&'a NormSpec> {
        self.inst.second_norm.as_ref()
    }

    /// `L` must lie in the second norm's domain.
    fn check_on_l(&self, second: &NormSpec) -> Result<(), MeasureError> {
        check_contained(second, self.l)
    }

    fn cap(&self) -> Cap<'a> {
        Cap::new(self.inst.cone, &self.inst.norm)
    }
}

fn check_contained(norm: &NormSpec, basis: &Matrix) -> Result<(), MeasureError> {
    for c in basis.columns() {
        if norm.domain_residual(&c) > DOMAIN_TOL {
            return Err(MeasureError::Unsupported(
                "subspace is not contained in the second norm's domain".into(),
            ));
        }
    }
    Ok(())
}

/// Support function `h(u) = max{⟨u, x⟩ : x ∈ K, ‖x‖ ≤ 1}` of the cap.
pub(crate) struct Cap<'a> {
    cone: Cone,
    norm: &'a NormSpec,
    verts: Option<Vec<Vec<f64>>>,
}

impl<'a> Cap<'a> {
    pub(crate) fn new(cone: Cone, norm: &'a NormSpec) -> Cap<'a> {
        let verts = match norm {
            NormSpec::L2 => None,
            _ => exact::cap_vertices(&cone, norm),
        };
        Cap { cone, norm, verts }
    }

    pub(crate) fn vertices(&self) -> Option<&[Vec<f64>]> {
        self.verts.as_deref()
    }

    pub(crate) fn support(&self, u: &[f64]) -> Result<Interval, MeasureError> {
        if let NormSpec::L2 = self.norm {
            let p = self.cone.project(u)?;
            return Ok(padded(norm2(&p)));
        }
        if let Some(vs) = &self.verts {
            let best = vs.iter().map(|w| dot(u, w)).fold(0.0f64, f64::max);
            return Ok(padded(best));
        }
        exact::cap_support_kelley(&self.cone, self.norm, u)
    }
}

pub(crate) fn padded(v: f64) -> Interval {
    let iv = Interval::around(v, EVAL_PAD);
    Interval::new(iv.lo.max(0.0), iv.hi)
}

fn support_interval(norm: &NormSpec, u: &[f64], basis: &Matrix) -> Result<Interval, MeasureError> {
    let s = norm.support(u, basis)?;
    if s.exact {
        Ok(padded(s.lo))
    } else {
        Ok(Interval::new(s.lo.max(0.0), padded(s.hi).hi))
    }
}

fn dual_interval(norm: &NormSpec, u: &[f64]) -> Result<Interval, MeasureError> {
    Ok(padded(norm.dual_value(u)?))
}

fn objective_error(e: MeasureError) -> OracleError {
    match e {
        MeasureError::Oracle(o) => o,
        MeasureError::Norm(n) => OracleError::Norm(n),
        MeasureError::Cone(c) => OracleError::Cone(c),
        other => OracleError::Objective(other.to_string()),
    }
}

/// Certified minimum of `num/den` over `domain`.
pub(crate) fn ratio_oracle<N, D>(
    domain: &Domain,
    num: N,
    den: D,
    lips: (f64, f64),
    opts: &OracleOptions,
) -> Result<CertifiedExtremum, MeasureError>
where
    N: Fn(&[f64]) -> Result<Interval, MeasureError> + Sync,
    D: Fn(&[f64]) -> Result<Interval, MeasureError> + Sync,
{
    let obj = FnObjective {
        f: |u: &[f64]| -> Result<Ratio, OracleError> {
            Ok(Ratio {
                num: num(u).map_err(objective_error)?,
                den: den(u).map_err(objective_error)?,
            })
        },
        lip_num: lips.0,
        lip_den: lips.1,
    };
    Ok(certified_min(&obj, domain, opts)?)
}

fn unit_by(v: &[f64], s: f64) -> Vec<f64> {
    if s > 0.0 {
        v.iter().map(|c| c / s).collect()
    } else {
        v.to_vec()
    }
}

fn some_if_nonempty(v: Vec<f64>) -> Option<Vec<f64>> {
    (!v.is_empty()).then_some(v)
}

// ---------------------------------------------------------------------------
// ν

/// `ν(L) = min{‖u − y‖* : u ∈ K*, y ∈ L⊥, ‖u‖* = 1}`.
pub fn nu(inst: &ProblemInstance, tol: f64) -> Result<CertifiedValue, MeasureError> {
    let cx = Ctx::new(inst, tol)?;
    if cx.l.cols() == 0 {
        return Ok(CertifiedValue::exact(
            0.0,
            Method::ExactAngle,
            Witness::default(),
        ));
    }
    if let Some(e) = inst.induced_e() {
        return nu_induced(&cx, &e);
    }
    match (cx.norm(), cx.cone()) {
        (NormSpec::L2, Cone::Orthant(_) | Cone::Wedge(_)) => nu_face(&cx, cx.l),
        (NormSpec::L2, _) => nu_angle_definitional(&cx),
        _ if cx.polyhedral() => {
            let (rows, sum_type) = cx
                .norm()
                .polyhedral_dual_rows(cx.n)
                .expect("polyhedral norm");
            let bs = normalizers(
                &cx.cone(),
                cx.norm()
                    .polyhedral_ball_points(cx.n)
                    .expect("polyhedral norm"),
            );
            nu_lp(&cx, &rows, sum_type, &bs)
        }
        _ => nu_oracle_with(&cx),
    }
}

/// Ball points that can attain `‖u‖*` for some `u ∈ K*`. On the orthant a
/// point dominated coordinatewise by another never attains it.
fn normalizers(cone: &Cone, pts: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    if !matches!(cone, Cone::Orthant(_)) {
        return pts;
    }
    let dominated = |b: &Vec<f64>| {
        pts.iter()
            .any(|c| c != b && c.iter().zip(b).all(|(p, q)| p >= q))
    };
    pts.iter().filter(|b| !dominated(b)).cloned().collect()
}

/// Max-λ LP when the norm is induced by a polyhedral cone, cutting planes
/// otherwise; `σ = ν` in this case.
fn nu_induced(cx: &Ctx, e: &[f64]) -> Result<CertifiedValue, MeasureError> {
    let cone = cx.cone();
    if cone.is_polyhedral() {
        let facets = cone.facet_normals().expect("polyhedral cone");
        let ball = cx
            .norm()
            .polyhedral_ball_facets(cx.n)
            .expect("polyhedral ball");
        let (v, x, u) = exact::max_lambda_lp(&facets, e, cx.l, &ball)?;
        let witness = Witness {
            u: Some(u),
            y: None,
            x: Some(x),
        };
        return Ok(CertifiedValue::exact(v.max(0.0), Method::ExactLP, witness));
    }
    let (iv, x) = exact::max_lambda_kelley(&cone, e, cx.l, cx.norm(), 0.1 * cx.opts.tol)?;
    let witness = Witness {
        x: Some(x),
        ..Witness::default()
    };
    Ok(CertifiedValue::bracket(
        iv,
        Method::Iterative,
        cx.opts.tol,
        witness,
    ))
}

/// Face enumeration of `min ‖Fᵀu‖₂` over unit `u ∈ K*`.
fn nu_face(cx: &Ctx, f: &Matrix) -> Result<CertifiedValue, MeasureError> {
    let dual = cx.cone().dual();
    let rays = dual.generators().expect("polyhedral cone");
    let (v, u) = exact::face_enum(&rays, f)?;
    let u = dual.project(&u)?;
    let u = unit_by(&u, norm2(&u));
    let px = f.matvec(&f.tr_matvec(&u));
    let witness = Witness {
        x: Some(unit_by(&px, norm2(&px))),
        u: Some(u),
        y: None,
    };
    Ok(CertifiedValue::exact(v, Method::FaceEnum, witness))
}

fn nu_lp(
    cx: &Ctx,
    rows: &[Vec<f64>],
    sum_type: bool,
    bs: &[Vec<f64>],
) -> Result<CertifiedValue, MeasureError> {
    let gens = cx.gens();
    let lp = DistLp {
        gens: &gens,
        rows,
        sum_type,
        perp: &cx.perp,
    };
    let sol = lp.min_over(bs, Normalize::U)?;
    let s = cx.norm().dual_value(&sol.u)?;
    let witness = Witness {
        y: Some(unit_by(&sol.y, s)),
        u: Some(unit_by(&sol.u, s)),
        x: None,
    };
    Ok(CertifiedValue::exact(sol.value, Method::ExactLP, witness))
}

/// ℓ2 angle form `min ‖P_L u‖` over unit `u ∈ K*` on the oracle grid.
fn nu_angle_definitional(cx: &Ctx) -> Result<CertifiedValue, MeasureError> {
    let l = cx.l;
    let r = ratio_oracle(
        &cx.domain(),
        |u| Ok(padded(norm2(&l.tr_matvec(u)))),
        |u| Ok(padded(norm2(u))),
        (1.0, 1.0),
        &cx.opts,
    )?;
    let u = some_if_nonempty(unit_by(&r.witness, norm2(&r.witness)));
    Ok(CertifiedValue::from_oracle(
        r,
        cx.opts.tol,
        Witness {
            u,
            ..Witness::default()
        },
    ))
}

fn nu_oracle_with(cx: &Ctx) -> Result<CertifiedValue, MeasureError> {
    let norm = cx.norm();
    let l = cx.l;
    let rad = cx.radius();
    let r = ratio_oracle(
        &cx.domain(),
        |u| support_interval(norm, u, l),
        |u| dual_interval(norm, u),
        (rad, rad),
        &cx.opts,
    )?;
    let s = if r.witness.is_empty() {
        0.0
    } else {
        norm.dual_value(&r.witness)?
    };
    let u = some_if_nonempty(unit_by(&r.witness, s));
    Ok(CertifiedValue::from_oracle(
        r,
        cx.opts.tol,
        Witness {
            u,
            ..Witness::default()
        },
    ))
}

/// `ν` from its min-max form `min_{u ∈ K*} max_{x ∈ L, ‖x‖ ≤ 1} ⟨u, x⟩/‖u‖*`
/// on the oracle grid, bypassing every exact path.
pub fn nu_oracle(
    inst: &ProblemInstance,
    opts: &OracleOptions,
) -> Result<CertifiedValue, MeasureError> {
    let cx = Ctx::with_options(inst, opts)?;
    nu_oracle_with(&cx)
}

/// `ν` for ℓ2 from the complement side, `min dist(y, K*)` over unit
/// `y ∈ L⊥`, which is the sine of the angle between `L⊥` and `K*`.
pub fn nu_angle_oracle(
    inst: &ProblemInstance,
    opts: &OracleOptions,
) -> Result<CertifiedValue, MeasureError> {
    if !matches!(inst.norm, NormSpec::L2) {
        return Err(MeasureError::Unsupported(
            "the angle form needs the ℓ2 norm".into(),
        ));
    }
    let cx = Ctx::with_options(inst, opts)?;
    if cx.perp.cols() == 0 {
        return Ok(CertifiedValue::exact(
            1.0,
            Method::ExactAngle,
            Witness::default(),
        ));
    }
    let dual = cx.cone().dual();
    let r = ratio_oracle(
        &cx.perp_domain(),
        |y| {
            let p = dual.project(y)?;
            Ok(padded(norm2(
                &y.iter().zip(&p).map(|(a, b)| a - b).collect::<Vec<_>>(),
            )))
        },
        |y| Ok(padded(norm2(y))),
        (1.0, 1.0),
        &cx.opts,
    )?;
    let y = some_if_nonempty(unit_by(&r.witness, norm2(&r.witness)));
    Ok(CertifiedValue::from_oracle(
        r,
        cx.opts.tol,
        Witness {
            y,
            ..Witness::default()
        },
    ))
}

// ---------------------------------------------------------------------------
// ν̄

/// `ν̄(L) = min{‖y − u‖* : u ∈ K*, y ∈ L⊥, ‖y‖* = 1}`.
pub fn nu_bar(inst: &ProblemInstance, tol: f64) -> Result<CertifiedValue, MeasureError> {
    let cx = Ctx::new(inst, tol)?;
    if cx.perp.cols() == 0 {
        return Err(MeasureError::TrivialComplement);
    }
    match (cx.norm(), cx.cone()) {
        (NormSpec::L2, Cone::Orthant(_) | Cone::Wedge(_)) => {
            // ν̄ = ν for ℓ2; the optimal pair gives ȳ ∝ P_{L⊥} ū
            let v = nu_face(&cx, cx.l)?;
            let u = v.witness.u.clone().expect("face witness");
            let py = cx.perp.matvec(&cx.perp.tr_matvec(&u));
            let y = if norm2(&py) > 1e-9 {
                unit_by(&py, norm2(&py))
            } else {
                cx.perp.col(0)
            };
            let near = cx.cone().dual().project(&y)?;
            Ok(CertifiedValue {
                witness: Witness {
                    u: Some(near),
                    y: Some(y),
                    x: v.witness.x.clone(),
                },
                ..v
            })
        }
        _ if cx.polyhedral() => {
            let (rows, sum_type) = cx
                .norm()
                .polyhedral_dual_rows(cx.n)
                .expect("polyhedral norm");
            let bs = cx
                .norm()
                .polyhedral_ball_points(cx.n)
                .expect("polyhedral norm");
            nu_bar_lp(&cx, &rows, sum_type, &bs, cx.norm())
        }
        _ => nu_bar_oracle_with(&cx, cx.norm()),
    }
}

fn nu_bar_lp(
    cx: &Ctx,
    rows: &[Vec<f64>],
    sum_type: bool,
    bs: &[Vec<f64>],
    normalizer: &NormSpec,
) -> Result<CertifiedValue, MeasureError> {
    let gens = cx.gens();
    let lp = DistLp {
        gens: &gens,
        rows,
        sum_type,
        perp: &cx.perp,
    };
    let sol = lp.min_over(bs, Normalize::Y)?;
    let s = normalizer.dual_value(&sol.y)?;
    let witness = Witness {
        u: Some(unit_by(&sol.u, s)),
        y: Some(unit_by(&sol.y, s)),
        x: None,
    };
    Ok(CertifiedValue::exact(sol.value, Method::ExactLP, witness))
}

/// `min h(−y)/⫼y⫼*` over `y ∈ L⊥`, using `dist*(y, K*) = h(−y)`.
fn nu_bar_oracle_with(cx: &Ctx, normalizer: &NormSpec) -> Result<CertifiedValue, MeasureError> {
    let cap = cx.cap();
    let r = ratio_oracle(
        &cx.perp_domain(),
        |y| cap.support(&y.iter().map(|c| -c).collect::<Vec<_>>()),
        |y| dual_interval(normalizer, y),
        (cx.radius(), normalizer.norm_to_l2(cx.n)),
        &cx.opts,
    )?;
    let s = if r.witness.is_empty() {
        0.0
    } else {
        normalizer.dual_value(&r.witness)?
    };
    let y = some_if_nonempty(unit_by(&r.witness, s));
    let u = match &y {
        Some(y) => nearest_in_dual_cone(cx, y)?,
        None => None,
    };
    Ok(CertifiedValue::from_oracle(
        r,
        cx.opts.tol,
        Witness { u, y, x: None },
    ))
}

/// Point of `K*` nearest to `y` in the dual norm, where computable exactly.
fn nearest_in_dual_cone(cx: &Ctx, y: &[f64]) -> Result<Option<Vec<f64>>, MeasureError> {
    if let NormSpec::L2 = cx.norm() {
        return Ok(Some(cx.cone().dual().project(y)?));
    }
    if !cx.polyhedral() {
        return Ok(None);
    }
    let (rows, sum_type) = cx
        .norm()
        .polyhedral_dual_rows(cx.n)
        .expect("polyhedral norm");
    let (_, u) = exact::dist_to_dual_cone_lp(&cx.gens(), &rows, sum_type, y)?;
    Ok(Some(u))
}

/// `ν̄` on the oracle grid, bypassing every exact path.
pub fn nu_bar_oracle(
    inst: &ProblemInstance,
    opts: &OracleOptions,
) -> Result<CertifiedValue, MeasureError> {
    let cx = Ctx::with_options(inst, opts)?;
    if cx.perp.cols() == 0 {
        return Err(MeasureError::TrivialComplement);
    }
    nu_bar_oracle_with(&cx, cx.norm())
}

// ---------------------------------------------------------------------------
// 𝒱 and 𝒱̄

/// `𝒱(L) = min{max_{x ∈ L, ⫼x⫼ ≤ 1} ⟨u, x⟩ : u ∈ K*, ‖u‖* = 1}`.
pub fn nu_ext(inst: &ProblemInstance, tol: f64) -> Result<CertifiedValue, MeasureError> {
    let cx = Ctx::new(inst, tol)?;
    let Some(second) = cx.second() else {
        return nu(inst, tol);
    };
    cx.check_on_l(second)?;
    if cx.l.cols() == 0 {
        return Ok(CertifiedValue::exact(
            0.0,
            Method::ExactAngle,
            Witness::default(),
        ));
    }
    if let (NormSpec::L2, Cone::Orthant(_) | Cone::Wedge(_)) = (cx.norm(), cx.cone()) {
        match second {
            NormSpec::L2 => return nu_face(&cx, cx.l),
            NormSpec::Image(k) if k.inner == crate::norms::Lp::L2 => {
                // max over x = Aw with w ∈ N = A⁺L, |w|₂ ≤ 1 is ‖P_N Aᵀu‖₂
                let q = orthonormalize(&pinv(&k.a).matmul(cx.l));
                let aq = k.a.matmul(&q);
                return nu_face(&cx, &aq);
            }
            _ => {}
        }
    }
    if cx.polyhedral() && second.is_polyhedral() {
        if let Some((rows, sum_type)) = second.polyhedral_dual_rows(cx.n) {
            let bs = normalizers(
                &cx.cone(),
                cx.norm()
                    .polyhedral_ball_points(cx.n)
                    .expect("polyhedral norm"),
            );
            let gens = cx.gens();
            let lp = DistLp {
                gens: &gens,
                rows: &rows,
                sum_type,
                perp: &cx.perp,
            };
            let sol = lp.min_over(&bs, Normalize::U)?;
            let s = cx.norm().dual_value(&sol.u)?;
            let witness = Witness {
                u: Some(unit_by(&sol.u, s)),
                y: Some(unit_by(&sol.y, s)),
                x: None,
            };
            return Ok(CertifiedValue::exact(sol.value, Method::ExactLP, witness));
        }
    }
    nu_ext_oracle_with(&cx, second)
}

fn nu_ext_oracle_with(cx: &Ctx, second: &NormSpec) -> Result<CertifiedValue, MeasureError> {
    let norm = cx.norm();
    let l = cx.l;
    let r = ratio_oracle(
        &cx.domain(),
        |u| support_interval(second, u, l),
        |u| dual_interval(norm, u),
        (second.norm_to_l2(cx.n), cx.radius()),
        &cx.opts,
    )?;
    let s = if r.witness.is_empty() {
        0.0
    } else {
        norm.dual_value(&r.witness)?
    };
    let u = some_if_nonempty(unit_by(&r.witness, s));
    Ok(CertifiedValue::from_oracle(
        r,
        cx.opts.tol,
        Witness {
            u,
            ..Witness::default()
        },
    ))
}

/// `𝒱` on the oracle grid.
pub fn nu_ext_oracle(
    inst: &ProblemInstance,
    opts: &OracleOptions,
) -> Result<CertifiedValue, MeasureError> {
    let cx = Ctx::with_options(inst, opts)?;
    let second = cx.second().unwrap_or(&inst.norm);
    cx.check_on_l(second)?;
    nu_ext_oracle_with(&cx, second)
}

/// `𝒱̄(L) = min{‖y − u‖* : u ∈ K*, y ∈ L⊥, ⫼y⫼* = 1}`.
pub fn nu_bar_ext(inst: &ProblemInstance, tol: f64) -> Result<CertifiedValue, MeasureError> {
    let cx = Ctx::new(inst, tol)?;
    let Some(second) = cx.second() else {
        return nu_bar(inst, tol);
    };
    if cx.perp.cols() == 0 {
        return Err(MeasureError::TrivialComplement);
    }
    check_contained(second, &cx.perp)?;
    if cx.polyhedral() && second.is_polyhedral() {
        if let Some(bs) = second.polyhedral_ball_points(cx.n) {
            let (rows, sum_type) = cx
                .norm()
                .polyhedral_dual_rows(cx.n)
                .expect("polyhedral norm");
            return nu_bar_lp(&cx, &rows, sum_type, &bs, second);
        }
    }
    nu_bar_oracle_with(&cx, second)
}

/// `𝒱̄` on the oracle grid.
pub fn nu_bar_ext_oracle(
    inst: &ProblemInstance,
    opts: &OracleOptions,
) -> Result<CertifiedValue, MeasureError> {
    let cx = Ctx::with_options(inst, opts)?;
    if cx.perp.cols() == 0 {
        return Err(MeasureError::TrivialComplement);
    }
    let second = cx.second().unwrap_or(&inst.norm);
    check_contained(second, &cx.perp)?;
    nu_bar_oracle_with(&cx, second)
}

// ---------------------------------------------------------------------------
// σ and Σ

/// `σ(L) = min_{v ∈ K, ‖v‖ = 1} max_{x ∈ L, ‖x‖ ≤ 1} λ_v(x)`, evaluated in
/// the dual form `min_{u ∈ K*} max_{x ∈ L ∩ B} ⟨u, x⟩ / h(u)` where `h` is
/// the support function of `K ∩ B`.
pub fn sigma(inst: &ProblemInstance, tol: f64) -> Result<CertifiedValue, MeasureError> {
    let cx = Ctx::new(inst, tol)?;
    if inst.induced_e().is_some() {
        return nu(inst, tol);
    }
    match (cx.norm(), cx.cone()) {
        (NormSpec::L2, c) if c.is_self_dual() => nu(inst, tol),
        (NormSpec::L2, Cone::Wedge(_)) => sigma_wedge(&cx),
        _ if cx.polyhedral() => {
            let cap = cx.cap();
            match cap.vertices() {
                Some(verts) => {
                    let (rows, sum_type) = cx
                        .norm()
                        .polyhedral_dual_rows(cx.n)
                        .expect("polyhedral norm");
                    sigma_lp(&cx, &rows, sum_type, verts)
                }
                None => sigma_oracle_with(&cx, cx.norm()),
            }
        }
        _ => sigma_oracle_with(&cx, cx.norm()),
    }
}

fn sigma_lp(
    cx: &Ctx,
    rows: &[Vec<f64>],
    sum_type: bool,
    verts: &[Vec<f64>],
) -> Result<CertifiedValue, MeasureError> {
    let gens = cx.gens();
    let lp = DistLp {
        gens: &gens,
        rows,
        sum_type,
        perp: &cx.perp,
    };
    let bs: Vec<Vec<f64>> = verts.iter().filter(|w| norm2(w) > 0.0).cloned().collect();
    let sol = lp.min_over(&bs, Normalize::U)?;
    let witness = Witness {
        u: Some(sol.u),
        y: Some(sol.y),
        x: None,
    };
    Ok(CertifiedValue::exact(sol.value, Method::ExactLP, witness))
}

/// Wedge with ℓ2: on the circle of directions in `K*` the ratio
/// `‖P_L u‖/‖Π_K u‖` is monotone between consecutive breakpoints (edges of
/// `K*` and `K`, directions orthogonal to `L`), so its minimum is attained at
/// one of them.
fn sigma_wedge(cx: &Ctx) -> Result<CertifiedValue, MeasureError> {
    let cone = cx.cone();
    let dual = cone.dual();
    let mut cands = dual.generators().expect("wedge");
    cands.extend(cone.generators().expect("wedge"));
    cands.push(vec![0.0, 1.0]);
    if cx.l.cols() == 1 {
        let b = cx.l.col(0);
        cands.push(vec![-b[1], b[0]]);
        cands.push(vec![b[1], -b[0]]);
    }
    let mut best: (f64, Vec<f64>) = (f64::INFINITY, Vec::new());
    for u in cands {
        if !dual.contains(&u, 1e-12)? {
            continue;
        }
        let h = norm2(&cone.project(&u)?);
        let d = norm2(&cx.l.tr_matvec(&u));
        if h > 0.0 && d / h < best.0 {
            best = (d / h, u);
        }
    }
    let witness = Witness {
        u: Some(best.1),
        ..Witness::default()
    };
    Ok(CertifiedValue::exact(best.0, Method::ExactAngle, witness))
}

fn sigma_oracle_with(cx: &Ctx, second: &NormSpec) -> Result<CertifiedValue, MeasureError> {
    let cap = cx.cap();
    let l = cx.l;
    let r = ratio_oracle(
        &cx.domain(),
        |u| support_interval(second, u, l),
        |u| cap.support(u),
        (second.norm_to_l2(cx.n), cx.radius()),
        &cx.opts,
    )?;
    let u = some_if_nonempty(r.witness.clone());
    Ok(CertifiedValue::from_oracle(
        r,
        cx.opts.tol,
        Witness {
            u,
            ..Witness::default()
        },
    ))
}

/// `σ` from its dual ratio form on the oracle grid.
pub fn sigma_oracle(
    inst: &ProblemInstance,
    opts: &OracleOptions,
) -> Result<CertifiedValue, MeasureError> {
    let cx = Ctx::with_options(inst, opts)?;
    sigma_oracle_with(&cx, cx.norm())
}

/// `Σ(L) = min_{v ∈ K, ‖v‖ = 1} max_{x ∈ L, ⫼x⫼ ≤ 1} λ_v(x)`.
pub fn sigma_ext(inst: &ProblemInstance, tol: f64) -> Result<CertifiedValue, MeasureError> {
    let cx = Ctx::new(inst, tol)?;
    let Some(second) = cx.second() else {
        return sigma(inst, tol);
    };
    cx.check_on_l(second)?;
    if cx.polyhedral() && second.is_polyhedral() {
        let cap = cx.cap();
        if let (Some(verts), Some((rows, sum_type))) =
            (cap.vertices(), second.polyhedral_dual_rows(cx.n))
        {
            return sigma_lp(&cx, &rows, sum_type, verts);
        }
    }
    sigma_oracle_with(&cx, second)
}

/// `Σ` on the oracle grid.
pub fn sigma_ext_oracle(
    inst: &ProblemInstance,
    opts: &OracleOptions,
) -> Result<CertifiedValue, MeasureError> {
    let cx = Ctx::with_options(inst, opts)?;
    let second = cx.second().unwrap_or(&inst.norm);
    cx.check_on_l(second)?;
    sigma_oracle_with(&cx, second)
}

// ---------------------------------------------------------------------------
// Θ and feasibility

/// `Θ(K*, K)`, the largest angle from a ray of `K*` to the cone `K`.
pub fn theta(inst: &ProblemInstance) -> CertifiedValue {
    CertifiedValue::exact(inst.cone.theta(), Method::ExactAngle, Witness::default())
}

/// `max{λₑ(x) : x ∈ L, ‖x‖ₑ ≤ 1}` for the cone's canonical `e`, with its
/// maximizer. The value is positive exactly when `L` meets the interior
/// of `K`.
pub fn feasibility_witness(inst: &ProblemInstance) -> Result<(Interval, Vec<f64>), MeasureError> {
    let cone = inst.cone;
    let e = cone.canonical_e();
    let l = inst.subspace.basis();
    if cone.is_polyhedral() {
        let facets = cone.facet_normals().expect("polyhedral cone");
        let ball: Vec<Vec<f64>> = facets
            .iter()
            .flat_map(|r| {
                let s = dot(r, &e);
                [
                    r.iter().map(|c| c / s).collect::<Vec<_>>(),
                    r.iter().map(|c| -c / s).collect(),
                ]
            })
            .collect();
        let (v, x, _) = exact::max_lambda_lp(&facets, &e, l, &ball)?;
        return Ok((Interval::around(v, EXACT_PAD), x));
    }
    let norm = NormSpec::induced_canonical(cone)?;
    exact::max_lambda_kelley(&cone, &e, l, &norm, 1e-9)
}

/// Upper bound on the oracle dimension, re-exported for callers that size
/// instances.
pub const ORACLE_MAX_DIM: usize = oracle::MAX_DIM;

#[cfg(test)]
mod tests;
