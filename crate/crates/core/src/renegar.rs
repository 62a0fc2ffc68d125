//! Distance to infeasibility of a conic data map.
//!
//! The distance is never reported as a point. It is enclosed by
//! `ν/‖A⁻¹‖ ≤ dist ≤ ν·‖A‖` (with `ν̄` for the kernel form), and the upper
//! end is also capped by an explicit rank-one perturbation `ΔA` whose
//! perturbed system is checked to be infeasible.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

use crate::cones::{Cone, ConeError};
use crate::interval::Interval;
use crate::linalg::{norm2, orthonormalize, singular_values, solve as solve_linear, Matrix};
use crate::lp::{solve, LinearProgram, LpError, LpStatus, Sense};
use crate::measures::{
    self, padded, ratio_oracle, CertifiedValue, Form, MeasureError, Method, ProblemInstance,
    Witness,
};
use crate::norms::{NormError, NormSpec};
use crate::oracle::{CertifiedExtremum, Domain, OracleOptions};
use crate::subspace::Subspace;

/// Relative padding on closed-form norms of rank-one maps.
const NORM_PAD: f64 = 1e-12;
/// Subspace agreement between an instance and its data map.
const SUBSPACE_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum RenegarError {
    #[error("the conic system is not strictly feasible")]
    NotStrictlyFeasible,
    #[error("the data map is not surjective")]
    NotSurjective,
    #[error("the data map is zero")]
    ZeroMap,
    #[error("data map has a non-finite entry")]
    NonFinite,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Norm(#[from] NormError),
    #[error(transparent)]
    Cone(#[from] ConeError),
    #[error(transparent)]
    Lp(#[from] LpError),
}

/// A linear map between `F` (norm `|·|`) and `E`, the space of the cone
/// (norm `‖·‖`). In the image form `A: F → E` and `L = Image(A)`; in the
/// kernel form `A: E → F` and `L = ker(A)`.
#[derive(Debug, Clone)]
pub struct DataMap {
    pub a: Matrix,
    pub f_norm: NormSpec,
    pub e_norm: NormSpec,
    pub form: Form,
}

impl DataMap {
    pub fn new(
        a: Matrix,
        f_norm: NormSpec,
        e_norm: NormSpec,
        form: Form,
    ) -> Result<DataMap, RenegarError> {
        if a.as_slice().iter().any(|v| !v.is_finite()) {
            return Err(RenegarError::NonFinite);
        }
        let map = DataMap {
            a,
            f_norm,
            e_norm,
            form,
        };
        for (norm, d, space) in [
            (&map.f_norm, map.f_dim(), "F"),
            (&map.e_norm, map.e_dim(), "E"),
        ] {
            if norm.domain_basis().is_some() {
                return Err(RenegarError::Unsupported(format!(
                    "{} as the norm on {space}",
                    norm.name()
                )));
            }
            if let Some(k) = norm.dim() {
                if k != d {
                    return Err(RenegarError::DimensionMismatch(format!(
                        "norm on {space} acts on dimension {k}, the map needs {d}"
                    )));
                }
            }
        }
        Ok(map)
    }

    /// The map carried by `inst`, with `‖·‖` taken from the instance.
    pub fn from_instance(
        inst: &ProblemInstance,
        f_norm: NormSpec,
    ) -> Result<DataMap, RenegarError> {
        let data = inst
            .data
            .as_ref()
            .ok_or_else(|| RenegarError::Unsupported("instance carries no data matrix".into()))?;
        DataMap::new(data.a.clone(), f_norm, inst.norm.clone(), data.form)
    }

    pub fn e_dim(&self) -> usize {
        match self.form {
            Form::Image => self.a.rows(),
            Form::Kernel => self.a.cols(),
        }
    }

    pub fn f_dim(&self) -> usize {
        match self.form {
            Form::Image => self.a.cols(),
            Form::Kernel => self.a.rows(),
        }
    }

    pub fn scaled(&self, c: f64) -> DataMap {
        DataMap {
            a: self.a.scale(c),
            ..self.clone()
        }
    }

    /// Norms on the domain and the codomain of `A`.
    fn norms(&self) -> (&NormSpec, &NormSpec) {
        match self.form {
            Form::Image => (&self.f_norm, &self.e_norm),
            Form::Kernel => (&self.e_norm, &self.f_norm),
        }
    }

    fn rank(&self) -> usize {
        orthonormalize(&self.a).cols()
    }

    fn is_surjective(&self) -> bool {
        self.a.rows() > 0 && self.rank() == self.a.rows()
    }

    /// `L` as the image or kernel of `A`.
    pub fn subspace(&self) -> Subspace {
        match self.form {
            Form::Image => Subspace::from_span(&self.a),
            Form::Kernel => Subspace::from_kernel(&self.a),
        }
    }

    /// Conic instance `(K, ‖·‖, L)` defined by this map.
    pub fn instance(&self, cone: Cone) -> Result<ProblemInstance, RenegarError> {
        Ok(
            ProblemInstance::new(cone, self.e_norm.clone(), self.subspace())?
                .with_data(self.a.clone(), self.form)?,
        )
    }
}

/// Positive singular values, computed on the range so that a rank drop
/// does not leave `√ε`-sized ghosts.
fn positive_singular_values(a: &Matrix) -> Vec<f64> {
    let q = orthonormalize(a);
    if q.cols() == 0 {
        return Vec::new();
    }
    singular_values(&q.transpose().matmul(a))
}

/// `‖A‖ = max{‖Aw‖ : |w| ≤ 1}`, from the domain norm to the codomain norm.
pub fn op_norm(map: &DataMap) -> Result<CertifiedValue, RenegarError> {
    op_norm_with(map, &OracleOptions::default())
}

pub fn op_norm_with(map: &DataMap, opts: &OracleOptions) -> Result<CertifiedValue, RenegarError> {
    let (nin, nout) = map.norms();
    let a = &map.a;
    if a.max_abs() == 0.0 {
        return Ok(CertifiedValue::exact(
            0.0,
            Method::ClosedForm,
            Witness::default(),
        ));
    }
    // convex in w, so a vertex of the domain ball attains it
    if let Some(pts) = nin.polyhedral_ball_points(a.cols()) {
        let mut best = (0.0, Vec::new());
        for p in pts {
            let v = nout.value(&a.matvec(&p))?;
            if v > best.0 {
                best = (v, p);
            }
        }
        let w = Witness {
            x: Some(best.1),
            ..Witness::default()
        };
        return Ok(CertifiedValue::exact(best.0, Method::Enumeration, w));
    }
    // ‖z‖ = max_k ⟨f_k, z⟩ gives ‖A‖ = max_k |Aᵀf_k|*
    if let Some(facets) = nout.polyhedral_ball_facets(a.rows()) {
        let mut best = 0.0f64;
        for f in &facets {
            best = best.max(nin.dual_value(&a.tr_matvec(f))?);
        }
        return Ok(CertifiedValue::exact(
            best,
            Method::Enumeration,
            Witness::default(),
        ));
    }
    let sv = positive_singular_values(a);
    if let (NormSpec::L2, NormSpec::L2) = (nin, nout) {
        return Ok(CertifiedValue::exact(
            sv[0],
            Method::ClosedForm,
            Witness::default(),
        ));
    }
    // 1/‖A‖ = min |w|/‖Aw‖ over the sphere of the domain
    let m = a.cols();
    let r = ratio_oracle(
        &Domain::SubspaceSphere {
            basis: Matrix::identity(m),
        },
        |w| Ok(padded(nin.value(w)?)),
        |w| Ok(padded(nout.value(&a.matvec(w))?)),
        (nin.l2_to_norm(m), nout.l2_to_norm(a.rows()) * sv[0]),
        opts,
    )?;
    Ok(reciprocal(r, opts.tol))
}

/// `‖A⁻¹‖ = max{min{|w| : Aw = x} : x ∈ Image(A), ‖x‖ ≤ 1}`.
pub fn inv_norm(map: &DataMap) -> Result<CertifiedValue, RenegarError> {
    inv_norm_with(map, &OracleOptions::default())
}

pub fn inv_norm_with(map: &DataMap, opts: &OracleOptions) -> Result<CertifiedValue, RenegarError> {
    let (nin, nout) = map.norms();
    let a = &map.a;
    let sv = positive_singular_values(a);
    let Some(&smin) = sv.last() else {
        return Err(RenegarError::ZeroMap);
    };
    if let (NormSpec::L2, NormSpec::L2) = (nin, nout) {
        return Ok(CertifiedValue::exact(
            1.0 / smin,
            Method::ClosedForm,
            Witness::default(),
        ));
    }
    let pre = Preimage::new(a, nin)?;
    if sv.len() == a.rows() {
        if let Some(pts) = nout.polyhedral_ball_points(a.rows()) {
            let mut best = (0.0, Vec::new());
            for p in pts {
                let v = pre.value(&p)?;
                if v > best.0 {
                    best = (v, p);
                }
            }
            let w = Witness {
                x: Some(best.1),
                ..Witness::default()
            };
            return Ok(CertifiedValue::exact(best.0, Method::Enumeration, w));
        }
    }
    // 1/‖A⁻¹‖ = min ‖x‖/min{|w| : Aw = x} over the sphere of Image(A)
    let r = ratio_oracle(
        &Domain::SubspaceSphere {
            basis: orthonormalize(a),
        },
        |x| Ok(padded(nout.value(x)?)),
        |x| {
            Ok(padded(
                pre.value(x)
                    .map_err(|e| MeasureError::Numerical(e.to_string()))?,
            ))
        },
        (nout.l2_to_norm(a.rows()), nin.l2_to_norm(a.cols()) / smin),
        opts,
    )?;
    Ok(reciprocal(r, opts.tol))
}

/// Enclosure of `1/m` from an enclosure of `m ≥ 0`.
fn reciprocal(r: CertifiedExtremum, tol: f64) -> CertifiedValue {
    let lo = if r.hi.is_finite() && r.hi > 0.0 {
        (1.0 / r.hi).next_down()
    } else {
        0.0
    };
    let hi = if r.lo > 0.0 {
        (1.0 / r.lo).next_up()
    } else {
        f64::INFINITY
    };
    CertifiedValue::bracket(
        Interval::new(lo, hi.max(lo)),
        Method::Oracle,
        tol,
        Witness::default(),
    )
}

/// `min{|w| : Aw = x}` for `x ∈ Image(A)`.
enum Preimage {
    Lp(NormSpec),
    Facets {
        /// `QᵀA` for an orthonormal basis `Q` of `Image(A)`.
        qa: Matrix,
        q: Matrix,
        facets: Vec<Vec<f64>>,
    },
}

impl Preimage {
    fn new(a: &Matrix, norm: &NormSpec) -> Result<Preimage, RenegarError> {
        if let Some(p) = norm.as_lp() {
            return Ok(Preimage::Lp(NormSpec::image(a.clone(), p)?));
        }
        if let Some(facets) = norm.polyhedral_ball_facets(a.cols()) {
            let q = orthonormalize(a);
            return Ok(Preimage::Facets {
                qa: q.transpose().matmul(a),
                q,
                facets,
            });
        }
        Err(RenegarError::Unsupported(format!(
            "minimum-norm preimages under {}",
            norm.name()
        )))
    }

    fn value(&self, x: &[f64]) -> Result<f64, RenegarError> {
        match self {
            Preimage::Lp(n) => Ok(n.value(x)?),
            Preimage::Facets { qa, q, facets } => {
                // max −t  s.t.  ⟨f, w⟩ ≤ t,  QᵀAw = Qᵀx
                let m = qa.cols();
                let mut obj = vec![0.0; m + 1];
                obj[m] = -1.0;
                let mut lp = LinearProgram::new(obj);
                for j in 0..=m {
                    lp.free(j);
                }
                let mut row = vec![0.0; m + 1];
                for f in facets {
                    row[..m].copy_from_slice(f);
                    row[m] = -1.0;
                    lp.add_row(&row, Sense::Le, 0.0);
                }
                let qx = q.tr_matvec(x);
                for (i, &b) in qx.iter().enumerate() {
                    row[..m].copy_from_slice(qa.row(i));
                    row[m] = 0.0;
                    lp.add_row(&row, Sense::Eq, b);
                }
                let sol = solve(&lp)?;
                match sol.status {
                    LpStatus::Optimal => Ok((-sol.value).max(0.0)),
                    _ => Err(RenegarError::Numerical("preimage LP failed".into())),
                }
            }
        }
    }
}

/// A rank-one perturbation making the conic system infeasible.
#[derive(Debug, Clone)]
pub struct PerturbationCertificate {
    pub delta_a: Matrix,
    /// `ū ∈ K*` with `(A + ΔA)ᵀū = 0` in the image form; `v̄ ≠ 0` with
    /// `(A + ΔA)ᵀv̄ ∈ K*` in the kernel form.
    pub witness: Vec<f64>,
    /// Enclosure of `‖ΔA‖`.
    pub norm: Interval,
    /// Relative violation of the alternative system, recomputed from
    /// `A + ΔA` itself.
    pub residual: f64,
}

/// Certificate from `ū ∈ K*`: `ΔA = −v̄(Aᵀū)ᵀ` with `‖v̄‖ = 1` and
/// `⟨ū, v̄⟩ = ‖ū‖* = 1`, so `(A + ΔA)ᵀū = 0` and `‖ΔA‖ = |Aᵀū|*`.
pub fn image_certificate(
    map: &DataMap,
    cone: &Cone,
    u: &[f64],
) -> Result<PerturbationCertificate, RenegarError> {
    let u = cone.dual().project(u)?;
    let s = map.e_norm.dual_value(&u)?;
    if s <= 0.0 {
        return Err(RenegarError::Numerical("zero dual witness".into()));
    }
    let u: Vec<f64> = u.iter().map(|c| c / s).collect();
    let v = map.e_norm.dual_attainer(&u)?;
    let g = map.a.tr_matvec(&u);
    let delta = outer(&v, &g, -1.0);
    let norm = Interval::around(map.f_norm.dual_value(&g)? * map.e_norm.value(&v)?, NORM_PAD);
    let perturbed = map.a.add(&delta);
    let scale = map.a.frobenius().max(f64::MIN_POSITIVE) * norm2(&u);
    let residual =
        (norm2(&perturbed.tr_matvec(&u)) / scale).max(cone.dual().distance(&u)? / norm2(&u));
    Ok(PerturbationCertificate {
        delta_a: delta,
        witness: u,
        norm,
        residual,
    })
}

/// Certificate from `v̄ ∈ F` and `ū ∈ K*`: with `ȳ = Aᵀv̄` and `|z̄| = 1`,
/// `⟨v̄, z̄⟩ = |v̄|*`, the map `ΔA = z̄(ū − ȳ)ᵀ/|v̄|*` gives
/// `(A + ΔA)ᵀv̄ = ū`.
pub fn kernel_certificate(
    map: &DataMap,
    cone: &Cone,
    v: &[f64],
    u: &[f64],
) -> Result<PerturbationCertificate, RenegarError> {
    let u = cone.dual().project(u)?;
    let y = map.a.tr_matvec(v);
    let sv = map.f_norm.dual_value(v)?;
    if sv <= 0.0 || norm2(&y) == 0.0 {
        return Err(RenegarError::Numerical("zero kernel witness".into()));
    }
    let z = map.f_norm.dual_attainer(v)?;
    let diff: Vec<f64> = u.iter().zip(&y).map(|(a, b)| a - b).collect();
    let delta = outer(&z, &diff, 1.0 / sv);
    let norm = Interval::around(
        map.f_norm.value(&z)? * map.e_norm.dual_value(&diff)? / sv,
        NORM_PAD,
    );
    let w = map.a.add(&delta).tr_matvec(v);
    let scale = map.a.frobenius() * norm2(v);
    let residual = cone.dual().distance(&w)? / scale;
    Ok(PerturbationCertificate {
        delta_a: delta,
        witness: v.to_vec(),
        norm,
        residual,
    })
}

/// `c·abᵀ`.
fn outer(a: &[f64], b: &[f64], c: f64) -> Matrix {
    let mut m = Matrix::zeros(a.len(), b.len());
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            m[(i, j)] = c * ai * bj;
        }
    }
    m
}

/// The perturbation built from the minimizer of `ν` (image form) or `ν̄`
/// (kernel form).
pub fn construct_perturbation(
    map: &DataMap,
    inst: &ProblemInstance,
    tol: f64,
) -> Result<PerturbationCertificate, RenegarError> {
    check_instance(map, inst)?;
    let m = match map.form {
        Form::Image => measures::nu(inst, tol)?,
        Form::Kernel => measures::nu_bar(inst, tol)?,
    };
    certificate_from(map, inst, &m, tol)
}

fn certificate_from(
    map: &DataMap,
    inst: &ProblemInstance,
    m: &CertifiedValue,
    tol: f64,
) -> Result<PerturbationCertificate, RenegarError> {
    match map.form {
        Form::Image => {
            let u = match &m.witness.u {
                Some(u) => u.clone(),
                // the cutting-plane path reports no dual point
                None => measures::nu_oracle(inst, &OracleOptions::with_tol(tol))?
                    .witness
                    .u
                    .ok_or_else(|| RenegarError::Numerical("no minimizer for ν".into()))?,
            };
            image_certificate(map, &inst.cone, &u)
        }
        Form::Kernel => {
            let y = m
                .witness
                .y
                .clone()
                .ok_or_else(|| RenegarError::Numerical("no minimizer for ν̄".into()))?;
            let u = match &m.witness.u {
                Some(u) => u.clone(),
                None => inst.cone.dual().project(&y)?,
            };
            // ȳ = Aᵀv̄ with v̄ = (AAᵀ)⁻¹Aȳ
            let aat = map.a.matmul(&map.a.transpose());
            let v = solve_linear(&aat, &map.a.matvec(&y)).ok_or(RenegarError::NotSurjective)?;
            kernel_certificate(map, &inst.cone, &v, &u)
        }
    }
}

fn check_instance(map: &DataMap, inst: &ProblemInstance) -> Result<(), RenegarError> {
    if inst.dim() != map.e_dim() {
        return Err(RenegarError::DimensionMismatch(format!(
            "instance has dimension {}, the map's E has {}",
            inst.dim(),
            map.e_dim()
        )));
    }
    if inst.norm.name() != map.e_norm.name() {
        return Err(RenegarError::Unsupported(format!(
            "instance norm {} differs from the map's {}",
            inst.norm.name(),
            map.e_norm.name()
        )));
    }
    let l = map.subspace();
    if !(l.contains_subspace(&inst.subspace, SUBSPACE_TOL)
        && inst.subspace.contains_subspace(&l, SUBSPACE_TOL))
    {
        return Err(RenegarError::Unsupported(
            "instance subspace does not match the data map".into(),
        ));
    }
    Ok(())
}

/// Enclosure of the distance to infeasibility with its ingredients.
#[derive(Debug, Clone)]
pub struct DistanceBounds {
    pub dist: CertifiedValue,
    /// `ν(L)` in the image form, `ν̄(L)` in the kernel form.
    pub measure: CertifiedValue,
    pub op_norm: CertifiedValue,
    pub inv_norm: CertifiedValue,
    pub certificate: PerturbationCertificate,
}

impl DistanceBounds {
    fn assemble(
        measure: CertifiedValue,
        op_norm: CertifiedValue,
        inv_norm: CertifiedValue,
        certificate: PerturbationCertificate,
        tol: f64,
    ) -> DistanceBounds {
        let m = measure.interval();
        let lo = m.div(inv_norm.interval()).lo.max(0.0);
        let hi = m.mul(op_norm.interval()).hi.min(certificate.norm.hi);
        // both ends are valid bounds, so crossing can only be rounding
        let dist = CertifiedValue::bracket(
            Interval::new(lo.min(hi), hi),
            Method::Bound,
            tol,
            Witness::default(),
        );
        DistanceBounds {
            dist,
            measure,
            op_norm,
            inv_norm,
            certificate,
        }
    }

    /// Seeded random search for a smaller certificate; lowers the upper
    /// bound when one is found. Returns whether it improved.
    pub fn tighten(
        &mut self,
        map: &DataMap,
        cone: &Cone,
        seed: u64,
        rounds: usize,
    ) -> Result<bool, RenegarError> {
        let Some(c) = random_certificate(map, cone, seed, rounds)? else {
            return Ok(false);
        };
        if c.norm.hi >= self.certificate.norm.hi {
            return Ok(false);
        }
        let hi = self.dist.upper.min(c.norm.hi);
        self.dist = CertifiedValue::bracket(
            Interval::new(self.dist.lower.min(hi), hi),
            Method::Bound,
            self.dist.tol,
            Witness::default(),
        );
        self.certificate = c;
        Ok(true)
    }
}

/// `dist(A, 𝓘)` for `L = Image(A)`.
pub fn dist_bounds(
    map: &DataMap,
    inst: &ProblemInstance,
    tol: f64,
) -> Result<DistanceBounds, RenegarError> {
    if map.form != Form::Image {
        return Err(RenegarError::Unsupported(
            "dist_bounds needs the image form".into(),
        ));
    }
    check_instance(map, inst)?;
    let nu = measures::nu(inst, tol)?;
    if nu.estimate <= tol {
        return Err(RenegarError::NotStrictlyFeasible);
    }
    let opts = OracleOptions::with_tol(tol);
    let op = op_norm_with(map, &opts)?;
    let inv = inv_norm_with(map, &opts)?;
    let cert = certificate_from(map, inst, &nu, tol)?;
    Ok(DistanceBounds::assemble(nu, op, inv, cert, tol))
}

/// `d̄ist(A, 𝓘)` for `L = ker(A)` with `A` surjective.
pub fn dist_bar_bounds(
    map: &DataMap,
    inst: &ProblemInstance,
    tol: f64,
) -> Result<DistanceBounds, RenegarError> {
    if map.form != Form::Kernel {
        return Err(RenegarError::Unsupported(
            "dist_bar_bounds needs the kernel form".into(),
        ));
    }
    if !map.is_surjective() {
        return Err(RenegarError::NotSurjective);
    }
    check_instance(map, inst)?;
    if inst.subspace.dim() == 0 {
        return Err(RenegarError::NotStrictlyFeasible);
    }
    let nu_bar = measures::nu_bar(inst, tol)?;
    if nu_bar.estimate <= tol {
        return Err(RenegarError::NotStrictlyFeasible);
    }
    let opts = OracleOptions::with_tol(tol);
    let op = op_norm_with(map, &opts)?;
    let inv = inv_norm_with(map, &opts)?;
    let cert = certificate_from(map, inst, &nu_bar, tol)?;
    Ok(DistanceBounds::assemble(nu_bar, op, inv, cert, tol))
}

/// Bounds for whichever form the map has.
pub fn distance_bounds(
    map: &DataMap,
    inst: &ProblemInstance,
    tol: f64,
) -> Result<DistanceBounds, RenegarError> {
    match map.form {
        Form::Image => dist_bounds(map, inst, tol),
        Form::Kernel => dist_bar_bounds(map, inst, tol),
    }
}

/// Smallest certificate among random dual points, refined around the
/// incumbent with geometrically shrinking steps.
fn random_certificate(
    map: &DataMap,
    cone: &Cone,
    seed: u64,
    rounds: usize,
) -> Result<Option<PerturbationCertificate>, RenegarError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = match map.form {
        Form::Image => map.e_dim(),
        Form::Kernel => map.f_dim(),
    };
    let gauss = |rng: &mut ChaCha8Rng| -> Vec<f64> {
        (0..dim).map(|_| StandardNormal.sample(rng)).collect()
    };
    let build = |p: &[f64]| -> Option<PerturbationCertificate> {
        let c = match map.form {
            Form::Image => image_certificate(map, cone, p),
            Form::Kernel => {
                let y = map.a.tr_matvec(p);
                cone.dual()
                    .project(&y)
                    .map_err(RenegarError::from)
                    .and_then(|u| kernel_certificate(map, cone, p, &u))
            }
        };
        c.ok().filter(|c| c.norm.hi.is_finite())
    };
    let mut best: Option<(Vec<f64>, PerturbationCertificate)> = None;
    let consider = |p: Vec<f64>, best: &mut Option<(Vec<f64>, PerturbationCertificate)>| {
        if let Some(c) = build(&p) {
            if best.as_ref().map_or(true, |(_, b)| c.norm.hi < b.norm.hi) {
                *best = Some((p, c));
            }
        }
    };
    for _ in 0..rounds {
        let p = gauss(&mut rng);
        consider(p, &mut best);
    }
    let mut step = 0.5;
    for _ in 0..rounds {
        let Some((p, _)) = &best else { break };
        let r = norm2(p);
        let q: Vec<f64> = p
            .iter()
            .zip(gauss(&mut rng))
            .map(|(a, g)| a + step * r * g)
            .collect();
        consider(q, &mut best);
        step *= 0.97;
    }
    Ok(best.map(|(_, c)| c))
}
