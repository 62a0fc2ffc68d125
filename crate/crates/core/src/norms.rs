//! Norms on the ambient space: ℓ1, ℓ2, ℓ∞, the norm induced by a cone and
//! an interior point, and the norms transported through a linear map.
//!
//! Each norm knows its value, its dual value, a dual attainer (a unit vector
//! realizing the dual norm), a subgradient, and two norm-equivalence
//! constants against ℓ2. The support function of the unit ball restricted
//! to a subspace is computed exactly where the ball is polyhedral or
//! Euclidean and by cutting planes otherwise.

use thiserror::Error;

use crate::cones::{Cone, ConeError, InteriorPoint};
use crate::kelley::{Cut, Kelley};
use crate::linalg::{
    complement_basis, dot, norm1, norm2, norm_inf, orthonormalize, pinv, singular_values, smat,
    solve as solve_linear, svec, sym_eigen, LinalgError, Matrix,
};
use crate::lp::{solve, LinearProgram, LpError, LpStatus, Sense};

const DOMAIN_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NormError {
    #[error("vector lies outside the norm's domain (residual {0:e})")]
    DomainViolation(f64),
    #[error("unsupported norm: {0}")]
    UnsupportedNorm(String),
    #[error("map is not surjective")]
    NotSurjective,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Cone(#[from] ConeError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Inner norm for the transported norms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lp {
    L1,
    L2,
    Linf,
}

impl Lp {
    pub fn name(self) -> &'static str {
        match self {
            Lp::L1 => "l1",
            Lp::L2 => "l2",
            Lp::Linf => "linf",
        }
    }

    pub fn dual(self) -> Lp {
        match self {
            Lp::L1 => Lp::Linf,
            Lp::L2 => Lp::L2,
            Lp::Linf => Lp::L1,
        }
    }

    pub fn value(self, x: &[f64]) -> f64 {
        match self {
            Lp::L1 => norm1(x),
            Lp::L2 => norm2(x),
            Lp::Linf => norm_inf(x),
        }
    }

    pub fn dual_value(self, u: &[f64]) -> f64 {
        self.dual().value(u)
    }

    /// `x` with `value(x) ≤ 1` and `⟨u, x⟩ = dual_value(u)`.
    pub fn dual_attainer(self, u: &[f64]) -> Vec<f64> {
        let n = u.len();
        match self {
            Lp::L2 => {
                let r = norm2(u);
                if r == 0.0 {
                    vec![0.0; n]
                } else {
                    u.iter().map(|v| v / r).collect()
                }
            }
            Lp::Linf => u.iter().map(|&v| sign(v)).collect(),
            Lp::L1 => {
                let mut x = vec![0.0; n];
                if let Some(k) = argmax_abs(u) {
                    x[k] = sign(u[k]);
                }
                x
            }
        }
    }

    /// `g` with `dual_value(g) ≤ 1` and `⟨g, x⟩ = value(x)`.
    pub fn subgradient(self, x: &[f64]) -> Vec<f64> {
        self.dual().dual_attainer(x)
    }

    /// `max{value(x) : ‖x‖₂ ≤ 1}` in dimension `n`.
    pub fn l2_to_norm(self, n: usize) -> f64 {
        match self {
            Lp::L1 => (n as f64).sqrt(),
            _ => 1.0,
        }
    }

    /// `max{‖x‖₂ : value(x) ≤ 1}` in dimension `n`.
    pub fn norm_to_l2(self, n: usize) -> f64 {
        match self {
            Lp::Linf => (n as f64).sqrt(),
            _ => 1.0,
        }
    }
}

fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn argmax_abs(u: &[f64]) -> Option<usize> {
    (0..u.len()).max_by(|&a, &b| u[a].abs().total_cmp(&u[b].abs()))
}

/// `‖x‖ₑ = min{α ≥ 0 : x ± αe ∈ K}`.
#[derive(Debug, Clone)]
pub struct InducedNorm {
    pub cone: Cone,
    pub e: InteriorPoint,
    e_half: Option<Matrix>,
    e_inv_half: Option<Matrix>,
    /// Vertices of the unit ball for the wedge (a parallelogram).
    wedge_vertices: Vec<Vec<f64>>,
}

impl InducedNorm {
    pub fn new(cone: Cone, e: Vec<f64>) -> Result<Self, NormError> {
        cone.validate()?;
        let e = cone.interior_point(e)?;
        let mut out = InducedNorm {
            cone,
            e,
            e_half: None,
            e_inv_half: None,
            wedge_vertices: Vec::new(),
        };
        match cone {
            Cone::Psd(n) => {
                let eig = sym_eigen(&smat(&out.e.e, n))?;
                out.e_half = Some(eig.reconstruct_with(f64::sqrt));
                out.e_inv_half = Some(eig.reconstruct_with(|l| 1.0 / l.sqrt()));
            }
            Cone::SecondOrder(n) => {
                if norm2(&out.e.e[..n - 1]) != 0.0 {
                    return Err(NormError::UnsupportedNorm(
                        "second-order induced norm needs e on the cone axis".into(),
                    ));
                }
            }
            Cone::Wedge(_) => {
                // ±e and the two crossings of the boundary rays through ±e
                let e = out.e.e.clone();
                let g = cone.generators().unwrap();
                let mut verts = vec![e.clone(), e.iter().map(|v| -v).collect()];
                for (a, b) in [(0, 1), (1, 0)] {
                    // −e + s·g_a = e − t·g_b
                    let m = Matrix::from_rows(&[vec![g[a][0], g[b][0]], vec![g[a][1], g[b][1]]]);
                    let st = solve_linear(&m, &[2.0 * e[0], 2.0 * e[1]])
                        .ok_or(NormError::UnsupportedNorm("degenerate wedge".into()))?;
                    verts.push(vec![-e[0] + st[0] * g[a][0], -e[1] + st[0] * g[a][1]]);
                }
                out.wedge_vertices = verts;
            }
            Cone::Orthant(_) => {}
        }
        Ok(out)
    }

    /// Vertices of the unit ball when it is a polygon (wedge only).
    pub fn ball_vertices(&self) -> &[Vec<f64>] {
        &self.wedge_vertices
    }

    fn axis_scale(&self) -> f64 {
        *self.e.e.last().unwrap()
    }

    fn value(&self, x: &[f64]) -> f64 {
        match self.cone {
            Cone::Orthant(_) => x
                .iter()
                .zip(&self.e.e)
                .map(|(v, e)| v.abs() / e)
                .fold(0.0, f64::max),
            Cone::Wedge(_) => self
                .cone
                .facet_normals()
                .unwrap()
                .iter()
                .map(|r| dot(r, x).abs() / dot(r, &self.e.e))
                .fold(0.0, f64::max),
            Cone::SecondOrder(n) => (norm2(&x[..n - 1]) + x[n - 1].abs()) / self.axis_scale(),
            Cone::Psd(n) => {
                let w = self.e_inv_half.as_ref().unwrap();
                let m = w.matmul(&smat(x, n)).matmul(w);
                let eig = sym_eigen(&crate::cones::symmetrize(&m)).expect("symmetric");
                eig.min().abs().max(eig.max().abs())
            }
        }
    }

    fn dual_value(&self, u: &[f64]) -> f64 {
        match self.cone {
            Cone::Orthant(_) => u.iter().zip(&self.e.e).map(|(v, e)| v.abs() * e).sum(),
            Cone::Wedge(_) => self
                .wedge_vertices
                .iter()
                .map(|v| dot(u, v).abs())
                .fold(0.0, f64::max),
            Cone::SecondOrder(n) => norm2(&u[..n - 1]).max(u[n - 1].abs()) * self.axis_scale(),
            Cone::Psd(n) => {
                let h = self.e_half.as_ref().unwrap();
                let m = h.matmul(&smat(u, n)).matmul(h);
                let eig = sym_eigen(&crate::cones::symmetrize(&m)).expect("symmetric");
                eig.values.iter().map(|l| l.abs()).sum()
            }
        }
    }

    fn dual_attainer(&self, u: &[f64]) -> Vec<f64> {
        match self.cone {
            Cone::Orthant(_) => u.iter().zip(&self.e.e).map(|(v, e)| sign(*v) * e).collect(),
            Cone::Wedge(_) => {
                let best = self
                    .wedge_vertices
                    .iter()
                    .max_by(|a, b| dot(u, a).abs().total_cmp(&dot(u, b).abs()))
                    .unwrap();
                let s = if dot(u, best) < 0.0 { -1.0 } else { 1.0 };
                best.iter().map(|v| s * v).collect()
            }
            Cone::SecondOrder(n) => {
                let c = self.axis_scale();
                let bar = norm2(&u[..n - 1]);
                let mut x = vec![0.0; n];
                if bar >= u[n - 1].abs() && bar > 0.0 {
                    for i in 0..n - 1 {
                        x[i] = c * u[i] / bar;
                    }
                } else {
                    x[n - 1] = c * sign(u[n - 1]);
                }
                x
            }
            Cone::Psd(n) => {
                let h = self.e_half.as_ref().unwrap();
                let m = h.matmul(&smat(u, n)).matmul(h);
                let eig = sym_eigen(&crate::cones::symmetrize(&m)).expect("symmetric");
                let s = eig.reconstruct_with(sign);
                svec(&crate::cones::symmetrize(&h.matmul(&s).matmul(h)))
            }
        }
    }

    fn subgradient(&self, x: &[f64]) -> Vec<f64> {
        match self.cone {
            Cone::Orthant(_) | Cone::Wedge(_) => {
                let normals = self.cone.facet_normals().unwrap();
                let scores: Vec<f64> = normals
                    .iter()
                    .map(|r| dot(r, x) / dot(r, &self.e.e))
                    .collect();
                let k = argmax_abs(&scores).unwrap();
                let scale = sign(scores[k]) / dot(&normals[k], &self.e.e);
                normals[k].iter().map(|v| v * scale).collect()
            }
            Cone::SecondOrder(n) => {
                let c = self.axis_scale();
                let bar = norm2(&x[..n - 1]);
                let mut g = vec![0.0; n];
                if bar > 0.0 {
                    for i in 0..n - 1 {
                        g[i] = x[i] / bar / c;
                    }
                }
                g[n - 1] = sign(x[n - 1]) / c;
                g
            }
            Cone::Psd(n) => {
                let w = self.e_inv_half.as_ref().unwrap();
                let m = w.matmul(&smat(x, n)).matmul(w);
                let eig = sym_eigen(&crate::cones::symmetrize(&m)).expect("symmetric");
                let (k, s) = if eig.max().abs() >= eig.min().abs() {
                    (n - 1, sign(eig.max()))
                } else {
                    (0, -1.0)
                };
                let q = w.matvec(&eig.vectors.col(k));
                let mut g = Matrix::zeros(n, n);
                for i in 0..n {
                    for j in 0..n {
                        g[(i, j)] = s * q[i] * q[j];
                    }
                }
                svec(&g)
            }
        }
    }

    fn l2_to_norm(&self) -> f64 {
        1.0 / self.e.margin
    }

    fn norm_to_l2(&self) -> f64 {
        match self.cone {
            Cone::Orthant(_) => norm2(&self.e.e),
            Cone::Wedge(_) => self
                .wedge_vertices
                .iter()
                .map(|v| norm2(v))
                .fold(0.0, f64::max),
            Cone::SecondOrder(_) => self.axis_scale(),
            Cone::Psd(n) => {
                let eig = sym_eigen(&smat(&self.e.e, n)).expect("symmetric");
                eig.max() * (n as f64).sqrt()
            }
        }
    }
}

/// Minimum-norm preimage norm on `Image(A)`: `‖x‖ = min{|w| : Aw = x}`.
#[derive(Debug, Clone)]
pub struct ImageNorm {
    pub a: Matrix,
    pub inner: Lp,
    /// Orthonormal basis of `Image(A)`.
    range: Matrix,
    a_pinv: Matrix,
    sigma_max: f64,
    sigma_min: f64,
}

/// `⫼x⫼ = |Ax|` on `ker(A)⊥`, for surjective `A`.
#[derive(Debug, Clone)]
pub struct KernelNorm {
    pub a: Matrix,
    pub inner: Lp,
    /// Orthonormal basis of `ker(A)⊥`.
    rowspace: Matrix,
    /// `(AAᵀ)⁻¹A`.
    left: Matrix,
    sigma_max: f64,
    sigma_min: f64,
}

#[derive(Debug, Clone)]
pub enum NormSpec {
    L1,
    L2,
    Linf,
    Induced(InducedNorm),
    Image(ImageNorm),
    Kernel(KernelNorm),
}

/// Result of maximizing `⟨u, x⟩` over the unit ball restricted to a
/// subspace: a bracket `[lo, hi]` and a feasible maximizer attaining `lo`.
#[derive(Debug, Clone)]
pub struct Support {
    pub lo: f64,
    pub hi: f64,
    pub argmax: Vec<f64>,
    pub exact: bool,
}

fn positive_singular_values(a: &Matrix) -> Vec<f64> {
    let sv = singular_values(a);
    let top = sv.first().copied().unwrap_or(0.0);
    sv.into_iter().filter(|&s| s > 1e-12 * top).collect()
}

impl NormSpec {
    pub fn from_lp(p: Lp) -> NormSpec {
        match p {
            Lp::L1 => NormSpec::L1,
            Lp::L2 => NormSpec::L2,
            Lp::Linf => NormSpec::Linf,
        }
    }

    pub fn induced(cone: Cone, e: Vec<f64>) -> Result<NormSpec, NormError> {
        Ok(NormSpec::Induced(InducedNorm::new(cone, e)?))
    }

    pub fn induced_canonical(cone: Cone) -> Result<NormSpec, NormError> {
        NormSpec::induced(cone, cone.canonical_e())
    }

    pub fn image(a: Matrix, inner: Lp) -> Result<NormSpec, NormError> {
        let sv = positive_singular_values(&a);
        if sv.is_empty() {
            return Err(NormError::UnsupportedNorm(
                "image norm of the zero map".into(),
            ));
        }
        Ok(NormSpec::Image(ImageNorm {
            range: orthonormalize(&a),
            a_pinv: pinv(&a),
            sigma_max: sv[0],
            sigma_min: *sv.last().unwrap(),
            a,
            inner,
        }))
    }

    pub fn kernel(a: Matrix, inner: Lp) -> Result<NormSpec, NormError> {
        let sv = positive_singular_values(&a);
        if sv.len() < a.rows() || a.rows() == 0 {
            return Err(NormError::NotSurjective);
        }
        let aat = a.matmul(&a.transpose());
        let aat_inv = pinv(&aat);
        Ok(NormSpec::Kernel(KernelNorm {
            rowspace: orthonormalize(&a.transpose()),
            left: aat_inv.matmul(&a),
            sigma_max: sv[0],
            sigma_min: *sv.last().unwrap(),
            a,
            inner,
        }))
    }

    pub fn name(&self) -> String {
        match self {
            NormSpec::L1 => "l1".into(),
            NormSpec::L2 => "l2".into(),
            NormSpec::Linf => "linf".into(),
            NormSpec::Induced(n) => format!("induced[{}]", n.cone.name()),
            NormSpec::Image(n) => format!("image[{}]", n.inner.name()),
            NormSpec::Kernel(n) => format!("kernel[{}]", n.inner.name()),
        }
    }

    pub fn as_lp(&self) -> Option<Lp> {
        match self {
            NormSpec::L1 => Some(Lp::L1),
            NormSpec::L2 => Some(Lp::L2),
            NormSpec::Linf => Some(Lp::Linf),
            _ => None,
        }
    }

    /// Ambient dimension the norm is tied to, if any.
    pub fn dim(&self) -> Option<usize> {
        match self {
            NormSpec::Induced(n) => Some(n.cone.ambient_dim()),
            NormSpec::Image(n) => Some(n.a.rows()),
            NormSpec::Kernel(n) => Some(n.a.cols()),
            _ => None,
        }
    }

    pub fn is_polyhedral(&self) -> bool {
        match self {
            NormSpec::L1 | NormSpec::Linf => true,
            NormSpec::L2 => false,
            NormSpec::Induced(n) => n.cone.is_polyhedral(),
            NormSpec::Image(n) => n.inner != Lp::L2,
            NormSpec::Kernel(n) => n.inner != Lp::L2,
        }
    }

    fn check_dim(&self, x: &[f64]) -> Result<(), NormError> {
        match self.dim() {
            Some(d) if d != x.len() => Err(NormError::DimensionMismatch {
                expected: d,
                got: x.len(),
            }),
            _ => Ok(()),
        }
    }

    /// Orthonormal basis of the subspace the norm lives on, when it is not
    /// the whole space.
    pub fn domain_basis(&self) -> Option<&Matrix> {
        match self {
            NormSpec::Image(n) => Some(&n.range),
            NormSpec::Kernel(n) => Some(&n.rowspace),
            _ => None,
        }
    }

    /// Distance from `x` to the norm's domain.
    pub fn domain_residual(&self, x: &[f64]) -> f64 {
        match self.domain_basis() {
            None => 0.0,
            Some(b) => {
                let p = b.matvec(&b.tr_matvec(x));
                norm2(&x.iter().zip(&p).map(|(a, c)| a - c).collect::<Vec<_>>())
            }
        }
    }

    fn check_domain(&self, x: &[f64]) -> Result<(), NormError> {
        let r = self.domain_residual(x);
        if r > DOMAIN_TOL * (1.0 + norm2(x)) {
            return Err(NormError::DomainViolation(r));
        }
        Ok(())
    }

    pub fn value(&self, x: &[f64]) -> Result<f64, NormError> {
        self.check_dim(x)?;
        Ok(match self {
            NormSpec::L1 => norm1(x),
            NormSpec::L2 => norm2(x),
            NormSpec::Linf => norm_inf(x),
            NormSpec::Induced(n) => n.value(x),
            NormSpec::Image(n) => {
                self.check_domain(x)?;
                image_preimage_norm(n, x)?
            }
            NormSpec::Kernel(n) => {
                self.check_domain(x)?;
                n.inner.value(&n.a.matvec(x))
            }
        })
    }

    /// `max{⟨u, x⟩ : ‖x‖ ≤ 1}` over the norm's domain.
    pub fn dual_value(&self, u: &[f64]) -> Result<f64, NormError> {
        self.check_dim(u)?;
        Ok(match self {
            NormSpec::L1 => norm_inf(u),
            NormSpec::L2 => norm2(u),
            NormSpec::Linf => norm1(u),
            NormSpec::Induced(n) => n.dual_value(u),
            NormSpec::Image(n) => n.inner.dual_value(&n.a.tr_matvec(u)),
            NormSpec::Kernel(n) => n.inner.dual_value(&n.left.matvec(u)),
        })
    }

    /// `x` in the domain with `‖x‖ ≤ 1` and `⟨u, x⟩ = ‖u‖*`.
    pub fn dual_attainer(&self, u: &[f64]) -> Result<Vec<f64>, NormError> {
        self.check_dim(u)?;
        Ok(match self {
            NormSpec::L1 => Lp::L1.dual_attainer(u),
            NormSpec::L2 => Lp::L2.dual_attainer(u),
            NormSpec::Linf => Lp::Linf.dual_attainer(u),
            NormSpec::Induced(n) => n.dual_attainer(u),
            NormSpec::Image(n) => {
                let w = n.inner.dual_attainer(&n.a.tr_matvec(u));
                n.a.matvec(&w)
            }
            NormSpec::Kernel(n) => {
                let z = n.inner.dual_attainer(&n.left.matvec(u));
                n.left.tr_matvec(&z)
            }
        })
    }

    /// `g` with `‖g‖* ≤ 1` and `⟨g, x⟩ = ‖x‖`.
    pub fn subgradient(&self, x: &[f64]) -> Result<Vec<f64>, NormError> {
        self.check_dim(x)?;
        Ok(match self {
            NormSpec::L1 => Lp::L1.subgradient(x),
            NormSpec::L2 => Lp::L2.subgradient(x),
            NormSpec::Linf => Lp::Linf.subgradient(x),
            NormSpec::Induced(n) => n.subgradient(x),
            NormSpec::Image(n) => {
                self.check_domain(x)?;
                image_subgradient(n, x)?
            }
            NormSpec::Kernel(n) => {
                self.check_domain(x)?;
                let h = n.inner.subgradient(&n.a.matvec(x));
                n.a.tr_matvec(&h)
            }
        })
    }

    /// `max{‖x‖ : ‖x‖₂ ≤ 1}` over the domain (an upper bound where not exact).
    pub fn l2_to_norm(&self, n: usize) -> f64 {
        match self {
            NormSpec::L1 => Lp::L1.l2_to_norm(n),
            NormSpec::L2 => 1.0,
            NormSpec::Linf => 1.0,
            NormSpec::Induced(k) => k.l2_to_norm(),
            NormSpec::Image(k) => k.inner.l2_to_norm(k.a.cols()) / k.sigma_min,
            NormSpec::Kernel(k) => k.inner.l2_to_norm(k.a.rows()) * k.sigma_max,
        }
    }

    /// `max{‖x‖₂ : ‖x‖ ≤ 1}` over the domain (an upper bound where not exact).
    pub fn norm_to_l2(&self, n: usize) -> f64 {
        match self {
            NormSpec::L1 => 1.0,
            NormSpec::L2 => 1.0,
            NormSpec::Linf => Lp::Linf.norm_to_l2(n),
            NormSpec::Induced(k) => k.norm_to_l2(),
            NormSpec::Image(k) => k.inner.norm_to_l2(k.a.cols()) * k.sigma_max,
            NormSpec::Kernel(k) => k.inner.norm_to_l2(k.a.rows()) / k.sigma_min,
        }
    }

    /// `max{⟨u, x⟩ : x ∈ span(basis), ‖x‖ ≤ 1}` for an orthonormal basis.
    pub fn support_over_ball(&self, u: &[f64], basis: &Matrix) -> Result<f64, NormError> {
        Ok(self.support(u, basis)?.lo)
    }

    /// Bracketed support value with a maximizer.
    pub fn support(&self, u: &[f64], basis: &Matrix) -> Result<Support, NormError> {
        self.check_dim(u)?;
        let n = u.len();
        let d = basis.cols();
        if basis.rows() != n {
            return Err(NormError::DimensionMismatch {
                expected: n,
                got: basis.rows(),
            });
        }
        if d == 0 {
            return Ok(exact(0.0, vec![0.0; n]));
        }
        if let Some(dom) = self.domain_basis() {
            for b in basis.columns() {
                let p = dom.matvec(&dom.tr_matvec(&b));
                let r = norm2(&b.iter().zip(&p).map(|(a, c)| a - c).collect::<Vec<_>>());
                if r > DOMAIN_TOL {
                    return Err(NormError::UnsupportedNorm(
                        "subspace is not contained in the norm's domain".into(),
                    ));
                }
            }
        }
        let c = basis.tr_matvec(u);
        if let NormSpec::L2 = self {
            let r = norm2(&c);
            let x = if r > 0.0 {
                basis.matvec(&c.iter().map(|v| v / r).collect::<Vec<_>>())
            } else {
                vec![0.0; n]
            };
            return Ok(exact(r, x));
        }
        if d == 1 {
            let b = basis.col(0);
            let nb = self.value(&b)?;
            let s = if c[0] < 0.0 { -1.0 } else { 1.0 };
            let x: Vec<f64> = b.iter().map(|v| s * v / nb).collect();
            return Ok(exact(c[0].abs() / nb, x));
        }
        if d == n && self.domain_basis().is_none() {
            let x = self.dual_attainer(u)?;
            return Ok(exact(self.dual_value(u)?, x));
        }
        match self {
            NormSpec::L1 => {
                let rows: Vec<Vec<f64>> = (0..n).map(|i| basis.row(i).to_vec()).collect();
                poly_support(&c, &rows, Lp::L1, &[], basis)
            }
            NormSpec::Linf => {
                let rows: Vec<Vec<f64>> = (0..n).map(|i| basis.row(i).to_vec()).collect();
                poly_support(&c, &rows, Lp::Linf, &[], basis)
            }
            NormSpec::Induced(k) if k.cone.is_polyhedral() => {
                let rows: Vec<Vec<f64>> = k
                    .cone
                    .facet_normals()
                    .unwrap()
                    .iter()
                    .map(|r| {
                        let s = dot(r, &k.e.e);
                        basis.tr_matvec(r).iter().map(|v| v / s).collect()
                    })
                    .collect();
                poly_support(&c, &rows, Lp::Linf, &[], basis)
            }
            NormSpec::Induced(_) => self.kelley_support(u, basis),
            NormSpec::Kernel(k) => {
                let m = k.a.matmul(basis);
                if k.inner == Lp::L2 {
                    // max ⟨c, z⟩ s.t. ‖Mz‖₂ ≤ 1 with M injective on L
                    let mp = pinv(&m);
                    let y = mp.tr_matvec(&c);
                    let r = norm2(&y);
                    if r == 0.0 {
                        return Ok(exact(0.0, vec![0.0; n]));
                    }
                    let z = mp.matvec(&y.iter().map(|v| v / r).collect::<Vec<_>>());
                    return Ok(exact(r, basis.matvec(&z)));
                }
                poly_support(&c, &m.to_rows(), k.inner, &[], basis)
            }
            NormSpec::Image(k) => {
                // maximize ⟨Aᵀu, w⟩ over |w| ≤ 1 with Aw ∈ L
                let perp = complement_basis(basis);
                let mut ca = perp.transpose().matmul(&k.a);
                if ca.max_abs() <= 1e-12 * k.a.max_abs() {
                    ca = Matrix::zeros(0, k.a.cols());
                }
                let aw_u = k.a.tr_matvec(u);
                let kdim = k.a.cols();
                if k.inner == Lp::L2 {
                    let null = complement_basis(&orthonormalize(&ca.transpose()));
                    let p = null.matvec(&null.tr_matvec(&aw_u));
                    let r = norm2(&p);
                    if r == 0.0 {
                        return Ok(exact(0.0, vec![0.0; n]));
                    }
                    let w: Vec<f64> = p.iter().map(|v| v / r).collect();
                    return Ok(exact(r, k.a.matvec(&w)));
                }
                let ident = Matrix::identity(kdim);
                let s = poly_support(&aw_u, &ident.to_rows(), k.inner, &ca.to_rows(), &ident)?;
                let x = k.a.matvec(&s.argmax);
                Ok(Support { argmax: x, ..s })
            }
            NormSpec::L2 => unreachable!(),
        }
    }

    fn kelley_support(&self, u: &[f64], basis: &Matrix) -> Result<Support, NormError> {
        let d = basis.cols();
        let c = basis.tr_matvec(u);
        let radius = self.norm_to_l2(u.len());
        let scale = 1.0 + norm2(&c) * radius;
        let cut_at = |z: &[f64]| -> Option<Cut> {
            let x = basis.matvec(z);
            let g = self.subgradient(&x).ok()?;
            Some(Cut {
                a: basis.tr_matvec(&g),
                b: 1.0,
            })
        };
        let mut cuts = Vec::new();
        for i in 0..d {
            for s in [1.0, -1.0] {
                let mut z = vec![0.0; d];
                z[i] = s;
                cuts.extend(cut_at(&z));
            }
        }
        let result = Kelley {
            objective: c.clone(),
            bounds: vec![(-radius, radius); d],
            cuts,
            separate: Box::new(|z: &[f64]| {
                let x = basis.matvec(z);
                match self.value(&x) {
                    Ok(v) if v > 1.0 + 1e-13 => cut_at(z).into_iter().collect(),
                    _ => Vec::new(),
                }
            }),
            recover: Box::new(|z: &[f64]| {
                let x = basis.matvec(z);
                let v = self.value(&x).ok()?;
                let s = v.max(1.0);
                let zs: Vec<f64> = z.iter().map(|t| t / s).collect();
                Some((dot(&c, &zs), zs))
            }),
            tol: 1e-10 * scale,
            max_iter: 400,
        }
        .run()?;
        Ok(Support {
            lo: result.lo.max(0.0),
            hi: result.hi.max(0.0),
            argmax: basis.matvec(&result.point),
            exact: false,
        })
    }
}

/// Polyhedral descriptions, available when the ball (and so its dual) is a
/// polytope.
impl NormSpec {
    /// Rows `a_k` with `‖w‖* = max_k |⟨a_k, w⟩|` (`false`) or
    /// `Σ_k |⟨a_k, w⟩|` (`true`). On a restricted domain this is the dual
    /// seminorm `max{⟨w, x⟩ : x in the domain, ‖x‖ ≤ 1}`.
    pub fn polyhedral_dual_rows(&self, n: usize) -> Option<(Vec<Vec<f64>>, bool)> {
        let units = |w: &dyn Fn(usize) -> f64| -> Vec<Vec<f64>> {
            (0..n)
                .map(|i| {
                    let mut r = vec![0.0; n];
                    r[i] = w(i);
                    r
                })
                .collect()
        };
        // inner ℓ1 has an ℓ∞ dual (sup type), inner ℓ∞ an ℓ1 dual (sum type)
        let sum_type = |p: Lp| match p {
            Lp::L1 => Some(false),
            Lp::Linf => Some(true),
            Lp::L2 => None,
        };
        match self {
            NormSpec::L1 => Some((units(&|_| 1.0), false)),
            NormSpec::Linf => Some((units(&|_| 1.0), true)),
            NormSpec::L2 => None,
            NormSpec::Induced(k) => match k.cone {
                Cone::Orthant(_) => Some((units(&|i| k.e.e[i]), true)),
                Cone::Wedge(_) => Some((dedup_pm(k.ball_vertices().to_vec()), false)),
                _ => None,
            },
            NormSpec::Image(k) => Some((k.a.columns(), sum_type(k.inner)?)),
            NormSpec::Kernel(k) => Some((k.left.to_rows(), sum_type(k.inner)?)),
        }
    }

    /// Points whose convex hull is the unit ball (within the domain).
    pub fn polyhedral_ball_points(&self, n: usize) -> Option<Vec<Vec<f64>>> {
        let inner_vertices = |p: Lp, m: usize| -> Option<Vec<Vec<f64>>> {
            match p {
                Lp::L1 => Some(signed_units(m, &vec![1.0; m])),
                Lp::Linf => Some(sign_vectors(m, &vec![1.0; m])),
                Lp::L2 => None,
            }
        };
        match self {
            NormSpec::L1 => Some(signed_units(n, &vec![1.0; n])),
            NormSpec::Linf => Some(sign_vectors(n, &vec![1.0; n])),
            NormSpec::L2 => None,
            NormSpec::Induced(k) => match k.cone {
                Cone::Orthant(_) => Some(sign_vectors(n, &k.e.e)),
                Cone::Wedge(_) => Some(k.ball_vertices().to_vec()),
                _ => None,
            },
            NormSpec::Image(k) => Some(
                inner_vertices(k.inner, k.a.cols())?
                    .iter()
                    .map(|w| k.a.matvec(w))
                    .collect(),
            ),
            NormSpec::Kernel(k) => Some(
                inner_vertices(k.inner, k.a.rows())?
                    .iter()
                    .map(|z| k.left.tr_matvec(z))
                    .collect(),
            ),
        }
    }

    /// Rows `a` with `ball = {x : ⟨a, x⟩ ≤ 1 for all a}`, for full-space
    /// polyhedral norms.
    pub fn polyhedral_ball_facets(&self, n: usize) -> Option<Vec<Vec<f64>>> {
        match self {
            NormSpec::L1 => Some(sign_vectors(n, &vec![1.0; n])),
            NormSpec::Linf => Some(signed_units(n, &vec![1.0; n])),
            NormSpec::Induced(k) if k.cone.is_polyhedral() => {
                let mut out = Vec::new();
                for r in k.cone.facet_normals().unwrap() {
                    let s = dot(&r, &k.e.e);
                    out.push(r.iter().map(|v| v / s).collect());
                    out.push(r.iter().map(|v| -v / s).collect());
                }
                Some(out)
            }
            _ => None,
        }
    }
}

/// `±w_i e_i`.
fn signed_units(n: usize, w: &[f64]) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(2 * n);
    for i in 0..n {
        for s in [1.0, -1.0] {
            let mut r = vec![0.0; n];
            r[i] = s * w[i];
            out.push(r);
        }
    }
    out
}

/// All `(±w_1, …, ±w_n)`.
fn sign_vectors(n: usize, w: &[f64]) -> Vec<Vec<f64>> {
    (0..1usize << n)
        .map(|mask| {
            (0..n)
                .map(|i| if mask >> i & 1 == 1 { -w[i] } else { w[i] })
                .collect()
        })
        .collect()
}

/// Drops rows equal to an earlier row up to sign.
pub(crate) fn dedup_pm(rows: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for r in rows {
        let dup = out.iter().any(|q| {
            let d1 = norm2(&q.iter().zip(&r).map(|(a, b)| a - b).collect::<Vec<_>>());
            let d2 = norm2(&q.iter().zip(&r).map(|(a, b)| a + b).collect::<Vec<_>>());
            d1.min(d2) <= 1e-14
        });
        if !dup {
            out.push(r);
        }
    }
    out
}

fn exact(v: f64, x: Vec<f64>) -> Support {
    Support {
        lo: v,
        hi: v,
        argmax: x,
        exact: true,
    }
}

/// `max ⟨c, z⟩` over `{z : ‖Rz‖_p ≤ 1, Ez = 0}` for `p ∈ {1, ∞}`, with the
/// maximizer mapped back through `basis`.
fn poly_support(
    c: &[f64],
    rows: &[Vec<f64>],
    p: Lp,
    eq_rows: &[Vec<f64>],
    basis: &Matrix,
) -> Result<Support, NormError> {
    let d = c.len();
    let k = rows.len();
    let nvar = if p == Lp::L1 { d + k } else { d };
    let mut obj = vec![0.0; nvar];
    obj[..d].copy_from_slice(c);
    let mut lp = LinearProgram::new(obj);
    for j in 0..d {
        lp.free(j);
    }
    for (i, r) in rows.iter().enumerate() {
        match p {
            Lp::Linf => {
                lp.add_row(r, Sense::Le, 1.0);
                lp.add_row(r, Sense::Ge, -1.0);
            }
            Lp::L1 => {
                let mut a = vec![0.0; nvar];
                a[..d].copy_from_slice(r);
                a[d + i] = -1.0;
                lp.add_row(&a, Sense::Le, 0.0);
                for v in a[..d].iter_mut() {
                    *v = -*v;
                }
                lp.add_row(&a, Sense::Le, 0.0);
            }
            Lp::L2 => unreachable!(),
        }
    }
    if p == Lp::L1 {
        let mut a = vec![0.0; nvar];
        a[d..].iter_mut().for_each(|v| *v = 1.0);
        lp.add_row(&a, Sense::Le, 1.0);
    }
    for r in eq_rows {
        let mut a = vec![0.0; nvar];
        a[..d].copy_from_slice(r);
        lp.add_row(&a, Sense::Eq, 0.0);
    }
    let sol = solve(&lp)?;
    if sol.status != LpStatus::Optimal {
        return Err(NormError::Lp(LpError::NumericalFailure(0)));
    }
    let z = &sol.point[..d];
    Ok(exact(sol.value.max(0.0), basis.matvec(z)))
}

/// `min{|w| : Aw = x}` for `x ∈ Image(A)`.
fn image_preimage_norm(n: &ImageNorm, x: &[f64]) -> Result<f64, NormError> {
    if n.inner == Lp::L2 {
        return Ok(norm2(&n.a_pinv.matvec(x)));
    }
    // equality in range coordinates keeps the rows independent
    let qa = n.range.transpose().matmul(&n.a);
    let qx = n.range.tr_matvec(x);
    let k = n.a.cols();
    let (nvar, aux) = match n.inner {
        Lp::L1 => (2 * k, k),
        _ => (k + 1, 1),
    };
    let mut obj = vec![0.0; nvar];
    obj[k..].iter_mut().for_each(|v| *v = -1.0);
    let mut lp = LinearProgram::new(obj);
    for j in 0..k {
        lp.free(j);
    }
    for i in 0..qa.rows() {
        let mut a = vec![0.0; nvar];
        a[..k].copy_from_slice(qa.row(i));
        lp.add_row(&a, Sense::Eq, qx[i]);
    }
    for j in 0..k {
        let t = if aux == 1 { k } else { k + j };
        for s in [1.0, -1.0] {
            let mut a = vec![0.0; nvar];
            a[j] = s;
            a[t] = -1.0;
            lp.add_row(&a, Sense::Le, 0.0);
        }
    }
    let sol = solve(&lp)?;
    if sol.status != LpStatus::Optimal {
        return Err(NormError::Lp(LpError::NumericalFailure(0)));
    }
    Ok(-sol.value)
}

/// `argmax{⟨g, x⟩ : |Aᵀg|* ≤ 1, g ∈ Image(A)}`.
fn image_subgradient(n: &ImageNorm, x: &[f64]) -> Result<Vec<f64>, NormError> {
    if n.inner == Lp::L2 {
        let w = n.a_pinv.matvec(x);
        let r = norm2(&w);
        if r == 0.0 {
            return Ok(vec![0.0; x.len()]);
        }
        return Ok(n
            .a_pinv
            .tr_matvec(&w.iter().map(|v| v / r).collect::<Vec<_>>()));
    }
    // g = Q s; dual ball of the inner norm on Aᵀ Q s
    let m = n.a.transpose().matmul(&n.range);
    let c = n.range.tr_matvec(x);
    let s = poly_support(
        &c,
        &m.to_rows(),
        n.inner.dual(),
        &[],
        &Matrix::identity(c.len()),
    )?;
    Ok(n.range.matvec(&s.argmax))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn psd2(a: f64, b: f64, c: f64) -> Vec<f64> {
        svec(&Matrix::from_rows(&[vec![a, b], vec![b, c]]))
    }

    fn gauss(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
        (0..n).map(|_| StandardNormal.sample(rng)).collect()
    }

    #[test]
    fn value_examples() {
        let k = NormSpec::induced_canonical(Cone::Orthant(3)).unwrap();
        assert_eq!(k.value(&[2.0, -1.0, 0.0]).unwrap(), 2.0);
        let p = NormSpec::induced_canonical(Cone::Psd(2)).unwrap();
        assert_abs_diff_eq!(
            p.value(&psd2(3.0, 0.0, -1.0)).unwrap(),
            3.0,
            epsilon = 1e-12
        );
        let a = Matrix::from_rows(&[vec![2.0], vec![0.0]]);
        let im = NormSpec::image(a.clone(), Lp::L2).unwrap();
        assert_abs_diff_eq!(im.value(&[1.0, 0.0]).unwrap(), 0.5, epsilon = 1e-15);
        let im1 = NormSpec::image(a, Lp::L1).unwrap();
        assert_abs_diff_eq!(im1.value(&[1.0, 0.0]).unwrap(), 0.5, epsilon = 1e-12);
        assert!(matches!(
            im1.value(&[0.0, 1.0]),
            Err(NormError::DomainViolation(_))
        ));
    }

    #[test]
    fn dual_examples() {
        assert_eq!(NormSpec::Linf.dual_value(&[1.0, -2.0, 3.0]).unwrap(), 6.0);
        let k = NormSpec::induced_canonical(Cone::Orthant(3)).unwrap();
        assert_eq!(k.dual_value(&[1.0, 2.0, 3.0]).unwrap(), 6.0);
        let p = NormSpec::induced_canonical(Cone::Psd(2)).unwrap();
        assert_abs_diff_eq!(
            p.dual_value(&psd2(1.0, 0.0, -2.0)).unwrap(),
            3.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn support_examples() {
        let full = Matrix::identity(2);
        let diag = Matrix::from_cols(2, &[vec![FRAC_1_SQRT_2, FRAC_1_SQRT_2]]);
        assert_abs_diff_eq!(
            NormSpec::L2.support_over_ball(&[1.0, 0.0], &diag).unwrap(),
            FRAC_1_SQRT_2,
            epsilon = 1e-15
        );
        assert_eq!(
            NormSpec::Linf
                .support_over_ball(&[1.0, 1.0], &full)
                .unwrap(),
            2.0
        );
        assert_eq!(
            NormSpec::Linf
                .support_over_ball(&[1.0, -1.0], &diag)
                .unwrap(),
            0.0
        );
    }

    #[test]
    fn orthant_induced_matches_linf() {
        let k = NormSpec::induced_canonical(Cone::Orthant(4)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let x = gauss(&mut rng, 4);
            assert_eq!(k.value(&x).unwrap(), norm_inf(&x));
            assert_eq!(k.dual_value(&x).unwrap(), norm1(&x));
        }
    }

    #[test]
    fn induced_dual_is_pairing_on_dual_cone() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for cone in [
            Cone::Orthant(3),
            Cone::Wedge(0.4),
            Cone::Wedge(1.2),
            Cone::SecondOrder(3),
            Cone::Psd(2),
        ] {
            let norm = NormSpec::induced_canonical(cone).unwrap();
            let e = cone.canonical_e();
            for _ in 0..200 {
                let u = cone.dual().sample(&mut rng);
                assert_abs_diff_eq!(norm.dual_value(&u).unwrap(), dot(&u, &e), epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn induced_norm_matches_eigenvalue_definition() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for cone in [Cone::Wedge(0.3), Cone::SecondOrder(3), Cone::Psd(2)] {
            let norm = NormSpec::induced_canonical(cone).unwrap();
            let e = cone.canonical_interior();
            for _ in 0..100 {
                let x = gauss(&mut rng, cone.ambient_dim());
                let neg: Vec<f64> = x.iter().map(|v| -v).collect();
                let def = (-cone.lambda_e(&e, &x).unwrap()).max(-cone.lambda_e(&e, &neg).unwrap());
                assert_abs_diff_eq!(norm.value(&x).unwrap(), def, epsilon = 1e-9);
            }
        }
    }

    fn all_norms() -> Vec<(NormSpec, usize)> {
        let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0], vec![1.0, -1.0]]);
        let k = Matrix::from_rows(&[vec![1.0, 0.0, 2.0], vec![0.0, 1.0, -1.0]]);
        vec![
            (NormSpec::L1, 3),
            (NormSpec::L2, 3),
            (NormSpec::Linf, 3),
            (
                NormSpec::induced(Cone::Orthant(3), vec![1.0, 2.0, 0.5]).unwrap(),
                3,
            ),
            (NormSpec::induced_canonical(Cone::Wedge(0.5)).unwrap(), 2),
            (
                NormSpec::induced(Cone::Wedge(1.0), vec![0.3, 1.0]).unwrap(),
                2,
            ),
            (
                NormSpec::induced(Cone::SecondOrder(3), vec![0.0, 0.0, 2.0]).unwrap(),
                3,
            ),
            (
                NormSpec::induced(Cone::Psd(2), psd2(2.0, 0.5, 1.0)).unwrap(),
                3,
            ),
            (NormSpec::image(a.clone(), Lp::L1).unwrap(), 3),
            (NormSpec::image(a.clone(), Lp::L2).unwrap(), 3),
            (NormSpec::image(a, Lp::Linf).unwrap(), 3),
            (NormSpec::kernel(k.clone(), Lp::L1).unwrap(), 3),
            (NormSpec::kernel(k.clone(), Lp::L2).unwrap(), 3),
            (NormSpec::kernel(k, Lp::Linf).unwrap(), 3),
        ]
    }

    fn in_domain(norm: &NormSpec, x: Vec<f64>) -> Vec<f64> {
        match norm.domain_basis() {
            Some(b) => b.matvec(&b.tr_matvec(&x)),
            None => x,
        }
    }

    #[test]
    fn holder_attainers_and_constants() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (norm, n) in all_norms() {
            for _ in 0..200 {
                let x = in_domain(&norm, gauss(&mut rng, n));
                let u = gauss(&mut rng, n);
                let nx = norm.value(&x).unwrap();
                let du = norm.dual_value(&u).unwrap();
                assert!(dot(&u, &x).abs() <= du * nx + 1e-9, "{}", norm.name());
                let v = norm.dual_attainer(&u).unwrap();
                assert!(norm.value(&v).unwrap() <= 1.0 + 1e-9, "{}", norm.name());
                assert_abs_diff_eq!(dot(&u, &v), du, epsilon = 1e-9 * (1.0 + du));
                let g = norm.subgradient(&x).unwrap();
                assert!(
                    norm.dual_value(&g).unwrap() <= 1.0 + 1e-9,
                    "{}",
                    norm.name()
                );
                assert_abs_diff_eq!(dot(&g, &x), nx, epsilon = 1e-9 * (1.0 + nx));
                let x2 = norm2(&x);
                assert!(
                    nx <= norm.l2_to_norm(n) * x2 * (1.0 + 1e-9) + 1e-12,
                    "{}",
                    norm.name()
                );
                assert!(
                    x2 <= norm.norm_to_l2(n) * nx * (1.0 + 1e-9) + 1e-12,
                    "{}",
                    norm.name()
                );
            }
        }
    }

    #[test]
    fn support_on_whole_domain_is_dual_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for (norm, n) in all_norms() {
            let basis = norm
                .domain_basis()
                .cloned()
                .unwrap_or_else(|| Matrix::identity(n));
            for _ in 0..20 {
                let u = gauss(&mut rng, n);
                let s = norm.support(&u, &basis).unwrap();
                let du = norm.dual_value(&u).unwrap();
                assert!(
                    s.lo <= du + 1e-9 && s.hi >= du - 1e-9,
                    "{} {s:?} {du}",
                    norm.name()
                );
            }
        }
    }

    #[test]
    fn support_paths_agree_with_generic_cutting_planes() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for (norm, n) in all_norms() {
            for _ in 0..10 {
                let b = in_domain(&norm, gauss(&mut rng, n));
                let c = in_domain(&norm, gauss(&mut rng, n));
                let basis = orthonormalize(&Matrix::from_cols(n, &[b, c]));
                let u = gauss(&mut rng, n);
                let s = norm.support(&u, &basis).unwrap();
                let k = norm.kelley_support(&u, &basis).unwrap();
                assert!(
                    s.lo <= k.hi + 1e-8 && k.lo <= s.hi + 1e-8,
                    "{} {s:?} {k:?}",
                    norm.name()
                );
                assert!(norm.value(&s.argmax).unwrap() <= 1.0 + 1e-9);
                assert_abs_diff_eq!(dot(&u, &s.argmax), s.lo, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn biduality_by_sampling() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for (norm, n) in all_norms().into_iter().take(8) {
            let x = gauss(&mut rng, n);
            // max over sampled u of ⟨u,x⟩/‖u‖*, plus the exact attainer direction
            let mut best = 0.0f64;
            for _ in 0..1000 {
                let u = gauss(&mut rng, n);
                best = best.max(dot(&u, &x) / norm.dual_value(&u).unwrap());
            }
            let g = norm.subgradient(&x).unwrap();
            best = best.max(dot(&g, &x) / norm.dual_value(&g).unwrap());
            assert_abs_diff_eq!(best, norm.value(&x).unwrap(), epsilon = 1e-6);
        }
    }

    #[test]
    fn kernel_norm_requires_surjective_map() {
        let a = Matrix::from_rows(&[vec![1.0, 1.0], vec![2.0, 2.0]]);
        assert!(matches!(
            NormSpec::kernel(a, Lp::L2),
            Err(NormError::NotSurjective)
        ));
    }

    #[test]
    fn soc_off_axis_point_is_rejected() {
        assert!(NormSpec::induced(Cone::SecondOrder(3), vec![0.1, 0.0, 1.0]).is_err());
    }
}
