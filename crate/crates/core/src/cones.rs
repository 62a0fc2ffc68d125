//! Regular closed convex cones: membership, projection, duals, interior
//! points and the eigenvalue maps `λ_v(x) = max{t : x − t·v ∈ K}`.
//!
//! Four families are supported. Matrix cones live in `svec` coordinates, so
//! `Psd(n)` has ambient dimension `n(n+1)/2`. The wedge is the planar cone
//! `{x : sin φ·x₂ ≥ cos φ·|x₁|}` generated by `(±sin φ, cos φ)`.

use std::f64::consts::FRAC_PI_2;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

use crate::linalg::{
    dot, norm2, orthonormalize, smat, svec, svec_len, sym_eigen, LinalgError, Matrix,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConeError {
    #[error("expected a vector of length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("direction is not in the cone")]
    VNotInCone,
    #[error("point is not in the interior of the cone")]
    NotInterior,
    #[error("invalid cone: {0}")]
    Invalid(String),
}

impl From<LinalgError> for ConeError {
    fn from(e: LinalgError) -> Self {
        ConeError::Invalid(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cone {
    Orthant(usize),
    /// Half-aperture `φ ∈ (0, π/2)` measured from the `x₂` axis.
    Wedge(f64),
    SecondOrder(usize),
    /// Matrix order; the ambient dimension is `n(n+1)/2`.
    Psd(usize),
}

/// Interior point `e` together with the ℓ2 radius of a ball around it that
/// stays inside the cone.
#[derive(Debug, Clone, PartialEq)]
pub struct InteriorPoint {
    pub e: Vec<f64>,
    pub margin: f64,
}

const MEMBERSHIP_TOL: f64 = 1e-14;

impl Cone {
    pub fn validate(&self) -> Result<(), ConeError> {
        match *self {
            Cone::Wedge(phi) if !(phi > 0.0 && phi < FRAC_PI_2) => Err(ConeError::Invalid(
                format!("wedge angle {phi} outside (0, π/2)"),
            )),
            Cone::Orthant(0) | Cone::Psd(0) => Err(ConeError::Invalid("empty cone".into())),
            Cone::SecondOrder(n) if n < 2 => Err(ConeError::Invalid(
                "second-order cone needs dimension ≥ 2".into(),
            )),
            _ => Ok(()),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        match *self {
            Cone::Orthant(n) | Cone::SecondOrder(n) => n,
            Cone::Wedge(_) => 2,
            Cone::Psd(n) => svec_len(n),
        }
    }

    pub fn name(&self) -> String {
        match *self {
            Cone::Orthant(n) => format!("orthant({n})"),
            Cone::Wedge(phi) => format!("wedge({phi})"),
            Cone::SecondOrder(n) => format!("soc({n})"),
            Cone::Psd(n) => format!("psd({n})"),
        }
    }

    pub fn is_polyhedral(&self) -> bool {
        matches!(self, Cone::Orthant(_) | Cone::Wedge(_))
    }

    pub fn is_self_dual(&self) -> bool {
        !matches!(self, Cone::Wedge(phi) if (phi - std::f64::consts::FRAC_PI_4).abs() > 1e-15)
    }

    pub fn dual(&self) -> Cone {
        match *self {
            Cone::Wedge(phi) => Cone::Wedge(FRAC_PI_2 - phi),
            other => other,
        }
    }

    fn check_dim(&self, x: &[f64]) -> Result<(), ConeError> {
        let n = self.ambient_dim();
        if x.len() != n {
            return Err(ConeError::DimensionMismatch {
                expected: n,
                got: x.len(),
            });
        }
        Ok(())
    }

    /// Unit facet normals for polyhedral cones; `K = {x : ⟨r, x⟩ ≥ 0 ∀r}`.
    /// These are also the extreme rays of `K*`.
    pub fn facet_normals(&self) -> Option<Vec<Vec<f64>>> {
        match *self {
            Cone::Orthant(n) => Some(
                (0..n)
                    .map(|i| {
                        let mut r = vec![0.0; n];
                        r[i] = 1.0;
                        r
                    })
                    .collect(),
            ),
            Cone::Wedge(phi) => {
                let (s, c) = phi.sin_cos();
                Some(vec![vec![c, s], vec![-c, s]])
            }
            _ => None,
        }
    }

    /// Unit extreme rays of a polyhedral cone.
    pub fn generators(&self) -> Option<Vec<Vec<f64>>> {
        match *self {
            Cone::Wedge(phi) => {
                let (s, c) = phi.sin_cos();
                Some(vec![vec![s, c], vec![-s, c]])
            }
            Cone::Orthant(_) => self.facet_normals(),
            _ => None,
        }
    }

    /// Euclidean projection onto the cone.
    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>, ConeError> {
        self.check_dim(x)?;
        Ok(match *self {
            Cone::Orthant(_) => x.iter().map(|v| v.max(0.0)).collect(),
            Cone::SecondOrder(n) => {
                let t = x[n - 1];
                let bar = norm2(&x[..n - 1]);
                if bar <= t {
                    x.to_vec()
                } else if bar <= -t {
                    vec![0.0; n]
                } else {
                    let a = 0.5 * (t + bar);
                    let mut p: Vec<f64> = x[..n - 1].iter().map(|v| a * v / bar).collect();
                    p.push(a);
                    p
                }
            }
            Cone::Psd(n) => {
                let eig = sym_eigen(&smat(x, n))?;
                svec(&eig.reconstruct_with(|l| l.max(0.0)))
            }
            Cone::Wedge(_) => {
                let normals = self.facet_normals().unwrap();
                if normals.iter().all(|r| dot(r, x) >= 0.0) {
                    return Ok(x.to_vec());
                }
                // x in the polar cone projects to the apex
                if self.generators().unwrap().iter().all(|g| dot(g, x) <= 0.0) {
                    return Ok(vec![0.0; 2]);
                }
                let mut best = vec![0.0; 2];
                let mut best_d = f64::INFINITY;
                for g in self.generators().unwrap() {
                    let a = dot(&g, x).max(0.0);
                    let p = vec![a * g[0], a * g[1]];
                    let d = norm2(&[x[0] - p[0], x[1] - p[1]]);
                    if d < best_d {
                        best_d = d;
                        best = p;
                    }
                }
                best
            }
        })
    }

    /// Euclidean distance to the cone.
    pub fn distance(&self, x: &[f64]) -> Result<f64, ConeError> {
        let p = self.project(x)?;
        Ok(norm2(
            &x.iter().zip(&p).map(|(a, b)| a - b).collect::<Vec<_>>(),
        ))
    }

    /// True iff `x` is within ℓ2 distance `tol` of the cone (for PSD: iff
    /// `λ_min ≥ −tol`).
    pub fn contains(&self, x: &[f64], tol: f64) -> Result<bool, ConeError> {
        self.check_dim(x)?;
        let exact = match *self {
            Cone::Orthant(_) => Some(x.iter().all(|&v| v >= 0.0)),
            Cone::SecondOrder(n) => Some(x[n - 1] >= norm2(&x[..n - 1])),
            Cone::Wedge(_) => Some(
                self.facet_normals()
                    .unwrap()
                    .iter()
                    .all(|r| dot(r, x) >= 0.0),
            ),
            Cone::Psd(n) => return Ok(sym_eigen(&smat(x, n))?.min() >= -tol),
        };
        if exact == Some(true) {
            return Ok(true);
        }
        Ok(self.distance(x)? <= tol)
    }

    /// Largest ℓ2 ball radius around `x` contained in the cone (0 on the
    /// boundary, negative outside for the polyhedral and second-order cases).
    pub fn inradius(&self, x: &[f64]) -> Result<f64, ConeError> {
        self.check_dim(x)?;
        Ok(match *self {
            Cone::Orthant(_) | Cone::Wedge(_) => self
                .facet_normals()
                .unwrap()
                .iter()
                .map(|r| dot(r, x))
                .fold(f64::INFINITY, f64::min),
            Cone::SecondOrder(n) => (x[n - 1] - norm2(&x[..n - 1])) / std::f64::consts::SQRT_2,
            Cone::Psd(n) => sym_eigen(&smat(x, n))?.min(),
        })
    }

    pub fn canonical_e(&self) -> Vec<f64> {
        match *self {
            Cone::Orthant(n) => vec![1.0; n],
            Cone::Wedge(_) => vec![0.0, 1.0],
            Cone::SecondOrder(n) => {
                let mut e = vec![0.0; n];
                e[n - 1] = 1.0;
                e
            }
            Cone::Psd(n) => svec(&Matrix::identity(n)),
        }
    }

    pub fn canonical_interior(&self) -> InteriorPoint {
        let e = self.canonical_e();
        let margin = self
            .inradius(&e)
            .expect("canonical point has the right length");
        InteriorPoint { e, margin }
    }

    pub fn interior_point(&self, e: Vec<f64>) -> Result<InteriorPoint, ConeError> {
        let margin = self.inradius(&e)?;
        let scale = norm2(&e).max(f64::MIN_POSITIVE);
        if !(margin > 1e-12 * scale) {
            return Err(ConeError::NotInterior);
        }
        Ok(InteriorPoint { e, margin })
    }

    /// `λ_e(x) = max{t : x − t·e ∈ K}` for an interior `e`.
    pub fn lambda_e(&self, e: &InteriorPoint, x: &[f64]) -> Result<f64, ConeError> {
        self.lambda_v(&e.e, x)
    }

    /// `λ_v(x) = max{t : x − t·v ∈ K}`, or `−∞` when no such `t` exists.
    pub fn lambda_v(&self, v: &[f64], x: &[f64]) -> Result<f64, ConeError> {
        self.check_dim(v)?;
        self.check_dim(x)?;
        let vscale = norm2(v);
        if vscale == 0.0 || !self.contains(v, 1e-12 * vscale)? {
            return Err(ConeError::VNotInCone);
        }
        match *self {
            Cone::Orthant(_) | Cone::Wedge(_) => {
                let mut t = f64::INFINITY;
                for r in self.facet_normals().unwrap() {
                    let rv = dot(&r, v);
                    let rx = dot(&r, x);
                    if rv > 1e-15 * vscale {
                        t = t.min(rx / rv);
                    } else if rx < 0.0 {
                        return Ok(f64::NEG_INFINITY);
                    }
                }
                Ok(t)
            }
            Cone::Psd(n) => {
                let eig_v = sym_eigen(&smat(v, n))?;
                if eig_v.min() > 1e-10 * eig_v.max() {
                    let w = eig_v.reconstruct_with(|l| 1.0 / l.sqrt());
                    let m = w.matmul(&smat(x, n)).matmul(&w);
                    Ok(sym_eigen(&symmetrize(&m))?.min())
                } else {
                    self.lambda_v_bisect(v, x)
                }
            }
            Cone::SecondOrder(_) => self.lambda_v_bisect(v, x),
        }
    }

    fn member_strict(&self, y: &[f64], scale: f64) -> bool {
        match *self {
            Cone::Psd(n) => sym_eigen(&smat(y, n))
                .map(|e| e.min() >= -MEMBERSHIP_TOL * scale)
                .unwrap_or(false),
            Cone::SecondOrder(n) => y[n - 1] - norm2(&y[..n - 1]) >= -MEMBERSHIP_TOL * scale,
            _ => self.contains(y, 0.0).unwrap_or(false),
        }
    }

    fn lambda_v_bisect(&self, v: &[f64], x: &[f64]) -> Result<f64, ConeError> {
        let scale = 1.0 + norm2(x) + norm2(v);
        let at = |t: f64| -> Vec<f64> { x.iter().zip(v).map(|(a, b)| a - t * b).collect() };
        // ⟨g, x − t v⟩ ≥ 0 for g ∈ int K* bounds t from above
        let g = self.dual().canonical_e();
        let mut hi = dot(&g, x) / dot(&g, v);
        if self.member_strict(&at(hi), scale) {
            return Ok(hi);
        }
        let r = self.inradius(v)?;
        let xn = norm2(x);
        let mut lo = if r > 1e-12 * norm2(v) {
            -xn / r
        } else {
            -1e6 * xn / norm2(v)
        };
        if !self.member_strict(&at(lo), scale) {
            return Ok(f64::NEG_INFINITY);
        }
        while hi - lo > 1e-12 * (1.0 + lo.abs().max(hi.abs())) {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.member_strict(&at(mid), scale) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(lo)
    }

    /// A unit `u ∈ K*` that (approximately) minimizes `⟨u, x⟩`; when
    /// `x ∉ K` it separates, `⟨u, x⟩ < 0`.
    pub fn dual_witness(&self, x: &[f64]) -> Result<Vec<f64>, ConeError> {
        self.check_dim(x)?;
        Ok(match *self {
            Cone::Orthant(_) | Cone::Wedge(_) => {
                let normals = self.facet_normals().unwrap();
                normals
                    .into_iter()
                    .min_by(|a, b| dot(a, x).total_cmp(&dot(b, x)))
                    .unwrap()
            }
            Cone::SecondOrder(n) => {
                let bar = norm2(&x[..n - 1]);
                let mut u = vec![0.0; n];
                if bar > 0.0 {
                    for i in 0..n - 1 {
                        u[i] = -x[i] / bar / std::f64::consts::SQRT_2;
                    }
                    u[n - 1] = 1.0 / std::f64::consts::SQRT_2;
                } else {
                    u[n - 1] = 1.0;
                }
                u
            }
            Cone::Psd(n) => {
                let eig = sym_eigen(&smat(x, n))?;
                let q = eig.vectors.col(0);
                let mut vvt = Matrix::zeros(n, n);
                for i in 0..n {
                    for j in 0..n {
                        vvt[(i, j)] = q[i] * q[j];
                    }
                }
                svec(&vvt)
            }
        })
    }

    /// `Θ(K*, K)`, the largest angle from a dual ray to its nearest primal
    /// ray. Closed form for every supported family.
    pub fn theta(&self) -> f64 {
        match *self {
            Cone::Wedge(phi) => (FRAC_PI_2 - 2.0 * phi).max(0.0),
            _ => 0.0,
        }
    }

    /// Random nonzero point of the cone. Orthant: `|N(0,1)|` coordinates.
    /// Wedge: angle-uniform unit rays. Second-order: height `|N(0,1)|` with a
    /// uniform point of the cross-section ball. PSD: `QΛQᵀ`, `Λ ≥ 0`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let gauss = |rng: &mut R| -> f64 { StandardNormal.sample(rng) };
        match *self {
            Cone::Orthant(n) => (0..n).map(|_| gauss(rng).abs()).collect(),
            Cone::Wedge(phi) => {
                let a = rng.gen_range(-phi..=phi);
                vec![a.sin(), a.cos()]
            }
            Cone::SecondOrder(n) => {
                let t = gauss(rng).abs();
                let d = n - 1;
                let dir: Vec<f64> = (0..d).map(|_| gauss(rng)).collect();
                let dn = norm2(&dir).max(f64::MIN_POSITIVE);
                let radius = t * rng.gen::<f64>().powf(1.0 / d as f64);
                let mut x: Vec<f64> = dir.iter().map(|v| v / dn * radius).collect();
                x.push(t);
                x
            }
            Cone::Psd(n) => {
                let g = Matrix::from_vec(n, n, (0..n * n).map(|_| gauss(rng)).collect())
                    .expect("square sample");
                let q = orthonormalize(&g);
                let lams: Vec<f64> = (0..q.cols()).map(|_| gauss(rng).abs()).collect();
                let mut x = Matrix::zeros(n, n);
                for (k, lam) in lams.iter().enumerate() {
                    for i in 0..n {
                        for j in 0..n {
                            x[(i, j)] += lam * q[(i, k)] * q[(j, k)];
                        }
                    }
                }
                svec(&x)
            }
        }
    }
}

pub(crate) fn symmetrize(m: &Matrix) -> Matrix {
    m.add(&m.transpose()).scale(0.5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, FRAC_PI_8};

    fn psd2(a: f64, b: f64, c: f64) -> Vec<f64> {
        svec(&Matrix::from_rows(&[vec![a, b], vec![b, c]]))
    }

    #[test]
    fn membership_examples() {
        assert!(Cone::Orthant(2).contains(&[1.0, 0.0], 0.0).unwrap());
        assert!(!Cone::Wedge(FRAC_PI_6).contains(&[1.0, 1.0], 0.0).unwrap());
        assert!(!Cone::Psd(2).contains(&psd2(1.0, 2.0, 1.0), 0.0).unwrap());
        assert!(Cone::Psd(2).contains(&psd2(2.0, 1.0, 2.0), 0.0).unwrap());
        assert!(Cone::SecondOrder(3)
            .contains(&[3.0, 4.0, 5.0], 0.0)
            .unwrap());
        assert!(Cone::Orthant(2).contains(&[1.0], 0.0).is_err());
    }

    #[test]
    fn dual_examples() {
        assert_eq!(Cone::Orthant(3).dual(), Cone::Orthant(3));
        assert_eq!(Cone::Psd(2).dual(), Cone::Psd(2));
        match Cone::Wedge(FRAC_PI_6).dual() {
            Cone::Wedge(p) => assert_abs_diff_eq!(p, FRAC_PI_3, epsilon = 1e-15),
            _ => unreachable!(),
        }
    }

    #[test]
    fn lambda_e_examples() {
        let k = Cone::Orthant(3);
        let e = k.canonical_interior();
        assert_eq!(k.lambda_e(&e, &[3.0, 1.0, 2.0]).unwrap(), 1.0);
        let p = Cone::Psd(2);
        let e = p.canonical_interior();
        assert_abs_diff_eq!(
            p.lambda_e(&e, &psd2(5.0, 0.0, -2.0)).unwrap(),
            -2.0,
            epsilon = 1e-12
        );
        for k in [
            Cone::Orthant(3),
            Cone::Wedge(0.4),
            Cone::SecondOrder(4),
            Cone::Psd(3),
        ] {
            let e = k.canonical_interior();
            assert_abs_diff_eq!(k.lambda_e(&e, &e.e).unwrap(), 1.0, epsilon = 1e-11);
        }
    }

    #[test]
    fn lambda_v_examples() {
        let k = Cone::Orthant(2);
        assert_eq!(k.lambda_v(&[1.0, 0.0], &[3.0, 1.0]).unwrap(), 3.0);
        assert_eq!(
            k.lambda_v(&[1.0, 0.0], &[3.0, -1.0]).unwrap(),
            f64::NEG_INFINITY
        );
        assert_eq!(k.lambda_v(&[1.0, 1.0], &[3.0, 1.0]).unwrap(), 1.0);
        assert_eq!(
            k.lambda_v(&[-1.0, 1.0], &[3.0, 1.0]),
            Err(ConeError::VNotInCone)
        );
    }

    #[test]
    fn lambda_v_boundary_soc_and_psd() {
        // v on the SOC boundary: x − t v ∈ K has a finite max
        let k = Cone::SecondOrder(2);
        let t = k.lambda_v(&[1.0, 1.0], &[0.0, 1.0]).unwrap();
        // (−t, 1 − t): need 1 − t ≥ |t| → t ≤ 1/2
        assert_abs_diff_eq!(t, 0.5, epsilon = 1e-10);
        // slice empty: x = (1, -1) never reaches the cone along −v
        let t = k.lambda_v(&[1.0, 1.0], &[-1.0, -2.0]).unwrap();
        assert_eq!(t, f64::NEG_INFINITY);
        let p = Cone::Psd(2);
        let t = p
            .lambda_v(&psd2(1.0, 0.0, 0.0), &psd2(0.0, 0.0, -1.0))
            .unwrap();
        assert_eq!(t, f64::NEG_INFINITY);
        let t = p
            .lambda_v(&psd2(1.0, 0.0, 0.0), &psd2(2.0, 0.0, 1.0))
            .unwrap();
        assert_abs_diff_eq!(t, 2.0, epsilon = 1e-10);
    }

    #[test]
    fn theta_examples() {
        assert_eq!(Cone::Orthant(4).theta(), 0.0);
        assert_abs_diff_eq!(Cone::Wedge(FRAC_PI_8).theta(), FRAC_PI_4, epsilon = 1e-15);
        assert_eq!(Cone::Wedge(FRAC_PI_3).theta(), 0.0);
    }

    #[test]
    fn projection_is_in_cone_and_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for k in [
            Cone::Orthant(4),
            Cone::Wedge(0.3),
            Cone::Wedge(1.2),
            Cone::SecondOrder(4),
            Cone::Psd(3),
        ] {
            for _ in 0..200 {
                let x: Vec<f64> = (0..k.ambient_dim())
                    .map(|_| StandardNormal.sample(&mut rng))
                    .collect();
                let p = k.project(&x).unwrap();
                assert!(k.contains(&p, 1e-12).unwrap());
                let r: Vec<f64> = x.iter().zip(&p).map(|(a, b)| a - b).collect();
                // Moreau: x − Π(x) ∈ −K*, orthogonal to Π(x)
                assert!(dot(&r, &p).abs() < 1e-10);
                assert!(k
                    .dual()
                    .contains(&r.iter().map(|v| -v).collect::<Vec<_>>(), 1e-10)
                    .unwrap());
            }
        }
    }

    #[test]
    fn duality_and_lambda_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for k in [
            Cone::Orthant(3),
            Cone::Wedge(0.5),
            Cone::Wedge(1.1),
            Cone::SecondOrder(3),
            Cone::Psd(2),
        ] {
            let d = k.dual();
            let e = k.canonical_interior();
            for _ in 0..1000 {
                let u = d.sample(&mut rng);
                let x = k.sample(&mut rng);
                assert!(dot(&u, &x) >= -1e-10);
            }
            for _ in 0..200 {
                let x: Vec<f64> = (0..k.ambient_dim())
                    .map(|_| StandardNormal.sample(&mut rng))
                    .collect();
                let lam = k.lambda_e(&e, &x).unwrap();
                let inside = k.contains(&x, 0.0).unwrap();
                assert_eq!(inside, lam >= -1e-12, "{k:?} {x:?} {lam}");
                assert_abs_diff_eq!(lam, k.lambda_v(&e.e, &x).unwrap(), epsilon = 1e-12);
                // shifting by λ_e lands on the boundary
                let y: Vec<f64> = x.iter().zip(&e.e).map(|(a, b)| a - lam * b).collect();
                assert!(k.distance(&y).unwrap() < 1e-9);
                assert!(k.inradius(&y).unwrap() < 1e-9);
            }
        }
    }

    #[test]
    fn sampled_points_are_members() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for k in [
            Cone::Orthant(3),
            Cone::Wedge(0.7),
            Cone::SecondOrder(5),
            Cone::Psd(3),
        ] {
            for _ in 0..100 {
                assert!(k.contains(&k.sample(&mut rng), 1e-12).unwrap());
            }
        }
    }

    #[test]
    fn dual_witness_separates() {
        for (k, x) in [
            (Cone::Orthant(2), vec![1.0, -1.0]),
            (Cone::SecondOrder(3), vec![3.0, 0.0, 1.0]),
            (Cone::Psd(2), psd2(1.0, 2.0, 1.0)),
            (Cone::Wedge(FRAC_PI_6), vec![1.0, 1.0]),
        ] {
            let u = k.dual_witness(&x).unwrap();
            assert!(k.dual().contains(&u, 1e-12).unwrap());
            assert!(dot(&u, &x) < 0.0);
        }
    }

    #[test]
    fn wedge_inradius_matches_formula() {
        let phi: f64 = 0.6;
        let k = Cone::Wedge(phi);
        let e = [0.2, 1.0];
        assert_abs_diff_eq!(
            k.inradius(&e).unwrap(),
            phi.sin() * 1.0 - phi.cos() * 0.2,
            epsilon = 1e-15
        );
    }
}
