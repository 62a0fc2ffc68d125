//! Linear subspaces stored as orthonormal bases.

use crate::linalg::{complement_basis, dot, norm2, orthonormalize, LinalgError, Matrix};
use crate::lp::{solve, LinearProgram, LpStatus, Sense};
use crate::norms::{NormError, NormSpec};

#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Span(Matrix),
    Kernel(Matrix),
    Complement,
}

#[derive(Debug, Clone)]
pub struct Subspace {
    basis: Matrix,
    pub source: Source,
}

impl Subspace {
    /// Column span of `m`.
    pub fn from_span(m: &Matrix) -> Subspace {
        Subspace {
            basis: orthonormalize(m),
            source: Source::Span(m.clone()),
        }
    }

    /// Null space of `a`.
    pub fn from_kernel(a: &Matrix) -> Subspace {
        let rowspace = orthonormalize(&a.transpose());
        Subspace {
            basis: complement_basis(&rowspace),
            source: Source::Kernel(a.clone()),
        }
    }

    pub fn whole(n: usize) -> Subspace {
        Subspace::from_span(&Matrix::identity(n))
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn complement(&self) -> Subspace {
        Subspace {
            basis: complement_basis(&self.basis),
            source: Source::Complement,
        }
    }

    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>, LinalgError> {
        crate::linalg::project_onto(&self.basis, x)
    }

    /// ℓ2 distance from `x` to the subspace.
    pub fn residual(&self, x: &[f64]) -> f64 {
        let p = self.basis.matvec(&self.basis.tr_matvec(x));
        norm2(&x.iter().zip(&p).map(|(a, b)| a - b).collect::<Vec<_>>())
    }

    /// True if every basis vector of `other` lies in this subspace.
    pub fn contains_subspace(&self, other: &Subspace, tol: f64) -> bool {
        other
            .basis
            .columns()
            .iter()
            .all(|c| self.residual(c) <= tol)
    }

    /// `min{‖u − y‖* : y ∈ L⊥}`, evaluated as the support function of the
    /// unit ball restricted to `L`.
    pub fn dual_dist_to_perp(&self, u: &[f64], norm: &NormSpec) -> Result<f64, NormError> {
        norm.support_over_ball(u, &self.basis)
    }

    /// The same distance computed directly over `y ∈ L⊥` by a linear program.
    /// Available for norms whose dual ball is polyhedral.
    pub fn dual_dist_to_perp_direct(&self, u: &[f64], norm: &NormSpec) -> Result<f64, NormError> {
        let n = self.ambient_dim();
        let perp = self.complement();
        if let NormSpec::L2 = norm {
            let y = perp.basis.matvec(&perp.basis.tr_matvec(u));
            return Ok(norm2(
                &u.iter().zip(&y).map(|(a, b)| a - b).collect::<Vec<_>>(),
            ));
        }
        let (rows, sum_type) = norm
            .polyhedral_dual_rows(n)
            .ok_or_else(|| NormError::UnsupportedNorm("dual ball is not polyhedral".into()))?;
        let c = perp.basis;
        let m = c.cols();
        let k = rows.len();
        // variables: s (free, m), then τ (sup type) or t_1..t_k (sum type)
        let naux = if sum_type { k } else { 1 };
        let mut obj = vec![0.0; m + naux];
        obj[m..].iter_mut().for_each(|v| *v = -1.0);
        let mut lp = LinearProgram::new(obj);
        for j in 0..m {
            lp.free(j);
        }
        for (i, a) in rows.iter().enumerate() {
            // ⟨a, u − Cs⟩ ≤ t and −⟨a, u − Cs⟩ ≤ t
            let ac = c.tr_matvec(a);
            let au = dot(a, u);
            let t = if sum_type { m + i } else { m };
            let mut row = vec![0.0; m + naux];
            for j in 0..m {
                row[j] = -ac[j];
            }
            row[t] = -1.0;
            lp.add_row(&row, Sense::Le, -au);
            for j in 0..m {
                row[j] = ac[j];
            }
            lp.add_row(&row, Sense::Le, au);
        }
        let sol = solve(&lp)?;
        if sol.status != LpStatus::Optimal {
            return Err(NormError::Lp(crate::lp::LpError::NumericalFailure(0)));
        }
        Ok(-sol.value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cones::Cone;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn span_examples() {
        assert_eq!(Subspace::from_span(&Matrix::identity(3)).dim(), 3);
        let d = Subspace::from_span(&Matrix::from_cols(2, &[vec![1.0, 1.0]]));
        assert_eq!(d.dim(), 1);
        assert_abs_diff_eq!(d.basis()[(0, 0)].abs(), 0.5f64.sqrt(), epsilon = 1e-15);
        let dup = Subspace::from_span(&Matrix::from_cols(2, &[vec![1.0, 0.0], vec![1.0, 0.0]]));
        assert_eq!(dup.dim(), 1);
    }

    #[test]
    fn kernel_examples() {
        let l = Subspace::from_kernel(&Matrix::from_rows(&[vec![1.0, -1.0]]));
        assert_eq!(l.dim(), 1);
        assert_abs_diff_eq!(l.basis()[(0, 0)], l.basis()[(1, 0)], epsilon = 1e-15);
        assert_eq!(Subspace::from_kernel(&Matrix::zeros(1, 3)).dim(), 3);
        assert_eq!(Subspace::from_kernel(&Matrix::identity(3)).dim(), 0);
    }

    #[test]
    fn complement_examples() {
        let e1 = Subspace::from_span(&Matrix::from_cols(2, &[vec![1.0, 0.0]]));
        let c = e1.complement();
        assert_eq!(c.dim(), 1);
        assert_abs_diff_eq!(c.basis()[(1, 0)].abs(), 1.0, epsilon = 1e-15);
        assert_eq!(Subspace::whole(3).complement().dim(), 0);
        let d = Subspace::from_span(&Matrix::from_cols(2, &[vec![1.0, 1.0]])).complement();
        assert_abs_diff_eq!(d.basis()[(0, 0)], -d.basis()[(1, 0)], epsilon = 1e-15);
    }

    #[test]
    fn dual_dist_examples() {
        let e1 = Subspace::from_span(&Matrix::from_cols(2, &[vec![1.0, 0.0]]));
        assert_abs_diff_eq!(
            e1.dual_dist_to_perp(&[3.0, 4.0], &NormSpec::L2).unwrap(),
            3.0,
            epsilon = 1e-15
        );
        assert_eq!(
            e1.dual_dist_to_perp(&[0.0, 4.0], &NormSpec::Linf).unwrap(),
            0.0
        );
        let full = Subspace::whole(2);
        assert_eq!(
            full.dual_dist_to_perp(&[1.0, -2.0], &NormSpec::Linf)
                .unwrap(),
            3.0
        );
    }

    #[test]
    fn kernel_basis_is_annihilated() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let a = Matrix::from_vec(
                2,
                5,
                (0..10).map(|_| StandardNormal.sample(&mut rng)).collect(),
            )
            .unwrap();
            let l = Subspace::from_kernel(&a);
            assert_eq!(l.dim(), 3);
            assert!(a.matmul(l.basis()).max_abs() <= 1e-10);
            let cc = l.complement().complement();
            assert!(l.contains_subspace(&cc, 1e-10) && cc.contains_subspace(&l, 1e-10));
        }
    }

    #[test]
    fn both_sides_of_the_distance_identity_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let norms = [
            (NormSpec::L1, 4),
            (NormSpec::Linf, 4),
            (NormSpec::L2, 4),
            (
                NormSpec::induced(Cone::Orthant(4), vec![1.0, 2.0, 0.5, 1.5]).unwrap(),
                4,
            ),
            (
                NormSpec::induced(Cone::Wedge(0.7), vec![0.2, 1.0]).unwrap(),
                2,
            ),
        ];
        for (norm, n) in norms {
            for d in 1..n {
                for _ in 0..20 {
                    let m = Matrix::from_vec(
                        n,
                        d,
                        (0..n * d)
                            .map(|_| StandardNormal.sample(&mut rng))
                            .collect(),
                    )
                    .unwrap();
                    let l = Subspace::from_span(&m);
                    let u: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
                    let a = l.dual_dist_to_perp(&u, &norm).unwrap();
                    let b = l.dual_dist_to_perp_direct(&u, &norm).unwrap();
                    assert_abs_diff_eq!(a, b, epsilon = 1e-9 * (1.0 + a));
                    // translation by L⊥ leaves the distance unchanged
                    let perp = l.complement();
                    let y = perp.basis().matvec(
                        &(0..perp.dim())
                            .map(|_| StandardNormal.sample(&mut rng))
                            .collect::<Vec<f64>>(),
                    );
                    let uy: Vec<f64> = u.iter().zip(&y).map(|(p, q)| p + q).collect();
                    assert_abs_diff_eq!(
                        l.dual_dist_to_perp(&uy, &norm).unwrap(),
                        a,
                        epsilon = 1e-9 * (1.0 + a)
                    );
                }
            }
        }
    }
}
