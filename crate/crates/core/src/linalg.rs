//! Small dense linear algebra: row-major matrices, Gram-Schmidt
//! orthonormalization, cyclic Jacobi eigendecomposition and the `svec`
//! embedding of symmetric matrices.
//!
//! Everything here is sized for desk-scale problems (dimensions below ~20).

use std::fmt;

use thiserror::Error;

/// Relative rank tolerance used by [`orthonormalize`].
pub const RANK_TOL: f64 = 1e-12;

/// Symmetry tolerance accepted by [`sym_eigen`].
pub const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix is not symmetric (asymmetry {0:.3e})")]
    NotSymmetric(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix has non-finite entries")]
    NonFinite,
}

/// Dense row-major matrix.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Builds a matrix from row-major data. Fails when the entry count does not
    /// match or an entry is not finite.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::DimensionMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(LinalgError::NonFinite);
        }
        Ok(Matrix { rows, cols, data })
    }

    /// Builds a matrix from a list of rows. Panics on ragged input.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        Matrix {
            rows: r,
            cols: c,
            data,
        }
    }

    /// Builds an `n x cols.len()` matrix whose columns are the given vectors.
    pub fn from_cols(n: usize, cols: &[Vec<f64>]) -> Self {
        let mut m = Matrix::zeros(n, cols.len());
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), n, "column length mismatch");
            for i in 0..n {
                m[(i, j)] = col[i];
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn columns(&self) -> Vec<Vec<f64>> {
        (0..self.cols).map(|j| self.col(j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    /// `self * x`.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols, "matvec dimension mismatch");
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// `selfᵀ * y`.
    pub fn tr_matvec(&self, y: &[f64]) -> Vec<f64> {
        assert_eq!(y.len(), self.rows, "tr_matvec dimension mismatch");
        let mut out = vec![0.0; self.cols];
        for (i, &yi) in y.iter().enumerate() {
            if yi == 0.0 {
                continue;
            }
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += yi * a;
            }
        }
        out
    }

    pub fn scale(&self, c: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn frobenius(&self) -> f64 {
        norm2(&self.data)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest `|a_ij - a_ji|`; `None` for non-square matrices.
    pub fn asymmetry(&self) -> Option<f64> {
        if self.rows != self.cols {
            return None;
        }
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        Some(worst)
    }

    /// Selects a subset of columns.
    pub fn select_cols(&self, idx: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(self.rows, idx.len());
        for (jj, &j) in idx.iter().enumerate() {
            for i in 0..self.rows {
                out[(i, jj)] = self[(i, j)];
            }
        }
        out
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hcat(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows);
        let mut out = Matrix::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(i, j)];
            }
            for j in 0..other.cols {
                out[(i, self.cols + j)] = other[(i, j)];
            }
        }
        out
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    // hypot-style scaling keeps tiny and huge vectors accurate
    let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    let s: f64 = a.iter().map(|v| (v / scale) * (v / scale)).sum();
    scale * s.sqrt()
}

pub fn norm1(a: &[f64]) -> f64 {
    a.iter().map(|v| v.abs()).sum()
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scaled(a: &[f64], c: f64) -> Vec<f64> {
    a.iter().map(|x| x * c).collect()
}

/// `y += c * x`
pub fn axpy(y: &mut [f64], c: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += c * xi;
    }
}

/// Orthonormal basis (as columns) of the column span of `vectors`.
///
/// Modified Gram-Schmidt with one reorthogonalization pass. A column is
/// dropped when its residual norm falls below `RANK_TOL` times the largest
/// input column norm, so the returned column count is the numerical rank.
pub fn orthonormalize(vectors: &Matrix) -> Matrix {
    let n = vectors.rows();
    let cols = vectors.columns();
    let max_norm = cols.iter().map(|c| norm2(c)).fold(0.0, f64::max);
    if max_norm == 0.0 {
        return Matrix::zeros(n, 0);
    }
    let tol = RANK_TOL * max_norm;
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for mut v in cols {
        for _ in 0..2 {
            for q in &basis {
                let c = dot(q, &v);
                axpy(&mut v, -c, q);
            }
        }
        let nv = norm2(&v);
        if nv > tol {
            basis.push(scaled(&v, 1.0 / nv));
        }
    }
    Matrix::from_cols(n, &basis)
}

/// Orthonormal basis of the orthogonal complement of the span of an
/// orthonormal `basis` in `ℝⁿ`.
pub fn complement_basis(basis: &Matrix) -> Matrix {
    let n = basis.rows();
    let mut found: Vec<Vec<f64>> = basis.columns();
    let k0 = found.len();
    for i in 0..n {
        if found.len() == n {
            break;
        }
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        for _ in 0..2 {
            for q in &found {
                let c = dot(q, &v);
                axpy(&mut v, -c, q);
            }
        }
        let nv = norm2(&v);
        // unit seed vectors: a residual this small means e_i is in the span
        if nv > 1e-8 {
            found.push(scaled(&v, 1.0 / nv));
        }
    }
    Matrix::from_cols(n, &found[k0..])
}

/// `B Bᵀ x` for an orthonormal basis `B`.
pub fn project_onto(basis: &Matrix, x: &[f64]) -> Result<Vec<f64>, LinalgError> {
    if x.len() != basis.rows() {
        return Err(LinalgError::DimensionMismatch {
            expected: basis.rows(),
            got: x.len(),
        });
    }
    let coords = basis.tr_matvec(x);
    Ok(basis.matvec(&coords))
}

/// Symmetric eigendecomposition `S = Q Λ Qᵀ` with eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns, matching `values`.
    pub vectors: Matrix,
}

impl SymEigen {
    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    /// Rebuilds `Q f(Λ) Qᵀ`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> Matrix {
        let n = self.values.len();
        let mut out = Matrix::zeros(n, n);
        for (k, &lam) in self.values.iter().enumerate() {
            let fl = f(lam);
            if fl == 0.0 {
                continue;
            }
            for i in 0..n {
                let qi = self.vectors[(i, k)] * fl;
                for j in 0..n {
                    out[(i, j)] += qi * self.vectors[(j, k)];
                }
            }
        }
        out
    }
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
///
/// Sweeps until the off-diagonal Frobenius mass is at most `1e-14·‖S‖_F`.
pub fn sym_eigen(s: &Matrix) -> Result<SymEigen, LinalgError> {
    let n = s.rows();
    if n != s.cols() {
        return Err(LinalgError::NotSquare {
            rows: s.rows(),
            cols: s.cols(),
        });
    }
    let asym = s.asymmetry().unwrap_or(0.0);
    if asym > SYMMETRY_TOL * s.max_abs().max(1.0) {
        return Err(LinalgError::NotSymmetric(asym));
    }
    let mut a = s.clone();
    // symmetrize exactly so rotations see one consistent matrix
    for i in 0..n {
        for j in (i + 1)..n {
            let m = 0.5 * (a[(i, j)] + a[(j, i)]);
            a[(i, j)] = m;
            a[(j, i)] = m;
        }
    }
    let mut v = Matrix::identity(n);
    let target = 1e-14 * a.frobenius();

    for _sweep in 0..100 {
        let off: f64 = {
            let mut acc = 0.0;
            for i in 0..n {
                for j in (i + 1)..n {
                    acc += 2.0 * a[(i, j)] * a[(i, j)];
                }
            }
            acc.sqrt()
        };
        if off <= target {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - sn * akq;
                    a[(k, q)] = sn * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - sn * aqk;
                    a[(q, k)] = sn * apk + c * aqk;
                }
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - sn * vkq;
                    v[(k, q)] = sn * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = v.select_cols(&order);
    Ok(SymEigen { values, vectors })
}

/// Singular values of `a`, descending, from the eigenvalues of `AᵀA` (or
/// `AAᵀ`, whichever is smaller).
pub fn singular_values(a: &Matrix) -> Vec<f64> {
    let gram = if a.rows() >= a.cols() {
        a.transpose().matmul(a)
    } else {
        a.matmul(&a.transpose())
    };
    let eig = sym_eigen(&gram).expect("Gram matrix is symmetric");
    let mut sv: Vec<f64> = eig.values.iter().map(|&l| l.max(0.0).sqrt()).collect();
    sv.reverse();
    sv
}

/// Moore-Penrose pseudoinverse via the eigendecomposition of `AᵀA`.
/// Singular values below `RANK_TOL·σ_max` are treated as zero.
pub fn pinv(a: &Matrix) -> Matrix {
    let gram = a.transpose().matmul(a);
    let eig = sym_eigen(&gram).expect("Gram matrix is symmetric");
    let smax = eig.max().max(0.0).sqrt();
    let cut = RANK_TOL * smax;
    let inv = eig.reconstruct_with(|l| {
        let s = l.max(0.0).sqrt();
        if s > cut && s > 0.0 {
            1.0 / (s * s)
        } else {
            0.0
        }
    });
    inv.matmul(&a.transpose())
}

/// Solves the square system `a x = b` by Gaussian elimination with partial
/// pivoting. Returns `None` for (numerically) singular systems.
pub fn solve(a: &Matrix, b: &[f64]) -> Option<Vec<f64>> {
    let n = a.rows();
    if a.cols() != n || b.len() != n {
        return None;
    }
    let mut m = a.clone();
    let mut rhs = b.to_vec();
    let scale = m.max_abs().max(1e-300);
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[(i, col)].abs().total_cmp(&m[(j, col)].abs()))?;
        if m[(piv, col)].abs() <= 1e-14 * scale {
            return None;
        }
        if piv != col {
            for j in 0..n {
                let tmp = m[(col, j)];
                m[(col, j)] = m[(piv, j)];
                m[(piv, j)] = tmp;
            }
            rhs.swap(col, piv);
        }
        for i in (col + 1)..n {
            let f = m[(i, col)] / m[(col, col)];
            if f == 0.0 {
                continue;
            }
            for j in col..n {
                m[(i, j)] -= f * m[(col, j)];
            }
            rhs[i] -= f * rhs[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = ((i + 1)..n).map(|j| m[(i, j)] * x[j]).sum();
        x[i] = (rhs[i] - s) / m[(i, i)];
    }
    Some(x)
}

/// Length of the `svec` embedding of `𝕊ⁿ`.
pub fn svec_len(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Inverse of [`svec_len`]; `None` if `len` is not triangular.
pub fn svec_order(len: usize) -> Option<usize> {
    let n = ((((8 * len + 1) as f64).sqrt() - 1.0) / 2.0).round() as usize;
    (svec_len(n) == len).then_some(n)
}

/// Embeds a symmetric matrix as the vector of its upper triangle (row by
/// row) with off-diagonal entries scaled by `√2`, so that the dot product of
/// embeddings equals the trace inner product.
pub fn svec(x: &Matrix) -> Vec<f64> {
    let n = x.rows();
    let mut out = Vec::with_capacity(svec_len(n));
    for i in 0..n {
        for j in i..n {
            if i == j {
                out.push(x[(i, i)]);
            } else {
                out.push(std::f64::consts::SQRT_2 * 0.5 * (x[(i, j)] + x[(j, i)]));
            }
        }
    }
    out
}

/// Inverse of [`svec`].
pub fn smat(v: &[f64], n: usize) -> Matrix {
    assert_eq!(v.len(), svec_len(n), "svec length mismatch");
    let mut m = Matrix::zeros(n, n);
    let mut k = 0;
    for i in 0..n {
        for j in i..n {
            if i == j {
                m[(i, i)] = v[k];
            } else {
                let val = v[k] / std::f64::consts::SQRT_2;
                m[(i, j)] = val;
                m[(j, i)] = val;
            }
            k += 1;
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn orthonormality_error(b: &Matrix) -> f64 {
        let g = b.transpose().matmul(b);
        let mut worst = 0.0f64;
        for i in 0..g.rows() {
            for j in 0..g.cols() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g[(i, j)] - target).abs());
            }
        }
        worst
    }

    #[test]
    fn orthonormalize_examples() {
        let b = orthonormalize(&Matrix::from_cols(2, &[vec![1.0, 0.0], vec![2.0, 0.0]]));
        assert_eq!(b.cols(), 1);
        assert_abs_diff_eq!(b[(0, 0)].abs(), 1.0, epsilon = 1e-15);

        let b = orthonormalize(&Matrix::from_cols(2, &[vec![1.0, 1.0], vec![1.0, -1.0]]));
        assert_eq!(b.cols(), 2);
        assert!(orthonormality_error(&b) < 1e-12);

        let b = orthonormalize(&Matrix::from_cols(2, &[vec![3.0, 4.0]]));
        assert_abs_diff_eq!(b[(0, 0)], 0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(b[(1, 0)], 0.8, epsilon = 1e-15);

        assert_eq!(orthonormalize(&Matrix::zeros(3, 2)).cols(), 0);
    }

    #[test]
    fn eigen_examples() {
        let e = sym_eigen(&Matrix::identity(2)).unwrap();
        assert_eq!(e.values, vec![1.0, 1.0]);

        let e = sym_eigen(&Matrix::from_rows(&[vec![2.0, 0.0], vec![0.0, -3.0]])).unwrap();
        assert_eq!(e.values, vec![-3.0, 2.0]);

        // trace 0, det -1: roots of λ² - 1
        let e = sym_eigen(&Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]])).unwrap();
        assert_abs_diff_eq!(e.values[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e.values[1], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn eigen_rejects_asymmetric() {
        let m = Matrix::from_rows(&[vec![0.0, 1.0], vec![0.5, 0.0]]);
        assert!(matches!(sym_eigen(&m), Err(LinalgError::NotSymmetric(_))));
    }

    #[test]
    fn projection_examples() {
        let e1 = Matrix::from_cols(2, &[vec![1.0, 0.0]]);
        assert_eq!(project_onto(&e1, &[3.0, 4.0]).unwrap(), vec![3.0, 0.0]);

        let empty = Matrix::zeros(2, 0);
        assert_eq!(project_onto(&empty, &[3.0, 4.0]).unwrap(), vec![0.0, 0.0]);

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let diag = Matrix::from_cols(2, &[vec![s, s]]);
        let p = project_onto(&diag, &[1.0, 0.0]).unwrap();
        assert_abs_diff_eq!(p[0], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(p[1], 0.5, epsilon = 1e-15);

        assert!(project_onto(&diag, &[1.0]).is_err());
    }

    #[test]
    fn svec_preserves_trace_inner_product() {
        let a = Matrix::from_rows(&[
            vec![1.0, 2.0, 0.5],
            vec![2.0, -1.0, 3.0],
            vec![0.5, 3.0, 4.0],
        ]);
        let b = Matrix::from_rows(&[
            vec![0.0, 1.0, -1.0],
            vec![1.0, 2.0, 0.0],
            vec![-1.0, 0.0, 1.0],
        ]);
        let trace: f64 = (0..3).map(|i| a.matmul(&b)[(i, i)]).sum();
        assert_abs_diff_eq!(dot(&svec(&a), &svec(&b)), trace, epsilon = 1e-12);
        assert_eq!(smat(&svec(&a), 3), a);
        assert_eq!(svec_order(6), Some(3));
        assert_eq!(svec_order(5), None);
    }

    #[test]
    fn complement_spans_the_rest() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let l = Matrix::from_cols(2, &[vec![s, s]]);
        let c = complement_basis(&l);
        assert_eq!(c.cols(), 1);
        assert_abs_diff_eq!(dot(&c.col(0), &l.col(0)), 0.0, epsilon = 1e-15);
        assert_eq!(complement_basis(&Matrix::identity(3)).cols(), 0);
    }

    #[test]
    fn solve_and_pinv() {
        let a = Matrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 3.0]]);
        let x = solve(&a, &[3.0, 5.0]).unwrap();
        assert_abs_diff_eq!(x[0], 0.8, epsilon = 1e-14);
        assert_abs_diff_eq!(x[1], 1.4, epsilon = 1e-14);
        assert!(solve(&Matrix::zeros(2, 2), &[1.0, 1.0]).is_none());

        let row = Matrix::from_rows(&[vec![1.0, 0.0]]);
        let p = pinv(&row);
        assert_abs_diff_eq!(p[(0, 0)], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(p[(1, 0)], 0.0, epsilon = 1e-14);
    }

    fn symmetric(n: usize) -> impl Strategy<Value = Matrix> {
        proptest::collection::vec(-10.0f64..10.0, n * n).prop_map(move |d| {
            let m = Matrix::from_vec(n, n, d).unwrap();
            m.add(&m.transpose()).scale(0.5)
        })
    }

    proptest! {
        #[test]
        fn eigen_reconstructs(s in (1usize..=8).prop_flat_map(symmetric)) {
            let e = sym_eigen(&s).unwrap();
            let rebuilt = e.reconstruct_with(|l| l);
            let err = rebuilt.add(&s.scale(-1.0)).frobenius();
            prop_assert!(err <= 1e-10 * s.frobenius().max(1e-300));
            prop_assert!(orthonormality_error(&e.vectors) <= 1e-10);
            prop_assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        }

        #[test]
        fn orthonormal_and_idempotent(
            cols in proptest::collection::vec(proptest::collection::vec(-5.0f64..5.0, 5), 1..5),
            x in proptest::collection::vec(-5.0f64..5.0, 5),
        ) {
            let b = orthonormalize(&Matrix::from_cols(5, &cols));
            prop_assert!(orthonormality_error(&b) <= 1e-10);
            let p = project_onto(&b, &x).unwrap();
            let pp = project_onto(&b, &p).unwrap();
            prop_assert!(norm_inf(&sub(&p, &pp)) <= 1e-10);
        }
    }
}
