//! Dense and sparse complex matrices used across the crate.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;
pub type Vec3 = [f64; 3];

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const I: C64 = C64::new(0.0, 1.0);

pub fn dot3(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn norm3(a: Vec3) -> f64 {
    dot3(a, a).sqrt()
}

pub fn add3(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn sub3(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn scale3(s: f64, a: Vec3) -> Vec3 {
    [s * a[0], s * a[1], s * a[2]]
}

/// Largest entrywise modulus of `m - m^dagger`.
pub fn hermitian_defect(m: &CMat) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in 0..=j {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

fn is_real(m: &CMat) -> bool {
    m.iter().all(|z| z.im == 0.0)
}

/// A square matrix known to be Hermitian.
///
/// Construction checks the defect and then replaces the matrix with its
/// Hermitian part so that downstream eigensolvers see an exact symmetry.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    matrix: CMat,
}

impl HermitianOperator {
    pub const DEFAULT_TOLERANCE: f64 = 1e-10;

    pub fn new(matrix: CMat) -> Result<Self> {
        Self::with_tolerance(matrix, Self::DEFAULT_TOLERANCE)
    }

    pub fn with_tolerance(matrix: CMat, tol: f64) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                got: matrix.ncols(),
            });
        }
        let defect = hermitian_defect(&matrix);
        if defect > tol * max_abs(&matrix).max(1.0) {
            return Err(Error::NotHermitian { defect });
        }
        Ok(Self::hermitize(matrix))
    }

    pub fn from_real(matrix: DMatrix<f64>) -> Result<Self> {
        Self::new(matrix.map(|x| C64::new(x, 0.0)))
    }

    /// For matrices that are Hermitian by construction up to rounding.
    pub(crate) fn hermitize(matrix: CMat) -> Self {
        let adj = matrix.adjoint();
        HermitianOperator {
            matrix: (matrix + adj) * C64::new(0.5, 0.0),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        HermitianOperator {
            matrix: CMat::zeros(dim, dim),
        }
    }

    pub fn scaled_identity(dim: usize, c: f64) -> Self {
        HermitianOperator {
            matrix: CMat::identity(dim, dim) * C64::new(c, 0.0),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMat {
        self.matrix
    }

    pub fn plus(&self, other: &HermitianOperator) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(HermitianOperator {
            matrix: &self.matrix + &other.matrix,
        })
    }

    pub fn scaled(&self, c: f64) -> Self {
        HermitianOperator {
            matrix: &self.matrix * C64::new(c, 0.0),
        }
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }

    pub fn spectral_norm(&self) -> f64 {
        self.eigenvalues()
            .iter()
            .fold(0.0f64, |acc, e| acc.max(e.abs()))
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }
}

fn faer_real(m: &CMat) -> faer::Mat<f64> {
    faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)].re)
}

fn faer_complex(m: &CMat) -> faer::Mat<C64> {
    faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    let mut ev = if is_real(m) {
        faer_real(m).self_adjoint_eigenvalues(faer::Side::Lower)
    } else {
        faer_complex(m).self_adjoint_eigenvalues(faer::Side::Lower)
    }
    .expect("self-adjoint eigenvalues of a finite matrix");
    ev.sort_by(f64::total_cmp);
    ev
}

/// Eigenpairs of a Hermitian matrix, ascending, eigenvectors as columns.
pub fn hermitian_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    let n = m.nrows();
    let (values, vectors): (Vec<f64>, CMat) = if is_real(m) {
        let e = faer_real(m)
            .self_adjoint_eigen(faer::Side::Lower)
            .expect("self-adjoint eigendecomposition of a finite matrix");
        let (u, s) = (e.U(), e.S());
        (
            (0..n).map(|k| s[k]).collect(),
            CMat::from_fn(n, n, |i, j| C64::new(u[(i, j)], 0.0)),
        )
    } else {
        let e = faer_complex(m)
            .self_adjoint_eigen(faer::Side::Lower)
            .expect("self-adjoint eigendecomposition of a finite matrix");
        let (u, s) = (e.U(), e.S());
        ((0..n).map(|k| s[k].re).collect(), CMat::from_fn(n, n, |i, j| u[(i, j)]))
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let sorted_values = order.iter().map(|&k| values[k]).collect();
    let sorted_vectors = CMat::from_fn(n, n, |i, j| vectors[(i, order[j])]);
    (sorted_values, sorted_vectors)
}

/// Operator norm. Hermitian and anti-Hermitian inputs use the spectrum directly.
pub fn spectral_norm(m: &CMat) -> f64 {
    let scale = max_abs(m).max(f64::MIN_POSITIVE);
    if hermitian_defect(m) <= 1e-12 * scale {
        let h = HermitianOperator::hermitize(m.clone());
        return h.spectral_norm();
    }
    let im = m * I;
    if hermitian_defect(&im) <= 1e-12 * scale {
        return HermitianOperator::hermitize(im).spectral_norm();
    }
    let gram = HermitianOperator::hermitize(m.adjoint() * m);
    gram.eigenvalues().last().copied().unwrap_or(0.0).max(0.0).sqrt()
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Row-compressed complex matrix; enough for spin generators.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseOperator {
    dim: usize,
    rows: Vec<Vec<(usize, C64)>>,
}

impl SparseOperator {
    pub fn zeros(dim: usize) -> Self {
        SparseOperator {
            dim,
            rows: vec![Vec::new(); dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        SparseOperator {
            dim,
            rows: (0..dim).map(|i| vec![(i, ONE)]).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// Adds `v` to entry (i, j).
    pub fn add_entry(&mut self, i: usize, j: usize, v: C64) {
        if v == ZERO {
            return;
        }
        let row = &mut self.rows[i];
        match row.iter_mut().find(|(c, _)| *c == j) {
            Some((_, x)) => *x += v,
            None => row.push((j, v)),
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(i, r)| r.iter().map(move |&(j, v)| (i, j, v)))
    }

    pub fn to_dense(&self) -> CMat {
        let mut m = CMat::zeros(self.dim, self.dim);
        for (i, j, v) in self.entries() {
            m[(i, j)] += v;
        }
        m
    }

    pub fn scaled(&self, c: C64) -> Self {
        SparseOperator {
            dim: self.dim,
            rows: self
                .rows
                .iter()
                .map(|r| r.iter().map(|&(j, v)| (j, v * c)).collect())
                .collect(),
        }
    }

    pub fn plus(&self, other: &SparseOperator) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut out = self.clone();
        for (i, j, v) in other.entries() {
            out.add_entry(i, j, v);
        }
        out
    }

    /// `self ⊗ other`
    pub fn kron(&self, other: &SparseOperator) -> Self {
        let dim = self.dim * other.dim;
        let mut out = SparseOperator::zeros(dim);
        for (i, j, v) in self.entries() {
            for (k, l, w) in other.entries() {
                out.add_entry(i * other.dim + k, j * other.dim + l, v * w);
            }
        }
        out
    }

    /// `self * a` for a dense right factor.
    pub fn mul_dense(&self, a: &CMat) -> CMat {
        assert_eq!(a.nrows(), self.dim);
        let n = self.dim;
        let cols = a.ncols();
        let src = a.as_slice();
        let mut data = vec![ZERO; n * cols];
        for c in 0..cols {
            let col = &src[c * n..(c + 1) * n];
            let out = &mut data[c * n..(c + 1) * n];
            for (i, row) in self.rows.iter().enumerate() {
                let mut acc = ZERO;
                for &(j, v) in row {
                    acc += v * col[j];
                }
                out[i] = acc;
            }
        }
        CMat::from_vec(n, cols, data)
    }

    pub fn apply(&self, x: &CVec) -> CVec {
        CVec::from_iterator(
            self.dim,
            self.rows
                .iter()
                .map(|row| row.iter().fold(ZERO, |acc, &(j, v)| acc + v * x[j])),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_matrix(n: usize, seed: u64) -> CMat {
        let mut s = seed;
        let mut next = move || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64) / ((1u64 << 53) as f64) - 0.5
        };
        CMat::from_fn(n, n, |_, _| C64::new(next(), next()))
    }

    #[test]
    fn degenerate_complex_spectrum() {
        let a = random_matrix(4, 9);
        let h = kron(&(&a + a.adjoint()), &CMat::identity(4, 4));
        let (e, v) = hermitian_eigen(&h);
        let d = CMat::from_diagonal(&CVec::from_iterator(16, e.iter().map(|x| C64::new(*x, 0.0))));
        assert!(max_abs(&(&v * d * v.adjoint() - &h)) < 1e-13);
        assert!(max_abs(&(v.adjoint() * &v - CMat::identity(16, 16))) < 1e-13);
        for k in 0..4 {
            assert!((e[4 * k] - e[4 * k + 3]).abs() < 1e-13);
        }
    }

    #[test]
    fn eigen_sorted_and_reconstructs() {
        let a = random_matrix(7, 3);
        let h = HermitianOperator::hermitize(a);
        let (vals, vecs) = hermitian_eigen(h.matrix());
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        let d = CMat::from_diagonal(&DVector::from_iterator(
            7,
            vals.iter().map(|&x| C64::new(x, 0.0)),
        ));
        let back = &vecs * d * vecs.adjoint();
        assert!(max_abs(&(back - h.matrix())) < 1e-12);
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = CMat::zeros(2, 2);
        m[(0, 1)] = ONE;
        assert!(matches!(
            HermitianOperator::new(m),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn spectral_norm_of_antihermitian_and_general() {
        let a = HermitianOperator::hermitize(random_matrix(5, 9));
        let b = HermitianOperator::hermitize(random_matrix(5, 11));
        let c = commutator(a.matrix(), b.matrix());
        let via_gram = {
            let g = HermitianOperator::hermitize(c.adjoint() * &c);
            g.eigenvalues().last().unwrap().sqrt()
        };
        assert!((spectral_norm(&c) - via_gram).abs() < 1e-10);
        let g = random_matrix(5, 13);
        let svd = g.clone().singular_values().max();
        assert!((spectral_norm(&g) - svd).abs() < 1e-10);
    }

    #[test]
    fn sparse_matches_dense() {
        let mut s = SparseOperator::zeros(3);
        s.add_entry(0, 1, C64::new(1.0, 2.0));
        s.add_entry(2, 2, C64::new(-0.5, 0.0));
        s.add_entry(0, 1, C64::new(1.0, 0.0));
        let a = random_matrix(3, 5);
        let lhs = s.mul_dense(&a);
        let rhs = s.to_dense() * &a;
        assert!(max_abs(&(lhs - rhs)) < 1e-15);
        let k = s.kron(&SparseOperator::identity(2)).to_dense();
        assert!(max_abs(&(k - kron(&s.to_dense(), &CMat::identity(2, 2)))) < 1e-15);
    }
}
