use crate::error::{Error, Result};
use crate::linalg::{hermitian_defect, hermitian_eigen, max_abs, CMat, CVec, HermitianOperator, C64, ZERO};

/// Eigenvectors either as dense columns or, for diagonal input, as a permutation.
#[derive(Clone, Debug, PartialEq)]
pub enum Eigenbasis {
    Dense(CMat),
    /// Column `k` is the unit vector `e_{perm[k]}`.
    Permutation(Vec<usize>),
}

/// Ascending eigenvalues with phase-fixed eigenvectors.
///
/// The largest-modulus component of every eigenvector is real and positive
/// (first such index on ties).
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralData {
    pub eigenvalues: Vec<f64>,
    pub basis: Eigenbasis,
}

impl SpectralData {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvector(&self, k: usize) -> CVec {
        match &self.basis {
            Eigenbasis::Dense(v) => v.column(k).into_owned(),
            Eigenbasis::Permutation(p) => {
                let mut e = CVec::zeros(self.dim());
                e[p[k]] = C64::new(1.0, 0.0);
                e
            }
        }
    }

    pub fn vectors(&self) -> CMat {
        match &self.basis {
            Eigenbasis::Dense(v) => v.clone(),
            Eigenbasis::Permutation(p) => {
                let mut v = CMat::zeros(self.dim(), self.dim());
                for (k, &i) in p.iter().enumerate() {
                    v[(i, k)] = C64::new(1.0, 0.0);
                }
                v
            }
        }
    }

    /// `V^dagger A V`
    pub fn to_eigenbasis(&self, a: &CMat) -> CMat {
        match &self.basis {
            Eigenbasis::Dense(v) => v.adjoint() * a * v,
            Eigenbasis::Permutation(p) => CMat::from_fn(p.len(), p.len(), |k, l| a[(p[k], p[l])]),
        }
    }

    /// `V diag(E) V^dagger`
    pub fn reconstruct(&self) -> CMat {
        let v = self.vectors();
        let mut scaled = v.clone();
        for (k, e) in self.eigenvalues.iter().enumerate() {
            scaled.column_mut(k).scale_mut(*e);
        }
        scaled * v.adjoint()
    }
}

fn is_diagonal(m: &CMat) -> bool {
    let n = m.nrows();
    (0..n).all(|j| (0..n).all(|i| i == j || m[(i, j)] == ZERO))
}

fn fix_phases(v: &mut CMat) {
    for k in 0..v.ncols() {
        let mut col = v.column_mut(k);
        let mut best = 0;
        let mut best_mod = -1.0;
        for (i, z) in col.iter().enumerate() {
            if z.norm() > best_mod * (1.0 + 1e-12) {
                best = i;
                best_mod = z.norm();
            }
        }
        if best_mod > 0.0 {
            let phase = col[best].conj() / best_mod;
            for z in col.iter_mut() {
                *z *= phase;
            }
        }
    }
}

/// Full eigendecomposition of a matrix that must be Hermitian to 1e-10.
pub fn diagonalize_matrix(m: &CMat) -> Result<SpectralData> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            got: m.ncols(),
        });
    }
    let defect = hermitian_defect(m);
    if defect > 1e-10 * max_abs(m).max(1.0) {
        return Err(Error::NotHermitian { defect });
    }
    if is_diagonal(m) {
        let n = m.nrows();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.sort_by(|&a, &b| m[(a, a)].re.total_cmp(&m[(b, b)].re));
        return Ok(SpectralData {
            eigenvalues: perm.iter().map(|&i| m[(i, i)].re).collect(),
            basis: Eigenbasis::Permutation(perm),
        });
    }
    let h = HermitianOperator::hermitize(m.clone());
    let (values, mut vectors) = hermitian_eigen(h.matrix());
    fix_phases(&mut vectors);
    Ok(SpectralData {
        eigenvalues: values,
        basis: Eigenbasis::Dense(vectors),
    })
}

pub fn diagonalize(h: &HermitianOperator) -> Result<SpectralData> {
    diagonalize_matrix(h.matrix())
}
