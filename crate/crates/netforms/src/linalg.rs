//! Small dense linear-algebra helpers used across the crate.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Modified Gram-Schmidt with one reorthogonalization pass. Returns the
/// orthonormal columns spanning the column space of `m`, dropping columns
/// whose residual falls below `tol` relative to the largest column norm.
pub fn orthonormal_columns(m: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let scale = (0..m.ncols())
        .map(|j| m.column(j).norm())
        .fold(0.0f64, f64::max)
        .max(1.0);
    let mut basis: Vec<DVector<f64>> = Vec::new();
    for j in 0..m.ncols() {
        let mut v = DVector::from(m.column(j));
        for _ in 0..2 {
            for b in &basis {
                let c = b.dot(&v);
                v -= b * c;
            }
        }
        let n = v.norm();
        if n > tol * scale {
            basis.push(v / n);
        }
    }
    if basis.is_empty() {
        return DMatrix::zeros(m.nrows(), 0);
    }
    DMatrix::from_columns(&basis)
}

/// Largest singular value.
pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    m.clone().singular_values().max()
}

pub fn spectral_norm_c(m: &DMatrix<Complex64>) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    m.clone().singular_values().max()
}

/// Hermitian part `(m + m^H) / 2`.
pub fn hermitian_part(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eig_hermitian(m: &DMatrix<Complex64>) -> f64 {
    if m.nrows() == 0 {
        return f64::INFINITY;
    }
    let eig = m.clone().symmetric_eigen();
    eig.eigenvalues.iter().fold(f64::INFINITY, |a, &b| a.min(b))
}

/// Smallest eigenvalue of a real symmetric matrix.
pub fn min_eig_sym(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return f64::INFINITY;
    }
    let sym = (m + m.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    eig.eigenvalues.iter().fold(f64::INFINITY, |a, &b| a.min(b))
}

/// Smallest eigenvalue of the pencil `(sym(a), g)` with `g` symmetric
/// positive definite: eigenvalues of `L^-1 sym(a) L^-T` for `g = L L^T`.
pub fn pencil_min_eig(a: &DMatrix<f64>, g: &DMatrix<f64>) -> Option<f64> {
    let chol = g.clone().cholesky()?;
    let l = chol.l();
    let li = l.clone().try_inverse()?;
    let sym = (a + a.transpose()) * 0.5;
    let w = &li * sym * li.transpose();
    Some(min_eig_sym(&w))
}

/// All eigenvalues of the symmetric-definite pencil `(sym(a), g)`, ascending.
pub fn pencil_eigs(a: &DMatrix<f64>, g: &DMatrix<f64>) -> Option<Vec<f64>> {
    let chol = g.clone().cholesky()?;
    let li = chol.l().try_inverse()?;
    let sym = (a + a.transpose()) * 0.5;
    let w = &li * sym * li.transpose();
    let mut eigs: Vec<f64> = w.symmetric_eigen().eigenvalues.iter().copied().collect();
    eigs.sort_by(|x, y| x.partial_cmp(y).unwrap());
    Some(eigs)
}

/// Inverse of the lower Cholesky factor of a symmetric positive definite
/// matrix, i.e. the whitening transform for its inner product.
pub fn whitener(g: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let chol = g.clone().cholesky()?;
    chol.l().try_inverse()
}

/// Dense matrix exponential (scaling and squaring with Pade approximation).
pub fn expm(m: &DMatrix<f64>) -> DMatrix<f64> {
    m.exp()
}

pub fn expm_c(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    m.exp()
}

pub fn to_complex(m: &DMatrix<f64>) -> DMatrix<Complex64> {
    m.map(|x| Complex64::new(x, 0.0))
}

/// Frobenius norm of `a - b`.
pub fn frob_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orthonormalization_detects_rank() {
        let m = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 3.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0]);
        let b = orthonormal_columns(&m, 1e-12);
        assert_eq!(b.ncols(), 2);
        let gram = b.transpose() * &b;
        assert!((gram - DMatrix::identity(2, 2)).norm() < 1e-12);
    }

    #[test]
    fn pencil_reduces_to_plain_eigenvalues_for_identity_gram() {
        let a = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 5.0]);
        let g = DMatrix::identity(2, 2);
        assert!((pencil_min_eig(&a, &g).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn expm_of_zero_is_identity() {
        let z = DMatrix::<f64>::zeros(3, 3);
        assert!((expm(&z) - DMatrix::identity(3, 3)).norm() < 1e-14);
    }
}
