//! Dense complex linear algebra: matrices, SVD, pseudoinverse, projectors.

mod eigen;
mod matrix;
mod qr;
mod svd;

pub use eigen::hermitian_eigenvalues;
pub use matrix::ComplexMatrix;
pub use svd::{pinv, projector, spectral_norm, svd, SvdFactorization, TolerancePolicy, MAX_SWEEPS};

pub(crate) use qr::householder_qr;
pub(crate) use svd::outer_projector;

pub use num_complex::Complex64;

/// `||M||_F^2`.
pub fn frobenius_norm_sq(m: &ComplexMatrix) -> f64 {
    m.frobenius_norm_sq()
}

/// Sum of the diagonal; errors on a non-square matrix.
pub fn trace(m: &ComplexMatrix) -> crate::Result<Complex64> {
    m.trace()
}
