use super::matrix::ComplexMatrix;
use super::svd::{Rotation, MAX_SWEEPS};
use crate::error::{Error, Result};

/// Eigenvalues of a Hermitian matrix, sorted non-increasing.
///
/// Cyclic two-sided Jacobi. The caller is responsible for Hermitian input;
/// only the upper triangle and the real part of the diagonal drive the
/// rotations.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            op: "hermitian eigenvalues",
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let n = m.rows();
    let mut h = m.clone();
    let scale = h.frobenius_norm();
    let mut converged = n < 2 || scale == 0.0;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let g = h[(p, q)];
                if g.norm() <= f64::EPSILON * scale {
                    continue;
                }
                rotated = true;
                let rot = Rotation::new(h[(p, p)].re, h[(q, q)].re, g);
                rot.apply_cols(&mut h, p, q);
                rot.apply_adjoint_rows(&mut h, p, q);
            }
        }
        converged = !rotated;
    }
    if !converged {
        return Err(Error::NoConvergence { sweeps: MAX_SWEEPS });
    }
    let mut eig: Vec<f64> = (0..n).map(|i| h[(i, i)].re).collect();
    eig.sort_by(|a, b| b.total_cmp(a));
    Ok(eig)
}
