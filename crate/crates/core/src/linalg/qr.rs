use num_complex::Complex64;

use super::matrix::ComplexMatrix;

/// Householder QR of an `m x k` matrix (`k <= m`), returning the full
/// `m x m` unitary `Q` and the diagonal of `R`.
///
/// Column `j` of `Q` spans the same direction as the `j`-th Gram-Schmidt
/// vector of the input; the trailing `m - k` columns are an orthonormal basis
/// for the orthogonal complement of the input's column space (when the input
/// has full column rank).
pub(crate) fn householder_qr(a: &ComplexMatrix) -> (ComplexMatrix, Vec<Complex64>) {
    let (m, k) = a.shape();
    assert!(k <= m, "householder_qr expects a tall or square matrix");
    let mut r = a.clone();
    let mut reflectors: Vec<Option<Vec<Complex64>>> = Vec::with_capacity(k);
    let mut diag = Vec::with_capacity(k);

    for j in 0..k {
        let x: Vec<Complex64> = (j..m).map(|i| r[(i, j)]).collect();
        let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            reflectors.push(None);
            diag.push(Complex64::new(0.0, 0.0));
            continue;
        }
        let phase = if x[0].norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            x[0] / x[0].norm()
        };
        let alpha = -phase * norm;
        let mut v = x;
        v[0] -= alpha;
        let vnorm_sq: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm_sq == 0.0 {
            reflectors.push(None);
            diag.push(alpha);
            continue;
        }
        apply_reflector_left(&mut r, j, &v, vnorm_sq, j..k);
        diag.push(alpha);
        reflectors.push(Some(v));
    }

    // Q = H_0 H_1 ... H_{k-1}, accumulated right to left on the identity.
    let mut q = ComplexMatrix::zeros_unchecked(m, m);
    for i in 0..m {
        q[(i, i)] = Complex64::new(1.0, 0.0);
    }
    for (j, refl) in reflectors.iter().enumerate().rev() {
        if let Some(v) = refl {
            let vnorm_sq: f64 = v.iter().map(|z| z.norm_sqr()).sum();
            apply_reflector_left(&mut q, j, v, vnorm_sq, 0..m);
        }
    }
    (q, diag)
}

// Applies H = I - 2 v v* / (v* v) to rows offset.. of the given columns.
fn apply_reflector_left(
    target: &mut ComplexMatrix,
    offset: usize,
    v: &[Complex64],
    vnorm_sq: f64,
    cols: std::ops::Range<usize>,
) {
    let scale = 2.0 / vnorm_sq;
    for c in cols {
        let dot: Complex64 = v
            .iter()
            .enumerate()
            .map(|(i, vi)| vi.conj() * target[(offset + i, c)])
            .sum();
        let f = dot * scale;
        for (i, vi) in v.iter().enumerate() {
            target[(offset + i, c)] -= vi * f;
        }
    }
}

/// Completes `k` orthonormal columns (`k <= m`) to an `m x m` unitary matrix.
/// The leading columns are returned unchanged.
pub(crate) fn complete_basis(m: usize, columns: &[Vec<Complex64>]) -> ComplexMatrix {
    let k = columns.len();
    if k == 0 {
        let mut id = ComplexMatrix::zeros_unchecked(m, m);
        for i in 0..m {
            id[(i, i)] = Complex64::new(1.0, 0.0);
        }
        return id;
    }
    let block = ComplexMatrix::from_columns(m, columns);
    let (q, _) = householder_qr(&block);
    let mut out = q.clone();
    for (j, c) in columns.iter().enumerate() {
        for (i, &z) in c.iter().enumerate() {
            out[(i, j)] = z;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unitarity_residual(q: &ComplexMatrix) -> f64 {
        let g = &q.adjoint() * q;
        let id = ComplexMatrix::identity(q.cols()).unwrap();
        (&g - &id).frobenius_norm()
    }

    #[test]
    fn qr_of_complex_block_is_unitary_and_spans_input() {
        let a = ComplexMatrix::new(
            3,
            2,
            vec![
                Complex64::new(1.0, 2.0),
                Complex64::new(0.0, -1.0),
                Complex64::new(3.0, 0.0),
                Complex64::new(1.0, 1.0),
                Complex64::new(-2.0, 0.5),
                Complex64::new(0.0, 0.0),
            ],
        )
        .unwrap();
        let (q, diag) = householder_qr(&a);
        assert!(unitarity_residual(&q) < 1e-14);
        // Q* A is upper triangular with |R_jj| on the diagonal.
        let r = &q.adjoint() * &a;
        assert!(r[(1, 0)].norm() < 1e-14 && r[(2, 0)].norm() < 1e-14 && r[(2, 1)].norm() < 1e-14);
        assert!((r[(0, 0)] - diag[0]).norm() < 1e-13);
    }

    #[test]
    fn completion_keeps_leading_columns() {
        let s = 1.0 / 2f64.sqrt();
        let cols = vec![vec![
            Complex64::new(s, 0.0),
            Complex64::new(0.0, s),
            Complex64::new(0.0, 0.0),
        ]];
        let u = complete_basis(3, &cols);
        assert_eq!(u.column(0), cols[0]);
        assert!(unitarity_residual(&u) < 1e-14);
    }
}
