use num_complex::Complex64;
use serde::Serialize;

use super::matrix::ComplexMatrix;
use super::qr::complete_basis;
use crate::error::{Error, Result};

/// Maximum number of cyclic Jacobi sweeps before giving up.
pub const MAX_SWEEPS: usize = 80;

/// How the numerical-rank cutoff is derived from the largest singular value.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub enum TolerancePolicy {
    /// `max(m, n) * eps * sigma_1`.
    #[default]
    Default,
    /// `factor * sigma_1`.
    Relative(f64),
    /// A fixed cutoff.
    Absolute(f64),
}

impl TolerancePolicy {
    pub fn resolve(&self, rows: usize, cols: usize, sigma_max: f64) -> f64 {
        match *self {
            TolerancePolicy::Default => rows.max(cols) as f64 * f64::EPSILON * sigma_max,
            TolerancePolicy::Relative(f) => f * sigma_max,
            TolerancePolicy::Absolute(t) => t,
        }
    }
}

/// Full singular value decomposition `M = U diag(sigma) V*` with a numerical
/// rank split.
///
/// `U` is `m x m`, `V` is `n x n`, and `singular_values` has `min(m, n)`
/// entries sorted non-increasing. The first `rank` columns of `U` and `V`
/// form the blocks `U1`, `V1`; the rest are `U2`, `V2`.
#[derive(Debug, Clone)]
pub struct SvdFactorization {
    u: ComplexMatrix,
    singular_values: Vec<f64>,
    v: ComplexMatrix,
    rank: usize,
    tolerance: f64,
}

impl SvdFactorization {
    pub fn u(&self) -> &ComplexMatrix {
        &self.u
    }

    pub fn v(&self) -> &ComplexMatrix {
        &self.v
    }

    pub fn singular_values(&self) -> &[f64] {
        &self.singular_values
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn rows(&self) -> usize {
        self.u.rows()
    }

    pub fn cols(&self) -> usize {
        self.v.rows()
    }

    /// `sigma_1`, i.e. the spectral norm of the factored matrix.
    pub fn sigma_max(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }

    /// Smallest singular value above the rank cutoff.
    pub fn sigma_min_nonzero(&self) -> Option<f64> {
        self.rank.checked_sub(1).map(|k| self.singular_values[k])
    }

    /// `||M||_2^2`.
    pub fn norm_sq(&self) -> f64 {
        self.sigma_max().powi(2)
    }

    /// `||M^+||_2^2 = 1 / sigma_r^2`, or 0 for a rank-zero matrix.
    pub fn pinv_norm_sq(&self) -> f64 {
        self.sigma_min_nonzero().map_or(0.0, |s| 1.0 / (s * s))
    }

    pub fn u1(&self) -> Option<ComplexMatrix> {
        self.u.column_block(0..self.rank)
    }

    pub fn u2(&self) -> Option<ComplexMatrix> {
        self.u.column_block(self.rank..self.rows())
    }

    pub fn v1(&self) -> Option<ComplexMatrix> {
        self.v.column_block(0..self.rank)
    }

    pub fn v2(&self) -> Option<ComplexMatrix> {
        self.v.column_block(self.rank..self.cols())
    }

    /// `U diag(sigma) V*` using every singular value (not only the rank part).
    pub fn reconstruct(&self) -> ComplexMatrix {
        let (m, n) = (self.rows(), self.cols());
        let mut us = ComplexMatrix::zeros_unchecked(m, n);
        for (j, &s) in self.singular_values.iter().enumerate() {
            for i in 0..m {
                us[(i, j)] = self.u[(i, j)] * s;
            }
        }
        &us * &self.v.adjoint()
    }
}

/// Singular value decomposition by one-sided (Hestenes) Jacobi.
///
/// Columns of the working matrix are rotated pairwise until every pair is
/// orthogonal to working precision; the column norms are then the singular
/// values. Pairwise orthogonality is relative, so even tiny singular values
/// come with accurate left vectors.
pub fn svd(m: &ComplexMatrix, policy: TolerancePolicy) -> Result<SvdFactorization> {
    if m.rows() >= m.cols() {
        tall_svd(m, policy)
    } else {
        // M* = U' S V'*  =>  M = V' S U'*.
        let t = tall_svd(&m.adjoint(), policy)?;
        Ok(SvdFactorization {
            u: t.v,
            singular_values: t.singular_values,
            v: t.u,
            rank: t.rank,
            tolerance: t.tolerance,
        })
    }
}

fn tall_svd(m: &ComplexMatrix, policy: TolerancePolicy) -> Result<SvdFactorization> {
    let (rows, cols) = m.shape();
    let mut work: Vec<Vec<Complex64>> = (0..cols).map(|j| m.column(j)).collect();
    let mut vcols: Vec<Vec<Complex64>> = (0..cols)
        .map(|j| {
            let mut e = vec![Complex64::new(0.0, 0.0); cols];
            e[j] = Complex64::new(1.0, 0.0);
            e
        })
        .collect();

    let threshold = f64::EPSILON * rows as f64;
    let mut converged = cols < 2;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for p in 0..cols - 1 {
            for q in p + 1..cols {
                let a = norm_sq(&work[p]);
                let b = norm_sq(&work[q]);
                let g = inner(&work[p], &work[q]);
                let gabs = g.norm();
                if gabs == 0.0 || gabs <= threshold * (a * b).sqrt() {
                    continue;
                }
                rotated = true;
                let rot = Rotation::new(a, b, g);
                rot.apply(&mut work, p, q);
                rot.apply(&mut vcols, p, q);
            }
        }
        converged = !rotated;
    }
    if !converged {
        return Err(Error::NoConvergence { sweeps: MAX_SWEEPS });
    }

    let mut order: Vec<(f64, usize)> = work.iter().enumerate().map(|(j, c)| (norm_sq(c).sqrt(), j)).collect();
    order.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)));

    let singular_values: Vec<f64> = order.iter().map(|&(s, _)| s).collect();
    let left: Vec<Vec<Complex64>> = order
        .iter()
        .filter(|&&(s, _)| s > 0.0)
        .map(|&(s, j)| work[j].iter().map(|z| z / s).collect())
        .collect();
    let u = complete_basis(rows, &left);
    let vsorted: Vec<Vec<Complex64>> = order.iter().map(|&(_, j)| vcols[j].clone()).collect();
    let v = ComplexMatrix::from_columns(cols, &vsorted);

    let sigma_max = singular_values[0];
    let tolerance = policy.resolve(rows, cols, sigma_max);
    let rank = singular_values.iter().filter(|&&s| s > tolerance).count();
    Ok(SvdFactorization {
        u,
        singular_values,
        v,
        rank,
        tolerance,
    })
}

fn norm_sq(c: &[Complex64]) -> f64 {
    c.iter().map(|z| z.norm_sqr()).sum()
}

// c_p^* c_q
fn inner(cp: &[Complex64], cq: &[Complex64]) -> Complex64 {
    cp.iter().zip(cq).map(|(x, y)| x.conj() * y).sum()
}

/// Unitary 2x2 rotation diagonalizing the Gram block `[[a, g], [conj(g), b]]`.
///
/// It factors as a phase `diag(1, e^{-i phi})` (making the off-diagonal real)
/// followed by a classical real Jacobi rotation.
pub(crate) struct Rotation {
    c: f64,
    s: f64,
    phase_conj: Complex64,
}

impl Rotation {
    pub(crate) fn new(a: f64, b: f64, g: Complex64) -> Self {
        let gabs = g.norm();
        let zeta = (b - a) / (2.0 * gabs);
        let t = zeta.signum() / (zeta.abs() + zeta.hypot(1.0));
        let c = 1.0 / t.hypot(1.0);
        Self {
            c,
            s: c * t,
            phase_conj: (g / gabs).conj(),
        }
    }

    /// Right-multiplies columns `p`, `q` by the rotation.
    pub(crate) fn apply(&self, cols: &mut [Vec<Complex64>], p: usize, q: usize) {
        let (head, tail) = cols.split_at_mut(q);
        let (cp, cq) = (&mut head[p], &mut tail[0]);
        for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
            let yq = *y * self.phase_conj;
            let xp = *x;
            *x = xp * self.c - yq * self.s;
            *y = xp * self.s + yq * self.c;
        }
    }

    /// Left-multiplies rows `p`, `q` of a square matrix by the adjoint rotation.
    pub(crate) fn apply_adjoint_rows(&self, m: &mut ComplexMatrix, p: usize, q: usize) {
        let phase = self.phase_conj.conj();
        for k in 0..m.cols() {
            let rp = m[(p, k)];
            let rq = m[(q, k)] * phase;
            m[(p, k)] = rp * self.c - rq * self.s;
            m[(q, k)] = rp * self.s + rq * self.c;
        }
    }

    /// Right-multiplies columns `p`, `q` of a square matrix by the rotation.
    pub(crate) fn apply_cols(&self, m: &mut ComplexMatrix, p: usize, q: usize) {
        for k in 0..m.rows() {
            let xp = m[(k, p)];
            let yq = m[(k, q)] * self.phase_conj;
            m[(k, p)] = xp * self.c - yq * self.s;
            m[(k, q)] = xp * self.s + yq * self.c;
        }
    }
}

/// Moore-Penrose inverse `V1 Sigma1^{-1} U1*` from a factorization.
/// The rank-zero case gives the `n x m` zero matrix.
pub fn pinv(f: &SvdFactorization) -> ComplexMatrix {
    let (m, n) = (f.rows(), f.cols());
    let mut out = ComplexMatrix::zeros_unchecked(n, m);
    for k in 0..f.rank() {
        let inv = 1.0 / f.singular_values()[k];
        for i in 0..n {
            let vik = f.v()[(i, k)] * inv;
            for j in 0..m {
                out[(i, j)] += vik * f.u()[(j, k)].conj();
            }
        }
    }
    out
}

/// `Q Q*` for a block with orthonormal columns; `None` gives the zero
/// projector of order `order`.
pub(crate) fn outer_projector(block: Option<ComplexMatrix>, order: usize) -> ComplexMatrix {
    match block {
        Some(q) => &q * &q.adjoint(),
        None => ComplexMatrix::zeros_unchecked(order, order),
    }
}

/// Orthogonal projector onto the column space of `m`.
///
/// Mathematically this is `M M^+`; it is evaluated as `U1 U1*`, which is
/// Hermitian to the last bit and avoids the `sigma_1 / sigma_r` rounding
/// amplification of the literal product.
pub fn projector(m: &ComplexMatrix, policy: TolerancePolicy) -> Result<ComplexMatrix> {
    let f = svd(m, policy)?;
    Ok(outer_projector(f.u1(), m.rows()))
}

/// `||M||_2 = sigma_1`.
pub fn spectral_norm(m: &ComplexMatrix) -> Result<f64> {
    Ok(svd(m, TolerancePolicy::Default)?.sigma_max())
}
