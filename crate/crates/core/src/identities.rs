//! Exact deviations and the identities that express them.
//!
//! Three families of closed forms for `||P_B - P_A||_F^2` and
//! `||P_{B*} - P_{A*}||_F^2` are evaluated here and compared with the
//! entrywise deviation:
//!
//! * singular-vector block forms, e.g. `||U~1* U2||^2 + ||U~2* U1||^2`;
//! * forms in `E = B - A` and the pseudoinverses, free of singular vectors;
//! * the same with `E~ = B^+ - A^+` in place of `E`.
//!
//! Each family has an equal-rank specialization (`rank(A) = rank(B)`) in
//! which the two halves of the sum coincide.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, ComplexMatrix};
use crate::pair::PerturbationPair;

/// Acceptance tolerance for identity residuals, relative to `max(1, exact)`.
pub const DEFAULT_RESIDUAL_TOL: f64 = 1e-9;

/// Threshold on `||M - M*||_F` for accepting Hermitian input.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// The two exact deviations of a pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeviationPair {
    /// `||P_B - P_A||_F^2`
    pub primal: f64,
    /// `||P_{B*} - P_{A*}||_F^2`
    pub dual: f64,
}

/// Computes both deviations entrywise from the cached projectors.
pub fn deviation_exact(pair: &PerturbationPair) -> DeviationPair {
    DeviationPair {
        primal: (pair.p_b() - pair.p_a()).frobenius_norm_sq(),
        dual: (pair.p_b_star() - pair.p_a_star()).frobenius_norm_sq(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum IdentityId {
    /// primal = `||U~1* U2||^2 + ||U~2* U1||^2`
    Exp1_1,
    /// dual = `||V~1* V2||^2 + ||V~2* V1||^2`
    Exp1_2,
    /// equal rank: primal = `2||U~1* U2||^2 = 2||U~2* U1||^2`
    Exp2_1,
    /// equal rank: dual = `2||V~1* V2||^2 = 2||V~2* V1||^2`
    Exp2_2,
    /// primal in terms of `E`, `A^+`, `B^+`
    Ide1_1,
    /// dual in terms of `E`, `A^+`, `B^+`
    Ide1_2,
    Ide2_1,
    Ide2_2,
    /// primal in terms of `E~`
    CorIdePrimal,
    /// dual in terms of `E~`
    CorIdeDual,
    CorIdePrimalEqRank,
    CorIdeDualEqRank,
}

impl IdentityId {
    pub const ALL: [IdentityId; 12] = [
        IdentityId::Exp1_1,
        IdentityId::Exp1_2,
        IdentityId::Exp2_1,
        IdentityId::Exp2_2,
        IdentityId::Ide1_1,
        IdentityId::Ide1_2,
        IdentityId::Ide2_1,
        IdentityId::Ide2_2,
        IdentityId::CorIdePrimal,
        IdentityId::CorIdeDual,
        IdentityId::CorIdePrimalEqRank,
        IdentityId::CorIdeDualEqRank,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            IdentityId::Exp1_1 => "EXP_1_1",
            IdentityId::Exp1_2 => "EXP_1_2",
            IdentityId::Exp2_1 => "EXP_2_1",
            IdentityId::Exp2_2 => "EXP_2_2",
            IdentityId::Ide1_1 => "IDE_1_1",
            IdentityId::Ide1_2 => "IDE_1_2",
            IdentityId::Ide2_1 => "IDE_2_1",
            IdentityId::Ide2_2 => "IDE_2_2",
            IdentityId::CorIdePrimal => "COR_IDE_PRIMAL",
            IdentityId::CorIdeDual => "COR_IDE_DUAL",
            IdentityId::CorIdePrimalEqRank => "COR_IDE_PRIMAL_EQRANK",
            IdentityId::CorIdeDualEqRank => "COR_IDE_DUAL_EQRANK",
        }
    }

    /// Whether the identity only holds when `rank(A) = rank(B)`.
    pub fn requires_equal_rank(&self) -> bool {
        matches!(
            self,
            IdentityId::Exp2_1
                | IdentityId::Exp2_2
                | IdentityId::Ide2_1
                | IdentityId::Ide2_2
                | IdentityId::CorIdePrimalEqRank
                | IdentityId::CorIdeDualEqRank
        )
    }
}

impl fmt::Display for IdentityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One evaluated identity. `lhs` is the exact deviation, `rhs` the closed form.
///
/// Equal-rank identities state two right-hand sides; the one reported is
/// whichever lies farther from `lhs`, so `abs_residual` covers both.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityResidualReport {
    pub identity_id: IdentityId,
    pub lhs: f64,
    pub rhs: f64,
    pub abs_residual: f64,
    pub applicable: bool,
}

impl IdentityResidualReport {
    fn single(id: IdentityId, lhs: f64, rhs: f64) -> Self {
        Self {
            identity_id: id,
            lhs,
            rhs,
            abs_residual: (lhs - rhs).abs(),
            applicable: true,
        }
    }

    fn two_forms(id: IdentityId, lhs: f64, first: f64, second: f64, applicable: bool) -> Self {
        let rhs = if (lhs - first).abs() >= (lhs - second).abs() {
            first
        } else {
            second
        };
        Self {
            identity_id: id,
            lhs,
            rhs,
            abs_residual: (lhs - rhs).abs(),
            applicable,
        }
    }

    /// Inapplicable identities always pass.
    pub fn within(&self, rel_tol: f64) -> bool {
        !self.applicable || self.abs_residual <= rel_tol * self.lhs.abs().max(1.0)
    }
}

fn cross_norm(left: Option<ComplexMatrix>, right: Option<ComplexMatrix>) -> f64 {
    match (left, right) {
        (Some(l), Some(r)) => (&l.adjoint() * &r).frobenius_norm_sq(),
        _ => 0.0,
    }
}

/// Singular-vector block expressions for both deviations.
pub fn lemma22_expressions(pair: &PerturbationPair) -> Vec<IdentityResidualReport> {
    let dev = deviation_exact(pair);
    let (sa, sb) = (pair.svd_a(), pair.svd_b());
    let u1t_u2 = cross_norm(sb.u1(), sa.u2());
    let u2t_u1 = cross_norm(sb.u2(), sa.u1());
    let v1t_v2 = cross_norm(sb.v1(), sa.v2());
    let v2t_v1 = cross_norm(sb.v2(), sa.v1());
    let eq = pair.equal_rank();
    vec![
        IdentityResidualReport::single(IdentityId::Exp1_1, dev.primal, u1t_u2 + u2t_u1),
        IdentityResidualReport::single(IdentityId::Exp1_2, dev.dual, v1t_v2 + v2t_v1),
        IdentityResidualReport::two_forms(IdentityId::Exp2_1, dev.primal, 2.0 * u1t_u2, 2.0 * u2t_u1, eq),
        IdentityResidualReport::two_forms(IdentityId::Exp2_2, dev.dual, 2.0 * v1t_v2, 2.0 * v2t_v1, eq),
    ]
}

/// Identities in `E`, `A^+`, `B^+` only.
pub fn lemma23_identities(pair: &PerturbationPair) -> Vec<IdentityResidualReport> {
    let dev = deviation_exact(pair);
    let n = pair.norms();
    let eq = pair.equal_rank();
    vec![
        IdentityResidualReport::single(IdentityId::Ide1_1, dev.primal, n.e_apinv_perp + n.e_bpinv_perp),
        IdentityResidualReport::single(IdentityId::Ide1_2, dev.dual, n.apinv_e_perp + n.bpinv_e_perp),
        IdentityResidualReport::two_forms(
            IdentityId::Ide2_1,
            dev.primal,
            2.0 * n.e_apinv_perp,
            2.0 * n.e_bpinv_perp,
            eq,
        ),
        IdentityResidualReport::two_forms(
            IdentityId::Ide2_2,
            dev.dual,
            2.0 * n.apinv_e_perp,
            2.0 * n.bpinv_e_perp,
            eq,
        ),
    ]
}

/// The same identities written with `E~ = B^+ - A^+`.
pub fn cor25_identities(pair: &PerturbationPair) -> Vec<IdentityResidualReport> {
    let dev = deviation_exact(pair);
    let n = pair.norms();
    let eq = pair.equal_rank();
    vec![
        IdentityResidualReport::single(IdentityId::CorIdePrimal, dev.primal, n.a_et_perp + n.b_et_perp),
        IdentityResidualReport::single(IdentityId::CorIdeDual, dev.dual, n.et_a_perp + n.et_b_perp),
        IdentityResidualReport::two_forms(
            IdentityId::CorIdePrimalEqRank,
            dev.primal,
            2.0 * n.a_et_perp,
            2.0 * n.b_et_perp,
            eq,
        ),
        IdentityResidualReport::two_forms(
            IdentityId::CorIdeDualEqRank,
            dev.dual,
            2.0 * n.et_a_perp,
            2.0 * n.et_b_perp,
            eq,
        ),
    ]
}

/// Every identity, in [`IdentityId::ALL`] order.
pub fn all_identities(pair: &PerturbationPair) -> Vec<IdentityResidualReport> {
    let mut out = lemma22_expressions(pair);
    out.extend(lemma23_identities(pair));
    out.extend(cor25_identities(pair));
    out
}

/// Eigenvalue sandwich around `tr(MN)` for Hermitian `M`, `N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceSandwich {
    /// `sum_i lambda_i mu_{n-i+1}`
    pub lower: f64,
    /// `Re tr(MN)`
    pub value: f64,
    /// `sum_i lambda_i mu_i`
    pub upper: f64,
}

impl TraceSandwich {
    pub fn holds(&self, rel_tol: f64) -> bool {
        let slack = rel_tol * self.lower.abs().max(self.upper.abs()).max(1.0);
        self.lower - slack <= self.value && self.value <= self.upper + slack
    }
}

/// Evaluates `sum lambda_i mu_{n-i+1} <= tr(MN) <= sum lambda_i mu_i` with
/// both spectra sorted non-increasing.
pub fn trace_inequality_check(m: &ComplexMatrix, n: &ComplexMatrix) -> Result<TraceSandwich> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            op: "trace inequality",
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    if m.shape() != n.shape() {
        return Err(Error::ShapeMismatch {
            op: "trace inequality",
            left: m.shape(),
            right: n.shape(),
        });
    }
    for x in [m, n] {
        let residual = x.hermitian_residual()?;
        if residual > HERMITIAN_TOL {
            return Err(Error::NotHermitian { residual });
        }
    }
    let lam = hermitian_eigenvalues(m)?;
    let mu = hermitian_eigenvalues(n)?;
    let upper = lam.iter().zip(&mu).map(|(l, u)| l * u).sum();
    let lower = lam.iter().zip(mu.iter().rev()).map(|(l, u)| l * u).sum();
    let value = (m * n).trace()?.re;
    Ok(TraceSandwich { lower, value, upper })
}
