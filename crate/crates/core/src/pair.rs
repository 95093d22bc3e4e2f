//! A matrix and its perturbation, with every derived quantity cached.

use crate::error::{Error, Result};
use crate::linalg::{outer_projector, pinv, svd, ComplexMatrix, SvdFactorization, TolerancePolicy};

/// `A`, `B = A + E`, and everything the identities and bounds need:
/// both SVDs, both pseudoinverses, `E`, `E~ = B^+ - A^+`, the four
/// projectors, and the scalar norms in [`PairNorms`].
///
/// Construction does all the factorization work; nothing downstream
/// refactors.
#[derive(Debug, Clone)]
pub struct PerturbationPair {
    a: ComplexMatrix,
    b: ComplexMatrix,
    svd_a: SvdFactorization,
    svd_b: SvdFactorization,
    pinv_a: ComplexMatrix,
    pinv_b: ComplexMatrix,
    e: ComplexMatrix,
    e_tilde: ComplexMatrix,
    p_a: ComplexMatrix,
    p_b: ComplexMatrix,
    p_a_star: ComplexMatrix,
    p_b_star: ComplexMatrix,
    policy: TolerancePolicy,
    norms: PairNorms,
}

/// Builds a pair, factoring both matrices with the given rank policy.
pub fn make_pair(a: ComplexMatrix, b: ComplexMatrix, policy: TolerancePolicy) -> Result<PerturbationPair> {
    PerturbationPair::with_policy(a, b, policy)
}

impl PerturbationPair {
    /// Builds a pair with the default rank tolerance.
    pub fn new(a: ComplexMatrix, b: ComplexMatrix) -> Result<Self> {
        Self::with_policy(a, b, TolerancePolicy::Default)
    }

    pub fn with_policy(a: ComplexMatrix, b: ComplexMatrix, policy: TolerancePolicy) -> Result<Self> {
        if a.shape() != b.shape() {
            return Err(Error::ShapeMismatch {
                op: "perturbation pair",
                left: a.shape(),
                right: b.shape(),
            });
        }
        let (m, n) = a.shape();
        let svd_a = svd(&a, policy)?;
        let svd_b = svd(&b, policy)?;
        let pinv_a = pinv(&svd_a);
        let pinv_b = pinv(&svd_b);
        let e = &b - &a;
        let e_tilde = &pinv_b - &pinv_a;
        let p_a = outer_projector(svd_a.u1(), m);
        let p_b = outer_projector(svd_b.u1(), m);
        let p_a_star = outer_projector(svd_a.v1(), n);
        let p_b_star = outer_projector(svd_b.v1(), n);

        let mut pair = Self {
            a,
            b,
            svd_a,
            svd_b,
            pinv_a,
            pinv_b,
            e,
            e_tilde,
            p_a,
            p_b,
            p_a_star,
            p_b_star,
            policy,
            norms: PairNorms::default(),
        };
        pair.norms = PairNorms::compute(&pair);
        Ok(pair)
    }

    pub fn a(&self) -> &ComplexMatrix {
        &self.a
    }

    pub fn b(&self) -> &ComplexMatrix {
        &self.b
    }

    pub fn svd_a(&self) -> &SvdFactorization {
        &self.svd_a
    }

    pub fn svd_b(&self) -> &SvdFactorization {
        &self.svd_b
    }

    pub fn pinv_a(&self) -> &ComplexMatrix {
        &self.pinv_a
    }

    pub fn pinv_b(&self) -> &ComplexMatrix {
        &self.pinv_b
    }

    /// `E = B - A`.
    pub fn e(&self) -> &ComplexMatrix {
        &self.e
    }

    /// `E~ = B^+ - A^+`.
    pub fn e_tilde(&self) -> &ComplexMatrix {
        &self.e_tilde
    }

    /// Projector onto the column space of `A` (`m x m`).
    pub fn p_a(&self) -> &ComplexMatrix {
        &self.p_a
    }

    pub fn p_b(&self) -> &ComplexMatrix {
        &self.p_b
    }

    /// Projector onto the row space of `A` (`n x n`), i.e. `A^+ A`.
    pub fn p_a_star(&self) -> &ComplexMatrix {
        &self.p_a_star
    }

    pub fn p_b_star(&self) -> &ComplexMatrix {
        &self.p_b_star
    }

    pub fn norms(&self) -> &PairNorms {
        &self.norms
    }

    pub fn tolerance_policy(&self) -> TolerancePolicy {
        self.policy
    }

    pub fn shape(&self) -> (usize, usize) {
        self.a.shape()
    }

    /// `r = rank(A)`.
    pub fn rank_a(&self) -> usize {
        self.svd_a.rank()
    }

    /// `s = rank(B)`.
    pub fn rank_b(&self) -> usize {
        self.svd_b.rank()
    }

    /// Whether the numerical ranks agree, selecting the equal-rank formulas.
    pub fn equal_rank(&self) -> bool {
        self.rank_a() == self.rank_b()
    }

    /// Both matrices nonzero, so every pseudoinverse norm is finite and positive.
    pub fn both_nonzero(&self) -> bool {
        self.rank_a() > 0 && self.rank_b() > 0
    }
}

/// Squared norms of the products that appear in the identities and bounds.
///
/// Frobenius norms are squared throughout; the four `*_sq` spectral entries
/// are squared spectral norms. Fields whose doc reads `||X||^2 - ||Y||^2`
/// are evaluated as the squared norm of an orthogonal complement (for
/// example `||(I - P_B) E A^+||^2`), which is the same number without
/// cancelling two large terms when `A` or `B` is ill conditioned.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PairNorms {
    /// `||A||_2^2`
    pub a_sq: f64,
    /// `||B||_2^2`
    pub b_sq: f64,
    /// `||A^+||_2^2` (0 when `A = 0`)
    pub a_pinv_sq: f64,
    /// `||B^+||_2^2` (0 when `B = 0`)
    pub b_pinv_sq: f64,

    /// `||E||^2`
    pub e: f64,
    /// `||E~||^2`
    pub et: f64,
    /// `||E A^+||^2`
    pub e_apinv: f64,
    /// `||E B^+||^2`
    pub e_bpinv: f64,
    /// `||A^+ E||^2`
    pub apinv_e: f64,
    /// `||B^+ E||^2`
    pub bpinv_e: f64,
    /// `||B^+ E A^+||^2`, evaluated as `||P_{B*} E~ P_A||^2`
    pub bpinv_e_apinv: f64,
    /// `||A^+ E B^+||^2`, evaluated as `||P_{A*} E~ P_B||^2`
    pub apinv_e_bpinv: f64,
    /// `||B E~ A||^2`, evaluated as `||P_B E P_{A*}||^2`
    pub b_et_a: f64,
    /// `||A E~ B||^2`, evaluated as `||P_A E P_{B*}||^2`
    pub a_et_b: f64,
    /// `||B B^+ E A^+||^2`
    pub pb_e_apinv: f64,
    /// `||A A^+ E B^+||^2`
    pub pa_e_bpinv: f64,
    /// `||A E~||^2`
    pub a_et: f64,
    /// `||B E~||^2`
    pub b_et: f64,
    /// `||E~ A||^2`
    pub et_a: f64,
    /// `||E~ B||^2`
    pub et_b: f64,

    /// `||E A^+||^2 - ||B B^+ E A^+||^2`
    pub e_apinv_perp: f64,
    /// `||E B^+||^2 - ||A A^+ E B^+||^2`
    pub e_bpinv_perp: f64,
    /// `||A^+ E||^2 - ||A^+ E B^+ B||^2`
    pub apinv_e_perp: f64,
    /// `||B^+ E||^2 - ||B^+ E A^+ A||^2`
    pub bpinv_e_perp: f64,
    /// `||A E~||^2 - ||A E~ B B^+||^2`
    pub a_et_perp: f64,
    /// `||B E~||^2 - ||B E~ A A^+||^2`
    pub b_et_perp: f64,
    /// `||E~ A||^2 - ||B^+ B E~ A||^2`
    pub et_a_perp: f64,
    /// `||E~ B||^2 - ||A^+ A E~ B||^2`
    pub et_b_perp: f64,

    /// `||E||^2 - ||B B^+ E||^2`
    pub e_perp_b: f64,
    /// `||E||^2 - ||A A^+ E||^2`
    pub e_perp_a: f64,
    /// `||E~||^2 - ||E~ B B^+||^2`
    pub et_perp_b: f64,
    /// `||E~||^2 - ||E~ A A^+||^2`
    pub et_perp_a: f64,

    /// `||E A^+ A||^2 - ||B E~ A||^2`
    pub e_pastar_perp_b: f64,
    /// `||A^+ A E~||^2 - ||A^+ E B^+||^2`
    pub pastar_et_perp_b: f64,
    /// `||E B^+ B||^2 - ||A E~ B||^2`
    pub e_pbstar_perp_a: f64,
    /// `||B^+ B E~||^2 - ||B^+ E A^+||^2`
    pub pbstar_et_perp_a: f64,

    /// `||B B^+ E A^+||^2 - ||B^+ E A^+||^2 / ||B^+||^2`
    pub pb_e_apinv_minus_bpinv_e_apinv: f64,
    /// `||B B^+ E A^+||^2 - ||B E~ A||^2 / ||A||^2`
    pub pb_e_apinv_minus_b_et_a: f64,
    /// `||B B^+ E A^+||^2 - ||B||^2 ||B^+ E A^+||^2` (non-positive)
    pub pb_e_apinv_minus_bpinv_e_apinv_scaled: f64,
    /// `||B B^+ E A^+||^2 - ||A^+||^2 ||B E~ A||^2` (non-positive)
    pub pb_e_apinv_minus_b_et_a_scaled: f64,
    /// `||A A^+ E B^+||^2 - ||A^+ E B^+||^2 / ||A^+||^2`
    pub pa_e_bpinv_minus_apinv_e_bpinv: f64,
    /// `||A A^+ E B^+||^2 - ||A E~ B||^2 / ||B||^2`
    pub pa_e_bpinv_minus_a_et_b: f64,
    /// `||A A^+ E B^+||^2 - ||A||^2 ||A^+ E B^+||^2` (non-positive)
    pub pa_e_bpinv_minus_apinv_e_bpinv_scaled: f64,
    /// `||A A^+ E B^+||^2 - ||B^+||^2 ||A E~ B||^2` (non-positive)
    pub pa_e_bpinv_minus_a_et_b_scaled: f64,
    /// `||E||^2 - ||A^+ E||^2 / ||A^+||^2`
    pub e_minus_apinv_e: f64,
    /// `||E||^2 - ||B^+ E||^2 / ||B^+||^2`
    pub e_minus_bpinv_e: f64,

    /// `||E||^2 - ||A E~ B||^2`
    pub e_minus_a_et_b: f64,
    /// `||E~||^2 - ||B^+ E A^+||^2`
    pub et_minus_bpinv_e_apinv: f64,
    /// `||E||^2 - ||B E~ A||^2`
    pub e_minus_b_et_a: f64,
    /// `||E~||^2 - ||A^+ E B^+||^2`
    pub et_minus_apinv_e_bpinv: f64,
}

impl PairNorms {
    fn compute(p: &PerturbationPair) -> Self {
        let fro = |m: &ComplexMatrix| m.frobenius_norm_sq();
        let (a, b, ap, bp, e, et) = (&p.a, &p.b, &p.pinv_a, &p.pinv_b, &p.e, &p.e_tilde);
        let (pa, pb, pas, pbs) = (&p.p_a, &p.p_b, &p.p_a_star, &p.p_b_star);
        // Orthogonal complements.
        let qa = pa.complement();
        let qb = pb.complement();
        let qas = pas.complement();
        let qbs = pbs.complement();

        let e_apinv_m = e * ap;
        let e_bpinv_m = e * bp;
        let qa_e = &qa * e;
        let qb_e = &qb * e;
        let et_qa = et * &qa;
        let et_qb = et * &qb;
        let qas_et = &qas * et;
        let qbs_et = &qbs * et;

        // Differences of terms that grow like ||A^+||^2 or ||B^+||^2 are
        // written as weighted sums over the cores U~1* E V1 and U1* E V~1,
        // with the weights (differences of inverse squared singular values)
        // formed exactly.
        let sa = &p.svd_a.singular_values()[..p.rank_a()];
        let sb = &p.svd_b.singular_values()[..p.rank_b()];
        let inv = |s: &[f64]| s.iter().map(|x| 1.0 / (x * x)).collect::<Vec<f64>>();
        let (ia, ib) = (inv(sa), inv(sb));
        let (a_first, a_last) = (ia.first().copied().unwrap_or(0.0), ia.last().copied().unwrap_or(0.0));
        let (b_first, b_last) = (ib.first().copied().unwrap_or(0.0), ib.last().copied().unwrap_or(0.0));
        let core = |l: Option<ComplexMatrix>, r: Option<ComplexMatrix>| match (l, r) {
            (Some(l), Some(r)) => Some(&(&l.adjoint() * e) * &r),
            _ => None,
        };
        let weighted = |k: &Option<ComplexMatrix>, w: &dyn Fn(usize, usize) -> f64| match k {
            Some(k) => (0..k.rows())
                .flat_map(|i| (0..k.cols()).map(move |j| (i, j)))
                .map(|(i, j)| k[(i, j)].norm_sqr() * w(i, j))
                .sum(),
            None => 0.0,
        };
        // Rows follow B's singular values, columns A's.
        let k_ba = core(p.svd_b.u1(), p.svd_a.v1());
        // Rows follow A's singular values, columns B's.
        let k_ab = core(p.svd_a.u1(), p.svd_b.v1());
        let row_weighted = |u1: Option<ComplexMatrix>, w: &dyn Fn(usize) -> f64| match u1 {
            Some(u) => {
                let ue = &u.adjoint() * e;
                (0..ue.rows())
                    .map(|i| (0..ue.cols()).map(|j| ue[(i, j)].norm_sqr()).sum::<f64>() * w(i))
                    .sum()
            }
            None => 0.0,
        };

        Self {
            pb_e_apinv_minus_bpinv_e_apinv: weighted(&k_ba, &|i, j| ia[j] * (b_last - ib[i]) / b_last),
            pb_e_apinv_minus_b_et_a: weighted(&k_ba, &|_, j| ia[j] - a_first),
            pb_e_apinv_minus_bpinv_e_apinv_scaled: weighted(&k_ba, &|i, j| ia[j] * (b_first - ib[i]) / b_first),
            pb_e_apinv_minus_b_et_a_scaled: weighted(&k_ba, &|_, j| ia[j] - a_last),
            pa_e_bpinv_minus_apinv_e_bpinv: weighted(&k_ab, &|i, j| ib[j] * (a_last - ia[i]) / a_last),
            pa_e_bpinv_minus_a_et_b: weighted(&k_ab, &|_, j| ib[j] - b_first),
            pa_e_bpinv_minus_apinv_e_bpinv_scaled: weighted(&k_ab, &|i, j| ib[j] * (a_first - ia[i]) / a_first),
            pa_e_bpinv_minus_a_et_b_scaled: weighted(&k_ab, &|_, j| ib[j] - b_last),
            e_minus_apinv_e: fro(&qa_e) + row_weighted(p.svd_a.u1(), &|i| (a_last - ia[i]) / a_last),
            e_minus_bpinv_e: fro(&qb_e) + row_weighted(p.svd_b.u1(), &|i| (b_last - ib[i]) / b_last),

            a_sq: p.svd_a.norm_sq(),
            b_sq: p.svd_b.norm_sq(),
            a_pinv_sq: p.svd_a.pinv_norm_sq(),
            b_pinv_sq: p.svd_b.pinv_norm_sq(),

            e: fro(e),
            et: fro(et),
            e_apinv: fro(&e_apinv_m),
            e_bpinv: fro(&e_bpinv_m),
            apinv_e: fro(&(ap * e)),
            bpinv_e: fro(&(bp * e)),
            bpinv_e_apinv: fro(&(&(pbs * et) * pa)),
            apinv_e_bpinv: fro(&(&(pas * et) * pb)),
            b_et_a: fro(&(&(pb * e) * pas)),
            a_et_b: fro(&(&(pa * e) * pbs)),
            pb_e_apinv: fro(&(pb * &e_apinv_m)),
            pa_e_bpinv: fro(&(pa * &e_bpinv_m)),
            a_et: fro(&(a * et)),
            b_et: fro(&(b * et)),
            et_a: fro(&(et * a)),
            et_b: fro(&(et * b)),

            e_apinv_perp: fro(&(&qb_e * ap)),
            e_bpinv_perp: fro(&(&qa_e * bp)),
            apinv_e_perp: fro(&(ap * &(e * &qbs))),
            bpinv_e_perp: fro(&(bp * &(e * &qas))),
            a_et_perp: fro(&(a * &et_qb)),
            b_et_perp: fro(&(b * &et_qa)),
            et_a_perp: fro(&(&qbs_et * a)),
            et_b_perp: fro(&(&qas_et * b)),

            e_perp_b: fro(&qb_e),
            e_perp_a: fro(&qa_e),
            et_perp_b: fro(&et_qb),
            et_perp_a: fro(&et_qa),

            e_pastar_perp_b: fro(&(&qb_e * pas)),
            pastar_et_perp_b: fro(&(pas * &et_qb)),
            e_pbstar_perp_a: fro(&(&qa_e * pbs)),
            pbstar_et_perp_a: fro(&(pbs * &et_qa)),

            e_minus_a_et_b: fro(&qa_e) + fro(&(&(pa * e) * &qbs)),
            et_minus_bpinv_e_apinv: fro(&qbs_et) + fro(&(pbs * &et_qa)),
            e_minus_b_et_a: fro(&qb_e) + fro(&(&(pb * e) * &qas)),
            et_minus_apinv_e_bpinv: fro(&qas_et) + fro(&(pas * &et_qb)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex41(eps: f64) -> PerturbationPair {
        let a = ComplexMatrix::from_diag(2, 2, &[1.0, 0.0]).unwrap();
        let b = ComplexMatrix::from_diag(2, 2, &[eps / (1.0 + eps), eps / 10.0]).unwrap();
        PerturbationPair::new(a, b).unwrap()
    }

    #[test]
    fn unperturbed_pair() {
        let a = ComplexMatrix::from_rows(&[&[1.0, 2.0], &[3.0, 4.0], &[0.0, 1.0]]).unwrap();
        let pair = PerturbationPair::new(a.clone(), a).unwrap();
        assert!(pair.e().is_zero());
        assert!(pair.e_tilde().is_zero());
        assert_eq!(pair.p_a(), pair.p_b());
        assert_eq!(pair.norms().e, 0.0);
    }

    #[test]
    fn example_41_half() {
        let pair = ex41(0.5);
        let expected = ComplexMatrix::from_diag(2, 2, &[2.0, 20.0]).unwrap();
        assert!((pair.e_tilde() - &expected).max_abs() < 1e-13);
        assert_eq!((pair.rank_a(), pair.rank_b()), (1, 2));
        assert!(!pair.equal_rank());
        let n = pair.norms();
        assert!((n.a_pinv_sq - 1.0).abs() < 1e-15);
        assert!((n.b_pinv_sq - 400.0).abs() < 1e-10);
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let a = ComplexMatrix::zeros(2, 2).unwrap();
        let b = ComplexMatrix::zeros(2, 3).unwrap();
        assert!(matches!(PerturbationPair::new(a, b), Err(Error::ShapeMismatch { .. })));
    }

    #[test]
    fn complement_forms_match_literal_differences() {
        // Well-conditioned pair, so the literal differences are accurate.
        let a = ComplexMatrix::from_rows(&[&[2.0, 0.5, 0.0], &[0.0, 1.0, 1.0], &[1.0, 0.0, 0.0], &[0.0, 0.0, 0.0]])
            .unwrap();
        let b = ComplexMatrix::from_rows(&[&[1.5, 0.0, 0.2], &[0.3, 1.2, 0.9], &[0.0, 0.0, 0.0], &[0.4, 0.1, 0.0]])
            .unwrap();
        let p = PerturbationPair::new(a, b).unwrap();
        let n = p.norms();
        let fro = |m: &ComplexMatrix| m.frobenius_norm_sq();
        let (a, b, ap, bp, e, et) = (p.a(), p.b(), p.pinv_a(), p.pinv_b(), p.e(), p.e_tilde());
        let checks = [
            (n.e_apinv_perp, n.e_apinv - n.pb_e_apinv),
            (n.e_bpinv_perp, n.e_bpinv - n.pa_e_bpinv),
            (n.apinv_e_perp, n.apinv_e - fro(&(&(&(ap * e) * bp) * b))),
            (n.bpinv_e_perp, n.bpinv_e - fro(&(&(&(bp * e) * ap) * a))),
            (n.a_et_perp, n.a_et - fro(&(&(&(a * et) * b) * bp))),
            (n.b_et_perp, n.b_et - fro(&(&(&(b * et) * a) * ap))),
            (n.et_a_perp, n.et_a - fro(&(&(&(bp * b) * et) * a))),
            (n.et_b_perp, n.et_b - fro(&(&(&(ap * a) * et) * b))),
            (n.e_perp_b, n.e - fro(&(&(b * bp) * e))),
            (n.e_perp_a, n.e - fro(&(&(a * ap) * e))),
            (n.et_perp_b, n.et - fro(&(&(et * b) * bp))),
            (n.et_perp_a, n.et - fro(&(&(et * a) * ap))),
            (n.e_pastar_perp_b, fro(&(&(e * ap) * a)) - n.b_et_a),
            (n.pastar_et_perp_b, fro(&(&(ap * a) * et)) - n.apinv_e_bpinv),
            (n.e_pbstar_perp_a, fro(&(&(e * bp) * b)) - n.a_et_b),
            (n.pbstar_et_perp_a, fro(&(&(bp * b) * et)) - n.bpinv_e_apinv),
            (n.e_minus_a_et_b, n.e - n.a_et_b),
            (n.et_minus_bpinv_e_apinv, n.et - n.bpinv_e_apinv),
            (n.e_minus_b_et_a, n.e - n.b_et_a),
            (n.et_minus_apinv_e_bpinv, n.et - n.apinv_e_bpinv),
            (
                n.pb_e_apinv_minus_bpinv_e_apinv,
                n.pb_e_apinv - n.bpinv_e_apinv / n.b_pinv_sq,
            ),
            (n.pb_e_apinv_minus_b_et_a, n.pb_e_apinv - n.b_et_a / n.a_sq),
            (
                n.pb_e_apinv_minus_bpinv_e_apinv_scaled,
                n.pb_e_apinv - n.b_sq * n.bpinv_e_apinv,
            ),
            (n.pb_e_apinv_minus_b_et_a_scaled, n.pb_e_apinv - n.a_pinv_sq * n.b_et_a),
            (
                n.pa_e_bpinv_minus_apinv_e_bpinv,
                n.pa_e_bpinv - n.apinv_e_bpinv / n.a_pinv_sq,
            ),
            (n.pa_e_bpinv_minus_a_et_b, n.pa_e_bpinv - n.a_et_b / n.b_sq),
            (
                n.pa_e_bpinv_minus_apinv_e_bpinv_scaled,
                n.pa_e_bpinv - n.a_sq * n.apinv_e_bpinv,
            ),
            (n.pa_e_bpinv_minus_a_et_b_scaled, n.pa_e_bpinv - n.b_pinv_sq * n.a_et_b),
            (n.e_minus_apinv_e, n.e - n.apinv_e / n.a_pinv_sq),
            (n.e_minus_bpinv_e, n.e - n.bpinv_e / n.b_pinv_sq),
        ];
        for (k, (stable, literal)) in checks.iter().enumerate() {
            assert!(
                (stable - literal).abs() <= 1e-10 * literal.abs().max(1.0),
                "term {k}: {stable} vs {literal}"
            );
        }
    }
}
