use serde::Serialize;

use super::{finalize, BoundId, BoundKind, BoundRecord};
use crate::pair::{PairNorms, PerturbationPair};

/// The scalars that enter the sharper primal bounds.
///
/// Unprimed quantities feed the upper bounds, primed ones the lower bounds.
/// All are non-negative.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct AuxiliaryQuantities {
    /// `max{||B^+ E A^+||^2 / ||B^+||^2, ||B E~ A||^2 / ||A||^2}`
    pub alpha1: f64,
    /// `max{||A^+ E B^+||^2 / ||A^+||^2, ||A E~ B||^2 / ||B||^2}`
    pub alpha2: f64,
    /// `min{||B||^2 ||B^+ E A^+||^2, ||A^+||^2 ||B E~ A||^2}`
    pub alpha1_prime: f64,
    /// `min{||A||^2 ||A^+ E B^+||^2, ||B^+||^2 ||A E~ B||^2}`
    pub alpha2_prime: f64,
    /// `min{||A^+||^2 (||E||^2 - ||BB^+E||^2), ||A||^2 (||E~||^2 - ||E~BB^+||^2)}`
    pub beta1: f64,
    /// `min{||B^+||^2 (||E||^2 - ||AA^+E||^2), ||B||^2 (||E~||^2 - ||E~AA^+||^2)}`
    pub beta2: f64,
    pub beta1_prime: f64,
    pub beta2_prime: f64,
    /// `min{||A^+||^2 (||EA^+A||^2 - ||BE~A||^2), ||A||^2 (||A^+AE~||^2 - ||A^+EB^+||^2)}`
    pub gamma1: f64,
    /// `min{||B^+||^2 (||EB^+B||^2 - ||AE~B||^2), ||B||^2 (||B^+BE~||^2 - ||B^+EA^+||^2)}`
    pub gamma2: f64,
    pub gamma1_prime: f64,
    pub gamma2_prime: f64,
}

impl AuxiliaryQuantities {
    pub fn compute(n: &PairNorms) -> Self {
        let (a, b) = (n.a_pinv_sq, n.b_pinv_sq);
        let (sa, sb) = (n.a_sq, n.b_sq);
        Self {
            alpha1: (n.bpinv_e_apinv / b).max(n.b_et_a / sa),
            alpha2: (n.apinv_e_bpinv / a).max(n.a_et_b / sb),
            alpha1_prime: (sb * n.bpinv_e_apinv).min(a * n.b_et_a),
            alpha2_prime: (sa * n.apinv_e_bpinv).min(b * n.a_et_b),
            beta1: (a * n.e_perp_b).min(sa * n.et_perp_b),
            beta2: (b * n.e_perp_a).min(sb * n.et_perp_a),
            beta1_prime: (n.e_perp_b / sa).max(n.et_perp_b / a),
            beta2_prime: (n.e_perp_a / sb).max(n.et_perp_a / b),
            gamma1: (a * n.e_pastar_perp_b).min(sa * n.pastar_et_perp_b),
            gamma2: (b * n.e_pbstar_perp_a).min(sb * n.pbstar_et_perp_a),
            gamma1_prime: (n.e_pastar_perp_b / sa).max(n.pastar_et_perp_b / a),
            gamma2_prime: (n.e_pbstar_perp_a / sb).max(n.pbstar_et_perp_a / b),
        }
    }
}

/// Upper bounds on the primal deviation: `NEW_UP1..3` and their equal-rank forms.
pub fn new_upper_bounds(pair: &PerturbationPair) -> (AuxiliaryQuantities, Vec<BoundRecord>) {
    use BoundId::*;
    use BoundKind::Upper;
    let n = pair.norms();
    let q = AuxiliaryQuantities::compute(n);
    // ||E A^+||^2 - alpha1 and ||E B^+||^2 - alpha2.
    let left = n.e_apinv_perp + n.pb_e_apinv_minus_bpinv_e_apinv.min(n.pb_e_apinv_minus_b_et_a);
    let right = n.e_bpinv_perp + n.pa_e_bpinv_minus_apinv_e_bpinv.min(n.pa_e_bpinv_minus_a_et_b);
    let records = vec![
        BoundRecord::primal(NewUp1, Upper, left + right),
        BoundRecord::primal(NewUp1EqRank, Upper, 2.0 * left.min(right)),
        BoundRecord::primal(NewUp2, Upper, q.beta1 + q.beta2),
        BoundRecord::primal(NewUp2EqRank, Upper, 2.0 * q.beta1.min(q.beta2)),
        BoundRecord::primal(NewUp3, Upper, q.gamma1 + q.gamma2),
        BoundRecord::primal(NewUp3EqRank, Upper, 2.0 * q.gamma1.min(q.gamma2)),
    ];
    (q, finalize(pair, records))
}

/// Lower bounds on the primal deviation: `NEW_LOW1..3` and their equal-rank forms.
pub fn new_lower_bounds(pair: &PerturbationPair) -> (AuxiliaryQuantities, Vec<BoundRecord>) {
    use BoundId::*;
    use BoundKind::Lower;
    let n = pair.norms();
    let q = AuxiliaryQuantities::compute(n);
    let left = n.e_apinv_perp
        + n.pb_e_apinv_minus_bpinv_e_apinv_scaled
            .max(n.pb_e_apinv_minus_b_et_a_scaled);
    let right = n.e_bpinv_perp
        + n.pa_e_bpinv_minus_apinv_e_bpinv_scaled
            .max(n.pa_e_bpinv_minus_a_et_b_scaled);
    let records = vec![
        BoundRecord::primal(NewLow1, Lower, left + right),
        BoundRecord::primal(NewLow1EqRank, Lower, 2.0 * left.max(right)),
        BoundRecord::primal(NewLow2, Lower, q.beta1_prime + q.beta2_prime),
        BoundRecord::primal(NewLow2EqRank, Lower, 2.0 * q.beta1_prime.max(q.beta2_prime)),
        BoundRecord::primal(NewLow3, Lower, q.gamma1_prime + q.gamma2_prime),
        BoundRecord::primal(NewLow3EqRank, Lower, 2.0 * q.gamma1_prime.max(q.gamma2_prime)),
    ];
    (q, finalize(pair, records))
}
