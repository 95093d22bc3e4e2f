use super::{check_unit, finalize, BoundId, BoundKind, BoundRecord, CombinedParams};
use crate::error::{Error, Result};
use crate::linalg::SvdFactorization;
use crate::pair::PerturbationPair;

/// `I_M(t) = t / ||M^+||_2^2 + (1 - t) / ||M||_2^2`.
pub fn i_weight(m: &SvdFactorization, t: f64) -> Result<f64> {
    let t = check_unit("t", t)?;
    if m.rank() == 0 {
        return Err(Error::ZeroMatrix { what: "I_M(t)" });
    }
    Ok(i_raw(m.pinv_norm_sq(), m.norm_sq(), t))
}

/// `J_M(t) = t ||M||_2^2 + (1 - t) ||M^+||_2^2`.
pub fn j_weight(m: &SvdFactorization, t: f64) -> Result<f64> {
    let t = check_unit("t", t)?;
    if m.rank() == 0 {
        return Err(Error::ZeroMatrix { what: "J_M(t)" });
    }
    Ok(j_raw(m.pinv_norm_sq(), m.norm_sq(), t))
}

fn i_raw(pinv_sq: f64, norm_sq: f64, t: f64) -> f64 {
    t / pinv_sq + (1.0 - t) / norm_sq
}

fn j_raw(pinv_sq: f64, norm_sq: f64, t: f64) -> f64 {
    t * norm_sq + (1.0 - t) * pinv_sq
}

/// `Phi(lambda) = lambda (||E||^2 - ||A E~ B||^2) + (1 - lambda)(||E~||^2 - ||B^+ E A^+||^2)`.
pub fn phi(pair: &PerturbationPair, lambda: f64) -> Result<f64> {
    Ok(phi_raw(pair, check_unit("lambda", lambda)?))
}

/// `Psi(mu) = mu (||E||^2 - ||B E~ A||^2) + (1 - mu)(||E~||^2 - ||A^+ E B^+||^2)`.
pub fn psi(pair: &PerturbationPair, mu: f64) -> Result<f64> {
    Ok(psi_raw(pair, check_unit("mu", mu)?))
}

fn phi_raw(pair: &PerturbationPair, t: f64) -> f64 {
    let n = pair.norms();
    t * n.e_minus_a_et_b + (1.0 - t) * n.et_minus_bpinv_e_apinv
}

fn psi_raw(pair: &PerturbationPair, t: f64) -> f64 {
    let n = pair.norms();
    t * n.e_minus_b_et_a + (1.0 - t) * n.et_minus_apinv_e_bpinv
}

struct Weights {
    ia: f64,
    ib: f64,
}

fn i_pair(pair: &PerturbationPair, t: f64) -> Weights {
    let n = pair.norms();
    Weights {
        ia: i_raw(n.a_pinv_sq, n.a_sq, t),
        ib: i_raw(n.b_pinv_sq, n.b_sq, t),
    }
}

fn j_pair(pair: &PerturbationPair, t: f64) -> Weights {
    let n = pair.norms();
    Weights {
        ia: j_raw(n.a_pinv_sq, n.a_sq, t),
        ib: j_raw(n.b_pinv_sq, n.b_sq, t),
    }
}

/// Parametric combined upper bounds at one `(lambda, mu)`.
pub(crate) fn upper_family(pair: &PerturbationPair, params: &CombinedParams) -> Vec<BoundRecord> {
    use BoundId::*;
    use BoundKind::Upper;
    let (l, m) = (params.lambda(), params.mu());
    let (wl, wm) = (i_pair(pair, l), i_pair(pair, m));
    let (ph, ps) = (phi_raw(pair, l), psi_raw(pair, m));
    let w = (wl.ia / wl.ib).min(wm.ib / wm.ia);
    let floor = wl.ia.min(wl.ib).min(wm.ia).min(wm.ib);
    let records = vec![
        BoundRecord::combined(CombUpWeighted, Upper, w, ph / wl.ib + ps / wm.ia),
        BoundRecord::combined(CombUpSum, Upper, 1.0, (ph + ps) / floor),
        BoundRecord::combined(CombUpEqRankPhi, Upper, wl.ia / wl.ib, 2.0 * ph / wl.ib),
        BoundRecord::combined(CombUpEqRankPsi, Upper, wm.ib / wm.ia, 2.0 * ps / wm.ia),
    ];
    let records = records.into_iter().map(|r| r.with_params(l, m)).collect();
    finalize(pair, records)
}

/// Parametric combined lower bounds at one `(xi, eta)`.
pub(crate) fn lower_family(pair: &PerturbationPair, params: &CombinedParams) -> Vec<BoundRecord> {
    use BoundId::*;
    use BoundKind::Lower;
    let (x, y) = (params.xi(), params.eta());
    let (wx, wy) = (j_pair(pair, x), j_pair(pair, y));
    let (ph, ps) = (phi_raw(pair, x), psi_raw(pair, y));
    let w = (wx.ia / wx.ib).max(wy.ib / wy.ia);
    let ceil = wx.ia.max(wx.ib).max(wy.ia).max(wy.ib);
    let records = vec![
        BoundRecord::combined(CombLowWeighted, Lower, w, ph / wx.ib + ps / wy.ia),
        BoundRecord::combined(CombLowSum, Lower, 1.0, (ph + ps) / ceil),
        BoundRecord::combined(CombLowEqRankPhi, Lower, wx.ia / wx.ib, 2.0 * ph / wx.ib),
        BoundRecord::combined(CombLowEqRankPsi, Lower, wy.ib / wy.ia, 2.0 * ps / wy.ia),
    ];
    let records = records.into_iter().map(|r| r.with_params(x, y)).collect();
    finalize(pair, records)
}

/// The `lambda = mu = 1` specializations.
pub(crate) fn upper_corollaries(pair: &PerturbationPair) -> Vec<BoundRecord> {
    use BoundId::*;
    use BoundKind::Upper;
    let n = pair.norms();
    let (a, b) = (n.a_pinv_sq, n.b_pinv_sq);
    let (fa, fb) = (n.e_minus_a_et_b, n.e_minus_b_et_a);
    let w = (a / b).min(b / a);
    let records = vec![
        BoundRecord::combined(CorUp1_1, Upper, w, b * fa + a * fb),
        BoundRecord::combined(CorUp1_2, Upper, 1.0, a.max(b) * (fa + fb)),
        BoundRecord::combined(CorUp2_1, Upper, w, 2.0 * (a * fb).min(b * fa)),
        BoundRecord::combined(CorUp2_2, Upper, 1.0, 2.0 * a * b / (a + b) * (fa + fb)),
    ];
    finalize(pair, records)
}

/// The `xi = eta = 0` specializations.
pub(crate) fn lower_corollaries(pair: &PerturbationPair) -> Vec<BoundRecord> {
    use BoundId::*;
    use BoundKind::Lower;
    let n = pair.norms();
    let (a, b) = (n.a_pinv_sq, n.b_pinv_sq);
    let (ga, gb) = (n.et_minus_bpinv_e_apinv, n.et_minus_apinv_e_bpinv);
    let w = (a / b).max(b / a);
    let records = vec![
        BoundRecord::combined(CorLow1_1, Lower, w, ga / b + gb / a),
        BoundRecord::combined(CorLow1_2, Lower, 1.0, (ga + gb) / a.max(b)),
        BoundRecord::combined(CorLow2_1, Lower, w, 2.0 * (ga / b).max(gb / a)),
        BoundRecord::combined(CorLow2_2, Lower, 1.0, 2.0 / (a + b) * (ga + gb)),
    ];
    finalize(pair, records)
}

/// Combined upper bounds at `params`, followed by the `lambda = mu = 1`
/// corollaries.
pub fn combined_upper(pair: &PerturbationPair, params: &CombinedParams) -> Vec<BoundRecord> {
    let mut out = upper_family(pair, params);
    out.extend(upper_corollaries(pair));
    out
}

/// Combined lower bounds at `params`, followed by the `xi = eta = 0`
/// corollaries.
pub fn combined_lower(pair: &PerturbationPair, params: &CombinedParams) -> Vec<BoundRecord> {
    let mut out = lower_family(pair, params);
    out.extend(lower_corollaries(pair));
    out
}
