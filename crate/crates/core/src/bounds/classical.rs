use super::{finalize, BoundId, BoundKind, BoundRecord};
use crate::pair::PerturbationPair;

/// Upper bounds on the primal deviation in terms of `||E||`, `||E A^+||`,
/// `||E B^+||`, `||A^+ E||` and `||B^+ E||`, with equal-rank variants.
pub fn classical_bounds(pair: &PerturbationPair) -> Vec<BoundRecord> {
    use BoundId::*;
    use BoundKind::Upper;
    let n = pair.norms();
    let (a, b) = (n.a_pinv_sq, n.b_pinv_sq);
    let li_left = b * n.e_minus_apinv_e;
    let li_right = a * n.e_minus_bpinv_e;
    let records = vec![
        BoundRecord::primal(SunUp, Upper, (a + b) * n.e),
        BoundRecord::primal(SunUpEqRank, Upper, 2.0 * a.min(b) * n.e),
        BoundRecord::primal(ChenUp, Upper, n.e_apinv + n.e_bpinv),
        BoundRecord::primal(ChenUpEqRank, Upper, 2.0 * n.e_apinv.min(n.e_bpinv)),
        BoundRecord::primal(LiUp, Upper, li_left + li_right),
        BoundRecord::primal(LiUpEqRank, Upper, 2.0 * li_left.min(li_right)),
    ];
    finalize(pair, records)
}

/// Bounds that depend only on `r = rank(A)`, `s = rank(B)` and `m`.
///
/// Returns `(|s - r|, s + r)` when `s + r <= m` and `(|s - r|, 2m - s - r)`
/// otherwise. Always applicable.
pub fn rank_bounds(pair: &PerturbationPair) -> (BoundRecord, BoundRecord) {
    let (r, s, m) = (pair.rank_a(), pair.rank_b(), pair.shape().0);
    let lower = r.abs_diff(s);
    let upper = if s + r <= m { s + r } else { 2 * m - s - r };
    (
        BoundRecord::primal(BoundId::RankLow, BoundKind::Lower, lower as f64),
        BoundRecord::primal(BoundId::RankUp, BoundKind::Upper, upper as f64),
    )
}

/// Earlier combined upper bounds on `primal + w * dual`.
pub fn classical_combined_bounds(pair: &PerturbationPair) -> Vec<BoundRecord> {
    use BoundId::*;
    use BoundKind::Upper;
    let n = pair.norms();
    let (a, b) = (n.a_pinv_sq, n.b_pinv_sq);
    let w = (a / b).min(b / a);
    let cross = n.apinv_e_bpinv + n.bpinv_e_apinv;
    let harmonic = 4.0 * a * b / (a + b);
    let records = vec![
        BoundRecord::combined(ChenComb1, Upper, w, (a + b) * n.e),
        BoundRecord::combined(ChenComb2, Upper, w, 2.0 * a.min(b) * n.e),
        BoundRecord::combined(ChenComb3, Upper, 1.0, harmonic * n.e),
        BoundRecord::combined(LiComb1, Upper, 1.0, 2.0 * a.max(b) * n.e - cross / a.min(b)),
        BoundRecord::combined(LiComb2, Upper, 1.0, harmonic * n.e - 2.0 * cross / (a + b)),
    ];
    finalize(pair, records)
}
