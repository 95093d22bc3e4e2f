use rand::Rng;
use rand_distr::StandardNormal;

use super::ensemble::{gen_pair_at, sample_rng, EnsembleSpec, SvProfile};
use crate::error::Result;
use crate::linalg::{Complex64, ComplexMatrix};
use crate::pair::PerturbationPair;

/// Largest shape drawn by [`mixed_suite_spec`].
pub const SUITE_MAX_SHAPE: (usize, usize) = (20, 15);
/// The small singular value planted in near-rank-deficient samples.
pub const NEAR_DEFICIENT_SIGMA: f64 = 1e-6;

// Shape and rank choices come from a stream family disjoint from the one
// the matrices are drawn from.
const SHAPE_SALT: u64 = 0x5eed_5a17_0000_0001;

/// Recipe for sample `index` of the mixed random suite.
///
/// Shapes are uniform up to 20x15 and ranks uniform in `1..=min(m, n)`.
/// Indices `== 1 (mod 5)` have equal ranks, the others distinct ranks
/// whenever `min(m, n) > 1`; indices `== 0 (mod 10)`
/// plant `sigma_r = 1e-6` in `A`; indices `== 2 (mod 3)` build `B` as a
/// truncated additive perturbation of `A` with scale `10^-U(1, 6)`.
pub fn mixed_suite_spec(seed: u64, index: u64) -> EnsembleSpec {
    let mut rng = sample_rng(seed ^ SHAPE_SALT, index);
    let m = rng.random_range(1..=SUITE_MAX_SHAPE.0);
    let n = rng.random_range(1..=SUITE_MAX_SHAPE.1);
    let k = m.min(n);
    let rank_a = rng.random_range(1..=k);
    let rank_b = if index % 5 == 1 || k == 1 {
        rank_a
    } else {
        // Uniform over 1..=k without rank_a.
        let r = rng.random_range(1..k);
        if r >= rank_a {
            r + 1
        } else {
            r
        }
    };
    let sv_profile = if index.is_multiple_of(10) {
        let mut v: Vec<f64> = (0..k).map(|_| rng.random_range(0.1..1.0)).collect();
        v[rank_a - 1] = NEAR_DEFICIENT_SIGMA;
        SvProfile::Explicit(v)
    } else {
        SvProfile::Uniform
    };
    let perturb_scale = (index % 3 == 2).then(|| 10f64.powf(-rng.random_range(1.0..6.0)));
    EnsembleSpec {
        m,
        n,
        rank_a,
        rank_b,
        sv_profile,
        perturb_scale,
        seed,
    }
}

/// Recipe for sample `index` of the equal-rank suite: same shapes as the
/// mixed suite, `rank(A) = rank(B)`, and every other sample a small
/// perturbation of `A`.
pub fn equal_rank_suite_spec(seed: u64, index: u64) -> EnsembleSpec {
    let mut spec = mixed_suite_spec(seed, index);
    spec.rank_b = spec.rank_a;
    spec.sv_profile = SvProfile::Uniform;
    spec.perturb_scale = (index % 2 == 1).then_some(spec.perturb_scale.unwrap_or(1e-2));
    spec
}

/// Sample `index` of the mixed suite.
pub fn mixed_suite_pair(seed: u64, index: u64) -> Result<PerturbationPair> {
    gen_pair_at(&mixed_suite_spec(seed, index), index)
}

/// Sample `index` of the equal-rank suite.
pub fn equal_rank_suite_pair(seed: u64, index: u64) -> Result<PerturbationPair> {
    gen_pair_at(&equal_rank_suite_spec(seed, index), index)
}

/// `(G + G*) / 2` for a complex Gaussian `G`.
pub fn random_hermitian<R: Rng>(rng: &mut R, order: usize) -> Result<ComplexMatrix> {
    let mut data = vec![Complex64::new(0.0, 0.0); order * order];
    for i in 0..order {
        data[i * order + i] = Complex64::new(rng.sample(StandardNormal), 0.0);
        for j in i + 1..order {
            let z = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)) * 0.5f64.sqrt();
            data[i * order + j] = z;
            data[j * order + i] = z.conj();
        }
    }
    ComplexMatrix::new(order, order, data)
}

/// Sample `index` of the Hermitian suite: two Hermitian matrices of a
/// common order drawn from `2..=10`.
pub fn hermitian_suite_pair(seed: u64, index: u64) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let mut rng = sample_rng(seed, index);
    let order = rng.random_range(2..=10);
    Ok((random_hermitian(&mut rng, order)?, random_hermitian(&mut rng, order)?))
}
