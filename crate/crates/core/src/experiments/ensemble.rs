use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{householder_qr, svd, Complex64, ComplexMatrix, TolerancePolicy};
use crate::pair::PerturbationPair;

/// How nonzero singular values are chosen.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "UPPERCASE")]
pub enum SvProfile {
    /// Independent draws from `U(0.1, 1)`.
    Uniform,
    /// `1, 1/ratio, 1/ratio^2, ...`
    Geometric(f64),
    /// Leading entries of the list, used as given.
    Explicit(Vec<f64>),
}

/// Recipe for a random pair.
///
/// `A = U diag(sigma) V*` with Haar-distributed `U`, `V`. With
/// `perturb_scale = None`, `B` is drawn independently by the same recipe with
/// rank `rank_b`. With `Some(t)`, `B` is the best rank-`rank_b`
/// approximation of `A + t G` for a complex Gaussian `G` (so `t = 0` and
/// `rank_b = rank_a` give `B = A`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleSpec {
    pub m: usize,
    pub n: usize,
    pub rank_a: usize,
    pub rank_b: usize,
    pub sv_profile: SvProfile,
    pub perturb_scale: Option<f64>,
    pub seed: u64,
}

impl EnsembleSpec {
    /// Independent pair with uniform singular values.
    pub fn independent(m: usize, n: usize, rank_a: usize, rank_b: usize, seed: u64) -> Self {
        Self {
            m,
            n,
            rank_a,
            rank_b,
            sv_profile: SvProfile::Uniform,
            perturb_scale: None,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.n == 0 {
            return Err(Error::EmptyMatrix {
                rows: self.m,
                cols: self.n,
            });
        }
        let k = self.m.min(self.n);
        for rank in [self.rank_a, self.rank_b] {
            if rank > k {
                return Err(Error::InfeasibleRank {
                    rank,
                    rows: self.m,
                    cols: self.n,
                });
            }
        }
        match &self.sv_profile {
            SvProfile::Uniform => {}
            SvProfile::Geometric(r) => {
                if !(r.is_finite() && *r > 0.0) {
                    return Err(Error::InvalidEnsemble(format!(
                        "geometric ratio must be positive, got {r}"
                    )));
                }
            }
            SvProfile::Explicit(list) => {
                let needed = if self.perturb_scale.is_some() {
                    self.rank_a
                } else {
                    self.rank_a.max(self.rank_b)
                };
                if list.len() < needed {
                    return Err(Error::InvalidEnsemble(format!(
                        "explicit profile has {} values, need {needed}",
                        list.len()
                    )));
                }
                if list.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
                    return Err(Error::InvalidEnsemble(
                        "explicit singular values must be positive".into(),
                    ));
                }
            }
        }
        if let Some(t) = self.perturb_scale {
            if !(t.is_finite() && t >= 0.0) {
                return Err(Error::InvalidEnsemble(format!(
                    "perturb_scale must be non-negative, got {t}"
                )));
            }
            if t == 0.0 && self.rank_b != self.rank_a {
                return Err(Error::InvalidEnsemble(
                    "perturb_scale 0 requires rank_b = rank_a".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Deterministic generator for sample `index` of a spec: ChaCha8 seeded
/// with `seed`, on stream `index`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn complex_gaussian<R: Rng>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// `rows x cols` matrix of independent standard complex Gaussians.
pub fn gaussian_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> Result<ComplexMatrix> {
    let data = (0..rows * cols).map(|_| complex_gaussian(rng)).collect();
    ComplexMatrix::new(rows, cols, data)
}

/// Haar-distributed `n x n` unitary: `Q` from the QR factorization of a
/// complex Gaussian matrix, with the phases of `diag(R)` folded into `Q`.
pub fn haar_unitary<R: Rng>(rng: &mut R, n: usize) -> Result<ComplexMatrix> {
    let g = gaussian_matrix(rng, n, n)?;
    let (mut q, diag) = householder_qr(&g);
    for (j, d) in diag.iter().enumerate() {
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    Ok(q)
}

fn singular_values<R: Rng>(rng: &mut R, profile: &SvProfile, rank: usize) -> Vec<f64> {
    match profile {
        SvProfile::Uniform => (0..rank).map(|_| rng.random_range(0.1..1.0)).collect(),
        SvProfile::Geometric(r) => (0..rank).map(|k| r.powi(-(k as i32))).collect(),
        SvProfile::Explicit(list) => list[..rank].to_vec(),
    }
}

/// `U[:, :k] diag(sigma) V[:, :k]*` for Haar `U`, `V`.
fn with_singular_values<R: Rng>(rng: &mut R, m: usize, n: usize, sigma: &[f64]) -> Result<ComplexMatrix> {
    let u = haar_unitary(rng, m)?;
    let v = haar_unitary(rng, n)?;
    let mut out = ComplexMatrix::zeros(m, n)?;
    for (k, &s) in sigma.iter().enumerate() {
        for i in 0..m {
            let us = u[(i, k)] * s;
            for j in 0..n {
                out[(i, j)] += us * v[(j, k)].conj();
            }
        }
    }
    Ok(out)
}

fn truncate(m: &ComplexMatrix, rank: usize) -> Result<ComplexMatrix> {
    let f = svd(m, TolerancePolicy::Default)?;
    let (u, v, s) = (f.u(), f.v(), f.singular_values());
    let mut out = ComplexMatrix::zeros(m.rows(), m.cols())?;
    for k in 0..rank {
        for i in 0..m.rows() {
            let us = u[(i, k)] * s[k];
            for j in 0..m.cols() {
                out[(i, j)] += us * v[(j, k)].conj();
            }
        }
    }
    Ok(out)
}

/// The raw matrices of sample `index`.
pub fn gen_matrices(spec: &EnsembleSpec, index: u64) -> Result<(ComplexMatrix, ComplexMatrix)> {
    spec.validate()?;
    let mut rng = sample_rng(spec.seed, index);
    let sa = singular_values(&mut rng, &spec.sv_profile, spec.rank_a);
    let a = with_singular_values(&mut rng, spec.m, spec.n, &sa)?;
    let b = match spec.perturb_scale {
        None => {
            let sb = singular_values(&mut rng, &spec.sv_profile, spec.rank_b);
            with_singular_values(&mut rng, spec.m, spec.n, &sb)?
        }
        Some(0.0) => a.clone(),
        Some(t) => {
            let g = gaussian_matrix(&mut rng, spec.m, spec.n)?;
            truncate(&(&a + &g.scale(t)), spec.rank_b)?
        }
    };
    Ok((a, b))
}

/// Sample `index` of the ensemble as a pair.
pub fn gen_pair_at(spec: &EnsembleSpec, index: u64) -> Result<PerturbationPair> {
    let (a, b) = gen_matrices(spec, index)?;
    PerturbationPair::new(a, b)
}

/// Sample 0 of the ensemble.
pub fn gen_pair(spec: &EnsembleSpec) -> Result<PerturbationPair> {
    gen_pair_at(spec, 0)
}
