use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use super::ensemble::{gen_pair_at, EnsembleSpec};
use super::sweep::unix_now;
use crate::bounds::{evaluate_all, BoundConfig, BoundId, BoundKind, BoundRecord, Target};
use crate::error::{Error, Result};
use crate::identities::{deviation_exact, DeviationPair};

/// Values within this relative distance count as a tie.
pub const TIE_TOL: f64 = 1e-12;

/// Gap statistics for one bound (and parameter point) across samples.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapStats {
    pub bound_id: BoundId,
    pub params: Option<[f64; 2]>,
    /// Samples where the record was applicable.
    pub samples: usize,
    pub mean: f64,
    pub median: f64,
    pub max: f64,
}

/// How often `bound` was at least as tight as `other` on a common target.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WinRate {
    pub bound: BoundId,
    pub other: BoundId,
    pub comparisons: usize,
    /// Strictly tighter or tied.
    pub wins: usize,
    pub ties: usize,
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub sample: u64,
    pub bound_id: BoundId,
    pub params: Option<[f64; 2]>,
    pub value: f64,
    pub exact: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub spec: EnsembleSpec,
    pub n_samples: usize,
    pub tolerance: f64,
    pub gaps: Vec<GapStats>,
    pub win_rates: Vec<WinRate>,
    pub violation_count: usize,
    pub violations: Vec<Violation>,
    /// Seconds since the Unix epoch; excluded from determinism comparisons.
    pub timestamp: u64,
}

impl BenchReport {
    pub fn win_rate(&self, bound: BoundId, other: BoundId) -> Option<&WinRate> {
        self.win_rates.iter().find(|w| w.bound == bound && w.other == other)
    }

    pub fn gap(&self, bound: BoundId, params: Option<[f64; 2]>) -> Option<&GapStats> {
        self.gaps.iter().find(|g| g.bound_id == bound && g.params == params)
    }
}

/// `|value - exact| / max(1, exact)`.
pub fn relative_gap(record: &BoundRecord, dev: &DeviationPair) -> f64 {
    let exact = record.exact_target(dev);
    (record.value - exact).abs() / exact.abs().max(1.0)
}

fn same_target(x: &BoundRecord, y: &BoundRecord) -> bool {
    if x.kind != y.kind {
        return false;
    }
    match (x.target, y.target) {
        (Target::Primal, Target::Primal) => true,
        (
            Target::Combined {
                w_primal: p1,
                w_dual: d1,
            },
            Target::Combined {
                w_primal: p2,
                w_dual: d2,
            },
        ) => {
            let close = |u: f64, v: f64| (u - v).abs() <= TIE_TOL * u.abs().max(v.abs()).max(1.0);
            close(p1, p2) && close(d1, d2)
        }
        _ => false,
    }
}

// `(tighter or tied, tied)` for x against y.
fn compare(x: &BoundRecord, y: &BoundRecord) -> (bool, bool) {
    let tie = (x.value - y.value).abs() <= TIE_TOL * x.value.abs().max(y.value.abs()).max(1.0);
    let tighter = match x.kind {
        BoundKind::Upper => x.value < y.value,
        BoundKind::Lower => x.value > y.value,
    };
    (tighter || tie, tie)
}

struct Sample {
    dev: DeviationPair,
    records: Vec<BoundRecord>,
}

type Key = (BoundId, Option<[u64; 2]>);

fn key(r: &BoundRecord) -> Key {
    (r.bound_id, r.params.map(|[p, q]| [p.to_bits(), q.to_bits()]))
}

/// Evaluates every bound on `n_samples` draws of `spec` and aggregates
/// tightness. Samples are generated from independent streams and evaluated
/// in parallel; the result does not depend on the thread count.
///
/// Win rates compare non-parametric records of the same kind whose targets
/// coincide on a sample. A record violates the sandwich when its slack is
/// below `-tol * max(1, exact)`.
pub fn tightness_benchmark(
    spec: &EnsembleSpec,
    n_samples: usize,
    config: &BoundConfig,
    tol: f64,
) -> Result<BenchReport> {
    if n_samples == 0 {
        return Err(Error::InvalidEnsemble("n_samples must be at least 1".into()));
    }
    spec.validate()?;
    let samples: Vec<Sample> = (0..n_samples as u64)
        .into_par_iter()
        .map(|i| {
            let pair = gen_pair_at(spec, i)?;
            Ok(Sample {
                dev: deviation_exact(&pair),
                records: evaluate_all(&pair, config)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut gap_lists: BTreeMap<Key, (Option<[f64; 2]>, Vec<f64>)> = BTreeMap::new();
    let mut wins: BTreeMap<(BoundId, BoundId), (usize, usize, usize)> = BTreeMap::new();
    let mut violations = Vec::new();
    let mut violation_count = 0;

    for (i, s) in samples.iter().enumerate() {
        for r in s.records.iter().filter(|r| r.applicable) {
            gap_lists
                .entry(key(r))
                .or_insert_with(|| (r.params, Vec::new()))
                .1
                .push(relative_gap(r, &s.dev));
            if !r.holds(&s.dev, tol) {
                violation_count += 1;
                if violations.len() < 20 {
                    violations.push(Violation {
                        sample: i as u64,
                        bound_id: r.bound_id,
                        params: r.params,
                        value: r.value,
                        exact: r.exact_target(&s.dev),
                    });
                }
            }
        }
        let plain: Vec<&BoundRecord> = s
            .records
            .iter()
            .filter(|r| r.applicable && r.params.is_none())
            .collect();
        for x in &plain {
            for y in &plain {
                if x.bound_id == y.bound_id || !same_target(x, y) {
                    continue;
                }
                let (win, tie) = compare(x, y);
                let e = wins.entry((x.bound_id, y.bound_id)).or_default();
                e.0 += 1;
                e.1 += win as usize;
                e.2 += tie as usize;
            }
        }
    }

    let gaps = gap_lists
        .into_iter()
        .map(|((id, _), (params, mut v))| {
            v.sort_by(f64::total_cmp);
            let k = v.len();
            let median = if k % 2 == 1 {
                v[k / 2]
            } else {
                0.5 * (v[k / 2 - 1] + v[k / 2])
            };
            GapStats {
                bound_id: id,
                params,
                samples: k,
                mean: v.iter().sum::<f64>() / k as f64,
                median,
                max: v[k - 1],
            }
        })
        .collect();
    let win_rates = wins
        .into_iter()
        .map(|((bound, other), (comparisons, wins, ties))| WinRate {
            bound,
            other,
            comparisons,
            wins,
            ties,
            rate: wins as f64 / comparisons as f64,
        })
        .collect();

    Ok(BenchReport {
        spec: spec.clone(),
        n_samples,
        tolerance: tol,
        gaps,
        win_rates,
        violation_count,
        violations,
        timestamp: unix_now(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::DEFAULT_BOUND_TOL;

    #[test]
    fn equal_rank_dominance() {
        let spec = EnsembleSpec::independent(5, 4, 2, 2, 11);
        let rep = tightness_benchmark(&spec, 40, &BoundConfig::default(), DEFAULT_BOUND_TOL).unwrap();
        assert_eq!(rep.violation_count, 0, "{:?}", rep.violations);
        let w = rep.win_rate(BoundId::NewUp1, BoundId::ChenUp).unwrap();
        assert_eq!((w.comparisons, w.rate), (40, 1.0));
    }

    #[test]
    fn identical_pairs_have_zero_gap() {
        let spec = EnsembleSpec {
            perturb_scale: Some(0.0),
            ..EnsembleSpec::independent(4, 4, 2, 2, 5)
        };
        let rep = tightness_benchmark(&spec, 5, &BoundConfig::default(), DEFAULT_BOUND_TOL).unwrap();
        for g in rep.gaps.iter().filter(|g| g.bound_id != BoundId::RankUp) {
            assert!(g.max < 1e-12, "{:?}", g);
        }
    }

    #[test]
    fn zero_samples_rejected() {
        let spec = EnsembleSpec::independent(3, 3, 1, 1, 0);
        assert!(tightness_benchmark(&spec, 0, &BoundConfig::default(), DEFAULT_BOUND_TOL).is_err());
    }
}
