use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::bounds::{evaluate_all, find, BoundConfig, BoundId, BoundRecord, DEFAULT_BOUND_TOL};
use crate::error::{Error, Result};
use crate::identities::{deviation_exact, DeviationPair};
use crate::linalg::{ComplexMatrix, TolerancePolicy};
use crate::pair::PerturbationPair;

/// Number of points in the default reproduction grid.
pub const DEFAULT_GRID_POINTS: usize = 90;

/// `count` evenly spaced points from `start` to `stop` inclusive.
pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (stop - start) / (count - 1) as f64;
            (0..count)
                .map(|k| if k + 1 == count { stop } else { start + step * k as f64 })
                .collect()
        }
    }
}

/// Parses `start:stop:count`.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [start, stop, count] = parts[..] else {
        return Err(Error::InvalidGrid(format!("expected start:stop:count, got `{spec}`")));
    };
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| Error::InvalidGrid(format!("invalid number `{s}`")))
    };
    let count: usize = count
        .trim()
        .parse()
        .map_err(|_| Error::InvalidGrid(format!("invalid count `{count}`")))?;
    if count == 0 {
        return Err(Error::InvalidGrid("count must be positive".into()));
    }
    Ok(linspace(num(start)?, num(stop)?, count))
}

/// The 90-point grid on `[0.11, 0.99]`.
pub fn default_epsilon_grid() -> Vec<f64> {
    linspace(0.11, 0.99, DEFAULT_GRID_POINTS)
}

/// A named reference value attached to a sweep row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Reference {
    pub name: &'static str,
    pub value: f64,
}

/// One evaluated pair in a sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub label: String,
    pub epsilon: Option<f64>,
    pub deviation: DeviationPair,
    pub records: Vec<BoundRecord>,
    pub references: Vec<Reference>,
}

impl SweepRow {
    pub fn record(&self, id: BoundId) -> Option<&BoundRecord> {
        find(&self.records, id)
    }

    /// The bound's value, or `None` when it is missing or inapplicable.
    pub fn value(&self, id: BoundId) -> Option<f64> {
        self.record(id).filter(|r| r.applicable).map(|r| r.value)
    }

    pub fn reference(&self, name: &str) -> Option<f64> {
        self.references.iter().find(|r| r.name == name).map(|r| r.value)
    }
}

/// A named boolean check over a report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepMetadata {
    pub seed: Option<u64>,
    pub bound_tolerance: f64,
    pub rank_tolerance: TolerancePolicy,
    /// Seconds since the Unix epoch; excluded from determinism comparisons.
    pub timestamp: u64,
}

impl SweepMetadata {
    fn now() -> Self {
        Self {
            seed: None,
            bound_tolerance: DEFAULT_BOUND_TOL,
            rank_tolerance: TolerancePolicy::Default,
            timestamp: unix_now(),
        }
    }
}

pub(crate) fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub scenario_id: String,
    pub epsilon_grid: Vec<f64>,
    pub rows: Vec<SweepRow>,
    pub checks: Vec<Check>,
    pub metadata: SweepMetadata,
}

impl SweepReport {
    /// Applicable records that fail the sandwich check at `rel_tol`.
    pub fn violations(&self, rel_tol: f64) -> Vec<(&SweepRow, &BoundRecord)> {
        self.rows
            .iter()
            .flat_map(|row| {
                row.records
                    .iter()
                    .filter(move |r| !r.holds(&row.deviation, rel_tol))
                    .map(move |r| (row, r))
            })
            .collect()
    }

    pub fn all_checks_pass(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn non_parametric() -> BoundConfig {
    BoundConfig {
        param_grid: Vec::new(),
        force_general_rank: false,
    }
}

fn row(label: String, epsilon: Option<f64>, pair: &PerturbationPair, references: Vec<Reference>) -> Result<SweepRow> {
    Ok(SweepRow {
        label,
        epsilon,
        deviation: deviation_exact(pair),
        records: evaluate_all(pair, &non_parametric())?,
        references,
    })
}

fn check_domain(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidGrid("empty grid".into()));
    }
    match grid.iter().find(|&&e| !(e > 0.1 && e < 1.0)) {
        Some(e) => Err(Error::InvalidGrid(format!("epsilon {e} outside (0.1, 1)"))),
        None => Ok(()),
    }
}

fn diag_pair(b: [f64; 2]) -> Result<PerturbationPair> {
    PerturbationPair::new(
        ComplexMatrix::from_diag(2, 2, &[1.0, 0.0])?,
        ComplexMatrix::from_diag(2, 2, &b)?,
    )
}

/// The pair `A = diag(1, 0)`, `B = diag(eps/(1+eps), eps/10)`.
pub fn example_41_pair(eps: f64) -> Result<PerturbationPair> {
    diag_pair([eps / (1.0 + eps), eps / 10.0])
}

/// The pair `A = diag(1, 0)`, `B = diag(2 eps/(1+eps), eps)`.
pub fn example_42_pair(eps: f64) -> Result<PerturbationPair> {
    diag_pair([2.0 * eps / (1.0 + eps), eps])
}

/// Closed forms for the first diagonal example.
pub fn example_41_references(eps: f64) -> Vec<Reference> {
    let q = 1.0 / ((1.0 + eps) * (1.0 + eps));
    vec![
        Reference {
            name: "exact_closed",
            value: 1.0,
        },
        Reference {
            name: "chen_up_closed",
            value: 1.0 + 1.0 / (eps * eps) + q,
        },
        Reference {
            name: "li_up_closed",
            value: 0.99 + q,
        },
    ]
}

/// Closed forms for the second diagonal example.
pub fn example_42_references(eps: f64) -> Vec<Reference> {
    let e2 = eps * eps;
    let q = (1.0 - eps).powi(2) / (1.0 + eps).powi(2);
    vec![
        Reference {
            name: "c1_closed",
            value: 1.0 + e2,
        },
        Reference {
            name: "c2_closed",
            value: 2.0,
        },
        Reference {
            name: "chen_comb1_closed",
            value: 1.0 + e2 + (1.0 + 1.0 / e2) * q,
        },
        Reference {
            name: "li_comb1_closed",
            value: 2.0 + 2.0 * q / e2 - (1.0 - eps).powi(2) / (2.0 * e2),
        },
    ]
}

/// `C1 = primal + min{a/b, b/a} dual` and `C2 = primal + dual`, the targets
/// of the combined corollaries.
pub fn combined_targets(pair: &PerturbationPair) -> (f64, f64) {
    let d = deviation_exact(pair);
    let n = pair.norms();
    let (a, b) = (n.a_pinv_sq, n.b_pinv_sq);
    (d.primal + (a / b).min(b / a) * d.dual, d.primal + d.dual)
}

/// Sweeps the first diagonal example over `grid`, which must lie in `(0.1, 1)`.
pub fn example_41_sweep(grid: &[f64]) -> Result<SweepReport> {
    check_domain(grid)?;
    let rows = grid
        .iter()
        .map(|&eps| {
            row(
                format!("eps={eps}"),
                Some(eps),
                &example_41_pair(eps)?,
                example_41_references(eps),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let exact_new = rows.iter().all(|r| {
        [BoundId::NewUp1, BoundId::NewUp2, BoundId::NewLow1, BoundId::NewLow2]
            .iter()
            .all(|&id| r.value(id).is_some_and(|v| (v - r.deviation.primal).abs() <= 1e-10))
    });
    let closed = rows.iter().all(|r| {
        let rel = |id, name| {
            let (v, c) = (r.value(id).unwrap_or(f64::NAN), r.reference(name).unwrap_or(f64::NAN));
            (v - c).abs() <= 1e-10 * c.abs()
        };
        rel(BoundId::ChenUp, "chen_up_closed") && rel(BoundId::LiUp, "li_up_closed")
    });
    let checks = vec![
        Check {
            name: "new bounds equal exact primal".into(),
            passed: exact_new,
        },
        Check {
            name: "classical bounds match closed forms".into(),
            passed: closed,
        },
    ];
    Ok(SweepReport {
        scenario_id: "example-4.1".into(),
        epsilon_grid: grid.to_vec(),
        rows,
        checks,
        metadata: SweepMetadata::now(),
    })
}

/// Sweeps the second diagonal example over `grid`, which must lie in `(0.1, 1)`.
pub fn example_42_sweep(grid: &[f64]) -> Result<SweepReport> {
    check_domain(grid)?;
    let rows = grid
        .iter()
        .map(|&eps| {
            let pair = example_42_pair(eps)?;
            let (c1, c2) = combined_targets(&pair);
            let mut refs = vec![Reference { name: "c1", value: c1 }, Reference { name: "c2", value: c2 }];
            refs.extend(example_42_references(eps));
            row(format!("eps={eps}"), Some(eps), &pair, refs)
        })
        .collect::<Result<Vec<_>>>()?;
    let corup_exact = rows.iter().all(|r| {
        let gap = |id| {
            r.record(id)
                .map(|rec| rec.slack(&r.deviation).abs())
                .unwrap_or(f64::NAN)
        };
        gap(BoundId::CorUp1_1) <= 1e-10 && gap(BoundId::CorUp1_2) <= 1e-10
    });
    let corlow_exact = rows.iter().all(|r| {
        let gap = |id| {
            r.record(id)
                .map(|rec| rec.slack(&r.deviation).abs())
                .unwrap_or(f64::NAN)
        };
        gap(BoundId::CorLow1_1) <= 1e-10 && gap(BoundId::CorLow1_2) <= 1e-10
    });
    let checks = vec![
        Check {
            name: "CORUP records attain their targets".into(),
            passed: corup_exact,
        },
        Check {
            name: "CORLOW records attain their targets".into(),
            passed: corlow_exact,
        },
    ];
    Ok(SweepReport {
        scenario_id: "example-4.2".into(),
        epsilon_grid: grid.to_vec(),
        rows,
        checks,
        metadata: SweepMetadata::now(),
    })
}

/// The pair `A = diag(1, 0)`, `B = [[1/2, 1], [0, 1]]`.
pub fn intro_pair() -> Result<PerturbationPair> {
    PerturbationPair::new(
        ComplexMatrix::from_rows(&[&[1.0, 0.0], &[0.0, 0.0]])?,
        ComplexMatrix::from_rows(&[&[0.5, 1.0], &[0.0, 1.0]])?,
    )
}

/// Neither `CHEN_UP` nor `LI_UP` dominates the other: the first diagonal
/// example favours `LI_UP`, the intro pair favours `CHEN_UP`.
pub fn intro_examples() -> Result<SweepReport> {
    let grid = [0.2, 0.5, 0.9];
    let mut rows = vec![row(
        "intro".into(),
        None,
        &intro_pair()?,
        vec![
            Reference {
                name: "chen_up_closed",
                value: 6.25,
            },
            Reference {
                name: "li_up_closed",
                value: (18.0 + 3.0 * 65f64.sqrt()) / 4.0,
            },
        ],
    )?];
    for eps in grid {
        rows.push(row(
            format!("diag eps={eps}"),
            Some(eps),
            &example_41_pair(eps)?,
            example_41_references(eps),
        )?);
    }
    let lt = |r: &SweepRow, x, y| match (r.value(x), r.value(y)) {
        (Some(a), Some(b)) => a < b,
        _ => false,
    };
    let checks = vec![
        Check {
            name: "CHEN_UP < LI_UP on the intro pair".into(),
            passed: lt(&rows[0], BoundId::ChenUp, BoundId::LiUp),
        },
        Check {
            name: "LI_UP < CHEN_UP on the diagonal pair".into(),
            passed: rows[1..].iter().all(|r| lt(r, BoundId::LiUp, BoundId::ChenUp)),
        },
    ];
    Ok(SweepReport {
        scenario_id: "intro".into(),
        epsilon_grid: grid.to_vec(),
        rows,
        checks,
        metadata: SweepMetadata::now(),
    })
}
