//! Upper, lower and combined bounds on the projector deviations.
//!
//! Every bound evaluates to a [`BoundRecord`]: a value, the quantity it
//! bounds, and whether it applies to the pair at hand. Records are checked
//! against [`DeviationPair`] with [`BoundRecord::holds`].
//!
//! Write `a = ||A^+||_2^2` and `b = ||B^+||_2^2`. The families are
//!
//! * classical upper bounds on the primal deviation ([`classical_bounds`]);
//! * rank-only bounds ([`rank_bounds`]);
//! * the sharper upper and lower bounds built from `E` and `E~`
//!   ([`new_upper_bounds`], [`new_lower_bounds`]);
//! * combined bounds on `primal + w * dual` ([`combined_upper`],
//!   [`combined_lower`], [`classical_combined_bounds`]).
//!
//! Bounds that involve pseudoinverse norms are reported inapplicable, not
//! failed, when `A` or `B` is zero. Equal-rank variants are always emitted
//! and flagged inapplicable unless `rank(A) = rank(B)`.

mod classical;
mod combined;
mod sharp;

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::identities::DeviationPair;
use crate::pair::PerturbationPair;

pub use classical::{classical_bounds, classical_combined_bounds, rank_bounds};
pub use combined::{combined_lower, combined_upper, i_weight, j_weight, phi, psi};
pub use sharp::{new_lower_bounds, new_upper_bounds, AuxiliaryQuantities};

/// Default acceptance tolerance, relative to `max(1, exact)`.
pub const DEFAULT_BOUND_TOL: f64 = 1e-9;

macro_rules! bound_ids {
    ($($variant:ident => $name:literal),* $(,)?) => {
        /// Identifier of a bound in the catalog.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum BoundId {
            $($variant,)*
        }

        impl BoundId {
            pub const ALL: &'static [BoundId] = &[$(BoundId::$variant,)*];

            pub fn as_str(&self) -> &'static str {
                match self {
                    $(BoundId::$variant => $name,)*
                }
            }

            pub fn parse(s: &str) -> Option<BoundId> {
                match s {
                    $($name => Some(BoundId::$variant),)*
                    _ => None,
                }
            }
        }
    };
}

bound_ids! {
    SunUp => "SUN_UP",
    SunUpEqRank => "SUN_UP_EQRANK",
    ChenUp => "CHEN_UP",
    ChenUpEqRank => "CHEN_UP_EQRANK",
    LiUp => "LI_UP",
    LiUpEqRank => "LI_UP_EQRANK",
    RankLow => "RANK_LOW",
    RankUp => "RANK_UP",
    NewUp1 => "NEW_UP1",
    NewUp1EqRank => "NEW_UP1_EQRANK",
    NewUp2 => "NEW_UP2",
    NewUp2EqRank => "NEW_UP2_EQRANK",
    NewUp3 => "NEW_UP3",
    NewUp3EqRank => "NEW_UP3_EQRANK",
    NewLow1 => "NEW_LOW1",
    NewLow1EqRank => "NEW_LOW1_EQRANK",
    NewLow2 => "NEW_LOW2",
    NewLow2EqRank => "NEW_LOW2_EQRANK",
    NewLow3 => "NEW_LOW3",
    NewLow3EqRank => "NEW_LOW3_EQRANK",
    ChenComb1 => "CHEN_COMB1",
    ChenComb2 => "CHEN_COMB2",
    ChenComb3 => "CHEN_COMB3",
    LiComb1 => "LI_COMB1",
    LiComb2 => "LI_COMB2",
    CombUpWeighted => "COMB_UP_WEIGHTED",
    CombUpSum => "COMB_UP_SUM",
    CombUpEqRankPhi => "COMB_UP_EQRANK_PHI",
    CombUpEqRankPsi => "COMB_UP_EQRANK_PSI",
    CorUp1_1 => "CORUP_1_1",
    CorUp1_2 => "CORUP_1_2",
    CorUp2_1 => "CORUP_2_1",
    CorUp2_2 => "CORUP_2_2",
    CombLowWeighted => "COMB_LOW_WEIGHTED",
    CombLowSum => "COMB_LOW_SUM",
    CombLowEqRankPhi => "COMB_LOW_EQRANK_PHI",
    CombLowEqRankPsi => "COMB_LOW_EQRANK_PSI",
    CorLow1_1 => "CORLOW_1_1",
    CorLow1_2 => "CORLOW_1_2",
    CorLow2_1 => "CORLOW_2_1",
    CorLow2_2 => "CORLOW_2_2",
}

impl BoundId {
    /// Whether the bound is stated only for `rank(A) = rank(B)`.
    pub fn requires_equal_rank(&self) -> bool {
        use BoundId::*;
        matches!(
            self,
            SunUpEqRank
                | ChenUpEqRank
                | LiUpEqRank
                | NewUp1EqRank
                | NewUp2EqRank
                | NewUp3EqRank
                | NewLow1EqRank
                | NewLow2EqRank
                | NewLow3EqRank
                | ChenComb2
                | ChenComb3
                | LiComb2
                | CombUpEqRankPhi
                | CombUpEqRankPsi
                | CorUp2_1
                | CorUp2_2
                | CombLowEqRankPhi
                | CombLowEqRankPsi
                | CorLow2_1
                | CorLow2_2
        )
    }

    /// Whether the record depends on a point of the parameter grid.
    pub fn is_parametric(&self) -> bool {
        use BoundId::*;
        matches!(
            self,
            CombUpWeighted
                | CombUpSum
                | CombUpEqRankPhi
                | CombUpEqRankPsi
                | CombLowWeighted
                | CombLowSum
                | CombLowEqRankPhi
                | CombLowEqRankPsi
        )
    }
}

impl fmt::Display for BoundId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for BoundId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum BoundKind {
    Upper,
    Lower,
}

/// The bounded quantity: the primal deviation alone, or
/// `w_primal * primal + w_dual * dual`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "target", rename_all = "UPPERCASE")]
pub enum Target {
    Primal,
    Combined { w_primal: f64, w_dual: f64 },
}

/// One evaluated bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundRecord {
    pub bound_id: BoundId,
    pub kind: BoundKind,
    pub target: Target,
    pub value: f64,
    pub applicable: bool,
    pub inapplicability_reason: Option<String>,
    /// Parameter point `(lambda, mu)` or `(xi, eta)` for parametric records.
    pub params: Option<[f64; 2]>,
}

impl BoundRecord {
    pub(crate) fn primal(bound_id: BoundId, kind: BoundKind, value: f64) -> Self {
        Self {
            bound_id,
            kind,
            target: Target::Primal,
            value,
            applicable: true,
            inapplicability_reason: None,
            params: None,
        }
    }

    pub(crate) fn combined(bound_id: BoundId, kind: BoundKind, w_dual: f64, value: f64) -> Self {
        Self {
            bound_id,
            kind,
            target: Target::Combined { w_primal: 1.0, w_dual },
            value,
            applicable: true,
            inapplicability_reason: None,
            params: None,
        }
    }

    pub(crate) fn with_params(mut self, p: f64, q: f64) -> Self {
        self.params = Some([p, q]);
        self
    }

    pub(crate) fn inapplicable(mut self, reason: &str) -> Self {
        if self.applicable {
            self.applicable = false;
            self.inapplicability_reason = Some(reason.to_string());
        }
        self
    }

    /// The exact value of the bounded quantity.
    pub fn exact_target(&self, dev: &DeviationPair) -> f64 {
        match self.target {
            Target::Primal => dev.primal,
            Target::Combined { w_primal, w_dual } => w_primal * dev.primal + w_dual * dev.dual,
        }
    }

    /// Distance from the exact target on the permitted side: non-negative
    /// when the bound holds.
    pub fn slack(&self, dev: &DeviationPair) -> f64 {
        let exact = self.exact_target(dev);
        match self.kind {
            BoundKind::Upper => self.value - exact,
            BoundKind::Lower => exact - self.value,
        }
    }

    /// Whether the bound holds within `rel_tol * max(1, exact)`.
    /// Inapplicable records are not checked and count as holding.
    pub fn holds(&self, dev: &DeviationPair, rel_tol: f64) -> bool {
        if !self.applicable {
            return true;
        }
        let exact = self.exact_target(dev);
        self.slack(dev) >= -rel_tol * exact.abs().max(1.0)
    }
}

/// Parameters of the combined families, each in `[0, 1]`.
/// `lambda`, `mu` drive the upper bounds and `xi`, `eta` the lower ones.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CombinedParams {
    lambda: f64,
    mu: f64,
    xi: f64,
    eta: f64,
}

pub(crate) fn check_unit(name: &'static str, value: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(Error::ParameterOutOfRange { name, value })
    }
}

impl CombinedParams {
    pub fn new(lambda: f64, mu: f64, xi: f64, eta: f64) -> Result<Self> {
        Ok(Self {
            lambda: check_unit("lambda", lambda)?,
            mu: check_unit("mu", mu)?,
            xi: check_unit("xi", xi)?,
            eta: check_unit("eta", eta)?,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }
}

/// What [`evaluate_all`] evaluates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundConfig {
    /// Parameter values crossed with themselves for `(lambda, mu)` and `(xi, eta)`.
    pub param_grid: Vec<f64>,
    /// Mark every equal-rank record inapplicable even when the ranks agree.
    pub force_general_rank: bool,
}

impl Default for BoundConfig {
    fn default() -> Self {
        Self {
            param_grid: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            force_general_rank: false,
        }
    }
}

const ZERO_A: &str = "A is zero";
const ZERO_B: &str = "B is zero";
const UNEQUAL_RANK: &str = "requires rank(A) = rank(B)";
const FORCED_GENERAL: &str = "general-rank formulas forced";

/// Applies the zero-matrix and equal-rank rules to freshly computed records.
pub(crate) fn finalize(pair: &PerturbationPair, records: Vec<BoundRecord>) -> Vec<BoundRecord> {
    records
        .into_iter()
        .map(|mut r| {
            if r.bound_id != BoundId::RankLow && r.bound_id != BoundId::RankUp {
                if pair.rank_a() == 0 {
                    r = r.inapplicable(ZERO_A);
                } else if pair.rank_b() == 0 {
                    r = r.inapplicable(ZERO_B);
                }
            }
            if r.bound_id.requires_equal_rank() && !pair.equal_rank() {
                r = r.inapplicable(UNEQUAL_RANK);
            }
            if r.applicable && !r.value.is_finite() {
                r = r.inapplicable("value is not finite");
            }
            r
        })
        .collect()
}

/// Every record in the catalog, parametric families over the grid.
pub fn evaluate_all(pair: &PerturbationPair, config: &BoundConfig) -> Result<Vec<BoundRecord>> {
    let mut out = classical_bounds(pair);
    let (low, up) = rank_bounds(pair);
    out.push(low);
    out.push(up);
    out.extend(new_upper_bounds(pair).1);
    out.extend(new_lower_bounds(pair).1);
    out.extend(classical_combined_bounds(pair));
    for &p in &config.param_grid {
        for &q in &config.param_grid {
            let params = CombinedParams::new(p, q, p, q)?;
            out.extend(combined::upper_family(pair, &params));
            out.extend(combined::lower_family(pair, &params));
        }
    }
    out.extend(combined::upper_corollaries(pair));
    out.extend(combined::lower_corollaries(pair));
    if config.force_general_rank {
        for r in out.iter_mut() {
            if r.bound_id.requires_equal_rank() {
                *r = r.clone().inapplicable(FORCED_GENERAL);
            }
        }
    }
    Ok(out)
}

/// First record with the given id.
pub fn find(records: &[BoundRecord], id: BoundId) -> Option<&BoundRecord> {
    records.iter().find(|r| r.bound_id == id)
}
