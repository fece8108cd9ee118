//! Power-to-proportion ratios, bound checks and parameter scans.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::checkpoint::CheckpointError;
use crate::exact::Exact;
use crate::game::{AnyGame, Game, PlayerId, WeightedGame};
use crate::indices::{
    self, deegan_packel, deegan_packel_aggregate_big, shapley_aggregate_big, shapley_player, IndexError, IndexKind,
};

pub mod family;
pub mod scan;

pub use family::{banzhaf_family, family_game};
pub use scan::{scan, Extremum, ScanOptions, ScanReport, ScanSpec, ScanState};

#[derive(Debug, Error)]
pub enum RatioError {
    #[error("game {0} has no big player, so its proportional weight is zero")]
    NoBigPlayers(String),
    #[error("k = {0} is not the square of an even positive integer")]
    InvalidFamilyK(u64),
    #[error("invalid scan: {0}")]
    InvalidScan(String),
    #[error(transparent)]
    Index(#[from] IndexError),
    #[error(transparent)]
    Checkpoint(#[from] CheckpointError),
    #[error("per-instance output: {0}")]
    Csv(#[from] csv::Error),
    #[error("per-instance output: {0}")]
    Io(#[from] std::io::Error),
}

/// Aggregate big-player power under one index against the big players'
/// share of the total weight.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatioRecord {
    pub game: AnyGame,
    pub index_kind: IndexKind,
    pub aggregate_big_power: Exact,
    pub proportional: Exact,
    pub ratio: Exact,
}

impl RatioRecord {
    pub fn new(game: AnyGame, index_kind: IndexKind, aggregate_big_power: Exact) -> Result<Self, RatioError> {
        let proportional = game.proportional();
        let ratio = aggregate_big_power
            .checked_div(&proportional)
            .ok_or_else(|| RatioError::NoBigPlayers(game.to_string()))?;
        Ok(RatioRecord {
            game,
            index_kind,
            aggregate_big_power,
            proportional,
            ratio,
        })
    }
}

pub fn ratio_aggregate(g: &AnyGame, kind: IndexKind) -> Result<RatioRecord, RatioError> {
    if g.big().is_empty() {
        return Err(RatioError::NoBigPlayers(g.to_string()));
    }
    let power = indices::aggregate_big(g, kind)?;
    RatioRecord::new(g.clone(), kind, power)
}

/// One inequality evaluated exactly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub name: String,
    pub value: Exact,
    pub bound: Exact,
    pub holds: bool,
}

impl BoundCheck {
    fn at_most(name: String, value: Exact, bound: Exact) -> Self {
        let holds = value <= bound;
        BoundCheck {
            name,
            value,
            bound,
            holds,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundReport {
    pub game: Game,
    /// Proven bounds; any failure here is a bug or a counterexample.
    pub checks: Vec<BoundCheck>,
    /// Comparisons with no claimed bound, reported for information only.
    pub observations: Vec<BoundCheck>,
}

impl BoundReport {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn failures(&self) -> impl Iterator<Item = &BoundCheck> {
        self.checks.iter().filter(|c| !c.holds)
    }
}

/// Evaluates the aggregate Shapley-Shubik (≤ 2) and Deegan-Packel (≤ 3)
/// ratio bounds and the individual Shapley-Shubik bound `φ_i ≤ a_i/(m+r)`.
/// Individual Deegan-Packel values are compared with the same quantity as
/// observations. One entry per distinct big weight.
pub fn check_bounds(g: &Game) -> BoundReport {
    let mut checks = Vec::new();
    let mut observations = Vec::new();
    if g.big_count() > 0 {
        let p = g.proportional();
        checks.push(BoundCheck::at_most(
            "shapley_ratio <= 2".into(),
            shapley_aggregate_big(g) / &p,
            Exact::from(2),
        ));
        checks.push(BoundCheck::at_most(
            "deegan_packel_ratio <= 3".into(),
            deegan_packel_aggregate_big(g) / &p,
            Exact::from(3),
        ));
        let players = g.small_count() + g.big_count() as u64;
        let mut i = 0;
        while i < g.big_count() {
            let a = g.big()[i];
            let bound = Exact::new(a, players);
            let id = PlayerId::Big(i);
            let phi = shapley_player(g, id).expect("big player exists");
            checks.push(BoundCheck::at_most(format!("shapley({id}) <= a/(m+r)"), phi, bound.clone()));
            let rho = deegan_packel(g, id).expect("big player exists");
            observations.push(BoundCheck::at_most(format!("deegan_packel({id}) <= a/(m+r)"), rho, bound));
            i += g.big()[i..].iter().take_while(|&&w| w == a).count();
        }
    }
    BoundReport {
        game: g.clone(),
        checks,
        observations,
    }
}
