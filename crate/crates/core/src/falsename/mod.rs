//! False-name splitting: strategic players replace themselves by several
//! identities whose weights partition their own.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::Exact;
use crate::game::{Game, GameError, PlayerId, Weight, WeightedGame};
use crate::indices::{self, counts, IndexError, IndexKind};
use crate::multiset::{multisets_below, partitions_in_range};

pub mod conjecture;
pub mod pivot;

pub use conjecture::{conjecture_scan, ConjectureOptions, ConjectureReport, ConjectureSpec, ConjectureWitness};
pub use pivot::{big_pivot_probability, pivot_survey, PivotSurvey};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FalseNameError {
    #[error("cannot partition {0}: need a positive integer")]
    NonPositive(u64),
    #[error("invalid partition `{0}`")]
    BadPartition(String),
    #[error("profile has {found} partitions but the game has {expected} strategic players")]
    ProfileLength { found: usize, expected: usize },
    #[error("partition {index} sums to {found}, but that player's weight is {expected}")]
    ProfileTotal { index: usize, found: u64, expected: u64 },
    #[error("no strategic player {0}")]
    UnknownOwner(usize),
    #[error("payoffs are defined for shapley, banzhaf_norm and deegan_packel, not {0}")]
    UnsupportedKind(IndexKind),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Index(#[from] IndexError),
}

/// A multiset of positive integers, stored non-increasing.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct Partition(Vec<u64>);

impl Partition {
    pub fn new(mut parts: Vec<u64>) -> Result<Self, FalseNameError> {
        if parts.is_empty() || parts.contains(&0) {
            return Err(FalseNameError::BadPartition(format!("{parts:?}")));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Partition(parts))
    }

    pub fn single(n: u64) -> Self {
        Partition(vec![n])
    }

    pub fn parts(&self) -> &[u64] {
        &self.0
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl TryFrom<Vec<u64>> for Partition {
    type Error = FalseNameError;
    fn try_from(v: Vec<u64>) -> Result<Self, Self::Error> {
        Partition::new(v)
    }
}

impl From<Partition> for Vec<u64> {
    fn from(p: Partition) -> Self {
        p.0
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u64::to_string).collect();
        f.write_str(&parts.join("+"))
    }
}

impl FromStr for Partition {
    type Err = FalseNameError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts = s
            .split('+')
            .map(|p| p.trim().parse::<u64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| FalseNameError::BadPartition(s.to_string()))?;
        Partition::new(parts).map_err(|_| FalseNameError::BadPartition(s.to_string()))
    }
}

/// All partitions of `n`, in reverse-lexicographic order.
pub fn partitions(n: u64) -> Result<Vec<Partition>, FalseNameError> {
    if n == 0 {
        return Err(FalseNameError::NonPositive(n));
    }
    Ok(partitions_in_range(n, 1, n).into_iter().map(Partition).collect())
}

/// One partition per strategic player, in the game's player order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StrategyProfile(pub Vec<Partition>);

impl StrategyProfile {
    /// Every player keeps its weight.
    pub fn identity(weights: &[Weight]) -> Self {
        StrategyProfile(weights.iter().map(|&w| Partition::single(w)).collect())
    }

    /// Every player splits into unit identities.
    pub fn full_split(weights: &[Weight]) -> Self {
        StrategyProfile(weights.iter().map(|&w| Partition(vec![1; w as usize])).collect())
    }

    pub fn pieces(&self) -> usize {
        self.0.iter().map(Partition::len).sum()
    }

    /// The merged multiset of all pieces, non-increasing.
    pub fn refined(&self) -> Vec<u64> {
        let mut all: Vec<u64> = self.0.iter().flat_map(|p| p.parts().iter().copied()).collect();
        all.sort_unstable_by(|a, b| b.cmp(a));
        all
    }
}

impl fmt::Display for StrategyProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(Partition::to_string).collect();
        f.write_str(&parts.join("|"))
    }
}

impl FromStr for StrategyProfile {
    type Err = FalseNameError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.trim().is_empty() {
            return Ok(StrategyProfile(Vec::new()));
        }
        s.split('|').map(str::parse).collect::<Result<_, _>>().map(StrategyProfile)
    }
}

/// A game whose strategic players may have any positive weight, alongside
/// `m` non-strategic unit players. Strategic players of weight 1 are
/// indistinguishable from small players in the induced game.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FalseNameGame {
    strategic: Vec<Weight>,
    small_count: u64,
    threshold: u64,
}

impl FalseNameGame {
    pub fn new(mut strategic: Vec<Weight>, small_count: u64, threshold: u64) -> Result<Self, FalseNameError> {
        if strategic.contains(&0) {
            return Err(FalseNameError::BadPartition("strategic weights must be positive".into()));
        }
        strategic.sort_unstable_by(|a, b| b.cmp(a));
        let total = strategic.iter().sum::<u64>() + small_count;
        if threshold == 0 {
            return Err(GameError::ThresholdZero.into());
        }
        if threshold > total {
            return Err(GameError::ThresholdTooLarge { threshold, total }.into());
        }
        Ok(FalseNameGame {
            strategic,
            small_count,
            threshold,
        })
    }

    pub fn strategic(&self) -> &[Weight] {
        &self.strategic
    }

    pub fn small_count(&self) -> u64 {
        self.small_count
    }

    pub fn threshold(&self) -> u64 {
        self.threshold
    }

    pub fn strategic_weight(&self) -> u64 {
        self.strategic.iter().sum()
    }

    /// Strategic weight over total weight.
    pub fn proportional(&self) -> Exact {
        Exact::new(self.strategic_weight(), self.strategic_weight() + self.small_count)
    }

    /// The weighted voting game actually played: unit strategic players
    /// join the small pool.
    pub fn induced(&self) -> Game {
        let big: Vec<Weight> = self.strategic.iter().copied().filter(|&w| w >= 2).collect();
        let ones = self.strategic.len() as u64 - big.len() as u64;
        Game::new(big, self.small_count + ones, self.threshold).expect("induced game is valid")
    }

    pub fn apply(&self, prof: &StrategyProfile) -> Result<SplitGame, FalseNameError> {
        split(&self.strategic, self.small_count, self.threshold, prof)
    }

    /// Combined Shapley-Shubik value of the strategic players.
    pub fn strategic_shapley(&self) -> Exact {
        strategic_shapley(&self.induced(), self.small_count)
    }
}

impl From<&Game> for FalseNameGame {
    fn from(g: &Game) -> Self {
        FalseNameGame {
            strategic: g.big().to_vec(),
            small_count: g.small_count(),
            threshold: g.threshold(),
        }
    }
}

impl fmt::Display for FalseNameGame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a: Vec<String> = self.strategic.iter().map(u64::to_string).collect();
        write!(f, "A={};m={};T={}", a.join(","), self.small_count, self.threshold)
    }
}

/// `1 − m·φ₁(g)`: everything not held by the `m` non-strategic unit players.
fn strategic_shapley(induced: &Game, non_strategic: u64) -> Exact {
    if non_strategic == 0 {
        return Exact::one();
    }
    Exact::one() - Exact::from(non_strategic) * counts::shapley_by_weight(induced, 1)
}

/// One identity created by a split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Piece {
    pub owner: usize,
    pub weight: Weight,
}

/// The game after every strategic player has split.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitGame {
    pub derived: Game,
    /// Every piece exactly once, grouped by owner.
    pub pieces: Vec<Piece>,
    /// Non-strategic small players of the original game.
    pub original_small: u64,
}

impl SplitGame {
    pub fn owners(&self) -> usize {
        self.pieces.iter().map(|p| p.owner + 1).max().unwrap_or(0)
    }

    pub fn pieces_of(&self, owner: usize) -> impl Iterator<Item = &Piece> {
        self.pieces.iter().filter(move |p| p.owner == owner)
    }
}

fn split(weights: &[Weight], m: u64, threshold: u64, prof: &StrategyProfile) -> Result<SplitGame, FalseNameError> {
    if prof.0.len() != weights.len() {
        return Err(FalseNameError::ProfileLength {
            found: prof.0.len(),
            expected: weights.len(),
        });
    }
    let mut pieces = Vec::new();
    for (i, (part, &w)) in prof.0.iter().zip(weights).enumerate() {
        if part.total() != w {
            return Err(FalseNameError::ProfileTotal {
                index: i,
                found: part.total(),
                expected: w,
            });
        }
        pieces.extend(part.parts().iter().map(|&weight| Piece { owner: i, weight }));
    }
    let big: Vec<Weight> = pieces.iter().map(|p| p.weight).filter(|&w| w >= 2).collect();
    let ones = pieces.iter().filter(|p| p.weight == 1).count() as u64;
    let derived = Game::new(big, m + ones, threshold)?;
    Ok(SplitGame {
        derived,
        pieces,
        original_small: m,
    })
}

/// Splits the big players of `g` according to `prof`.
pub fn apply_profile(g: &Game, prof: &StrategyProfile) -> Result<SplitGame, FalseNameError> {
    split(g.big(), g.small_count(), g.threshold(), prof)
}

/// Per-weight values of the derived game under `kind`.
fn piece_values(sg: &SplitGame, kind: IndexKind) -> Result<Vec<(Weight, Exact)>, FalseNameError> {
    let g = &sg.derived;
    let mut weights: Vec<Weight> = sg.pieces.iter().map(|p| p.weight).collect();
    weights.sort_unstable();
    weights.dedup();
    match kind {
        IndexKind::Shapley => Ok(weights.iter().map(|&w| (w, counts::shapley_by_weight(g, w))).collect()),
        IndexKind::BanzhafNorm => {
            let classes = indices::banzhaf_norm_by_class(g)?;
            Ok(weights
                .iter()
                .map(|&w| (w, classes.iter().find(|c| c.0 == w).expect("piece weight present").2.clone()))
                .collect())
        }
        IndexKind::DeeganPackel => weights
            .iter()
            .map(|&w| {
                let id = if w == 1 {
                    PlayerId::SMALL
                } else {
                    PlayerId::Big(g.big().iter().position(|&b| b == w).expect("piece weight present"))
                };
                Ok((w, indices::deegan_packel(g, id)?))
            })
            .collect(),
        IndexKind::BanzhafAbs => Err(FalseNameError::UnsupportedKind(kind)),
    }
}

fn sum_payoff(sg: &SplitGame, owner: usize, values: &[(Weight, Exact)]) -> Exact {
    sg.pieces_of(owner)
        .map(|p| values.iter().find(|v| v.0 == p.weight).expect("value for every piece").1.clone())
        .sum()
}

/// Σ over the owner's pieces of their index in the derived game.
pub fn payoff(sg: &SplitGame, owner: usize, kind: IndexKind) -> Result<Exact, FalseNameError> {
    if owner >= sg.owners() {
        return Err(FalseNameError::UnknownOwner(owner));
    }
    let values = piece_values(sg, kind)?;
    Ok(sum_payoff(sg, owner, &values))
}

/// Every owner's payoff, in owner order.
pub fn payoffs(sg: &SplitGame, kind: IndexKind) -> Result<Vec<Exact>, FalseNameError> {
    let values = piece_values(sg, kind)?;
    Ok((0..sg.owners()).map(|o| sum_payoff(sg, o, &values)).collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OwnerBound {
    pub owner: usize,
    pub payoff: Exact,
    /// `a_i / (m + r + c_i − 1)`
    pub bound: Exact,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileBoundRecord {
    pub game: Game,
    pub profile: StrategyProfile,
    pub kind: IndexKind,
    /// Combined power of the big players before splitting.
    pub before: Exact,
    /// Σ of every owner's payoff after splitting.
    pub after: Exact,
    pub proportional: Exact,
    /// `R̄ · P` when the index has a proven ratio bound.
    pub aggregate_bound: Option<Exact>,
    pub aggregate_holds: Option<bool>,
    /// `after_bound − after`, when a bound exists.
    pub aggregate_margin: Option<Exact>,
    /// Per-owner split bounds (Shapley-Shubik only).
    pub owners: Vec<OwnerBound>,
    /// `before / after`, or `None` when nothing is left after splitting.
    pub ratio: Option<Exact>,
}

/// Evaluates the aggregate payoff bound and, for Shapley-Shubik, the
/// per-owner bound `u_i ≤ a_i / (m + r + c_i − 1)`.
pub fn profile_bound_check(g: &Game, prof: &StrategyProfile, kind: IndexKind) -> Result<ProfileBoundRecord, FalseNameError> {
    let sg = apply_profile(g, prof)?;
    let pays = payoffs(&sg, kind)?;
    let after: Exact = pays.iter().sum();
    let identity = apply_profile(g, &StrategyProfile::identity(g.big()))?;
    let before: Exact = payoffs(&identity, kind)?.iter().sum();
    let proportional = g.proportional();
    let factor = match kind {
        IndexKind::Shapley => Some(2),
        IndexKind::DeeganPackel => Some(3),
        _ => None,
    };
    let aggregate_bound = factor.map(|f| Exact::from(f) * &proportional);
    let aggregate_holds = aggregate_bound.as_ref().map(|b| &after <= b);
    let aggregate_margin = aggregate_bound.as_ref().map(|b| b - &after);
    let mut owners = Vec::new();
    if kind == IndexKind::Shapley {
        let base = g.small_count() + g.big_count() as u64;
        for (i, pay) in pays.iter().enumerate() {
            let c_i = prof.0[i].len() as u64;
            let bound = Exact::new(g.big()[i], base + c_i - 1);
            owners.push(OwnerBound {
                owner: i,
                payoff: pay.clone(),
                holds: pay <= &bound,
                bound,
            });
        }
    }
    let ratio = before.checked_div(&after);
    Ok(ProfileBoundRecord {
        game: g.clone(),
        profile: prof.clone(),
        kind,
        before,
        after,
        proportional,
        aggregate_bound,
        aggregate_holds,
        aggregate_margin,
        owners,
        ratio,
    })
}

/// Every profile of the strategic players, as a Cartesian product of
/// per-player partitions in reverse-lexicographic order.
pub fn all_profiles(weights: &[Weight]) -> Vec<StrategyProfile> {
    let per_player: Vec<Vec<Partition>> = weights
        .iter()
        .map(|&w| partitions(w).expect("positive weight"))
        .collect();
    let mut out = vec![Vec::new()];
    for options in &per_player {
        let mut next = Vec::with_capacity(out.len() * options.len());
        for prefix in &out {
            for p in options {
                let mut v: Vec<Partition> = prefix.clone();
                v.push(p.clone());
                next.push(v);
            }
        }
        out = next;
    }
    out.into_iter().map(StrategyProfile).collect()
}

/// Big multisets (parts ≥ 2) with sum below `bound`, for property sweeps.
pub fn big_multisets_below(bound: u64) -> Vec<Vec<u64>> {
    multisets_below(bound, 2, u64::MAX)
}
