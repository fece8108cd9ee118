//! Weighted voting games with big and small players.
//!
//! A [`Game`] has `r` big players (weight ≥ 2) and `m` interchangeable
//! small players of weight 1. A [`GeneralizedGame`] has a minimum small
//! size `s`: small players weigh in `[s, 2s)` and big players at least `2s`.
//! Both keep their weight lists sorted non-increasing, so equal games compare
//! equal and `PlayerId::Big(i)` always refers to the `i`-th largest weight.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::Exact;

pub type Weight = u64;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum GameError {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("big weight {weight} is below the minimum big weight {min}")]
    BigTooSmall { weight: Weight, min: Weight },
    #[error("small weight {weight} is outside [{low}, {high})")]
    SmallOutOfRange { weight: Weight, low: Weight, high: Weight },
    #[error("threshold {threshold} exceeds total weight {total}")]
    ThresholdTooLarge { threshold: u64, total: u64 },
    #[error("threshold must be at least 1")]
    ThresholdZero,
    #[error("minimum small size must be at least 1")]
    MinSmallZero,
    #[error("game has no players")]
    NoPlayers,
    #[error("player {player} does not exist in {game}")]
    UnknownPlayer { player: PlayerId, game: String },
}

/// Identifies a player. In a [`Game`] every small player is equivalent, so
/// the `Small` index only needs to be in range; in a [`GeneralizedGame`] it
/// indexes the sorted small-weight list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PlayerId {
    Big(usize),
    Small(usize),
}

impl PlayerId {
    pub const SMALL: PlayerId = PlayerId::Small(0);
}

impl fmt::Display for PlayerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlayerId::Big(i) => write!(f, "big:{i}"),
            PlayerId::Small(0) => write!(f, "small"),
            PlayerId::Small(i) => write!(f, "small:{i}"),
        }
    }
}

impl FromStr for PlayerId {
    type Err = GameError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || GameError::Syntax(format!("invalid player `{s}` (expected big:<i>, small or small:<i>)"));
        let s = s.trim();
        let (kind, idx) = match s.split_once(':') {
            Some((k, i)) => (k, Some(i.trim().parse::<usize>().map_err(|_| bad())?)),
            None => (s, None),
        };
        match (kind, idx) {
            ("big", Some(i)) => Ok(PlayerId::Big(i)),
            ("small", i) => Ok(PlayerId::Small(i.unwrap_or(0))),
            _ => Err(bad()),
        }
    }
}

impl Serialize for PlayerId {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PlayerId {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Players of equal weight, as `(weight, multiplicity)` pairs with distinct
/// weights in non-increasing order.
pub type WeightClasses = Vec<(Weight, u64)>;

fn classes_of(sorted: &[Weight]) -> WeightClasses {
    let mut out: WeightClasses = Vec::new();
    for &w in sorted {
        match out.last_mut() {
            Some((lw, c)) if *lw == w => *c += 1,
            _ => out.push((w, 1)),
        }
    }
    out
}

/// Behaviour shared by both game models.
pub trait WeightedGame {
    fn threshold(&self) -> u64;
    /// Big weights, non-increasing.
    fn big(&self) -> &[Weight];
    fn small_total(&self) -> u64;
    fn small_players(&self) -> u64;
    /// All players grouped by weight (bigs and smalls together).
    fn weight_classes(&self) -> WeightClasses;
    /// Every player's weight, bigs first, one entry per player.
    fn slot_weights(&self) -> Vec<Weight>;
    fn player_weight(&self, p: PlayerId) -> Result<Weight, GameError>;

    fn big_sum(&self) -> u64 {
        self.big().iter().sum()
    }

    fn total_weight(&self) -> u64 {
        self.big_sum() + self.small_total()
    }

    fn player_count(&self) -> u64 {
        self.big().len() as u64 + self.small_players()
    }

    /// `v(S)` for a coalition of the given weight.
    fn coalition_value(&self, weight_sum: u64) -> u8 {
        u8::from(weight_sum >= self.threshold())
    }

    /// Aggregate big weight over total weight.
    fn proportional(&self) -> Exact {
        Exact::new(self.big_sum(), self.total_weight())
    }

    /// Representative id for every distinct player position: each big player
    /// and each small player (a single id for a [`Game`]).
    fn players(&self) -> Vec<PlayerId>;
}

/// A weighted voting game `(A, m, T)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "GameRepr", into = "GameRepr")]
pub struct Game {
    big: Vec<Weight>,
    small_count: u64,
    threshold: u64,
}

#[derive(Serialize, Deserialize)]
struct GameRepr {
    big: Vec<Weight>,
    small: u64,
    threshold: u64,
}

impl TryFrom<GameRepr> for Game {
    type Error = GameError;
    fn try_from(r: GameRepr) -> Result<Self, Self::Error> {
        Game::new(r.big, r.small, r.threshold)
    }
}

impl From<Game> for GameRepr {
    fn from(g: Game) -> Self {
        GameRepr {
            big: g.big,
            small: g.small_count,
            threshold: g.threshold,
        }
    }
}

fn check_threshold(threshold: u64, total: u64) -> Result<(), GameError> {
    if threshold == 0 {
        return Err(GameError::ThresholdZero);
    }
    if threshold > total {
        return Err(GameError::ThresholdTooLarge { threshold, total });
    }
    Ok(())
}

impl Game {
    pub fn new(mut big: Vec<Weight>, small_count: u64, threshold: u64) -> Result<Self, GameError> {
        if let Some(&w) = big.iter().find(|&&w| w < 2) {
            return Err(GameError::BigTooSmall { weight: w, min: 2 });
        }
        if big.is_empty() && small_count == 0 {
            return Err(GameError::NoPlayers);
        }
        let total = big.iter().sum::<u64>() + small_count;
        check_threshold(threshold, total)?;
        big.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Game {
            big,
            small_count,
            threshold,
        })
    }

    pub(crate) fn from_sorted_unchecked(big: Vec<Weight>, small_count: u64, threshold: u64) -> Self {
        debug_assert!(big.windows(2).all(|w| w[0] >= w[1]));
        Game {
            big,
            small_count,
            threshold,
        }
    }

    pub fn small_count(&self) -> u64 {
        self.small_count
    }

    pub fn big_count(&self) -> usize {
        self.big.len()
    }

    /// Same players, different threshold.
    pub fn with_threshold(&self, threshold: u64) -> Result<Game, GameError> {
        check_threshold(threshold, self.total_weight())?;
        Ok(Game {
            threshold,
            ..self.clone()
        })
    }

    /// Big weights capped at `T`, sorted non-increasing. Every power index is
    /// unchanged; this is the key for all game-keyed caches.
    pub fn canonicalize(&self) -> Game {
        let t = self.threshold;
        let big = self.big.iter().map(|&w| w.min(t)).collect();
        Game {
            big,
            small_count: self.small_count,
            threshold: t,
        }
    }

    pub fn is_canonical(&self) -> bool {
        self.big.first().is_none_or(|&w| w <= self.threshold)
    }

    /// The equivalent generalized game with `s = 1`.
    pub fn to_generalized(&self) -> GeneralizedGame {
        GeneralizedGame {
            big: self.big.clone(),
            small: vec![1; self.small_count as usize],
            min_small: 1,
            threshold: self.threshold,
        }
    }
}

impl WeightedGame for Game {
    fn threshold(&self) -> u64 {
        self.threshold
    }

    fn big(&self) -> &[Weight] {
        &self.big
    }

    fn small_total(&self) -> u64 {
        self.small_count
    }

    fn small_players(&self) -> u64 {
        self.small_count
    }

    fn weight_classes(&self) -> WeightClasses {
        let mut c = classes_of(&self.big);
        if self.small_count > 0 {
            c.push((1, self.small_count));
        }
        c
    }

    fn slot_weights(&self) -> Vec<Weight> {
        let mut v = self.big.clone();
        v.extend(std::iter::repeat_n(1, self.small_count as usize));
        v
    }

    fn player_weight(&self, p: PlayerId) -> Result<Weight, GameError> {
        match p {
            PlayerId::Big(i) if i < self.big.len() => Ok(self.big[i]),
            PlayerId::Small(i) if (i as u64) < self.small_count => Ok(1),
            _ => Err(GameError::UnknownPlayer {
                player: p,
                game: self.to_string(),
            }),
        }
    }

    fn players(&self) -> Vec<PlayerId> {
        let mut v: Vec<PlayerId> = (0..self.big.len()).map(PlayerId::Big).collect();
        if self.small_count > 0 {
            v.push(PlayerId::SMALL);
        }
        v
    }
}

fn join(ws: &[Weight]) -> String {
    ws.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(",")
}

impl fmt::Display for Game {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "A={};m={};T={}", join(&self.big), self.small_count, self.threshold)
    }
}

/// A game whose small players are those that cannot split: weights in
/// `[s, 2s)`. Big players weigh at least `2s`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "GeneralizedRepr", into = "GeneralizedRepr")]
pub struct GeneralizedGame {
    big: Vec<Weight>,
    small: Vec<Weight>,
    min_small: u64,
    threshold: u64,
}

#[derive(Serialize, Deserialize)]
struct GeneralizedRepr {
    big: Vec<Weight>,
    small_weights: Vec<Weight>,
    threshold: u64,
    min_small: u64,
}

impl TryFrom<GeneralizedRepr> for GeneralizedGame {
    type Error = GameError;
    fn try_from(r: GeneralizedRepr) -> Result<Self, Self::Error> {
        GeneralizedGame::new(r.big, r.small_weights, r.min_small, r.threshold)
    }
}

impl From<GeneralizedGame> for GeneralizedRepr {
    fn from(g: GeneralizedGame) -> Self {
        GeneralizedRepr {
            big: g.big,
            small_weights: g.small,
            threshold: g.threshold,
            min_small: g.min_small,
        }
    }
}

impl GeneralizedGame {
    pub fn new(
        mut big: Vec<Weight>,
        mut small: Vec<Weight>,
        min_small: u64,
        threshold: u64,
    ) -> Result<Self, GameError> {
        if min_small == 0 {
            return Err(GameError::MinSmallZero);
        }
        let s = min_small;
        if let Some(&w) = big.iter().find(|&&w| w < 2 * s) {
            return Err(GameError::BigTooSmall { weight: w, min: 2 * s });
        }
        if let Some(&w) = small.iter().find(|&&w| w < s || w >= 2 * s) {
            return Err(GameError::SmallOutOfRange {
                weight: w,
                low: s,
                high: 2 * s,
            });
        }
        if big.is_empty() && small.is_empty() {
            return Err(GameError::NoPlayers);
        }
        let total = big.iter().sum::<u64>() + small.iter().sum::<u64>();
        check_threshold(threshold, total)?;
        big.sort_unstable_by(|a, b| b.cmp(a));
        small.sort_unstable_by(|a, b| b.cmp(a));
        Ok(GeneralizedGame {
            big,
            small,
            min_small,
            threshold,
        })
    }

    pub fn small(&self) -> &[Weight] {
        &self.small
    }

    pub fn min_small(&self) -> u64 {
        self.min_small
    }

    pub fn with_threshold(&self, threshold: u64) -> Result<GeneralizedGame, GameError> {
        check_threshold(threshold, self.total_weight())?;
        Ok(GeneralizedGame {
            threshold,
            ..self.clone()
        })
    }
}

impl WeightedGame for GeneralizedGame {
    fn threshold(&self) -> u64 {
        self.threshold
    }

    fn big(&self) -> &[Weight] {
        &self.big
    }

    fn small_total(&self) -> u64 {
        self.small.iter().sum()
    }

    fn small_players(&self) -> u64 {
        self.small.len() as u64
    }

    fn weight_classes(&self) -> WeightClasses {
        let mut all = self.big.clone();
        all.extend_from_slice(&self.small);
        all.sort_unstable_by(|a, b| b.cmp(a));
        classes_of(&all)
    }

    fn slot_weights(&self) -> Vec<Weight> {
        let mut v = self.big.clone();
        v.extend_from_slice(&self.small);
        v
    }

    fn player_weight(&self, p: PlayerId) -> Result<Weight, GameError> {
        match p {
            PlayerId::Big(i) if i < self.big.len() => Ok(self.big[i]),
            PlayerId::Small(i) if i < self.small.len() => Ok(self.small[i]),
            _ => Err(GameError::UnknownPlayer {
                player: p,
                game: self.to_string(),
            }),
        }
    }

    fn players(&self) -> Vec<PlayerId> {
        (0..self.big.len())
            .map(PlayerId::Big)
            .chain((0..self.small.len()).map(PlayerId::Small))
            .collect()
    }
}

impl fmt::Display for GeneralizedGame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "A={};M={};T={};s={}",
            join(&self.big),
            join(&self.small),
            self.threshold,
            self.min_small
        )
    }
}

/// Either game model, as produced by [`parse_game`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AnyGame {
    Base(Game),
    Generalized(GeneralizedGame),
}

impl fmt::Display for AnyGame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnyGame::Base(g) => g.fmt(f),
            AnyGame::Generalized(g) => g.fmt(f),
        }
    }
}

impl FromStr for AnyGame {
    type Err = GameError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_game(s)
    }
}

impl From<Game> for AnyGame {
    fn from(g: Game) -> Self {
        AnyGame::Base(g)
    }
}

impl From<GeneralizedGame> for AnyGame {
    fn from(g: GeneralizedGame) -> Self {
        AnyGame::Generalized(g)
    }
}

macro_rules! delegate {
    ($self:ident, $g:ident => $e:expr) => {
        match $self {
            AnyGame::Base($g) => $e,
            AnyGame::Generalized($g) => $e,
        }
    };
}

impl WeightedGame for AnyGame {
    fn threshold(&self) -> u64 {
        delegate!(self, g => g.threshold())
    }
    fn big(&self) -> &[Weight] {
        delegate!(self, g => g.big())
    }
    fn small_total(&self) -> u64 {
        delegate!(self, g => g.small_total())
    }
    fn small_players(&self) -> u64 {
        delegate!(self, g => g.small_players())
    }
    fn weight_classes(&self) -> WeightClasses {
        delegate!(self, g => g.weight_classes())
    }
    fn slot_weights(&self) -> Vec<Weight> {
        delegate!(self, g => g.slot_weights())
    }
    fn player_weight(&self, p: PlayerId) -> Result<Weight, GameError> {
        delegate!(self, g => g.player_weight(p))
    }
    fn players(&self) -> Vec<PlayerId> {
        delegate!(self, g => g.players())
    }
}

pub(crate) fn parse_weights(s: &str) -> Result<Vec<Weight>, GameError> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|w| {
            w.trim()
                .parse::<Weight>()
                .map_err(|_| GameError::Syntax(format!("invalid weight `{}`", w.trim())))
        })
        .collect()
}

fn parse_int(key: &str, s: &str) -> Result<u64, GameError> {
    s.trim()
        .parse()
        .map_err(|_| GameError::Syntax(format!("invalid integer for `{key}`: `{}`", s.trim())))
}

/// Parses `A=<w>,...;m=<int>;T=<int>` or
/// `A=<w>,...;M=<w>,...;T=<int>;s=<int>`. Keys may appear in any order.
pub fn parse_game(text: &str) -> Result<AnyGame, GameError> {
    let mut a = None;
    let mut m = None;
    let mut big_m = None;
    let mut t = None;
    let mut s = None;
    for field in text.trim().split(';').map(str::trim).filter(|f| !f.is_empty()) {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| GameError::Syntax(format!("expected key=value, got `{field}`")))?;
        let slot = match key.trim() {
            "A" => &mut a,
            "m" => &mut m,
            "M" => &mut big_m,
            "T" => &mut t,
            "s" => &mut s,
            other => return Err(GameError::Syntax(format!("unknown key `{other}`"))),
        };
        if slot.replace(value.to_string()).is_some() {
            return Err(GameError::Syntax(format!("duplicate key `{}`", key.trim())));
        }
    }
    let a = parse_weights(&a.ok_or_else(|| GameError::Syntax("missing `A=`".into()))?)?;
    let t = parse_int("T", &t.ok_or_else(|| GameError::Syntax("missing `T=`".into()))?)?;
    match (m, big_m, s) {
        (Some(m), None, None) => Ok(AnyGame::Base(Game::new(a, parse_int("m", &m)?, t)?)),
        (None, Some(big_m), Some(s)) => Ok(AnyGame::Generalized(GeneralizedGame::new(
            a,
            parse_weights(&big_m)?,
            parse_int("s", &s)?,
            t,
        )?)),
        (None, Some(_), None) => Err(GameError::Syntax("generalized game needs `s=`".into())),
        (Some(_), Some(_), _) => Err(GameError::Syntax("give either `m=` or `M=`, not both".into())),
        _ => Err(GameError::Syntax("missing `m=` (or `M=` with `s=`)".into())),
    }
}

/// Parses a game that must be of the base `(A, m, T)` form.
pub fn parse_base_game(text: &str) -> Result<Game, GameError> {
    match parse_game(text)? {
        AnyGame::Base(g) => Ok(g),
        AnyGame::Generalized(_) => Err(GameError::Syntax("expected a game with `m=`, not `M=`".into())),
    }
}
