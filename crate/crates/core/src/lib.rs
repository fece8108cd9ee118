//! Exact power indices for weighted voting games with many unit-weight
//! players, and the experiments built on them.

pub mod checkpoint;
pub mod exact;
pub mod falsename;
pub mod game;
pub mod indices;
pub mod multiset;
pub mod oracle;
pub mod parallel;
pub mod ratios;

pub use exact::Exact;
pub use game::{parse_base_game, parse_game, AnyGame, Game, GameError, GeneralizedGame, PlayerId, Weight, WeightedGame};
pub use indices::{IndexError, IndexKind};
