//! Fast exact engines for the Shapley-Shubik, Banzhaf and Deegan-Packel
//! indices.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::Exact;
use crate::game::{AnyGame, GameError, PlayerId, WeightedGame};

pub mod counts;
pub mod deegan_packel;
pub mod recursion;

pub use counts::{
    banzhaf_abs, banzhaf_norm, banzhaf_norm_by_class, shapley_aggregate_big, shapley_by_class, shapley_player,
    CoalitionCountTable,
};
pub use deegan_packel::{ap_count, ap_tuples, deegan_packel, deegan_packel_aggregate_big, ApTuple};
pub use recursion::{dual_threshold, shapley_small, shapley_small_dual, MemoTable, ShapleyRecursion};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IndexError {
    #[error("game {0} has no small player")]
    NoSmallPlayer(String),
    #[error("game {0} has no big player")]
    NoBigPlayer(String),
    #[error("{0} is only implemented for games with unit small players")]
    Unsupported(&'static str),
    #[error("internal error: {0}")]
    Internal(String),
    #[error(transparent)]
    Game(#[from] GameError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexKind {
    Shapley,
    BanzhafAbs,
    BanzhafNorm,
    DeeganPackel,
}

impl IndexKind {
    pub const ALL: [IndexKind; 4] = [
        IndexKind::Shapley,
        IndexKind::BanzhafAbs,
        IndexKind::BanzhafNorm,
        IndexKind::DeeganPackel,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            IndexKind::Shapley => "shapley",
            IndexKind::BanzhafAbs => "banzhaf_abs",
            IndexKind::BanzhafNorm => "banzhaf_norm",
            IndexKind::DeeganPackel => "deegan_packel",
        }
    }
}

impl fmt::Display for IndexKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown index kind `{0}` (expected shapley, banzhaf-abs, banzhaf-norm or deegan-packel)")]
pub struct ParseIndexKindError(String);

impl FromStr for IndexKind {
    type Err = ParseIndexKindError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().to_ascii_lowercase().replace('-', "_");
        IndexKind::ALL
            .into_iter()
            .find(|k| k.as_str() == norm)
            .ok_or_else(|| ParseIndexKindError(s.to_string()))
    }
}

/// Value of one player under the chosen index.
pub fn index_value(g: &AnyGame, p: PlayerId, kind: IndexKind) -> Result<Exact, IndexError> {
    match kind {
        IndexKind::Shapley => shapley_player(g, p),
        IndexKind::BanzhafAbs => banzhaf_abs(g, p),
        IndexKind::BanzhafNorm => banzhaf_norm(g, p),
        IndexKind::DeeganPackel => match g {
            AnyGame::Base(g) => deegan_packel(g, p),
            AnyGame::Generalized(_) => Err(IndexError::Unsupported("deegan_packel")),
        },
    }
}

/// Combined value of all big players under the chosen index.
pub fn aggregate_big(g: &AnyGame, kind: IndexKind) -> Result<Exact, IndexError> {
    if g.big().is_empty() {
        return Ok(Exact::zero());
    }
    match (kind, g) {
        (IndexKind::Shapley, AnyGame::Base(b)) => Ok(shapley_aggregate_big(b)),
        (IndexKind::DeeganPackel, AnyGame::Base(b)) => Ok(deegan_packel_aggregate_big(b)),
        (IndexKind::DeeganPackel, AnyGame::Generalized(_)) => Err(IndexError::Unsupported("deegan_packel")),
        (IndexKind::BanzhafNorm, _) => {
            let classes = banzhaf_norm_by_class(g)?;
            Ok(big_classes_sum(g, &classes))
        }
        _ => {
            let values: Vec<_> = g
                .weight_classes()
                .into_iter()
                .map(|(w, c)| {
                    let v = match kind {
                        IndexKind::Shapley => counts::shapley_by_weight(g, w),
                        _ => counts::banzhaf_abs_by_weight(g, w),
                    };
                    (w, c, v)
                })
                .collect();
            Ok(big_classes_sum(g, &values))
        }
    }
}

/// Combined value of all big players for every threshold: entry `T - 1`
/// for `T` in `1..=total`. The game's own threshold is ignored.
pub fn aggregate_big_sweep(g: &AnyGame, kind: IndexKind) -> Result<Vec<Exact>, IndexError> {
    let total = g.total_weight();
    if g.big().is_empty() {
        return Ok(vec![Exact::zero(); total as usize]);
    }
    let big_classes = big_weight_classes(g);
    let out = match (kind, g) {
        (IndexKind::Shapley, AnyGame::Base(b)) => {
            if b.small_count() == 0 {
                vec![Exact::one(); total as usize]
            } else {
                let m = Exact::from(b.small_count());
                counts::shapley_sweep(g, 1)
                    .into_iter()
                    .map(|phi| Exact::one() - &m * phi)
                    .collect()
            }
        }
        (IndexKind::Shapley, AnyGame::Generalized(_)) => {
            let mut acc = vec![Exact::zero(); total as usize];
            for (w, c) in big_classes {
                let c = Exact::from(c);
                for (a, v) in acc.iter_mut().zip(counts::shapley_sweep(g, w)) {
                    *a = &*a + &c * v;
                }
            }
            acc
        }
        (IndexKind::BanzhafAbs, _) => {
            let den = BigUint::from(1u32) << (g.player_count() - 1) as usize;
            let mut acc = vec![BigUint::zero(); total as usize];
            for (w, c) in big_classes {
                for (a, v) in acc.iter_mut().zip(counts::swing_sweep(g, w)) {
                    *a += v * c;
                }
            }
            acc.into_iter().map(|n| Exact::from_biguint(n, den.clone())).collect()
        }
        (IndexKind::BanzhafNorm, _) => {
            let mut big_acc = vec![BigUint::zero(); total as usize];
            let mut all_acc = vec![BigUint::zero(); total as usize];
            for (w, c) in g.weight_classes() {
                let is_big = big_classes.iter().any(|&(bw, _)| bw == w);
                for (t, v) in counts::swing_sweep(g, w).into_iter().enumerate() {
                    let v = v * c;
                    if is_big {
                        big_acc[t] += &v;
                    }
                    all_acc[t] += v;
                }
            }
            big_acc
                .into_iter()
                .zip(all_acc)
                .map(|(b, a)| {
                    if a.is_zero() {
                        Err(IndexError::Internal(format!("no player is ever a swing in {g}")))
                    } else {
                        Ok(Exact::from_biguint(b, a))
                    }
                })
                .collect::<Result<_, _>>()?
        }
        (IndexKind::DeeganPackel, AnyGame::Base(b)) => (1..=total)
            .map(|t| deegan_packel_aggregate_big(&b.with_threshold(t).expect("threshold in range")))
            .collect(),
        (IndexKind::DeeganPackel, AnyGame::Generalized(_)) => return Err(IndexError::Unsupported("deegan_packel")),
    };
    Ok(out)
}

/// Big weights with multiplicities, heaviest first.
fn big_weight_classes(g: &AnyGame) -> Vec<(u64, u64)> {
    let mut out: Vec<(u64, u64)> = Vec::new();
    for &w in g.big() {
        match out.last_mut() {
            Some((lw, c)) if *lw == w => *c += 1,
            _ => out.push((w, 1)),
        }
    }
    out
}

/// Σ over big players, given per-weight values of every class.
fn big_classes_sum(g: &AnyGame, classes: &[(u64, u64, Exact)]) -> Exact {
    big_weight_classes(g)
        .into_iter()
        .map(|(w, c)| {
            let v = &classes.iter().find(|(cw, _, _)| *cw == w).unwrap().2;
            Exact::from(c) * v
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{parse_game, GeneralizedGame};

    #[test]
    fn kind_parsing() {
        assert_eq!("deegan-packel".parse::<IndexKind>().unwrap(), IndexKind::DeeganPackel);
        assert_eq!("banzhaf_abs".parse::<IndexKind>().unwrap(), IndexKind::BanzhafAbs);
        assert_eq!("Shapley".parse::<IndexKind>().unwrap(), IndexKind::Shapley);
        assert!("owen".parse::<IndexKind>().is_err());
        assert_eq!(serde_json::to_string(&IndexKind::BanzhafNorm).unwrap(), "\"banzhaf_norm\"");
    }

    #[test]
    fn aggregates() {
        let g = parse_game("A=8,8;m=16;T=17").unwrap();
        assert_eq!(aggregate_big(&g, IndexKind::DeeganPackel).unwrap(), Exact::new(431, 4293));
        let g = parse_game("A=3;m=3;T=6").unwrap();
        assert_eq!(aggregate_big(&g, IndexKind::Shapley).unwrap(), Exact::new(1, 4));
        let g: AnyGame = GeneralizedGame::new(vec![8, 7], vec![5, 3], 3, 10).unwrap().into();
        assert_eq!(aggregate_big(&g, IndexKind::Shapley).unwrap(), Exact::new(2, 3));
        assert_eq!(
            aggregate_big(&g, IndexKind::DeeganPackel),
            Err(IndexError::Unsupported("deegan_packel"))
        );
        let g = parse_game("A=2;m=1;T=2").unwrap();
        assert_eq!(aggregate_big(&g, IndexKind::BanzhafNorm).unwrap(), Exact::one());
        assert_eq!(aggregate_big(&g, IndexKind::BanzhafAbs).unwrap(), Exact::one());
    }

    #[test]
    fn sweeps_match_pointwise_aggregates() {
        let games = [
            parse_game("A=5,3,2;m=3;T=1").unwrap(),
            parse_game("A=4;m=0;T=1").unwrap(),
            parse_game("A=9,6;M=5,4,3;s=3;T=1").unwrap(),
        ];
        for g in &games {
            for kind in IndexKind::ALL {
                let sweep = match aggregate_big_sweep(g, kind) {
                    Ok(s) => s,
                    Err(IndexError::Unsupported(_)) => continue,
                    Err(e) => panic!("{e}"),
                };
                for t in 1..=g.total_weight() {
                    let gt = match g {
                        AnyGame::Base(b) => AnyGame::Base(b.with_threshold(t).unwrap()),
                        AnyGame::Generalized(x) => AnyGame::Generalized(x.with_threshold(t).unwrap()),
                    };
                    assert_eq!(sweep[t as usize - 1], aggregate_big(&gt, kind).unwrap(), "{gt} {kind}");
                }
            }
        }
    }

    #[test]
    fn banzhaf_abs_aggregate() {
        let g = parse_game("A=2;m=1;T=2").unwrap();
        assert_eq!(aggregate_big(&g, IndexKind::BanzhafAbs).unwrap(), Exact::one());
    }
}
