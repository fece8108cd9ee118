//! How often the pivotal player of a random ordering is a big player.

use serde::{Deserialize, Serialize};

use crate::exact::Exact;
use crate::game::{AnyGame, Game};
use crate::indices::{self, IndexKind};
use crate::multiset::multisets_below;

/// Probability, over uniformly random orderings, that the pivotal player is
/// big. This is the combined Shapley-Shubik value of the big players.
pub fn big_pivot_probability(g: &Game) -> Exact {
    if g.big_count() == 0 {
        return Exact::zero();
    }
    indices::shapley_aggregate_big(g)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PivotSurvey {
    /// Games with `m < T < Σ big`.
    pub games_checked: u64,
    /// Games where the probability is below 1/2.
    pub violations: u64,
    pub min_probability: Option<Exact>,
    pub min_witness: Option<Game>,
    /// The first few violating games, in enumeration order.
    pub examples: Vec<(Game, Exact)>,
}

const EXAMPLES_KEPT: usize = 20;

/// Checks `big_pivot_probability ≥ 1/2` on every game with Σ big below
/// `max_big_sum`, fewer than `max_small` small players and `m < T < Σ big`.
pub fn pivot_survey(max_big_sum: u64, max_small: u64) -> PivotSurvey {
    let half = Exact::new(1, 2);
    let mut survey = PivotSurvey {
        games_checked: 0,
        violations: 0,
        min_probability: None,
        min_witness: None,
        examples: Vec::new(),
    };
    for big in multisets_below(max_big_sum, 2, u64::MAX) {
        let big_sum: u64 = big.iter().sum();
        for m in 0..max_small {
            if m + 1 >= big_sum {
                continue;
            }
            let probe: AnyGame = Game::new(big.clone(), m, 1).expect("valid game").into();
            let sweep = indices::aggregate_big_sweep(&probe, IndexKind::Shapley).expect("shapley sweep");
            for t in m + 1..big_sum {
                let p = &sweep[t as usize - 1];
                survey.games_checked += 1;
                let is_min = survey.min_probability.as_ref().is_none_or(|cur| p < cur);
                let game = || Game::new(big.clone(), m, t).expect("valid game");
                if is_min {
                    survey.min_probability = Some(p.clone());
                    survey.min_witness = Some(game());
                }
                if p < &half {
                    survey.violations += 1;
                    if survey.examples.len() < EXAMPLES_KEPT {
                        survey.examples.push((game(), p.clone()));
                    }
                }
            }
        }
    }
    survey
}
