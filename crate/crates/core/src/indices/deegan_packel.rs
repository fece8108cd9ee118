//! Deegan-Packel values from the decomposition of all-pivotal coalitions into
//! weight-count tuples.

use num_bigint::BigUint;
use num_traits::Zero;
use serde::Serialize;

use crate::exact::{binomial, Exact};
use crate::game::{Game, PlayerId, Weight, WeightedGame};
use crate::indices::IndexError;

/// One class of all-pivotal coalitions: how many bigs of each distinct
/// weight, and how many smalls, it contains.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ApTuple {
    /// `(weight, i_j)` for every distinct big weight, heaviest first.
    pub counts: Vec<(Weight, u64)>,
    pub small_count: u64,
    pub multiplicity: BigUint,
    pub coalition_size: u64,
}

impl ApTuple {
    pub fn big_weight(&self) -> u64 {
        self.counts.iter().map(|&(w, i)| w * i).sum()
    }

    pub fn big_members(&self) -> u64 {
        self.counts.iter().map(|&(_, i)| i).sum()
    }
}

fn big_classes(g: &Game) -> Vec<(Weight, u64)> {
    let mut out: Vec<(Weight, u64)> = Vec::new();
    for &w in g.big() {
        match out.last_mut() {
            Some((lw, c)) if *lw == w => *c += 1,
            _ => out.push((w, 1)),
        }
    }
    out
}

/// Every feasible tuple of the game, in lexicographic order of the counts
/// (heaviest weight first, larger counts first).
pub fn ap_tuples(g: &Game) -> Vec<ApTuple> {
    let classes = big_classes(g);
    let mut out = Vec::new();
    let mut chosen = vec![0u64; classes.len()];
    extend(g, &classes, 0, 0, &mut chosen, &mut out);
    out
}

fn extend(g: &Game, classes: &[(Weight, u64)], idx: usize, sum: u64, chosen: &mut Vec<u64>, out: &mut Vec<ApTuple>) {
    let t = g.threshold();
    if idx == classes.len() {
        if let Some(tuple) = finish(g, classes, chosen, sum) {
            out.push(tuple);
        }
        return;
    }
    let (w, r) = classes[idx];
    // Members are added heaviest first, only while the coalition still
    // loses; any further member would be non-pivotal.
    let mut max_i = 0;
    let mut s = sum;
    while max_i < r && s < t {
        s += w;
        max_i += 1;
    }
    for i in (0..=max_i).rev() {
        chosen[idx] = i;
        extend(g, classes, idx + 1, sum + w * i, chosen, out);
    }
    chosen[idx] = 0;
}

fn finish(g: &Game, classes: &[(Weight, u64)], chosen: &[u64], sigma: u64) -> Option<ApTuple> {
    let t = g.threshold();
    let m = g.small_count();
    let l = if sigma < t {
        let l = t - sigma;
        if l > m {
            return None;
        }
        l
    } else {
        let min_w = classes
            .iter()
            .zip(chosen)
            .filter(|(_, &i)| i > 0)
            .map(|(&(w, _), _)| w)
            .min()?;
        if min_w <= sigma - t {
            return None;
        }
        0
    };
    let mut multiplicity = binomial(m, l);
    for (&(_, r), &i) in classes.iter().zip(chosen) {
        multiplicity *= binomial(r, i);
    }
    let counts: Vec<(Weight, u64)> = classes.iter().zip(chosen).map(|(&(w, _), &i)| (w, i)).collect();
    let coalition_size = chosen.iter().sum::<u64>() + l;
    Some(ApTuple {
        counts,
        small_count: l,
        multiplicity,
        coalition_size,
    })
}

/// `|AP|`, the number of all-pivotal coalitions.
pub fn ap_count(g: &Game) -> BigUint {
    ap_tuples(g).iter().map(|t| &t.multiplicity).sum()
}

fn weighted_share(tuples: &[ApTuple], share: impl Fn(&ApTuple) -> Exact) -> Exact {
    let total: BigUint = tuples.iter().map(|t| &t.multiplicity).sum();
    if total.is_zero() {
        return Exact::zero();
    }
    let sum: Exact = tuples
        .iter()
        .filter(|t| t.coalition_size > 0)
        .map(|t| share(t) * Exact::from_biguint(t.multiplicity.clone(), BigUint::from(t.coalition_size)))
        .sum();
    sum / Exact::from_biguint(total, BigUint::from(1u32))
}

pub fn deegan_packel(g: &Game, p: PlayerId) -> Result<Exact, IndexError> {
    let wp = g.player_weight(p)?;
    let tuples = ap_tuples(g);
    Ok(match p {
        PlayerId::Big(_) => {
            let r_j = g.big().iter().filter(|&&w| w == wp).count() as u64;
            weighted_share(&tuples, |t| {
                let i_j = t.counts.iter().find(|&&(w, _)| w == wp).map_or(0, |&(_, i)| i);
                Exact::new(i_j, r_j)
            })
        }
        PlayerId::Small(_) => weighted_share(&tuples, |t| Exact::new(t.small_count, g.small_count())),
    })
}

/// Combined Deegan-Packel value of all big players.
pub fn deegan_packel_aggregate_big(g: &Game) -> Exact {
    weighted_share(&ap_tuples(g), |t| Exact::from(t.big_members()))
}
