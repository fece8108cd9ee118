//! Subset-count dynamic programs over weight classes, used for individual
//! Shapley-Shubik and Banzhaf values.

use num_bigint::BigUint;
use num_traits::Zero;

use crate::exact::{binomial, factorials, BinomialWalk, Exact};
use crate::game::{Game, PlayerId, Weight, WeightClasses, WeightedGame};
use crate::indices::IndexError;

/// `N(size, weight)`: the number of sub-multisets of a player set with the
/// given cardinality and weight sum, for weights up to `max_weight`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoalitionCountTable {
    /// `counts[size][weight]`
    counts: Vec<Vec<BigUint>>,
    max_weight: u64,
}

impl CoalitionCountTable {
    /// Counts over all players in `classes`, truncated at `max_weight`.
    pub fn of_players(classes: &WeightClasses, max_weight: u64) -> Self {
        let min_w = classes.iter().map(|&(w, _)| w).min().unwrap_or(1).max(1);
        let players: u64 = classes.iter().map(|&(_, c)| c).sum();
        let max_size = players.min(max_weight / min_w) as usize;
        let width = max_weight as usize + 1;
        let mut counts = vec![vec![BigUint::zero(); width]; max_size + 1];
        counts[0][0] = BigUint::from(1u32);
        let mut reached = 0usize;
        for &(w, c) in classes {
            let k_max = c.min(max_weight / w.max(1)) as usize;
            if k_max == 0 {
                continue;
            }
            let choose: Vec<BigUint> = {
                let mut walk = BinomialWalk::starting_at(c, 0);
                (0..=k_max)
                    .map(|_| {
                        let v = walk.current().clone();
                        walk.advance();
                        v
                    })
                    .collect()
            };
            let mut next = vec![vec![BigUint::zero(); width]; max_size + 1];
            for s in 0..=reached.min(max_size) {
                for wt in 0..width {
                    if counts[s][wt].is_zero() {
                        continue;
                    }
                    for (k, ck) in choose.iter().enumerate() {
                        let ns = s + k;
                        let nw = wt + k * w as usize;
                        if ns > max_size || nw >= width {
                            break;
                        }
                        next[ns][nw] += &counts[s][wt] * ck;
                    }
                }
            }
            counts = next;
            reached = (reached + k_max).min(max_size);
        }
        CoalitionCountTable { counts, max_weight }
    }

    /// Counts over the players in `classes` with one player of weight
    /// `removed` taken out.
    pub fn of_others(classes: &WeightClasses, removed: Weight, max_weight: u64) -> Self {
        Self::of_players(&without_one(classes, removed), max_weight)
    }

    pub fn max_weight(&self) -> u64 {
        self.max_weight
    }

    pub fn max_size(&self) -> usize {
        self.counts.len() - 1
    }

    pub fn get(&self, size: usize, weight: u64) -> BigUint {
        self.counts
            .get(size)
            .and_then(|row| row.get(weight as usize))
            .cloned()
            .unwrap_or_default()
    }

    /// Σ over every stored cell.
    pub fn total(&self) -> BigUint {
        self.counts.iter().flatten().sum()
    }
}

fn without_one(classes: &WeightClasses, removed: Weight) -> WeightClasses {
    let mut out = Vec::with_capacity(classes.len());
    let mut done = false;
    for &(w, c) in classes {
        if !done && w == removed {
            done = true;
            if c > 1 {
                out.push((w, c - 1));
            }
        } else {
            out.push((w, c));
        }
    }
    assert!(done, "no player of weight {removed} to remove");
    out
}

/// Shapley-Shubik value of any one player of weight `wp`.
pub fn shapley_by_weight<G: WeightedGame + ?Sized>(g: &G, wp: Weight) -> Exact {
    let t = g.threshold();
    let hi = t - 1;
    let lo = t.saturating_sub(wp);
    let n = g.player_count();
    let table = CoalitionCountTable::of_others(&g.weight_classes(), wp, hi);
    let fact = factorials(n);
    let mut num = BigUint::zero();
    for s in 0..=table.max_size().min(n as usize - 1) {
        let mut cell = BigUint::zero();
        for w in lo..=hi {
            cell += table.get(s, w);
        }
        if !cell.is_zero() {
            num += cell * &fact[s] * &fact[n as usize - 1 - s];
        }
    }
    Exact::from_biguint(num, fact[n as usize].clone())
}

pub fn shapley_player<G: WeightedGame + ?Sized>(g: &G, p: PlayerId) -> Result<Exact, IndexError> {
    let wp = g.player_weight(p)?;
    Ok(shapley_by_weight(g, wp))
}

/// Shapley-Shubik value for each weight class: `(weight, players, value)`.
pub fn shapley_by_class<G: WeightedGame + ?Sized>(g: &G) -> Vec<(Weight, u64, Exact)> {
    g.weight_classes()
        .into_iter()
        .map(|(w, c)| (w, c, shapley_by_weight(g, w)))
        .collect()
}

/// `1 − m·φ₁`, with φ₁ from the count table.
pub fn shapley_aggregate_big(g: &Game) -> Exact {
    if g.small_count() == 0 {
        return if g.big_count() > 0 { Exact::one() } else { Exact::zero() };
    }
    Exact::one() - Exact::from(g.small_count()) * shapley_by_weight(g, 1)
}

/// Number of coalitions of the other players for which a player of weight
/// `wp` is a swing.
pub fn swing_count<G: WeightedGame + ?Sized>(g: &G, wp: Weight) -> BigUint {
    let t = g.threshold();
    let hi = t - 1;
    let lo = t.saturating_sub(wp);
    let others = without_one(&g.weight_classes(), wp);
    let units = others.iter().find(|&&(w, _)| w == 1).map_or(0, |&(_, c)| c);
    let rest: WeightClasses = others.into_iter().filter(|&(w, _)| w != 1).collect();

    let base = weight_counts(&rest, hi);
    let mut total = BigUint::zero();
    for (wb, cnt) in base.iter().enumerate() {
        if cnt.is_zero() {
            continue;
        }
        let wb = wb as u64;
        let k_lo = lo.saturating_sub(wb);
        let k_hi = (hi - wb).min(units);
        if k_lo > k_hi {
            continue;
        }
        let mut walk = BinomialWalk::starting_at(units, k_lo);
        let mut window = BigUint::zero();
        while walk.k() <= k_hi {
            window += walk.current();
            walk.advance();
        }
        total += cnt * window;
    }
    total
}

/// Subset counts by weight only, for weights `0..=max_weight`.
fn weight_counts(classes: &WeightClasses, max_weight: u64) -> Vec<BigUint> {
    let width = max_weight as usize + 1;
    let mut counts = vec![BigUint::zero(); width];
    counts[0] = BigUint::from(1u32);
    for &(w, c) in classes {
        let k_max = c.min(max_weight / w) as usize;
        if k_max == 0 {
            continue;
        }
        let choose: Vec<BigUint> = (0..=k_max as u64).map(|k| binomial(c, k)).collect();
        let mut next = vec![BigUint::zero(); width];
        for (wt, cur) in counts.iter().enumerate() {
            if cur.is_zero() {
                continue;
            }
            for (k, ck) in choose.iter().enumerate() {
                let nw = wt + k * w as usize;
                if nw >= width {
                    break;
                }
                next[nw] += cur * ck;
            }
        }
        counts = next;
    }
    counts
}

/// Shapley-Shubik value of a player of weight `wp` for every threshold:
/// entry `T - 1` for `T` in `1..=total`. The game's own threshold is
/// ignored.
pub fn shapley_sweep<G: WeightedGame + ?Sized>(g: &G, wp: Weight) -> Vec<Exact> {
    let total = g.total_weight();
    let n = g.player_count() as usize;
    let table = CoalitionCountTable::of_others(&g.weight_classes(), wp, total - wp);
    let fact = factorials(n as u64);
    // prefix[w] = Σ_{w' < w} Σ_s N(s, w') s! (n-1-s)!
    let mut prefix = Vec::with_capacity(total as usize + 1);
    let mut acc = BigUint::zero();
    prefix.push(acc.clone());
    for w in 0..total {
        for s in 0..=table.max_size().min(n - 1) {
            let c = table.get(s, w);
            if !c.is_zero() {
                acc += c * &fact[s] * &fact[n - 1 - s];
            }
        }
        prefix.push(acc.clone());
    }
    (1..=total)
        .map(|t| {
            let lo = t.saturating_sub(wp) as usize;
            let num = &prefix[t as usize] - &prefix[lo];
            Exact::from_biguint(num, fact[n].clone())
        })
        .collect()
}

/// Swing counts of a player of weight `wp` for every threshold: entry
/// `T - 1` for `T` in `1..=total`.
pub fn swing_sweep<G: WeightedGame + ?Sized>(g: &G, wp: Weight) -> Vec<BigUint> {
    let total = g.total_weight();
    let counts = weight_counts(&without_one(&g.weight_classes(), wp), total);
    let mut prefix = Vec::with_capacity(total as usize + 1);
    let mut acc = BigUint::zero();
    prefix.push(acc.clone());
    for c in counts.iter().take(total as usize) {
        acc += c;
        prefix.push(acc.clone());
    }
    (1..=total)
        .map(|t| &prefix[t as usize] - &prefix[t.saturating_sub(wp) as usize])
        .collect()
}

fn two_pow(e: u64) -> BigUint {
    BigUint::from(1u32) << e as usize
}

pub fn banzhaf_abs_by_weight<G: WeightedGame + ?Sized>(g: &G, wp: Weight) -> Exact {
    Exact::from_biguint(swing_count(g, wp), two_pow(g.player_count() - 1))
}

pub fn banzhaf_abs<G: WeightedGame + ?Sized>(g: &G, p: PlayerId) -> Result<Exact, IndexError> {
    let wp = g.player_weight(p)?;
    Ok(banzhaf_abs_by_weight(g, wp))
}

/// Normalized Banzhaf value for each weight class: `(weight, players, value)`.
pub fn banzhaf_norm_by_class<G: WeightedGame + ?Sized>(g: &G) -> Result<Vec<(Weight, u64, Exact)>, IndexError> {
    let swings: Vec<(Weight, u64, BigUint)> = g
        .weight_classes()
        .into_iter()
        .map(|(w, c)| (w, c, swing_count(g, w)))
        .collect();
    let total: BigUint = swings.iter().map(|(_, c, s)| s * *c).sum();
    if total.is_zero() {
        return Err(IndexError::Internal(format!("no player is ever a swing in {}", game_label(g))));
    }
    Ok(swings
        .into_iter()
        .map(|(w, c, s)| (w, c, Exact::from_biguint(s, total.clone())))
        .collect())
}

pub fn banzhaf_norm<G: WeightedGame + ?Sized>(g: &G, p: PlayerId) -> Result<Exact, IndexError> {
    let wp = g.player_weight(p)?;
    let classes = banzhaf_norm_by_class(g)?;
    Ok(classes.into_iter().find(|(w, _, _)| *w == wp).map(|(_, _, v)| v).unwrap())
}

fn game_label<G: WeightedGame + ?Sized>(g: &G) -> String {
    format!("game with weights {:?} and threshold {}", g.slot_weights(), g.threshold())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::GeneralizedGame;
    use num_traits::One;

    fn game(big: &[u64], m: u64, t: u64) -> Game {
        Game::new(big.to_vec(), m, t).unwrap()
    }

    #[test]
    fn count_table_sums_to_all_subsets() {
        let g = game(&[5, 3, 3], 4, 9);
        let total_weight = g.total_weight();
        let t = CoalitionCountTable::of_others(&g.weight_classes(), 3, total_weight);
        assert_eq!(t.total(), BigUint::one() << 6usize);
        let full = CoalitionCountTable::of_players(&g.weight_classes(), total_weight);
        assert_eq!(full.total(), BigUint::one() << 7usize);
        assert_eq!(full.get(7, total_weight), BigUint::one());
    }

    #[test]
    fn shapley_examples() {
        assert_eq!(shapley_player(&game(&[3], 2, 3), PlayerId::Big(0)).unwrap(), Exact::one());
        assert_eq!(
            shapley_player(&game(&[3, 3, 3], 3, 12), PlayerId::Big(0)).unwrap(),
            Exact::new(1, 6)
        );
        let g = GeneralizedGame::new(vec![8, 7], vec![5, 3], 3, 10).unwrap();
        let sum = shapley_player(&g, PlayerId::Big(0)).unwrap() + shapley_player(&g, PlayerId::Big(1)).unwrap();
        assert_eq!(sum, Exact::new(2, 3));
    }

    #[test]
    fn aggregate_examples() {
        assert_eq!(shapley_aggregate_big(&game(&[2], 1, 2)), Exact::one());
        assert_eq!(shapley_aggregate_big(&game(&[3], 3, 6)), Exact::new(1, 4));
        assert_eq!(shapley_aggregate_big(&game(&[], 5, 3)), Exact::zero());
    }

    #[test]
    fn banzhaf_examples() {
        assert_eq!(banzhaf_abs(&game(&[2], 1, 2), PlayerId::Big(0)).unwrap(), Exact::one());
        assert_eq!(banzhaf_abs(&game(&[8], 8, 8), PlayerId::Big(0)).unwrap(), Exact::new(255, 256));
        assert_eq!(banzhaf_norm(&game(&[2], 1, 2), PlayerId::Big(0)).unwrap(), Exact::one());
        assert_eq!(banzhaf_norm(&game(&[], 3, 2), PlayerId::SMALL).unwrap(), Exact::new(1, 3));
    }

    #[test]
    fn banzhaf_individual_bound_fails() {
        let v = banzhaf_norm(&game(&[8], 8, 8), PlayerId::Big(0)).unwrap();
        assert!(v > Exact::new(8, 9));
    }

    #[test]
    fn normalized_banzhaf_sums_to_one() {
        let g = GeneralizedGame::new(vec![9, 6], vec![5, 4, 3], 3, 14).unwrap();
        let s: Exact = banzhaf_norm_by_class(&g)
            .unwrap()
            .into_iter()
            .map(|(_, c, v)| Exact::from(c) * v)
            .sum();
        assert_eq!(s, Exact::one());
    }

    #[test]
    fn sweeps_match_single_threshold_values() {
        let g = GeneralizedGame::new(vec![9, 6], vec![5, 4, 3], 3, 1).unwrap();
        for (w, _) in g.weight_classes() {
            let sh = shapley_sweep(&g, w);
            let sw = swing_sweep(&g, w);
            for t in 1..=g.total_weight() {
                let gt = g.with_threshold(t).unwrap();
                assert_eq!(sh[t as usize - 1], shapley_by_weight(&gt, w));
                assert_eq!(sw[t as usize - 1], swing_count(&gt, w));
            }
        }
    }

    #[test]
    fn unknown_player_is_an_error() {
        assert!(shapley_player(&game(&[3], 0, 2), PlayerId::SMALL).is_err());
        assert!(banzhaf_abs(&game(&[3], 1, 2), PlayerId::Big(4)).is_err());
    }
}
