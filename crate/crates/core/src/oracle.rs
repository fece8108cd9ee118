//! Brute-force reference implementations of every index.
//!
//! These enumerate permutations and subsets of individually identified
//! players straight from the definitions. They are slow on purpose and serve
//! as ground truth for the fast engines.

use num_bigint::BigUint;
use thiserror::Error;

use crate::exact::{factorial, Exact};
use crate::game::{GameError, PlayerId, WeightedGame, Weight};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("{players} players exceed the oracle limit of {limit} for {what}")]
    TooLarge { players: u64, limit: u64, what: &'static str },
    #[error(transparent)]
    Game(#[from] GameError),
}

/// Enumeration guards. Exceeding one is an error, never a truncation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleConfig {
    pub max_permutation_players: u64,
    pub max_subset_players: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            max_permutation_players: 10,
            max_subset_players: 20,
        }
    }
}

impl OracleConfig {
    fn check_permutations(&self, n: u64) -> Result<(), OracleError> {
        if n > self.max_permutation_players {
            return Err(OracleError::TooLarge {
                players: n,
                limit: self.max_permutation_players,
                what: "permutation enumeration",
            });
        }
        Ok(())
    }

    fn check_subsets(&self, n: u64) -> Result<(), OracleError> {
        if n > self.max_subset_players.min(63) {
            return Err(OracleError::TooLarge {
                players: n,
                limit: self.max_subset_players.min(63),
                what: "subset enumeration",
            });
        }
        Ok(())
    }
}

/// Rearranges `perm` into the next permutation in lexicographic order.
/// Returns `false` once the last permutation has been passed.
fn next_permutation(perm: &mut [usize]) -> bool {
    let n = perm.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && perm[i - 1] >= perm[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while perm[j] <= perm[i - 1] {
        j -= 1;
    }
    perm.swap(i - 1, j);
    perm[i..].reverse();
    true
}

/// For every slot, the number of orderings of all slots in which that slot is
/// pivotal for `threshold`.
pub fn pivot_counts(weights: &[Weight], threshold: u64) -> Vec<u64> {
    let n = weights.len();
    let mut counts = vec![0u64; n];
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        let mut before = 0u64;
        let mut pivots = 0;
        for &slot in &perm {
            let after = before + weights[slot];
            let indicator = u8::from(after >= threshold) - u8::from(before >= threshold);
            if indicator == 1 {
                counts[slot] += 1;
                pivots += 1;
            }
            before = after;
        }
        assert_eq!(pivots, 1, "permutation {perm:?} of {weights:?} has {pivots} pivots at T={threshold}");
        if !next_permutation(&mut perm) {
            break;
        }
    }
    counts
}

/// `counts[t - 1][slot]`: pivot counts for every threshold `1..=total` from
/// a single pass over the permutations.
pub fn pivot_counts_all_thresholds(weights: &[Weight]) -> Vec<Vec<u64>> {
    let n = weights.len();
    let total: u64 = weights.iter().sum();
    let mut counts = vec![vec![0u64; n]; total as usize];
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        let mut before = 0u64;
        for &slot in &perm {
            let after = before + weights[slot];
            // The slot is pivotal for exactly the thresholds in (before, after].
            for t in before + 1..=after {
                counts[t as usize - 1][slot] += 1;
            }
            before = after;
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    counts
}

fn slot_of<G: WeightedGame + ?Sized>(g: &G, p: PlayerId) -> Result<usize, OracleError> {
    g.player_weight(p)?;
    Ok(match p {
        PlayerId::Big(i) => i,
        PlayerId::Small(i) => g.big().len() + i,
    })
}

/// Shapley-Shubik values of every slot (bigs first, then smalls).
pub fn shapley_all_slots<G: WeightedGame + ?Sized>(g: &G, cfg: &OracleConfig) -> Result<Vec<Exact>, OracleError> {
    let n = g.player_count();
    cfg.check_permutations(n)?;
    let weights = g.slot_weights();
    let counts = pivot_counts(&weights, g.threshold());
    let total = factorial(n);
    Ok(counts
        .into_iter()
        .map(|c| Exact::from_biguint(BigUint::from(c), total.clone()))
        .collect())
}

/// Fraction of all orderings in which `p` is pivotal.
pub fn shapley_bruteforce<G: WeightedGame + ?Sized>(g: &G, p: PlayerId) -> Result<Exact, OracleError> {
    shapley_bruteforce_with(g, p, &OracleConfig::default())
}

pub fn shapley_bruteforce_with<G: WeightedGame + ?Sized>(
    g: &G,
    p: PlayerId,
    cfg: &OracleConfig,
) -> Result<Exact, OracleError> {
    let slot = slot_of(g, p)?;
    let values = shapley_all_slots(g, cfg)?;
    let weights = g.slot_weights();
    // Identical weights must see identical values.
    for (i, v) in values.iter().enumerate() {
        if weights[i] == weights[slot] {
            assert_eq!(v, &values[slot], "symmetric slots disagree in {weights:?}");
        }
    }
    Ok(values[slot].clone())
}

/// Fraction of subsets of the other players for which `p` is a swing.
pub fn banzhaf_abs_bruteforce<G: WeightedGame + ?Sized>(g: &G, p: PlayerId) -> Result<Exact, OracleError> {
    banzhaf_abs_bruteforce_with(g, p, &OracleConfig::default())
}

pub fn banzhaf_abs_bruteforce_with<G: WeightedGame + ?Sized>(
    g: &G,
    p: PlayerId,
    cfg: &OracleConfig,
) -> Result<Exact, OracleError> {
    let n = g.player_count();
    cfg.check_subsets(n)?;
    let slot = slot_of(g, p)?;
    let weights = g.slot_weights();
    let wp = weights[slot];
    let others: Vec<Weight> = weights
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != slot)
        .map(|(_, &w)| w)
        .collect();
    let mut swings = 0u64;
    for mask in 0u64..(1u64 << others.len()) {
        let sum: u64 = others
            .iter()
            .enumerate()
            .filter(|&(i, _)| mask >> i & 1 == 1)
            .map(|(_, &w)| w)
            .sum();
        if g.coalition_value(sum + wp) == 1 && g.coalition_value(sum) == 0 {
            swings += 1;
        }
    }
    Ok(Exact::from_biguint(BigUint::from(swings), BigUint::from(1u8) << others.len()))
}

/// Normalized Banzhaf value computed from the absolute oracle values of every
/// slot.
pub fn banzhaf_norm_bruteforce<G: WeightedGame + ?Sized>(g: &G, p: PlayerId) -> Result<Exact, OracleError> {
    let target = banzhaf_abs_bruteforce(g, p)?;
    let mut total = Exact::zero();
    for i in 0..g.big().len() {
        total = total + banzhaf_abs_bruteforce(g, PlayerId::Big(i))?;
    }
    for i in 0..g.small_players() as usize {
        total = total + banzhaf_abs_bruteforce(g, PlayerId::Small(i))?;
    }
    Ok(target.checked_div(&total).expect("some player is always a swing"))
}

/// A set of player slots (bigs first, then smalls) with its weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Coalition {
    members: u64,
    weight: u64,
}

impl Coalition {
    pub fn weight(&self) -> u64 {
        self.weight
    }

    pub fn size(&self) -> u32 {
        self.members.count_ones()
    }

    pub fn contains(&self, slot: usize) -> bool {
        self.members >> slot & 1 == 1
    }

    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        (0..64).filter(move |&i| self.contains(i))
    }
}

/// Every all-pivotal (minimal winning) coalition, in increasing bitmask order.
pub fn all_pivotal_enumerate<G: WeightedGame + ?Sized>(g: &G) -> Result<Vec<Coalition>, OracleError> {
    all_pivotal_enumerate_with(g, &OracleConfig::default())
}

pub fn all_pivotal_enumerate_with<G: WeightedGame + ?Sized>(
    g: &G,
    cfg: &OracleConfig,
) -> Result<Vec<Coalition>, OracleError> {
    let n = g.player_count();
    cfg.check_subsets(n)?;
    let weights = g.slot_weights();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << n) {
        let weight: u64 = (0..n as usize).filter(|&i| mask >> i & 1 == 1).map(|i| weights[i]).sum();
        if g.coalition_value(weight) == 0 {
            continue;
        }
        let all_pivotal = (0..n as usize)
            .filter(|&i| mask >> i & 1 == 1)
            .all(|i| g.coalition_value(weight - weights[i]) == 0);
        if all_pivotal {
            out.push(Coalition { members: mask, weight });
        }
    }
    Ok(out)
}

/// Average over all-pivotal coalitions of `1[p ∈ S] / |S|`.
pub fn deegan_packel_bruteforce<G: WeightedGame + ?Sized>(g: &G, p: PlayerId) -> Result<Exact, OracleError> {
    deegan_packel_bruteforce_with(g, p, &OracleConfig::default())
}

pub fn deegan_packel_bruteforce_with<G: WeightedGame + ?Sized>(
    g: &G,
    p: PlayerId,
    cfg: &OracleConfig,
) -> Result<Exact, OracleError> {
    let slot = slot_of(g, p)?;
    let ap = all_pivotal_enumerate_with(g, cfg)?;
    let share: Exact = ap
        .iter()
        .filter(|c| c.contains(slot))
        .map(|c| Exact::new(1, c.size()))
        .sum();
    Ok(share / Exact::from(ap.len() as u64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{Game, GeneralizedGame};

    fn game(big: &[u64], m: u64, t: u64) -> Game {
        Game::new(big.to_vec(), m, t).unwrap()
    }

    #[test]
    fn permutation_count() {
        let mut p = vec![0, 1, 2, 3];
        let mut n = 1;
        while next_permutation(&mut p) {
            n += 1;
        }
        assert_eq!(n, 24);
        assert_eq!(p, vec![3, 2, 1, 0]);
    }

    #[test]
    fn shapley_examples() {
        assert_eq!(shapley_bruteforce(&game(&[2], 1, 2), PlayerId::Big(0)).unwrap(), Exact::one());
        // {2,5} sorts to [5,2]; the weight-2 player is Big(1).
        assert_eq!(
            shapley_bruteforce(&game(&[2, 5], 1, 8), PlayerId::Big(1)).unwrap(),
            Exact::new(1, 3)
        );
        assert_eq!(shapley_bruteforce(&game(&[], 4, 3), PlayerId::SMALL).unwrap(), Exact::new(1, 4));
    }

    #[test]
    fn banzhaf_examples() {
        let g = game(&[2], 1, 2);
        assert_eq!(banzhaf_abs_bruteforce(&g, PlayerId::Big(0)).unwrap(), Exact::one());
        assert_eq!(banzhaf_abs_bruteforce(&g, PlayerId::SMALL).unwrap(), Exact::zero());
        assert_eq!(
            banzhaf_abs_bruteforce(&game(&[], 3, 2), PlayerId::SMALL).unwrap(),
            Exact::new(1, 2)
        );
    }

    #[test]
    fn all_pivotal_examples() {
        let ap = all_pivotal_enumerate(&game(&[16], 16, 17)).unwrap();
        assert_eq!(ap.len(), 16);
        assert!(ap.iter().all(|c| c.size() == 2 && c.contains(0)));
        let ap = all_pivotal_enumerate(&game(&[], 3, 2)).unwrap();
        assert_eq!(ap.len(), 3);
        assert!(ap.iter().all(|c| c.size() == 2 && c.weight() == 2));
        assert_eq!(all_pivotal_enumerate(&game(&[8, 8], 16, 17)).unwrap().len(), 22896);
    }

    #[test]
    fn deegan_packel_examples() {
        assert_eq!(
            deegan_packel_bruteforce(&game(&[16], 16, 17), PlayerId::Big(0)).unwrap(),
            Exact::new(1, 2)
        );
        assert_eq!(
            deegan_packel_bruteforce(&game(&[], 3, 2), PlayerId::SMALL).unwrap(),
            Exact::new(1, 3)
        );
        let g = game(&[8, 8], 16, 17);
        let both = deegan_packel_bruteforce(&g, PlayerId::Big(0)).unwrap()
            + deegan_packel_bruteforce(&g, PlayerId::Big(1)).unwrap();
        assert_eq!(both, Exact::new(431, 4293));
    }

    #[test]
    fn guards_are_errors() {
        let g = game(&[], 11, 3);
        assert!(matches!(
            shapley_bruteforce(&g, PlayerId::SMALL),
            Err(OracleError::TooLarge { players: 11, limit: 10, .. })
        ));
        let cfg = OracleConfig {
            max_permutation_players: 12,
            ..Default::default()
        };
        assert!(shapley_bruteforce_with(&g, PlayerId::SMALL, &cfg).is_ok());
        assert!(matches!(
            all_pivotal_enumerate(&game(&[], 21, 3)),
            Err(OracleError::TooLarge { .. })
        ));
    }

    #[test]
    fn generalized_players_are_individual() {
        let g = GeneralizedGame::new(vec![8, 7], vec![5, 3], 3, 10).unwrap();
        let v = shapley_all_slots(&g, &OracleConfig::default()).unwrap();
        assert_eq!(v.iter().sum::<Exact>(), Exact::one());
        assert_eq!(v[0].clone() + &v[1], Exact::new(2, 3));
        assert!(shapley_bruteforce(&g, PlayerId::Small(2)).is_err());
    }

    #[test]
    fn sweep_matches_single_threshold() {
        let w = vec![3, 2, 2, 1, 1];
        let all = pivot_counts_all_thresholds(&w);
        for t in 1..=9u64 {
            assert_eq!(all[t as usize - 1], pivot_counts(&w, t));
        }
    }
}
