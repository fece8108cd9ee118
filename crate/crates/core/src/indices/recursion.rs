//! Memoized recursions for the Shapley-Shubik value of a single small player.
//!
//! The forward recursion conditions on the first player of the ordering, the
//! dual one on the last. Both are memoized on the canonical (sorted,
//! `T`-capped) game and evaluated with an explicit work stack so deep
//! thresholds cannot overflow the call stack.

use std::collections::HashMap;
use std::sync::RwLock;

use crate::exact::Exact;
use crate::game::{Game, WeightedGame};
use crate::indices::IndexError;

/// Canonical game → φ₁. Entries are never overwritten.
#[derive(Debug, Default)]
pub struct MemoTable {
    entries: RwLock<HashMap<Game, Exact>>,
}

impl MemoTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, g: &Game) -> Option<Exact> {
        self.entries.read().unwrap().get(g).cloned()
    }

    /// Stores `value` unless the key is already present; returns the stored
    /// value either way.
    pub fn insert_if_absent(&self, g: Game, value: Exact) -> Exact {
        let mut entries = self.entries.write().unwrap();
        let stored = entries.entry(g).or_insert_with(|| value.clone());
        debug_assert_eq!(stored, &value, "memo entries must be value-identical");
        stored.clone()
    }

    pub fn len(&self) -> usize {
        self.entries.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

enum Step {
    Base(Exact),
    /// `Σ weight · φ₁(child) / denominator`
    Combine { children: Vec<(Game, u64)>, denominator: u64 },
}

fn without_one(big: &[u64], index: usize) -> Vec<u64> {
    let mut v = big.to_vec();
    v.remove(index);
    v
}

/// Conditions on the first player in the ordering.
fn forward_step(g: &Game) -> Step {
    let t = g.threshold();
    let m = g.small_count();
    let r = g.big_count() as u64;
    if t == 1 {
        return Step::Base(Exact::new(1, m + r));
    }
    let mut children = Vec::new();
    let big = g.big();
    let mut i = 0;
    while i < big.len() {
        let a = big[i];
        let mult = big[i..].iter().take_while(|&&w| w == a).count();
        if a < t {
            let child = Game::from_sorted_unchecked(without_one(big, i), m, t - a).canonicalize();
            children.push((child, mult as u64));
        }
        i += mult;
    }
    if m >= 2 {
        children.push((Game::from_sorted_unchecked(big.to_vec(), m - 1, t - 1).canonicalize(), m - 1));
    }
    Step::Combine {
        children,
        denominator: m + r,
    }
}

/// Conditions on the last player in the ordering.
fn dual_step(g: &Game) -> Step {
    let t = g.threshold();
    let m = g.small_count();
    let r = g.big_count() as u64;
    let total = g.total_weight();
    if t == total {
        return Step::Base(Exact::new(1, m + r));
    }
    let mut children = Vec::new();
    let big = g.big();
    let mut i = 0;
    while i < big.len() {
        let a = big[i];
        let mult = big[i..].iter().take_while(|&&w| w == a).count();
        if total - a >= t {
            let child = Game::from_sorted_unchecked(without_one(big, i), m, t).canonicalize();
            children.push((child, mult as u64));
        }
        i += mult;
    }
    if m >= 2 {
        children.push((Game::from_sorted_unchecked(big.to_vec(), m - 1, t).canonicalize(), m - 1));
    }
    Step::Combine {
        children,
        denominator: m + r,
    }
}

fn solve(root: &Game, table: &MemoTable, step: fn(&Game) -> Step) -> Exact {
    let root = root.canonicalize();
    if let Some(v) = table.get(&root) {
        return v;
    }
    let mut stack = vec![root.clone()];
    while let Some(top) = stack.last().cloned() {
        if table.get(&top).is_some() {
            stack.pop();
            continue;
        }
        match step(&top) {
            Step::Base(v) => {
                table.insert_if_absent(top, v);
                stack.pop();
            }
            Step::Combine { children, denominator } => {
                let missing: Vec<Game> = children
                    .iter()
                    .filter(|(c, _)| table.get(c).is_none())
                    .map(|(c, _)| c.clone())
                    .collect();
                if missing.is_empty() {
                    let sum: Exact = children
                        .iter()
                        .map(|(c, w)| table.get(c).unwrap() * Exact::from(*w))
                        .sum();
                    table.insert_if_absent(top, sum / Exact::from(denominator));
                    stack.pop();
                } else {
                    stack.extend(missing);
                }
            }
        }
    }
    table.get(&root).unwrap()
}

/// The game with threshold `m + Σ big − T + 1`; φ₁ is the same in both.
pub fn dual_threshold(g: &Game) -> Game {
    g.with_threshold(g.total_weight() - g.threshold() + 1)
        .expect("dual threshold lies in [1, total]")
}

/// φ₁ engines sharing memo tables across calls. Safe to share between
/// threads.
#[derive(Debug, Default)]
pub struct ShapleyRecursion {
    forward: MemoTable,
    dual: MemoTable,
}

impl ShapleyRecursion {
    pub fn new() -> Self {
        Self::default()
    }

    fn require_small(g: &Game) -> Result<(), IndexError> {
        if g.small_count() == 0 {
            return Err(IndexError::NoSmallPlayer(g.to_string()));
        }
        Ok(())
    }

    pub fn small_forward(&self, g: &Game) -> Result<Exact, IndexError> {
        Self::require_small(g)?;
        Ok(solve(g, &self.forward, forward_step))
    }

    pub fn small_dual(&self, g: &Game) -> Result<Exact, IndexError> {
        Self::require_small(g)?;
        Ok(solve(g, &self.dual, dual_step))
    }

    /// Picks whichever recursion reaches its base case in fewer steps.
    pub fn small(&self, g: &Game) -> Result<Exact, IndexError> {
        let dual_t = g.total_weight() - g.threshold() + 1;
        if dual_t < g.threshold() {
            self.small_dual(g)
        } else {
            self.small_forward(g)
        }
    }

    /// `1 − m·φ₁`, the combined Shapley-Shubik value of the big players.
    pub fn aggregate_big(&self, g: &Game) -> Exact {
        if g.small_count() == 0 {
            return Exact::one();
        }
        let phi = self.small(g).expect("small player exists");
        Exact::one() - Exact::from(g.small_count()) * phi
    }

    pub fn forward_table(&self) -> &MemoTable {
        &self.forward
    }

    pub fn dual_table(&self) -> &MemoTable {
        &self.dual
    }
}

/// φ₁ by the forward recursion with a fresh memo table.
pub fn shapley_small(g: &Game) -> Result<Exact, IndexError> {
    ShapleyRecursion::new().small_forward(g)
}

/// φ₁ by the dual recursion with a fresh memo table.
pub fn shapley_small_dual(g: &Game) -> Result<Exact, IndexError> {
    ShapleyRecursion::new().small_dual(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn game(big: &[u64], m: u64, t: u64) -> Game {
        Game::new(big.to_vec(), m, t).unwrap()
    }

    #[test]
    fn forward_examples() {
        assert_eq!(shapley_small(&game(&[5], 3, 1)).unwrap(), Exact::new(1, 4));
        assert_eq!(shapley_small(&game(&[2], 1, 2)).unwrap(), Exact::zero());
        assert_eq!(shapley_small(&game(&[2], 2, 4)).unwrap(), Exact::new(1, 3));
    }

    #[test]
    fn dual_examples() {
        assert_eq!(shapley_small_dual(&game(&[2], 2, 4)).unwrap(), Exact::new(1, 3));
        assert_eq!(shapley_small_dual(&game(&[2], 1, 2)).unwrap(), Exact::zero());
    }

    #[test]
    fn no_small_player_is_an_error() {
        assert!(matches!(shapley_small(&game(&[3], 0, 2)), Err(IndexError::NoSmallPlayer(_))));
        assert!(shapley_small_dual(&game(&[3], 0, 2)).is_err());
    }

    #[test]
    fn dual_threshold_examples() {
        assert_eq!(dual_threshold(&game(&[2], 2, 4)), game(&[2], 2, 1));
        assert_eq!(dual_threshold(&game(&[], 5, 3)).threshold(), 3);
        let g = game(&[7, 3, 2], 4, 9);
        assert_eq!(dual_threshold(&dual_threshold(&g)), g);
    }

    #[test]
    fn aggregate_uses_efficiency() {
        let e = ShapleyRecursion::new();
        assert_eq!(e.aggregate_big(&game(&[2], 1, 2)), Exact::one());
        assert_eq!(e.aggregate_big(&game(&[3], 3, 6)), Exact::new(1, 4));
        assert_eq!(e.aggregate_big(&game(&[], 5, 3)), Exact::zero());
        assert_eq!(e.aggregate_big(&game(&[4], 0, 3)), Exact::one());
    }

    #[test]
    fn memo_is_shared_and_keyed_canonically() {
        let e = ShapleyRecursion::new();
        let a = e.small_forward(&game(&[9, 3], 4, 6)).unwrap();
        let n = e.forward_table().len();
        let b = e.small_forward(&game(&[6, 3], 4, 6)).unwrap();
        assert_eq!(a, b);
        assert_eq!(e.forward_table().len(), n);
    }

    #[test]
    fn deep_thresholds_do_not_overflow() {
        let g = game(&[], 3000, 1500);
        assert_eq!(shapley_small(&g).unwrap(), Exact::new(1, 3000));
    }
}
