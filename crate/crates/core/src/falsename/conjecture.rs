//! Exhaustive check that splitting never costs the strategic players more
//! than half of their combined Shapley-Shubik power.
//!
//! Every Shapley-Shubik value of an `n`-player game is a multiple of
//! `1 / lcm(1..n)`. With `L = lcm(1..n_max)` all values in the scan are
//! stored exactly as `u128` numerators over `L`, precomputed once per
//! (big multiset, unit count) for every threshold. Ratios are then compared
//! with integer arithmetic only.

use std::collections::{HashMap, HashSet};
use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::checkpoint::{self, Checkpoint, CheckpointError};
use crate::exact::{lcm_up_to, Exact};
use crate::falsename::{FalseNameGame, Partition, StrategyProfile};
use crate::indices::deegan_packel::deegan_packel_aggregate_big;
use crate::game::Game;
use crate::multiset::partitions_in_range;
use crate::oracle::pivot_counts_all_thresholds;
use crate::parallel::Workers;

const CHECKPOINT_KIND: &str = "conjecture_scan";
pub const HISTOGRAM_BINS: usize = 20;

#[derive(Debug, Error)]
pub enum ConjectureError {
    #[error("invalid conjecture scan: {0}")]
    InvalidSpec(String),
    #[error("fast table disagrees with the oracle on {0}")]
    OracleMismatch(String),
    #[error(transparent)]
    Checkpoint(#[from] CheckpointError),
}

/// Bounds of the scan; both are exclusive.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConjectureSpec {
    /// Non-strategic unit players: `1 ≤ m < max_small`.
    pub max_small: u64,
    /// Total strategic weight: `0 ≤ Σ a < max_big_sum`.
    pub max_big_sum: u64,
    /// Re-derive every table entry for games of at most this many players
    /// by permutation enumeration. `0` disables re-verification.
    #[serde(default)]
    pub oracle_max_players: u64,
    /// Also check the Deegan-Packel payoff bound on every game.
    #[serde(default)]
    pub check_deegan_packel: bool,
}

impl ConjectureSpec {
    pub fn new(max_small: u64, max_big_sum: u64) -> Self {
        ConjectureSpec {
            max_small,
            max_big_sum,
            oracle_max_players: 0,
            check_deegan_packel: false,
        }
    }

    fn max_players(&self) -> u64 {
        (self.max_small - 1) + (self.max_big_sum - 1)
    }

    pub fn validate(&self) -> Result<u128, ConjectureError> {
        if self.max_small < 2 || self.max_big_sum < 1 {
            return Err(ConjectureError::InvalidSpec(
                "need max_small ≥ 2 and max_big_sum ≥ 1".into(),
            ));
        }
        let n = self.max_players().max(1);
        lcm_up_to(n)
            .filter(|l| l.checked_mul(4 * u128::from(n.max(10))).is_some())
            .ok_or_else(|| {
                ConjectureError::InvalidSpec(format!("games with up to {n} players exceed the exact 128-bit path"))
            })
    }
}

#[derive(Debug, Clone)]
pub struct ConjectureOptions {
    pub workers: Option<usize>,
    pub checkpoint: Option<PathBuf>,
    /// Stop after this many further strategic multisets.
    pub stop_after_groups: Option<u64>,
    pub groups_per_chunk: usize,
}

impl Default for ConjectureOptions {
    fn default() -> Self {
        ConjectureOptions {
            workers: None,
            checkpoint: None,
            stop_after_groups: None,
            groups_per_chunk: 64,
        }
    }
}

/// A before/after ratio located by its position in the enumeration:
/// (strategic multiset, m, T, refined multiset).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatioPoint {
    pub ratio: Exact,
    pub before: Exact,
    pub after: Exact,
    pub ordinal: [u64; 4],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConjectureState {
    pub games_checked: u64,
    /// (game, distinct refined multiset) pairs with at least one strategic
    /// player.
    pub pairs_checked: u64,
    /// The same pairs counted per strategy profile rather than per refined
    /// multiset.
    pub raw_profile_pairs: u64,
    /// Bin `b` counts ratios in `[b/10, (b+1)/10)`; a ratio of exactly 2
    /// lands in the last bin.
    pub histogram: Vec<u64>,
    /// Pairs where nothing is left after splitting.
    pub zero_after_pairs: u64,
    pub max: Option<RatioPoint>,
    pub min: Option<RatioPoint>,
    /// First ratio above 2 in enumeration order.
    pub counterexample: Option<RatioPoint>,
    pub shapley_payoff_bound_violations: u64,
    pub deegan_packel_games_checked: u64,
    pub deegan_packel_payoff_bound_violations: u64,
    pub oracle_verified_games: u64,
    pub oracle_verified_pairs: u64,
}

impl Default for ConjectureState {
    fn default() -> Self {
        ConjectureState {
            games_checked: 0,
            pairs_checked: 0,
            raw_profile_pairs: 0,
            histogram: vec![0; HISTOGRAM_BINS],
            zero_after_pairs: 0,
            max: None,
            min: None,
            counterexample: None,
            shapley_payoff_bound_violations: 0,
            deegan_packel_games_checked: 0,
            deegan_packel_payoff_bound_violations: 0,
            oracle_verified_games: 0,
            oracle_verified_pairs: 0,
        }
    }
}

fn beats_max(p: &RatioPoint, cur: &Option<RatioPoint>) -> bool {
    cur.as_ref()
        .is_none_or(|c| p.ratio > c.ratio || (p.ratio == c.ratio && p.ordinal < c.ordinal))
}

fn beats_min(p: &RatioPoint, cur: &Option<RatioPoint>) -> bool {
    cur.as_ref()
        .is_none_or(|c| p.ratio < c.ratio || (p.ratio == c.ratio && p.ordinal > c.ordinal))
}

impl ConjectureState {
    /// Associative merge; the result does not depend on merge order.
    pub fn merge(&mut self, o: ConjectureState) {
        self.games_checked += o.games_checked;
        self.pairs_checked += o.pairs_checked;
        self.raw_profile_pairs += o.raw_profile_pairs;
        for (a, b) in self.histogram.iter_mut().zip(&o.histogram) {
            *a += b;
        }
        self.zero_after_pairs += o.zero_after_pairs;
        if let Some(p) = o.max {
            if beats_max(&p, &self.max) {
                self.max = Some(p);
            }
        }
        if let Some(p) = o.min {
            if beats_min(&p, &self.min) {
                self.min = Some(p);
            }
        }
        if let Some(p) = o.counterexample {
            if self.counterexample.as_ref().is_none_or(|c| p.ordinal < c.ordinal) {
                self.counterexample = Some(p);
            }
        }
        self.shapley_payoff_bound_violations += o.shapley_payoff_bound_violations;
        self.deegan_packel_games_checked += o.deegan_packel_games_checked;
        self.deegan_packel_payoff_bound_violations += o.deegan_packel_payoff_bound_violations;
        self.oracle_verified_games += o.oracle_verified_games;
        self.oracle_verified_pairs += o.oracle_verified_pairs;
    }

    pub fn histogram_total(&self) -> u64 {
        self.histogram.iter().sum()
    }

    /// `(bin_low, count, fraction)` per bin.
    pub fn histogram_rows(&self) -> Vec<(f64, u64, f64)> {
        let total = self.histogram_total().max(1) as f64;
        self.histogram
            .iter()
            .enumerate()
            .map(|(b, &c)| (b as f64 / 10.0, c, c as f64 / total))
            .collect()
    }
}

/// A ratio together with the game and a profile producing it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConjectureWitness {
    pub ratio: Exact,
    pub before: Exact,
    pub after: Exact,
    pub game: FalseNameGame,
    pub profile: StrategyProfile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjectureReport {
    pub spec: ConjectureSpec,
    pub complete: bool,
    pub groups_done: u64,
    pub groups_total: u64,
    pub max_witness: Option<ConjectureWitness>,
    pub min_witness: Option<ConjectureWitness>,
    pub counterexample_witness: Option<ConjectureWitness>,
    pub state: ConjectureState,
}

/// `a × b` as a (high, low) pair of 128-bit words.
fn mul_wide(a: u128, b: u128) -> (u128, u128) {
    const MASK: u128 = u64::MAX as u128;
    let (a1, a0) = (a >> 64, a & MASK);
    let (b1, b0) = (b >> 64, b & MASK);
    let p00 = a0 * b0;
    let p01 = a0 * b1;
    let p10 = a1 * b0;
    let p11 = a1 * b1;
    let mid = (p00 >> 64) + (p01 & MASK) + (p10 & MASK);
    let lo = (p00 & MASK) | (mid << 64);
    let hi = p11 + (p01 >> 64) + (p10 >> 64) + (mid >> 64);
    (hi, lo)
}

/// Compares `a/b` with `c/d` for positive denominators.
fn cmp_fraction(a: u128, b: u128, c: u128, d: u128) -> std::cmp::Ordering {
    mul_wide(a, d).cmp(&mul_wide(c, b))
}

/// Every strategic multiset of the scan with its derived data.
struct Universe {
    /// All partitions of `0..max_big_sum`, by sum then reverse-lex.
    parts: Vec<Vec<u64>>,
    /// Per partition: id of its multiset of parts ≥ 2, and its unit count.
    big_id: Vec<usize>,
    ones: Vec<u64>,
    /// Partition → global index, per sum.
    index: Vec<HashMap<Vec<u64>, usize>>,
    /// Number of partitions of every `n` up to the bound.
    partition_counts: Vec<u64>,
}

impl Universe {
    fn new(spec: &ConjectureSpec, bigs: &HashMap<Vec<u64>, usize>) -> Self {
        let mut parts = Vec::new();
        let mut index = Vec::new();
        let mut partition_counts = Vec::new();
        for s in 0..spec.max_big_sum {
            let ps = partitions_in_range(s, 1, s.max(1));
            partition_counts.push(ps.len() as u64);
            let mut map = HashMap::new();
            for p in ps {
                map.insert(p.clone(), parts.len());
                parts.push(p);
            }
            index.push(map);
        }
        let big_id = parts
            .iter()
            .map(|p| bigs[&p.iter().copied().filter(|&w| w >= 2).collect::<Vec<_>>()])
            .collect();
        let ones = parts.iter().map(|p| p.iter().filter(|&&w| w == 1).count() as u64).collect();
        Universe {
            parts,
            big_id,
            ones,
            index,
            partition_counts,
        }
    }

    /// Global indices of every distinct refinement of partition `ia`,
    /// ascending (the partition itself included).
    fn refinements(&self, ia: usize) -> Vec<usize> {
        let a = &self.parts[ia];
        let s: u64 = a.iter().sum();
        let mut distinct: Vec<(u64, usize)> = Vec::new();
        for &w in a {
            match distinct.last_mut() {
                Some((lw, c)) if *lw == w => *c += 1,
                _ => distinct.push((w, 1)),
            }
        }
        let mut merged: Vec<Vec<u64>> = vec![Vec::new()];
        for (w, c) in distinct {
            let options = partitions_in_range(w, 1, w);
            let mut combos: Vec<Vec<u64>> = Vec::new();
            multichoose(&options, c, 0, &mut Vec::new(), &mut combos);
            let mut next = HashSet::new();
            for prefix in &merged {
                for combo in &combos {
                    let mut v = prefix.clone();
                    v.extend_from_slice(combo);
                    v.sort_unstable_by(|x, y| y.cmp(x));
                    next.insert(v);
                }
            }
            merged = next.into_iter().collect();
        }
        let map = &self.index[s as usize];
        let mut out: Vec<usize> = merged.iter().map(|b| map[b]).collect();
        out.sort_unstable();
        out
    }

    /// Number of strategy profiles of partition `ia`.
    fn profile_count(&self, ia: usize) -> u64 {
        self.parts[ia].iter().map(|&w| self.partition_counts[w as usize]).product()
    }
}

/// All size-`k` multisets of `options` (by index, non-decreasing), each
/// flattened into the concatenation of its members.
fn multichoose(options: &[Vec<u64>], k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<u64>>) {
    if k == 0 {
        out.push(cur.iter().flat_map(|&i| options[i].iter().copied()).collect());
        return;
    }
    for i in start..options.len() {
        cur.push(i);
        multichoose(options, k - 1, i, cur, out);
        cur.pop();
    }
}

/// `X[big][u - 1][T - 1] = L · φ(unit player)` in the game with the given
/// big multiset and `u` unit players.
struct ValueTable {
    l: u128,
    rows: Vec<Vec<Vec<u128>>>,
}

impl ValueTable {
    fn build(spec: &ConjectureSpec, l: u128, bigs: &[Vec<u64>]) -> Self {
        let n_max = spec.max_players() as usize;
        let mut binom = vec![vec![0u128; n_max + 1]; n_max + 1];
        for n in 0..=n_max {
            binom[n][0] = 1;
            for k in 1..=n {
                binom[n][k] = binom[n - 1][k - 1] + if k < n { binom[n - 1][k] } else { 0 };
            }
        }
        // coef[n][s] = L · s!(n-1-s)!/n! = L / (n · C(n-1, s))
        let mut coef = vec![Vec::new(); n_max + 1];
        for n in 1..=n_max {
            coef[n] = (0..n)
                .map(|s| {
                    let d = n as u128 * binom[n - 1][s];
                    assert_eq!(l % d, 0, "lcm scaling must be exact");
                    l / d
                })
                .collect();
        }
        let rows = bigs
            .par_iter()
            .map(|big| {
                let b_sum: u64 = big.iter().sum();
                let r = big.len();
                // counts[size][weight] of sub-multisets of the bigs
                let mut counts = vec![vec![0u128; b_sum as usize + 1]; r + 1];
                counts[0][0] = 1;
                for (i, &w) in big.iter().enumerate() {
                    for size in (0..=i).rev() {
                        for wt in (0..=(b_sum - w) as usize).rev() {
                            let c = counts[size][wt];
                            if c != 0 {
                                counts[size + 1][wt + w as usize] += c;
                            }
                        }
                    }
                }
                let cells: Vec<(usize, usize, u128)> = counts
                    .iter()
                    .enumerate()
                    .flat_map(|(sz, row)| {
                        row.iter().enumerate().filter(|(_, &c)| c != 0).map(move |(wt, &c)| (sz, wt, c))
                    })
                    .collect();
                let u_max = (spec.max_small - 1) + (spec.max_big_sum - 1 - b_sum);
                (1..=u_max)
                    .map(|u| {
                        let n = r + u as usize;
                        let total = b_sum + u;
                        (1..=total)
                            .map(|t| {
                                let mut x = 0u128;
                                for &(sb, wb, c) in &cells {
                                    let wb = wb as u64;
                                    if wb > t - 1 {
                                        continue;
                                    }
                                    let k = t - 1 - wb;
                                    if k > u - 1 {
                                        continue;
                                    }
                                    x += c * binom[u as usize - 1][k as usize] * coef[n][sb + k as usize];
                                }
                                x
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        ValueTable { l, rows }
    }

    fn row(&self, big: usize, units: u64) -> &[u128] {
        &self.rows[big][units as usize - 1]
    }

    /// Re-derives every entry with at most `max_players` players from the
    /// permutation oracle. Returns the number of games checked.
    fn verify(&self, bigs: &[Vec<u64>], max_players: u64) -> Result<u64, ConjectureError> {
        let jobs: Vec<(usize, u64)> = bigs
            .iter()
            .enumerate()
            .flat_map(|(id, big)| {
                let rows = self.rows[id].len() as u64;
                (1..=rows)
                    .filter(move |&u| big.len() as u64 + u <= max_players)
                    .map(move |u| (id, u))
            })
            .collect();
        let checked: Vec<Result<u64, ConjectureError>> = jobs
            .par_iter()
            .map(|&(id, u)| {
                let mut weights = bigs[id].clone();
                weights.extend(std::iter::repeat_n(1, u as usize));
                let n = weights.len();
                let n_fact: u128 = (1..=n as u128).product();
                let pivots = pivot_counts_all_thresholds(&weights);
                let row = self.row(id, u);
                for (t, counts) in pivots.iter().enumerate() {
                    let unit = u128::from(counts[n - 1]);
                    if row[t] * n_fact != unit * self.l {
                        return Err(ConjectureError::OracleMismatch(format!(
                            "weights {weights:?}, T={}",
                            t + 1
                        )));
                    }
                }
                Ok(pivots.len() as u64)
            })
            .collect();
        checked.into_iter().sum()
    }
}

/// Per-worker accumulator for the hot loop; witnesses stay as scaled
/// integers until the group is done.
struct Local {
    state: ConjectureState,
    max: Option<(u128, u128, [u64; 4])>,
    min: Option<(u128, u128, [u64; 4])>,
    max_f: f64,
    min_f: f64,
}

impl Local {
    fn new() -> Self {
        Local {
            state: ConjectureState::default(),
            max: None,
            min: None,
            max_f: f64::NEG_INFINITY,
            min_f: f64::INFINITY,
        }
    }

    fn offer(&mut self, b: u128, a: u128, ordinal: [u64; 4]) {
        let r = b as f64 / a as f64;
        let slack = 1e-9 * r.abs().max(1e-300);
        if r >= self.max_f - slack {
            let better = match self.max {
                None => true,
                Some((mb, ma, mo)) => match cmp_fraction(b, a, mb, ma) {
                    std::cmp::Ordering::Greater => true,
                    std::cmp::Ordering::Equal => ordinal < mo,
                    std::cmp::Ordering::Less => false,
                },
            };
            if better {
                self.max = Some((b, a, ordinal));
                self.max_f = r;
            }
        }
        if r <= self.min_f + slack {
            let better = match self.min {
                None => true,
                Some((mb, ma, mo)) => match cmp_fraction(b, a, mb, ma) {
                    std::cmp::Ordering::Less => true,
                    std::cmp::Ordering::Equal => ordinal > mo,
                    std::cmp::Ordering::Greater => false,
                },
            };
            if better {
                self.min = Some((b, a, ordinal));
                self.min_f = r;
            }
        }
    }

    fn finish(mut self, l: u128) -> ConjectureState {
        let point = |(b, a, ordinal): (u128, u128, [u64; 4])| {
            let before = Exact::new(b, l);
            let after = Exact::new(a, l);
            RatioPoint {
                ratio: Exact::new(b, a),
                before,
                after,
                ordinal,
            }
        };
        self.state.max = self.max.map(point);
        self.state.min = self.min.map(point);
        self.state
    }
}

struct Scanner<'a> {
    spec: &'a ConjectureSpec,
    universe: &'a Universe,
    table: &'a ValueTable,
    abort: &'a AtomicBool,
}

impl Scanner<'_> {
    fn group(&self, ia: usize) -> ConjectureState {
        let u = self.universe;
        let l = self.table.l;
        let a_parts = &u.parts[ia];
        let s: u64 = a_parts.iter().sum();
        let mut local = Local::new();
        let refinements = if a_parts.is_empty() { Vec::new() } else { u.refinements(ia) };
        let profiles = u.profile_count(ia);
        for m in 1..self.spec.max_small {
            let total = s + m;
            local.state.games_checked += total;
            if a_parts.is_empty() {
                continue;
            }
            let m128 = u128::from(m);
            let row_a = self.table.row(u.big_id[ia], m + u.ones[ia]);
            let before: Vec<u128> = row_a.iter().map(|&x| l - m128 * x).collect();
            for (t, &b) in before.iter().enumerate() {
                if b * u128::from(total) > 2 * u128::from(s) * l {
                    local.state.shapley_payoff_bound_violations += 1;
                }
                if self.spec.check_deegan_packel {
                    let g = Game::new(
                        a_parts.iter().copied().filter(|&w| w >= 2).collect(),
                        m + u.ones[ia],
                        t as u64 + 1,
                    )
                    .expect("valid game");
                    let rho_small = if g.small_count() > 0 {
                        (Exact::one() - deegan_packel_aggregate_big(&g)) / Exact::from(g.small_count())
                    } else {
                        Exact::zero()
                    };
                    let strategic = Exact::one() - Exact::from(m) * rho_small;
                    local.state.deegan_packel_games_checked += 1;
                    if strategic > Exact::from(3) * Exact::new(s, total) {
                        local.state.deegan_packel_payoff_bound_violations += 1;
                    }
                }
            }
            local.state.pairs_checked += refinements.len() as u64 * total;
            local.state.raw_profile_pairs += profiles * total;
            for &ib in &refinements {
                if self.spec.oracle_max_players > 0 && u.parts[ib].len() as u64 + m <= self.spec.oracle_max_players {
                    local.state.oracle_verified_pairs += total;
                }
                let row_b = self.table.row(u.big_id[ib], m + u.ones[ib]);
                for (t, (&b, &x)) in before.iter().zip(row_b).enumerate() {
                    let a = l - m128 * x;
                    let ordinal = [ia as u64, m, t as u64 + 1, ib as u64];
                    if a == 0 {
                        local.state.zero_after_pairs += 1;
                        if b > 0 {
                            self.flag(&mut local.state, b, 0, ordinal);
                        }
                        continue;
                    }
                    if b > 2 * a {
                        self.flag(&mut local.state, b, a, ordinal);
                        continue;
                    }
                    let ten_b = 10 * b;
                    let mut q = (ten_b as f64 / a as f64) as u128;
                    while q > 0 && q * a > ten_b {
                        q -= 1;
                    }
                    while (q + 1) * a <= ten_b {
                        q += 1;
                    }
                    local.state.histogram[(q as usize).min(HISTOGRAM_BINS - 1)] += 1;
                    local.offer(b, a, ordinal);
                }
            }
        }
        local.finish(l)
    }

    fn flag(&self, state: &mut ConjectureState, b: u128, a: u128, ordinal: [u64; 4]) {
        let l = self.table.l;
        let point = RatioPoint {
            ratio: if a == 0 { Exact::from_integer(b) } else { Exact::new(b, a) },
            before: Exact::new(b, l),
            after: Exact::new(a, l),
            ordinal,
        };
        if state.counterexample.as_ref().is_none_or(|c| ordinal < c.ordinal) {
            state.counterexample = Some(point);
        }
        self.abort.store(true, Ordering::Relaxed);
    }
}

/// Assigns the parts of `refined` to the parts of `original` so that each
/// original part is partitioned exactly.
fn profile_for(original: &[u64], refined: &[u64]) -> Option<StrategyProfile> {
    fn fill(target: u64, max_part: u64, pool: &mut Vec<(u64, u64)>, cur: &mut Vec<u64>) -> Vec<Vec<u64>> {
        if target == 0 {
            return vec![cur.clone()];
        }
        let mut out = Vec::new();
        for i in 0..pool.len() {
            let (w, c) = pool[i];
            if c == 0 || w > target || w > max_part {
                continue;
            }
            pool[i].1 -= 1;
            cur.push(w);
            out.extend(fill(target - w, w, pool, cur));
            cur.pop();
            pool[i].1 += 1;
        }
        out
    }
    fn assign(original: &[u64], pool: &mut Vec<(u64, u64)>, acc: &mut Vec<Vec<u64>>) -> bool {
        let Some((&first, rest)) = original.split_first() else {
            return pool.iter().all(|&(_, c)| c == 0);
        };
        for choice in fill(first, first, pool, &mut Vec::new()) {
            for &w in &choice {
                pool.iter_mut().find(|p| p.0 == w).unwrap().1 -= 1;
            }
            acc.push(choice.clone());
            if assign(rest, pool, acc) {
                return true;
            }
            acc.pop();
            for &w in &choice {
                pool.iter_mut().find(|p| p.0 == w).unwrap().1 += 1;
            }
        }
        false
    }
    let mut pool: Vec<(u64, u64)> = Vec::new();
    for &w in refined {
        match pool.iter_mut().find(|p| p.0 == w) {
            Some(p) => p.1 += 1,
            None => pool.push((w, 1)),
        }
    }
    let mut acc = Vec::new();
    if !assign(original, &mut pool, &mut acc) {
        return None;
    }
    Some(StrategyProfile(acc.into_iter().map(|p| Partition::new(p).expect("non-empty")).collect()))
}

fn witness(universe: &Universe, p: &RatioPoint) -> ConjectureWitness {
    let [ia, m, t, ib] = p.ordinal;
    let a = &universe.parts[ia as usize];
    let b = &universe.parts[ib as usize];
    ConjectureWitness {
        ratio: p.ratio.clone(),
        before: p.before.clone(),
        after: p.after.clone(),
        game: FalseNameGame::new(a.clone(), m, t).expect("valid witness game"),
        profile: profile_for(a, b).expect("refinement has a profile"),
    }
}

/// Runs (or resumes) the exhaustive scan. Stops early, with the witness in
/// the report, as soon as a chunk contains a ratio above 2.
pub fn conjecture_scan(spec: &ConjectureSpec, opts: &ConjectureOptions) -> Result<ConjectureReport, ConjectureError> {
    let l = spec.validate()?;
    let workers = Workers::new(opts.workers);

    let bigs: Vec<Vec<u64>> = (0..spec.max_big_sum).flat_map(|n| partitions_in_range(n, 2, n.max(2))).collect();
    let big_index: HashMap<Vec<u64>, usize> = bigs.iter().cloned().enumerate().map(|(i, b)| (b, i)).collect();
    let universe = Universe::new(spec, &big_index);
    let groups_total = universe.parts.len() as u64;

    let mut state = ConjectureState::default();
    let mut next = 0u64;
    if let Some(path) = &opts.checkpoint {
        if let Some(cp) = checkpoint::load::<ConjectureSpec, ConjectureState>(path)? {
            cp.ensure_matches(path, CHECKPOINT_KIND, spec)?;
            state = cp.state;
            next = cp.next_group;
        }
    }

    let table = workers.install(|| ValueTable::build(spec, l, &bigs));
    if spec.oracle_max_players > 0 && next == 0 {
        state.oracle_verified_games = workers.install(|| table.verify(&bigs, spec.oracle_max_players))?;
    }

    let abort = AtomicBool::new(state.counterexample.is_some());
    let scanner = Scanner {
        spec,
        universe: &universe,
        table: &table,
        abort: &abort,
    };
    let stop = opts
        .stop_after_groups
        .map_or(groups_total, |n| next.saturating_add(n).min(groups_total));
    let chunk = opts.groups_per_chunk.max(1) as u64;
    while next < stop && !abort.load(Ordering::Relaxed) {
        let end = (next + chunk).min(stop);
        let parts: Vec<ConjectureState> =
            workers.install(|| (next..end).into_par_iter().map(|ia| scanner.group(ia as usize)).collect());
        for p in parts {
            state.merge(p);
        }
        next = end;
        if let Some(path) = &opts.checkpoint {
            let cp = Checkpoint::new(CHECKPOINT_KIND, spec.clone(), next, 0, state.clone());
            checkpoint::write_atomic(path, &cp)?;
        }
    }

    Ok(ConjectureReport {
        spec: spec.clone(),
        complete: next == groups_total && state.counterexample.is_none(),
        groups_done: next,
        groups_total,
        max_witness: state.max.as_ref().map(|p| witness(&universe, p)),
        min_witness: state.min.as_ref().map(|p| witness(&universe, p)),
        counterexample_witness: state.counterexample.as_ref().map(|p| witness(&universe, p)),
        state,
    })
}
