//! Exhaustive fast-engine versus brute-force sweeps shared by the test targets.

use num_bigint::BigUint;
use wvg_power::exact::{factorial, Exact};
use wvg_power::indices::{
    ap_count, banzhaf_abs, banzhaf_norm, deegan_packel, dual_threshold, shapley_aggregate_big, shapley_player,
    ShapleyRecursion,
};
use wvg_power::oracle::{
    all_pivotal_enumerate, banzhaf_abs_bruteforce, banzhaf_norm_bruteforce, deegan_packel_bruteforce,
    pivot_counts_all_thresholds,
};
use wvg_power::{Game, GeneralizedGame, PlayerId, WeightedGame};

/// Multisets of integers ≥ 2 with sum ≤ `max_sum` and at most `max_len`
/// parts, non-increasing.
pub fn big_multisets(max_sum: u64, max_len: usize) -> Vec<Vec<u64>> {
    fn go(max_part: u64, left: u64, max_len: usize, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        out.push(cur.clone());
        if cur.len() == max_len {
            return;
        }
        for p in (2..=max_part.min(left)).rev() {
            cur.push(p);
            go(p, left - p, max_len, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(max_sum, max_sum, max_len, &mut Vec::new(), &mut out);
    out
}

/// Every base game with `r + m ≤ 8` and `Σ big ≤ 12`, all thresholds.
/// Panics on the first disagreement; returns the number of games.
pub fn base_games_match_oracle() -> u64 {
    let recursion = ShapleyRecursion::new();
    let mut games = 0u64;
    for big in big_multisets(12, 8) {
        let r = big.len() as u64;
        for m in 0..=(8 - r) {
            if r + m == 0 {
                continue;
            }
            let probe = Game::new(big.clone(), m, 1).unwrap();
            let weights = probe.slot_weights();
            let pivots = pivot_counts_all_thresholds(&weights);
            let n_fact = factorial(probe.player_count());
            for t in 1..=probe.total_weight() {
                games += 1;
                let g = Game::new(big.clone(), m, t).unwrap();
                let oracle_shapley =
                    |slot: usize| Exact::from_biguint(BigUint::from(pivots[t as usize - 1][slot]), n_fact.clone());

                let mut players: Vec<PlayerId> = (0..big.len()).map(PlayerId::Big).collect();
                if m > 0 {
                    players.push(PlayerId::SMALL);
                    let want = oracle_shapley(big.len());
                    assert_eq!(recursion.small_forward(&g).unwrap(), want, "forward {g}");
                    assert_eq!(recursion.small_dual(&g).unwrap(), want, "dual {g}");
                    assert_eq!(recursion.small(&dual_threshold(&g)).unwrap(), want, "duality {g}");
                }

                let mut shapley_sum = Exact::zero();
                let mut norm_sum = Exact::zero();
                let mut dp_sum = Exact::zero();
                for &p in &players {
                    let (slot, mult) = match p {
                        PlayerId::Big(i) => (i, 1),
                        PlayerId::Small(_) => (big.len(), m),
                    };
                    let sh = shapley_player(&g, p).unwrap();
                    assert_eq!(sh, oracle_shapley(slot), "shapley {g} {p}");
                    let ba = banzhaf_abs(&g, p).unwrap();
                    assert_eq!(ba, banzhaf_abs_bruteforce(&g, p).unwrap(), "banzhaf_abs {g} {p}");
                    let bn = banzhaf_norm(&g, p).unwrap();
                    assert_eq!(bn, banzhaf_norm_bruteforce(&g, p).unwrap(), "banzhaf_norm {g} {p}");
                    let dp = deegan_packel(&g, p).unwrap();
                    assert_eq!(dp, deegan_packel_bruteforce(&g, p).unwrap(), "deegan_packel {g} {p}");
                    if let PlayerId::Big(i) = p {
                        assert!(sh <= Exact::new(big[i], m + r), "individual bound {g} {p}");
                    }
                    shapley_sum = shapley_sum + Exact::from(mult) * sh;
                    norm_sum = norm_sum + Exact::from(mult) * bn;
                    dp_sum = dp_sum + Exact::from(mult) * dp;
                }
                assert_eq!(shapley_sum, Exact::one(), "shapley efficiency {g}");
                assert_eq!(norm_sum, Exact::one(), "banzhaf efficiency {g}");
                assert_eq!(dp_sum, Exact::one(), "deegan-packel efficiency {g}");

                let big_total: Exact = (0..big.len()).map(|i| shapley_player(&g, PlayerId::Big(i)).unwrap()).sum();
                assert_eq!(shapley_aggregate_big(&g), big_total, "aggregate {g}");
                if m > 0 {
                    assert_eq!(recursion.aggregate_big(&g), big_total, "recursive aggregate {g}");
                }

                let ap = all_pivotal_enumerate(&g).unwrap();
                assert_eq!(ap_count(&g), BigUint::from(ap.len()), "ap count {g}");
            }
        }
    }
    games
}

/// Generalized games with `s ∈ {2, 3}` against the oracle.
pub fn generalized_games_match_oracle() -> u64 {
    let mut games = 0u64;
    for s in 2..=3u64 {
        for big in big_multisets(14, 3).into_iter().filter(|b| b.iter().all(|&w| w >= 2 * s)) {
            for small in big_multisets(12, 4) {
                if small.iter().any(|&w| w < s || w >= 2 * s) || big.len() + small.len() == 0 {
                    continue;
                }
                let probe = GeneralizedGame::new(big.clone(), small.clone(), s, 1).unwrap();
                let pivots = pivot_counts_all_thresholds(&probe.slot_weights());
                let n_fact = factorial(probe.player_count());
                for t in 1..=probe.total_weight() {
                    games += 1;
                    let g = probe.with_threshold(t).unwrap();
                    let mut sum = Exact::zero();
                    for p in g.players() {
                        let slot = match p {
                            PlayerId::Big(i) => i,
                            PlayerId::Small(i) => big.len() + i,
                        };
                        let want = Exact::from_biguint(BigUint::from(pivots[t as usize - 1][slot]), n_fact.clone());
                        let sh = shapley_player(&g, p).unwrap();
                        assert_eq!(sh, want, "shapley {g} {p}");
                        assert_eq!(banzhaf_abs(&g, p).unwrap(), banzhaf_abs_bruteforce(&g, p).unwrap(), "{g} {p}");
                        assert_eq!(banzhaf_norm(&g, p).unwrap(), banzhaf_norm_bruteforce(&g, p).unwrap(), "{g} {p}");
                        sum = sum + sh;
                    }
                    assert_eq!(sum, Exact::one(), "efficiency {g}");
                }
            }
        }
    }
    games
}
