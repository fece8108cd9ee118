//! Release gate: every acceptance criterion at its stated tolerance, one
//! PASS/FAIL/SKIP line each. The full-bounds conjecture scan is opt-in via
//! `WVG_ACCEPTANCE_FULL=1`; `WVG_ACCEPTANCE_ONLY=2,5` selects criteria.

mod common;

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use wvg_power::falsename::{
    all_profiles, apply_profile, big_pivot_probability, conjecture_scan, payoffs, pivot_survey, profile_bound_check,
    ConjectureOptions, ConjectureSpec, StrategyProfile,
};
use wvg_power::indices::{
    self, deegan_packel, deegan_packel_aggregate_big, dual_threshold, shapley_player, ShapleyRecursion,
};
use wvg_power::oracle::shapley_bruteforce;
use wvg_power::ratios::{self, banzhaf_family, family_game, ScanOptions, ScanSpec};
use wvg_power::{parse_game, AnyGame, Exact, Game, IndexKind, PlayerId, WeightedGame};

type Criterion = (u32, &'static str, fn() -> Outcome);

enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

/// Collects every failed expectation instead of stopping at the first.
#[derive(Default)]
struct Checks {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Checks {
    fn check(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }

    fn eq<T: PartialEq + std::fmt::Display>(&mut self, got: T, want: T, what: &str) {
        if got != want {
            self.failures.push(format!("{what}: got {got}, want {want}"));
        }
    }

    fn near(&mut self, got: f64, want: f64, tol: f64, what: &str) {
        if (got - want).abs() > tol {
            self.failures.push(format!("{what}: got {got}, want {want} ± {tol}"));
        }
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    fn outcome(self) -> Outcome {
        if self.failures.is_empty() {
            Outcome::Pass(self.notes.join("; "))
        } else {
            Outcome::Fail(self.failures.join("; "))
        }
    }
}

fn game(big: &[u64], m: u64, t: u64) -> Game {
    Game::new(big.to_vec(), m, t).expect("valid game")
}

fn ratio_of(g: &Game, kind: IndexKind) -> Exact {
    ratios::ratio_aggregate(&AnyGame::Base(g.clone()), kind).expect("ratio").ratio
}

fn oracle_equivalence() -> Outcome {
    let base = common::base_games_match_oracle();
    let generalized = common::generalized_games_match_oracle();
    let mut c = Checks::default();
    c.check(base > 5000, format!("only {base} base games"));
    c.note(format!("{base} base games and {generalized} generalized games exact"));
    c.outcome()
}

fn worked_examples() -> Outcome {
    let mut c = Checks::default();
    for k in 2..=6u64 {
        let g = game(&[k], k - 1, k);
        c.eq(shapley_player(&g, PlayerId::Big(0)).unwrap(), Exact::one(), &format!("A={{k}}, m=k-1, T=k: k={k} power"));
        c.eq(
            g.proportional(),
            Exact::new(1, 2) + Exact::new(1, 4 * k - 2),
            &format!("A={{k}}, m=k-1, T=k: k={k} proportion"),
        );
        let g = game(&[k], k, 2 * k);
        c.eq(shapley_player(&g, PlayerId::Big(0)).unwrap(), Exact::new(1, k + 1), &format!("A={{k}}, m=k, T=2k: k={k} power"));
        c.eq(g.proportional(), Exact::new(1, 2), &format!("A={{k}}, m=k, T=2k: k={k} proportion"));
    }
    // The weight-2 player against a_1/(m + Σa) = 2/(k+3).
    for (k, share) in [(5, Exact::new(1, 4)), (6, Exact::new(2, 9))] {
        let g = game(&[2, k], 1, k + 3);
        c.eq(shapley_player(&g, PlayerId::Big(1)).unwrap(), Exact::new(1, 3), &format!("A={{2,k}}: k={k} power"));
        c.eq(Exact::new(2, g.total_weight()), share, &format!("A={{2,k}}: k={k} share"));
    }
    let triple = game(&[3, 3, 3], 3, 12);
    c.eq(shapley_player(&triple, PlayerId::Big(0)).unwrap(), Exact::new(1, 6), "three equal bigs before");
    let prof: StrategyProfile = "3|1+1+1|1+1+1".parse().unwrap();
    c.eq(payoffs(&apply_profile(&triple, &prof).unwrap(), IndexKind::Shapley).unwrap()[0].clone(), Exact::new(1, 10), "three equal bigs after");
    for k in 2..=5u64 {
        let g = game(&[k, k], 0, k + 1);
        c.eq(shapley_player(&g, PlayerId::Big(0)).unwrap(), Exact::new(1, 2), &format!("two equal bigs k={k} before"));
        let prof = StrategyProfile(vec![
            wvg_power::falsename::Partition::new(vec![1; k as usize]).unwrap(),
            wvg_power::falsename::Partition::single(k),
        ]);
        let pays = payoffs(&apply_profile(&g, &prof).unwrap(), IndexKind::Shapley).unwrap();
        c.eq(pays[0].clone(), Exact::new(1, k + 1), &format!("two equal bigs k={k} after"));
    }
    c.eq(deegan_packel(&game(&[16], 16, 17), PlayerId::Big(0)).unwrap(), Exact::new(1, 2), "deegan-packel single big");
    c.eq(deegan_packel_aggregate_big(&game(&[8, 8], 16, 17)), Exact::new(431, 4293), "deegan-packel split big");
    let mut light_big = vec![101u64; 1000];
    light_big.push(99);
    let light = game(&light_big, 100, 101);
    c.eq(deegan_packel(&light, PlayerId::Big(1000)).unwrap(), Exact::new(33, 119), "deegan-packel light big");
    let s7 = parse_game("A=8,7;M=5,3;T=10;s=3").unwrap();
    let rec = ratios::ratio_aggregate(&s7, IndexKind::Shapley).unwrap();
    c.eq(rec.aggregate_big_power, Exact::new(2, 3), "generalized aggregate");
    c.eq(rec.proportional, Exact::new(15, 23), "generalized proportion");
    c.eq(rec.ratio, Exact::new(46, 45), "generalized ratio");
    c.note("all exact");
    c.outcome()
}

fn reduced_bounds() -> Outcome {
    let mut c = Checks::default();
    let spec = ScanSpec::base(15, 15, IndexKind::Shapley).with_bound_checks();
    let rep = ratios::scan(&spec, &ScanOptions::default()).expect("scan");
    let b = rep.state.bounds.clone().expect("bound summary");
    c.check(rep.complete, "scan incomplete");
    c.eq(b.shapley_ratio_violations, 0, "shapley ratio > 2");
    c.eq(b.deegan_packel_ratio_violations, 0, "deegan-packel ratio > 3");
    c.eq(b.individual_shapley_violations, 0, "individual shapley bound");
    let max = b.max_shapley_ratio.clone().expect("max");
    c.check(max >= Exact::new(185, 100), format!("max shapley ratio {max} < 1.85"));
    c.check(max >= Exact::new(13, 7), format!("max shapley ratio {max} below the k=7 family member 13/7"));
    c.eq(ratio_of(&game(&[7], 6, 7), IndexKind::Shapley), Exact::new(13, 7), "family k=7");
    c.check(b.max_deegan_packel_ratio.clone().is_some_and(|r| r <= Exact::from(3)), "dp max");
    c.note(format!(
        "{} instances, max shapley {} ({:.6}), max deegan-packel {}",
        b.instances,
        max,
        max.to_f64(),
        b.max_deegan_packel_ratio.unwrap()
    ));
    c.outcome()
}

fn banzhaf_unbounded() -> Outcome {
    let mut c = Checks::default();
    let recs = banzhaf_family(&[4, 16, 36, 64, 100]).unwrap();
    for kind in [IndexKind::BanzhafAbs, IndexKind::BanzhafNorm] {
        let rs: Vec<Exact> = recs.iter().filter(|r| r.index_kind == kind).map(|r| r.ratio.clone()).collect();
        c.check(rs.windows(2).all(|w| w[0] < w[1]), format!("{kind} ratios not strictly increasing"));
    }
    let g = AnyGame::Base(family_game(1600).unwrap());
    c.eq(g.proportional(), Exact::new(1, 21), "P at k=1600");
    let abs_big = indices::index_value(&g, PlayerId::Big(0), IndexKind::BanzhafAbs).unwrap();
    let norm_big = indices::index_value(&g, PlayerId::Big(0), IndexKind::BanzhafNorm).unwrap();
    let abs_small = indices::index_value(&g, PlayerId::Small(0), IndexKind::BanzhafAbs).unwrap();
    c.check(abs_big >= Exact::new(95, 100), format!("β′ big {}", abs_big.to_f64()));
    c.check(norm_big >= Exact::new(7, 10), format!("β big {}", norm_big.to_f64()));
    let rel = (abs_small.to_f64() - 3.52795e-33).abs() / 3.52795e-33;
    let all_small = &abs_small * Exact::from(g.small_players());
    c.check(
        rel <= 1e-3,
        format!(
            "β′ of one small player is {:.6e}, relative error {rel:.3e} against 3.52795e-33; \
             m·β′ (all {} small players together) is {:.6e}",
            abs_small.to_f64(),
            g.small_players(),
            all_small.to_f64()
        ),
    );
    let abs_ratio = &abs_big * Exact::from(21);
    let norm_ratio = &norm_big * Exact::from(21);
    c.check(abs_ratio >= Exact::from(14), "β′ ratio < 14");
    c.check(norm_ratio >= Exact::from(14), "β ratio < 14");
    c.note(format!(
        "k=1600: β′/P {:.6}, β/P {:.6}, β′ small {:.6e}",
        abs_ratio.to_f64(),
        norm_ratio.to_f64(),
        abs_small.to_f64()
    ));
    c.outcome()
}

const ORACLE_GUARD: u64 = 9;

fn conjecture_reduced() -> Outcome {
    let mut c = Checks::default();
    let spec = ConjectureSpec {
        oracle_max_players: ORACLE_GUARD,
        check_deegan_packel: true,
        ..ConjectureSpec::new(12, 12)
    };
    let rep = conjecture_scan(&spec, &ConjectureOptions::default()).expect("scan");
    let s = &rep.state;
    c.check(rep.complete, "scan incomplete");
    c.check(s.counterexample.is_none(), format!("counterexample {:?}", rep.counterexample_witness));
    let max = s.max.as_ref().expect("max").ratio.clone();
    c.check(max <= Exact::from(2), format!("max ratio {max}"));
    c.eq(s.shapley_payoff_bound_violations, 0, "shapley payoff bound");
    c.eq(s.deegan_packel_payoff_bound_violations, 0, "deegan-packel payoff bound");
    c.check(s.oracle_verified_games > 0, "nothing oracle-verified");
    c.note(format!(
        "{} games, {} pairs, max {}, min {}, oracle re-derived {} table games covering {} pairs with ≤ {ORACLE_GUARD} players",
        s.games_checked,
        s.pairs_checked,
        max,
        s.min.as_ref().unwrap().ratio,
        s.oracle_verified_games,
        s.oracle_verified_pairs
    ));
    c.outcome()
}

fn conjecture_full() -> Outcome {
    if std::env::var("WVG_ACCEPTANCE_FULL").as_deref() != Ok("1") {
        return Outcome::Skip("extended; set WVG_ACCEPTANCE_FULL=1".into());
    }
    let mut c = Checks::default();
    let spec = ConjectureSpec::new(25, 25);
    let rep = conjecture_scan(&spec, &ConjectureOptions::default()).expect("scan");
    let s = &rep.state;
    c.check(rep.complete, "scan incomplete");
    c.eq(s.games_checked, 5_833_920, "game count");
    c.eq(s.max.as_ref().unwrap().ratio.clone(), Exact::new(47, 24), "max ratio");
    c.eq(s.min.as_ref().unwrap().ratio.clone(), Exact::new(2, 25), "min ratio");
    let rows = s.histogram_rows();
    c.near(rows[10].2, 0.557635, 1e-3, "bin [1.0,1.1)");
    c.near(rows[9].2, 0.163138, 1e-3, "bin [0.9,1.0)");
    c.note(format!(
        "pairs {} (reference 1,246,727,916), raw profile pairs {}",
        s.pairs_checked, s.raw_profile_pairs
    ));
    c.outcome()
}

fn table_one() -> Outcome {
    let mut c = Checks::default();
    let rep = ratios::scan(&ScanSpec::generalized(3, 25, IndexKind::Shapley), &ScanOptions::default()).unwrap();
    let (max, min) = (rep.state.max.unwrap(), rep.state.min.unwrap());
    c.eq(rep.state.instance_count, 90_141, "s=3 instances");
    c.near(max.decimal(), 1.8585, 1e-3, "s=3 max");
    c.near(min.decimal(), 0.22705, 1e-3, "s=3 min");
    c.eq(max.game.to_string(), "A=22;M=3,3,3,3,3,3,3,3;T=22;s=3".to_string(), "s=3 max witness");
    c.eq(min.game.to_string(), "A=23;M=3,3,3,3,3,3,3,3;T=47;s=3".to_string(), "s=3 min witness");
    c.note(format!("s=3 max {} min {}", max.ratio, min.ratio));

    let rep = ratios::scan(&ScanSpec::generalized(11, 25, IndexKind::Shapley), &ScanOptions::default()).unwrap();
    let (max, min) = (rep.state.max.unwrap(), rep.state.min.unwrap());
    c.eq(rep.state.instance_count, 231, "s=11 instances");
    c.near(max.decimal(), 1.3939, 1e-3, "s=11 max");
    c.near(min.decimal(), 0.681159, 1e-3, "s=11 min");
    c.note(format!("s=11 max {} min {}", max.ratio, min.ratio));
    c.outcome()
}

fn property_suites() -> Outcome {
    let mut c = Checks::default();
    let rec = ShapleyRecursion::new();
    let mut games = 0u64;
    for big in wvg_power::falsename::big_multisets_below(16) {
        for m in 0..16u64 {
            if big.is_empty() && m == 0 {
                continue;
            }
            let probe = Game::new(big.clone(), m, 1).unwrap();
            for t in 1..=probe.total_weight() {
                let g = probe.with_threshold(t).unwrap();
                games += 1;
                let mut sum = Exact::zero();
                let mut prev: Option<(u64, Exact)> = None;
                for p in g.players() {
                    let v = shapley_player(&g, p).unwrap();
                    c.check(!v.is_negative(), format!("negative {g} {p}"));
                    let w = g.player_weight(p).unwrap();
                    if let Some((pw, pv)) = &prev {
                        if *pw == w && pv != &v {
                            c.check(false, format!("symmetry {g} {p}"));
                        }
                        if *pw > w && pv < &v {
                            c.check(false, format!("monotonicity {g} {p}"));
                        }
                    }
                    prev = Some((w, v.clone()));
                    let mult = if matches!(p, PlayerId::Small(_)) { m } else { 1 };
                    sum = sum + Exact::from(mult) * v;
                }
                c.eq(sum, Exact::one(), &format!("efficiency {g}"));
                if m > 0 {
                    let fwd = rec.small_forward(&g).unwrap();
                    c.eq(rec.small_dual(&g).unwrap(), fwd.clone(), &format!("recursion vs dual {g}"));
                    c.eq(rec.small(&dual_threshold(&g)).unwrap(), fwd, &format!("duality {g}"));
                }
            }
        }
    }

    let mut profiles = 0u64;
    for big in wvg_power::falsename::big_multisets_below(9) {
        for m in 0..4u64 {
            if big.is_empty() {
                continue;
            }
            let probe = Game::new(big.clone(), m, 1).unwrap();
            for t in 1..=probe.total_weight() {
                let g = probe.with_threshold(t).unwrap();
                for prof in all_profiles(g.big()) {
                    let r = profile_bound_check(&g, &prof, IndexKind::Shapley).unwrap();
                    profiles += 1;
                    for o in &r.owners {
                        c.check(o.holds, format!("split bound {g} {prof} owner {}", o.owner));
                    }
                    c.check(r.aggregate_holds == Some(true), format!("payoff bound {g} {prof}"));
                    let sg = apply_profile(&g, &prof).unwrap();
                    if sg.derived.player_count() <= 8 {
                        let brute: Exact = (0..sg.derived.big_count())
                            .map(|i| shapley_bruteforce(&sg.derived, PlayerId::Big(i)).unwrap())
                            .sum::<Exact>()
                            + if sg.derived.small_count() > sg.original_small {
                                Exact::from(sg.derived.small_count() - sg.original_small)
                                    * shapley_bruteforce(&sg.derived, PlayerId::SMALL).unwrap()
                            } else {
                                Exact::zero()
                            };
                        c.eq(r.after.clone(), brute, &format!("split payoff vs oracle {g} {prof}"));
                    }
                }
            }
        }
    }

    let survey = pivot_survey(25, 25);
    if survey.violations > 0 {
        c.note(format!(
            "FINDING: big pivotal probability below 1/2 on {} of {} games, e.g. {} at {}",
            survey.violations,
            survey.games_checked,
            survey.examples[0].0,
            survey.examples[0].1
        ));
    } else {
        c.note(format!(
            "big pivotal probability ≥ 1/2 on all {} games with m < T < Σ big (min {} at {})",
            survey.games_checked,
            survey.min_probability.clone().unwrap(),
            survey.min_witness.clone().unwrap()
        ));
    }
    c.eq(big_pivot_probability(&game(&[2, 2], 1, 3)), Exact::new(2, 3), "pivot example");
    c.note(format!("{games} games, {profiles} profiles"));
    c.outcome()
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        (1, "oracle equivalence", oracle_equivalence),
        (2, "worked examples", worked_examples),
        (3, "bounds on reduced scan", reduced_bounds),
        (4, "banzhaf unboundedness", banzhaf_unbounded),
        (5, "conjecture scan, reduced", conjecture_reduced),
        (6, "conjecture scan, full bounds", conjecture_full),
        (7, "generalized scans", table_one),
        (8, "property suites", property_suites),
    ];
    let only: Option<Vec<u32>> = std::env::var("WVG_ACCEPTANCE_ONLY")
        .ok()
        .map(|v| v.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    let mut failed = 0;
    for (n, name, f) in criteria {
        if only.as_ref().is_some_and(|o| !o.contains(&n)) {
            continue;
        }
        let started = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Outcome::Fail(format!("panicked: {msg}"))
        });
        let secs = started.elapsed().as_secs_f64();
        let (tag, detail) = match outcome {
            Outcome::Pass(d) => ("PASS", d),
            Outcome::Fail(d) => {
                failed += 1;
                ("FAIL", d)
            }
            Outcome::Skip(d) => ("SKIP", d),
        };
        println!("criterion {n} ({name}): {tag} [{secs:.1}s] {detail}");
    }
    if failed > 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
