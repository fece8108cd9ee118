//! `wvg`: power indices, ratio scans and split-game experiments for weighted
//! voting games.

mod output;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use wvg_power::falsename::{conjecture_scan, ConjectureOptions, ConjectureReport, ConjectureSpec};
use wvg_power::indices::{self, ap_count};
use wvg_power::oracle;
use wvg_power::ratios::{self, banzhaf_family, check_bounds, ratio_aggregate, ScanOptions, ScanSpec};
use wvg_power::{parse_game, AnyGame, Exact, IndexKind, PlayerId, WeightedGame};

use output::Sink;

const EXIT_INVALID: u8 = 2;
const EXIT_COUNTEREXAMPLE: u8 = 3;

#[derive(Parser)]
#[command(name = "wvg", version, about = "Exact power indices for weighted voting games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Write results to this file instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Aligned tables and indented JSON instead of JSON lines.
    #[arg(long, global = true)]
    pretty: bool,
    /// Progress and timing on standard error.
    #[arg(long, short, global = true)]
    verbose: bool,
    /// Worker threads for scans (default: available parallelism).
    #[arg(long, global = true, env = "WVG_WORKERS")]
    workers: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Engine {
    Fast,
    Oracle,
    /// Run both and fail unless they agree.
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Index value of one player, or of every player class.
    Index {
        #[arg(long)]
        game: String,
        #[arg(long, default_value = "shapley")]
        kind: IndexKind,
        /// `big:<i>` or `small`; all players when omitted.
        #[arg(long)]
        player: Option<String>,
        #[arg(long, value_enum, default_value = "fast")]
        engine: Engine,
    },
    /// Aggregate big-player power against the big players' weight share.
    Ratio {
        #[arg(long)]
        game: String,
        #[arg(long, default_value = "shapley")]
        kind: IndexKind,
        /// Also check the known upper bounds on this game.
        #[arg(long)]
        check_bounds: bool,
    },
    /// Extremal power/proportion ratios over every game within the bounds.
    Scan {
        #[arg(long, env = "WVG_MAX_BIG_SUM", default_value_t = 25)]
        max_big_sum: u64,
        #[arg(long, env = "WVG_MAX_SMALL", default_value_t = 25)]
        max_small: u64,
        /// Small weights in [s, 2s); with s > 1, Σ big < Σ small < max-small.
        #[arg(long, default_value_t = 1)]
        min_small: u64,
        #[arg(long, default_value = "shapley")]
        kind: IndexKind,
        #[arg(long)]
        check_bounds: bool,
        /// Per-instance rows, pipe-delimited.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Pause after this many groups; resume later from the checkpoint.
        #[arg(long)]
        stop_after_groups: Option<u64>,
    },
    /// Exhaustive check of the before/after split ratio.
    Conjecture {
        #[arg(long, env = "WVG_MAX_SMALL", default_value_t = 25)]
        max_small: u64,
        #[arg(long, env = "WVG_MAX_BIG_SUM", default_value_t = 25)]
        max_big_sum: u64,
        /// Histogram CSV (`bin_low,count,fraction`).
        #[arg(long)]
        histogram: Option<PathBuf>,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Re-derive table entries for games of at most this many players.
        #[arg(long, default_value_t = 0)]
        oracle_max_players: u64,
        #[arg(long)]
        check_deegan_packel: bool,
        #[arg(long)]
        stop_after_groups: Option<u64>,
    },
    /// The Banzhaf family with A={2k}, m=k^1.5, T=k+m/2.
    BanzhafFamily {
        #[arg(long, value_delimiter = ',', required = true)]
        ks: Vec<u64>,
        /// banzhaf-abs or banzhaf-norm.
        #[arg(long, default_value = "banzhaf-abs")]
        kind: IndexKind,
    },
    /// Number of all-pivotal coalitions.
    ApCount {
        #[arg(long)]
        game: String,
        #[arg(long, value_enum, default_value = "fast")]
        engine: Engine,
    },
}

#[derive(Debug)]
enum Failure {
    Invalid(String),
    Counterexample(String),
    Other(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Other(e.into())
    }
}

fn invalid(e: impl std::fmt::Display) -> Failure {
    Failure::Invalid(e.to_string())
}

fn game_arg(text: &str) -> Result<AnyGame, Failure> {
    parse_game(text).map_err(invalid)
}

fn exact_json(x: &Exact) -> (Value, Value) {
    (json!(x.to_string()), json!(x.to_f64()))
}

fn index_record(g: &AnyGame, kind: IndexKind, p: PlayerId, v: &Exact) -> Value {
    let (value, decimal) = exact_json(v);
    json!({
        "game": g.to_string(),
        "index_kind": kind,
        "player": p.to_string(),
        "value": value,
        "decimal": decimal,
    })
}

fn oracle_value(g: &AnyGame, p: PlayerId, kind: IndexKind) -> Result<Exact, Failure> {
    let v = match kind {
        IndexKind::Shapley => oracle::shapley_bruteforce(g, p),
        IndexKind::BanzhafAbs => oracle::banzhaf_abs_bruteforce(g, p),
        IndexKind::BanzhafNorm => oracle::banzhaf_norm_bruteforce(g, p),
        IndexKind::DeeganPackel => oracle::deegan_packel_bruteforce(g, p),
    };
    v.map_err(invalid)
}

fn evaluate(g: &AnyGame, p: PlayerId, kind: IndexKind, engine: Engine) -> Result<Exact, Failure> {
    let fast = || indices::index_value(g, p, kind).map_err(invalid);
    match engine {
        Engine::Fast => fast(),
        Engine::Oracle => oracle_value(g, p, kind),
        Engine::Both => {
            let (f, o) = (fast()?, oracle_value(g, p, kind)?);
            if f != o {
                return Err(Failure::Other(anyhow::anyhow!("engines disagree on {g} {p}: fast {f}, oracle {o}")));
            }
            Ok(f)
        }
    }
}

/// One representative per player class: each big player and the first small.
fn class_players(g: &AnyGame) -> Vec<PlayerId> {
    let mut ps: Vec<PlayerId> = (0..g.big().len()).map(PlayerId::Big).collect();
    if g.small_players() > 0 {
        ps.push(PlayerId::Small(0));
    }
    ps
}

fn conjecture_json(rep: &ConjectureReport) -> Value {
    let mut v = serde_json::to_value(rep).expect("report serializes");
    v["state"]["histogram_fractions"] = json!(rep.state.histogram_rows().iter().map(|r| r.2).collect::<Vec<_>>());
    let witnesses = [
        ("max_witness", &rep.max_witness),
        ("min_witness", &rep.min_witness),
        ("counterexample_witness", &rep.counterexample_witness),
    ];
    for (key, w) in witnesses {
        if let Some(w) = w {
            v[key]["ratio_decimal"] = json!(w.ratio.to_f64());
        }
    }
    v
}

fn write_histogram(path: &Path, rep: &ConjectureReport) -> Result<(), Failure> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["bin_low", "count", "fraction"])?;
    for (low, count, fraction) in rep.state.histogram_rows() {
        w.write_record([format!("{low:.1}"), count.to_string(), format!("{fraction:.9}")])?;
    }
    w.flush()?;
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    let started = Instant::now();
    let verbose = cli.common.verbose;
    let mut sink = Sink::open(cli.common.out.as_deref(), cli.common.pretty)?;
    match cli.command {
        Command::Index {
            game,
            kind,
            player,
            engine,
        } => {
            let g = game_arg(&game)?;
            let players = match player {
                Some(p) => {
                    let p: PlayerId = p.parse().map_err(invalid)?;
                    g.player_weight(p).map_err(invalid)?;
                    vec![p]
                }
                None => class_players(&g),
            };
            let mut rows = Vec::new();
            for p in players {
                let v = evaluate(&g, p, kind, engine)?;
                rows.push(index_record(&g, kind, p, &v));
            }
            sink.records(&rows)?;
        }
        Command::Ratio {
            game,
            kind,
            check_bounds: bounds,
        } => {
            let g = game_arg(&game)?;
            let rec = ratio_aggregate(&g, kind).map_err(invalid)?;
            let mut v = serde_json::to_value(&rec)?;
            v["ratio_decimal"] = json!(rec.ratio.to_f64());
            if bounds {
                let AnyGame::Base(base) = &g else {
                    return Err(invalid("bound checks need unit small players"));
                };
                v["bounds"] = serde_json::to_value(check_bounds(base))?;
            }
            sink.document(&v)?;
        }
        Command::Scan {
            max_big_sum,
            max_small,
            min_small,
            kind,
            check_bounds: bounds,
            csv,
            checkpoint,
            stop_after_groups,
        } => {
            let mut spec = if min_small == 1 {
                ScanSpec::base(max_big_sum, max_small, kind)
            } else {
                ScanSpec::generalized(min_small, max_small, kind)
            };
            if min_small != 1 {
                spec.max_big_sum = max_big_sum.min(max_small);
            }
            spec.check_bounds = bounds;
            spec.validate().map_err(invalid)?;
            let opts = ScanOptions {
                workers: cli.common.workers,
                checkpoint,
                csv,
                stop_after_groups,
                ..Default::default()
            };
            let rep = ratios::scan(&spec, &opts)?;
            let mut v = serde_json::to_value(&rep)?;
            for key in ["max", "min"] {
                if let Some(e) = if key == "max" { &rep.state.max } else { &rep.state.min } {
                    v[key]["ratio_decimal"] = json!(e.decimal());
                }
            }
            sink.document(&v)?;
        }
        Command::Conjecture {
            max_small,
            max_big_sum,
            histogram,
            checkpoint,
            oracle_max_players,
            check_deegan_packel,
            stop_after_groups,
        } => {
            let spec = ConjectureSpec {
                max_small,
                max_big_sum,
                oracle_max_players,
                check_deegan_packel,
            };
            spec.validate().map_err(invalid)?;
            let opts = ConjectureOptions {
                workers: cli.common.workers,
                checkpoint,
                stop_after_groups,
                ..Default::default()
            };
            let rep = conjecture_scan(&spec, &opts)?;
            if let Some(path) = &histogram {
                write_histogram(path, &rep)?;
            }
            sink.document(&conjecture_json(&rep))?;
            if let Some(w) = &rep.counterexample_witness {
                sink.finish()?;
                return Err(Failure::Counterexample(format!("{} prof={} ratio={}", w.game, w.profile, w.ratio)));
            }
        }
        Command::BanzhafFamily { ks, kind } => {
            if !matches!(kind, IndexKind::BanzhafAbs | IndexKind::BanzhafNorm) {
                return Err(invalid(format!("{kind} is not a Banzhaf index")));
            }
            let recs = banzhaf_family(&ks).map_err(invalid)?;
            let rows: Vec<Value> = recs
                .iter()
                .filter(|r| r.index_kind == kind)
                .map(|r| {
                    let mut v = serde_json::to_value(r).expect("record serializes");
                    v["ratio_decimal"] = json!(r.ratio.to_f64());
                    v
                })
                .collect();
            sink.records(&rows)?;
        }
        Command::ApCount { game, engine } => {
            let g = game_arg(&game)?;
            let AnyGame::Base(base) = &g else {
                return Err(invalid("all-pivotal counting needs unit small players"));
            };
            let fast = || ap_count(base).to_string();
            let brute = || -> Result<String, Failure> {
                Ok(oracle::all_pivotal_enumerate(base).map_err(invalid)?.len().to_string())
            };
            let count = match engine {
                Engine::Fast => fast(),
                Engine::Oracle => brute()?,
                Engine::Both => {
                    let (f, o) = (fast(), brute()?);
                    if f != o {
                        return Err(Failure::Other(anyhow::anyhow!("engines disagree on {g}: fast {f}, oracle {o}")));
                    }
                    f
                }
            };
            sink.document(&json!({
                "game": g.to_string(),
                "ap_count": count,
                "tuples": indices::ap_tuples(base).len(),
            }))?;
        }
    }
    sink.finish()?;
    if verbose {
        eprintln!("done in {:.3}s", started.elapsed().as_secs_f64());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INVALID } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INVALID)
        }
        Err(Failure::Counterexample(msg)) => {
            eprintln!("counterexample: {msg}");
            ExitCode::from(EXIT_COUNTEREXAMPLE)
        }
        Err(Failure::Other(e)) => {
            let _ = writeln!(std::io::stderr(), "error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
