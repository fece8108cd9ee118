//! Exhaustive ratio scans over bounded parameter spaces.
//!
//! Games are grouped by their weights; each group is evaluated for every
//! threshold at once. Groups are processed in parallel chunks and merged in
//! enumeration order, so the report (and the optional per-instance CSV) is
//! identical for any worker count and across checkpoint/resume.

use std::fs::{File, OpenOptions};
use std::io::{Seek, SeekFrom};
use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::checkpoint::{self, Checkpoint};
use crate::exact::Exact;
use crate::game::{AnyGame, Game, GeneralizedGame, WeightedGame};
use crate::indices::{aggregate_big_sweep, counts::shapley_sweep, IndexKind};
use crate::multiset::multisets_below;
use crate::parallel::Workers;
use crate::ratios::RatioError;

const CHECKPOINT_KIND: &str = "ratio_scan";

/// Bounds of a scan. Both bounds are exclusive.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanSpec {
    /// Σ big stays below this.
    pub max_big_sum: u64,
    /// With `min_small = 1`, the number of small players stays below this;
    /// otherwise Σ small does.
    pub max_small: u64,
    /// `s`: small weights lie in `[s, 2s)`, big weights are at least `2s`.
    pub min_small: u64,
    pub kind: IndexKind,
    #[serde(default)]
    pub check_bounds: bool,
}

impl ScanSpec {
    pub fn base(max_big_sum: u64, max_small: u64, kind: IndexKind) -> Self {
        ScanSpec {
            max_big_sum,
            max_small,
            min_small: 1,
            kind,
            check_bounds: false,
        }
    }

    /// Games with `Σ big < Σ small < bound`, everything else skipped.
    pub fn generalized(min_small: u64, bound: u64, kind: IndexKind) -> Self {
        ScanSpec {
            max_big_sum: bound,
            max_small: bound,
            min_small,
            kind,
            check_bounds: false,
        }
    }

    pub fn with_bound_checks(mut self) -> Self {
        self.check_bounds = true;
        self
    }

    pub fn validate(&self) -> Result<(), RatioError> {
        if self.max_big_sum == 0 || self.max_small == 0 {
            return Err(RatioError::InvalidScan("bounds must be at least 1".into()));
        }
        if self.min_small == 0 {
            return Err(RatioError::InvalidScan("minimum small weight must be at least 1".into()));
        }
        if self.min_small > 1 && self.kind == IndexKind::DeeganPackel {
            return Err(RatioError::InvalidScan(
                "deegan_packel scans need unit small players (s = 1)".into(),
            ));
        }
        if self.min_small > 1 && self.check_bounds {
            return Err(RatioError::InvalidScan("bound checks need unit small players (s = 1)".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct ScanOptions {
    pub workers: Option<usize>,
    /// Read on start (if present) and rewritten after every chunk.
    pub checkpoint: Option<PathBuf>,
    /// Pipe-delimited per-instance rows.
    pub csv: Option<PathBuf>,
    /// Stop after this many further groups, leaving an incomplete report.
    pub stop_after_groups: Option<u64>,
    pub groups_per_chunk: usize,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            workers: None,
            checkpoint: None,
            csv: None,
            stop_after_groups: None,
            groups_per_chunk: 256,
        }
    }
}

/// An extremal ratio and the first (maximum) or last (minimum) game in
/// enumeration order attaining it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Extremum {
    pub ratio: Exact,
    pub game: AnyGame,
    /// Position in the enumeration: (big multiset, small part, threshold).
    pub ordinal: [u64; 3],
}

impl Extremum {
    pub fn decimal(&self) -> f64 {
        self.ratio.to_f64()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub ordinal: [u64; 3],
    pub game: Game,
    pub check: String,
}

/// Tallies of the proven bounds over every scanned instance.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundSummary {
    pub instances: u64,
    pub shapley_ratio_violations: u64,
    pub deegan_packel_ratio_violations: u64,
    pub individual_shapley_violations: u64,
    pub max_shapley_ratio: Option<Exact>,
    pub max_deegan_packel_ratio: Option<Exact>,
    pub first_violation: Option<Violation>,
}

impl BoundSummary {
    pub fn violations(&self) -> u64 {
        self.shapley_ratio_violations + self.deegan_packel_ratio_violations + self.individual_shapley_violations
    }

    fn merge(&mut self, other: BoundSummary) {
        self.instances += other.instances;
        self.shapley_ratio_violations += other.shapley_ratio_violations;
        self.deegan_packel_ratio_violations += other.deegan_packel_ratio_violations;
        self.individual_shapley_violations += other.individual_shapley_violations;
        self.max_shapley_ratio = max_opt(self.max_shapley_ratio.take(), other.max_shapley_ratio);
        self.max_deegan_packel_ratio = max_opt(self.max_deegan_packel_ratio.take(), other.max_deegan_packel_ratio);
        self.first_violation = match (self.first_violation.take(), other.first_violation) {
            (Some(a), Some(b)) => Some(if b.ordinal < a.ordinal { b } else { a }),
            (a, b) => a.or(b),
        };
    }
}

fn max_opt(a: Option<Exact>, b: Option<Exact>) -> Option<Exact> {
    match (a, b) {
        (Some(a), Some(b)) => Some(a.max(b)),
        (a, b) => a.or(b),
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanState {
    pub instance_count: u64,
    /// Instances outside the admissible region (generalized scans only).
    pub skipped_count: u64,
    pub max: Option<Extremum>,
    pub min: Option<Extremum>,
    pub bounds: Option<BoundSummary>,
}

fn beats_max(ratio: &Exact, ordinal: [u64; 3], cur: &Option<Extremum>) -> bool {
    match cur {
        None => true,
        Some(e) => ratio > &e.ratio || (ratio == &e.ratio && ordinal < e.ordinal),
    }
}

fn beats_min(ratio: &Exact, ordinal: [u64; 3], cur: &Option<Extremum>) -> bool {
    match cur {
        None => true,
        Some(e) => ratio < &e.ratio || (ratio == &e.ratio && ordinal > e.ordinal),
    }
}

impl ScanState {
    fn offer(&mut self, ratio: &Exact, ordinal: [u64; 3], game: impl Fn() -> AnyGame) {
        if beats_max(ratio, ordinal, &self.max) {
            self.max = Some(Extremum {
                ratio: ratio.clone(),
                game: game(),
                ordinal,
            });
        }
        if beats_min(ratio, ordinal, &self.min) {
            self.min = Some(Extremum {
                ratio: ratio.clone(),
                game: game(),
                ordinal,
            });
        }
    }

    /// Associative merge; the result does not depend on merge order.
    pub fn merge(&mut self, other: ScanState) {
        self.instance_count += other.instance_count;
        self.skipped_count += other.skipped_count;
        if let Some(e) = other.max {
            if beats_max(&e.ratio, e.ordinal, &self.max) {
                self.max = Some(e);
            }
        }
        if let Some(e) = other.min {
            if beats_min(&e.ratio, e.ordinal, &self.min) {
                self.min = Some(e);
            }
        }
        self.bounds = match (self.bounds.take(), other.bounds) {
            (Some(mut a), Some(b)) => {
                a.merge(b);
                Some(a)
            }
            (a, b) => a.or(b),
        };
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanReport {
    pub spec: ScanSpec,
    pub complete: bool,
    pub groups_done: u64,
    pub groups_total: u64,
    #[serde(flatten)]
    pub state: ScanState,
}

#[derive(Debug, Clone)]
enum SmallPart {
    Count(u64),
    Weights(Vec<u64>),
}

/// All games sharing big weights and small part; one per threshold.
#[derive(Debug, Clone)]
struct Group {
    a_idx: u64,
    b_idx: u64,
    big: Vec<u64>,
    small: SmallPart,
}

impl Group {
    fn game(&self, spec: &ScanSpec, threshold: u64) -> AnyGame {
        match &self.small {
            SmallPart::Count(m) => Game::new(self.big.clone(), *m, threshold).expect("valid scan game").into(),
            SmallPart::Weights(w) => GeneralizedGame::new(self.big.clone(), w.clone(), spec.min_small, threshold)
                .expect("valid scan game")
                .into(),
        }
    }

    fn small_label(&self) -> String {
        match &self.small {
            SmallPart::Count(m) => format!("m={m}"),
            SmallPart::Weights(w) => format!("M={}", join(w)),
        }
    }
}

fn join(w: &[u64]) -> String {
    w.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

fn groups(spec: &ScanSpec) -> Vec<Group> {
    let s = spec.min_small;
    let bigs: Vec<Vec<u64>> = multisets_below(spec.max_big_sum, 2 * s, u64::MAX)
        .into_iter()
        .filter(|a| !a.is_empty())
        .collect();
    let mut out = Vec::new();
    if s == 1 {
        for (a_idx, big) in bigs.iter().enumerate() {
            for m in 0..spec.max_small {
                out.push(Group {
                    a_idx: a_idx as u64,
                    b_idx: m,
                    big: big.clone(),
                    small: SmallPart::Count(m),
                });
            }
        }
    } else {
        let smalls: Vec<Vec<u64>> = multisets_below(spec.max_small, s, 2 * s - 1)
            .into_iter()
            .filter(|m| !m.is_empty())
            .collect();
        for (a_idx, big) in bigs.iter().enumerate() {
            for (b_idx, small) in smalls.iter().enumerate() {
                out.push(Group {
                    a_idx: a_idx as u64,
                    b_idx: b_idx as u64,
                    big: big.clone(),
                    small: SmallPart::Weights(small.clone()),
                });
            }
        }
    }
    out
}

/// Number of weight groups the scan enumerates.
pub fn group_count(spec: &ScanSpec) -> u64 {
    groups(spec).len() as u64
}

struct GroupResult {
    state: ScanState,
    rows: Vec<[String; 6]>,
}

fn evaluate(spec: &ScanSpec, group: &Group, want_rows: bool) -> Result<GroupResult, RatioError> {
    let probe = group.game(spec, 1);
    let total = probe.total_weight();
    let mut state = ScanState::default();
    if spec.check_bounds {
        state.bounds = Some(BoundSummary::default());
    }
    if let SmallPart::Weights(w) = &group.small {
        if probe.big_sum() >= w.iter().sum::<u64>() {
            state.skipped_count = total;
            return Ok(GroupResult { state, rows: Vec::new() });
        }
    }
    let power = aggregate_big_sweep(&probe, spec.kind)?;
    let p = probe.proportional();
    let mut rows = Vec::new();
    let big_label = join(&group.big);
    let small_label = group.small_label();
    let ratios: Vec<Exact> = power.iter().map(|v| v / &p).collect();
    for t in 1..=total {
        let ratio = &ratios[t as usize - 1];
        state.instance_count += 1;
        state.offer(ratio, [group.a_idx, group.b_idx, t], || group.game(spec, t));
        if want_rows {
            rows.push([
                big_label.clone(),
                small_label.clone(),
                t.to_string(),
                ratio.numer().to_string(),
                ratio.denom().to_string(),
                format!("{:.9}", ratio.to_f64()),
            ]);
        }
    }
    if spec.check_bounds {
        state.bounds = Some(check_group_bounds(spec, group, &probe, &ratios)?);
    }
    Ok(GroupResult { state, rows })
}

fn check_group_bounds(
    spec: &ScanSpec,
    group: &Group,
    probe: &AnyGame,
    ratios: &[Exact],
) -> Result<BoundSummary, RatioError> {
    let p = probe.proportional();
    let sweep_ratios = |kind: IndexKind| -> Result<Vec<Exact>, RatioError> {
        if kind == spec.kind {
            Ok(ratios.to_vec())
        } else {
            Ok(aggregate_big_sweep(probe, kind)?.into_iter().map(|v| v / &p).collect())
        }
    };
    let shapley = sweep_ratios(IndexKind::Shapley)?;
    let dp = sweep_ratios(IndexKind::DeeganPackel)?;
    let players = probe.player_count();
    let mut classes: Vec<(u64, Vec<Exact>, Exact)> = Vec::new();
    for &w in probe.big() {
        if classes.last().map(|c| c.0) != Some(w) {
            classes.push((w, shapley_sweep(probe, w), Exact::new(w, players)));
        }
    }

    let two = Exact::from(2);
    let three = Exact::from(3);
    let mut b = BoundSummary::default();
    let note = |b: &mut BoundSummary, t: u64, check: String| {
        if b.first_violation.is_none() {
            let game = match group.game(spec, t) {
                AnyGame::Base(g) => g,
                AnyGame::Generalized(_) => unreachable!("bound checks run on base games"),
            };
            b.first_violation = Some(Violation {
                ordinal: [group.a_idx, group.b_idx, t],
                game,
                check,
            });
        }
    };
    for t in 1..=probe.total_weight() {
        let i = t as usize - 1;
        b.instances += 1;
        if shapley[i] > two {
            b.shapley_ratio_violations += 1;
            note(&mut b, t, format!("shapley ratio {} > 2", shapley[i]));
        }
        if dp[i] > three {
            b.deegan_packel_ratio_violations += 1;
            note(&mut b, t, format!("deegan_packel ratio {} > 3", dp[i]));
        }
        for (w, sweep, bound) in &classes {
            if &sweep[i] > bound {
                b.individual_shapley_violations += 1;
                note(&mut b, t, format!("shapley of weight {w}: {} > {bound}", sweep[i]));
            }
        }
        b.max_shapley_ratio = max_opt(b.max_shapley_ratio.take(), Some(shapley[i].clone()));
        b.max_deegan_packel_ratio = max_opt(b.max_deegan_packel_ratio.take(), Some(dp[i].clone()));
    }
    Ok(b)
}

struct CsvSink {
    writer: csv::Writer<File>,
}

impl CsvSink {
    fn open(path: &PathBuf, resume_bytes: Option<u64>) -> Result<Self, RatioError> {
        let file = match resume_bytes {
            Some(bytes) => {
                let mut f = OpenOptions::new().read(true).write(true).create(true).truncate(false).open(path)?;
                f.set_len(bytes)?;
                f.seek(SeekFrom::End(0))?;
                f
            }
            None => File::create(path)?,
        };
        let mut writer = csv::WriterBuilder::new().delimiter(b'|').has_headers(false).from_writer(file);
        if resume_bytes.is_none() {
            writer.write_record(["big_weights", "small_spec", "T", "ratio_num", "ratio_den", "ratio_decimal"])?;
        }
        Ok(CsvSink { writer })
    }

    fn write(&mut self, rows: &[[String; 6]]) -> Result<(), RatioError> {
        for r in rows {
            self.writer.write_record(r)?;
        }
        Ok(())
    }

    fn committed_bytes(&mut self) -> Result<u64, RatioError> {
        self.writer.flush()?;
        Ok(self.writer.get_ref().metadata()?.len())
    }
}

/// Runs (or resumes) a scan. The report is the same however the run is
/// split across invocations.
pub fn scan(spec: &ScanSpec, opts: &ScanOptions) -> Result<ScanReport, RatioError> {
    spec.validate()?;
    let groups = groups(spec);
    let groups_total = groups.len() as u64;

    let mut state = ScanState::default();
    if spec.check_bounds {
        state.bounds = Some(BoundSummary::default());
    }
    let mut next = 0u64;
    let mut resume_bytes = None;
    if let Some(path) = &opts.checkpoint {
        if let Some(cp) = checkpoint::load::<ScanSpec, ScanState>(path)? {
            cp.ensure_matches(path, CHECKPOINT_KIND, spec)?;
            state = cp.state;
            next = cp.next_group;
            resume_bytes = Some(cp.csv_bytes);
        }
    }
    let mut sink = match &opts.csv {
        Some(path) => Some(CsvSink::open(path, resume_bytes)?),
        None => None,
    };
    let mut csv_bytes = match &mut sink {
        Some(s) => s.committed_bytes()?,
        None => 0,
    };

    let stop = opts
        .stop_after_groups
        .map_or(groups_total, |n| next.saturating_add(n).min(groups_total));
    let workers = Workers::new(opts.workers);
    let chunk = opts.groups_per_chunk.max(1) as u64;
    while next < stop {
        let end = (next + chunk).min(stop);
        let slice = &groups[next as usize..end as usize];
        let want_rows = sink.is_some();
        let results: Vec<Result<GroupResult, RatioError>> =
            workers.install(|| slice.par_iter().map(|g| evaluate(spec, g, want_rows)).collect());
        for r in results {
            let r = r?;
            if let Some(s) = &mut sink {
                s.write(&r.rows)?;
            }
            state.merge(r.state);
        }
        if let Some(s) = &mut sink {
            csv_bytes = s.committed_bytes()?;
        }
        next = end;
        if let Some(path) = &opts.checkpoint {
            let cp = Checkpoint::new(CHECKPOINT_KIND, spec.clone(), next, csv_bytes, state.clone());
            checkpoint::write_atomic(path, &cp)?;
        }
    }

    Ok(ScanReport {
        spec: spec.clone(),
        complete: next == groups_total,
        groups_done: next,
        groups_total,
        state,
    })
}
