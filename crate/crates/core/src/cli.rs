//! Command-line surface. The `flipsense` binary forwards to [`run`].

use std::collections::{BTreeMap, BTreeSet};
use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::baselines::hbtp_scores;
use crate::error::{Error, Result};
use crate::eval::{
    default_alpha_grid, figure_data, improvement, replay_sizes, sweep_alpha, EvalReport,
    FigureData, Metric, MethodConfig, MethodKind,
};
use crate::history::{
    extract_flips, ingest_history, predictable_build_stats, FlipLedger, History, HistorySummary,
    PredictableStats, Verdict,
};
use crate::schedule::{
    cost, day_tick, office_hours_tick, select_stable, ScheduleState, StableRule, StableStrategy,
};
use crate::sensitivity::{
    build_delta, flakiness_index, incremental_apply, read_snapshot, select_top_n, slice_scores,
    top_files_for_test, write_flakiness_csv, write_heatmap_csv, write_snapshot, DMode,
    MatrixConfig, ScoreMode, SensitivityMatrix,
};
use crate::synth::{generate, SynthConfig};

#[derive(Debug, Parser)]
#[command(name = "flipsense", version, about = "Change-based regression test prioritisation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Machine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Ema,
    Ekelund,
    Random,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a history and print its summary.
    Ingest {
        /// History file, `-` for stdin.
        input: PathBuf,
        #[arg(long, value_enum, default_value = "human")]
        format: Format,
    },
    /// Rank tests for a change set.
    Prioritise(PrioritiseArgs),
    /// Replay a history and emit metric tables per selection size.
    Replay(ReplayArgs),
    /// Choose alpha by minimising zero-result builds.
    SweepAlpha(SweepArgs),
    /// Export the heat map and flakiness index of a replayed matrix.
    Heatmap(HeatmapArgs),
    /// Resource-managed scheduling.
    #[command(subcommand)]
    Schedule(ScheduleCommand),
    /// Generate a synthetic history.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
pub struct MatrixArgs {
    #[arg(long, value_enum, default_value = "ema")]
    pub method: Method,
    #[arg(long, default_value_t = 0.8)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value = "linear")]
    pub d_mode: DModeArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DModeArg {
    Linear,
    Constant,
}

impl From<DModeArg> for DMode {
    fn from(d: DModeArg) -> Self {
        match d {
            DModeArg::Linear => DMode::Linear,
            DModeArg::Constant => DMode::Constant,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScoreModeArg {
    Sum,
    Max,
}

impl From<ScoreModeArg> for ScoreMode {
    fn from(s: ScoreModeArg) -> Self {
        match s {
            ScoreModeArg::Sum => ScoreMode::Sum,
            ScoreModeArg::Max => ScoreMode::Max,
        }
    }
}

impl MatrixArgs {
    fn config(&self) -> Result<MatrixConfig> {
        match self.method {
            Method::Ema => Ok(MatrixConfig::ema(self.alpha)?.with_d_mode(self.d_mode.into())),
            Method::Ekelund => Ok(MatrixConfig::cumulative()),
            Method::Random => Err(Error::Argument("random selection has no matrix".into())),
        }
    }
}

#[derive(Debug, Args)]
pub struct PrioritiseArgs {
    /// History to replay into a matrix.
    #[arg(long, required_unless_present = "snapshot")]
    pub history: Option<PathBuf>,
    /// Matrix snapshot to start from (applied before --history, if both are given).
    #[arg(long)]
    pub snapshot: Option<PathBuf>,
    /// File listing changed files, one per line.
    #[arg(long, required_unless_present = "changed")]
    pub changes: Option<PathBuf>,
    /// Comma-separated changed files.
    #[arg(long, value_delimiter = ',')]
    pub changed: Option<Vec<String>>,
    #[arg(short = 'n', long, default_value_t = 5)]
    pub n: usize,
    #[command(flatten)]
    pub matrix: MatrixArgs,
    #[arg(long, value_enum, default_value = "sum")]
    pub score_mode: ScoreModeArg,
    /// Print the score next to each test.
    #[arg(long)]
    pub scores: bool,
    /// Write the matrix used for ranking.
    #[arg(long)]
    pub save_snapshot: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Methods to compare; repeat the flag for several.
    #[arg(long = "method", value_enum, default_values = ["ema"])]
    pub methods: Vec<Method>,
    /// EMA weight, or `auto` to sweep the default grid first.
    #[arg(long, default_value = "0.8")]
    pub alpha: String,
    #[arg(long, value_enum, default_value = "linear")]
    pub d_mode: DModeArg,
    #[arg(long, value_enum, default_value = "sum")]
    pub score_mode: ScoreModeArg,
    /// Selection sizes: `lo..hi` (inclusive) or a comma list.
    #[arg(long, default_value = "5..25")]
    pub select: String,
    #[arg(long, default_value_t = 100)]
    pub runs: usize,
    #[arg(long, env = "FLIPSENSE_SEED", default_value_t = 1)]
    pub seed: u64,
    /// Directory for the CSV tables and the report document.
    #[arg(long, env = "FLIPSENSE_OUT_DIR")]
    pub out_dir: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "human")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// `start:stop:step`
    #[arg(long, default_value = "0:1:0.01")]
    pub grid: String,
    #[arg(long, default_value = "5..25")]
    pub select: String,
    #[arg(long, value_enum, default_value = "linear")]
    pub d_mode: DModeArg,
    #[arg(long, value_enum, default_value = "sum")]
    pub score_mode: ScoreModeArg,
    #[arg(long, value_enum, default_value = "human")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct HeatmapArgs {
    #[arg(long, required_unless_present = "snapshot")]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub snapshot: Option<PathBuf>,
    #[command(flatten)]
    pub matrix: MatrixArgs,
    #[arg(long, env = "FLIPSENSE_OUT_DIR", default_value = ".")]
    pub out_dir: PathBuf,
    /// Also list the files with the largest entries for this test.
    #[arg(long)]
    pub top_files: Option<String>,
    #[arg(short = 'k', long, default_value_t = 5)]
    pub k: usize,
}

#[derive(Debug, Subcommand)]
pub enum ScheduleCommand {
    /// Create a schedule state from a history.
    Init {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        state: PathBuf,
        #[arg(long, value_enum, default_value = "never-flipped")]
        stable_rule: StableRuleArg,
    },
    /// Pick stable tests for the after-hours pass.
    Stable {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        budget: usize,
        #[arg(long, value_enum, default_value = "cost-min")]
        strategy: StrategyArg,
        #[arg(long, default_value_t = 7)]
        window: u64,
    },
    /// End a day: reset executed tests, age the rest.
    Tick {
        #[arg(long)]
        state: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "")]
        executed: Vec<String>,
    },
    /// Office-hours selection for a change set.
    Office {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        history: PathBuf,
        #[arg(long)]
        snapshot: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        changed: Vec<String>,
        #[arg(short = 'k', long, default_value_t = 5)]
        k: usize,
        #[arg(long, default_value_t = 0.5)]
        weight: f64,
        #[command(flatten)]
        matrix: MatrixArgs,
    },
    /// Fold verdicts of executed tests into a snapshot, test by test.
    Record {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        snapshot: PathBuf,
        /// JSON object `{"test": "pass" | "fail"}`.
        #[arg(long)]
        verdicts: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StableRuleArg {
    NeverFlipped,
    AlwaysPassed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    CostMin,
    RoundRobin,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, env = "FLIPSENSE_SEED", default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 50)]
    pub builds: usize,
    #[arg(long, default_value_t = 200)]
    pub files: usize,
    #[arg(long, default_value_t = 100)]
    pub tests: usize,
    #[arg(long, default_value = "1..5")]
    pub deps: String,
    #[arg(long, default_value = "1..20")]
    pub change_size: String,
    #[arg(long, default_value_t = 0.7)]
    pub hit: f64,
    #[arg(long, default_value_t = 0.01)]
    pub noise: f64,
    #[arg(long, default_value_t = 0.05)]
    pub initial_fail: f64,
    /// History destination; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Ground-truth dependency map destination.
    #[arg(long)]
    pub truth: Option<PathBuf>,
}

/// Parses `lo..hi` (inclusive) or `a,b,c`.
pub fn parse_sizes(spec: &str) -> Result<Vec<usize>> {
    let bad = || Error::Argument(format!("bad size list {spec:?}; use lo..hi or a,b,c"));
    let sizes: Vec<usize> = if let Some((lo, hi)) = spec.split_once("..") {
        let lo: usize = lo.trim().parse().map_err(|_| bad())?;
        let hi: usize = hi.trim().parse().map_err(|_| bad())?;
        if lo > hi {
            return Err(bad());
        }
        (lo..=hi).collect()
    } else {
        spec.split(',')
            .map(|s| s.trim().parse().map_err(|_| bad()))
            .collect::<Result<_>>()?
    };
    if sizes.is_empty() || sizes.contains(&0) {
        return Err(bad());
    }
    Ok(sizes)
}

/// Parses `start:stop:step` into an inclusive grid, rounding each point to
/// 12 decimals so that `0:1:0.01` yields exactly `i / 100`.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let bad = || Error::Argument(format!("bad grid {spec:?}; use start:stop:step"));
    let parts: Vec<f64> = spec
        .split(':')
        .map(|s| s.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    match parts[..] {
        [single] => Ok(vec![single]),
        [start, stop, step] if step > 0.0 && stop >= start => {
            let count = ((stop - start) / step + 1e-9).floor() as usize;
            Ok((0..=count)
                .map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12)
                .collect())
        }
        _ => Err(bad()),
    }
}

fn open_input(path: &Path) -> Result<Box<dyn BufRead>> {
    if path.as_os_str() == "-" {
        Ok(Box::new(BufReader::new(io::stdin())))
    } else {
        Ok(Box::new(BufReader::new(File::open(path)?)))
    }
}

fn load_history(path: &Path) -> Result<(History, FlipLedger)> {
    let history = ingest_history(open_input(path)?)?;
    let ledger = extract_flips(&history);
    Ok((history, ledger))
}

/// Replays the whole history into a matrix.
pub fn replay_matrix(
    history: &History,
    ledger: &FlipLedger,
    start: SensitivityMatrix,
) -> Result<SensitivityMatrix> {
    let mut matrix = start;
    let d_mode = matrix.config().d_mode;
    for rec in history.records().iter().skip(1) {
        matrix.advance(&build_delta(&rec.changed_files, ledger.flipped(rec.seq), d_mode))?;
    }
    matrix.register_tests(&ledger.universe);
    Ok(matrix)
}

fn load_snapshot(path: &Path) -> Result<SensitivityMatrix> {
    read_snapshot(BufReader::new(File::open(path)?))
}

fn save_snapshot(matrix: &SensitivityMatrix, path: &Path) -> Result<()> {
    let mut f = io::BufWriter::new(File::create(path)?);
    write_snapshot(matrix, &mut f)?;
    f.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct IngestReport {
    summary: HistorySummary,
    flip_events: usize,
    predictable: PredictableStats,
}

fn cmd_ingest(input: &Path, format: Format, out: &mut dyn Write) -> Result<()> {
    let (history, ledger) = load_history(input)?;
    let report = IngestReport {
        summary: history.summary(),
        flip_events: ledger.events.len(),
        predictable: predictable_build_stats(&ledger),
    };
    match format {
        Format::Machine => writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?,
        Format::Human => {
            let s = &report.summary;
            let p = &report.predictable;
            writeln!(out, "builds:                   {}", s.builds)?;
            writeln!(out, "distinct files:           {}", s.distinct_files)?;
            writeln!(out, "distinct tests:           {}", s.distinct_tests)?;
            writeln!(out, "flip events:              {}", report.flip_events)?;
            writeln!(out, "builds with predictable:  {}", p.builds_with_predictable)?;
            writeln!(out, "  <= 5 predictable:       {}", p.at_most_5)?;
            writeln!(out, "  6..25 predictable:      {}", p.from_6_to_25)?;
            writeln!(out, "  > 25 predictable:       {}", p.more_than_25)?;
        }
    }
    Ok(())
}

fn read_change_list(path: &Path) -> Result<BTreeSet<String>> {
    let mut text = String::new();
    open_input(path)?.read_to_string(&mut text)?;
    Ok(text.lines().map(str::trim).filter(|l| !l.is_empty()).map(String::from).collect())
}

fn cmd_prioritise(args: &PrioritiseArgs, out: &mut dyn Write) -> Result<()> {
    let mut matrix = match &args.snapshot {
        Some(p) => load_snapshot(p)?,
        None => SensitivityMatrix::new(args.matrix.config()?),
    };
    let mut universe = matrix.known_tests().clone();
    if let Some(h) = &args.history {
        let (history, ledger) = load_history(h)?;
        matrix = replay_matrix(&history, &ledger, matrix)?;
        universe.extend(ledger.universe.iter().cloned());
    }
    let changed: BTreeSet<String> = match (&args.changes, &args.changed) {
        (Some(p), _) => read_change_list(p)?,
        (None, Some(list)) => list.iter().filter(|s| !s.is_empty()).cloned().collect(),
        (None, None) => return Err(Error::Argument("--changes or --changed is required".into())),
    };
    let scores = slice_scores(&matrix, &changed, args.score_mode.into());
    for t in select_top_n(&scores, args.n, &universe)? {
        if args.scores {
            writeln!(out, "{t}\t{}", scores.get(&t))?;
        } else {
            writeln!(out, "{t}")?;
        }
    }
    if let Some(p) = &args.save_snapshot {
        save_snapshot(&matrix, p)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct ReplayDocument<'a> {
    alpha: f64,
    sizes: &'a [usize],
    figure: &'a FigureData,
    reports: &'a [EvalReport],
}

fn cmd_replay(args: &ReplayArgs, out: &mut dyn Write) -> Result<()> {
    let (history, ledger) = load_history(&args.input)?;
    let sizes = parse_sizes(&args.select)?;
    let alpha = if args.alpha == "auto" {
        sweep_alpha(&history, &ledger, &default_alpha_grid(), &sizes, args.d_mode.into(), args.score_mode.into())?
            .best_alpha
    } else {
        args.alpha
            .parse::<f64>()
            .map_err(|_| Error::Argument(format!("bad alpha {:?}", args.alpha)))?
    };
    let mut methods: Vec<Method> = Vec::new();
    for m in &args.methods {
        if !methods.contains(m) {
            methods.push(*m);
        }
    }
    let mut reports = Vec::new();
    for m in methods {
        let config = match m {
            Method::Ema => MethodConfig::Ema {
                alpha,
                d_mode: args.d_mode.into(),
                score_mode: args.score_mode.into(),
            },
            Method::Ekelund => MethodConfig::Ekelund { score_mode: args.score_mode.into() },
            Method::Random => MethodConfig::random(args.seed, args.runs),
        };
        reports.extend(replay_sizes(&history, &ledger, &config, &sizes)?);
    }
    let fig = figure_data(&reports)?;

    if let Some(dir) = &args.out_dir {
        fs::create_dir_all(dir)?;
        for metric in Metric::ALL {
            fs::write(dir.join(format!("{}.csv", metric.name())), fig.to_csv(metric))?;
        }
        let doc = ReplayDocument { alpha, sizes: &sizes, figure: &fig, reports: &reports };
        fs::write(dir.join("reports.json"), serde_json::to_string(&doc)?)?;
    }
    match args.format {
        Format::Machine => {
            let doc = ReplayDocument { alpha, sizes: &sizes, figure: &fig, reports: &reports };
            writeln!(out, "{}", serde_json::to_string(&doc)?)?;
        }
        Format::Human => {
            writeln!(out, "alpha = {alpha}")?;
            for metric in Metric::ALL {
                writeln!(out, "\n# {}", metric.name())?;
                write!(out, "{}", fig.to_csv(metric))?;
            }
            let names: Vec<&str> = fig.methods.iter().map(String::as_str).collect();
            if names.contains(&MethodKind::Ema.name()) && names.contains(&MethodKind::Ekelund.name()) {
                writeln!(out, "\n# ema vs ekelund (relative, per size)")?;
                writeln!(out, "metric,min,max,avg,avg_of_averages")?;
                for metric in Metric::ALL {
                    let imp = improvement(&fig, metric, "ema", "ekelund")?;
                    let f = |v: Option<f64>| v.map(|x| format!("{:+.1}%", x * 100.0)).unwrap_or_default();
                    writeln!(
                        out,
                        "{},{},{},{},{}",
                        metric.name(),
                        f(imp.min),
                        f(imp.max),
                        f(imp.avg),
                        f(imp.avg_of_averages)
                    )?;
                }
            }
        }
    }
    Ok(())
}

fn cmd_sweep(args: &SweepArgs, out: &mut dyn Write) -> Result<()> {
    let (history, ledger) = load_history(&args.input)?;
    let grid = parse_grid(&args.grid)?;
    let sizes = parse_sizes(&args.select)?;
    let sweep = sweep_alpha(&history, &ledger, &grid, &sizes, args.d_mode.into(), args.score_mode.into())?;
    match args.format {
        Format::Machine => writeln!(out, "{}", serde_json::to_string(&sweep)?)?,
        Format::Human => {
            writeln!(out, "best alpha = {}", sweep.best_alpha)?;
            write!(out, "{}", sweep.to_csv())?;
        }
    }
    Ok(())
}

fn cmd_heatmap(args: &HeatmapArgs, out: &mut dyn Write) -> Result<()> {
    let mut matrix = match &args.snapshot {
        Some(p) => load_snapshot(p)?,
        None => SensitivityMatrix::new(args.matrix.config()?),
    };
    if let Some(input) = &args.input {
        let (history, ledger) = load_history(input)?;
        matrix = replay_matrix(&history, &ledger, matrix)?;
    }
    fs::create_dir_all(&args.out_dir)?;
    let heat = args.out_dir.join("heatmap.csv");
    let flak = args.out_dir.join("flakiness.csv");
    write_heatmap_csv(&matrix, io::BufWriter::new(File::create(&heat)?))?;
    let index = flakiness_index(&matrix);
    write_flakiness_csv(&index, io::BufWriter::new(File::create(&flak)?))?;
    writeln!(out, "wrote {} and {}", heat.display(), flak.display())?;
    if let Some(test) = &args.top_files {
        for (file, v) in top_files_for_test(&matrix, test, args.k)? {
            writeln!(out, "{file}\t{v}")?;
        }
    }
    Ok(())
}

fn load_state(path: &Path) -> Result<ScheduleState> {
    ScheduleState::from_json(&fs::read_to_string(path)?)
}

fn save_state(state: &ScheduleState, path: &Path) -> Result<()> {
    fs::write(path, state.to_json())?;
    Ok(())
}

fn cmd_schedule(cmd: &ScheduleCommand, out: &mut dyn Write) -> Result<()> {
    match cmd {
        ScheduleCommand::Init { input, state, stable_rule } => {
            let (history, ledger) = load_history(input)?;
            let rule = match stable_rule {
                StableRuleArg::NeverFlipped => StableRule::NeverFlipped,
                StableRuleArg::AlwaysPassed => StableRule::AlwaysPassed,
            };
            let st = ScheduleState::from_history(&history, &ledger, rule);
            save_state(&st, state)?;
            writeln!(out, "{} tests, {} stable, cost {}", st.tests.len(), st.stable_tests().len(), cost(&st))?;
        }
        ScheduleCommand::Stable { state, budget, strategy, window } => {
            let st = load_state(state)?;
            let strategy = match strategy {
                StrategyArg::CostMin => StableStrategy::CostMin,
                StrategyArg::RoundRobin => StableStrategy::RoundRobin { window_days: *window },
            };
            for t in select_stable(&st, *budget, strategy)? {
                writeln!(out, "{t}")?;
            }
        }
        ScheduleCommand::Tick { state, executed } => {
            let st = load_state(state)?;
            let executed: BTreeSet<String> = executed.iter().filter(|s| !s.is_empty()).cloned().collect();
            let next = day_tick(&st, &executed);
            save_state(&next, state)?;
            writeln!(out, "cost {} -> {}", cost(&st), cost(&next))?;
        }
        ScheduleCommand::Office { state, history, snapshot, changed, k, weight, matrix } => {
            let mut st = load_state(state)?;
            let (hist, ledger) = load_history(history)?;
            let m = match snapshot {
                Some(p) => load_snapshot(p)?,
                None => replay_matrix(&hist, &ledger, SensitivityMatrix::new(matrix.config()?))?,
            };
            let hbtp = hbtp_scores(&hist, &ledger, hist.len());
            let changed: BTreeSet<String> = changed.iter().filter(|s| !s.is_empty()).cloned().collect();
            let universe: BTreeSet<String> = st.tests.keys().cloned().chain(ledger.universe.iter().cloned()).collect();
            let pick = office_hours_tick(&m, &mut st.pending, &changed, &hbtp, &universe, *k, *weight, ScoreMode::Sum)?;
            save_state(&st, state)?;
            for t in pick {
                writeln!(out, "{t}")?;
            }
        }
        ScheduleCommand::Record { state, snapshot, verdicts } => {
            let mut st = load_state(state)?;
            let mut m = load_snapshot(snapshot)?;
            let verdicts: BTreeMap<String, Verdict> = serde_json::from_str(&fs::read_to_string(verdicts)?)?;
            let executed: BTreeSet<String> = verdicts.keys().cloned().collect();
            incremental_apply(&mut m, &mut st.pending, &executed, &verdicts)?;
            save_snapshot(&m, snapshot)?;
            save_state(&st, state)?;
            writeln!(out, "recorded {} verdicts", executed.len())?;
        }
    }
    Ok(())
}

fn cmd_synth(args: &SynthArgs, out: &mut dyn Write) -> Result<()> {
    let range = |s: &str| -> Result<std::ops::RangeInclusive<usize>> {
        let sizes = parse_sizes(s)?;
        Ok(sizes[0]..=*sizes.last().expect("non-empty"))
    };
    let config = SynthConfig {
        seed: args.seed,
        n_builds: args.builds,
        n_files: args.files,
        n_tests: args.tests,
        deps_per_test: range(&args.deps)?,
        change_set_size: range(&args.change_size)?,
        flip_probability_hit: args.hit,
        flip_probability_noise: args.noise,
        initial_fail_fraction: args.initial_fail,
    };
    let output = generate(&config)?;
    match &args.out {
        Some(p) => {
            let mut f = io::BufWriter::new(File::create(p)?);
            output.history.write_jsonl(&mut f)?;
            f.flush()?;
        }
        None => output.history.write_jsonl(&mut *out)?,
    }
    if let Some(p) = &args.truth {
        fs::write(p, output.ground_truth_json())?;
    }
    Ok(())
}

pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Ingest { input, format } => cmd_ingest(input, *format, out),
        Command::Prioritise(a) => cmd_prioritise(a, out),
        Command::Replay(a) => cmd_replay(a, out),
        Command::SweepAlpha(a) => cmd_sweep(a, out),
        Command::Heatmap(a) => cmd_heatmap(a, out),
        Command::Schedule(c) => cmd_schedule(c, out),
        Command::Synth(a) => cmd_synth(a, out),
    }
}

/// Parses arguments, runs the command and returns the process exit code:
/// 0 on success, 1 for runtime and I/O failures, 2 for validation and usage errors.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return 2;
            }
            let _ = write!(out, "{e}");
            return 0;
        }
    };
    match execute(&cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
