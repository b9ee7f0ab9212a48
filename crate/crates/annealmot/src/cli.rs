//! The command-line surface.
//!
//! Subcommands: `solve` (graph file to matching), `track` (detections to
//! tracks plus an optional metric report), `bench-error` and
//! `bench-reverse` (synthetic experiments to CSV), `gen-scenario`
//! (synthetic scene files), and `eval` (tracks vs ground truth).
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 solver refusal
//! (such as the exact solver's edge cap). With a fixed seed every
//! invocation is byte-reproducible; wall-clock columns in benchmark CSVs
//! are the documented exception.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bench::{
    error_rate_csv, gen_scenario, reverse_csv, run_error_rate_experiment, run_reverse_experiment,
    BenchmarkSpec, ScenarioLayout, ScenarioSpec,
};
use crate::error::{Error, Result};
use crate::graph::{
    matching_weight, oracle_solve_with_cap, Matching, WeightedBipartiteGraph,
    DEFAULT_ORACLE_EDGE_CAP,
};
use crate::io;
use crate::metrics::{MetricReport, Trajectories};
use crate::qubo::{build_matching_qubo, BinaryState, QuboProblem, DEFAULT_LAMBDA};
use crate::solvers::{
    repair_feasibility, reverse_anneal, simulated_anneal, simulated_quantum_anneal, AnnealSchedule,
    DEFAULT_FORWARD_SWEEPS, DEFAULT_FORWARD_TRIALS, DEFAULT_REVERSE_SWEEPS, DEFAULT_REVERSE_TRIALS,
    DEFAULT_TROTTER_SLICES,
};
use crate::tracking::{
    step_tracking, IntegratorChoice, SolverChoice, TrackSet, TrackerConfig, WeightModel,
};

/// Parse the given argv and run; returns the process exit code.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return code;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            if err.is_solver_refusal() {
                3
            } else {
                2
            }
        }
    }
}

#[derive(Parser)]
#[command(
    name = "annealmot",
    version,
    about = "Annealed maximal-matching association for multi-object tracking",
    subcommand_required = true,
    arg_required_else_help = true
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve one association graph file and print the matching.
    Solve(SolveArgs),
    /// Run the tracking pipeline over a detection CSV.
    Track(TrackArgs),
    /// Error-rate/TTS table over random regular graphs.
    BenchError(BenchErrorArgs),
    /// Warm-start (reverse vs forward) comparison table.
    BenchReverse(BenchReverseArgs),
    /// Generate a synthetic scene: ground truth, detections, hashes.
    GenScenario(GenScenarioArgs),
    /// Score a tracks CSV against ground truth.
    Eval(EvalArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SolverArg {
    Sa,
    Rsa,
    Sqa,
    Oracle,
}

impl From<SolverArg> for SolverChoice {
    fn from(value: SolverArg) -> Self {
        match value {
            SolverArg::Sa => SolverChoice::Sa,
            SolverArg::Rsa => SolverChoice::Rsa,
            SolverArg::Sqa => SolverChoice::Sqa,
            SolverArg::Oracle => SolverChoice::Oracle,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum IntegratorArg {
    None,
    Majority,
    Cyclic,
}

impl From<IntegratorArg> for IntegratorChoice {
    fn from(value: IntegratorArg) -> Self {
        match value {
            IntegratorArg::None => IntegratorChoice::None,
            IntegratorArg::Majority => IntegratorChoice::Majority,
            IntegratorArg::Cyclic => IntegratorChoice::Cyclic,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelsArg {
    Iou,
    Hash,
    Both,
}

impl From<ModelsArg> for Vec<WeightModel> {
    fn from(value: ModelsArg) -> Self {
        match value {
            ModelsArg::Iou => vec![WeightModel::Iou],
            ModelsArg::Hash => vec![WeightModel::Hash],
            ModelsArg::Both => vec![WeightModel::Iou, WeightModel::Hash],
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LayoutArg {
    Lanes,
    Crossing,
}

impl From<LayoutArg> for ScenarioLayout {
    fn from(value: LayoutArg) -> Self {
        match value {
            LayoutArg::Lanes => ScenarioLayout::Lanes,
            LayoutArg::Crossing => ScenarioLayout::Crossing,
        }
    }
}

/// Comma-separated list of positive integers, e.g. `4,6,8`.
#[derive(Clone, Debug)]
struct UsizeList(Vec<usize>);

fn parse_usize_list(s: &str) -> std::result::Result<UsizeList, String> {
    let items: std::result::Result<Vec<usize>, _> = s
        .split(',')
        .map(|part| {
            part.trim()
                .parse::<usize>()
                .map_err(|e| format!("'{part}': {e}"))
        })
        .collect();
    let items = items?;
    if items.is_empty() {
        return Err("list must not be empty".into());
    }
    Ok(UsizeList(items))
}

/// `RxC` or `RXC`, e.g. `4x4`.
fn parse_grid(s: &str) -> std::result::Result<(usize, usize), String> {
    let (r, c) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected RxC, got '{s}'"))?;
    let rows = r
        .trim()
        .parse::<usize>()
        .map_err(|e| format!("rows '{r}': {e}"))?;
    let cols = c
        .trim()
        .parse::<usize>()
        .map_err(|e| format!("cols '{c}': {e}"))?;
    if rows == 0 || cols == 0 {
        return Err("grid dimensions must be positive".into());
    }
    Ok((rows, cols))
}

/// `WxH` in pixels, e.g. `640x360`.
fn parse_dims(s: &str) -> std::result::Result<(f64, f64), String> {
    let (w, h) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected WxH, got '{s}'"))?;
    let width = w
        .trim()
        .parse::<f64>()
        .map_err(|e| format!("width '{w}': {e}"))?;
    let height = h
        .trim()
        .parse::<f64>()
        .map_err(|e| format!("height '{h}': {e}"))?;
    if !(width > 0.0 && height > 0.0) {
        return Err("dimensions must be positive".into());
    }
    Ok((width, height))
}

/// `LO:HI`, e.g. `-1:0`.
fn parse_weight_range(s: &str) -> std::result::Result<(f64, f64), String> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| format!("expected LO:HI, got '{s}'"))?;
    let lo = lo
        .trim()
        .parse::<f64>()
        .map_err(|e| format!("low '{lo}': {e}"))?;
    let hi = hi
        .trim()
        .parse::<f64>()
        .map_err(|e| format!("high '{hi}': {e}"))?;
    Ok((lo, hi))
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })
}

fn write_file(path: &Path, content: &str) -> Result<()> {
    fs::write(path, content).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })
}

/// Write to `--out` when given, stdout otherwise.
fn emit(out: &Option<PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) => write_file(path, content),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Solve(args) => run_solve(args),
        Cmd::Track(args) => run_track(args),
        Cmd::BenchError(args) => run_bench_error(args),
        Cmd::BenchReverse(args) => run_bench_reverse(args),
        Cmd::GenScenario(args) => run_gen_scenario(args),
        Cmd::Eval(args) => run_eval(args),
    }
}

#[derive(Args)]
struct SolveArgs {
    /// Graph file in the line-oriented text format.
    graph: PathBuf,
    #[arg(long, value_enum, default_value_t = SolverArg::Sa)]
    solver: SolverArg,
    /// Conflict penalty for the QUBO encoding.
    #[arg(long, default_value_t = DEFAULT_LAMBDA)]
    lambda: f64,
    /// Sweeps per trial (defaults: 250 forward, 75 reverse).
    #[arg(long)]
    sweeps: Option<usize>,
    /// Annealing trials (defaults: 100 forward, 1 reverse).
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Trotter slices for the quantum-inspired solver.
    #[arg(long, default_value_t = DEFAULT_TROTTER_SLICES)]
    trotter_slices: usize,
    /// Edge cap for the exact solver.
    #[arg(long, default_value_t = DEFAULT_ORACLE_EDGE_CAP)]
    oracle_cap: usize,
    /// Warm-start bit string file for the reverse solver (0/1 characters);
    /// defaults to a greedy feasible state.
    #[arg(long)]
    warm_start: Option<PathBuf>,
    /// Write a JSON summary here in addition to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn solve_single_block(problem: &QuboProblem, state: &BinaryState) -> Result<Matching> {
    problem
        .decode(state)?
        .into_iter()
        .next()
        .expect("a compiled problem has at least one block")
        .into_matching()
}

fn parse_bit_string(text: &str) -> Result<BinaryState> {
    let mut bits = Vec::new();
    for (i, ch) in text.chars().filter(|c| !c.is_whitespace()).enumerate() {
        match ch {
            '0' => bits.push(false),
            '1' => bits.push(true),
            other => {
                return Err(Error::Parse {
                    line: 1,
                    msg: format!("bit {i} is '{other}', expected 0 or 1"),
                })
            }
        }
    }
    Ok(BinaryState::from_bits(bits))
}

fn run_solve(args: SolveArgs) -> Result<()> {
    let text = read_file(&args.graph)?;
    let graph = WeightedBipartiteGraph::from_text(&text).map_err(|e| e.in_file(&args.graph))?;

    let solver: SolverChoice = args.solver.into();
    let (matching, energy) = match solver {
        SolverChoice::Oracle => {
            let (m, _) = oracle_solve_with_cap(&graph, args.oracle_cap)?;
            (m, None)
        }
        SolverChoice::Sa | SolverChoice::Sqa => {
            let problem = build_matching_qubo(&graph, args.lambda)?;
            let sweeps = args.sweeps.unwrap_or(DEFAULT_FORWARD_SWEEPS);
            let trials = args.trials.unwrap_or(DEFAULT_FORWARD_TRIALS);
            let schedule = AnnealSchedule::forward(sweeps);
            let result = if solver == SolverChoice::Sa {
                simulated_anneal(&problem, &schedule, trials, args.seed)?
            } else {
                simulated_quantum_anneal(
                    &problem,
                    &schedule,
                    args.trotter_slices,
                    trials,
                    args.seed,
                )?
            };
            (
                solve_single_block(&problem, &result.best_state)?,
                Some(result.best_energy),
            )
        }
        SolverChoice::Rsa => {
            let problem = build_matching_qubo(&graph, args.lambda)?;
            let sweeps = args.sweeps.unwrap_or(DEFAULT_REVERSE_SWEEPS);
            let trials = args.trials.unwrap_or(DEFAULT_REVERSE_TRIALS);
            let warm = match &args.warm_start {
                Some(path) => parse_bit_string(&read_file(path)?).map_err(|e| e.in_file(path))?,
                None => repair_feasibility(&problem, &BinaryState::zeros(problem.num_vars()))?,
            };
            let result = reverse_anneal(
                &problem,
                &AnnealSchedule::reverse(sweeps),
                &warm,
                trials,
                args.seed,
            )?;
            (
                solve_single_block(&problem, &result.best_state)?,
                Some(result.best_energy),
            )
        }
    };

    let weight = matching_weight(&graph, &matching)?;
    let pairs: Vec<(usize, usize)> = matching.pairs().collect();

    let mut text_out = String::new();
    text_out.push_str(&format!("solver: {}\n", solver_name(solver)));
    if let Some(e) = energy {
        text_out.push_str(&format!("energy: {e}\n"));
    }
    text_out.push_str(&format!("weight: {weight}\n"));
    text_out.push_str(&format!("pairs: {}\n", pairs.len()));
    for (l, r) in &pairs {
        text_out.push_str(&format!("{l} -> {r}\n"));
    }
    print!("{text_out}");

    if let Some(out) = &args.out {
        let json = serde_json::json!({
            "solver": solver_name(solver),
            "energy": energy,
            "weight": weight,
            "pairs": pairs,
        });
        let mut body =
            serde_json::to_string_pretty(&json).expect("static JSON value always serializes");
        body.push('\n');
        write_file(out, &body)?;
    }
    Ok(())
}

fn solver_name(solver: SolverChoice) -> &'static str {
    match solver {
        SolverChoice::Sa => "sa",
        SolverChoice::Rsa => "rsa",
        SolverChoice::Sqa => "sqa",
        SolverChoice::Oracle => "oracle",
    }
}

#[derive(Args)]
struct TrackArgs {
    /// Detection CSV (`frame,id,x,y,w,h,conf,...`; id is ignored).
    detections: PathBuf,
    /// Appearance-hash sidecar CSV (`frame,det_index,hash_hex`).
    #[arg(long)]
    hashes: Option<PathBuf>,
    /// Ground-truth CSV; when given, a metric report follows the tracks.
    #[arg(long)]
    gt: Option<PathBuf>,
    /// Flat key=value config file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    models: Option<ModelsArg>,
    #[arg(long, value_enum)]
    solver: Option<SolverArg>,
    #[arg(long, value_enum)]
    integrator: Option<IntegratorArg>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    sweeps: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    trotter_slices: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Minimum predicted-box overlap for an association edge.
    #[arg(long)]
    iou_gate: Option<f64>,
    /// Frames a track may go unmatched before it is dropped.
    #[arg(long)]
    max_age: Option<u32>,
    /// Consecutive hits before a track is confirmed.
    #[arg(long)]
    min_hits: Option<u32>,
    /// Warm-start location grid, rows x cols.
    #[arg(long, value_parser = parse_grid)]
    grid: Option<(usize, usize)>,
    /// Frame size in pixels, width x height.
    #[arg(long, value_parser = parse_dims)]
    frame_dims: Option<(f64, f64)>,
    /// Overlap threshold for the metric report.
    #[arg(long, default_value_t = 0.5)]
    iou_threshold: f64,
    /// Write the tracks CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_config_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value.parse::<T>().map_err(|e| {
        Error::InvalidParameter(format!("config key '{key}': bad value '{value}': {e}"))
    })
}

fn models_from_str(value: &str) -> Result<Vec<WeightModel>> {
    match value {
        "iou" => Ok(vec![WeightModel::Iou]),
        "hash" => Ok(vec![WeightModel::Hash]),
        "both" => Ok(vec![WeightModel::Iou, WeightModel::Hash]),
        other => Err(Error::InvalidParameter(format!(
            "unknown models '{other}' (expected iou, hash, or both)"
        ))),
    }
}

fn solver_from_str(value: &str) -> Result<SolverChoice> {
    match value {
        "sa" => Ok(SolverChoice::Sa),
        "rsa" => Ok(SolverChoice::Rsa),
        "sqa" => Ok(SolverChoice::Sqa),
        "oracle" => Ok(SolverChoice::Oracle),
        other => Err(Error::InvalidParameter(format!(
            "unknown solver '{other}' (expected sa, rsa, sqa, or oracle)"
        ))),
    }
}

fn integrator_from_str(value: &str) -> Result<IntegratorChoice> {
    match value {
        "none" => Ok(IntegratorChoice::None),
        "majority" => Ok(IntegratorChoice::Majority),
        "cyclic" => Ok(IntegratorChoice::Cyclic),
        other => Err(Error::InvalidParameter(format!(
            "unknown integrator '{other}' (expected none, majority, or cyclic)"
        ))),
    }
}

fn apply_config_file(cfg: &mut TrackerConfig, path: &Path) -> Result<()> {
    let text = read_file(path)?;
    let map = io::parse_key_values(&text).map_err(|e| e.in_file(path))?;
    for (key, value) in &map {
        match key.as_str() {
            "models" => cfg.models = models_from_str(value)?,
            "solver" => cfg.solver = solver_from_str(value)?,
            "integrator" => cfg.integrator = integrator_from_str(value)?,
            "lambda" => cfg.lambda = parse_config_value(key, value)?,
            "sweeps" => cfg.sweeps = parse_config_value(key, value)?,
            "trials" => cfg.trials = parse_config_value(key, value)?,
            "trotter_slices" => cfg.trotter_slices = parse_config_value(key, value)?,
            "seed" => cfg.seed = parse_config_value(key, value)?,
            "iou_gate" => cfg.iou_gate = parse_config_value(key, value)?,
            "max_age" => cfg.max_age = parse_config_value(key, value)?,
            "min_hits" => cfg.min_hits = parse_config_value(key, value)?,
            "grid" => {
                cfg.grid = parse_grid(value).map_err(Error::InvalidParameter)?;
            }
            "frame_dims" => {
                cfg.frame_dims = parse_dims(value).map_err(Error::InvalidParameter)?;
            }
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown config key '{other}' in {}",
                    path.display()
                )));
            }
        }
    }
    Ok(())
}

fn tracker_config(args: &TrackArgs) -> Result<TrackerConfig> {
    let mut cfg = TrackerConfig::default();
    if let Some(path) = &args.config {
        apply_config_file(&mut cfg, path)?;
    }
    if let Some(models) = args.models {
        cfg.models = models.into();
    }
    if let Some(solver) = args.solver {
        cfg.solver = solver.into();
    }
    if let Some(integrator) = args.integrator {
        cfg.integrator = integrator.into();
    }
    if let Some(lambda) = args.lambda {
        cfg.lambda = lambda;
    }
    if let Some(sweeps) = args.sweeps {
        cfg.sweeps = sweeps;
    }
    if let Some(trials) = args.trials {
        cfg.trials = trials;
    }
    if let Some(slices) = args.trotter_slices {
        cfg.trotter_slices = slices;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(gate) = args.iou_gate {
        cfg.iou_gate = gate;
    }
    if let Some(age) = args.max_age {
        cfg.max_age = age;
    }
    if let Some(hits) = args.min_hits {
        cfg.min_hits = hits;
    }
    if let Some(grid) = args.grid {
        cfg.grid = grid;
    }
    if let Some(dims) = args.frame_dims {
        cfg.frame_dims = dims;
    }
    Ok(cfg)
}

fn run_track(args: TrackArgs) -> Result<()> {
    let cfg = tracker_config(&args)?;
    let det_text = read_file(&args.detections)?;
    let rows = io::parse_mot_rows(&det_text).map_err(|e| e.in_file(&args.detections))?;
    let hashes = match &args.hashes {
        Some(path) => Some(io::parse_hash_sidecar(&read_file(path)?).map_err(|e| e.in_file(path))?),
        None => None,
    };
    let frames = io::detections_from_rows(&rows, hashes.as_ref())?;

    let mut tracks = TrackSet::new();
    for frame in &frames {
        step_tracking(&mut tracks, frame, &cfg)?;
    }
    emit(&args.out, &io::tracks_csv(tracks.records()))?;

    if let Some(gt_path) = &args.gt {
        let gt_rows = io::parse_mot_rows(&read_file(gt_path)?).map_err(|e| e.in_file(gt_path))?;
        let gt = io::trajectories_from_rows(&gt_rows);
        let hyp = Trajectories::from_records(tracks.records());
        let report = MetricReport::compute(
            &gt,
            &hyp,
            args.iou_threshold,
            tracks.confirmed_track_count(),
            gt.ids().len() as u64,
        )?;
        println!("{report}");
    }
    Ok(())
}

#[derive(Args)]
struct BenchErrorArgs {
    /// Graph side sizes to sweep, comma-separated.
    #[arg(long, value_parser = parse_usize_list, default_value = "4,6,8")]
    sizes: UsizeList,
    #[arg(long, default_value_t = 4)]
    degree: usize,
    #[arg(long, default_value_t = 10)]
    graphs_per_n: usize,
    /// Solver trials per graph.
    #[arg(long, default_value_t = 250)]
    trials: usize,
    /// Ensemble multiplicities P, comma-separated.
    #[arg(long, value_parser = parse_usize_list, default_value = "1,2,3,5")]
    multiplicities: UsizeList,
    /// Uniform edge-weight band LO:HI.
    #[arg(long, value_parser = parse_weight_range, default_value = "-1:0", allow_hyphen_values = true)]
    weight_range: (f64, f64),
    #[arg(long, default_value_t = DEFAULT_FORWARD_SWEEPS)]
    sweeps: usize,
    /// Sampling solver (sa or sqa).
    #[arg(long, value_enum, default_value_t = SolverArg::Sa)]
    solver: SolverArg,
    #[arg(long, value_enum, default_value_t = IntegratorArg::Cyclic)]
    integrator: IntegratorArg,
    #[arg(long, default_value_t = DEFAULT_TROTTER_SLICES)]
    trotter_slices: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run_bench_error(args: BenchErrorArgs) -> Result<()> {
    let spec = BenchmarkSpec {
        sizes: args.sizes.0,
        degree: args.degree,
        weight_range: args.weight_range,
        graphs_per_n: args.graphs_per_n,
        trials_per_graph: args.trials,
        multiplicities: args.multiplicities.0,
        flip_prob: 0.0,
        seed: args.seed,
    };
    let rows = run_error_rate_experiment(
        &spec,
        args.solver.into(),
        args.sweeps,
        args.trotter_slices,
        &[args.integrator.into()],
    )?;
    emit(&args.out, &error_rate_csv(&rows))
}

#[derive(Args)]
struct BenchReverseArgs {
    /// Graph side sizes to sweep, comma-separated.
    #[arg(long, value_parser = parse_usize_list, default_value = "4,6,8")]
    sizes: UsizeList,
    #[arg(long, default_value_t = 4)]
    degree: usize,
    #[arg(long, default_value_t = 10)]
    graphs_per_n: usize,
    /// Per-bit warm-start corruption probability.
    #[arg(long, default_value_t = 0.05)]
    flip_prob: f64,
    /// Forward-annealing sweep budget.
    #[arg(long, default_value_t = DEFAULT_FORWARD_SWEEPS)]
    sweeps: usize,
    /// Reverse-annealing sweep budget (default: 30% of the forward budget).
    #[arg(long)]
    reverse_sweeps: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run_bench_reverse(args: BenchReverseArgs) -> Result<()> {
    let spec = BenchmarkSpec {
        sizes: args.sizes.0,
        degree: args.degree,
        graphs_per_n: args.graphs_per_n,
        flip_prob: args.flip_prob,
        seed: args.seed,
        ..BenchmarkSpec::default()
    };
    let reverse_sweeps = args
        .reverse_sweeps
        .unwrap_or_else(|| ((args.sweeps as f64 * 0.3).round() as usize).max(1));
    let rows = run_reverse_experiment(&spec, args.sweeps, reverse_sweeps)?;
    emit(&args.out, &reverse_csv(&rows))
}

#[derive(Args)]
struct GenScenarioArgs {
    #[arg(long, default_value_t = 5)]
    objects: usize,
    #[arg(long, default_value_t = 200)]
    frames: usize,
    #[arg(long, value_parser = parse_dims, default_value = "640x360")]
    frame_dims: (f64, f64),
    #[arg(long, value_parser = parse_dims, default_value = "20x20")]
    box_size: (f64, f64),
    /// Base object speed in pixels per frame.
    #[arg(long, default_value_t = 1.5)]
    speed: f64,
    /// Detection jitter amplitude in pixels.
    #[arg(long, default_value_t = 0.5)]
    noise: f64,
    /// Per-detection dropout probability.
    #[arg(long, default_value_t = 0.0)]
    dropout: f64,
    /// Appearance-hash bits flipped per detection.
    #[arg(long, default_value_t = 2)]
    hash_noise_bits: u32,
    #[arg(long, value_enum, default_value_t = LayoutArg::Lanes)]
    layout: LayoutArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory for gt.csv, detections.csv, and hashes.csv.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

fn run_gen_scenario(args: GenScenarioArgs) -> Result<()> {
    let spec = ScenarioSpec {
        num_objects: args.objects,
        frame_count: args.frames,
        frame_dims: args.frame_dims,
        box_size: args.box_size,
        speed: args.speed,
        motion_noise: args.noise,
        dropout: args.dropout,
        hash_noise_bits: args.hash_noise_bits,
        layout: args.layout.into(),
        seed: args.seed,
    };
    let scenario = gen_scenario(&spec)?;
    fs::create_dir_all(&args.out_dir).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", args.out_dir.display()),
        ))
    })?;
    for (name, content) in [
        ("gt.csv", scenario.ground_truth_csv()),
        ("detections.csv", scenario.detections_csv()),
        ("hashes.csv", scenario.hash_sidecar_csv()),
    ] {
        let path = args.out_dir.join(name);
        write_file(&path, &content)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

#[derive(Args)]
struct EvalArgs {
    /// Tracks CSV produced by `track`.
    tracks: PathBuf,
    /// Ground-truth CSV.
    gt: PathBuf,
    /// Overlap threshold for box correspondence.
    #[arg(long, default_value_t = 0.5)]
    iou_threshold: f64,
    /// Emit the report as a CSV header plus row instead of text.
    #[arg(long)]
    csv: bool,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run_eval(args: EvalArgs) -> Result<()> {
    let track_rows =
        io::parse_mot_rows(&read_file(&args.tracks)?).map_err(|e| e.in_file(&args.tracks))?;
    let gt_rows = io::parse_mot_rows(&read_file(&args.gt)?).map_err(|e| e.in_file(&args.gt))?;
    let hyp = io::trajectories_from_rows(&track_rows);
    let gt = io::trajectories_from_rows(&gt_rows);
    let report = MetricReport::compute(
        &gt,
        &hyp,
        args.iou_threshold,
        hyp.ids().len() as u64,
        gt.ids().len() as u64,
    )?;
    let body = if args.csv {
        format!("{}\n{}\n", MetricReport::CSV_HEADER, report.csv_row())
    } else {
        format!("{report}\n")
    };
    emit(&args.out, &body)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_and_dims_parsers_accept_the_documented_shapes() {
        assert_eq!(parse_grid("4x4").unwrap(), (4, 4));
        assert_eq!(parse_grid("2X8").unwrap(), (2, 8));
        assert!(parse_grid("4").is_err());
        assert!(parse_grid("0x4").is_err());
        assert_eq!(parse_dims("640x360").unwrap(), (640.0, 360.0));
        assert!(parse_dims("640x-1").is_err());
        assert_eq!(parse_weight_range("-1:0").unwrap(), (-1.0, 0.0));
        assert!(parse_weight_range("nope").is_err());
        assert_eq!(parse_usize_list("4,6,8").unwrap().0, vec![4, 6, 8]);
        assert!(parse_usize_list("4,x").is_err());
    }

    #[test]
    fn bit_strings_parse_with_whitespace() {
        let state = parse_bit_string("01 1\n0").unwrap();
        assert_eq!(state.bits(), &[false, true, true, false]);
        assert!(parse_bit_string("012").is_err());
    }

    #[test]
    fn config_files_feed_the_tracker_config() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.txt");
        fs::write(
            &path,
            "solver=oracle\nintegrator=majority\nmodels=iou\nsweeps=99\ngrid=2x8\nmin_hits=1\n",
        )
        .unwrap();
        let mut cfg = TrackerConfig::default();
        apply_config_file(&mut cfg, &path).unwrap();
        assert_eq!(cfg.solver, SolverChoice::Oracle);
        assert_eq!(cfg.integrator, IntegratorChoice::Majority);
        assert_eq!(cfg.models, vec![WeightModel::Iou]);
        assert_eq!(cfg.sweeps, 99);
        assert_eq!(cfg.grid, (2, 8));
        assert_eq!(cfg.min_hits, 1);

        fs::write(&path, "mystery=1\n").unwrap();
        let err = apply_config_file(&mut cfg, &path).unwrap_err();
        assert!(err.to_string().contains("mystery"), "{err}");
    }

    #[test]
    fn usage_problems_exit_one_and_help_exits_zero() {
        assert_eq!(cli_main(["annealmot"]), 1);
        assert_eq!(cli_main(["annealmot", "no-such-command"]), 1);
        assert_eq!(cli_main(["annealmot", "--help"]), 0);
        assert_eq!(
            cli_main(["annealmot", "solve", "--solver", "bogus", "g.txt"]),
            1
        );
    }

    #[test]
    fn missing_input_files_exit_two() {
        let dir = tempfile::tempdir().unwrap();
        let missing = dir.path().join("absent.txt");
        assert_eq!(
            cli_main(["annealmot", "solve", missing.to_str().unwrap()]),
            2
        );
    }

    #[test]
    fn oversized_graphs_refuse_with_exit_three() {
        use crate::graph::WeightConvention;
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("big.txt");
        // 5x5 complete graph: 25 edges, above the default cap of 24.
        let edges = (0..5).flat_map(|l| (0..5).map(move |r| (l, r, 0.5)));
        let graph = WeightedBipartiteGraph::new(5, 5, edges, WeightConvention::Similarity).unwrap();
        fs::write(&path, graph.to_text()).unwrap();
        assert_eq!(
            cli_main([
                "annealmot",
                "solve",
                "--solver",
                "oracle",
                path.to_str().unwrap()
            ]),
            3
        );
    }
}
