//! Synthetic workloads: random regular association graphs, error-rate and
//! warm-start experiments, and tracking scenario generation.
//!
//! Everything here is seed-deterministic: the same spec and seed always
//! produce the same graphs, the same solver trials, and byte-identical
//! scenario files (wall-clock columns are the one documented exception).

use std::collections::{BTreeMap, BTreeSet};

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::ensemble::{
    error_rate, integrate_cyclic, integrate_majority, SolutionSet, WEIGHT_MATCH_TOL,
};
use crate::error::{Error, Result};
use crate::graph::{
    matching_weight, oracle_solve_with_cap, Matching, WeightConvention, WeightedBipartiteGraph,
};
use crate::io;
use crate::metrics::Trajectories;
use crate::qubo::{build_matching_qubo, QuboProblem, DEFAULT_LAMBDA};
use crate::solvers::{
    reverse_anneal, simulated_anneal, simulated_quantum_anneal, tts, AnnealSchedule, SolveResult,
};
use crate::tracking::{BoundingBox, Detection, FrameDetections, IntegratorChoice, SolverChoice};

/// Confidence level at which time-to-solution figures are reported.
pub const TTS_TARGET_PROB: f64 = 0.99;

/// Shape of the random-graph experiments.
///
/// Each graph is a bipartite `n`-by-`n` graph where every node has exactly
/// `degree` incident edges (a union of `degree` disjoint random
/// permutations) and edge weights are drawn uniformly from `weight_range`.
#[derive(Debug, Clone)]
pub struct BenchmarkSpec {
    /// Side sizes `n` to sweep.
    pub sizes: Vec<usize>,
    /// Edges per node; must not exceed any entry of `sizes`.
    pub degree: usize,
    /// Uniform weight band; `(-1, 0)`-style ranges build cost graphs,
    /// `(0, 1)`-style ranges build similarity graphs.
    pub weight_range: (f64, f64),
    /// Independent graphs per size.
    pub graphs_per_n: usize,
    /// Solver trials per graph.
    pub trials_per_graph: usize,
    /// Ensemble multiplicities `P` to evaluate.
    pub multiplicities: Vec<usize>,
    /// Per-bit corruption probability for warm-start experiments.
    pub flip_prob: f64,
    /// Base seed; every graph, trial, and corruption derives from it.
    pub seed: u64,
}

impl Default for BenchmarkSpec {
    fn default() -> Self {
        BenchmarkSpec {
            sizes: vec![4, 6, 8],
            degree: 4,
            weight_range: (-1.0, 0.0),
            graphs_per_n: 10,
            trials_per_graph: 250,
            multiplicities: vec![1, 2, 3, 5],
            flip_prob: 0.05,
            seed: 0,
        }
    }
}

impl BenchmarkSpec {
    pub fn validate(&self) -> Result<()> {
        if self.sizes.is_empty() {
            return Err(Error::InvalidParameter(
                "at least one graph size is required".into(),
            ));
        }
        for &n in &self.sizes {
            if self.degree > n {
                return Err(Error::InvalidParameter(format!(
                    "degree {} exceeds graph size {n}",
                    self.degree
                )));
            }
        }
        if self.degree == 0 {
            return Err(Error::InvalidParameter("degree must be at least 1".into()));
        }
        weight_convention(self.weight_range)?;
        if self.graphs_per_n == 0 || self.trials_per_graph == 0 {
            return Err(Error::InvalidParameter(
                "graphs_per_n and trials_per_graph must be at least 1".into(),
            ));
        }
        if self.multiplicities.is_empty() {
            return Err(Error::InvalidParameter(
                "at least one multiplicity is required".into(),
            ));
        }
        for &p in &self.multiplicities {
            if p == 0 {
                return Err(Error::InvalidParameter(
                    "multiplicities must be at least 1".into(),
                ));
            }
            if p > self.trials_per_graph {
                return Err(Error::InvalidParameter(format!(
                    "multiplicity {p} exceeds trials_per_graph {}",
                    self.trials_per_graph
                )));
            }
        }
        if !(0.0..=1.0).contains(&self.flip_prob) {
            return Err(Error::InvalidParameter(format!(
                "flip probability {} outside [0, 1]",
                self.flip_prob
            )));
        }
        Ok(())
    }
}

/// Infer the weight convention a uniform band belongs to.
fn weight_convention(range: (f64, f64)) -> Result<WeightConvention> {
    let (lo, hi) = range;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidParameter(format!(
            "weight range must be an ordered finite interval, got ({lo}, {hi})"
        )));
    }
    if lo >= -1.0 && hi <= 0.0 {
        Ok(WeightConvention::NegativeCost)
    } else if lo >= 0.0 && hi <= 1.0 {
        Ok(WeightConvention::Similarity)
    } else {
        Err(Error::InvalidParameter(format!(
            "weight range ({lo}, {hi}) fits neither [-1, 0] nor [0, 1]"
        )))
    }
}

/// Mix a base seed with two indices into an independent stream seed.
fn mix_seed(base: u64, a: u64, b: u64) -> u64 {
    base.wrapping_add(a.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(b.wrapping_mul(0xD1B5_4A32_D192_ED03))
}

/// Sample an `n`-by-`n` bipartite graph where every node has exactly
/// `degree` edges, as a superposition of `degree` disjoint random
/// permutations. Rejected permutations are re-drawn, so `degree == n`
/// yields the complete graph. Deterministic in `seed`.
pub fn gen_benchmark_graph(
    n: usize,
    degree: usize,
    weight_range: (f64, f64),
    seed: u64,
) -> Result<WeightedBipartiteGraph> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "graph size must be at least 1".into(),
        ));
    }
    if degree == 0 || degree > n {
        return Err(Error::InvalidParameter(format!(
            "degree must lie in 1..={n}, got {degree}"
        )));
    }
    let convention = weight_convention(weight_range)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // After d disjoint permutations the unused edges form an (n-d)-regular
    // bipartite graph, which always contains a perfect matching, so
    // rejection sampling the next permutation terminates for every
    // feasible degree.
    let mut used: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut ordered: Vec<(usize, usize)> = Vec::with_capacity(n * degree);
    let mut perm: Vec<usize> = (0..n).collect();
    for _ in 0..degree {
        const MAX_TRIES: usize = 1_000_000;
        let mut accepted = false;
        for _ in 0..MAX_TRIES {
            perm.shuffle(&mut rng);
            if perm
                .iter()
                .enumerate()
                .all(|(l, &r)| !used.contains(&(l, r)))
            {
                for (l, &r) in perm.iter().enumerate() {
                    used.insert((l, r));
                    ordered.push((l, r));
                }
                accepted = true;
                break;
            }
        }
        if !accepted {
            return Err(Error::InvalidParameter(format!(
                "failed to sample a degree-{degree} graph of size {n}"
            )));
        }
    }

    let (lo, hi) = weight_range;
    let edges: Vec<(usize, usize, f64)> = ordered
        .into_iter()
        .map(|(l, r)| (l, r, rng.gen_range(lo..=hi)))
        .collect();
    WeightedBipartiteGraph::new(n, n, edges, convention)
}

fn integrator_label(choice: IntegratorChoice) -> &'static str {
    match choice {
        IntegratorChoice::None => "none",
        IntegratorChoice::Majority => "majority",
        IntegratorChoice::Cyclic => "cyclic",
    }
}

fn solver_label(choice: SolverChoice) -> &'static str {
    match choice {
        SolverChoice::Sa => "sa",
        SolverChoice::Rsa => "rsa",
        SolverChoice::Sqa => "sqa",
        SolverChoice::Oracle => "oracle",
    }
}

/// One cell of the error-rate table.
#[derive(Debug, Clone)]
pub struct ErrorRateRow {
    pub n: usize,
    pub multiplicity: usize,
    pub solver: SolverChoice,
    pub integrator: IntegratorChoice,
    /// Ensembles measured (graphs x groups per graph).
    pub groups: usize,
    /// Fraction of ensembles whose integrated weight missed the optimum.
    pub error_rate: f64,
    /// Time-to-solution in sweep units (`P * sweeps` per ensemble).
    pub tts_sweeps: f64,
    /// Time-to-solution in wall seconds (timing diagnostic).
    pub tts_wall_s: f64,
}

/// CSV header matching [`ErrorRateRow::csv_row`].
pub const ERROR_RATE_CSV_HEADER: &str =
    "n,multiplicity,solver,integrator,groups,error_rate,tts_sweeps,tts_wall_s";

impl ErrorRateRow {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.n,
            self.multiplicity,
            solver_label(self.solver),
            integrator_label(self.integrator),
            self.groups,
            self.error_rate,
            self.tts_sweeps,
            self.tts_wall_s
        )
    }
}

/// Render error-rate rows as a CSV document.
pub fn error_rate_csv(rows: &[ErrorRateRow]) -> String {
    let mut out = String::from(ERROR_RATE_CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.csv_row());
        out.push('\n');
    }
    out
}

fn solve_forward(
    problem: &QuboProblem,
    solver: SolverChoice,
    sweeps: usize,
    trotter_slices: usize,
    trials: usize,
    seed: u64,
) -> Result<SolveResult> {
    let schedule = AnnealSchedule::forward(sweeps);
    match solver {
        SolverChoice::Sa => simulated_anneal(problem, &schedule, trials, seed),
        SolverChoice::Sqa => {
            simulated_quantum_anneal(problem, &schedule, trotter_slices, trials, seed)
        }
        other => Err(Error::InvalidParameter(format!(
            "the error-rate experiment samples stochastic forward solvers, not {}",
            solver_label(other)
        ))),
    }
}

/// Sweep sizes and multiplicities: per graph, draw `trials_per_graph`
/// solver samples, group consecutive samples into ensembles of `P`
/// identical-graph blocks, integrate each group, and score the integrated
/// matchings against the exact optimum by total weight.
///
/// Reported time-to-solution charges each ensemble `P * sweeps` sweep
/// units (or `P *` the measured mean trial seconds for the wall column).
pub fn run_error_rate_experiment(
    spec: &BenchmarkSpec,
    solver: SolverChoice,
    sweeps: usize,
    trotter_slices: usize,
    integrators: &[IntegratorChoice],
) -> Result<Vec<ErrorRateRow>> {
    spec.validate()?;
    if integrators.is_empty() {
        return Err(Error::InvalidParameter(
            "at least one integrator is required".into(),
        ));
    }
    if sweeps == 0 {
        return Err(Error::InvalidParameter(
            "sweep count must be at least 1".into(),
        ));
    }

    let mut rows = Vec::new();
    for &n in &spec.sizes {
        // (multiplicity, integrator index) -> (errors, groups)
        let mut cells: BTreeMap<(usize, usize), (usize, usize)> = BTreeMap::new();
        let mut wall_sum = 0.0;
        for g in 0..spec.graphs_per_n {
            let gseed = mix_seed(spec.seed, n as u64, g as u64);
            let graph = gen_benchmark_graph(n, spec.degree, spec.weight_range, gseed)?;
            let (oracle_matching, _) = oracle_solve_with_cap(&graph, graph.edges().len())?;
            let problem = build_matching_qubo(&graph, DEFAULT_LAMBDA)?;
            let result = solve_forward(
                &problem,
                solver,
                sweeps,
                trotter_slices,
                spec.trials_per_graph,
                gseed ^ 0x5A5A_5A5A_5A5A_5A5A,
            )?;
            wall_sum += result.wall_time_mean_s;
            let matchings: Vec<Matching> = result
                .samples
                .iter()
                .map(|s| {
                    let decoded = problem.decode(&s.state)?;
                    decoded
                        .into_iter()
                        .next()
                        .expect("single-block problem")
                        .into_matching()
                })
                .collect::<Result<_>>()?;

            for &p in &spec.multiplicities {
                for chunk in matchings.chunks_exact(p) {
                    let set = SolutionSet::new(vec![graph.clone(); p], chunk.to_vec())?;
                    for (ii, &integrator) in integrators.iter().enumerate() {
                        let integrated = match integrator {
                            IntegratorChoice::None => chunk[0].clone(),
                            IntegratorChoice::Majority => integrate_majority(&set),
                            IntegratorChoice::Cyclic => integrate_cyclic(&set),
                        };
                        let rate = error_rate(
                            std::slice::from_ref(&integrated),
                            &oracle_matching,
                            &graph,
                        )?;
                        let cell = cells.entry((p, ii)).or_insert((0, 0));
                        if rate > 0.5 {
                            cell.0 += 1;
                        }
                        cell.1 += 1;
                    }
                }
            }
        }

        let mean_wall = (wall_sum / spec.graphs_per_n as f64).max(1e-12);
        for &p in &spec.multiplicities {
            for (ii, &integrator) in integrators.iter().enumerate() {
                let (errors, groups) = cells[&(p, ii)];
                let err = errors as f64 / groups as f64;
                let p_success = 1.0 - err;
                rows.push(ErrorRateRow {
                    n,
                    multiplicity: p,
                    solver,
                    integrator,
                    groups,
                    error_rate: err,
                    tts_sweeps: tts((p * sweeps) as f64, p_success, TTS_TARGET_PROB)?,
                    tts_wall_s: tts(p as f64 * mean_wall, p_success, TTS_TARGET_PROB)?,
                });
            }
        }
    }
    Ok(rows)
}

/// One row of the warm-start experiment.
#[derive(Debug, Clone)]
pub struct ReverseRow {
    pub n: usize,
    pub flip_prob: f64,
    pub graphs: usize,
    pub reverse_error_rate: f64,
    pub forward_error_rate: f64,
    pub reverse_tts_sweeps: f64,
    pub forward_tts_sweeps: f64,
}

/// CSV header matching [`ReverseRow::csv_row`].
pub const REVERSE_CSV_HEADER: &str =
    "n,flip_prob,graphs,reverse_error_rate,forward_error_rate,reverse_tts_sweeps,forward_tts_sweeps";

impl ReverseRow {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.n,
            self.flip_prob,
            self.graphs,
            self.reverse_error_rate,
            self.forward_error_rate,
            self.reverse_tts_sweeps,
            self.forward_tts_sweeps
        )
    }
}

/// Render warm-start rows as a CSV document.
pub fn reverse_csv(rows: &[ReverseRow]) -> String {
    let mut out = String::from(REVERSE_CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.csv_row());
        out.push('\n');
    }
    out
}

/// Warm-start comparison: corrupt the exact optimum by flipping each bit
/// with probability `spec.flip_prob`, hand it to reverse annealing on a
/// `reverse_sweeps` budget, and race a cold forward run on
/// `forward_sweeps`. Both run one trial per graph; rates aggregate over
/// `spec.graphs_per_n` graphs per size.
///
/// With `flip_prob = 0` the reverse error rate is exactly zero: the
/// incumbent tracking starts at the warm state, so reheating can never
/// lose the optimum it was handed.
pub fn run_reverse_experiment(
    spec: &BenchmarkSpec,
    forward_sweeps: usize,
    reverse_sweeps: usize,
) -> Result<Vec<ReverseRow>> {
    spec.validate()?;
    if forward_sweeps == 0 || reverse_sweeps == 0 {
        return Err(Error::InvalidParameter(
            "sweep counts must be at least 1".into(),
        ));
    }

    let mut rows = Vec::new();
    for &n in &spec.sizes {
        let mut reverse_errors = 0usize;
        let mut forward_errors = 0usize;
        for g in 0..spec.graphs_per_n {
            let gseed = mix_seed(spec.seed, n as u64, g as u64);
            let graph = gen_benchmark_graph(n, spec.degree, spec.weight_range, gseed)?;
            let (oracle_matching, oracle_weight) =
                oracle_solve_with_cap(&graph, graph.edges().len())?;
            let problem = build_matching_qubo(&graph, DEFAULT_LAMBDA)?;

            let mut warm = problem.encode(std::slice::from_ref(&oracle_matching))?;
            let mut corrupt_rng = ChaCha8Rng::seed_from_u64(gseed ^ 0xC0C0_C0C0_C0C0_C0C0);
            for i in 0..warm.len() {
                if spec.flip_prob > 0.0 && corrupt_rng.gen_bool(spec.flip_prob) {
                    warm.flip(i);
                }
            }

            let reverse = reverse_anneal(
                &problem,
                &AnnealSchedule::reverse(reverse_sweeps),
                &warm,
                1,
                gseed ^ 0x0F0F_0F0F_0F0F_0F0F,
            )?;
            let forward = simulated_anneal(
                &problem,
                &AnnealSchedule::forward(forward_sweeps),
                1,
                gseed ^ 0xF0F0_F0F0_F0F0_F0F0,
            )?;

            for (result, errors) in [
                (&reverse, &mut reverse_errors),
                (&forward, &mut forward_errors),
            ] {
                let decoded = problem.decode(&result.best_state)?;
                let m = decoded
                    .into_iter()
                    .next()
                    .expect("single-block problem")
                    .into_matching()?;
                if (matching_weight(&graph, &m)? - oracle_weight).abs() > WEIGHT_MATCH_TOL {
                    *errors += 1;
                }
            }
        }

        let graphs = spec.graphs_per_n;
        let r_err = reverse_errors as f64 / graphs as f64;
        let f_err = forward_errors as f64 / graphs as f64;
        rows.push(ReverseRow {
            n,
            flip_prob: spec.flip_prob,
            graphs,
            reverse_error_rate: r_err,
            forward_error_rate: f_err,
            reverse_tts_sweeps: tts(reverse_sweeps as f64, 1.0 - r_err, TTS_TARGET_PROB)?,
            forward_tts_sweeps: tts(forward_sweeps as f64, 1.0 - f_err, TTS_TARGET_PROB)?,
        });
    }
    Ok(rows)
}

/// Spatial arrangement of the synthetic objects.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioLayout {
    /// Parallel horizontal lanes, one object each, moving rightward at
    /// per-object speeds. Objects never interact.
    Lanes,
    /// Objects paired head-on in shared lanes. Each pair meets mid-run
    /// and bounces: both reverse velocity, so the left object stays left.
    /// Around the meeting the boxes overlap so heavily that either
    /// pairing of predictions to detections clears an overlap gate —
    /// geometry alone cannot tell a bounce from a crossing.
    Crossing,
}

/// Shape of a generated tracking scenario.
#[derive(Debug, Clone)]
pub struct ScenarioSpec {
    pub num_objects: usize,
    pub frame_count: usize,
    pub frame_dims: (f64, f64),
    /// Width and height of every object box.
    pub box_size: (f64, f64),
    /// Base speed in pixels per frame.
    pub speed: f64,
    /// Detection jitter: each detected box is the true box shifted by a
    /// uniform offset in `[-motion_noise, motion_noise]` per axis.
    pub motion_noise: f64,
    /// Probability that any one detection is dropped.
    pub dropout: f64,
    /// Appearance-hash bits flipped per detection (distinct positions).
    pub hash_noise_bits: u32,
    pub layout: ScenarioLayout,
    pub seed: u64,
}

impl Default for ScenarioSpec {
    fn default() -> Self {
        ScenarioSpec {
            num_objects: 5,
            frame_count: 200,
            frame_dims: (640.0, 360.0),
            box_size: (20.0, 20.0),
            speed: 1.5,
            motion_noise: 0.5,
            dropout: 0.0,
            hash_noise_bits: 2,
            layout: ScenarioLayout::Lanes,
            seed: 0,
        }
    }
}

impl ScenarioSpec {
    pub fn validate(&self) -> Result<()> {
        if self.num_objects == 0 || self.frame_count == 0 {
            return Err(Error::InvalidParameter(
                "a scenario needs at least one object and one frame".into(),
            ));
        }
        let (fw, fh) = self.frame_dims;
        let (bw, bh) = self.box_size;
        if !(fw > 0.0 && fh > 0.0 && bw > 0.0 && bh > 0.0) {
            return Err(Error::InvalidParameter(
                "frame and box dimensions must be positive".into(),
            ));
        }
        if bw >= fw || bh >= fh {
            return Err(Error::InvalidParameter(
                "boxes must fit inside the frame".into(),
            ));
        }
        if !(self.speed.is_finite() && self.speed >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "speed must be non-negative, got {}",
                self.speed
            )));
        }
        if !(self.motion_noise.is_finite() && self.motion_noise >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "motion noise must be non-negative, got {}",
                self.motion_noise
            )));
        }
        if !(0.0..=1.0).contains(&self.dropout) {
            return Err(Error::InvalidParameter(format!(
                "dropout {} outside [0, 1]",
                self.dropout
            )));
        }
        if self.hash_noise_bits > 64 {
            return Err(Error::InvalidParameter(format!(
                "hash noise bits {} exceed the 64-bit hash",
                self.hash_noise_bits
            )));
        }
        Ok(())
    }
}

/// A generated scenario: labeled truth, a detection stream with hashes
/// attached, and the sidecar form of those hashes for serialization.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub ground_truth: Trajectories,
    pub frames: Vec<FrameDetections>,
    pub hashes: BTreeMap<(i64, usize), u64>,
    /// Noise-free appearance hash per object (index = object, id - 1).
    pub base_hashes: Vec<u64>,
}

impl Scenario {
    /// Ground truth as MOTChallenge-style CSV.
    pub fn ground_truth_csv(&self) -> String {
        let mut out = String::new();
        for frame in self.ground_truth.frames() {
            for (id, bbox) in self.ground_truth.at(frame) {
                out.push_str(&io::mot_line(frame, *id, bbox, 1.0));
                out.push('\n');
            }
        }
        out
    }

    /// Detections as MOTChallenge-style CSV (id column is `-1`).
    pub fn detections_csv(&self) -> String {
        let mut out = String::new();
        for f in &self.frames {
            for d in f.detections() {
                out.push_str(&io::mot_line(f.frame(), -1, &d.bbox, d.confidence));
                out.push('\n');
            }
        }
        out
    }

    /// Appearance hashes as sidecar CSV.
    pub fn hash_sidecar_csv(&self) -> String {
        io::hash_sidecar_csv(&self.hashes)
    }
}

/// True center of object `k` at frame step `t` (0-based).
fn true_center(spec: &ScenarioSpec, k: usize, t: usize) -> (f64, f64) {
    let (fw, fh) = spec.frame_dims;
    let n = spec.num_objects;
    let t = t as f64;
    match spec.layout {
        ScenarioLayout::Lanes => {
            let lane_y = (k as f64 + 1.0) * fh / (n as f64 + 1.0);
            let x0 = 20.0 + 7.0 * k as f64 + spec.box_size.0 / 2.0;
            let v = spec.speed * (1.0 + 0.15 * k as f64);
            (x0 + v * t, lane_y)
        }
        ScenarioLayout::Crossing => {
            let pairs = n.div_ceil(2);
            let pair = k / 2;
            let lane_y = (pair as f64 + 1.0) * fh / (pairs as f64 + 1.0);
            let t_meet = spec.frame_count as f64 / 2.0;
            let x_meet = fw / 2.0 + 5.0 * pair as f64;
            let delta = spec.speed * (t - t_meet).abs();
            if k == n - 1 && n % 2 == 1 {
                // An unpaired trailing object just runs its own lane.
                let x0 = 20.0 + spec.box_size.0 / 2.0;
                (x0 + spec.speed * t, fh - spec.box_size.1 / 2.0 - 10.0)
            } else if k.is_multiple_of(2) {
                // Even objects approach from the left and bounce back.
                (x_meet - delta, lane_y)
            } else {
                (x_meet + delta, lane_y)
            }
        }
    }
}

/// Generate a deterministic synthetic scenario.
///
/// Ground-truth ids are `1..=num_objects`; frames are `1..=frame_count`.
/// Detections inherit the object order within each frame (before
/// dropout), carry confidence 1, and get the object's base hash with
/// `hash_noise_bits` random bits flipped.
#[allow(clippy::needless_range_loop)] // k is the object id, not just a subscript
pub fn gen_scenario(spec: &ScenarioSpec) -> Result<Scenario> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let base_hashes: Vec<u64> = (0..spec.num_objects).map(|_| rng.gen()).collect();

    let (bw, bh) = spec.box_size;
    let mut ground_truth = Trajectories::default();
    let mut frames = Vec::with_capacity(spec.frame_count);
    let mut hashes = BTreeMap::new();

    for t in 0..spec.frame_count {
        let frame = t as i64 + 1;
        let mut dets = Vec::new();
        for k in 0..spec.num_objects {
            let (cx, cy) = true_center(spec, k, t);
            let truth = BoundingBox::new(cx - bw / 2.0, cy - bh / 2.0, bw, bh)?;
            ground_truth.push(frame, k as i64 + 1, truth);

            if spec.dropout > 0.0 && rng.gen_bool(spec.dropout) {
                continue;
            }
            let (mut dx, mut dy) = (0.0, 0.0);
            if spec.motion_noise > 0.0 {
                dx = rng.gen_range(-spec.motion_noise..=spec.motion_noise);
                dy = rng.gen_range(-spec.motion_noise..=spec.motion_noise);
            }
            let bbox = BoundingBox::new(truth.x + dx, truth.y + dy, bw, bh)?;

            let mut flipped = BTreeSet::new();
            while flipped.len() < spec.hash_noise_bits as usize {
                flipped.insert(rng.gen_range(0..64u32));
            }
            let hash = flipped
                .iter()
                .fold(base_hashes[k], |h, &bit| h ^ (1u64 << bit));

            hashes.insert((frame, dets.len()), hash);
            dets.push(Detection {
                bbox,
                confidence: 1.0,
                hash: Some(hash),
            });
        }
        frames.push(FrameDetections::new(frame, dets)?);
    }

    Ok(Scenario {
        ground_truth,
        frames,
        hashes,
        base_hashes,
    })
}
