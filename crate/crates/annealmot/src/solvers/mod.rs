//! Classical annealers for compiled matching QUBOs.
//!
//! Three solvers share one Metropolis single-bit-flip core and differ only
//! in their temperature program and starting point:
//!
//! * [`simulated_anneal`] — forward annealing from a random state, cooling
//!   geometrically from hot to cold;
//! * [`reverse_anneal`] — starts from a caller-supplied warm start, reheats
//!   to a turning point, pauses there so the neighborhood can thermalize,
//!   and cools back down;
//! * [`simulated_quantum_anneal`] — a path-integral Monte Carlo analog
//!   with coupled Trotter slices and a decaying transverse field.
//!
//! Every trial's best state passes through [`repair_feasibility`] before it
//! is reported, so samples always decode to valid maximal matchings; the
//! pre-repair energy is preserved alongside for diagnostics.

mod repair;
mod sqa;
mod tts;

pub use repair::repair_feasibility;
pub use sqa::{simulated_quantum_anneal, DEFAULT_TROTTER_SLICES};
pub use tts::{measure_tts, tts};

use std::time::Instant;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qubo::{BinaryState, QuboProblem};

/// Default sweep budget for forward annealing.
pub const DEFAULT_FORWARD_SWEEPS: usize = 250;
/// Default trial count for forward annealing.
pub const DEFAULT_FORWARD_TRIALS: usize = 100;
/// Reverse runs default to 30% of the forward sweep budget: a warm start
/// close to the optimum needs far less annealing time than a cold start.
pub const DEFAULT_REVERSE_SWEEPS: usize = 75;
/// A single reverse trial is the default; the warm start replaces repeats.
pub const DEFAULT_REVERSE_TRIALS: usize = 1;
/// Default reverse turning point as a fraction of the hot temperature.
pub const DEFAULT_TURNING_POINT: f64 = 0.5;
/// Default fraction of a reverse run spent paused at the turning point.
pub const DEFAULT_PAUSE_FRACTION: f64 = 0.25;

/// Temperature program for an annealing run, measured in sweeps (one sweep
/// visits every variable once in shuffled order).
#[derive(Debug, Clone, PartialEq)]
pub enum AnnealSchedule {
    /// Cool geometrically from the hot temperature to the cold one.
    Forward { sweeps: usize },
    /// Start cold (warm start), reheat to `turning_point` times the hot
    /// temperature, hold there for `pause_fraction` of the budget, then
    /// cool back down.
    Reverse {
        sweeps: usize,
        turning_point: f64,
        pause_fraction: f64,
    },
}

impl AnnealSchedule {
    pub fn forward(sweeps: usize) -> Self {
        AnnealSchedule::Forward { sweeps }
    }

    pub fn forward_default() -> Self {
        Self::forward(DEFAULT_FORWARD_SWEEPS)
    }

    /// A reverse schedule with the default turning point and pause.
    pub fn reverse(sweeps: usize) -> Self {
        AnnealSchedule::Reverse {
            sweeps,
            turning_point: DEFAULT_TURNING_POINT,
            pause_fraction: DEFAULT_PAUSE_FRACTION,
        }
    }

    pub fn reverse_default() -> Self {
        Self::reverse(DEFAULT_REVERSE_SWEEPS)
    }

    pub fn sweeps(&self) -> usize {
        match *self {
            AnnealSchedule::Forward { sweeps } => sweeps,
            AnnealSchedule::Reverse { sweeps, .. } => sweeps,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.sweeps() == 0 {
            return Err(Error::InvalidParameter(
                "sweep count must be at least 1".into(),
            ));
        }
        if let AnnealSchedule::Reverse {
            turning_point,
            pause_fraction,
            ..
        } = *self
        {
            if !(turning_point > 0.0 && turning_point < 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "reverse turning point must lie in (0, 1), got {turning_point}"
                )));
            }
            if !(0.0..1.0).contains(&pause_fraction) {
                return Err(Error::InvalidParameter(format!(
                    "pause fraction must lie in [0, 1), got {pause_fraction}"
                )));
            }
        }
        Ok(())
    }

    /// Per-sweep temperatures between the problem-derived anchors.
    fn temperatures(&self, t_hot: f64, t_cold: f64) -> Vec<f64> {
        match *self {
            AnnealSchedule::Forward { sweeps } => geometric_ramp(t_hot, t_cold, sweeps),
            AnnealSchedule::Reverse {
                sweeps,
                turning_point,
                pause_fraction,
            } => {
                let t_turn = turning_point * t_hot;
                let pause = (pause_fraction * sweeps as f64).round() as usize;
                let pause = pause.min(sweeps.saturating_sub(2));
                let up = ((sweeps - pause) / 2).max(1).min(sweeps - pause);
                let down = sweeps - pause - up;
                let mut temps = geometric_ramp(t_cold, t_turn, up);
                temps.extend(std::iter::repeat_n(t_turn, pause));
                temps.extend(geometric_ramp(t_turn, t_cold, down));
                temps
            }
        }
    }
}

/// Geometric interpolation from `from` to `to` inclusive, `len` points.
fn geometric_ramp(from: f64, to: f64, len: usize) -> Vec<f64> {
    match len {
        0 => Vec::new(),
        1 => vec![from],
        _ => {
            let ratio = to / from;
            (0..len)
                .map(|i| from * ratio.powf(i as f64 / (len - 1) as f64))
                .collect()
        }
    }
}

/// One annealing trial's outcome.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialSample {
    /// Best state seen in the trial, after feasibility repair.
    pub state: BinaryState,
    /// Energy of the repaired state.
    pub energy: f64,
    /// Energy of the trial's best state before repair.
    pub raw_energy: f64,
}

/// Aggregated outcome of a multi-trial annealing run.
///
/// `best_state`/`best_energy` are the minimum-energy repaired sample, with
/// ties going to the earliest trial. The wall-clock fields are timing
/// diagnostics and are the only non-deterministic part of the result.
#[derive(Debug, Clone, Serialize)]
pub struct SolveResult {
    pub best_state: BinaryState,
    pub best_energy: f64,
    pub samples: Vec<TrialSample>,
    pub sweeps_per_trial: usize,
    /// Mean wall-clock seconds per trial (timing diagnostic).
    pub wall_time_mean_s: f64,
    /// Population standard deviation of per-trial wall-clock seconds.
    pub wall_time_std_s: f64,
}

impl SolveResult {
    pub fn trial_count(&self) -> usize {
        self.samples.len()
    }

    /// Fraction of trials whose repaired energy reached `target_energy`
    /// within `tol`.
    pub fn success_probability(&self, target_energy: f64, tol: f64) -> f64 {
        let hits = self
            .samples
            .iter()
            .filter(|s| s.energy <= target_energy + tol)
            .count();
        hits as f64 / self.samples.len() as f64
    }
}

/// Hot-temperature anchor: twice the largest coefficient magnitude, so the
/// first sweeps accept nearly every move.
fn hot_temperature(problem: &QuboProblem) -> f64 {
    2.0 * problem.max_abs_coeff()
}

/// Cold-temperature anchor: 1% of the smallest nonzero coefficient, so the
/// last sweeps are effectively greedy.
fn cold_temperature(problem: &QuboProblem) -> f64 {
    0.01 * problem.min_abs_nonzero_coeff()
}

/// Metropolis single-bit-flip dynamics over the given temperature ladder.
/// Returns the best state encountered (which may be the initial state).
fn metropolis_trial(
    problem: &QuboProblem,
    temps: &[f64],
    mut state: BinaryState,
    rng: &mut ChaCha8Rng,
) -> BinaryState {
    let mut energy = problem.energy(&state).expect("caller sizes the state");
    let mut best = state.clone();
    let mut best_energy = energy;
    let mut order: Vec<usize> = (0..problem.num_vars()).collect();
    for &t in temps {
        order.shuffle(rng);
        for &i in &order {
            let delta = problem.flip_delta(&state, i);
            if delta <= 0.0 || rng.gen::<f64>() < (-delta / t).exp() {
                state.flip(i);
                energy += delta;
                if energy < best_energy {
                    best_energy = energy;
                    best = state.clone();
                }
            }
        }
    }
    best
}

/// Shared multi-trial driver: run one Metropolis trial per seed, repair
/// each trial's best state, and fold the samples in trial order.
fn run_trials(
    problem: &QuboProblem,
    temps: &[f64],
    sweeps: usize,
    trials: usize,
    seed: u64,
    init: &(dyn Fn(&mut ChaCha8Rng) -> BinaryState + Sync),
) -> Result<SolveResult> {
    if trials == 0 {
        return Err(Error::InvalidParameter(
            "trial count must be at least 1".into(),
        ));
    }
    let outcomes: Vec<(TrialSample, f64)> = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<(TrialSample, f64)> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(t as u64));
            let start = Instant::now();
            let initial = init(&mut rng);
            let raw_best = metropolis_trial(problem, temps, initial, &mut rng);
            let raw_energy = problem.energy(&raw_best)?;
            let repaired = repair_feasibility(problem, &raw_best)?;
            let energy = problem.energy(&repaired)?;
            let secs = start.elapsed().as_secs_f64();
            Ok((
                TrialSample {
                    state: repaired,
                    energy,
                    raw_energy,
                },
                secs,
            ))
        })
        .collect::<Result<_>>()?;

    let mut samples = Vec::with_capacity(trials);
    let mut times = Vec::with_capacity(trials);
    for (sample, secs) in outcomes {
        samples.push(sample);
        times.push(secs);
    }
    let mut best_idx = 0;
    for (i, s) in samples.iter().enumerate() {
        if s.energy < samples[best_idx].energy {
            best_idx = i;
        }
    }
    let mean = times.iter().sum::<f64>() / times.len() as f64;
    let var = times.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / times.len() as f64;
    Ok(SolveResult {
        best_state: samples[best_idx].state.clone(),
        best_energy: samples[best_idx].energy,
        samples,
        sweeps_per_trial: sweeps,
        wall_time_mean_s: mean,
        wall_time_std_s: var.sqrt(),
    })
}

/// Forward simulated annealing from random initial states.
///
/// Each trial draws an independent starting state and anneals it down the
/// geometric temperature ladder; trial `t` uses the derived seed
/// `seed + t`, so runs are reproducible and trials may execute in parallel.
pub fn simulated_anneal(
    problem: &QuboProblem,
    schedule: &AnnealSchedule,
    trials: usize,
    seed: u64,
) -> Result<SolveResult> {
    if !matches!(schedule, AnnealSchedule::Forward { .. }) {
        return Err(Error::InvalidParameter(
            "forward annealing requires a Forward schedule".into(),
        ));
    }
    schedule.validate()?;
    let temps = schedule.temperatures(hot_temperature(problem), cold_temperature(problem));
    let n = problem.num_vars();
    run_trials(
        problem,
        &temps,
        schedule.sweeps(),
        trials,
        seed,
        &move |rng| BinaryState::from_bits((0..n).map(|_| rng.gen_bool(0.5)).collect()),
    )
}

/// Reverse annealing: refine `initial` instead of starting from scratch.
///
/// The temperature rises from cold to the schedule's turning point, pauses
/// there so the warm start's neighborhood can thermalize, and descends
/// again. With a good warm start this recovers the optimum in a fraction
/// of the forward sweep budget; see [`DEFAULT_REVERSE_SWEEPS`].
pub fn reverse_anneal(
    problem: &QuboProblem,
    schedule: &AnnealSchedule,
    initial: &BinaryState,
    trials: usize,
    seed: u64,
) -> Result<SolveResult> {
    if !matches!(schedule, AnnealSchedule::Reverse { .. }) {
        return Err(Error::InvalidParameter(
            "reverse annealing requires a Reverse schedule".into(),
        ));
    }
    schedule.validate()?;
    if initial.len() != problem.num_vars() {
        return Err(Error::StateLength {
            got: initial.len(),
            want: problem.num_vars(),
        });
    }
    let temps = schedule.temperatures(hot_temperature(problem), cold_temperature(problem));
    let start = initial.clone();
    run_trials(
        problem,
        &temps,
        schedule.sweeps(),
        trials,
        seed,
        &move |_| start.clone(),
    )
}
