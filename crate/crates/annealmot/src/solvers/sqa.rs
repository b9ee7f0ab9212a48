//! Simulated quantum annealing: path-integral Monte Carlo with Trotter
//! slices coupled along the imaginary-time direction.
//!
//! The transverse field Γ decays linearly over the run. Each sweep,
//! neighboring slices are pulled together by the coupling
//! `J_perp = -(1/2) * ln tanh(Γ / (slices * T))`, which starts near zero
//! (slices explore independently) and grows without bound as Γ → 0
//! (slices freeze into one classical state). This mimics quantum-fluctuation
//!-driven search classically; it makes no claim of simulating unitary
//! dynamics.

use std::time::Instant;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::qubo::{BinaryState, QuboProblem};
use crate::solvers::{repair_feasibility, AnnealSchedule, SolveResult, TrialSample};

/// Default number of Trotter slices.
pub const DEFAULT_TROTTER_SLICES: usize = 8;

/// Initial transverse field as a multiple of the largest coefficient.
const GAMMA_HOT_FACTOR: f64 = 2.5;
/// Final transverse field (kept nonzero so `ln tanh` stays finite).
const GAMMA_COLD_FACTOR: f64 = 0.01;
/// Fixed Monte Carlo temperature as a multiple of the largest coefficient.
const SLICE_TEMPERATURE_FACTOR: f64 = 0.075;

/// Path-integral simulated quantum annealing.
///
/// Takes a `Forward` schedule for its sweep budget (the transverse field,
/// not the temperature, is what anneals here). Per sweep, every slice gets
/// a shuffled Metropolis pass whose move cost combines the slice's share of
/// the problem energy with the inter-slice coupling, followed by a global
/// pass that proposes flipping one variable across all slices at once so
/// frozen replicas can still move together. The best slice seen anywhere
/// in the run is the trial's candidate, repaired before reporting.
pub fn simulated_quantum_anneal(
    problem: &QuboProblem,
    schedule: &AnnealSchedule,
    trotter_slices: usize,
    trials: usize,
    seed: u64,
) -> Result<SolveResult> {
    if !matches!(schedule, AnnealSchedule::Forward { .. }) {
        return Err(Error::InvalidParameter(
            "simulated quantum annealing requires a Forward schedule".into(),
        ));
    }
    if schedule.sweeps() == 0 {
        return Err(Error::InvalidParameter(
            "sweep count must be at least 1".into(),
        ));
    }
    if trotter_slices < 2 {
        return Err(Error::InvalidParameter(format!(
            "at least 2 Trotter slices are required, got {trotter_slices}"
        )));
    }
    if trials == 0 {
        return Err(Error::InvalidParameter(
            "trial count must be at least 1".into(),
        ));
    }

    let sweeps = schedule.sweeps();
    let scale = problem.max_abs_coeff();
    let gamma_hot = GAMMA_HOT_FACTOR * scale;
    let gamma_cold = GAMMA_COLD_FACTOR * scale;
    let temperature = SLICE_TEMPERATURE_FACTOR * scale;
    let n = problem.num_vars();
    let p = trotter_slices;

    let outcomes: Vec<(TrialSample, f64)> = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<(TrialSample, f64)> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(t as u64));
            let start = Instant::now();

            let mut slices: Vec<BinaryState> = (0..p)
                .map(|_| BinaryState::from_bits((0..n).map(|_| rng.gen_bool(0.5)).collect()))
                .collect();
            let mut slice_energy: Vec<f64> = slices
                .iter()
                .map(|s| problem.energy(s).expect("sized state"))
                .collect();
            let mut best_idx = 0;
            for k in 1..p {
                if slice_energy[k] < slice_energy[best_idx] {
                    best_idx = k;
                }
            }
            let mut best = slices[best_idx].clone();
            let mut best_energy = slice_energy[best_idx];

            let mut order: Vec<usize> = (0..n).collect();
            let spin = |b: bool| if b { 1.0 } else { -1.0 };
            for s in 0..sweeps {
                let frac = if sweeps > 1 {
                    s as f64 / (sweeps - 1) as f64
                } else {
                    1.0
                };
                let gamma = gamma_hot + (gamma_cold - gamma_hot) * frac;
                let j_perp = -0.5 * (gamma / (p as f64 * temperature)).tanh().ln();

                for k in 0..p {
                    let (prev, next) = ((k + p - 1) % p, (k + 1) % p);
                    order.shuffle(&mut rng);
                    for &i in &order {
                        let problem_delta = problem.flip_delta(&slices[k], i);
                        let sigma = spin(slices[k].get(i));
                        let neighbor = spin(slices[prev].get(i)) + spin(slices[next].get(i));
                        let delta = problem_delta / p as f64 + 2.0 * j_perp * sigma * neighbor;
                        if delta <= 0.0 || rng.gen::<f64>() < (-delta / temperature).exp() {
                            slices[k].flip(i);
                            slice_energy[k] += problem_delta;
                            if slice_energy[k] < best_energy {
                                best_energy = slice_energy[k];
                                best = slices[k].clone();
                            }
                        }
                    }
                }
                // Global pass: flip variable i in every slice at once. The
                // inter-slice coupling is unchanged by a joint flip, so only
                // the problem energies enter the acceptance test.
                order.shuffle(&mut rng);
                for &i in &order {
                    let deltas: Vec<f64> =
                        (0..p).map(|k| problem.flip_delta(&slices[k], i)).collect();
                    let total: f64 = deltas.iter().sum();
                    let delta = total / p as f64;
                    if delta <= 0.0 || rng.gen::<f64>() < (-delta / temperature).exp() {
                        for k in 0..p {
                            slices[k].flip(i);
                            slice_energy[k] += deltas[k];
                            if slice_energy[k] < best_energy {
                                best_energy = slice_energy[k];
                                best = slices[k].clone();
                            }
                        }
                    }
                }
            }

            let raw_energy = problem.energy(&best)?;
            let repaired = repair_feasibility(problem, &best)?;
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
    let var = times.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / times.len() as f64;
    Ok(SolveResult {
        best_state: samples[best_idx].state.clone(),
        best_energy: samples[best_idx].energy,
        samples,
        sweeps_per_trial: sweeps,
        wall_time_mean_s: mean,
        wall_time_std_s: var.sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{oracle_solve, WeightConvention, WeightedBipartiteGraph};
    use crate::qubo::build_matching_qubo;

    fn star_problem() -> QuboProblem {
        let g = WeightedBipartiteGraph::new(
            1,
            2,
            [(0, 0, 0.8), (0, 1, 0.6)],
            WeightConvention::Similarity,
        )
        .unwrap();
        build_matching_qubo(&g, 0.7).unwrap()
    }

    #[test]
    fn single_edge_problems_reach_the_optimum_in_almost_every_trial() {
        let g =
            WeightedBipartiteGraph::new(1, 1, [(0, 0, 0.8)], WeightConvention::Similarity).unwrap();
        let q = build_matching_qubo(&g, 0.7).unwrap();
        let result = simulated_quantum_anneal(
            &q,
            &AnnealSchedule::forward(100),
            DEFAULT_TROTTER_SLICES,
            100,
            13,
        )
        .unwrap();
        assert!(result.success_probability(-0.8, 1e-9) >= 0.99);
    }

    #[test]
    fn star_problem_relaxes_to_the_heavier_edge() {
        let result = simulated_quantum_anneal(
            &star_problem(),
            &AnnealSchedule::forward(150),
            DEFAULT_TROTTER_SLICES,
            20,
            29,
        )
        .unwrap();
        assert!((result.best_energy + 0.8).abs() < 1e-12);
    }

    #[test]
    fn association_example_matches_the_oracle() {
        let g = WeightedBipartiteGraph::new(
            2,
            2,
            [(0, 0, 0.9), (0, 1, 0.8), (1, 0, 0.7), (1, 1, 0.1)],
            WeightConvention::Similarity,
        )
        .unwrap();
        let q = build_matching_qubo(&g, 0.7).unwrap();
        let (_, weight) = oracle_solve(&g).unwrap();
        let result = simulated_quantum_anneal(
            &q,
            &AnnealSchedule::forward_default(),
            DEFAULT_TROTTER_SLICES,
            20,
            31,
        )
        .unwrap();
        assert!((result.best_energy + weight).abs() < 1e-9);
    }

    #[test]
    fn parameters_are_validated() {
        let q = star_problem();
        assert!(matches!(
            simulated_quantum_anneal(&q, &AnnealSchedule::reverse_default(), 8, 1, 1),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            simulated_quantum_anneal(&q, &AnnealSchedule::forward(50), 1, 1, 1),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            simulated_quantum_anneal(&q, &AnnealSchedule::forward(50), 8, 0, 1),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn runs_reproduce_for_a_fixed_seed() {
        let q = star_problem();
        let a = simulated_quantum_anneal(&q, &AnnealSchedule::forward(60), 4, 6, 77).unwrap();
        let b = simulated_quantum_anneal(&q, &AnnealSchedule::forward(60), 4, 6, 77).unwrap();
        assert_eq!(a.best_state, b.best_state);
        for (x, y) in a.samples.iter().zip(&b.samples) {
            assert_eq!(x, y);
        }
    }
}
