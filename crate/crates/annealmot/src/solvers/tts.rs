//! Time-to-solution: expected annealing time to reach the optimum at a
//! target confidence, given the per-run success probability.

use crate::error::{Error, Result};
use crate::solvers::SolveResult;

/// Tolerance used when deciding that a trial reached the optimal energy.
pub const SUCCESS_ENERGY_TOL: f64 = 1e-9;

/// Time-to-solution at confidence `target_prob`.
///
/// A run of duration `annealing_time` succeeds with probability
/// `success_prob`. Reaching the optimum at least once with probability
/// `target_prob` then takes `log(1 - target_prob) / log(1 - success_prob)`
/// repetitions; when a single run already meets the target the time is the
/// run's own duration. A success probability of zero yields
/// `f64::INFINITY` as a documented sentinel.
///
/// `annealing_time` is unit-agnostic: pass sweeps or seconds and the result
/// comes back in the same unit.
pub fn tts(annealing_time: f64, success_prob: f64, target_prob: f64) -> Result<f64> {
    if !annealing_time.is_finite() || annealing_time <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "annealing time must be positive, got {annealing_time}"
        )));
    }
    if !(target_prob > 0.0 && target_prob < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "target probability must lie in (0, 1), got {target_prob}"
        )));
    }
    if !(0.0..=1.0).contains(&success_prob) {
        return Err(Error::InvalidParameter(format!(
            "success probability must lie in [0, 1], got {success_prob}"
        )));
    }
    if success_prob == 0.0 {
        return Ok(f64::INFINITY);
    }
    if success_prob >= target_prob {
        return Ok(annealing_time);
    }
    Ok(annealing_time * (1.0 - target_prob).ln() / (1.0 - success_prob).ln())
}

/// Estimate the success probability of a finished run against a known
/// optimal energy, then convert it to a time-to-solution.
pub fn measure_tts(
    result: &SolveResult,
    optimal_energy: f64,
    target_prob: f64,
    annealing_time: f64,
) -> Result<f64> {
    let p_success = result.success_probability(optimal_energy, SUCCESS_ENERGY_TOL);
    tts(annealing_time, p_success, target_prob)
}
