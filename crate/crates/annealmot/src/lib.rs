//! Multi-object tracking as annealed QUBO matching.
//!
//! The crate turns the frame-association step of multi-object tracking into
//! a max-weight maximal matching problem, compiles it to a quadratic
//! unconstrained binary optimization (QUBO) instance, and solves it with
//! classical annealers — forward simulated annealing, a reverse schedule
//! that refines a warm start, and a path-integral simulated quantum
//! annealer. Several trackers with different edge weightings can share one
//! multiplexed QUBO; their per-tracker matchings are then merged by
//! ensemble integration.
//!
//! Module map:
//!
//! * [`graph`] — bipartite graphs, matchings, and an exact reference solver;
//! * [`qubo`] — matching-to-QUBO compilation, energies, encode/decode;
//! * [`solvers`] — annealers, feasibility repair, time-to-solution;
//! * [`ensemble`] — majority-vote and cyclic integration of matchings;
//! * [`tracking`] — Kalman prediction, IoU and perceptual-hash weights,
//!   location-code warm starts, and the per-frame tracking step;
//! * [`metrics`] — MOTA, IDF1, association-performance error, detection PRF;
//! * [`mod@bench`] — synthetic benchmark graphs, error-rate and reverse-anneal
//!   experiments, and scenario generation;
//! * [`io`] — CSV, config, and image plumbing shared by the CLI;
//! * [`cli`] — the subcommand front end used by the `annealmot` binary.

#![forbid(unsafe_code)]

pub mod bench;
pub mod cli;
pub mod ensemble;
pub mod error;
pub mod graph;
pub mod io;
pub mod metrics;
pub mod qubo;
pub mod solvers;
pub mod tracking;

pub use error::{Error, Result};
