//! The multi-object-tracking front end.
//!
//! Each frame, live tracks are advanced by a constant-velocity Kalman
//! filter, candidate track–detection pairs are scored under one or more
//! weight models (motion overlap and appearance-hash similarity, gated so
//! every model sees the same edge set), and the resulting multiplexed
//! matching problem goes through the annealing stack. The integrated
//! matching drives the track lifecycle: assigned tracks update, missed
//! tracks age out after a few frames, and unmatched detections spawn
//! provisional tracks that must be re-detected before they count.

pub mod kalman;
pub mod location;
pub mod phash;

pub use kalman::KalmanState;
pub use location::{location_code, warm_start, LocationCode, DEFAULT_GRID};
pub use phash::{hash_similarity, perceptual_hash, GrayImage};

use serde::Serialize;

use crate::ensemble::{integrate_cyclic, integrate_majority, SolutionSet};
use crate::error::{Error, Result};
use crate::graph::{oracle_solve, Matching, WeightConvention, WeightedBipartiteGraph};
use crate::qubo::build_multiplexed_qubo;
use crate::solvers::{
    reverse_anneal, simulated_anneal, simulated_quantum_anneal, AnnealSchedule,
    DEFAULT_FORWARD_SWEEPS, DEFAULT_FORWARD_TRIALS, DEFAULT_TROTTER_SLICES,
};

pub const DEFAULT_IOU_GATE: f64 = 0.1;
pub const DEFAULT_MAX_AGE: u32 = 3;
pub const DEFAULT_MIN_HITS: u32 = 2;

/// Axis-aligned pixel rectangle with a strictly positive extent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundingBox {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl BoundingBox {
    pub fn new(x: f64, y: f64, w: f64, h: f64) -> Result<Self> {
        if !(x.is_finite() && y.is_finite() && w.is_finite() && h.is_finite()) {
            return Err(Error::InvalidParameter(
                "box coordinates must be finite".into(),
            ));
        }
        if w <= 0.0 || h <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "box extents must be positive, got {w}x{h}"
            )));
        }
        Ok(BoundingBox { x, y, w, h })
    }

    pub fn center(&self) -> (f64, f64) {
        (self.x + self.w / 2.0, self.y + self.h / 2.0)
    }

    pub fn area(&self) -> f64 {
        self.w * self.h
    }
}

/// Intersection over union of two boxes, in `[0, 1]`.
pub fn iou(a: &BoundingBox, b: &BoundingBox) -> f64 {
    let ix = (a.x + a.w).min(b.x + b.w) - a.x.max(b.x);
    let iy = (a.y + a.h).min(b.y + b.h) - a.y.max(b.y);
    if ix <= 0.0 || iy <= 0.0 {
        return 0.0;
    }
    let inter = ix * iy;
    inter / (a.area() + b.area() - inter)
}

/// One detector output: a box, its confidence, and optionally a
/// precomputed 64-bit appearance hash.
#[derive(Debug, Clone)]
pub struct Detection {
    pub bbox: BoundingBox,
    pub confidence: f64,
    pub hash: Option<u64>,
}

/// All detections of one frame.
#[derive(Debug, Clone)]
pub struct FrameDetections {
    frame: i64,
    detections: Vec<Detection>,
}

impl FrameDetections {
    pub fn new(frame: i64, detections: Vec<Detection>) -> Result<Self> {
        for d in &detections {
            if !(0.0..=1.0).contains(&d.confidence) {
                return Err(Error::InvalidParameter(format!(
                    "detection confidence {} outside [0, 1]",
                    d.confidence
                )));
            }
        }
        Ok(FrameDetections { frame, detections })
    }

    pub fn frame(&self) -> i64 {
        self.frame
    }

    pub fn detections(&self) -> &[Detection] {
        &self.detections
    }
}

/// One live track: filter state, appearance, bookkeeping.
#[derive(Debug, Clone)]
pub struct Track {
    id: u64,
    kalman: KalmanState,
    last_hash: Option<u64>,
    age_since_update: u32,
    hits: u32,
    confirmed: bool,
    history: Vec<(i64, BoundingBox)>,
}

impl Track {
    pub fn id(&self) -> u64 {
        self.id
    }

    /// Box at the filter's current (predicted) state.
    pub fn predicted_bbox(&self) -> BoundingBox {
        self.kalman.bbox()
    }

    pub fn last_hash(&self) -> Option<u64> {
        self.last_hash
    }

    pub fn age_since_update(&self) -> u32 {
        self.age_since_update
    }

    pub fn hits(&self) -> u32 {
        self.hits
    }

    /// Whether the track has been re-detected often enough to count.
    pub fn is_confirmed(&self) -> bool {
        self.confirmed
    }

    pub fn history(&self) -> &[(i64, BoundingBox)] {
        &self.history
    }
}

/// One output row: a confirmed track's box at a frame.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TrackRecord {
    pub frame: i64,
    pub track_id: u64,
    pub bbox: BoundingBox,
}

/// The live track population plus the run's accumulated output.
#[derive(Debug, Clone, Default)]
pub struct TrackSet {
    tracks: Vec<Track>,
    next_id: u64,
    last_frame: Option<i64>,
    confirmed_count: u64,
    records: Vec<TrackRecord>,
}

impl TrackSet {
    pub fn new() -> Self {
        TrackSet {
            next_id: 1,
            ..TrackSet::default()
        }
    }

    pub fn tracks(&self) -> &[Track] {
        &self.tracks
    }

    /// Output rows of every confirmed track, in frame order.
    pub fn records(&self) -> &[TrackRecord] {
        &self.records
    }

    /// How many distinct tracks ever reached confirmation.
    pub fn confirmed_track_count(&self) -> u64 {
        self.confirmed_count
    }
}

/// A way of weighting a track–detection edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightModel {
    /// Overlap between the Kalman-predicted box and the detected box.
    Iou,
    /// Appearance-hash similarity; falls back to the overlap weight when
    /// either side has no hash.
    Hash,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverChoice {
    Sa,
    Rsa,
    Sqa,
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntegratorChoice {
    /// Take the first block's matching as-is.
    None,
    Majority,
    Cyclic,
}

/// Everything the per-frame step needs to know.
#[derive(Debug, Clone)]
pub struct TrackerConfig {
    pub models: Vec<WeightModel>,
    pub solver: SolverChoice,
    pub integrator: IntegratorChoice,
    pub lambda: f64,
    pub sweeps: usize,
    pub trials: usize,
    pub trotter_slices: usize,
    pub seed: u64,
    pub iou_gate: f64,
    pub max_age: u32,
    pub min_hits: u32,
    pub grid: (usize, usize),
    pub frame_dims: (f64, f64),
}

impl Default for TrackerConfig {
    fn default() -> Self {
        TrackerConfig {
            models: vec![WeightModel::Iou, WeightModel::Hash],
            solver: SolverChoice::Sa,
            integrator: IntegratorChoice::Cyclic,
            lambda: crate::qubo::DEFAULT_LAMBDA,
            sweeps: DEFAULT_FORWARD_SWEEPS,
            trials: DEFAULT_FORWARD_TRIALS,
            trotter_slices: DEFAULT_TROTTER_SLICES,
            seed: 0,
            iou_gate: DEFAULT_IOU_GATE,
            max_age: DEFAULT_MAX_AGE,
            min_hits: DEFAULT_MIN_HITS,
            grid: DEFAULT_GRID,
            frame_dims: (640.0, 360.0),
        }
    }
}

/// Advance every track's filter one frame and report the predictions.
pub fn predict_tracks(tracks: &mut TrackSet) -> Vec<(u64, BoundingBox)> {
    tracks
        .tracks
        .iter_mut()
        .map(|t| {
            t.kalman.predict();
            (t.id, t.kalman.bbox())
        })
        .collect()
}

/// One bipartite graph per weight model, all over the same nodes (tracks
/// left, detections right) and — by construction — the same edge set: an
/// edge exists wherever predicted-box overlap clears `iou_gate`,
/// whichever model then weights it.
pub fn build_frame_graphs(
    tracks: &TrackSet,
    dets: &FrameDetections,
    models: &[WeightModel],
    iou_gate: f64,
) -> Result<Vec<WeightedBipartiteGraph>> {
    if models.is_empty() {
        return Err(Error::InvalidParameter(
            "at least one weight model is required".into(),
        ));
    }
    let n_left = tracks.tracks.len();
    let n_right = dets.detections.len();
    let mut per_model: Vec<Vec<(usize, usize, f64)>> = vec![Vec::new(); models.len()];
    for (i, t) in tracks.tracks.iter().enumerate() {
        let predicted = t.kalman.bbox();
        for (j, d) in dets.detections.iter().enumerate() {
            let overlap = iou(&predicted, &d.bbox);
            if overlap <= iou_gate {
                continue;
            }
            for (m, model) in models.iter().enumerate() {
                let weight = match model {
                    WeightModel::Iou => overlap,
                    WeightModel::Hash => match (t.last_hash, d.hash) {
                        (Some(a), Some(b)) => hash_similarity(a, b),
                        _ => overlap,
                    },
                };
                per_model[m].push((i, j, weight));
            }
        }
    }
    per_model
        .into_iter()
        .map(|edges| {
            WeightedBipartiteGraph::new(n_left, n_right, edges, WeightConvention::Similarity)
        })
        .collect()
}

fn frame_seed(base: u64, frame: i64) -> u64 {
    base.wrapping_add((frame as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Solve one frame's association problem and apply the result to the
/// track set. Returns the `(track_id, detection_index)` assignments.
///
/// Frames must arrive strictly in order. Tracks missing from the
/// assignment age and are dropped once they exceed `max_age` missed
/// frames; detections missing from it spawn new provisional tracks.
pub fn step_tracking(
    tracks: &mut TrackSet,
    dets: &FrameDetections,
    config: &TrackerConfig,
) -> Result<Vec<(u64, usize)>> {
    if let Some(last) = tracks.last_frame {
        if dets.frame <= last {
            return Err(Error::FrameOrder {
                got: dets.frame,
                last,
            });
        }
    }
    tracks.last_frame = Some(dets.frame);

    predict_tracks(tracks);
    let graphs = build_frame_graphs(tracks, dets, &config.models, config.iou_gate)?;
    let matching = if graphs[0].edges().is_empty() {
        Matching::empty()
    } else {
        solve_frame(tracks, dets, &graphs, config)?
    };

    // Apply assignments.
    let mut assignments = Vec::with_capacity(matching.len());
    let mut det_taken = vec![false; dets.detections.len()];
    let mut track_taken = vec![false; tracks.tracks.len()];
    let mut new_records = Vec::new();
    for (i, j) in matching.pairs() {
        let track = &mut tracks.tracks[i];
        let det = &dets.detections[j];
        track.kalman.update(&det.bbox);
        if det.hash.is_some() {
            track.last_hash = det.hash;
        }
        track.age_since_update = 0;
        track.hits += 1;
        track.history.push((dets.frame, det.bbox));
        if !track.confirmed && track.hits >= config.min_hits {
            track.confirmed = true;
            tracks.confirmed_count += 1;
        }
        if track.confirmed {
            new_records.push(TrackRecord {
                frame: dets.frame,
                track_id: track.id,
                bbox: det.bbox,
            });
        }
        assignments.push((track.id, j));
        det_taken[j] = true;
        track_taken[i] = true;
    }
    tracks.records.extend(new_records);

    // Age the missed tracks and drop the stale ones.
    for (i, track) in tracks.tracks.iter_mut().enumerate() {
        if !track_taken[i] {
            track.age_since_update += 1;
        }
    }
    let max_age = config.max_age;
    tracks.tracks.retain(|t| t.age_since_update <= max_age);

    // Spawn provisional tracks for the leftover detections.
    for (j, det) in dets.detections.iter().enumerate() {
        if det_taken[j] {
            continue;
        }
        let mut track = Track {
            id: tracks.next_id,
            kalman: KalmanState::initiate(&det.bbox),
            last_hash: det.hash,
            age_since_update: 0,
            hits: 1,
            confirmed: false,
            history: vec![(dets.frame, det.bbox)],
        };
        if track.hits >= config.min_hits {
            track.confirmed = true;
            tracks.confirmed_count += 1;
            tracks.records.push(TrackRecord {
                frame: dets.frame,
                track_id: track.id,
                bbox: det.bbox,
            });
        }
        tracks.next_id += 1;
        tracks.tracks.push(track);
    }

    Ok(assignments)
}

/// Route one frame's graphs through the configured solver and integrator.
fn solve_frame(
    tracks: &TrackSet,
    dets: &FrameDetections,
    graphs: &[WeightedBipartiteGraph],
    config: &TrackerConfig,
) -> Result<Matching> {
    let problem = build_multiplexed_qubo(graphs, config.lambda)?;
    let seed = frame_seed(config.seed, dets.frame);
    let per_block: Vec<Matching> = match config.solver {
        SolverChoice::Oracle => graphs
            .iter()
            .map(|g| oracle_solve(g).map(|(m, _)| m))
            .collect::<Result<_>>()?,
        _ => {
            let best_state = match config.solver {
                SolverChoice::Sa => {
                    let schedule = AnnealSchedule::forward(config.sweeps);
                    simulated_anneal(&problem, &schedule, config.trials, seed)?.best_state
                }
                SolverChoice::Rsa => {
                    let schedule = AnnealSchedule::reverse(config.sweeps);
                    let start = warm_start(tracks, dets, &problem, config.frame_dims, config.grid);
                    reverse_anneal(&problem, &schedule, &start, config.trials, seed)?.best_state
                }
                SolverChoice::Sqa => {
                    let schedule = AnnealSchedule::forward(config.sweeps);
                    simulated_quantum_anneal(
                        &problem,
                        &schedule,
                        config.trotter_slices,
                        config.trials,
                        seed,
                    )?
                    .best_state
                }
                SolverChoice::Oracle => unreachable!("handled above"),
            };
            problem
                .decode(&best_state)?
                .into_iter()
                .map(|d| d.into_matching())
                .collect::<Result<_>>()?
        }
    };
    let set = SolutionSet::new(graphs.to_vec(), per_block)?;
    Ok(match config.integrator {
        IntegratorChoice::None => set.solutions()[0].clone(),
        IntegratorChoice::Majority => integrate_majority(&set),
        IntegratorChoice::Cyclic => integrate_cyclic(&set),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bb(x: f64, y: f64) -> BoundingBox {
        BoundingBox::new(x, y, 20.0, 20.0).unwrap()
    }

    fn det(x: f64, y: f64, hash: Option<u64>) -> Detection {
        Detection {
            bbox: bb(x, y),
            confidence: 1.0,
            hash,
        }
    }

    fn frame(t: i64, dets: Vec<Detection>) -> FrameDetections {
        FrameDetections::new(t, dets).unwrap()
    }

    fn oracle_config() -> TrackerConfig {
        TrackerConfig {
            solver: SolverChoice::Oracle,
            ..TrackerConfig::default()
        }
    }

    #[test]
    fn iou_matches_area_arithmetic() {
        let unit = BoundingBox::new(0.0, 0.0, 1.0, 1.0).unwrap();
        assert_eq!(iou(&unit, &unit), 1.0);
        let far = BoundingBox::new(5.0, 5.0, 1.0, 1.0).unwrap();
        assert_eq!(iou(&unit, &far), 0.0);
        let touching = BoundingBox::new(1.0, 0.0, 1.0, 1.0).unwrap();
        assert_eq!(iou(&unit, &touching), 0.0);
        let half = BoundingBox::new(0.5, 0.0, 1.0, 1.0).unwrap();
        assert!((iou(&unit, &half) - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn boxes_validate_their_extents() {
        assert!(BoundingBox::new(0.0, 0.0, 0.0, 1.0).is_err());
        assert!(BoundingBox::new(0.0, 0.0, 1.0, -2.0).is_err());
        assert!(BoundingBox::new(f64::NAN, 0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn confidences_are_checked_on_ingest() {
        let d = Detection {
            bbox: bb(0.0, 0.0),
            confidence: 1.5,
            hash: None,
        };
        assert!(FrameDetections::new(0, vec![d]).is_err());
    }

    #[test]
    fn empty_track_sets_build_empty_graphs() {
        let tracks = TrackSet::new();
        let dets = frame(0, vec![det(10.0, 10.0, None)]);
        let graphs =
            build_frame_graphs(&tracks, &dets, &[WeightModel::Iou, WeightModel::Hash], 0.1)
                .unwrap();
        assert_eq!(graphs.len(), 2);
        for g in &graphs {
            assert_eq!(g.n_left(), 0);
            assert_eq!(g.n_right(), 1);
            assert!(g.edges().is_empty());
        }
    }

    #[test]
    fn graphs_require_a_weight_model() {
        let tracks = TrackSet::new();
        let dets = frame(0, vec![]);
        assert!(build_frame_graphs(&tracks, &dets, &[], 0.1).is_err());
    }

    #[test]
    fn coincident_track_and_detection_make_one_strong_edge() {
        let mut tracks = TrackSet::new();
        let config = oracle_config();
        step_tracking(
            &mut tracks,
            &frame(0, vec![det(50.0, 50.0, Some(7))]),
            &config,
        )
        .unwrap();
        let dets = frame(1, vec![det(50.0, 50.0, Some(7))]);
        predict_tracks(&mut tracks);
        let graphs =
            build_frame_graphs(&tracks, &dets, &[WeightModel::Iou, WeightModel::Hash], 0.1)
                .unwrap();
        for g in &graphs {
            assert_eq!(g.edges().len(), 1);
            assert!(g.weight(0, 0).unwrap() > 0.99);
        }
    }

    #[test]
    fn all_models_share_one_edge_set() {
        let mut tracks = TrackSet::new();
        let config = oracle_config();
        let cluster: Vec<Detection> = (0..3)
            .map(|k| det(40.0 + 6.0 * k as f64, 40.0, Some(k as u64)))
            .collect();
        step_tracking(&mut tracks, &frame(0, cluster.clone()), &config).unwrap();
        predict_tracks(&mut tracks);
        let dets = frame(1, cluster);
        let graphs =
            build_frame_graphs(&tracks, &dets, &[WeightModel::Iou, WeightModel::Hash], 0.1)
                .unwrap();
        assert!(!graphs[0].edges().is_empty());
        let pairs = |g: &WeightedBipartiteGraph| -> Vec<(usize, usize)> {
            g.edges().iter().map(|e| (e.left, e.right)).collect()
        };
        assert_eq!(pairs(&graphs[0]), pairs(&graphs[1]));
        // Tight cluster: more than one candidate per node somewhere.
        assert!(graphs[0].edges().len() > 3);
    }

    #[test]
    fn missing_hashes_fall_back_to_the_overlap_weight() {
        let mut tracks = TrackSet::new();
        let config = oracle_config();
        step_tracking(&mut tracks, &frame(0, vec![det(50.0, 50.0, None)]), &config).unwrap();
        predict_tracks(&mut tracks);
        let dets = frame(1, vec![det(52.0, 50.0, None)]);
        let graphs =
            build_frame_graphs(&tracks, &dets, &[WeightModel::Iou, WeightModel::Hash], 0.1)
                .unwrap();
        assert_eq!(
            graphs[0].weight(0, 0).unwrap(),
            graphs[1].weight(0, 0).unwrap()
        );
    }

    #[test]
    fn detections_without_tracks_spawn_one_track_each() {
        let mut tracks = TrackSet::new();
        let dets = frame(
            0,
            vec![
                det(10.0, 10.0, None),
                det(100.0, 100.0, None),
                det(200.0, 50.0, None),
            ],
        );
        let assignments = step_tracking(&mut tracks, &dets, &oracle_config()).unwrap();
        assert!(assignments.is_empty());
        assert_eq!(tracks.tracks().len(), 3);
        let ids: Vec<u64> = tracks.tracks().iter().map(Track::id).collect();
        assert_eq!(ids, vec![1, 2, 3]);
        // Provisional: nothing recorded yet.
        assert!(tracks.records().is_empty());
        assert_eq!(tracks.confirmed_track_count(), 0);
    }

    #[test]
    fn an_overlapping_detection_keeps_its_track_id() {
        let mut tracks = TrackSet::new();
        let config = oracle_config();
        step_tracking(&mut tracks, &frame(0, vec![det(50.0, 50.0, None)]), &config).unwrap();
        let assignments =
            step_tracking(&mut tracks, &frame(1, vec![det(52.0, 50.0, None)]), &config).unwrap();
        assert_eq!(assignments, vec![(1, 0)]);
        assert_eq!(tracks.tracks().len(), 1);
        let t = &tracks.tracks()[0];
        assert_eq!(t.id(), 1);
        assert_eq!(t.hits(), 2);
        assert_eq!(t.age_since_update(), 0);
        assert!(t.is_confirmed());
        assert_eq!(tracks.records().len(), 1);
        assert_eq!(tracks.records()[0].frame, 1);
        assert_eq!(tracks.confirmed_track_count(), 1);
    }

    #[test]
    fn frames_must_arrive_in_order() {
        let mut tracks = TrackSet::new();
        let config = oracle_config();
        step_tracking(&mut tracks, &frame(5, vec![]), &config).unwrap();
        let err = step_tracking(&mut tracks, &frame(5, vec![]), &config).unwrap_err();
        assert!(matches!(err, Error::FrameOrder { got: 5, last: 5 }));
        assert!(step_tracking(&mut tracks, &frame(4, vec![]), &config).is_err());
        assert!(step_tracking(&mut tracks, &frame(6, vec![]), &config).is_ok());
    }

    #[test]
    fn missed_tracks_age_out_after_max_age_frames() {
        let mut tracks = TrackSet::new();
        let config = TrackerConfig {
            max_age: 2,
            ..oracle_config()
        };
        step_tracking(&mut tracks, &frame(0, vec![det(50.0, 50.0, None)]), &config).unwrap();
        step_tracking(&mut tracks, &frame(1, vec![det(51.0, 50.0, None)]), &config).unwrap();
        // Two missed frames are tolerated...
        step_tracking(&mut tracks, &frame(2, vec![]), &config).unwrap();
        step_tracking(&mut tracks, &frame(3, vec![]), &config).unwrap();
        assert_eq!(tracks.tracks().len(), 1);
        assert_eq!(tracks.tracks()[0].age_since_update(), 2);
        // ...the third is fatal.
        step_tracking(&mut tracks, &frame(4, vec![]), &config).unwrap();
        assert!(tracks.tracks().is_empty());
    }

    #[test]
    fn reappearing_detection_restarts_under_a_fresh_id() {
        let mut tracks = TrackSet::new();
        let config = TrackerConfig {
            max_age: 1,
            ..oracle_config()
        };
        step_tracking(&mut tracks, &frame(0, vec![det(50.0, 50.0, None)]), &config).unwrap();
        step_tracking(&mut tracks, &frame(1, vec![]), &config).unwrap();
        step_tracking(&mut tracks, &frame(2, vec![]), &config).unwrap();
        let a =
            step_tracking(&mut tracks, &frame(3, vec![det(50.0, 50.0, None)]), &config).unwrap();
        assert!(a.is_empty());
        assert_eq!(tracks.tracks().len(), 1);
        assert_eq!(tracks.tracks()[0].id(), 2, "track ids are never reused");
    }

    /// Two objects approach head-on, meet, and bounce apart, swapping
    /// velocities. Constant-velocity prediction alone follows the motion
    /// through the meeting point and swaps identities; the appearance
    /// hashes travel with the true objects and resolve the ambiguity.
    fn run_bounce(config: &TrackerConfig) -> TrackSet {
        let hash_a = 0u64;
        let hash_b = u64::MAX;
        let mut tracks = TrackSet::new();
        for t in 0..=50i64 {
            let delta = 2.0 * (t as f64 - 25.0).abs();
            // Object A: comes in from the left, bounces back left.
            let ax = 50.0 - delta;
            // Object B: comes in from the right, bounces back right.
            let bx = 50.0 + delta;
            let dets = frame(
                t,
                vec![det(ax, 50.0, Some(hash_a)), det(bx, 50.0, Some(hash_b))],
            );
            step_tracking(&mut tracks, &dets, config).unwrap();
        }
        tracks
    }

    #[test]
    fn appearance_hashes_prevent_the_identity_swap_at_a_bounce() {
        // Overlap-only tracking: the straight-through interpretation wins
        // and the ids swap at the meeting point.
        let iou_only = TrackerConfig {
            models: vec![WeightModel::Iou],
            integrator: IntegratorChoice::None,
            ..oracle_config()
        };
        let swapped = run_bounce(&iou_only);
        let last_a = swapped
            .records()
            .iter()
            .filter(|r| r.frame == 50 && r.bbox.x < 50.0)
            .map(|r| r.track_id)
            .next()
            .unwrap();
        assert_eq!(
            last_a, 2,
            "overlap-only tracking should follow the crossing motion"
        );

        // With the hash model integrated in, identities stick.
        let with_hash = TrackerConfig {
            models: vec![WeightModel::Iou, WeightModel::Hash],
            integrator: IntegratorChoice::Cyclic,
            ..oracle_config()
        };
        let kept = run_bounce(&with_hash);
        let last_a = kept
            .records()
            .iter()
            .filter(|r| r.frame == 50 && r.bbox.x < 50.0)
            .map(|r| r.track_id)
            .next()
            .unwrap();
        assert_eq!(
            last_a, 1,
            "hash evidence should pin identity through the bounce"
        );
        // And at no frame does one detection serve two tracks.
        for t in 0..=50i64 {
            let frame_records: Vec<_> = kept.records().iter().filter(|r| r.frame == t).collect();
            let mut ids: Vec<u64> = frame_records.iter().map(|r| r.track_id).collect();
            ids.dedup();
            assert_eq!(ids.len(), frame_records.len());
        }
    }

    #[test]
    fn annealed_solvers_drive_the_same_pipeline() {
        // A short two-object scene through the forward annealer must
        // reproduce the oracle assignment (the per-frame problems are
        // tiny, so 20 trials is plenty).
        let sa = TrackerConfig {
            solver: SolverChoice::Sa,
            sweeps: 60,
            trials: 20,
            seed: 11,
            ..TrackerConfig::default()
        };
        let mut tracks = TrackSet::new();
        for t in 0..6i64 {
            let dets = frame(
                t,
                vec![
                    det(10.0 + 3.0 * t as f64, 20.0, Some(0)),
                    det(200.0 - 3.0 * t as f64, 80.0, Some(u64::MAX)),
                ],
            );
            step_tracking(&mut tracks, &dets, &sa).unwrap();
        }
        assert_eq!(tracks.tracks().len(), 2);
        assert_eq!(tracks.confirmed_track_count(), 2);
        let ids: Vec<u64> = tracks.tracks().iter().map(Track::id).collect();
        assert_eq!(ids, vec![1, 2], "no spurious births under annealing");
    }

    #[test]
    fn warm_starts_from_isolated_cells_recover_the_truth() {
        let mut tracks = TrackSet::new();
        let config = oracle_config();
        // Two objects in clearly different grid cells (640x360, 4x4 grid:
        // cells are 160x90).
        step_tracking(
            &mut tracks,
            &frame(0, vec![det(40.0, 40.0, None), det(400.0, 200.0, None)]),
            &config,
        )
        .unwrap();
        predict_tracks(&mut tracks);
        let dets = frame(1, vec![det(42.0, 40.0, None), det(402.0, 200.0, None)]);
        let graphs =
            build_frame_graphs(&tracks, &dets, &[WeightModel::Iou, WeightModel::Hash], 0.1)
                .unwrap();
        let problem = build_multiplexed_qubo(&graphs, 0.7).unwrap();
        let start = warm_start(&tracks, &dets, &problem, (640.0, 360.0), (4, 4));
        let truth = Matching::new([(0usize, 0usize), (1, 1)]).unwrap();
        let expected = problem.encode(&[truth.clone(), truth]).unwrap();
        assert_eq!(
            start, expected,
            "isolated cells give a zero-error warm start"
        );
    }

    #[test]
    fn crowded_cells_leave_all_colliding_bits_set() {
        let mut tracks = TrackSet::new();
        let config = oracle_config();
        step_tracking(&mut tracks, &frame(0, vec![det(40.0, 40.0, None)]), &config).unwrap();
        predict_tracks(&mut tracks);
        // Two detections in the same cell as the single prediction.
        let dets = frame(1, vec![det(44.0, 40.0, None), det(36.0, 44.0, None)]);
        let graphs = build_frame_graphs(&tracks, &dets, &[WeightModel::Iou], 0.1).unwrap();
        let problem = build_multiplexed_qubo(&graphs, 0.7).unwrap();
        let start = warm_start(&tracks, &dets, &problem, (640.0, 360.0), (4, 4));
        assert_eq!(start.bits().iter().filter(|&&b| b).count(), 2);
        let decoded = &problem.decode(&start).unwrap()[0];
        assert!(
            !decoded.is_feasible(),
            "colliding warm starts may be infeasible"
        );
    }

    #[test]
    fn warm_start_replicates_across_blocks() {
        let mut tracks = TrackSet::new();
        let config = oracle_config();
        step_tracking(
            &mut tracks,
            &frame(
                0,
                vec![det(40.0, 40.0, Some(3)), det(400.0, 200.0, Some(9))],
            ),
            &config,
        )
        .unwrap();
        predict_tracks(&mut tracks);
        let dets = frame(
            1,
            vec![det(42.0, 40.0, Some(3)), det(402.0, 200.0, Some(9))],
        );
        let graphs =
            build_frame_graphs(&tracks, &dets, &[WeightModel::Iou, WeightModel::Hash], 0.1)
                .unwrap();
        let problem = build_multiplexed_qubo(&graphs, 0.7).unwrap();
        let start = warm_start(&tracks, &dets, &problem, (640.0, 360.0), (4, 4));
        let half = problem.num_vars() / 2;
        assert_eq!(start.bits()[..half], start.bits()[half..]);
    }
}
