//! Build annealer warm starts from coarse image-grid cells.
//!
//! Seeds a tracker on a synthetic scene, then — on a later frame — turns
//! each track/detection pair that lands in the same grid cell into a set
//! bit of an initial state. That state usually agrees with the exact
//! assignment almost everywhere, which is exactly what reverse annealing
//! wants: it refines the warm start on a small sweep budget instead of
//! searching from scratch.
//!
//! Run with: `cargo run --example warm_start_codes`

use annealmot::bench::{gen_scenario, ScenarioSpec};
use annealmot::graph::oracle_solve;
use annealmot::qubo::build_matching_qubo;
use annealmot::solvers::{reverse_anneal, AnnealSchedule};
use annealmot::tracking::{
    build_frame_graphs, location_code, predict_tracks, step_tracking, warm_start, TrackSet,
    TrackerConfig, WeightModel,
};

fn main() -> annealmot::Result<()> {
    let scene = gen_scenario(&ScenarioSpec {
        num_objects: 4,
        frame_count: 12,
        seed: 5,
        ..ScenarioSpec::default()
    })?;
    // The default 4x4 grid gives 160 x 90 px cells on this frame; the
    // four object lanes run well inside the rows. Pick the grid so that
    // expected paths do not ride a cell boundary — a box whose center
    // hovers on a boundary flips codes with every pixel of jitter.
    let config = TrackerConfig {
        models: vec![WeightModel::Iou],
        ..TrackerConfig::default()
    };

    // Let the tracker ingest a few frames so every object has a track.
    let mut tracks = TrackSet::new();
    for frame in &scene.frames[..8] {
        step_tracking(&mut tracks, frame, &config)?;
    }

    // Probe the next frame the same way the tracker would see it.
    let frame = &scene.frames[8];
    predict_tracks(&mut tracks);
    println!(
        "frame {}: codes of predicted tracks vs detections",
        frame.frame()
    );
    for track in tracks.tracks() {
        let code = location_code(&track.predicted_bbox(), config.frame_dims, config.grid);
        println!(
            "  track {:>2} predicted in cell (row {}, col {})",
            track.id(),
            code.row,
            code.col
        );
    }
    for (j, det) in frame.detections().iter().enumerate() {
        let code = location_code(&det.bbox, config.frame_dims, config.grid);
        println!(
            "  detection {j} in cell (row {}, col {})",
            code.row, code.col
        );
    }

    let graphs = build_frame_graphs(&tracks, frame, &config.models, config.iou_gate)?;
    let problem = build_matching_qubo(&graphs[0], config.lambda)?;
    let start = warm_start(&tracks, frame, &problem, config.frame_dims, config.grid);

    let (exact, _) = oracle_solve(&graphs[0])?;
    let target = problem.encode(std::slice::from_ref(&exact))?;
    let differing = start.hamming_distance(&target);
    println!(
        "\nwarm start from shared cells: {}/{} bits differ from the exact assignment",
        differing,
        problem.num_vars()
    );

    // Hand the warm start to reverse annealing on a small budget.
    let schedule = AnnealSchedule::reverse(75);
    let result = reverse_anneal(&problem, &schedule, &start, 1, 99)?;
    let refined = problem
        .decode(&result.best_state)?
        .remove(0)
        .into_matching()?;
    let optimum = problem.energy(&target)?;
    println!(
        "reverse annealing from it: energy {:.4} (exact optimum {:.4})",
        result.best_energy, optimum
    );
    for (l, r) in refined.pairs() {
        let hit = if exact.contains(l, r) {
            "= exact"
        } else {
            "differs"
        };
        println!("  track slot {l} -> detection {r}  {hit}");
    }
    Ok(())
}
