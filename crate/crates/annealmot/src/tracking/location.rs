//! Coarse spatial codes and the warm starts they induce.
//!
//! The frame is divided into a small grid (4×4 by default); each box is
//! coded by the cell holding its center. A reverse-anneal warm start sets
//! exactly the bits whose track prediction and detection share a cell —
//! cheap to compute and usually within a few percent of the truth, which
//! is all a warm start needs to be.

use super::{FrameDetections, TrackSet};
use crate::qubo::{BinaryState, QuboProblem};

pub const DEFAULT_GRID: (usize, usize) = (4, 4);

/// Grid cell of a box center. Cells are half-open; centers outside the
/// frame clamp to the border cell so detector jitter cannot escape the
/// grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocationCode {
    pub row: usize,
    pub col: usize,
    pub grid: (usize, usize),
}

/// Code of `bbox`'s center within a `frame_dims = (width, height)` frame
/// divided into `grid = (rows, cols)` cells.
pub fn location_code(
    bbox: &super::BoundingBox,
    frame_dims: (f64, f64),
    grid: (usize, usize),
) -> LocationCode {
    let (rows, cols) = (grid.0.max(1), grid.1.max(1));
    let (cx, cy) = bbox.center();
    let cell_w = frame_dims.0 / cols as f64;
    let cell_h = frame_dims.1 / rows as f64;
    let col = ((cx / cell_w).floor().max(0.0) as usize).min(cols - 1);
    let row = ((cy / cell_h).floor().max(0.0) as usize).min(rows - 1);
    LocationCode {
        row,
        col,
        grid: (rows, cols),
    }
}

/// Warm start for reverse annealing: bit `(block, u, v)` is set iff track
/// `u`'s predicted box and detection `v` share a grid cell and the edge
/// exists in the problem. The same pattern repeats across all blocks.
///
/// Cells holding several candidates leave every colliding bit set — the
/// start may be infeasible, and that is fine: feasibility is the
/// annealer's (and the repair pass's) job, not the warm start's.
pub fn warm_start(
    tracks: &TrackSet,
    dets: &FrameDetections,
    problem: &QuboProblem,
    frame_dims: (f64, f64),
    grid: (usize, usize),
) -> BinaryState {
    let track_codes: Vec<LocationCode> = tracks
        .tracks()
        .iter()
        .map(|t| location_code(&t.predicted_bbox(), frame_dims, grid))
        .collect();
    let det_codes: Vec<LocationCode> = dets
        .detections()
        .iter()
        .map(|d| location_code(&d.bbox, frame_dims, grid))
        .collect();
    let mut state = BinaryState::zeros(problem.num_vars());
    for (i, key) in problem.var_index().iter().enumerate() {
        if track_codes[key.left] == det_codes[key.right] {
            state.set(i, true);
        }
    }
    state
}
