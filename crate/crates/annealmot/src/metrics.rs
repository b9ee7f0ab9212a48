//! Tracking-quality metrics against ground truth.
//!
//! The headline numbers are MOTA (one minus the rate of misses, false
//! positives, and identity switches), IDF1 (harmonic mean of identity
//! precision and recall under a globally optimal trajectory pairing), and
//! APE (relative error of the produced track count). Correspondence
//! between ground truth and hypotheses uses box overlap at a configurable
//! threshold, 0.5 by convention; every assignment inside is solved exactly
//! by the same matcher the rest of the crate trusts.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{oracle_solve_with_cap, WeightConvention, WeightedBipartiteGraph};
use crate::tracking::{iou, BoundingBox, TrackRecord};

/// Assignment problems inside the metrics are tiny after overlap gating,
/// but give them generous headroom anyway.
const ASSIGNMENT_EDGE_CAP: usize = 256;

/// Boxes with identities over frames — ground truth and hypothesis tracks
/// share this shape.
#[derive(Debug, Clone, Default)]
pub struct Trajectories {
    by_frame: BTreeMap<i64, Vec<(i64, BoundingBox)>>,
}

/// Ground truth is trajectories whose ids are the annotated object ids.
pub type GroundTruth = Trajectories;

impl Trajectories {
    pub fn new() -> Self {
        Trajectories::default()
    }

    pub fn push(&mut self, frame: i64, id: i64, bbox: BoundingBox) {
        self.by_frame.entry(frame).or_default().push((id, bbox));
    }

    pub fn from_rows(rows: impl IntoIterator<Item = (i64, i64, BoundingBox)>) -> Self {
        let mut t = Trajectories::new();
        for (frame, id, bbox) in rows {
            t.push(frame, id, bbox);
        }
        t
    }

    pub fn from_records(records: &[TrackRecord]) -> Self {
        Self::from_rows(records.iter().map(|r| (r.frame, r.track_id as i64, r.bbox)))
    }

    pub fn frames(&self) -> impl Iterator<Item = i64> + '_ {
        self.by_frame.keys().copied()
    }

    pub fn at(&self, frame: i64) -> &[(i64, BoundingBox)] {
        self.by_frame.get(&frame).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn total_boxes(&self) -> usize {
        self.by_frame.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.total_boxes() == 0
    }

    pub fn ids(&self) -> BTreeSet<i64> {
        self.by_frame
            .values()
            .flat_map(|v| v.iter().map(|&(id, _)| id))
            .collect()
    }
}

fn check_threshold(threshold: f64) -> Result<()> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "overlap threshold must lie strictly between 0 and 1, got {threshold}"
        )));
    }
    Ok(())
}

/// Exact max-overlap assignment between two box lists, returning index
/// pairs. Only pairs at or above the threshold are eligible.
fn max_overlap_assignment(
    left: &[BoundingBox],
    right: &[BoundingBox],
    threshold: f64,
) -> Result<Vec<(usize, usize)>> {
    let mut edges = Vec::new();
    for (i, a) in left.iter().enumerate() {
        for (j, b) in right.iter().enumerate() {
            let o = iou(a, b);
            if o >= threshold {
                edges.push((i, j, o));
            }
        }
    }
    if edges.is_empty() {
        return Ok(Vec::new());
    }
    let graph =
        WeightedBipartiteGraph::new(left.len(), right.len(), edges, WeightConvention::Similarity)?;
    let (matching, _) = oracle_solve_with_cap(&graph, ASSIGNMENT_EDGE_CAP)?;
    Ok(matching.pairs().collect())
}

/// The CLEAR-MOT accounting behind a MOTA number.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MotaScore {
    pub mota: f64,
    pub false_positives: usize,
    pub misses: usize,
    pub id_switches: usize,
    pub gt_total: usize,
}

/// Frame-by-frame CLEAR-MOT correspondence: matches from the previous
/// frame persist while they stay above the threshold, the remainder is
/// re-matched by maximum overlap, and an identity switch is counted
/// whenever a ground-truth object's paired hypothesis id differs from its
/// most recent pairing (gaps included).
pub fn compute_mota(
    gt: &Trajectories,
    hyp: &Trajectories,
    iou_threshold: f64,
) -> Result<MotaScore> {
    check_threshold(iou_threshold)?;
    if gt.is_empty() {
        return Err(Error::EmptyGroundTruth);
    }
    let mut false_positives = 0usize;
    let mut misses = 0usize;
    let mut id_switches = 0usize;
    let mut gt_total = 0usize;
    // Pairings still alive from the previous frame, and the last pairing
    // each ground-truth id ever had.
    let mut live: HashMap<i64, i64> = HashMap::new();
    let mut last_pairing: HashMap<i64, i64> = HashMap::new();

    let frames: BTreeSet<i64> = gt.frames().chain(hyp.frames()).collect();
    for f in frames {
        let g_boxes = gt.at(f);
        let h_boxes = hyp.at(f);
        gt_total += g_boxes.len();
        let h_index: HashMap<i64, usize> = h_boxes
            .iter()
            .enumerate()
            .map(|(j, &(id, _))| (id, j))
            .collect();
        let mut matched_g = vec![false; g_boxes.len()];
        let mut matched_h = vec![false; h_boxes.len()];
        let mut current: HashMap<i64, i64> = HashMap::new();

        // Keep last frame's pairings that still hold up.
        for (gi, &(gid, gbox)) in g_boxes.iter().enumerate() {
            if let Some(&hid) = live.get(&gid) {
                if let Some(&hj) = h_index.get(&hid) {
                    if !matched_h[hj] && iou(&gbox, &h_boxes[hj].1) >= iou_threshold {
                        matched_g[gi] = true;
                        matched_h[hj] = true;
                        current.insert(gid, hid);
                    }
                }
            }
        }

        // Best assignment over whatever is left.
        let rem_g: Vec<usize> = (0..g_boxes.len()).filter(|&i| !matched_g[i]).collect();
        let rem_h: Vec<usize> = (0..h_boxes.len()).filter(|&j| !matched_h[j]).collect();
        let g_rects: Vec<BoundingBox> = rem_g.iter().map(|&i| g_boxes[i].1).collect();
        let h_rects: Vec<BoundingBox> = rem_h.iter().map(|&j| h_boxes[j].1).collect();
        for (a, b) in max_overlap_assignment(&g_rects, &h_rects, iou_threshold)? {
            let (gi, hj) = (rem_g[a], rem_h[b]);
            matched_g[gi] = true;
            matched_h[hj] = true;
            current.insert(g_boxes[gi].0, h_boxes[hj].0);
        }

        for (&gid, &hid) in &current {
            if let Some(&prev) = last_pairing.get(&gid) {
                if prev != hid {
                    id_switches += 1;
                }
            }
            last_pairing.insert(gid, hid);
        }
        misses += matched_g.iter().filter(|&&m| !m).count();
        false_positives += matched_h.iter().filter(|&&m| !m).count();
        live = current;
    }

    let mota = 1.0 - (false_positives + misses + id_switches) as f64 / gt_total as f64;
    Ok(MotaScore {
        mota,
        false_positives,
        misses,
        id_switches,
        gt_total,
    })
}

/// The identity-level accounting behind an IDF1 number.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct IdScore {
    pub idf1: f64,
    pub idtp: usize,
    pub idfp: usize,
    pub idfn: usize,
    pub id_precision: f64,
    pub id_recall: f64,
}

/// Global identity metric: pair whole ground-truth trajectories with whole
/// hypothesis trajectories so that the total number of frames where the
/// paired boxes overlap (at the threshold) is maximal; those frames are
/// IDTP, every other ground-truth box an IDFN, every other hypothesis box
/// an IDFP.
pub fn compute_idf1(gt: &Trajectories, hyp: &Trajectories, iou_threshold: f64) -> Result<IdScore> {
    check_threshold(iou_threshold)?;
    if gt.is_empty() {
        return Err(Error::EmptyGroundTruth);
    }
    let mut counts: BTreeMap<(i64, i64), usize> = BTreeMap::new();
    for f in gt.frames() {
        for &(gid, gbox) in gt.at(f) {
            for &(hid, hbox) in hyp.at(f) {
                if iou(&gbox, &hbox) >= iou_threshold {
                    *counts.entry((gid, hid)).or_insert(0) += 1;
                }
            }
        }
    }
    let total_gt = gt.total_boxes();
    let total_hyp = hyp.total_boxes();

    let idtp = if counts.is_empty() {
        0
    } else {
        let gt_ids: Vec<i64> = gt.ids().into_iter().collect();
        let hyp_ids: Vec<i64> = hyp.ids().into_iter().collect();
        let g_pos: HashMap<i64, usize> =
            gt_ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
        let h_pos: HashMap<i64, usize> =
            hyp_ids.iter().enumerate().map(|(j, &id)| (id, j)).collect();
        let max_count = *counts.values().max().expect("counts is non-empty") as f64;
        let edges: Vec<(usize, usize, f64)> = counts
            .iter()
            .map(|(&(gid, hid), &c)| (g_pos[&gid], h_pos[&hid], c as f64 / max_count))
            .collect();
        let graph = WeightedBipartiteGraph::new(
            gt_ids.len(),
            hyp_ids.len(),
            edges,
            WeightConvention::Similarity,
        )?;
        let (matching, _) = oracle_solve_with_cap(&graph, ASSIGNMENT_EDGE_CAP)?;
        matching
            .pairs()
            .map(|(i, j)| counts.get(&(gt_ids[i], hyp_ids[j])).copied().unwrap_or(0))
            .sum()
    };

    let idfp = total_hyp - idtp;
    let idfn = total_gt - idtp;
    let idf1 = 2.0 * idtp as f64 / (2.0 * idtp as f64 + idfp as f64 + idfn as f64);
    let id_precision = if total_hyp > 0 {
        idtp as f64 / total_hyp as f64
    } else {
        0.0
    };
    let id_recall = idtp as f64 / total_gt as f64;
    Ok(IdScore {
        idf1,
        idtp,
        idfp,
        idfn,
        id_precision,
        id_recall,
    })
}

/// Relative error of the produced track count against the annotated
/// object count: `|NT - CN| / CN`.
pub fn compute_ape(nt: u64, cn: u64) -> Result<f64> {
    if cn == 0 {
        return Err(Error::InvalidParameter(
            "track-count error needs at least one annotated object".into(),
        ));
    }
    Ok((nt as f64 - cn as f64).abs() / cn as f64)
}

/// Per-frame detection quality, identity-blind: precision, recall, F1.
/// With no detections at all, precision is reported as 0 by convention.
pub fn compute_detection_prf(
    gt: &Trajectories,
    detections: &Trajectories,
    iou_threshold: f64,
) -> Result<(f64, f64, f64)> {
    check_threshold(iou_threshold)?;
    let mut tp = 0usize;
    let mut total_gt = 0usize;
    let mut total_det = 0usize;
    let frames: BTreeSet<i64> = gt.frames().chain(detections.frames()).collect();
    for f in frames {
        let g: Vec<BoundingBox> = gt.at(f).iter().map(|&(_, b)| b).collect();
        let d: Vec<BoundingBox> = detections.at(f).iter().map(|&(_, b)| b).collect();
        total_gt += g.len();
        total_det += d.len();
        tp += max_overlap_assignment(&g, &d, iou_threshold)?.len();
    }
    let precision = if total_det > 0 {
        tp as f64 / total_det as f64
    } else {
        0.0
    };
    let recall = if total_gt > 0 {
        tp as f64 / total_gt as f64
    } else {
        0.0
    };
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    Ok((precision, recall, f1))
}

/// Everything a tracking evaluation reports, in one place.
#[derive(Debug, Clone, Serialize)]
pub struct MetricReport {
    pub mota: f64,
    pub idf1: f64,
    pub idsw: usize,
    pub ape: f64,
    /// Tracks the pipeline confirmed.
    pub nt: u64,
    /// Objects the ground truth annotates.
    pub cn: u64,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub misses: usize,
    pub gt_total: usize,
    pub id_precision: f64,
    pub id_recall: f64,
}

impl MetricReport {
    pub const CSV_HEADER: &'static str =
        "mota,idf1,idsw,ape,nt,cn,fp,fn,gt_total,id_precision,id_recall";

    /// Full evaluation of a hypothesis against ground truth. `nt` is the
    /// number of confirmed tracks, `cn` the number of annotated objects.
    pub fn compute(
        gt: &Trajectories,
        hyp: &Trajectories,
        iou_threshold: f64,
        nt: u64,
        cn: u64,
    ) -> Result<MetricReport> {
        let mota = compute_mota(gt, hyp, iou_threshold)?;
        let id = compute_idf1(gt, hyp, iou_threshold)?;
        let ape = compute_ape(nt, cn)?;
        Ok(MetricReport {
            mota: mota.mota,
            idf1: id.idf1,
            idsw: mota.id_switches,
            ape,
            nt,
            cn,
            fp: mota.false_positives,
            misses: mota.misses,
            gt_total: mota.gt_total,
            id_precision: id.id_precision,
            id_recall: id.id_recall,
        })
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{:.6},{:.6},{},{:.6},{},{},{},{},{},{:.6},{:.6}",
            self.mota,
            self.idf1,
            self.idsw,
            self.ape,
            self.nt,
            self.cn,
            self.fp,
            self.misses,
            self.gt_total,
            self.id_precision,
            self.id_recall
        )
    }
}

impl fmt::Display for MetricReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "MOTA          {:.4}", self.mota)?;
        writeln!(f, "IDF1          {:.4}", self.idf1)?;
        writeln!(f, "IDSW          {}", self.idsw)?;
        writeln!(f, "APE           {:.4}", self.ape)?;
        writeln!(f, "NT / CN       {} / {}", self.nt, self.cn)?;
        writeln!(
            f,
            "FP / FN / GT  {} / {} / {}",
            self.fp, self.misses, self.gt_total
        )?;
        write!(
            f,
            "ID P / R      {:.4} / {:.4}",
            self.id_precision, self.id_recall
        )
    }
}
