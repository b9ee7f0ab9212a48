//! File formats: detection/track CSV, hash sidecars, flat configs, and
//! PNM images.
//!
//! Detections and tracks travel as MOTChallenge-style CSV lines
//! (`frame,id,x,y,w,h,conf,-1,-1,-1`); appearance hashes ride in a sidecar
//! (`frame,det_index,hash_hex`) so runs need no image decoding; configs
//! are flat `key=value` text; and raw-image mode reads PGM/PPM (P2/P3/
//! P5/P6) rasters to grayscale.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::metrics::Trajectories;
use crate::tracking::{BoundingBox, Detection, FrameDetections, GrayImage, TrackRecord};

/// One parsed CSV line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotRow {
    pub frame: i64,
    pub id: i64,
    pub bbox: BoundingBox,
    pub confidence: f64,
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

/// Parse MOTChallenge-style CSV. Blank lines and `#` comments are
/// skipped; every data line needs at least the seven leading fields.
pub fn parse_mot_rows(text: &str) -> Result<Vec<MotRow>> {
    let mut rows = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() < 7 {
            return Err(parse_err(
                line_no,
                format!(
                    "expected at least 7 comma-separated fields, got {}",
                    fields.len()
                ),
            ));
        }
        let int = |s: &str, what: &str| -> Result<i64> {
            s.parse::<i64>()
                .map_err(|_| parse_err(line_no, format!("bad {what} '{s}'")))
        };
        let num = |s: &str, what: &str| -> Result<f64> {
            s.parse::<f64>()
                .map_err(|_| parse_err(line_no, format!("bad {what} '{s}'")))
        };
        let frame = int(fields[0], "frame")?;
        let id = int(fields[1], "id")?;
        let x = num(fields[2], "x")?;
        let y = num(fields[3], "y")?;
        let w = num(fields[4], "w")?;
        let h = num(fields[5], "h")?;
        let confidence = num(fields[6], "confidence")?;
        let bbox = BoundingBox::new(x, y, w, h).map_err(|e| parse_err(line_no, e.to_string()))?;
        rows.push(MotRow {
            frame,
            id,
            bbox,
            confidence,
        });
    }
    Ok(rows)
}

/// Render one CSV line. The three trailing `-1` fields are the unused
/// MOTChallenge world-coordinate slots.
pub fn mot_line(frame: i64, id: i64, bbox: &BoundingBox, confidence: f64) -> String {
    format!(
        "{},{},{},{},{},{},{},-1,-1,-1",
        frame, id, bbox.x, bbox.y, bbox.w, bbox.h, confidence
    )
}

/// Rows as identity-carrying trajectories (ground truth or track output).
pub fn trajectories_from_rows(rows: &[MotRow]) -> Trajectories {
    Trajectories::from_rows(rows.iter().map(|r| (r.frame, r.id, r.bbox)))
}

/// Rows as a detection stream, frames ascending. Detection indices within
/// a frame follow input order; `hashes` (from [`parse_hash_sidecar`])
/// attaches by `(frame, det_index)`.
pub fn detections_from_rows(
    rows: &[MotRow],
    hashes: Option<&BTreeMap<(i64, usize), u64>>,
) -> Result<Vec<FrameDetections>> {
    let mut by_frame: BTreeMap<i64, Vec<Detection>> = BTreeMap::new();
    for row in rows {
        let dets = by_frame.entry(row.frame).or_default();
        let index = dets.len();
        let hash = hashes.and_then(|m| m.get(&(row.frame, index)).copied());
        dets.push(Detection {
            bbox: row.bbox,
            confidence: row.confidence,
            hash,
        });
    }
    by_frame
        .into_iter()
        .map(|(frame, dets)| FrameDetections::new(frame, dets))
        .collect()
}

/// Track output as a CSV document, one line per record.
pub fn tracks_csv(records: &[TrackRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&mot_line(r.frame, r.track_id as i64, &r.bbox, 1.0));
        out.push('\n');
    }
    out
}

/// Parse a hash sidecar: `frame,det_index,hash_hex` per line, hex with or
/// without a `0x` prefix.
pub fn parse_hash_sidecar(text: &str) -> Result<BTreeMap<(i64, usize), u64>> {
    let mut map = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(parse_err(
                line_no,
                format!(
                    "expected frame,det_index,hash_hex, got {} fields",
                    fields.len()
                ),
            ));
        }
        let frame = fields[0]
            .parse::<i64>()
            .map_err(|_| parse_err(line_no, format!("bad frame '{}'", fields[0])))?;
        let det_index = fields[1]
            .parse::<usize>()
            .map_err(|_| parse_err(line_no, format!("bad det_index '{}'", fields[1])))?;
        let hex = fields[2].strip_prefix("0x").unwrap_or(fields[2]);
        let hash = u64::from_str_radix(hex, 16)
            .map_err(|_| parse_err(line_no, format!("bad hash '{}'", fields[2])))?;
        map.insert((frame, det_index), hash);
    }
    Ok(map)
}

/// Render a hash sidecar with 16-digit lowercase hex hashes.
pub fn hash_sidecar_csv(hashes: &BTreeMap<(i64, usize), u64>) -> String {
    let mut out = String::new();
    for (&(frame, det_index), &hash) in hashes {
        out.push_str(&format!("{frame},{det_index},{hash:016x}\n"));
    }
    out
}

/// Parse flat `key=value` config text. Later keys override earlier ones;
/// blank lines and `#` comments are skipped.
pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match line.split_once('=') {
            Some((key, value)) => {
                map.insert(key.trim().to_string(), value.trim().to_string());
            }
            None => {
                return Err(parse_err(
                    idx + 1,
                    format!("expected key=value, got '{line}'"),
                ));
            }
        }
    }
    Ok(map)
}

/// Read a PNM image (P2/P5 grayscale, P3/P6 color) to grayscale with
/// pixel values scaled to 0–255. Color collapses by the usual luma
/// weights. Only 8-bit rasters (maxval ≤ 255) are supported.
pub fn read_pnm(bytes: &[u8]) -> Result<GrayImage> {
    let mut pos = 0usize;

    // Header tokens are whitespace-separated with # comments to EOL.
    let next_token = |bytes: &[u8], pos: &mut usize| -> Result<String> {
        loop {
            while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
                *pos += 1;
            }
            if *pos < bytes.len() && bytes[*pos] == b'#' {
                while *pos < bytes.len() && bytes[*pos] != b'\n' {
                    *pos += 1;
                }
                continue;
            }
            break;
        }
        let start = *pos;
        while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if start == *pos {
            return Err(parse_err(0, "unexpected end of image header"));
        }
        Ok(String::from_utf8_lossy(&bytes[start..*pos]).into_owned())
    };

    let magic = next_token(bytes, &mut pos)?;
    let (channels, binary) = match magic.as_str() {
        "P2" => (1usize, false),
        "P3" => (3, false),
        "P5" => (1, true),
        "P6" => (3, true),
        other => return Err(parse_err(0, format!("unsupported image magic '{other}'"))),
    };
    let dim = |tok: String| -> Result<usize> {
        tok.parse::<usize>()
            .map_err(|_| parse_err(0, format!("bad image dimension '{tok}'")))
    };
    let width = dim(next_token(bytes, &mut pos)?)?;
    let height = dim(next_token(bytes, &mut pos)?)?;
    let maxval = dim(next_token(bytes, &mut pos)?)?;
    if width == 0 || height == 0 {
        return Err(parse_err(0, "image dimensions must be positive"));
    }
    if maxval == 0 || maxval > 255 {
        return Err(parse_err(
            0,
            format!("unsupported maxval {maxval} (8-bit only)"),
        ));
    }

    let n_samples = width * height * channels;
    let mut samples = Vec::with_capacity(n_samples);
    if binary {
        // Exactly one whitespace byte separates the header from the raster.
        pos += 1;
        if bytes.len() < pos + n_samples {
            return Err(parse_err(0, "image raster is truncated"));
        }
        samples.extend(bytes[pos..pos + n_samples].iter().map(|&b| b as f64));
    } else {
        for _ in 0..n_samples {
            let tok = next_token(bytes, &mut pos)
                .map_err(|_| parse_err(0, "image raster is truncated"))?;
            let v = tok
                .parse::<f64>()
                .map_err(|_| parse_err(0, format!("bad sample '{tok}'")))?;
            samples.push(v);
        }
    }

    let scale = 255.0 / maxval as f64;
    let data: Vec<f64> = if channels == 1 {
        samples.iter().map(|v| v * scale).collect()
    } else {
        samples
            .chunks_exact(3)
            .map(|rgb| (0.299 * rgb[0] + 0.587 * rgb[1] + 0.114 * rgb[2]) * scale)
            .collect()
    };
    GrayImage::new(width, height, data)
}
