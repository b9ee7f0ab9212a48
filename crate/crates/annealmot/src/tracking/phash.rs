//! DCT-based 64-bit perceptual hashing of grayscale patches.
//!
//! The hash is robust to brightness scaling and mild noise: a patch is
//! area-resampled to 32×32, transformed with a 2-D DCT, and the top-left
//! 8×8 low-frequency block is thresholded at the median of its non-DC
//! coefficients. Similar patches land within a few bits of each other;
//! unrelated patches disagree on about half the bits.

use crate::error::{Error, Result};

/// Row-major grayscale raster. Pixel values are arbitrary nonnegative
/// reals; hashing is invariant to their absolute scale.
#[derive(Debug, Clone)]
pub struct GrayImage {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidParameter(
                "image dimensions must be positive".into(),
            ));
        }
        if data.len() != width * height {
            return Err(Error::InvalidParameter(format!(
                "{}x{} image needs {} pixels, got {}",
                width,
                height,
                width * height,
                data.len()
            )));
        }
        Ok(GrayImage {
            width,
            height,
            data,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    pub fn pixels(&self) -> &[f64] {
        &self.data
    }

    /// Cut out an axis-aligned rectangle, clamped to the image bounds.
    /// The rectangle is given in pixels; fractional origins are floored.
    pub fn crop(&self, x: f64, y: f64, w: f64, h: f64) -> Result<GrayImage> {
        let x0 = (x.max(0.0) as usize).min(self.width.saturating_sub(1));
        let y0 = (y.max(0.0) as usize).min(self.height.saturating_sub(1));
        let x1 = ((x + w).ceil().max(0.0) as usize).clamp(x0 + 1, self.width);
        let y1 = ((y + h).ceil().max(0.0) as usize).clamp(y0 + 1, self.height);
        let mut data = Vec::with_capacity((x1 - x0) * (y1 - y0));
        for yy in y0..y1 {
            data.extend_from_slice(&self.data[yy * self.width + x0..yy * self.width + x1]);
        }
        GrayImage::new(x1 - x0, y1 - y0, data)
    }
}

/// Area-average resample to a fixed square size. Each target pixel takes
/// the mean of the source rectangle it covers, so both down- and
/// up-scaling are well defined.
fn resample(img: &GrayImage, size: usize) -> Vec<f64> {
    let mut out = vec![0.0; size * size];
    let sx = img.width as f64 / size as f64;
    let sy = img.height as f64 / size as f64;
    for ty in 0..size {
        let y_lo = ty as f64 * sy;
        let y_hi = (ty + 1) as f64 * sy;
        for tx in 0..size {
            let x_lo = tx as f64 * sx;
            let x_hi = (tx + 1) as f64 * sx;
            let mut acc = 0.0;
            let mut area = 0.0;
            let y_start = y_lo.floor() as usize;
            let y_end = (y_hi.ceil() as usize).min(img.height);
            let x_start = x_lo.floor() as usize;
            let x_end = (x_hi.ceil() as usize).min(img.width);
            for py in y_start..y_end {
                let wy = (y_hi.min((py + 1) as f64) - y_lo.max(py as f64)).max(0.0);
                for px in x_start..x_end {
                    let wx = (x_hi.min((px + 1) as f64) - x_lo.max(px as f64)).max(0.0);
                    acc += img.get(px, py) * wx * wy;
                    area += wx * wy;
                }
            }
            out[ty * size + tx] = if area > 0.0 { acc / area } else { 0.0 };
        }
    }
    out
}

const RESAMPLE_SIZE: usize = 32;
const BLOCK: usize = 8;

/// 64-bit perceptual hash of a grayscale patch (at least 8×8 pixels).
///
/// Bit `v*8 + u` is 1 iff DCT coefficient `(v, u)` of the resampled patch
/// exceeds the median of the 63 non-DC coefficients in the 8×8 block.
/// Ties go to 0, so a constant patch hashes deterministically.
#[allow(clippy::needless_range_loop)] // (v, u) are bit positions, not subscripts
pub fn perceptual_hash(patch: &GrayImage) -> Result<u64> {
    if patch.width() < BLOCK || patch.height() < BLOCK {
        return Err(Error::InvalidParameter(format!(
            "hashing needs a patch of at least {BLOCK}x{BLOCK} pixels, got {}x{}",
            patch.width(),
            patch.height()
        )));
    }
    let n = RESAMPLE_SIZE;
    let img = resample(patch, n);

    // cos(pi/N * (i + 1/2) * k), only the first BLOCK frequencies needed.
    let mut cos_table = vec![[0.0f64; RESAMPLE_SIZE]; BLOCK];
    for (k, row) in cos_table.iter_mut().enumerate() {
        for (i, c) in row.iter_mut().enumerate() {
            *c = (std::f64::consts::PI / n as f64 * (i as f64 + 0.5) * k as f64).cos();
        }
    }

    // Row-wise then column-wise DCT, restricted to the low 8×8 block.
    let mut rows = vec![[0.0f64; BLOCK]; n];
    for y in 0..n {
        for (u, freq) in cos_table.iter().enumerate() {
            let mut acc = 0.0;
            for x in 0..n {
                acc += img[y * n + x] * freq[x];
            }
            rows[y][u] = acc;
        }
    }
    let mut coeffs = [[0.0f64; BLOCK]; BLOCK];
    for (v, freq) in cos_table.iter().enumerate() {
        for u in 0..BLOCK {
            let mut acc = 0.0;
            for (y, row) in rows.iter().enumerate() {
                acc += row[u] * freq[y];
            }
            coeffs[v][u] = acc;
        }
    }

    // Snap numerically-zero coefficients (float residue of analytically
    // zero sums, e.g. on a constant patch) to exact zero so median ties
    // behave as ties.
    let snap = 1e-9 * coeffs[0][0].abs().max(1.0);
    for row in coeffs.iter_mut() {
        for c in row.iter_mut() {
            if c.abs() < snap {
                *c = 0.0;
            }
        }
    }

    let mut ac: Vec<f64> = (0..BLOCK * BLOCK)
        .filter(|&i| i != 0)
        .map(|i| coeffs[i / BLOCK][i % BLOCK])
        .collect();
    ac.sort_by(|a, b| a.partial_cmp(b).expect("DCT coefficients are finite"));
    let median = ac[ac.len() / 2];

    let mut hash = 0u64;
    for v in 0..BLOCK {
        for u in 0..BLOCK {
            if coeffs[v][u] > median {
                hash |= 1 << (v * BLOCK + u);
            }
        }
    }
    Ok(hash)
}

/// Appearance similarity of two 64-bit hashes: `exp(-d_H / 32)` where
/// `d_H` is the Hamming distance. Always in `(0, 1]`, and 1 exactly when
/// the hashes are equal.
pub fn hash_similarity(h1: u64, h2: u64) -> f64 {
    (-((h1 ^ h2).count_ones() as f64) / 32.0).exp()
}
