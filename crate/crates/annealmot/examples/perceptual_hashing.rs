//! Appearance weights from 64-bit perceptual hashes.
//!
//! Synthesizes two visually distinct texture patches, crops them the way
//! a tracker crops detections, hashes each crop, and turns Hamming
//! distances into edge weights. Jittered crops of the same texture stay
//! near similarity 1.0 while different textures land much lower — which
//! is what lets an appearance model veto geometry when two objects pass
//! through the same place.
//!
//! Run with: `cargo run --example perceptual_hashing`

use annealmot::tracking::{hash_similarity, perceptual_hash, GrayImage};

/// A deterministic band-limited texture: a few fixed sinusoids, so small
/// crops of it are rich enough to fill all 64 hash bits while staying
/// smooth under pixel-level crop jitter.
fn texture(width: usize, height: usize, fx: f64, fy: f64, phase: f64) -> GrayImage {
    let data = (0..height)
        .flat_map(|y| {
            (0..width).map(move |x| {
                let (x, y) = (x as f64, y as f64);
                128.0
                    + 55.0 * (fx * x + phase).sin() * (fy * y).cos()
                    + 45.0 * (0.6 * fy * (x + y) + 0.4 * phase).sin()
                    + 30.0 * (1.7 * fx * x - 1.2 * fy * y + phase).cos()
                    + 20.0 * (2.3 * fy * y + 1.7 * phase).sin()
            })
        })
        .collect();
    GrayImage::new(width, height, data).expect("static dimensions are valid")
}

fn main() -> annealmot::Result<()> {
    let scene_a = texture(96, 96, 0.12, 0.09, 0.0);
    let scene_b = texture(96, 96, 0.07, 0.16, 2.1);

    // A detection box and the same box one frame later, shifted by the
    // pixel-level jitter a detector typically leaves after prediction.
    let crop_a1 = scene_a.crop(20.0, 20.0, 48.0, 48.0)?;
    let crop_a2 = scene_a.crop(21.5, 21.0, 48.0, 48.0)?;
    let crop_b = scene_b.crop(20.0, 20.0, 48.0, 48.0)?;

    let h_a1 = perceptual_hash(&crop_a1)?;
    let h_a2 = perceptual_hash(&crop_a2)?;
    let h_b = perceptual_hash(&crop_b)?;

    println!("hashes:");
    println!("  texture A crop     {h_a1:016x}");
    println!("  same, jittered     {h_a2:016x}");
    println!("  texture B crop     {h_b:016x}");

    println!("\nsimilarity = 1 - hamming/64 (used directly as an edge weight):");
    println!(
        "  same texture, jittered crop: {:.3}",
        hash_similarity(h_a1, h_a2)
    );
    println!(
        "  different textures:          {:.3}",
        hash_similarity(h_a1, h_b)
    );
    println!(
        "  identical hashes:            {:.3}",
        hash_similarity(h_b, h_b)
    );

    assert!(hash_similarity(h_a1, h_a2) > hash_similarity(h_a1, h_b));
    println!("\njitter barely moves the hash; changing the texture moves it a lot");
    Ok(())
}
