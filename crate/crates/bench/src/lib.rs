//! Shared helpers for the criterion benchmarks.

use densal_core::imaging::RasterImage;

/// Deterministic synthetic test image: a compact disk plus a soft distractor
/// gradient on a muted background.
pub fn synthetic_image(width: usize, height: usize) -> RasterImage {
    let cx = width as f64 * 0.35;
    let cy = height as f64 * 0.5;
    let radius = width.min(height) as f64 / 6.0;
    let data = (0..width * height)
        .map(|idx| {
            let x = (idx % width) as f64;
            let y = (idx / width) as f64;
            if ((x - cx).powi(2) + (y - cy).powi(2)).sqrt() < radius {
                [230, 40, 40]
            } else {
                let g = 100 + ((x / width as f64) * 30.0) as u8;
                [g, g, g + 10]
            }
        })
        .collect();
    RasterImage {
        width,
        height,
        data,
    }
}
