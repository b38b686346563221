//! Image decoding, sRGB to CIELab conversion, map normalization and
//! multi-scale feature-map fusion.

use std::path::Path;

use crate::error::Error;

/// Decoded 8-bit sRGB image.
#[derive(Debug, Clone)]
pub struct RasterImage {
    pub width: usize,
    pub height: usize,
    /// Row-major RGB triples, `width * height` entries.
    pub data: Vec<[u8; 3]>,
}

/// CIELab planes at full resolution. L* in [0, 100].
#[derive(Debug, Clone)]
pub struct LabImage {
    pub width: usize,
    pub height: usize,
    pub l: Vec<f64>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

/// Real-valued per-pixel scalar field.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarMap {
    pub width: usize,
    pub height: usize,
    pub values: Vec<f64>,
}

impl ScalarMap {
    pub fn new(width: usize, height: usize, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), width * height);
        ScalarMap {
            width,
            height,
            values,
        }
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        ScalarMap {
            width,
            height,
            values: vec![value; width * height],
        }
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }
}

pub const MIN_DIMENSION: usize = 16;

/// Decode a PNG or binary PPM image from disk.
pub fn load_image(path: &Path) -> Result<RasterImage, Error> {
    if !path.exists() {
        return Err(Error::InputNotFound(path.to_path_buf()));
    }
    let dynimg = image::open(path).map_err(|source| Error::Decode {
        path: path.to_path_buf(),
        source,
    })?;
    let rgb = dynimg.to_rgb8();
    let (w, h) = rgb.dimensions();
    if (w as usize) < MIN_DIMENSION || (h as usize) < MIN_DIMENSION {
        return Err(Error::ImageTooSmall {
            width: w,
            height: h,
        });
    }
    let data = rgb.pixels().map(|p| p.0).collect();
    Ok(RasterImage {
        width: w as usize,
        height: h as usize,
        data,
    })
}

/// Write a [0,1] map as an 8-bit grayscale PNG (value = round(255 * v)).
pub fn save_map_png(map: &ScalarMap, path: &Path) -> Result<(), Error> {
    let pixels: Vec<u8> = map
        .values
        .iter()
        .map(|&v| (v.clamp(0.0, 1.0) * 255.0).round() as u8)
        .collect();
    let img = image::GrayImage::from_raw(map.width as u32, map.height as u32, pixels)
        .expect("buffer size matches dimensions");
    img.save(path).map_err(|source| match source {
        image::ImageError::IoError(e) => Error::Io {
            path: path.to_path_buf(),
            source: e,
        },
        other => Error::Decode {
            path: path.to_path_buf(),
            source: other,
        },
    })
}

fn srgb_channel_to_linear(c: u8) -> f64 {
    let c = c as f64 / 255.0;
    if c <= 0.04045 {
        c / 12.92
    } else {
        ((c + 0.055) / 1.055).powf(2.4)
    }
}

// sRGB -> XYZ (D65) matrix rows.
const XYZ_ROWS: [[f64; 3]; 3] = [
    [0.4124564, 0.3575761, 0.1804375],
    [0.2126729, 0.7151522, 0.0721750],
    [0.0193339, 0.1191920, 0.9503041],
];

// Reference white taken as the matrix applied to (1,1,1), so the gray axis
// maps exactly onto a* = b* = 0.
const WHITE: [f64; 3] = [
    XYZ_ROWS[0][0] + XYZ_ROWS[0][1] + XYZ_ROWS[0][2],
    XYZ_ROWS[1][0] + XYZ_ROWS[1][1] + XYZ_ROWS[1][2],
    XYZ_ROWS[2][0] + XYZ_ROWS[2][1] + XYZ_ROWS[2][2],
];

fn lab_f(t: f64) -> f64 {
    const DELTA: f64 = 6.0 / 29.0;
    if t > DELTA * DELTA * DELTA {
        t.cbrt()
    } else {
        t / (3.0 * DELTA * DELTA) + 4.0 / 29.0
    }
}

/// Convert a single sRGB triple to CIELab under D65.
pub fn srgb_pixel_to_lab(rgb: [u8; 3]) -> (f64, f64, f64) {
    let r = srgb_channel_to_linear(rgb[0]);
    let g = srgb_channel_to_linear(rgb[1]);
    let b = srgb_channel_to_linear(rgb[2]);
    let x = XYZ_ROWS[0][0] * r + XYZ_ROWS[0][1] * g + XYZ_ROWS[0][2] * b;
    let y = XYZ_ROWS[1][0] * r + XYZ_ROWS[1][1] * g + XYZ_ROWS[1][2] * b;
    let z = XYZ_ROWS[2][0] * r + XYZ_ROWS[2][1] * g + XYZ_ROWS[2][2] * b;
    let fx = lab_f(x / WHITE[0]);
    let fy = lab_f(y / WHITE[1]);
    let fz = lab_f(z / WHITE[2]);
    (116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz))
}

/// Per-pixel sRGB to CIELab conversion (D65 white, piecewise linearization).
pub fn srgb_to_lab(img: &RasterImage) -> LabImage {
    let n = img.width * img.height;
    let mut l = Vec::with_capacity(n);
    let mut a = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    for &px in &img.data {
        let (pl, pa, pb) = srgb_pixel_to_lab(px);
        l.push(pl);
        a.push(pa);
        b.push(pb);
    }
    LabImage {
        width: img.width,
        height: img.height,
        l,
        a,
        b,
    }
}

/// Min-max normalize a map to [0,1]. A constant map normalizes to all zeros.
pub fn norm_map(m: &ScalarMap) -> ScalarMap {
    let min = m.values.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = m.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let range = max - min;
    let values = if range > 0.0 {
        m.values.iter().map(|&v| (v - min) / range).collect()
    } else {
        vec![0.0; m.values.len()]
    };
    ScalarMap::new(m.width, m.height, values)
}

/// Box-average downsample by a factor of 2 (edges clamp on odd dimensions).
fn downsample_half(m: &ScalarMap) -> ScalarMap {
    let dw = (m.width + 1) / 2;
    let dh = (m.height + 1) / 2;
    let mut values = Vec::with_capacity(dw * dh);
    for dy in 0..dh {
        for dx in 0..dw {
            let x0 = dx * 2;
            let y0 = dy * 2;
            let x1 = (x0 + 1).min(m.width - 1);
            let y1 = (y0 + 1).min(m.height - 1);
            let mut sum = 0.0;
            let mut count = 0.0;
            for &y in &[y0, y1] {
                for &x in &[x0, x1] {
                    sum += m.get(x, y);
                    count += 1.0;
                }
            }
            values.push(sum / count);
        }
    }
    ScalarMap::new(dw, dh, values)
}

/// Produce the map at spatial scales 1, 1/2 and 1/4.
pub fn build_scales(m: &ScalarMap) -> [ScalarMap; 3] {
    assert!(m.width >= 4 && m.height >= 4);
    let half = downsample_half(m);
    let quarter = downsample_half(&half);
    [m.clone(), half, quarter]
}

/// Bilinear resample to the target dimensions (pixel-center alignment).
pub fn resize_bilinear(m: &ScalarMap, width: usize, height: usize) -> ScalarMap {
    if m.width == width && m.height == height {
        return m.clone();
    }
    let sx = m.width as f64 / width as f64;
    let sy = m.height as f64 / height as f64;
    let mut values = Vec::with_capacity(width * height);
    for y in 0..height {
        let src_y = ((y as f64 + 0.5) * sy - 0.5).clamp(0.0, (m.height - 1) as f64);
        let y0 = src_y.floor() as usize;
        let y1 = (y0 + 1).min(m.height - 1);
        let fy = src_y - y0 as f64;
        for x in 0..width {
            let src_x = ((x as f64 + 0.5) * sx - 0.5).clamp(0.0, (m.width - 1) as f64);
            let x0 = src_x.floor() as usize;
            let x1 = (x0 + 1).min(m.width - 1);
            let fx = src_x - x0 as f64;
            // a + f * (b - a) is exact for a == b, so constant maps stay
            // bit-constant through resampling.
            let lerp = |a: f64, b: f64, f: f64| a + f * (b - a);
            let top = lerp(m.get(x0, y0), m.get(x1, y0), fx);
            let bottom = lerp(m.get(x0, y1), m.get(x1, y1), fx);
            values.push(lerp(top, bottom, fy));
        }
    }
    ScalarMap::new(width, height, values)
}

/// Fuse the three scale maps of one channel: upsample each to the base
/// resolution, normalize, average pixelwise, and renormalize.
pub fn fuse_scales(maps: &[ScalarMap; 3]) -> ScalarMap {
    let base = &maps[0];
    let mut acc = vec![0.0; base.width * base.height];
    for m in maps {
        let up = resize_bilinear(m, base.width, base.height);
        let normed = norm_map(&up);
        for (a, v) in acc.iter_mut().zip(normed.values) {
            *a += v / 3.0;
        }
    }
    norm_map(&ScalarMap::new(base.width, base.height, acc))
}
