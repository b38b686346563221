//! SLIC superpixel segmentation and per-region statistics.
//!
//! Seeds start on a regular grid with interval `S = sqrt(W*H / eta)`, are
//! perturbed to the lowest-gradient position in a 3x3 neighborhood, and ten
//! assignment/update rounds run in (L, a, b, x, y) space with the spatial term
//! weighted `m / S`. Afterwards connectivity enforcement merges fragments
//! smaller than `S^2 / 4` into their largest adjacent region.

use std::path::Path;

use crate::error::Error;
use crate::imaging::{LabImage, ScalarMap};

pub const DEFAULT_SUPERPIXELS: usize = 250;
pub const DEFAULT_COMPACTNESS_WEIGHT: f64 = 10.0;
const ITERATIONS: usize = 10;

/// Pixel to region partition. Labels are contiguous in `[0, region_count)`.
#[derive(Debug, Clone)]
pub struct SuperpixelLabeling {
    pub width: usize,
    pub height: usize,
    pub labels: Vec<u32>,
    pub region_count: usize,
}

impl SuperpixelLabeling {
    #[inline]
    pub fn label(&self, x: usize, y: usize) -> u32 {
        self.labels[y * self.width + x]
    }
}

/// Per-region statistics feeding graph construction.
#[derive(Debug, Clone)]
pub struct RegionStat {
    pub centroid_x: f64,
    pub centroid_y: f64,
    /// Mean of the fused normalized channel maps over the region's pixels.
    pub mean_features: [f64; 3],
    pub compactness: f64,
    pub pixel_count: usize,
}

#[derive(Debug, Clone)]
pub struct RegionStats {
    pub regions: Vec<RegionStat>,
}

impl RegionStats {
    pub fn len(&self) -> usize {
        self.regions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.regions.is_empty()
    }
}

#[derive(Clone, Copy)]
struct Center {
    l: f64,
    a: f64,
    b: f64,
    x: f64,
    y: f64,
}

fn gradient(lab: &LabImage, x: usize, y: usize) -> f64 {
    let w = lab.width;
    let h = lab.height;
    let xm = x.saturating_sub(1);
    let xp = (x + 1).min(w - 1);
    let ym = y.saturating_sub(1);
    let yp = (y + 1).min(h - 1);
    let idx = |x: usize, y: usize| y * w + x;
    let dx = (lab.l[idx(xp, y)] - lab.l[idx(xm, y)]).powi(2)
        + (lab.a[idx(xp, y)] - lab.a[idx(xm, y)]).powi(2)
        + (lab.b[idx(xp, y)] - lab.b[idx(xm, y)]).powi(2);
    let dy = (lab.l[idx(x, yp)] - lab.l[idx(x, ym)]).powi(2)
        + (lab.a[idx(x, yp)] - lab.a[idx(x, ym)]).powi(2)
        + (lab.b[idx(x, yp)] - lab.b[idx(x, ym)]).powi(2);
    dx + dy
}

fn initial_centers(lab: &LabImage, target: usize) -> Vec<Center> {
    let w = lab.width;
    let h = lab.height;
    let interval = ((w * h) as f64 / target as f64).sqrt();
    let nx = ((w as f64 / interval).round() as usize).max(1);
    let ny = ((h as f64 / interval).round() as usize).max(1);
    let step_x = w as f64 / nx as f64;
    let step_y = h as f64 / ny as f64;
    let mut centers = Vec::with_capacity(nx * ny);
    for iy in 0..ny {
        for ix in 0..nx {
            let cx = ((ix as f64 + 0.5) * step_x).floor() as usize;
            let cy = ((iy as f64 + 0.5) * step_y).floor() as usize;
            let cx = cx.min(w - 1);
            let cy = cy.min(h - 1);
            // Perturb to the lowest-gradient pixel in a 3x3 neighborhood.
            let mut best = (cx, cy);
            let mut best_grad = gradient(lab, cx, cy);
            for dy in -1i64..=1 {
                for dx in -1i64..=1 {
                    let px = cx as i64 + dx;
                    let py = cy as i64 + dy;
                    if px < 0 || py < 0 || px >= w as i64 || py >= h as i64 {
                        continue;
                    }
                    let g = gradient(lab, px as usize, py as usize);
                    if g < best_grad {
                        best_grad = g;
                        best = (px as usize, py as usize);
                    }
                }
            }
            let idx = best.1 * w + best.0;
            centers.push(Center {
                l: lab.l[idx],
                a: lab.a[idx],
                b: lab.b[idx],
                x: best.0 as f64,
                y: best.1 as f64,
            });
        }
    }
    centers
}

/// Segment the full-resolution Lab image into roughly `target_regions`
/// superpixels.
pub fn slic_segment(
    lab: &LabImage,
    target_regions: usize,
    compactness_weight: f64,
) -> Result<SuperpixelLabeling, Error> {
    let w = lab.width;
    let h = lab.height;
    let max_regions = w * h / 16;
    if target_regions < 4 || target_regions > max_regions {
        return Err(Error::SuperpixelCountOutOfRange {
            requested: target_regions,
            min: 4,
            max: max_regions,
        });
    }

    let interval = ((w * h) as f64 / target_regions as f64).sqrt();
    let spatial_scale = compactness_weight / interval;
    let mut centers = initial_centers(lab, target_regions);

    let mut labels = vec![u32::MAX; w * h];
    let mut distances = vec![f64::INFINITY; w * h];
    for _ in 0..ITERATIONS {
        distances.iter_mut().for_each(|d| *d = f64::INFINITY);
        for (ci, c) in centers.iter().enumerate() {
            let reach = (2.0 * interval).ceil() as i64;
            let x0 = ((c.x as i64) - reach).max(0) as usize;
            let x1 = (((c.x as i64) + reach) as usize).min(w - 1);
            let y0 = ((c.y as i64) - reach).max(0) as usize;
            let y1 = (((c.y as i64) + reach) as usize).min(h - 1);
            for y in y0..=y1 {
                for x in x0..=x1 {
                    let idx = y * w + x;
                    let dc = (lab.l[idx] - c.l).powi(2)
                        + (lab.a[idx] - c.a).powi(2)
                        + (lab.b[idx] - c.b).powi(2);
                    let ds = (x as f64 - c.x).powi(2) + (y as f64 - c.y).powi(2);
                    let d = dc + ds * spatial_scale * spatial_scale;
                    if d < distances[idx] {
                        distances[idx] = d;
                        labels[idx] = ci as u32;
                    }
                }
            }
        }
        // Update centers to the mean of their assigned pixels.
        let mut sums = vec![[0.0f64; 5]; centers.len()];
        let mut counts = vec![0usize; centers.len()];
        for y in 0..h {
            for x in 0..w {
                let idx = y * w + x;
                let ci = labels[idx] as usize;
                sums[ci][0] += lab.l[idx];
                sums[ci][1] += lab.a[idx];
                sums[ci][2] += lab.b[idx];
                sums[ci][3] += x as f64;
                sums[ci][4] += y as f64;
                counts[ci] += 1;
            }
        }
        for (ci, c) in centers.iter_mut().enumerate() {
            if counts[ci] == 0 {
                continue;
            }
            let n = counts[ci] as f64;
            c.l = sums[ci][0] / n;
            c.a = sums[ci][1] / n;
            c.b = sums[ci][2] / n;
            c.x = sums[ci][3] / n;
            c.y = sums[ci][4] / n;
        }
    }

    let min_size = ((interval * interval) / 4.0).round() as usize;
    let labels = enforce_connectivity(&labels, w, h, min_size);
    let region_count = labels.iter().map(|&l| l as usize + 1).max().unwrap_or(0);
    Ok(SuperpixelLabeling {
        width: w,
        height: h,
        labels,
        region_count,
    })
}

/// Split each label into its 4-connected components, merge components smaller
/// than `min_size` into their largest adjacent component, and compact the
/// surviving component ids into `[0, N)`.
fn enforce_connectivity(labels: &[u32], w: usize, h: usize, min_size: usize) -> Vec<u32> {
    let mut current: Vec<u32> = labels.to_vec();
    loop {
        // Connected components of equal current label, 4-connectivity.
        let mut comp = vec![u32::MAX; w * h];
        let mut sizes: Vec<usize> = Vec::new();
        let mut stack = Vec::new();
        for start in 0..w * h {
            if comp[start] != u32::MAX {
                continue;
            }
            let id = sizes.len() as u32;
            let lbl = current[start];
            let mut size = 0usize;
            stack.push(start);
            comp[start] = id;
            while let Some(idx) = stack.pop() {
                size += 1;
                let x = idx % w;
                let y = idx / w;
                let mut visit = |nx: usize, ny: usize| {
                    let nidx = ny * w + nx;
                    if comp[nidx] == u32::MAX && current[nidx] == lbl {
                        comp[nidx] = id;
                        stack.push(nidx);
                    }
                };
                if x > 0 {
                    visit(x - 1, y);
                }
                if x + 1 < w {
                    visit(x + 1, y);
                }
                if y > 0 {
                    visit(x, y - 1);
                }
                if y + 1 < h {
                    visit(x, y + 1);
                }
            }
            sizes.push(size);
        }

        // Largest adjacent component for every small component.
        let n_comp = sizes.len();
        let mut merge_into: Vec<Option<u32>> = vec![None; n_comp];
        let mut any_small = false;
        for (cid, &size) in sizes.iter().enumerate() {
            if size >= min_size {
                continue;
            }
            let mut best: Option<(usize, u32)> = None;
            for idx in 0..w * h {
                if comp[idx] != cid as u32 {
                    continue;
                }
                let x = idx % w;
                let y = idx / w;
                let mut consider = |nidx: usize| {
                    let nc = comp[nidx];
                    if nc != cid as u32 {
                        let sz = sizes[nc as usize];
                        if best.map_or(true, |(bsz, _)| sz > bsz) {
                            best = Some((sz, nc));
                        }
                    }
                };
                if x > 0 {
                    consider(idx - 1);
                }
                if x + 1 < w {
                    consider(idx + 1);
                }
                if y > 0 {
                    consider(idx - w);
                }
                if y + 1 < h {
                    consider(idx + w);
                }
            }
            if let Some((_, target)) = best {
                merge_into[cid] = Some(target);
                any_small = true;
            }
        }

        if !any_small {
            // Compact component ids into contiguous labels.
            let mut remap = vec![u32::MAX; n_comp];
            let mut next = 0u32;
            let mut out = vec![0u32; w * h];
            for idx in 0..w * h {
                let cid = comp[idx] as usize;
                if remap[cid] == u32::MAX {
                    remap[cid] = next;
                    next += 1;
                }
                out[idx] = remap[cid];
            }
            return out;
        }

        // Merged pixels adopt the target component's id so the next round
        // unions them; merge chains resolve over iterations.
        for idx in 0..w * h {
            let cid = comp[idx] as usize;
            current[idx] = match merge_into[cid] {
                Some(target) => target,
                None => cid as u32,
            };
        }
    }
}

/// Per-region means of coordinates, channel values and compactness.
pub fn region_stats(
    labeling: &SuperpixelLabeling,
    channels: &[ScalarMap; 3],
    compact_map: &ScalarMap,
) -> RegionStats {
    let n = labeling.region_count;
    let w = labeling.width;
    let mut sum_x = vec![0.0; n];
    let mut sum_y = vec![0.0; n];
    let mut sum_f = vec![[0.0f64; 3]; n];
    let mut sum_c = vec![0.0; n];
    let mut count = vec![0usize; n];
    for y in 0..labeling.height {
        for x in 0..w {
            let idx = y * w + x;
            let r = labeling.labels[idx] as usize;
            sum_x[r] += x as f64;
            sum_y[r] += y as f64;
            for (k, ch) in channels.iter().enumerate() {
                sum_f[r][k] += ch.values[idx];
            }
            sum_c[r] += compact_map.values[idx];
            count[r] += 1;
        }
    }
    let regions = (0..n)
        .map(|r| {
            let c = count[r] as f64;
            RegionStat {
                centroid_x: sum_x[r] / c,
                centroid_y: sum_y[r] / c,
                mean_features: [sum_f[r][0] / c, sum_f[r][1] / c, sum_f[r][2] / c],
                compactness: sum_c[r] / c,
                pixel_count: count[r],
            }
        })
        .collect();
    RegionStats { regions }
}

/// Write the label map as a 16-bit grayscale PNG for inspection.
pub fn save_labels_png(labeling: &SuperpixelLabeling, path: &Path) -> Result<(), Error> {
    let pixels: Vec<u16> = labeling.labels.iter().map(|&l| l as u16).collect();
    let img = image::ImageBuffer::<image::Luma<u16>, _>::from_raw(
        labeling.width as u32,
        labeling.height as u32,
        pixels,
    )
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
