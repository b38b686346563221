//! Precision/recall/F-measure/MAE evaluation over saliency map and
//! ground-truth directory pairs.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::Error;

/// 8-bit grayscale saliency map as read back from disk.
#[derive(Debug, Clone)]
pub struct GrayMap {
    pub width: usize,
    pub height: usize,
    pub values: Vec<u8>,
}

impl GrayMap {
    pub fn load(path: &Path) -> Result<GrayMap, Error> {
        let img = image::open(path)
            .map_err(|source| Error::Decode {
                path: path.to_path_buf(),
                source,
            })?
            .to_luma8();
        let (w, h) = img.dimensions();
        Ok(GrayMap {
            width: w as usize,
            height: h as usize,
            values: img.into_raw(),
        })
    }
}

/// Binarized map or ground truth.
#[derive(Debug, Clone)]
pub struct BinaryMask {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<bool>,
}

/// Evaluation metrics, per image or dataset-averaged.
#[derive(Debug, Clone)]
pub struct EvalReport {
    /// Mean (precision, recall) at each of the 256 binarization thresholds.
    pub pr_curve: Vec<(f64, f64)>,
    pub adaptive_precision: f64,
    pub adaptive_recall: f64,
    pub adaptive_f: f64,
    pub mae: f64,
    pub image_count: usize,
}

/// Salient iff value strictly above the threshold, so T = 255 gives an empty
/// mask and completes the PR curve.
pub fn binarize(map: &GrayMap, threshold: u8) -> BinaryMask {
    BinaryMask {
        width: map.width,
        height: map.height,
        pixels: map.values.iter().map(|&v| v > threshold).collect(),
    }
}

/// Ground truth convention: a pixel is salient iff its value exceeds 127.
pub fn gt_mask(map: &GrayMap) -> BinaryMask {
    binarize(map, 127)
}

/// Precision and recall of a mask against ground truth. Empty mask has
/// precision 1 (no false positives); empty ground truth has recall 1.
pub fn pr_point(mask: &BinaryMask, gt: &BinaryMask) -> Result<(f64, f64), Error> {
    if mask.width != gt.width || mask.height != gt.height {
        return Err(Error::DimensionMismatch {
            expected: format!("{}x{}", gt.width, gt.height),
            actual: format!("{}x{}", mask.width, mask.height),
        });
    }
    let mut both = 0usize;
    let mut mask_count = 0usize;
    let mut gt_count = 0usize;
    for (&m, &g) in mask.pixels.iter().zip(&gt.pixels) {
        if m {
            mask_count += 1;
        }
        if g {
            gt_count += 1;
        }
        if m && g {
            both += 1;
        }
    }
    let precision = if mask_count == 0 {
        1.0
    } else {
        both as f64 / mask_count as f64
    };
    let recall = if gt_count == 0 {
        1.0
    } else {
        both as f64 / gt_count as f64
    };
    Ok((precision, recall))
}

/// Weighted harmonic mean of precision and recall; zero when both are zero.
pub fn f_measure(precision: f64, recall: f64, alpha: f64) -> f64 {
    let denom = alpha * precision + recall;
    if denom == 0.0 {
        0.0
    } else {
        (1.0 + alpha) * precision * recall / denom
    }
}

/// Adaptive binarization threshold: twice the mean value, clamped to the
/// map's maximum.
pub fn adaptive_threshold(map: &GrayMap) -> f64 {
    let mean = map.values.iter().map(|&v| v as f64).sum::<f64>() / map.values.len() as f64;
    let max = map.values.iter().copied().max().unwrap_or(0) as f64;
    (2.0 * mean).min(max)
}

fn binarize_at(map: &GrayMap, threshold: f64) -> BinaryMask {
    BinaryMask {
        width: map.width,
        height: map.height,
        pixels: map.values.iter().map(|&v| v as f64 > threshold).collect(),
    }
}

/// Mean absolute error between a [0,1] map (8-bit, scaled by 255) and a
/// binary ground truth.
pub fn mae(map: &GrayMap, gt: &BinaryMask) -> Result<f64, Error> {
    if map.width != gt.width || map.height != gt.height {
        return Err(Error::DimensionMismatch {
            expected: format!("{}x{}", gt.width, gt.height),
            actual: format!("{}x{}", map.width, map.height),
        });
    }
    let sum: f64 = map
        .values
        .iter()
        .zip(&gt.pixels)
        .map(|(&v, &g)| {
            let s = v as f64 / 255.0;
            let t = if g { 1.0 } else { 0.0 };
            (s - t).abs()
        })
        .sum();
    Ok(sum / map.values.len() as f64)
}

/// Metrics for one map/ground-truth pair.
pub fn eval_pair(map: &GrayMap, gt: &BinaryMask) -> Result<EvalReport, Error> {
    let mut pr_curve = Vec::with_capacity(256);
    for t in 0..=255u8 {
        pr_curve.push(pr_point(&binarize(map, t), gt)?);
    }
    let ta = adaptive_threshold(map);
    let (ap, ar) = pr_point(&binarize_at(map, ta), gt)?;
    Ok(EvalReport {
        pr_curve,
        adaptive_precision: ap,
        adaptive_recall: ar,
        adaptive_f: f_measure(ap, ar, 1.0),
        mae: mae(map, gt)?,
        image_count: 1,
    })
}

/// Pair files by stem between two directories. Unpaired files are reported
/// back to the caller and skipped.
pub fn pair_by_stem(
    maps_dir: &Path,
    gt_dir: &Path,
) -> Result<(Vec<(PathBuf, PathBuf)>, Vec<PathBuf>), Error> {
    let list = |dir: &Path| -> Result<BTreeMap<String, PathBuf>, Error> {
        let mut out = BTreeMap::new();
        for entry in fs::read_dir(dir).map_err(|source| Error::Io {
            path: dir.to_path_buf(),
            source,
        })? {
            let entry = entry.map_err(|source| Error::Io {
                path: dir.to_path_buf(),
                source,
            })?;
            let path = entry.path();
            if path.is_file() {
                if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
                    out.insert(stem.to_string(), path);
                }
            }
        }
        Ok(out)
    };
    let maps = list(maps_dir)?;
    let mut gts = list(gt_dir)?;
    let mut pairs = Vec::new();
    let mut unpaired = Vec::new();
    for (stem, map_path) in maps {
        match gts.remove(&stem) {
            Some(gt_path) => pairs.push((map_path, gt_path)),
            None => unpaired.push(map_path),
        }
    }
    unpaired.extend(gts.into_values());
    Ok((pairs, unpaired))
}

/// Evaluate every stem-paired map/ground-truth file and average per-image
/// metrics across the dataset.
pub fn dataset_eval(maps_dir: &Path, gt_dir: &Path) -> Result<(EvalReport, Vec<PathBuf>), Error> {
    let (pairs, unpaired) = pair_by_stem(maps_dir, gt_dir)?;
    if pairs.is_empty() {
        return Err(Error::NoPairs);
    }
    let reports: Vec<EvalReport> = pairs
        .iter()
        .map(|(map_path, gt_path)| {
            let map = GrayMap::load(map_path)?;
            let gt = gt_mask(&GrayMap::load(gt_path)?);
            eval_pair(&map, &gt)
        })
        .collect::<Result<_, _>>()?;
    Ok((average_reports(&reports), unpaired))
}

/// Arithmetic mean of per-image metrics.
pub fn average_reports(reports: &[EvalReport]) -> EvalReport {
    let n = reports.len() as f64;
    let mut pr_curve = vec![(0.0, 0.0); 256];
    for r in reports {
        for (acc, &(p, rec)) in pr_curve.iter_mut().zip(&r.pr_curve) {
            acc.0 += p / n;
            acc.1 += rec / n;
        }
    }
    EvalReport {
        pr_curve,
        adaptive_precision: reports.iter().map(|r| r.adaptive_precision).sum::<f64>() / n,
        adaptive_recall: reports.iter().map(|r| r.adaptive_recall).sum::<f64>() / n,
        adaptive_f: reports.iter().map(|r| r.adaptive_f).sum::<f64>() / n,
        mae: reports.iter().map(|r| r.mae).sum::<f64>() / n,
        image_count: reports.len(),
    }
}

/// Write `pr_curve.csv` and `summary.csv` into the output directory.
pub fn write_csv(report: &EvalReport, out_dir: &Path) -> Result<(), Error> {
    let io_err = |path: &Path, source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    fs::create_dir_all(out_dir).map_err(|e| io_err(out_dir, e))?;

    let pr_path = out_dir.join("pr_curve.csv");
    let mut pr = String::from("threshold,mean_precision,mean_recall\n");
    for (t, &(p, r)) in report.pr_curve.iter().enumerate() {
        pr.push_str(&format!("{t},{p},{r}\n"));
    }
    fs::write(&pr_path, pr).map_err(|e| io_err(&pr_path, e))?;

    let summary_path = out_dir.join("summary.csv");
    let summary = format!(
        "precision,recall,f_measure,mae,n_images\n{},{},{},{},{}\n",
        report.adaptive_precision,
        report.adaptive_recall,
        report.adaptive_f,
        report.mae,
        report.image_count
    );
    fs::write(&summary_path, summary).map_err(|e| io_err(&summary_path, e))?;
    Ok(())
}
