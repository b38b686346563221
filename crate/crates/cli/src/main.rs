//! Command-line front end: single-image runs, batch processing, evaluation
//! and parameter sweeps.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use densal_core::composer::{PipelineOutput, PipelineParams};
use densal_core::eval::{
    average_reports, dataset_eval, eval_pair, gt_mask, write_csv, EvalReport, GrayMap,
};
use densal_core::imaging::{load_image, save_map_png, ScalarMap};
use densal_core::run_pipeline;
use densal_core::slic::save_labels_png;

#[derive(Parser)]
#[command(name = "densal", about = "Superpixel-graph saliency detection", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ParamArgs {
    /// Target superpixel count.
    #[arg(long, default_value_t = 250)]
    superpixels: usize,
    /// Dense-subgraph size as a fraction of the region count.
    #[arg(long, default_value_t = 0.8)]
    k_frac: f64,
    /// Map enhancement factor.
    #[arg(long, default_value_t = 3.0)]
    gamma: f64,
    /// Seed for the randomized dense-subgraph procedure.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// SLIC compactness weight.
    #[arg(long, default_value_t = 10.0)]
    slic_m: f64,
}

impl ParamArgs {
    fn to_params(&self) -> PipelineParams {
        PipelineParams {
            superpixels: self.superpixels,
            k_frac: self.k_frac,
            gamma: self.gamma,
            rng_seed: self.seed,
            slic_m: self.slic_m,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Compute the saliency map of a single image.
    Run {
        /// Input image (PNG or binary PPM).
        #[arg(long = "in")]
        input: PathBuf,
        /// Output saliency map (8-bit grayscale PNG).
        #[arg(long = "out")]
        output: PathBuf,
        #[command(flatten)]
        params: ParamArgs,
        /// Also write intermediate maps and graph diagnostics next to the
        /// output.
        #[arg(long)]
        dump_intermediates: bool,
    },
    /// Process every image in a directory.
    Batch {
        /// Directory of input images.
        #[arg(long = "in")]
        input: PathBuf,
        /// Directory for output maps (created if missing).
        #[arg(long = "out")]
        output: PathBuf,
        #[command(flatten)]
        params: ParamArgs,
        /// Worker pool size; defaults to the logical CPU count.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Evaluate saliency maps against ground truth masks.
    Eval {
        /// Directory of saliency maps.
        #[arg(long)]
        maps: PathBuf,
        /// Directory of binary ground-truth images, paired by file stem.
        #[arg(long)]
        gt: PathBuf,
        /// Output directory for pr_curve.csv and summary.csv.
        #[arg(long = "out")]
        output: PathBuf,
    },
    /// Sweep k-frac and/or gamma over a dataset and report mean F and MAE.
    Sweep {
        /// Directory of input images.
        #[arg(long = "in")]
        input: PathBuf,
        /// Directory of binary ground-truth images, paired by file stem.
        #[arg(long)]
        gt: PathBuf,
        /// Output CSV path.
        #[arg(long = "out")]
        output: PathBuf,
        /// Parameter to sweep: k-frac (0.1..1.0) or gamma (1..5).
        #[arg(long, value_parser = ["k-frac", "gamma"], default_value = "k-frac")]
        param: String,
        #[command(flatten)]
        params: ParamArgs,
        /// Worker pool size; defaults to the logical CPU count.
        #[arg(long)]
        jobs: Option<usize>,
    },
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run {
            input,
            output,
            params,
            dump_intermediates,
        } => cmd_run(&input, &output, &params.to_params(), dump_intermediates),
        Command::Batch {
            input,
            output,
            params,
            jobs,
        } => cmd_batch(&input, &output, &params.to_params(), jobs),
        Command::Eval { maps, gt, output } => cmd_eval(&maps, &gt, &output),
        Command::Sweep {
            input,
            gt,
            output,
            param,
            params,
            jobs,
        } => cmd_sweep(&input, &gt, &output, &param, &params.to_params(), jobs),
    }
}

fn cmd_run(
    input: &Path,
    output: &Path,
    params: &PipelineParams,
    dump_intermediates: bool,
) -> Result<()> {
    let t0 = Instant::now();
    let img = load_image(input).context("load stage")?;
    let t_load = t0.elapsed();

    let t1 = Instant::now();
    let out = run_pipeline(&img, params).context("pipeline")?;
    let t_pipeline = t1.elapsed();

    let t2 = Instant::now();
    save_map_png(&out.final_map, output)
        .with_context(|| format!("write stage for {}", output.display()))?;
    if dump_intermediates {
        dump_extras(&out, output)?;
    }
    let t_write = t2.elapsed();

    println!(
        "load {:.1} ms | pipeline {:.1} ms ({} regions) | write {:.1} ms",
        t_load.as_secs_f64() * 1e3,
        t_pipeline.as_secs_f64() * 1e3,
        out.labeling.region_count,
        t_write.as_secs_f64() * 1e3,
    );
    Ok(())
}

fn dump_extras(out: &PipelineOutput, output: &Path) -> Result<()> {
    let stem = output
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("map")
        .to_string();
    let dir = output.parent().unwrap_or_else(|| Path::new("."));
    let side = |suffix: &str, ext: &str| dir.join(format!("{stem}_{suffix}.{ext}"));

    save_map_png(&out.gbvs, &side("gbvs", "png")).context("dump gbvs map")?;
    save_map_png(&out.compactness_map, &side("compactness", "png"))
        .context("dump compactness map")?;
    save_labels_png(&out.labeling, &side("labels", "png")).context("dump label map")?;

    if let Some(sparse) = &out.sparse_graph {
        let mut csv = String::from("threshold,entropy\n");
        csv.push_str(&format!("{},{}\n", sparse.threshold, sparse.entropy));
        fs::write(side("threshold", "csv"), csv).context("dump threshold csv")?;
    }
    if let Some(dks) = &out.dks {
        let mut csv = String::from("vertex,induced_degree\n");
        for (&v, &d) in dks.vertices.iter().zip(&dks.induced_degrees) {
            csv.push_str(&format!("{v},{d}\n"));
        }
        fs::write(side("dense_set", "csv"), csv).context("dump dense set csv")?;
    }
    Ok(())
}

fn list_images(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("read directory {}", dir.display()))?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| {
            p.extension()
                .and_then(|e| e.to_str())
                .map(|e| {
                    matches!(e.to_ascii_lowercase().as_str(), "png" | "ppm" | "pnm")
                })
                .unwrap_or(false)
        })
        .collect();
    files.sort();
    Ok(files)
}

fn with_pool<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        builder = builder.num_threads(n);
    }
    Ok(builder.build().context("build worker pool")?.install(f))
}

fn cmd_batch(
    input: &Path,
    output: &Path,
    params: &PipelineParams,
    jobs: Option<usize>,
) -> Result<()> {
    use rayon::prelude::*;
    let files = list_images(input)?;
    if files.is_empty() {
        bail!("no images found in {}", input.display());
    }
    fs::create_dir_all(output)
        .with_context(|| format!("create output directory {}", output.display()))?;
    let results: Vec<Result<PathBuf>> = with_pool(jobs, || {
        files
            .par_iter()
            .map(|path| {
                let img = load_image(path)
                    .with_context(|| format!("load stage for {}", path.display()))?;
                let out = run_pipeline(&img, params)
                    .with_context(|| format!("pipeline for {}", path.display()))?;
                let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("map");
                let dest = output.join(format!("{stem}.png"));
                save_map_png(&out.final_map, &dest)
                    .with_context(|| format!("write stage for {}", dest.display()))?;
                Ok(dest)
            })
            .collect()
    })?;
    let mut failures = 0;
    for r in &results {
        if let Err(e) = r {
            eprintln!("error: {e:#}");
            failures += 1;
        }
    }
    println!("processed {} images, {failures} failures", results.len());
    if failures > 0 {
        bail!("{failures} of {} images failed", results.len());
    }
    Ok(())
}

fn cmd_eval(maps: &Path, gt: &Path, output: &Path) -> Result<()> {
    let (report, unpaired) = dataset_eval(maps, gt).context("dataset evaluation")?;
    for path in &unpaired {
        eprintln!("warning: unpaired file skipped: {}", path.display());
    }
    write_csv(&report, output).context("write evaluation csv")?;
    println!(
        "n={} precision={:.4} recall={:.4} f={:.4} mae={:.4}",
        report.image_count,
        report.adaptive_precision,
        report.adaptive_recall,
        report.adaptive_f,
        report.mae
    );
    Ok(())
}

fn sweep_values(param: &str) -> Vec<f64> {
    match param {
        "gamma" => vec![1.0, 2.0, 3.0, 4.0, 5.0],
        _ => (1..=10).map(|i| i as f64 / 10.0).collect(),
    }
}

/// Mean adaptive-threshold metrics for one parameter setting over the paired
/// images.
fn evaluate_setting(
    pairs: &[(PathBuf, PathBuf)],
    params: &PipelineParams,
) -> Result<EvalReport> {
    use rayon::prelude::*;
    let reports: Vec<EvalReport> = pairs
        .par_iter()
        .map(|(img_path, gt_path)| {
            let img = load_image(img_path)
                .with_context(|| format!("load {}", img_path.display()))?;
            let out = run_pipeline(&img, params)
                .with_context(|| format!("pipeline for {}", img_path.display()))?;
            let map = quantize_to_gray(&out.final_map);
            let gt = gt_mask(&GrayMap::load(gt_path).context("load ground truth")?);
            eval_pair(&map, &gt).context("evaluate pair")
        })
        .collect::<Result<_>>()?;
    Ok(average_reports(&reports))
}

fn quantize_to_gray(map: &ScalarMap) -> GrayMap {
    GrayMap {
        width: map.width,
        height: map.height,
        values: map
            .values
            .iter()
            .map(|&v| (v.clamp(0.0, 1.0) * 255.0).round() as u8)
            .collect(),
    }
}

fn cmd_sweep(
    input: &Path,
    gt: &Path,
    output: &Path,
    param: &str,
    base: &PipelineParams,
    jobs: Option<usize>,
) -> Result<()> {
    let images = list_images(input)?;
    let pairs: Vec<(PathBuf, PathBuf)> = images
        .into_iter()
        .filter_map(|img| {
            let stem = img.file_stem()?.to_str()?.to_string();
            ["png", "ppm", "pnm"]
                .iter()
                .map(|ext| gt.join(format!("{stem}.{ext}")))
                .find(|p| p.exists())
                .map(|gt_path| (img, gt_path))
        })
        .collect();
    if pairs.is_empty() {
        bail!("no image/ground-truth pairs between {} and {}", input.display(), gt.display());
    }

    let rows: Vec<(f64, EvalReport)> = with_pool(jobs, || -> Result<_> {
        sweep_values(param)
            .into_iter()
            .map(|value| {
                let mut params = base.clone();
                match param {
                    "gamma" => params.gamma = value,
                    _ => params.k_frac = value,
                }
                Ok((value, evaluate_setting(&pairs, &params)?))
            })
            .collect()
    })??;

    let mut csv = String::from("param,value,mean_f_measure,mean_mae\n");
    for (value, report) in &rows {
        csv.push_str(&format!(
            "{param},{value},{},{}\n",
            report.adaptive_f, report.mae
        ));
    }
    if let Some(parent) = output.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .with_context(|| format!("create {}", parent.display()))?;
        }
    }
    fs::write(output, csv).with_context(|| format!("write {}", output.display()))?;
    println!("swept {param} over {} settings on {} images", rows.len(), pairs.len());
    Ok(())
}
