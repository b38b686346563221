//! Final map construction and pipeline orchestration.
//!
//! The per-pixel value of the final map depends on the vertex's degree within
//! the dense subgraph: degrees above the mean are boosted with exponent
//! `1/gamma`, degrees at or below the mean are suppressed with exponent
//! `gamma`, and excluded regions get zero. The orchestrator chains every
//! stage from Lab conversion through the dense-subgraph refinement.

use crate::dks::{dense_k_subgraph, DksResult};
use crate::error::Error;
use crate::features::{compactness_map_per_channel, fuse_compactness};
use crate::graphs::{build_gbvs_graph, build_image_graph, entropy_threshold, SparseGraph};
use crate::imaging::{
    build_scales, fuse_scales, norm_map, srgb_to_lab, RasterImage, ScalarMap,
};
use crate::markov::{gbvs_map, region_means, stationary, transition_matrix};
use crate::slic::{region_stats, slic_segment, RegionStats, SuperpixelLabeling};

/// Tunable pipeline parameters; defaults follow the evaluated configuration.
#[derive(Debug, Clone)]
pub struct PipelineParams {
    /// Target superpixel count.
    pub superpixels: usize,
    /// Dense-subgraph size as a fraction of the realized region count.
    pub k_frac: f64,
    /// Map enhancement factor.
    pub gamma: f64,
    /// Seed for the random-edge procedure of the dense subgraph search.
    pub rng_seed: u64,
    /// SLIC compactness weight.
    pub slic_m: f64,
}

impl Default for PipelineParams {
    fn default() -> Self {
        PipelineParams {
            superpixels: 250,
            k_frac: 0.8,
            gamma: 3.0,
            rng_seed: 0,
            slic_m: 10.0,
        }
    }
}

/// Final map plus every intermediate worth dumping or asserting on.
#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub final_map: ScalarMap,
    pub labeling: SuperpixelLabeling,
    pub stats: RegionStats,
    pub compactness_map: ScalarMap,
    pub gbvs: ScalarMap,
    /// Pre-normalization dense-subgraph map.
    pub dense_map: ScalarMap,
    /// None when the graph degenerated before sparsification.
    pub sparse_graph: Option<SparseGraph>,
    pub dks: Option<DksResult>,
}

/// Saliency value of one dense-subgraph vertex from its induced degree.
pub fn dense_vertex_value(degree: usize, d_max: usize, d_mean: f64, gamma: f64) -> f64 {
    if d_max == 0 {
        return 0.0;
    }
    let ratio = degree as f64 / d_max as f64;
    if degree as f64 > d_mean {
        ratio.powf(1.0 / gamma)
    } else {
        ratio.powf(gamma)
    }
}

/// Expand the dense-subgraph result into a per-pixel map.
pub fn dense_map(
    result: &DksResult,
    labeling: &SuperpixelLabeling,
    gamma: f64,
) -> ScalarMap {
    let d_max = result.induced_degrees.iter().copied().max().unwrap_or(0);
    let d_mean = result.induced_degrees.iter().sum::<usize>() as f64
        / result.vertices.len().max(1) as f64;
    let mut region_value = vec![0.0f64; labeling.region_count];
    for (&v, &deg) in result.vertices.iter().zip(&result.induced_degrees) {
        region_value[v as usize] = dense_vertex_value(deg, d_max, d_mean, gamma);
    }
    let values = labeling
        .labels
        .iter()
        .map(|&l| region_value[l as usize])
        .collect();
    ScalarMap::new(labeling.width, labeling.height, values)
}

/// Final normalization of the dense map.
pub fn finalize(m: &ScalarMap) -> ScalarMap {
    norm_map(m)
}

fn zero_output(
    labeling: SuperpixelLabeling,
    stats: RegionStats,
    compactness_map: ScalarMap,
    gbvs: ScalarMap,
) -> PipelineOutput {
    let zero = ScalarMap::filled(labeling.width, labeling.height, 0.0);
    PipelineOutput {
        final_map: zero.clone(),
        labeling,
        stats,
        compactness_map,
        gbvs,
        dense_map: zero,
        sparse_graph: None,
        dks: None,
    }
}

/// Run the full pipeline on a decoded image. Deterministic for fixed
/// parameters and seed. Featureless inputs short-circuit to an all-zero map.
pub fn run_pipeline(img: &RasterImage, params: &PipelineParams) -> Result<PipelineOutput, Error> {
    let lab = srgb_to_lab(img);
    let labeling = slic_segment(&lab, params.superpixels, params.slic_m)
        .map_err(|e| e.in_stage("slic"))?;

    // Fused multi-scale channel maps, normalized to [0,1].
    let raw_channels = [&lab.l, &lab.a, &lab.b];
    let mut channels: Vec<ScalarMap> = Vec::with_capacity(3);
    for raw in raw_channels {
        let m = norm_map(&ScalarMap::new(lab.width, lab.height, raw.clone()));
        channels.push(fuse_scales(&build_scales(&m)));
    }
    let channels: [ScalarMap; 3] = [
        channels[0].clone(),
        channels[1].clone(),
        channels[2].clone(),
    ];

    // Compactness from the full-resolution normalized channels.
    let compact = fuse_compactness(
        &compactness_map_per_channel(&channels[0]),
        &compactness_map_per_channel(&channels[1]),
        &compactness_map_per_channel(&channels[2]),
    );

    let stats = region_stats(&labeling, &channels, &compact);
    let diag = ((img.width * img.width + img.height * img.height) as f64).sqrt();

    let g_image = build_image_graph(&stats, diag);
    let gbvs = match transition_matrix(&g_image) {
        Ok(tp) => {
            let pi = stationary(&tp).map_err(|e| e.in_stage("stationary"))?;
            gbvs_map(&pi, &labeling)
        }
        // A featureless image has an all-zero graph; its saliency is zero.
        Err(Error::IsolatedNode { .. }) => {
            ScalarMap::filled(labeling.width, labeling.height, 0.0)
        }
        Err(e) => return Err(e.in_stage("transition")),
    };

    let mean_saliency = region_means(&gbvs, &labeling);
    let g_gbvs = build_gbvs_graph(&mean_saliency, &stats, diag);
    let sparse = match entropy_threshold(&g_gbvs) {
        Ok(s) => s,
        Err(Error::DegenerateGraph) => {
            return Ok(zero_output(labeling, stats, compact, gbvs));
        }
        Err(e) => return Err(e.in_stage("threshold")),
    };

    let n = labeling.region_count;
    let k = ((params.k_frac * n as f64).round() as usize).clamp(2, n);
    let dks = dense_k_subgraph(&sparse, k, params.rng_seed).map_err(|e| e.in_stage("dks"))?;

    let dense = dense_map(&dks, &labeling, params.gamma);
    let final_map = finalize(&dense);
    Ok(PipelineOutput {
        final_map,
        labeling,
        stats,
        compactness_map: compact,
        gbvs,
        dense_map: dense,
        sparse_graph: Some(sparse),
        dks: Some(dks),
    })
}
