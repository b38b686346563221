//! Compactness feature: quantize a channel map, cluster the per-value
//! observation vectors with k-means, and score each cluster by how spatially
//! concentrated its pixels are.

use crate::imaging::{norm_map, ScalarMap};

pub const DEFAULT_CLUSTERS: usize = 8;
pub const DEFAULT_ALPHA: f64 = 10.0;
/// Clusters holding less than this fraction of the image get compactness 0.
pub const MIN_CLUSTER_FRACTION: f64 = 0.03;

/// Observation vector for one quantized value: mean pixel position plus the
/// value rescaled into position units.
#[derive(Debug, Clone, Copy)]
pub struct ObservationVector {
    pub value: u8,
    pub mean_x: f64,
    pub mean_y: f64,
    pub scaled_value: f64,
    pub pixel_count: usize,
}

/// One k-means cluster of observation vectors with its compactness score.
#[derive(Debug, Clone)]
pub struct ValueCluster {
    pub member_values: Vec<u8>,
    pub pixel_count: usize,
    pub sigma_x: f64,
    pub sigma_y: f64,
    pub compactness: f64,
}

/// Quantize a normalized [0,1] map to integers in [0,255], rounding half up.
pub fn quantize_channel(m: &ScalarMap) -> Vec<u8> {
    m.values
        .iter()
        .map(|&v| (v.clamp(0.0, 1.0) * 255.0 + 0.5).floor() as u8)
        .collect()
}

/// Build the observation vectors for all quantized values present in the map.
pub fn observation_vectors(quantized: &[u8], width: usize, height: usize) -> Vec<ObservationVector> {
    let beta = width.max(height) as f64 / 256.0;
    let mut sum_x = [0.0f64; 256];
    let mut sum_y = [0.0f64; 256];
    let mut count = [0usize; 256];
    for y in 0..height {
        for x in 0..width {
            let n = quantized[y * width + x] as usize;
            sum_x[n] += x as f64;
            sum_y[n] += y as f64;
            count[n] += 1;
        }
    }
    (0..256)
        .filter(|&n| count[n] > 0)
        .map(|n| ObservationVector {
            value: n as u8,
            mean_x: sum_x[n] / count[n] as f64,
            mean_y: sum_y[n] / count[n] as f64,
            scaled_value: beta * n as f64,
            pixel_count: count[n],
        })
        .collect()
}

fn obs_point(o: &ObservationVector) -> [f64; 3] {
    [o.mean_x, o.mean_y, o.scaled_value]
}

fn dist2(a: [f64; 3], b: [f64; 3]) -> f64 {
    (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)
}

/// k-means over observation vectors. Seeds are the vectors at evenly spaced
/// ranks of scaled value among the defined values; empty clusters are dropped.
/// Returns the member indices of each cluster.
pub fn cluster_observations(obs: &[ObservationVector], k: usize) -> Vec<Vec<usize>> {
    if obs.is_empty() {
        return Vec::new();
    }
    let k = k.min(obs.len());
    // Observation vectors arrive ordered by value, hence by scaled value.
    let mut centroids: Vec<[f64; 3]> = (0..k)
        .map(|j| {
            let idx = if k == 1 {
                0
            } else {
                j * (obs.len() - 1) / (k - 1)
            };
            obs_point(&obs[idx])
        })
        .collect();

    let mut assignment = vec![0usize; obs.len()];
    for _ in 0..100 {
        for (i, o) in obs.iter().enumerate() {
            let p = obs_point(o);
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for (c, centroid) in centroids.iter().enumerate() {
                let d = dist2(p, *centroid);
                if d < best_d {
                    best_d = d;
                    best = c;
                }
            }
            assignment[i] = best;
        }
        let mut sums = vec![[0.0f64; 3]; k];
        let mut counts = vec![0usize; k];
        for (i, o) in obs.iter().enumerate() {
            let p = obs_point(o);
            let c = assignment[i];
            for d in 0..3 {
                sums[c][d] += p[d];
            }
            counts[c] += 1;
        }
        let mut movement: f64 = 0.0;
        for c in 0..k {
            if counts[c] == 0 {
                continue;
            }
            let new = [
                sums[c][0] / counts[c] as f64,
                sums[c][1] / counts[c] as f64,
                sums[c][2] / counts[c] as f64,
            ];
            movement = movement.max(dist2(new, centroids[c]).sqrt());
            centroids[c] = new;
        }
        if movement < 1e-6 {
            break;
        }
    }

    let mut clusters: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (i, &c) in assignment.iter().enumerate() {
        clusters[c].push(i);
    }
    clusters.retain(|c| !c.is_empty());
    clusters
}

/// Compactness of a pixel set from the standard deviations of its coordinates:
/// exp(-alpha * (sigma_x + sigma_y) / diag), zeroed below the 3% size floor.
pub fn compactness_score(
    sigma_x: f64,
    sigma_y: f64,
    pixel_count: usize,
    width: usize,
    height: usize,
    alpha: f64,
) -> f64 {
    if (pixel_count as f64) < MIN_CLUSTER_FRACTION * (width * height) as f64 {
        return 0.0;
    }
    let diag = ((width * width + height * height) as f64).sqrt();
    (-alpha * (sigma_x + sigma_y) / diag).exp()
}

/// Build the ValueClusters for one quantized channel: cluster the observation
/// vectors, then measure the spatial spread of each cluster's member pixels.
pub fn value_clusters(
    quantized: &[u8],
    width: usize,
    height: usize,
    k: usize,
    alpha: f64,
) -> Vec<ValueCluster> {
    let obs = observation_vectors(quantized, width, height);
    let groups = cluster_observations(&obs, k);

    // Map each quantized value to its cluster id.
    let mut value_to_cluster = [usize::MAX; 256];
    for (c, members) in groups.iter().enumerate() {
        for &m in members {
            value_to_cluster[obs[m].value as usize] = c;
        }
    }

    let nc = groups.len();
    let mut sum_x = vec![0.0f64; nc];
    let mut sum_y = vec![0.0f64; nc];
    let mut sum_x2 = vec![0.0f64; nc];
    let mut sum_y2 = vec![0.0f64; nc];
    let mut count = vec![0usize; nc];
    for y in 0..height {
        for x in 0..width {
            let c = value_to_cluster[quantized[y * width + x] as usize];
            sum_x[c] += x as f64;
            sum_y[c] += y as f64;
            sum_x2[c] += (x * x) as f64;
            sum_y2[c] += (y * y) as f64;
            count[c] += 1;
        }
    }

    groups
        .iter()
        .enumerate()
        .map(|(c, members)| {
            let n = count[c] as f64;
            let var_x = (sum_x2[c] / n - (sum_x[c] / n).powi(2)).max(0.0);
            let var_y = (sum_y2[c] / n - (sum_y[c] / n).powi(2)).max(0.0);
            let sigma_x = var_x.sqrt();
            let sigma_y = var_y.sqrt();
            ValueCluster {
                member_values: members.iter().map(|&m| obs[m].value).collect(),
                pixel_count: count[c],
                sigma_x,
                sigma_y,
                compactness: compactness_score(sigma_x, sigma_y, count[c], width, height, alpha),
            }
        })
        .collect()
}

/// Per-pixel compactness map for one normalized channel: each pixel receives
/// the compactness of the cluster containing its quantized value.
pub fn compactness_map_per_channel(channel: &ScalarMap) -> ScalarMap {
    let quantized = quantize_channel(channel);
    let clusters = value_clusters(
        &quantized,
        channel.width,
        channel.height,
        DEFAULT_CLUSTERS,
        DEFAULT_ALPHA,
    );
    let mut value_to_compactness = [0.0f64; 256];
    for cluster in &clusters {
        for &v in &cluster.member_values {
            value_to_compactness[v as usize] = cluster.compactness;
        }
    }
    let values = quantized
        .iter()
        .map(|&q| value_to_compactness[q as usize])
        .collect();
    ScalarMap::new(channel.width, channel.height, values)
}

/// Combine the three per-channel compactness maps by the euclidean norm and
/// renormalize.
pub fn fuse_compactness(c_l: &ScalarMap, c_a: &ScalarMap, c_b: &ScalarMap) -> ScalarMap {
    assert_eq!(c_l.values.len(), c_a.values.len());
    assert_eq!(c_l.values.len(), c_b.values.len());
    let values = c_l
        .values
        .iter()
        .zip(&c_a.values)
        .zip(&c_b.values)
        .map(|((&l, &a), &b)| (l * l + a * a + b * b).sqrt())
        .collect();
    norm_map(&ScalarMap::new(c_l.width, c_l.height, values))
}
