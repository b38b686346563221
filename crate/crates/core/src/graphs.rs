//! Fully connected region graphs and entropy-maximizing sparsification.
//!
//! Edge weights multiply three symmetric factors: feature contrast, spatial
//! proximity (1 - centroid distance / image diagonal) and a compactness term
//! in [1, 1.5]. Sparsification scans a threshold grid over fractions of the
//! maximum edge weight and keeps the cut that maximizes the binary entropy of
//! the discarded-vs-retained weight mass split.

use crate::error::Error;
use crate::slic::RegionStats;

/// Symmetric weighted complete graph over regions.
#[derive(Debug, Clone)]
pub struct RegionGraph {
    pub node_count: usize,
    /// Row-major N x N weight matrix; symmetric, zero diagonal.
    pub weights: Vec<f64>,
}

impl RegionGraph {
    #[inline]
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[i * self.node_count + j]
    }

    /// Iterate undirected edges (i < j) with their weights.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let n = self.node_count;
        (0..n).flat_map(move |i| ((i + 1)..n).map(move |j| (i, j, self.weight(i, j))))
    }
}

/// Unweighted graph kept after entropy thresholding.
#[derive(Debug, Clone)]
pub struct SparseGraph {
    pub node_count: usize,
    /// Undirected edges, i < j.
    pub edges: Vec<(u32, u32)>,
    pub threshold: f64,
    pub entropy: f64,
}

impl SparseGraph {
    pub fn from_edges(node_count: usize, mut edges: Vec<(u32, u32)>) -> Self {
        for e in edges.iter_mut() {
            if e.0 > e.1 {
                *e = (e.1, e.0);
            }
        }
        edges.sort_unstable();
        edges.dedup();
        SparseGraph {
            node_count,
            edges,
            threshold: 0.0,
            entropy: 0.0,
        }
    }

    /// Adjacency lists, sorted neighbor indices.
    pub fn adjacency(&self) -> Vec<Vec<u32>> {
        let mut adj = vec![Vec::new(); self.node_count];
        for &(i, j) in &self.edges {
            adj[i as usize].push(j);
            adj[j as usize].push(i);
        }
        for list in adj.iter_mut() {
            list.sort_unstable();
        }
        adj
    }
}

fn spatial_weight(
    (x1, y1): (f64, f64),
    (x2, y2): (f64, f64),
    diag: f64,
) -> f64 {
    1.0 - ((x1 - x2).powi(2) + (y1 - y2).powi(2)).sqrt() / diag
}

fn compactness_weight(c1: f64, c2: f64) -> f64 {
    1.0 + (c1 - c2).abs() / 2.0
}

/// Combined edge weight for the image graph: euclidean feature contrast times
/// spatial proximity times the compactness term.
pub fn image_edge_weight(
    features_i: [f64; 3],
    features_j: [f64; 3],
    centroid_i: (f64, f64),
    centroid_j: (f64, f64),
    compact_i: f64,
    compact_j: f64,
    diag: f64,
) -> f64 {
    let feature: f64 = features_i
        .iter()
        .zip(&features_j)
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        .sqrt();
    feature * spatial_weight(centroid_i, centroid_j, diag) * compactness_weight(compact_i, compact_j)
}

/// Combined edge weight for the saliency graph: absolute mean-saliency
/// contrast times spatial proximity times the compactness term.
pub fn gbvs_edge_weight(
    saliency_i: f64,
    saliency_j: f64,
    centroid_i: (f64, f64),
    centroid_j: (f64, f64),
    compact_i: f64,
    compact_j: f64,
    diag: f64,
) -> f64 {
    (saliency_i - saliency_j).abs()
        * spatial_weight(centroid_i, centroid_j, diag)
        * compactness_weight(compact_i, compact_j)
}

/// Build the fully connected graph over regions from region statistics.
pub fn build_image_graph(stats: &RegionStats, diag: f64) -> RegionGraph {
    let n = stats.len();
    let mut weights = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let ri = &stats.regions[i];
            let rj = &stats.regions[j];
            let w = image_edge_weight(
                ri.mean_features,
                rj.mean_features,
                (ri.centroid_x, ri.centroid_y),
                (rj.centroid_x, rj.centroid_y),
                ri.compactness,
                rj.compactness,
                diag,
            );
            weights[i * n + j] = w;
            weights[j * n + i] = w;
        }
    }
    RegionGraph {
        node_count: n,
        weights,
    }
}

/// Build the fully connected graph over regions from per-region mean saliency
/// of the intermediate map, reusing centroids and compactness.
pub fn build_gbvs_graph(
    mean_saliency: &[f64],
    stats: &RegionStats,
    diag: f64,
) -> RegionGraph {
    let n = stats.len();
    assert_eq!(mean_saliency.len(), n);
    let mut weights = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let ri = &stats.regions[i];
            let rj = &stats.regions[j];
            let w = gbvs_edge_weight(
                mean_saliency[i],
                mean_saliency[j],
                (ri.centroid_x, ri.centroid_y),
                (rj.centroid_x, rj.centroid_y),
                ri.compactness,
                rj.compactness,
                diag,
            );
            weights[i * n + j] = w;
            weights[j * n + i] = w;
        }
    }
    RegionGraph {
        node_count: n,
        weights,
    }
}

/// Threshold grid: fractions 0.10, 0.15, ..., 0.95 of the maximum edge weight.
pub const THRESHOLD_FRACTIONS: usize = 18;

pub fn threshold_grid(max_weight: f64) -> impl Iterator<Item = f64> {
    (0..THRESHOLD_FRACTIONS).map(move |i| (0.10 + 0.05 * i as f64) * max_weight)
}

/// Binary entropy of the discarded weight fraction, natural log, 0*ln(0) = 0.
pub fn weight_entropy(r: f64) -> f64 {
    let term = |p: f64| if p > 0.0 { -p * p.ln() } else { 0.0 };
    term(r) + term(1.0 - r)
}

/// One evaluated grid point of the entropy scan.
#[derive(Debug, Clone, Copy)]
pub struct EntropyPoint {
    pub threshold: f64,
    pub discarded_fraction: f64,
    pub entropy: f64,
}

/// Evaluate the entropy at every grid threshold.
pub fn entropy_scan(weights: &[f64]) -> Vec<EntropyPoint> {
    let total: f64 = weights.iter().sum();
    let max = weights.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    threshold_grid(max)
        .map(|t| {
            let discarded: f64 = weights.iter().filter(|&&w| w <= t).sum();
            let r = discarded / total;
            EntropyPoint {
                threshold: t,
                discarded_fraction: r,
                entropy: weight_entropy(r),
            }
        })
        .collect()
}

/// Sparsify a graph by keeping the edges above the entropy-maximizing grid
/// threshold. Ties break toward the smaller threshold.
pub fn entropy_threshold(g: &RegionGraph) -> Result<SparseGraph, Error> {
    let edge_weights: Vec<f64> = g.edges().map(|(_, _, w)| w).collect();
    if !edge_weights.iter().any(|&w| w > 0.0) {
        return Err(Error::DegenerateGraph);
    }
    let scan = entropy_scan(&edge_weights);
    let best = scan
        .iter()
        .enumerate()
        .fold(None::<(usize, f64)>, |acc, (i, p)| match acc {
            Some((_, e)) if p.entropy <= e => acc,
            _ => Some((i, p.entropy)),
        })
        .expect("grid is nonempty");
    let best = &scan[best.0];
    let edges = g
        .edges()
        .filter(|&(_, _, w)| w > best.threshold)
        .map(|(i, j, _)| (i as u32, j as u32))
        .collect();
    Ok(SparseGraph {
        node_count: g.node_count,
        edges,
        threshold: best.threshold,
        entropy: best.entropy,
    })
}

/// Incident retained-edge count per node.
pub fn sparse_degrees(g: &SparseGraph) -> Vec<usize> {
    let mut deg = vec![0usize; g.node_count];
    for &(i, j) in &g.edges {
        deg[i as usize] += 1;
        deg[j as usize] += 1;
    }
    deg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::slic::RegionStat;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn stat(features: [f64; 3], centroid: (f64, f64), compactness: f64) -> RegionStat {
        RegionStat {
            centroid_x: centroid.0,
            centroid_y: centroid.1,
            mean_features: features,
            compactness,
            pixel_count: 1,
        }
    }

    #[test]
    fn identical_regions_give_zero_weight() {
        let w = image_edge_weight(
            [0.5, 0.5, 0.5],
            [0.5, 0.5, 0.5],
            (10.0, 10.0),
            (10.0, 10.0),
            0.3,
            0.3,
            100.0,
        );
        assert_eq!(w, 0.0);
    }

    #[test]
    fn unit_feature_distance() {
        let w = image_edge_weight(
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            (5.0, 5.0),
            (5.0, 5.0),
            0.2,
            0.2,
            100.0,
        );
        assert_abs_diff_eq!(w, 1.0);
    }

    #[test]
    fn image_weight_hand_example() {
        // features differ by (0.3, 0.4, 0) -> 0.5; centroid distance D/2 ->
        // spatial 0.5; |dc| = 0.6 -> compactness 1.3.
        let d = 100.0;
        let w = image_edge_weight(
            [0.0, 0.0, 0.0],
            [0.3, 0.4, 0.0],
            (0.0, 0.0),
            (50.0, 0.0),
            0.2,
            0.8,
            d,
        );
        assert_abs_diff_eq!(w, 0.5 * 0.5 * 1.3, epsilon = 1e-12);
    }

    #[test]
    fn gbvs_weight_examples() {
        let d = 100.0;
        assert_eq!(
            gbvs_edge_weight(0.4, 0.4, (0.0, 0.0), (10.0, 0.0), 0.5, 0.5, d),
            0.0
        );
        assert_abs_diff_eq!(
            gbvs_edge_weight(0.0, 1.0, (3.0, 4.0), (3.0, 4.0), 0.5, 0.5, d),
            1.0
        );
        // |dI| = 0.4, centroid distance 0.25 D, |dc| = 1 -> 0.4 * 0.75 * 1.5.
        assert_abs_diff_eq!(
            gbvs_edge_weight(0.1, 0.5, (0.0, 0.0), (25.0, 0.0), 0.0, 1.0, d),
            0.45,
            epsilon = 1e-12
        );
    }

    #[test]
    fn built_graphs_are_symmetric() {
        let stats = RegionStats {
            regions: vec![
                stat([0.1, 0.2, 0.3], (1.0, 2.0), 0.1),
                stat([0.9, 0.1, 0.4], (8.0, 3.0), 0.7),
                stat([0.5, 0.5, 0.5], (4.0, 9.0), 0.4),
            ],
        };
        let g = build_image_graph(&stats, 20.0);
        for i in 0..3 {
            assert_eq!(g.weight(i, i), 0.0);
            for j in 0..3 {
                assert_eq!(g.weight(i, j), g.weight(j, i));
                assert!(g.weight(i, j) >= 0.0);
            }
        }
        let g2 = build_gbvs_graph(&[0.2, 0.9, 0.1], &stats, 20.0);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(g2.weight(i, j), g2.weight(j, i));
            }
        }
    }

    #[test]
    fn entropy_peak_at_half() {
        assert_abs_diff_eq!(weight_entropy(0.5), (2.0f64).ln(), epsilon = 1e-15);
        assert_eq!(weight_entropy(0.0), 0.0);
        assert_eq!(weight_entropy(1.0), 0.0);
        for r in [0.1, 0.3, 0.45, 0.6, 0.9] {
            assert!(weight_entropy(r) < (2.0f64).ln());
        }
    }

    fn complete_graph_from_weights(edge_weights: &[f64], n: usize) -> RegionGraph {
        let mut weights = vec![0.0; n * n];
        let mut it = edge_weights.iter();
        for i in 0..n {
            for j in (i + 1)..n {
                let w = *it.next().unwrap();
                weights[i * n + j] = w;
                weights[j * n + i] = w;
            }
        }
        RegionGraph {
            node_count: n,
            weights,
        }
    }

    #[test]
    fn fifty_fifty_split_attains_ln2() {
        // Three edges: {1, 1, 2}. At T = 0.5 * 2 = 1.0 the discarded mass is
        // 2 of 4, r = 0.5, En = ln 2, the global maximum.
        let g = complete_graph_from_weights(&[1.0, 1.0, 2.0], 3);
        let sparse = entropy_threshold(&g).unwrap();
        assert_abs_diff_eq!(sparse.entropy, (2.0f64).ln(), epsilon = 1e-12);
        // Only the weight-2 edge survives w > 1.0.
        assert_eq!(sparse.edges, vec![(1, 2)]);
    }

    #[test]
    fn two_edge_hand_enumeration() {
        // Weights {1, 9}: T = 0.10 * 9 = 0.9 discards nothing (r = 0, En = 0);
        // any T >= 1 discards weight 1 (r = 0.1). The grid argmax is the
        // smallest threshold reaching r = 0.1.
        let g = complete_graph_from_weights(&[1.0, 9.0, 0.0], 3);
        let sparse = entropy_threshold(&g).unwrap();
        let expected_en = weight_entropy(0.1);
        assert_abs_diff_eq!(sparse.entropy, expected_en, epsilon = 1e-12);
        assert_abs_diff_eq!(sparse.threshold, 0.15 * 9.0, epsilon = 1e-12);
        assert_eq!(sparse.edges.len(), 1);
    }

    #[test]
    fn degenerate_graph_rejected() {
        let g = complete_graph_from_weights(&[0.0, 0.0, 0.0], 3);
        assert!(matches!(entropy_threshold(&g), Err(Error::DegenerateGraph)));
    }

    #[test]
    fn sparse_degrees_cases() {
        let empty = SparseGraph::from_edges(4, vec![]);
        assert_eq!(sparse_degrees(&empty), vec![0, 0, 0, 0]);

        let triangle = SparseGraph::from_edges(3, vec![(0, 1), (1, 2), (0, 2)]);
        assert_eq!(sparse_degrees(&triangle), vec![2, 2, 2]);

        let star = SparseGraph::from_edges(5, vec![(0, 1), (0, 2), (0, 3), (0, 4)]);
        assert_eq!(sparse_degrees(&star), vec![4, 1, 1, 1, 1]);
    }

    proptest! {
        #[test]
        fn entropy_in_range_and_matches_exhaustive(
            edge_weights in proptest::collection::vec(0.0f64..10.0, 6),
        ) {
            prop_assume!(edge_weights.iter().any(|&w| w > 0.0));
            let g = complete_graph_from_weights(&edge_weights, 4);
            let sparse = entropy_threshold(&g).unwrap();
            // Independent exhaustive grid evaluation.
            let max = edge_weights.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let total: f64 = edge_weights.iter().sum();
            let mut best_t = f64::NAN;
            let mut best_en = f64::NEG_INFINITY;
            for i in 0..18 {
                let t = (0.10 + 0.05 * i as f64) * max;
                let r: f64 = edge_weights.iter().filter(|&&w| w <= t).sum::<f64>() / total;
                let en = weight_entropy(r);
                if en > best_en {
                    best_en = en;
                    best_t = t;
                }
            }
            prop_assert!((sparse.threshold - best_t).abs() < 1e-12);
            prop_assert!((sparse.entropy - best_en).abs() < 1e-12);
            prop_assert!(sparse.entropy >= 0.0 && sparse.entropy <= (2.0f64).ln() + 1e-12);
        }

        #[test]
        fn thresholding_is_monotone(
            edge_weights in proptest::collection::vec(0.0f64..10.0, 6),
            t_lo in 0.0f64..5.0,
            dt in 0.0f64..5.0,
        ) {
            let g = complete_graph_from_weights(&edge_weights, 4);
            let count = |t: f64| g.edges().filter(|&(_, _, w)| w > t).count();
            prop_assert!(count(t_lo + dt) <= count(t_lo));
        }
    }
}
