//! Random-walk equilibrium on the region graph and the intermediate
//! saliency map derived from it.

use crate::error::Error;
use crate::graphs::RegionGraph;
use crate::imaging::ScalarMap;
use crate::slic::SuperpixelLabeling;

const TOLERANCE: f64 = 1e-10;
const MAX_ITERATIONS: usize = 10_000;

/// Column-stochastic transition matrix of the walk.
#[derive(Debug, Clone)]
pub struct TransitionMatrix {
    pub node_count: usize,
    /// Row-major; entry (i, j) is the probability of moving to node i from
    /// node j.
    pub entries: Vec<f64>,
}

impl TransitionMatrix {
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.node_count + j]
    }
}

/// Normalized fixed point of the transition matrix.
#[derive(Debug, Clone)]
pub struct StationaryDistribution {
    pub probabilities: Vec<f64>,
}

/// Normalize the weight matrix so each column sums to one. Fails on a node
/// with zero total weight.
pub fn transition_matrix(g: &RegionGraph) -> Result<TransitionMatrix, Error> {
    let n = g.node_count;
    let mut degree = vec![0.0f64; n];
    for j in 0..n {
        for i in 0..n {
            degree[j] += g.weight(i, j);
        }
    }
    if let Some(node) = degree.iter().position(|&d| d <= 0.0) {
        return Err(Error::IsolatedNode { node });
    }
    let mut entries = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            entries[i * n + j] = g.weight(i, j) / degree[j];
        }
    }
    Ok(TransitionMatrix {
        node_count: n,
        entries,
    })
}

/// Power iteration from the uniform start until the L1 change drops below
/// 1e-10 or the iteration cap is hit.
pub fn stationary(tp: &TransitionMatrix) -> Result<StationaryDistribution, Error> {
    let n = tp.node_count;
    let mut pi = vec![1.0 / n as f64; n];
    let mut next = vec![0.0f64; n];
    let mut residual = f64::INFINITY;
    for _ in 0..MAX_ITERATIONS {
        for i in 0..n {
            let mut acc = 0.0;
            let row = &tp.entries[i * n..(i + 1) * n];
            for (j, &p) in pi.iter().enumerate() {
                acc += row[j] * p;
            }
            next[i] = acc;
        }
        let sum: f64 = next.iter().sum();
        next.iter_mut().for_each(|v| *v /= sum);
        residual = pi.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut pi, &mut next);
        if residual < TOLERANCE {
            return Ok(StationaryDistribution { probabilities: pi });
        }
    }
    Err(Error::NonConvergence {
        iterations: MAX_ITERATIONS,
        residual,
    })
}

/// Expand the stationary distribution into a per-pixel map: each pixel of
/// region i receives the squared min-max normalized probability of i. A
/// constant distribution maps to all zeros.
pub fn gbvs_map(
    pi: &StationaryDistribution,
    labeling: &SuperpixelLabeling,
) -> ScalarMap {
    let p = &pi.probabilities;
    let min = p.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = p.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let range = max - min;
    let region_value: Vec<f64> = if range > 0.0 {
        p.iter().map(|&v| ((v - min) / range).powi(2)).collect()
    } else {
        vec![0.0; p.len()]
    };
    let values = labeling
        .labels
        .iter()
        .map(|&l| region_value[l as usize])
        .collect();
    ScalarMap::new(labeling.width, labeling.height, values)
}

/// Per-region mean of a map over a labeling.
pub fn region_means(map: &ScalarMap, labeling: &SuperpixelLabeling) -> Vec<f64> {
    let mut sum = vec![0.0f64; labeling.region_count];
    let mut count = vec![0usize; labeling.region_count];
    for (v, &l) in map.values.iter().zip(&labeling.labels) {
        sum[l as usize] += v;
        count[l as usize] += 1;
    }
    sum.iter()
        .zip(&count)
        .map(|(&s, &c)| if c > 0 { s / c as f64 } else { 0.0 })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn graph_from_weights(n: usize, edge_weights: &[((usize, usize), f64)]) -> RegionGraph {
        let mut weights = vec![0.0; n * n];
        for &((i, j), w) in edge_weights {
            weights[i * n + j] = w;
            weights[j * n + i] = w;
        }
        RegionGraph {
            node_count: n,
            weights,
        }
    }

    #[test]
    fn two_node_forced_normalization() {
        let g = graph_from_weights(2, &[((0, 1), 5.0)]);
        let tp = transition_matrix(&g).unwrap();
        assert_eq!(tp.get(0, 0), 0.0);
        assert_eq!(tp.get(1, 0), 1.0);
        assert_eq!(tp.get(0, 1), 1.0);
        assert_eq!(tp.get(1, 1), 0.0);
        let pi = stationary(&tp).unwrap();
        assert_abs_diff_eq!(pi.probabilities[0], 0.5, epsilon = 1e-9);
    }

    #[test]
    fn uniform_complete_graph() {
        let mut edges = Vec::new();
        for i in 0..4 {
            for j in (i + 1)..4 {
                edges.push(((i, j), 1.0));
            }
        }
        let g = graph_from_weights(4, &edges);
        let tp = transition_matrix(&g).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let expected = if i == j { 0.0 } else { 1.0 / 3.0 };
                assert_abs_diff_eq!(tp.get(i, j), expected, epsilon = 1e-15);
            }
        }
        let pi = stationary(&tp).unwrap();
        for &p in &pi.probabilities {
            assert_abs_diff_eq!(p, 0.25, epsilon = 1e-9);
        }
    }

    #[test]
    fn three_node_hand_normalization() {
        let g = graph_from_weights(3, &[((0, 1), 1.0), ((0, 2), 3.0), ((1, 2), 2.0)]);
        let tp = transition_matrix(&g).unwrap();
        // Column for node 0: (0, 1/4, 3/4).
        assert_abs_diff_eq!(tp.get(0, 0), 0.0);
        assert_abs_diff_eq!(tp.get(1, 0), 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(tp.get(2, 0), 0.75, epsilon = 1e-15);
    }

    #[test]
    fn columns_sum_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 40;
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                edges.push(((i, j), rng.gen_range(0.01..2.0)));
            }
        }
        let g = graph_from_weights(n, &edges);
        let tp = transition_matrix(&g).unwrap();
        for j in 0..n {
            let col: f64 = (0..n).map(|i| tp.get(i, j)).sum();
            assert_abs_diff_eq!(col, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn isolated_node_rejected() {
        let g = graph_from_weights(3, &[((0, 1), 1.0)]);
        assert!(matches!(
            transition_matrix(&g),
            Err(Error::IsolatedNode { node: 2 })
        ));
    }

    #[test]
    fn stationary_matches_degree_closed_form() {
        // For symmetric weights the stationary distribution is degree over
        // total degree (detailed balance).
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for n in [3usize, 8, 25, 60] {
            let mut edges = Vec::new();
            for i in 0..n {
                for j in (i + 1)..n {
                    edges.push(((i, j), rng.gen_range(0.05..3.0)));
                }
            }
            let g = graph_from_weights(n, &edges);
            let deg: Vec<f64> = (0..n)
                .map(|i| (0..n).map(|j| g.weight(i, j)).sum())
                .collect();
            let total: f64 = deg.iter().sum();
            let tp = transition_matrix(&g).unwrap();
            let pi = stationary(&tp).unwrap();
            // Fixed-point residual.
            let mut l1 = 0.0;
            for i in 0..n {
                let applied: f64 = (0..n).map(|j| tp.get(i, j) * pi.probabilities[j]).sum();
                l1 += (applied - pi.probabilities[i]).abs();
            }
            assert!(l1 < 1e-8);
            for i in 0..n {
                assert_abs_diff_eq!(pi.probabilities[i], deg[i] / total, epsilon = 1e-8);
            }
        }
    }

    fn trivial_labeling(region_values: usize) -> SuperpixelLabeling {
        SuperpixelLabeling {
            width: region_values,
            height: 1,
            labels: (0..region_values as u32).collect(),
            region_count: region_values,
        }
    }

    #[test]
    fn gbvs_map_squared_normalization() {
        let pi = StationaryDistribution {
            probabilities: vec![0.1, 0.3, 0.6],
        };
        let m = gbvs_map(&pi, &trivial_labeling(3));
        assert_abs_diff_eq!(m.values[0], 0.0);
        assert_abs_diff_eq!(m.values[1], 0.16, epsilon = 1e-12);
        assert_abs_diff_eq!(m.values[2], 1.0);
    }

    #[test]
    fn gbvs_map_uniform_pi_is_zero() {
        let pi = StationaryDistribution {
            probabilities: vec![0.25; 4],
        };
        let m = gbvs_map(&pi, &trivial_labeling(4));
        assert!(m.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn gbvs_map_preserves_region_ranking() {
        let pi = StationaryDistribution {
            probabilities: vec![0.05, 0.4, 0.25, 0.3],
        };
        let m = gbvs_map(&pi, &trivial_labeling(4));
        let mut rank_pi: Vec<usize> = (0..4).collect();
        rank_pi.sort_by(|&a, &b| pi.probabilities[a].total_cmp(&pi.probabilities[b]));
        let mut rank_m: Vec<usize> = (0..4).collect();
        rank_m.sort_by(|&a, &b| m.values[a].total_cmp(&m.values[b]));
        assert_eq!(rank_pi, rank_m);
    }

    #[test]
    fn region_means_average_pixels() {
        let labeling = SuperpixelLabeling {
            width: 2,
            height: 2,
            labels: vec![0, 0, 1, 1],
            region_count: 2,
        };
        let m = ScalarMap::new(2, 2, vec![0.2, 0.4, 1.0, 0.0]);
        assert_eq!(region_means(&m, &labeling), vec![0.30000000000000004, 0.5]);
    }
}
