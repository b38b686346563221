//! Approximate densest-k-subgraph search on the thresholded sparse graph.
//!
//! Three procedures run and the densest result wins: random edge sampling,
//! a two-phase degree greedy, and a seeded search ranked by length-2 walk
//! counts. A brute-force enumerator doubles as the test oracle on small
//! graphs.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::graphs::{sparse_degrees, SparseGraph};

/// Result of the dense subgraph search.
#[derive(Debug, Clone)]
pub struct DksResult {
    /// Selected vertices, exactly k of them, ascending order.
    pub vertices: Vec<u32>,
    /// Degree of each selected vertex within the induced subgraph, aligned
    /// with `vertices`.
    pub induced_degrees: Vec<usize>,
    /// Average induced degree, 2|E(S)| / k.
    pub density: f64,
}

/// Average degree of the subgraph induced on `s`: 2 |E(S)| / |S|.
pub fn density(g: &SparseGraph, s: &[u32]) -> Result<f64, Error> {
    if s.is_empty() {
        return Err(Error::EmptyVertexSet);
    }
    let mut member = vec![false; g.node_count];
    for &v in s {
        member[v as usize] = true;
    }
    let internal = g
        .edges
        .iter()
        .filter(|&&(i, j)| member[i as usize] && member[j as usize])
        .count();
    Ok(2.0 * internal as f64 / s.len() as f64)
}

fn induced_degrees(g: &SparseGraph, s: &[u32]) -> Vec<usize> {
    let mut member = vec![false; g.node_count];
    let mut position = vec![usize::MAX; g.node_count];
    for (idx, &v) in s.iter().enumerate() {
        member[v as usize] = true;
        position[v as usize] = idx;
    }
    let mut deg = vec![0usize; s.len()];
    for &(i, j) in &g.edges {
        if member[i as usize] && member[j as usize] {
            deg[position[i as usize]] += 1;
            deg[position[j as usize]] += 1;
        }
    }
    deg
}

/// Truncate to k keeping insertion order, or pad with unused vertices by
/// ascending index.
fn fit_to_k(g: &SparseGraph, mut picked: Vec<u32>, k: usize) -> Vec<u32> {
    picked.truncate(k);
    if picked.len() < k {
        let mut used = vec![false; g.node_count];
        for &v in &picked {
            used[v as usize] = true;
        }
        for v in 0..g.node_count as u32 {
            if picked.len() == k {
                break;
            }
            if !used[v as usize] {
                picked.push(v);
            }
        }
    }
    picked
}

/// Procedure 1: sample ceil(k/2) distinct edges uniformly and collect their
/// endpoints, trimming or padding to exactly k.
pub fn proc1_random_edges(g: &SparseGraph, k: usize, rng_seed: u64) -> Vec<u32> {
    assert!(k <= g.node_count);
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let want = (k + 1) / 2;
    let m = g.edges.len();
    let chosen = if m <= want {
        (0..m).collect::<Vec<_>>()
    } else {
        rand::seq::index::sample(&mut rng, m, want).into_vec()
    };
    let mut picked = Vec::with_capacity(k);
    let mut used = vec![false; g.node_count];
    for idx in chosen {
        let (i, j) = g.edges[idx];
        for v in [i, j] {
            if !used[v as usize] {
                used[v as usize] = true;
                picked.push(v);
            }
        }
    }
    fit_to_k(g, picked, k)
}

/// Procedure 2: take the ceil(k/2) highest-degree vertices, then the
/// floor(k/2) vertices with the most neighbors inside that core. Ties break
/// toward the lower index.
pub fn proc2_greedy(g: &SparseGraph, k: usize) -> Vec<u32> {
    assert!(k <= g.node_count);
    let deg = sparse_degrees(g);
    let mut order: Vec<u32> = (0..g.node_count as u32).collect();
    order.sort_by(|&a, &b| {
        deg[b as usize]
            .cmp(&deg[a as usize])
            .then(a.cmp(&b))
    });
    let core_size = (k + 1) / 2;
    let core: Vec<u32> = order[..core_size].to_vec();
    let mut in_core = vec![false; g.node_count];
    for &v in &core {
        in_core[v as usize] = true;
    }
    let mut into_core = vec![0usize; g.node_count];
    for &(i, j) in &g.edges {
        if in_core[j as usize] {
            into_core[i as usize] += 1;
        }
        if in_core[i as usize] {
            into_core[j as usize] += 1;
        }
    }
    let mut rest: Vec<u32> = (0..g.node_count as u32)
        .filter(|&v| !in_core[v as usize])
        .collect();
    rest.sort_by(|&a, &b| {
        into_core[b as usize]
            .cmp(&into_core[a as usize])
            .then(a.cmp(&b))
    });
    let mut picked = core;
    picked.extend(rest.into_iter().take(k - core_size));
    picked
}

/// Number of walks of length two starting at each vertex: the sum of the
/// degrees of its neighbors.
fn length2_walks(g: &SparseGraph) -> Vec<usize> {
    let deg = sparse_degrees(g);
    let mut w2 = vec![0usize; g.node_count];
    for &(i, j) in &g.edges {
        w2[i as usize] += deg[j as usize];
        w2[j as usize] += deg[i as usize];
    }
    w2
}

const MAX_SEEDS: usize = 32;

/// Procedure 3: rank vertices by length-2 walk count; for each of the top
/// seeds, grow a candidate set from the seed and its highest-degree neighbors,
/// filling greedily by most neighbors into the partial set, and return the
/// densest candidate.
pub fn proc3_walks2(g: &SparseGraph, k: usize) -> Vec<u32> {
    assert!(k <= g.node_count);
    let deg = sparse_degrees(g);
    let w2 = length2_walks(g);
    let adj = g.adjacency();

    let mut seeds: Vec<u32> = (0..g.node_count as u32).collect();
    seeds.sort_by(|&a, &b| {
        w2[b as usize]
            .cmp(&w2[a as usize])
            .then(a.cmp(&b))
    });
    seeds.truncate(MAX_SEEDS.min(g.node_count));

    let mut best: Option<(f64, Vec<u32>)> = None;
    for &seed in &seeds {
        let mut set = vec![seed];
        let mut member = vec![false; g.node_count];
        member[seed as usize] = true;

        // Highest-degree neighbors of the seed, up to ceil(k/2) - 1 of them.
        let mut neighbors: Vec<u32> = adj[seed as usize].clone();
        neighbors.sort_by(|&a, &b| {
            deg[b as usize]
                .cmp(&deg[a as usize])
                .then(a.cmp(&b))
        });
        for &v in neighbors.iter().take((k + 1) / 2 - 1) {
            if !member[v as usize] {
                member[v as usize] = true;
                set.push(v);
            }
        }

        // Fill to k, each step adding the vertex with the most neighbors in
        // the current set, ties toward the lower index.
        let mut into_set = vec![0usize; g.node_count];
        for &v in &set {
            for &u in &adj[v as usize] {
                into_set[u as usize] += 1;
            }
        }
        while set.len() < k {
            let mut pick: Option<u32> = None;
            let mut pick_count = 0usize;
            for v in 0..g.node_count as u32 {
                if member[v as usize] {
                    continue;
                }
                let c = into_set[v as usize];
                if pick.is_none() || c > pick_count {
                    pick = Some(v);
                    pick_count = c;
                }
            }
            let v = pick.expect("k <= node_count");
            member[v as usize] = true;
            set.push(v);
            for &u in &adj[v as usize] {
                into_set[u as usize] += 1;
            }
        }

        let d = density(g, &set).expect("nonempty");
        // Strictly-greater keeps the candidate from the higher-ranked seed on
        // density ties.
        if best.as_ref().map_or(true, |(bd, _)| d > *bd) {
            best = Some((d, set));
        }
    }
    match best {
        Some((_, set)) => set,
        None => fit_to_k(g, Vec::new(), k),
    }
}

/// Run all three procedures and return the densest vertex set. Density ties
/// resolve in procedure order 2, 3, 1.
pub fn dense_k_subgraph(g: &SparseGraph, k: usize, rng_seed: u64) -> Result<DksResult, Error> {
    assert!(k >= 1 && k <= g.node_count);
    let candidates = [
        proc2_greedy(g, k),
        proc3_walks2(g, k),
        proc1_random_edges(g, k, rng_seed),
    ];
    let mut best: Option<(f64, Vec<u32>)> = None;
    for set in candidates {
        let d = density(g, &set)?;
        if best.as_ref().map_or(true, |(bd, _)| d > *bd) {
            best = Some((d, set));
        }
    }
    let (density, mut vertices) = best.expect("three candidates");
    vertices.sort_unstable();
    let induced = induced_degrees(g, &vertices);
    Ok(DksResult {
        vertices,
        induced_degrees: induced,
        density,
    })
}

const BRUTE_FORCE_LIMIT: usize = 20;

/// Exact maximum-density k-subset by exhaustive enumeration; ties resolve to
/// the lexicographically smallest set. Test oracle, limited to 20 nodes.
pub fn brute_force_dks(g: &SparseGraph, k: usize) -> Result<Vec<u32>, Error> {
    let n = g.node_count;
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::BruteForceTooLarge(n));
    }
    assert!(k >= 1 && k <= n);
    let mut adj_bits = vec![0u32; n];
    for &(i, j) in &g.edges {
        adj_bits[i as usize] |= 1 << j;
        adj_bits[j as usize] |= 1 << i;
    }
    let mut best_edges = usize::MAX; // sentinel: not yet set
    let mut best_set: Vec<u32> = Vec::new();
    let mut current: Vec<u32> = Vec::with_capacity(k);

    fn recurse(
        start: u32,
        n: u32,
        k: usize,
        adj_bits: &[u32],
        current: &mut Vec<u32>,
        best_edges: &mut usize,
        best_set: &mut Vec<u32>,
    ) {
        if current.len() == k {
            let mut mask = 0u32;
            for &v in current.iter() {
                mask |= 1 << v;
            }
            let edges: usize = current
                .iter()
                .map(|&v| (adj_bits[v as usize] & mask).count_ones() as usize)
                .sum::<usize>()
                / 2;
            // Enumeration order is lexicographic, so strictly-greater keeps
            // the lexicographically smallest maximizer.
            if *best_edges == usize::MAX || edges > *best_edges {
                *best_edges = edges;
                *best_set = current.clone();
            }
            return;
        }
        let remaining = k - current.len();
        for v in start..=(n - remaining as u32) {
            current.push(v);
            recurse(v + 1, n, k, adj_bits, current, best_edges, best_set);
            current.pop();
        }
    }

    recurse(
        0,
        n as u32,
        k,
        &adj_bits,
        &mut current,
        &mut best_edges,
        &mut best_set,
    );
    Ok(best_set)
}
