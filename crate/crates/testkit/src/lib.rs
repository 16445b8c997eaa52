//! Reference oracles and seeded fixtures for the test suites.
//!
//! Everything here deliberately takes a different algorithmic route from the
//! production kernels: Bellman-Ford plus exhaustive path enumeration instead
//! of Dijkstra/Brandes, Floyd-Warshall instead of BFS, a dense matrix power
//! iteration instead of the sparse edge sweep. Keep it that way.

pub mod fixtures;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use forumrank_core::months::Cutoff;
use forumrank_core::{CommGraph, UserId};

/// Random weighted directed graph: `n` in [4, max_n], edge density in
/// [0.1, 0.5], weights in [0.1, 5.0).
pub fn random_graph(rng: &mut ChaCha8Rng, max_n: usize) -> CommGraph {
    let n = rng.gen_range(4..=max_n);
    let density = rng.gen_range(0.1..0.5);
    let mut edges = Vec::new();
    for s in 0..n {
        for t in 0..n {
            if s != t && rng.gen_bool(density) {
                edges.push((
                    UserId(s as u32),
                    UserId(t as u32),
                    rng.gen_range(0.1..5.0),
                ));
            }
        }
    }
    let nodes = (0..n as u32).map(UserId).collect();
    CommGraph::from_edges(Cutoff::for_month(2014, 1).unwrap(), nodes, edges).unwrap()
}

/// Betweenness by brute force: Bellman-Ford distances, then exhaustive
/// enumeration of every shortest path per ordered pair, crediting interior
/// nodes with the per-pair path fraction.
pub fn betweenness_reference(graph: &CommGraph) -> Vec<f64> {
    const EPS: f64 = 1e-12;
    let n = graph.n_nodes();
    let edges: Vec<(usize, usize, f64)> = graph
        .edges()
        .iter()
        .map(|&(s, t, w)| (s as usize, t as usize, 1.0 / w))
        .collect();
    let mut in_adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for &(s, t, len) in &edges {
        in_adj[t].push((s, len));
    }

    let mut bc = vec![0.0; n];
    for source in 0..n {
        // Bellman-Ford with early exit
        let mut dist = vec![f64::INFINITY; n];
        dist[source] = 0.0;
        for _ in 0..n {
            let mut changed = false;
            for &(s, t, len) in &edges {
                if dist[s] + len < dist[t] {
                    dist[t] = dist[s] + len;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }

        for target in 0..n {
            if target == source || !dist[target].is_finite() {
                continue;
            }
            let mut n_paths = 0u64;
            let mut through = vec![0u64; n];
            let mut interior = Vec::new();
            walk_back(
                target, source, &dist, &in_adj, EPS, &mut interior, &mut n_paths, &mut through,
            );
            assert!(n_paths > 0, "distance finite but no path found");
            for u in 0..n {
                if through[u] > 0 {
                    bc[u] += through[u] as f64 / n_paths as f64;
                }
            }
        }
    }
    bc
}

#[allow(clippy::too_many_arguments)]
fn walk_back(
    v: usize,
    source: usize,
    dist: &[f64],
    in_adj: &[Vec<(usize, f64)>],
    eps: f64,
    interior: &mut Vec<usize>,
    n_paths: &mut u64,
    through: &mut Vec<u64>,
) {
    for &(p, len) in &in_adj[v] {
        if !dist[p].is_finite() || (dist[p] + len - dist[v]).abs() > eps {
            continue;
        }
        if p == source {
            *n_paths += 1;
            assert!(*n_paths < 1_000_000, "path explosion in reference oracle");
            for &x in interior.iter() {
                through[x] += 1;
            }
        } else {
            interior.push(p);
            walk_back(p, source, dist, in_adj, eps, interior, n_paths, through);
            interior.pop();
        }
    }
}

/// Harmonic closeness by all-pairs Floyd-Warshall over the undirected
/// unit-length graph; inverse distances summed in node-index order.
pub fn closeness_reference(graph: &CommGraph) -> Vec<f64> {
    let n = graph.n_nodes();
    const INF: u32 = u32::MAX / 2;
    let mut dist = vec![vec![INF; n]; n];
    for (i, row) in dist.iter_mut().enumerate() {
        row[i] = 0;
    }
    for &(s, t, _) in graph.edges() {
        dist[s as usize][t as usize] = 1;
        dist[t as usize][s as usize] = 1;
    }
    for k in 0..n {
        let row_k = dist[k].clone();
        for row_i in dist.iter_mut() {
            let dik = row_i[k];
            if dik == INF {
                continue;
            }
            for (dij, &dkj) in row_i.iter_mut().zip(&row_k) {
                let cand = dik + dkj;
                if cand < *dij {
                    *dij = cand;
                }
            }
        }
    }
    (0..n)
        .map(|u| {
            let mut total = 0.0;
            for (v, &d) in dist[u].iter().enumerate() {
                if v != u && d != INF {
                    total += 1.0 / d as f64;
                }
            }
            total
        })
        .collect()
}

/// PageRank by dense power iteration on the explicit transition matrix.
pub fn pagerank_reference(graph: &CommGraph, damping: f64) -> Vec<f64> {
    let n = graph.n_nodes();
    if n == 0 {
        return Vec::new();
    }
    let nf = n as f64;
    let mut p = vec![vec![0.0; n]; n];
    let mut out_weight = vec![0.0; n];
    for &(s, _, w) in graph.edges() {
        out_weight[s as usize] += w;
    }
    for &(s, t, w) in graph.edges() {
        p[s as usize][t as usize] = w / out_weight[s as usize];
    }
    for (i, row) in p.iter_mut().enumerate() {
        if out_weight[i] == 0.0 {
            row.fill(1.0 / nf);
        }
    }
    let mut x = vec![1.0 / nf; n];
    for _ in 0..100_000 {
        let mut next = vec![(1.0 - damping) / nf; n];
        for i in 0..n {
            for j in 0..n {
                next[j] += damping * x[i] * p[i][j];
            }
        }
        let residual: f64 = x.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        x = next;
        if residual < 1e-13 {
            break;
        }
    }
    x
}
