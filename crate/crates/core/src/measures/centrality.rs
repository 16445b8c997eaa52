//! Centrality kernels over one snapshot graph.
//!
//! Per-source sweeps (BFS, Brandes accumulation) run in parallel over
//! fixed-size source chunks and merge in chunk order, so results are
//! bit-stable across runs and thread counts.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::extraction::CommGraph;

use super::{Measure, ScoreTable};

/// Sources per parallel work item; fixed so merge order never varies.
const SOURCE_CHUNK: usize = 64;

/// Tolerance for treating two weighted path lengths as equal when counting
/// shortest paths.
const LEN_EPS: f64 = 1e-12;

/// Number of distinct in-neighbors per node.
pub fn in_degree(graph: &CommGraph) -> ScoreTable {
    let mut counts = vec![0u32; graph.n_nodes()];
    for &(_, t, _) in graph.edges() {
        counts[t as usize] += 1;
    }
    ScoreTable::from_graph(graph, Measure::InDegree, counts.into_iter().map(f64::from).collect())
}

/// Unweighted bidirectional harmonic closeness: `sum over v of 1/d(u,v)`,
/// with unreachable pairs contributing zero.
pub fn harmonic_closeness(graph: &CommGraph) -> ScoreTable {
    let n = graph.n_nodes();
    let undirected = undirected_adjacency(graph);
    let scores: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|s| {
            // BFS; each source's score is independent of every other sweep
            let mut dist = vec![u32::MAX; n];
            let mut queue = std::collections::VecDeque::new();
            dist[s] = 0;
            queue.push_back(s as u32);
            while let Some(v) = queue.pop_front() {
                let d = dist[v as usize];
                for &w in &undirected[v as usize] {
                    if dist[w as usize] == u32::MAX {
                        dist[w as usize] = d + 1;
                        queue.push_back(w);
                    }
                }
            }
            // sum inverse distances in node-index order so the result is
            // independent of BFS discovery order
            let mut total = 0.0;
            for (v, &d) in dist.iter().enumerate() {
                if v != s && d != u32::MAX {
                    total += 1.0 / d as f64;
                }
            }
            total
        })
        .collect();
    ScoreTable::from_graph(graph, Measure::HarmonicCloseness, scores)
}

fn undirected_adjacency(graph: &CommGraph) -> Vec<Vec<u32>> {
    let mut adj = vec![Vec::new(); graph.n_nodes()];
    for &(s, t, _) in graph.edges() {
        adj[s as usize].push(t);
        adj[t as usize].push(s);
    }
    for list in &mut adj {
        list.sort_unstable();
        list.dedup();
    }
    adj
}

/// Directed weighted betweenness (Brandes), edge length = 1/weight, raw
/// unnormalized sums, endpoints excluded.
pub fn betweenness(graph: &CommGraph) -> ScoreTable {
    let n = graph.n_nodes();
    if n == 0 {
        return ScoreTable::from_graph(graph, Measure::Betweenness, Vec::new());
    }
    let lengths: Vec<Vec<(u32, f64)>> = (0..n)
        .map(|i| graph.out_edges(i).map(|(t, w)| (t, 1.0 / w)).collect())
        .collect();
    let sources: Vec<usize> = (0..n).collect();
    let partials: Vec<Vec<f64>> = sources
        .par_chunks(SOURCE_CHUNK)
        .map(|chunk| {
            let mut local = vec![0.0; n];
            let mut ws = BrandesWorkspace::new(n);
            for &s in chunk {
                brandes_from(&lengths, s, &mut ws, &mut local);
            }
            local
        })
        .collect();
    let mut scores = vec![0.0; n];
    for partial in partials {
        for (acc, p) in scores.iter_mut().zip(partial) {
            *acc += p;
        }
    }
    ScoreTable::from_graph(graph, Measure::Betweenness, scores)
}

struct BrandesWorkspace {
    dist: Vec<f64>,
    sigma: Vec<f64>,
    delta: Vec<f64>,
    settled: Vec<bool>,
    preds: Vec<Vec<u32>>,
    order: Vec<u32>,
    heap: BinaryHeap<Reverse<(u64, u32)>>,
}

impl BrandesWorkspace {
    fn new(n: usize) -> BrandesWorkspace {
        BrandesWorkspace {
            dist: vec![f64::INFINITY; n],
            sigma: vec![0.0; n],
            delta: vec![0.0; n],
            settled: vec![false; n],
            preds: vec![Vec::new(); n],
            order: Vec::with_capacity(n),
            heap: BinaryHeap::new(),
        }
    }

    fn reset(&mut self) {
        self.dist.fill(f64::INFINITY);
        self.sigma.fill(0.0);
        self.delta.fill(0.0);
        self.settled.fill(false);
        for p in &mut self.preds {
            p.clear();
        }
        self.order.clear();
        self.heap.clear();
    }
}

/// One-source Dijkstra with shortest-path counting, then dependency
/// accumulation. Two tentative lengths within [`LEN_EPS`] of each other count
/// as equal.
fn brandes_from(
    lengths: &[Vec<(u32, f64)>],
    source: usize,
    ws: &mut BrandesWorkspace,
    bc: &mut [f64],
) {
    ws.reset();
    ws.dist[source] = 0.0;
    ws.sigma[source] = 1.0;
    // nonnegative f64 bit patterns order like the floats themselves
    ws.heap.push(Reverse((0.0f64.to_bits(), source as u32)));

    while let Some(Reverse((_, v))) = ws.heap.pop() {
        let v = v as usize;
        if ws.settled[v] {
            continue;
        }
        ws.settled[v] = true;
        ws.order.push(v as u32);
        let dv = ws.dist[v];
        for &(w, len) in &lengths[v] {
            let w = w as usize;
            if ws.settled[w] {
                continue;
            }
            let cand = dv + len;
            if cand < ws.dist[w] - LEN_EPS {
                ws.dist[w] = cand;
                ws.sigma[w] = ws.sigma[v];
                ws.preds[w].clear();
                ws.preds[w].push(v as u32);
                ws.heap.push(Reverse((cand.to_bits(), w as u32)));
            } else if (cand - ws.dist[w]).abs() <= LEN_EPS {
                ws.sigma[w] += ws.sigma[v];
                ws.preds[w].push(v as u32);
            }
        }
    }

    for &w in ws.order.iter().rev() {
        let w = w as usize;
        let coeff = (1.0 + ws.delta[w]) / ws.sigma[w];
        for &v in &ws.preds[w] {
            let v = v as usize;
            ws.delta[v] += ws.sigma[v] * coeff;
        }
        if w != source {
            bc[w] += ws.delta[w];
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PagerankOptions {
    pub damping: f64,
    pub tolerance: f64,
    pub max_iters: usize,
}

impl Default for PagerankOptions {
    fn default() -> Self {
        PagerankOptions {
            damping: 0.85,
            tolerance: 1e-12,
            max_iters: 500,
        }
    }
}

/// Directed weighted PageRank by power iteration.
///
/// The walker follows an out-edge with probability `damping`, choosing
/// proportionally to edge weight, and teleports uniformly otherwise; dangling
/// nodes teleport uniformly. Stops when the L1 change drops below
/// `tolerance`.
pub fn pagerank(graph: &CommGraph, opts: &PagerankOptions) -> Result<ScoreTable> {
    if !(opts.damping > 0.0 && opts.damping < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "damping must be in (0, 1), got {}",
            opts.damping
        )));
    }
    let n = graph.n_nodes();
    if n == 0 {
        return Ok(ScoreTable::from_graph(graph, Measure::Pagerank, Vec::new()));
    }
    let nf = n as f64;
    let out_weight: Vec<f64> = (0..n)
        .map(|i| graph.out_edges(i).map(|(_, w)| w).sum())
        .collect();
    let d = opts.damping;
    let mut x = vec![1.0 / nf; n];
    let mut next = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for _ in 0..opts.max_iters {
        let dangling: f64 = (0..n).filter(|&i| out_weight[i] == 0.0).map(|i| x[i]).sum();
        let base = (1.0 - d) / nf + d * dangling / nf;
        next.fill(base);
        for &(s, t, w) in graph.edges() {
            next[t as usize] += d * x[s as usize] * w / out_weight[s as usize];
        }
        residual = x
            .iter()
            .zip(next.iter())
            .map(|(a, b)| (a - b).abs())
            .sum();
        std::mem::swap(&mut x, &mut next);
        if residual < opts.tolerance {
            return Ok(ScoreTable::from_graph(graph, Measure::Pagerank, x));
        }
    }
    Err(Error::NoConvergence {
        iters: opts.max_iters,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::UserId;
    use crate::months::Cutoff;

    fn graph(n: u32, edges: &[(u32, u32, f64)]) -> CommGraph {
        let cutoff = Cutoff::for_month(2014, 1).unwrap();
        let nodes = (0..n).map(UserId).collect();
        let edges = edges
            .iter()
            .map(|&(s, t, w)| (UserId(s), UserId(t), w))
            .collect();
        CommGraph::from_edges(cutoff, nodes, edges).unwrap()
    }

    fn scores(t: &ScoreTable) -> Vec<f64> {
        t.entries().iter().map(|&(_, s)| s).collect()
    }

    #[test]
    fn in_degree_counts_distinct_neighbors() {
        // the extraction example graph {u2->u1, u3->u1, u3->u2}
        let g = graph(3, &[(1, 0, 0.5), (2, 0, 0.5), (2, 1, 0.99)]);
        assert_eq!(scores(&in_degree(&g)), vec![2.0, 1.0, 0.0]);
    }

    #[test]
    fn in_degree_of_isolated_node_is_zero() {
        let g = graph(2, &[]);
        assert_eq!(scores(&in_degree(&g)), vec![0.0, 0.0]);
    }

    #[test]
    fn harmonic_closeness_on_a_path() {
        // a-b-c undirected path (edges a->b, b->c as stored)
        let g = graph(3, &[(0, 1, 1.0), (1, 2, 1.0)]);
        let s = scores(&harmonic_closeness(&g));
        assert_eq!(s[1], 2.0);
        assert_eq!(s[0], 1.5);
        assert_eq!(s[2], 1.5);
    }

    #[test]
    fn harmonic_closeness_isolated_and_triangle() {
        let g = graph(4, &[(0, 1, 2.0), (1, 2, 0.5), (2, 0, 1.0)]);
        let s = scores(&harmonic_closeness(&g));
        // bidirectional triangle: every pair at distance 1; node 3 isolated
        assert_eq!(&s[..3], &[2.0, 2.0, 2.0]);
        assert_eq!(s[3], 0.0);
    }

    #[test]
    fn betweenness_on_directed_path() {
        let g = graph(3, &[(0, 1, 1.0), (1, 2, 1.0)]);
        let s = scores(&betweenness(&g));
        assert_eq!(s, vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn betweenness_of_extraction_example_is_zero() {
        // direct edge u3->u1 (length 2) beats the two-hop route via u2
        // (1/0.990471 + 1/0.5 > 2), so no shortest path passes through anyone
        let w32 = (0.2f64.ln() / 168.0).exp();
        let g = graph(3, &[(1, 0, 0.5), (2, 0, 0.5), (2, 1, w32)]);
        let s = scores(&betweenness(&g));
        assert_eq!(s, vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn betweenness_splits_over_equal_paths() {
        // v -> {m1, m2} -> w, all unit weights: two equal shortest paths
        let g = graph(
            4,
            &[(0, 1, 1.0), (0, 2, 1.0), (1, 3, 1.0), (2, 3, 1.0)],
        );
        let s = scores(&betweenness(&g));
        assert_eq!(s[1], 0.5);
        assert_eq!(s[2], 0.5);
        assert_eq!(s[0] + s[3], 0.0);
    }

    #[test]
    fn pagerank_two_node_cycle_is_symmetric() {
        let g = graph(2, &[(0, 1, 3.0), (1, 0, 3.0)]);
        let s = scores(&pagerank(&g, &PagerankOptions::default()).unwrap());
        assert!((s[0] - 0.5).abs() < 1e-10);
        assert!((s[1] - 0.5).abs() < 1e-10);
    }

    #[test]
    fn pagerank_single_node_is_one() {
        let g = graph(1, &[]);
        let s = scores(&pagerank(&g, &PagerankOptions::default()).unwrap());
        assert_eq!(s, vec![1.0]);
    }

    #[test]
    fn pagerank_matches_dense_power_iteration_with_dangling_node() {
        // 0 -> 1 (w 2), 0 -> 2 (w 1), 1 -> 0 (w 1); node 2 dangles
        let g = graph(3, &[(0, 1, 2.0), (0, 2, 1.0), (1, 0, 1.0)]);
        let opts = PagerankOptions::default();
        let s = scores(&pagerank(&g, &opts).unwrap());

        // independent dense oracle
        let d = opts.damping;
        let n = 3.0;
        let p = [
            [0.0, 2.0 / 3.0, 1.0 / 3.0],
            [1.0, 0.0, 0.0],
            [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0], // dangling row: uniform
        ];
        let mut x = [1.0 / n; 3];
        for _ in 0..10_000 {
            let mut y = [(1.0 - d) / n; 3];
            for i in 0..3 {
                for j in 0..3 {
                    y[j] += d * x[i] * p[i][j];
                }
            }
            x = y;
        }
        for i in 0..3 {
            assert!((s[i] - x[i]).abs() < 1e-10, "node {i}: {} vs {}", s[i], x[i]);
        }
        let total: f64 = s.iter().sum();
        assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn pagerank_reports_non_convergence() {
        let g = graph(2, &[(0, 1, 1.0), (1, 0, 1.0)]);
        let opts = PagerankOptions {
            tolerance: 0.0,
            max_iters: 3,
            ..Default::default()
        };
        assert!(matches!(
            pagerank(&g, &opts),
            Err(Error::NoConvergence { .. })
        ));
    }
}
