//! Communication-graph extraction from the post corpus.
//!
//! For a cutoff, the snapshot graph is built from every post with
//! `timestamp < cutoff.instant()`:
//!
//! - a *regular* edge runs from the author of a later post to the author of
//!   an earlier post in the same topic when the posts are at most `delta_o`
//!   positions and `delta_t` seconds apart, and the earlier post is not the
//!   topic's initial post. Its weight decays exponentially with the time gap,
//!   floored at `omega_lower` from `t_lim` onward;
//! - every non-initial post additionally links its author to the topic
//!   starter with weight `omega_first`, regardless of `delta_o`/`delta_t`;
//! - self-edges are dropped; parallel edges merge by summing weights;
//! - nodes are all users active at the cutoff, isolated ones included.

use std::collections::HashMap;
use std::io::{BufRead, BufReader, Read, Write};

use crate::error::{Error, Result};
use crate::ingest::{Corpus, UserId};
use crate::months::{Cutoff, MONTH_SECS};
use crate::sigfmt::sig;

/// The five network-formation parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtractionParams {
    /// Maximum ordinal distance for regular edges.
    pub delta_o: u32,
    /// Maximum time gap for regular edges, in seconds.
    pub delta_t: i64,
    /// Weight floor of the decay function, in (0, 1].
    pub omega_lower: f64,
    /// Time gap at which the floor is reached, in seconds.
    pub t_lim: i64,
    /// Weight of initial-post edges, in (0, 1].
    pub omega_first: f64,
}

impl Default for ExtractionParams {
    fn default() -> Self {
        ExtractionParams {
            delta_o: 10,
            delta_t: MONTH_SECS,
            omega_lower: 0.2,
            t_lim: 7 * 86_400,
            omega_first: 0.5,
        }
    }
}

impl ExtractionParams {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidParameter(msg));
        if self.delta_o < 1 {
            return fail(format!("delta_o must be >= 1, got {}", self.delta_o));
        }
        if self.delta_t <= 0 {
            return fail(format!("delta_t must be positive, got {}", self.delta_t));
        }
        if !(self.omega_lower > 0.0 && self.omega_lower <= 1.0) {
            return fail(format!(
                "omega_lower must be in (0, 1], got {}",
                self.omega_lower
            ));
        }
        if self.t_lim <= 0 {
            return fail(format!("t_lim must be positive, got {}", self.t_lim));
        }
        if !(self.omega_first > 0.0 && self.omega_first <= 1.0) {
            return fail(format!(
                "omega_first must be in (0, 1], got {}",
                self.omega_first
            ));
        }
        Ok(())
    }
}

/// Weight of a regular edge whose posts are `gap` seconds apart.
///
/// Exponential through (0, 1) and (`t_lim`, `omega_lower`), constant at
/// `omega_lower` for larger gaps: `omega_lower^(gap/t_lim)`.
pub fn decay_weight(gap: i64, params: &ExtractionParams) -> f64 {
    debug_assert!(gap >= 0);
    if gap >= params.t_lim {
        return params.omega_lower;
    }
    let exponent = gap as f64 / params.t_lim as f64;
    let w = (params.omega_lower.ln() * exponent).exp();
    w.max(params.omega_lower)
}

/// Simplified weighted directed communication graph for one cutoff.
///
/// Nodes are indexed `0..n_nodes()` in ascending [`UserId`] order; edges are
/// stored once, sorted by `(source, target)` index.
#[derive(Debug, Clone)]
pub struct CommGraph {
    cutoff: Cutoff,
    nodes: Vec<UserId>,
    /// (src, dst, weight) sorted by (src, dst); src/dst are node indices.
    edges: Vec<(u32, u32, f64)>,
    /// CSR offsets into `edges` per source node.
    out_offsets: Vec<u32>,
}

impl CommGraph {
    /// Assemble a graph from a node set and merged edge list keyed by user.
    ///
    /// `nodes` must be sorted and deduplicated; every edge endpoint must be a
    /// node, weights positive, no self-edges.
    pub fn from_edges(
        cutoff: Cutoff,
        nodes: Vec<UserId>,
        edges: Vec<(UserId, UserId, f64)>,
    ) -> Result<CommGraph> {
        debug_assert!(nodes.windows(2).all(|w| w[0] < w[1]));
        let index_of = |u: UserId| -> Result<u32> {
            nodes
                .binary_search(&u)
                .map(|i| i as u32)
                .map_err(|_| Error::GraphMismatch(format!("edge endpoint {u:?} is not a node")))
        };
        let mut idx_edges = Vec::with_capacity(edges.len());
        for (s, t, w) in edges {
            if s == t {
                return Err(Error::GraphMismatch(format!("self-edge on {s:?}")));
            }
            if w <= 0.0 || !w.is_finite() {
                return Err(Error::GraphMismatch(format!(
                    "edge weight must be positive and finite, got {w}"
                )));
            }
            idx_edges.push((index_of(s)?, index_of(t)?, w));
        }
        idx_edges.sort_by_key(|&(s, t, _)| (s, t));
        if idx_edges.windows(2).any(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1)) {
            return Err(Error::GraphMismatch("duplicate edge after merge".into()));
        }
        let mut out_offsets = vec![0u32; nodes.len() + 1];
        for &(s, _, _) in &idx_edges {
            out_offsets[s as usize + 1] += 1;
        }
        for i in 1..out_offsets.len() {
            out_offsets[i] += out_offsets[i - 1];
        }
        Ok(CommGraph {
            cutoff,
            nodes,
            edges: idx_edges,
            out_offsets,
        })
    }

    pub fn cutoff(&self) -> Cutoff {
        self.cutoff
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn node_user(&self, idx: usize) -> UserId {
        self.nodes[idx]
    }

    pub fn nodes(&self) -> &[UserId] {
        &self.nodes
    }

    pub fn node_index(&self, user: UserId) -> Option<usize> {
        self.nodes.binary_search(&user).ok()
    }

    /// Outgoing edges of node `i` as `(target index, weight)`.
    pub fn out_edges(&self, i: usize) -> impl Iterator<Item = (u32, f64)> + '_ {
        let lo = self.out_offsets[i] as usize;
        let hi = self.out_offsets[i + 1] as usize;
        self.edges[lo..hi].iter().map(|&(_, t, w)| (t, w))
    }

    /// All edges as `(source index, target index, weight)`, sorted.
    pub fn edges(&self) -> &[(u32, u32, f64)] {
        &self.edges
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|&(_, _, w)| w).sum()
    }
}

/// Build the snapshot graph for one cutoff.
pub fn extract_snapshot(
    corpus: &Corpus,
    params: &ExtractionParams,
    cutoff: Cutoff,
) -> Result<CommGraph> {
    params.validate()?;
    let merged = merge_edge_weights(corpus, params, cutoff);
    let nodes = corpus.active_users(cutoff);
    let mut edges: Vec<(UserId, UserId, f64)> = merged
        .into_iter()
        .map(|((s, t), w)| (s, t, w))
        .collect();
    edges.sort_by_key(|&(s, t, _)| (s, t));
    CommGraph::from_edges(cutoff, nodes, edges)
}

/// Emit every per-post edge in a fixed traversal order and merge parallels
/// by summation. Traversal: topics in corpus order, replying posts by
/// ascending ordinal, regular partners by ascending ordinal, then the
/// initial-post edge. Weight sums are reproducible because the order is.
fn merge_edge_weights(
    corpus: &Corpus,
    params: &ExtractionParams,
    cutoff: Cutoff,
) -> HashMap<(UserId, UserId), f64> {
    let mut weights: HashMap<(UserId, UserId), f64> = HashMap::new();
    let mut add = |s: UserId, t: UserId, w: f64| {
        *weights.entry((s, t)).or_insert(0.0) += w;
    };
    for (_, posts) in corpus.topics() {
        // ordinals follow nondecreasing timestamps, so the cutoff keeps a prefix
        let k = posts.partition_point(|p| p.timestamp < cutoff.instant());
        if k < 2 {
            continue;
        }
        let starter = posts[0].author;
        for i in 1..k {
            let p = &posts[i];
            let lo = (i.saturating_sub(params.delta_o as usize)).max(1);
            for q in &posts[lo..i] {
                let gap = p.timestamp - q.timestamp;
                if gap <= params.delta_t && p.author != q.author {
                    add(p.author, q.author, decay_weight(gap, params));
                }
            }
            if p.author != starter {
                add(p.author, starter, params.omega_first);
            }
        }
    }
    weights
}

/// One cumulative snapshot per cutoff.
pub fn snapshot_series(
    corpus: &Corpus,
    params: &ExtractionParams,
    cutoffs: &[Cutoff],
) -> Result<Vec<CommGraph>> {
    cutoffs
        .iter()
        .map(|&c| extract_snapshot(corpus, params, c))
        .collect()
}

/// Write the edge list as `source,target,weight` rows sorted by user name,
/// weights at 12 significant digits.
pub fn write_graph_csv<W: Write>(graph: &CommGraph, corpus: &Corpus, sink: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["source", "target", "weight"])?;
    for &(s, t, weight) in graph.edges() {
        w.write_record([
            corpus.user_name(graph.node_user(s as usize)),
            corpus.user_name(graph.node_user(t as usize)),
            &sig(weight, 12),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Sidecar metadata: flat `key=value` lines.
pub fn write_graph_meta<W: Write>(
    graph: &CommGraph,
    params: &ExtractionParams,
    mut sink: W,
) -> Result<()> {
    writeln!(sink, "cutoff={}", graph.cutoff().label())?;
    writeln!(sink, "cutoff_instant={}", graph.cutoff().instant())?;
    writeln!(sink, "delta_o={}", params.delta_o)?;
    writeln!(sink, "delta_t={}", params.delta_t)?;
    writeln!(sink, "omega_lower={}", sig(params.omega_lower, 12))?;
    writeln!(sink, "t_lim={}", params.t_lim)?;
    writeln!(sink, "omega_first={}", sig(params.omega_first, 12))?;
    writeln!(sink, "nodes={}", graph.n_nodes())?;
    writeln!(sink, "edges={}", graph.n_edges())?;
    Ok(())
}

/// Parse a metadata sidecar back into `(cutoff, params, node count)`.
pub fn read_graph_meta<R: Read>(source: R) -> Result<(Cutoff, ExtractionParams, usize)> {
    let mut kv = HashMap::new();
    for line in BufReader::new(source).lines() {
        let line = line?;
        if let Some((k, v)) = line.split_once('=') {
            kv.insert(k.trim().to_string(), v.trim().to_string());
        }
    }
    let get = |k: &str| -> Result<&String> {
        kv.get(k)
            .ok_or_else(|| Error::GraphMismatch(format!("metadata missing key `{k}`")))
    };
    let parse_err = |k: &str| Error::GraphMismatch(format!("metadata key `{k}` unparseable"));
    let (year, month) = crate::months::parse_month(get("cutoff")?)?;
    let cutoff = Cutoff::for_month(year, month)?;
    let params = ExtractionParams {
        delta_o: get("delta_o")?.parse().map_err(|_| parse_err("delta_o"))?,
        delta_t: get("delta_t")?.parse().map_err(|_| parse_err("delta_t"))?,
        omega_lower: get("omega_lower")?
            .parse()
            .map_err(|_| parse_err("omega_lower"))?,
        t_lim: get("t_lim")?.parse().map_err(|_| parse_err("t_lim"))?,
        omega_first: get("omega_first")?
            .parse()
            .map_err(|_| parse_err("omega_first"))?,
    };
    let nodes = get("nodes")?.parse().map_err(|_| parse_err("nodes"))?;
    Ok((cutoff, params, nodes))
}

/// Read an edge-list CSV written by [`write_graph_csv`] and rebuild the
/// graph over the corpus' active users at `cutoff`.
pub fn read_graph_csv<R: Read>(
    source: R,
    corpus: &Corpus,
    cutoff: Cutoff,
) -> Result<CommGraph> {
    let mut reader = csv::ReaderBuilder::new().from_reader(source);
    let mut edges = Vec::new();
    for rec in reader.records() {
        let rec = rec?;
        let err = || Error::GraphMismatch("bad edge row".into());
        let s = corpus
            .user_id(rec.get(0).ok_or_else(err)?)
            .ok_or_else(|| Error::UnknownUser(rec.get(0).unwrap_or("").to_string()))?;
        let t = corpus
            .user_id(rec.get(1).ok_or_else(err)?)
            .ok_or_else(|| Error::UnknownUser(rec.get(1).unwrap_or("").to_string()))?;
        let w: f64 = rec.get(2).ok_or_else(err)?.parse().map_err(|_| err())?;
        edges.push((s, t, w));
    }
    edges.sort_by_key(|&(s, t, _)| (s, t));
    CommGraph::from_edges(cutoff, corpus.active_users(cutoff), edges)
}
