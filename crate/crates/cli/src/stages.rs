//! Shared pipeline stages: corpus loading, month resolution, and cached
//! graph/score materialization on disk.
//!
//! Centralities are always computed from the *written* graph files, so a
//! fresh run and a cache hit see identical inputs and emit identical bytes.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use forumrank_core::error::{Error, Result};
use forumrank_core::extraction::{
    extract_snapshot, read_graph_csv, read_graph_meta, write_graph_csv, write_graph_meta,
};
use forumrank_core::ingest::{load_posts, load_sales};
use forumrank_core::measures::{compute, read_scores_csv, write_scores_csv};
use forumrank_core::{Corpus, Cutoff, ExtractionParams, Measure, ScoreTable};

use crate::config::RunConfig;
use crate::manifest::{file_digest, sha256_hex};

pub fn load_corpus(cfg: &RunConfig) -> Result<Corpus> {
    let posts_path = cfg.posts_path()?;
    let posts = load_posts(
        crate::open_reader(posts_path)?,
        cfg.post_format(),
    )?;
    let sales = match &cfg.sales {
        Some(path) => load_sales(crate::open_reader(path)?)?,
        None => Vec::new(),
    };
    Corpus::new(posts, sales)
}

/// Requested months clipped to the corpus span; warnings go to stderr.
pub fn resolve_months(corpus: &Corpus, cfg: &RunConfig) -> Result<Vec<Cutoff>> {
    let span = corpus
        .span_months()
        .ok_or(Error::EmptyInput("corpus has no posts"))?;
    let Some(requested) = &cfg.months else {
        return Ok(span);
    };
    let (first, last) = (*span.first().unwrap(), *span.last().unwrap());
    let clipped: Vec<Cutoff> = requested
        .iter()
        .copied()
        .filter(|c| *c >= first && *c <= last)
        .collect();
    if clipped.is_empty() {
        return Err(Error::InvalidParameter(format!(
            "requested months do not intersect the corpus span {}..{}",
            first.label(),
            last.label()
        )));
    }
    if clipped.len() != requested.len() {
        eprintln!(
            "warning: month range clipped to corpus span {}..{}",
            clipped.first().unwrap().label(),
            clipped.last().unwrap().label()
        );
    }
    Ok(clipped)
}

pub fn graph_csv_path(dir: &Path, cutoff: Cutoff) -> PathBuf {
    dir.join(format!("graph-{}.csv", cutoff.label()))
}

pub fn graph_meta_path(dir: &Path, cutoff: Cutoff) -> PathBuf {
    dir.join(format!("graph-{}.meta", cutoff.label()))
}

/// Make sure every month's graph file exists and matches the parameters and
/// posts digest; rebuild only what is missing or stale. Returns the number
/// of rebuilt snapshots.
pub fn ensure_graphs(
    corpus: &Corpus,
    cfg: &RunConfig,
    months: &[Cutoff],
    params: &ExtractionParams,
    graphs_dir: &Path,
) -> Result<usize> {
    std::fs::create_dir_all(graphs_dir)?;
    let posts_digest = file_digest(cfg.posts_path()?)?;
    let stale: Vec<Cutoff> = months
        .iter()
        .copied()
        .filter(|&cutoff| !graph_cache_valid(graphs_dir, cutoff, params, &posts_digest))
        .collect();
    let built: Vec<Result<()>> = stale
        .par_iter()
        .map(|&cutoff| {
            let graph = extract_snapshot(corpus, params, cutoff)?;
            let mut csv_bytes = Vec::new();
            write_graph_csv(&graph, corpus, &mut csv_bytes)?;
            crate::write_file(&graph_csv_path(graphs_dir, cutoff), &csv_bytes)?;
            let mut meta = Vec::new();
            write_graph_meta(&graph, params, &mut meta)?;
            // the digest line keys the cache to the input corpus
            meta.extend_from_slice(format!("posts_sha256={posts_digest}\n").as_bytes());
            crate::write_file(&graph_meta_path(graphs_dir, cutoff), &meta)
        })
        .collect();
    for r in built {
        r?;
    }
    Ok(stale.len())
}

fn graph_cache_valid(
    dir: &Path,
    cutoff: Cutoff,
    params: &ExtractionParams,
    posts_digest: &str,
) -> bool {
    let meta_path = graph_meta_path(dir, cutoff);
    if !graph_csv_path(dir, cutoff).exists() || !meta_path.exists() {
        return false;
    }
    let Ok(text) = std::fs::read_to_string(&meta_path) else {
        return false;
    };
    let Ok((meta_cutoff, meta_params, _)) = read_graph_meta(text.as_bytes()) else {
        return false;
    };
    meta_cutoff == cutoff
        && meta_params == *params
        && text.contains(&format!("posts_sha256={posts_digest}"))
}

/// Load a snapshot graph back from disk.
pub fn load_graph(
    corpus: &Corpus,
    graphs_dir: &Path,
    cutoff: Cutoff,
) -> Result<forumrank_core::CommGraph> {
    let path = graph_csv_path(graphs_dir, cutoff);
    let graph = read_graph_csv(crate::open_reader(&path)?, corpus, cutoff)?;
    let (_, _, node_count) = read_graph_meta(crate::open_reader(&graph_meta_path(
        graphs_dir, cutoff,
    ))?)?;
    if node_count != graph.n_nodes() {
        return Err(Error::GraphMismatch(format!(
            "{}: node count {} disagrees with metadata {}",
            path.display(),
            graph.n_nodes(),
            node_count
        )));
    }
    Ok(graph)
}

/// Make sure every `(month, measure)` score file exists and is keyed to the
/// current inputs; recompute only stale entries. Returns the rebuilt count.
pub fn ensure_scores(
    corpus: &Corpus,
    cfg: &RunConfig,
    months: &[Cutoff],
    measures: &[Measure],
    params: &ExtractionParams,
    graphs_dir: &Path,
    scores_dir: &Path,
) -> Result<usize> {
    ensure_graphs(corpus, cfg, months, params, graphs_dir)?;
    std::fs::create_dir_all(scores_dir)?;

    let cache_path = scores_dir.join("cache.txt");
    let mut cache = read_cache(&cache_path);
    let posts_digest = file_digest(cfg.posts_path()?)?;

    // stale work items grouped per month so each graph file loads once
    let mut stale: Vec<(Cutoff, Vec<(Measure, String)>)> = Vec::new();
    for &cutoff in months {
        let graph_digest = file_digest(&graph_csv_path(graphs_dir, cutoff))?;
        let mut items = Vec::new();
        for &measure in measures {
            let key = score_input_key(measure, &graph_digest, &posts_digest, cfg);
            let file = measure.file_name(cutoff);
            let fresh = cache.get(&file) == Some(&key) && scores_dir.join(&file).exists();
            if !fresh {
                items.push((measure, key));
            }
        }
        if !items.is_empty() {
            stale.push((cutoff, items));
        }
    }

    let computed: Vec<Result<Vec<(String, String)>>> = stale
        .par_iter()
        .map(|(cutoff, items)| {
            let graph = load_graph(corpus, graphs_dir, *cutoff)?;
            let mut done = Vec::with_capacity(items.len());
            for (measure, key) in items {
                let table = compute(*measure, corpus, &graph, &cfg.pagerank)?;
                let mut bytes = Vec::new();
                write_scores_csv(&table, corpus, &mut bytes)?;
                let file = measure.file_name(*cutoff);
                crate::write_file(&scores_dir.join(&file), &bytes)?;
                done.push((file, key.clone()));
            }
            Ok(done)
        })
        .collect();
    let mut rebuilt = 0;
    for entry in computed {
        for (file, key) in entry? {
            rebuilt += 1;
            cache.insert(file, key);
        }
    }
    write_cache(&cache_path, &cache)?;
    Ok(rebuilt)
}

fn score_input_key(
    measure: Measure,
    graph_digest: &str,
    posts_digest: &str,
    cfg: &RunConfig,
) -> String {
    let mut key = String::new();
    if measure.is_centrality() {
        key.push_str(graph_digest);
        if measure == Measure::Pagerank {
            key.push_str(&format!(
                ":{}:{:e}:{}",
                cfg.pagerank.damping, cfg.pagerank.tolerance, cfg.pagerank.max_iters
            ));
        }
    } else {
        key.push_str(posts_digest);
    }
    sha256_hex(key.as_bytes())
}

fn read_cache(path: &Path) -> BTreeMap<String, String> {
    let mut map = BTreeMap::new();
    if let Ok(text) = std::fs::read_to_string(path) {
        for line in text.lines() {
            if let Some((file, key)) = line.split_once(' ') {
                map.insert(file.to_string(), key.to_string());
            }
        }
    }
    map
}

fn write_cache(path: &Path, cache: &BTreeMap<String, String>) -> Result<()> {
    let mut text = String::new();
    for (file, key) in cache {
        text.push_str(&format!("{file} {key}\n"));
    }
    crate::write_file(path, text.as_bytes())
}

/// Read one score table back from disk, with the missing input named.
pub fn load_scores(
    corpus: &Corpus,
    scores_dir: &Path,
    measure: Measure,
    cutoff: Cutoff,
) -> Result<ScoreTable> {
    let path = scores_dir.join(measure.file_name(cutoff));
    if !path.exists() {
        return Err(Error::InvalidParameter(format!(
            "missing score file {} (run `measure` first)",
            path.display()
        )));
    }
    read_scores_csv(crate::open_reader(&path)?, corpus, cutoff, measure)
}
