//! ROC sweeps per (month, measure, vendor-group definition).

use std::path::Path;

use forumrank_core::error::{Error, Result};
use forumrank_core::evalmetrics::{roc_sweep, vendor_percentiles, SuccessKind};
use forumrank_core::sigfmt::pct;
use forumrank_core::{Corpus, Cutoff, UserId};

use crate::config::RunConfig;
use crate::manifest::write_run_manifest;
use crate::stages::{load_corpus, load_scores, resolve_months};

/// The four positive-set definitions, keyed by file-name slug.
const GROUPS: [&str; 4] = [
    "top_percentile",
    "top_percentile_low_activity",
    "all_vendors",
    "all_vendors_low_activity",
];

fn group_members(
    group: &str,
    corpus: &Corpus,
    cutoff: Cutoff,
    top: &[UserId],
    vendors: &[UserId],
    threshold: u64,
) -> Vec<UserId> {
    let low_activity =
        |u: &UserId| corpus.post_count_at(*u, cutoff) < threshold;
    match group {
        "top_percentile" => top.to_vec(),
        "top_percentile_low_activity" => top.iter().copied().filter(|u| low_activity(u)).collect(),
        "all_vendors" => vendors.to_vec(),
        "all_vendors_low_activity" => {
            vendors.iter().copied().filter(|u| low_activity(u)).collect()
        }
        _ => unreachable!("unknown group"),
    }
}

pub fn write_roc(
    corpus: &Corpus,
    cfg: &RunConfig,
    months: &[Cutoff],
    scores_dir: &Path,
    roc_dir: &Path,
) -> Result<()> {
    std::fs::create_dir_all(roc_dir)?;
    let mut auc_writer = csv::Writer::from_writer(
        std::fs::File::create(roc_dir.join("roc_auc.csv"))
            .map_err(|e| crate::with_path(e, &roc_dir.join("roc_auc.csv")))?,
    );
    auc_writer.write_record(["cutoff", "measure", "group", "auc"])?;

    for &cutoff in months {
        let active = corpus.active_users(cutoff);
        let vendors: Vec<UserId> = active
            .iter()
            .copied()
            .filter(|&u| corpus.is_vendor(u))
            .collect();
        // group definitions follow current success
        let sales: Vec<(UserId, f64)> = vendors
            .iter()
            .map(|&v| Ok((v, corpus.current_sales_at(v, cutoff)?)))
            .collect::<Result<_>>()?;
        let percentiles = vendor_percentiles(&sales, &active, SuccessKind::Current);

        for &measure in &cfg.measures {
            let table = load_scores(corpus, scores_dir, measure, cutoff)?;
            for group in GROUPS {
                let positives = group_members(
                    group,
                    corpus,
                    cutoff,
                    percentiles.top(),
                    &vendors,
                    cfg.activity_threshold,
                );
                if positives.is_empty() || positives.len() >= table.len() {
                    eprintln!(
                        "warning: roc group `{group}` is degenerate at {} ({} of {} users); skipped",
                        cutoff.label(),
                        positives.len(),
                        table.len()
                    );
                    continue;
                }
                let curve = match roc_sweep(&table, &positives, cfg.roc_step) {
                    Ok(c) => c,
                    Err(Error::UndefinedMetric(_)) => continue,
                    Err(e) => return Err(e),
                };
                let path = roc_dir.join(format!(
                    "roc-{group}-{}-{}.csv",
                    measure.name(),
                    cutoff.label()
                ));
                let mut w = csv::Writer::from_writer(
                    std::fs::File::create(&path).map_err(|e| crate::with_path(e, &path))?,
                );
                w.write_record(["threshold", "tpr", "fpr"])?;
                for p in &curve.points {
                    w.write_record([&pct(p.threshold), &pct(p.tpr), &pct(p.fpr)])?;
                }
                w.flush()?;
                auc_writer.write_record([
                    &cutoff.label(),
                    measure.name(),
                    group,
                    &pct(curve.auc),
                ])?;
            }
        }
    }
    auc_writer.flush()?;
    Ok(())
}

pub fn run(cfg: &RunConfig) -> Result<()> {
    cfg.sales_path()?;
    let corpus = load_corpus(cfg)?;
    let months = resolve_months(&corpus, cfg)?;
    let scores_dir = cfg.out_dir.join("scores");
    let roc_dir = cfg.out_dir.join("roc");
    write_roc(&corpus, cfg, &months, &scores_dir, &roc_dir)?;
    write_run_manifest("roc", cfg)?;
    eprintln!("roc: curves in {}", roc_dir.display());
    Ok(())
}
