use forumrank_core::error::Result;

use crate::config::RunConfig;
use crate::manifest::write_run_manifest;
use crate::stages::{ensure_scores, load_corpus, resolve_months};

pub fn run(cfg: &RunConfig) -> Result<()> {
    let corpus = load_corpus(cfg)?;
    let months = resolve_months(&corpus, cfg)?;
    let graphs_dir = cfg.out_dir.join("graphs");
    let scores_dir = cfg.out_dir.join("scores");
    let rebuilt = ensure_scores(
        &corpus,
        cfg,
        &months,
        &cfg.measures,
        &cfg.params,
        &graphs_dir,
        &scores_dir,
    )?;
    write_run_manifest("measure", cfg)?;
    eprintln!(
        "measure: {} score files ({rebuilt} rebuilt) in {}",
        months.len() * cfg.measures.len(),
        scores_dir.display()
    );
    Ok(())
}
