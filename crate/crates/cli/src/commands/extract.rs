use forumrank_core::error::Result;

use crate::config::RunConfig;
use crate::manifest::write_run_manifest;
use crate::stages::{ensure_graphs, load_corpus, resolve_months};

pub fn run(cfg: &RunConfig) -> Result<()> {
    let corpus = load_corpus(cfg)?;
    let months = resolve_months(&corpus, cfg)?;
    let graphs_dir = cfg.out_dir.join("graphs");
    let rebuilt = ensure_graphs(&corpus, cfg, &months, &cfg.params, &graphs_dir)?;
    write_run_manifest("extract", cfg)?;
    eprintln!(
        "extract: {} snapshots ({rebuilt} rebuilt) in {}",
        months.len(),
        graphs_dir.display()
    );
    Ok(())
}
