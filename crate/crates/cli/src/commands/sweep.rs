//! Parameter-sweep harness: re-extract and re-evaluate per grid point,
//! one long-format row per (grid point, month, measure, metric).

use forumrank_core::error::{Error, Result};
use forumrank_core::months::format_duration_secs;
use forumrank_core::sigfmt::{pct, sig};
use forumrank_core::ExtractionParams;

use crate::commands::evaluate::compute_evaluation;
use crate::config::RunConfig;
use crate::manifest::write_run_manifest;
use crate::stages::{ensure_scores, load_corpus, resolve_months};

fn point_label(p: &ExtractionParams) -> String {
    format!(
        "do{}-dt{}-wl{}-tl{}-wf{}",
        p.delta_o,
        format_duration_secs(p.delta_t),
        sig(p.omega_lower, 12),
        format_duration_secs(p.t_lim),
        sig(p.omega_first, 12)
    )
}

pub fn run(cfg: &RunConfig) -> Result<()> {
    if cfg.grid.is_empty() {
        return Err(Error::InvalidParameter(
            "sweep needs a grid: set at least one of grid_delta_o, grid_delta_t, \
             grid_omega_lower, grid_t_lim, grid_omega_first"
                .into(),
        ));
    }
    cfg.sales_path()?;
    let corpus = load_corpus(cfg)?;
    let months = resolve_months(&corpus, cfg)?;
    let points = cfg.grid.points(&cfg.params);
    let sweep_dir = cfg.out_dir.join("sweep");
    std::fs::create_dir_all(&sweep_dir)?;

    let out_path = sweep_dir.join("sweep.csv");
    let mut w = csv::Writer::from_writer(
        std::fs::File::create(&out_path).map_err(|e| crate::with_path(e, &out_path))?,
    );
    w.write_record([
        "delta_o",
        "delta_t",
        "omega_lower",
        "t_lim",
        "omega_first",
        "cutoff",
        "measure",
        "kind",
        "metric",
        "value",
    ])?;

    for params in &points {
        let label = point_label(params);
        let point_dir = sweep_dir.join(&label);
        let graphs_dir = point_dir.join("graphs");
        let scores_dir = point_dir.join("scores");
        ensure_scores(
            &corpus,
            cfg,
            &months,
            &cfg.measures,
            params,
            &graphs_dir,
            &scores_dir,
        )?;
        let ev = compute_evaluation(&corpus, cfg, &months, &scores_dir)?;
        for r in &ev.recall_rows {
            w.write_record([
                &params.delta_o.to_string(),
                &format_duration_secs(params.delta_t),
                &sig(params.omega_lower, 12),
                &format_duration_secs(params.t_lim),
                &sig(params.omega_first, 12),
                &r.cutoff,
                &r.measure,
                r.kind,
                r.metric,
                &r.value.map(pct).unwrap_or_else(|| "NA".to_string()),
            ])?;
        }
        eprintln!("sweep: point {label} done");
    }
    w.flush()?;
    write_run_manifest("sweep", cfg)?;
    eprintln!(
        "sweep: {} grid points x {} months -> {}",
        points.len(),
        months.len(),
        out_path.display()
    );
    Ok(())
}
