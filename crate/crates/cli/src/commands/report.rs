//! Full pipeline run plus a human-readable summary.

use std::fmt::Write as _;

use forumrank_core::error::Result;
use forumrank_core::sigfmt::sig;

use crate::commands::evaluate::{compute_evaluation, write_outputs, Evaluation};
use crate::commands::roc::write_roc;
use crate::config::RunConfig;
use crate::manifest::write_run_manifest;
use crate::stages::{ensure_scores, load_corpus, resolve_months};

pub fn run(cfg: &RunConfig) -> Result<()> {
    cfg.sales_path()?;
    let corpus = load_corpus(cfg)?;
    let months = resolve_months(&corpus, cfg)?;
    let graphs_dir = cfg.out_dir.join("graphs");
    let scores_dir = cfg.out_dir.join("scores");
    ensure_scores(
        &corpus,
        cfg,
        &months,
        &cfg.measures,
        &cfg.params,
        &graphs_dir,
        &scores_dir,
    )?;
    let ev = compute_evaluation(&corpus, cfg, &months, &scores_dir)?;
    write_outputs(&ev, &cfg.out_dir.join("eval"))?;
    write_roc(&corpus, cfg, &months, &scores_dir, &cfg.out_dir.join("roc"))?;

    let text = render_report(cfg, &ev, months.last().map(|c| c.label()).unwrap_or_default());
    crate::write_file(&cfg.out_dir.join("report.md"), text.as_bytes())?;
    write_run_manifest("report", cfg)?;
    eprintln!("report: {}", cfg.out_dir.join("report.md").display());
    Ok(())
}

fn render_report(cfg: &RunConfig, ev: &Evaluation, last_month: String) -> String {
    let mut md = String::new();
    let _ = writeln!(md, "# Pipeline report\n");
    let _ = writeln!(
        md,
        "Measures: {}. Rank fraction: {}. Months up to {last_month}.\n",
        cfg.measures
            .iter()
            .map(|m| m.name())
            .collect::<Vec<_>>()
            .join(", "),
        cfg.fraction
    );

    let _ = writeln!(md, "## Vendor recall at the final month (current success)\n");
    let _ = writeln!(md, "| measure | vendor recall % |");
    let _ = writeln!(md, "|---|---|");
    for r in &ev.recall_rows {
        if r.cutoff == last_month && r.kind == "current" && r.metric == "vendor_recall" {
            let v = r
                .value
                .map(|v| format!("{v:.2}"))
                .unwrap_or_else(|| "NA".into());
            let _ = writeln!(md, "| {} | {} |", r.measure, v);
        }
    }

    let _ = writeln!(md, "\n## Top users at the final month\n");
    for &measure in &cfg.measures {
        let rows: Vec<_> = ev
            .top_users
            .iter()
            .filter(|r| r.cutoff == last_month && r.measure == measure.name())
            .collect();
        if rows.is_empty() {
            continue;
        }
        let _ = writeln!(md, "### {}\n", measure.name());
        let _ = writeln!(md, "| rank | user | current | future |");
        let _ = writeln!(md, "|---|---|---|---|");
        for r in rows.iter().take(cfg.top_k) {
            let _ = writeln!(
                md,
                "| {} | {} | {} | {} |",
                r.rank,
                r.user,
                sig(r.current, 6),
                sig(r.future, 6)
            );
        }
        if let Some(kp) = ev
            .key_players
            .iter()
            .find(|k| k.cutoff == last_month && k.measure == measure.name())
        {
            let _ = writeln!(
                md,
                "\n{} of the top {} have recorded sales ({} vendors among {} active users); \
                 the probability of at least that many in a uniform random draw is {}.\n",
                kp.with_sales,
                kp.top_k,
                kp.active_vendors,
                kp.active_users,
                sig(kp.p_random, 6)
            );
        }
    }
    md
}
