//! Difference scores, recalls, overlap tables, top-user listings, and
//! random-inclusion probabilities over the score files.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use forumrank_core::error::{Error, Result};
use forumrank_core::evalmetrics::{
    cubic_trend, diff_scores, minmax_normalize, overlap, post_activity_recall,
    random_inclusion_prob, rank_cut, sales_recall, vendor_percentiles, vendor_recall,
    vendor_recall_per_cut, SuccessKind, VendorPercentiles,
};
use forumrank_core::measures::post_activity;
use forumrank_core::sigfmt::{pct, sig};
use forumrank_core::{Corpus, Cutoff, Measure, ScoreTable, UserId};

use crate::config::RunConfig;
use crate::manifest::write_run_manifest;
use crate::stages::{load_corpus, load_scores, resolve_months};

pub const KIND_ALL: &str = "all";

/// One `cutoff,measure,kind,metric,value` row; `None` renders as `NA`.
#[derive(Debug, Clone)]
pub struct MetricRow {
    pub cutoff: String,
    pub measure: String,
    pub kind: &'static str,
    pub metric: &'static str,
    pub value: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct OverlapRow {
    pub cutoff: String,
    pub kind: &'static str,
    pub measure_i: String,
    pub measure_j: String,
    pub value: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct TopUserRow {
    pub cutoff: String,
    pub measure: String,
    pub rank: usize,
    pub user: String,
    pub current: f64,
    pub future: f64,
}

#[derive(Debug, Clone)]
pub struct KeyPlayerRow {
    pub cutoff: String,
    pub measure: String,
    pub top_k: usize,
    pub with_sales: usize,
    pub active_users: usize,
    pub active_vendors: usize,
    pub p_random: f64,
}

#[derive(Debug, Clone)]
pub struct TrendRow {
    pub measure: String,
    pub kind: &'static str,
    pub metric: &'static str,
    pub n_months: usize,
    pub coefficients: [f64; 4],
}

#[derive(Debug, Default)]
pub struct Evaluation {
    pub diff_rows: Vec<MetricRow>,
    pub recall_rows: Vec<MetricRow>,
    pub overlap_monthly: Vec<OverlapRow>,
    pub top_users: Vec<TopUserRow>,
    pub key_players: Vec<KeyPlayerRow>,
    pub trend_rows: Vec<TrendRow>,
}

/// Map "metric has no defined value here" outcomes to `NA`, let real
/// failures propagate.
fn metric_or_na(result: Result<f64>) -> Result<Option<f64>> {
    match result {
        Ok(v) => Ok(Some(v)),
        Err(Error::EmptyInput(_)) | Err(Error::UndefinedMetric(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

struct MonthContext {
    active: Vec<UserId>,
    vendors: Vec<UserId>,
    percentiles: [VendorPercentiles; 2],
    sales: [HashMap<UserId, f64>; 2],
    pa_table: ScoreTable,
}

const KINDS: [SuccessKind; 2] = [SuccessKind::Current, SuccessKind::Future];

impl MonthContext {
    fn build(corpus: &Corpus, cutoff: Cutoff) -> Result<MonthContext> {
        let active = corpus.active_users(cutoff);
        let vendors: Vec<UserId> = active
            .iter()
            .copied()
            .filter(|&u| corpus.is_vendor(u))
            .collect();
        let mut sales_current = HashMap::new();
        let mut sales_future = HashMap::new();
        let mut by_kind: [Vec<(UserId, f64)>; 2] = [Vec::new(), Vec::new()];
        for &v in &vendors {
            let s = corpus.sales_at_cutoff(v, cutoff)?;
            sales_current.insert(v, s.current);
            sales_future.insert(v, s.future);
            by_kind[0].push((v, s.current));
            by_kind[1].push((v, s.future));
        }
        Ok(MonthContext {
            percentiles: [
                vendor_percentiles(&by_kind[0], &active, SuccessKind::Current),
                vendor_percentiles(&by_kind[1], &active, SuccessKind::Future),
            ],
            sales: [sales_current, sales_future],
            pa_table: post_activity(corpus, cutoff),
            active,
            vendors,
        })
    }
}

pub fn compute_evaluation(
    corpus: &Corpus,
    cfg: &RunConfig,
    months: &[Cutoff],
    scores_dir: &Path,
) -> Result<Evaluation> {
    let mut ev = Evaluation::default();
    for &cutoff in months {
        let ctx = MonthContext::build(corpus, cutoff)?;
        let label = cutoff.label();

        let mut tables: BTreeMap<&'static str, ScoreTable> = BTreeMap::new();
        let mut cuts: BTreeMap<&'static str, Vec<UserId>> = BTreeMap::new();
        for &measure in &cfg.measures {
            let table = load_scores(corpus, scores_dir, measure, cutoff)?;
            if table.len() != ctx.active.len() {
                return Err(Error::GraphMismatch(format!(
                    "score file {} covers {} users but {} are active",
                    measure.file_name(cutoff),
                    table.len(),
                    ctx.active.len()
                )));
            }
            cuts.insert(measure.name(), rank_cut(&table, cfg.fraction)?);
            tables.insert(measure.name(), table);
        }

        for &measure in &cfg.measures {
            let table = &tables[measure.name()];
            let norm = minmax_normalize(table)?;
            let cut = &cuts[measure.name()];

            // vendors vs non-vendors is independent of the success kind
            let vnv = match (ctx.vendors.is_empty(), ctx.percentiles[0].non_vendors.is_empty()) {
                (false, false) => Some(diff_scores(
                    &ctx.vendors,
                    &ctx.percentiles[0].non_vendors,
                    &norm,
                )?),
                _ => None,
            };
            ev.diff_rows.push(MetricRow {
                cutoff: label.clone(),
                measure: measure.name().into(),
                kind: KIND_ALL,
                metric: "vendor_nonvendor_abs",
                value: vnv.map(|d| d.absolute),
            });
            ev.diff_rows.push(MetricRow {
                cutoff: label.clone(),
                measure: measure.name().into(),
                kind: KIND_ALL,
                metric: "vendor_nonvendor_rel",
                value: vnv.and_then(|d| d.relative),
            });

            for (ki, kind) in KINDS.iter().enumerate() {
                let pcts = &ctx.percentiles[ki];
                let top = pcts.top();
                let all_vendors = pcts.all_vendors();

                for (metric_abs, metric_rel, group_b) in [
                    ("top_all_abs", "top_all_rel", &all_vendors),
                    ("top_subtop_abs", "top_subtop_rel", &pcts.sub_top().to_vec()),
                ] {
                    let d = if top.is_empty() || group_b.is_empty() {
                        None
                    } else {
                        Some(diff_scores(top, group_b, &norm)?)
                    };
                    ev.diff_rows.push(MetricRow {
                        cutoff: label.clone(),
                        measure: measure.name().into(),
                        kind: kind.label(),
                        metric: metric_abs,
                        value: d.map(|d| d.absolute),
                    });
                    ev.diff_rows.push(MetricRow {
                        cutoff: label.clone(),
                        measure: measure.name().into(),
                        kind: kind.label(),
                        metric: metric_rel,
                        value: d.and_then(|d| d.relative),
                    });
                }

                let recalls: [(&'static str, Result<f64>); 4] = [
                    ("vendor_recall", vendor_recall(top, cut)),
                    ("vendor_recall_per_cut", vendor_recall_per_cut(top, cut)),
                    (
                        "post_activity_recall",
                        post_activity_recall(top, cut, &ctx.pa_table),
                    ),
                    ("sales_recall", sales_recall(top, cut, &ctx.sales[ki])),
                ];
                for (metric, result) in recalls {
                    ev.recall_rows.push(MetricRow {
                        cutoff: label.clone(),
                        measure: measure.name().into(),
                        kind: kind.label(),
                        metric,
                        value: metric_or_na(result)?,
                    });
                }
            }
        }

        // pairwise overlaps, plus the union of the indicator cuts when all
        // three indicators were measured
        let union_cut: Option<Vec<UserId>> = {
            let names: Vec<&str> = Measure::INDICATORS.iter().map(|m| m.name()).collect();
            if names.iter().all(|n| cuts.contains_key(n)) {
                let mut u: Vec<UserId> = names
                    .iter()
                    .flat_map(|n| cuts[*n].iter().copied())
                    .collect();
                u.sort_unstable();
                u.dedup();
                Some(u)
            } else {
                None
            }
        };
        let mut cut_entries: Vec<(String, &Vec<UserId>)> = cfg
            .measures
            .iter()
            .map(|m| (m.name().to_string(), &cuts[m.name()]))
            .collect();
        if let Some(u) = &union_cut {
            cut_entries.push(("indicators_union".to_string(), u));
        }
        for (ki, kind) in KINDS.iter().enumerate() {
            let top = ctx.percentiles[ki].top();
            for (name_i, cut_i) in &cut_entries {
                for (name_j, cut_j) in &cut_entries {
                    if name_i == name_j {
                        continue;
                    }
                    let value = if top.is_empty() {
                        None
                    } else {
                        metric_or_na(overlap(top, cut_i, cut_j))?
                    };
                    ev.overlap_monthly.push(OverlapRow {
                        cutoff: label.clone(),
                        kind: kind.label(),
                        measure_i: name_i.clone(),
                        measure_j: name_j.clone(),
                        value,
                    });
                }
            }
        }

        // top-k listing and the chance that as many vendors land in a random
        // draw of the same size
        for &measure in &cfg.measures {
            let ranked = tables[measure.name()].ranked();
            let k = cfg.top_k.min(ranked.len());
            let mut with_sales = 0usize;
            for (rank, &(u, _)) in ranked[..k].iter().enumerate() {
                let (current, future) = if corpus.has_sales_observations(u) {
                    let s = corpus.sales_at_cutoff(u, cutoff)?;
                    (s.current, s.future)
                } else {
                    (0.0, 0.0)
                };
                if corpus.is_vendor(u) {
                    with_sales += 1;
                }
                ev.top_users.push(TopUserRow {
                    cutoff: label.clone(),
                    measure: measure.name().into(),
                    rank: rank + 1,
                    user: corpus.user_name(u).to_string(),
                    current,
                    future,
                });
            }
            if k > 0 && !ctx.vendors.is_empty() {
                ev.key_players.push(KeyPlayerRow {
                    cutoff: label.clone(),
                    measure: measure.name().into(),
                    top_k: k,
                    with_sales,
                    active_users: ctx.active.len(),
                    active_vendors: ctx.vendors.len(),
                    p_random: random_inclusion_prob(
                        ctx.active.len() as u64,
                        ctx.vendors.len() as u64,
                        k as u64,
                        with_sales as u64,
                    )?,
                });
            }
        }
    }
    fit_trends(&mut ev, months);
    Ok(ev)
}

type SeriesKey = (String, &'static str, &'static str);

/// Degree-3 fits of each monthly metric series, x = month index; series
/// with fewer than four defined months are left out.
fn fit_trends(ev: &mut Evaluation, months: &[Cutoff]) {
    let index_of: HashMap<String, usize> = months
        .iter()
        .enumerate()
        .map(|(i, c)| (c.label(), i))
        .collect();
    let mut series: BTreeMap<SeriesKey, Vec<(f64, f64)>> = BTreeMap::new();
    for row in ev.diff_rows.iter().chain(&ev.recall_rows) {
        if let Some(v) = row.value {
            series
                .entry((row.measure.clone(), row.kind, row.metric))
                .or_default()
                .push((index_of[&row.cutoff] as f64, v));
        }
    }
    for ((measure, kind, metric), points) in series {
        if let Ok(coefficients) = cubic_trend(&points) {
            ev.trend_rows.push(TrendRow {
                measure,
                kind,
                metric,
                n_months: points.len(),
                coefficients,
            });
        }
    }
}

fn fmt_value(value: Option<f64>, as_pct: bool) -> String {
    match value {
        None => "NA".to_string(),
        Some(v) if as_pct => pct(v),
        Some(v) => sig(v, 12),
    }
}

pub fn write_outputs(ev: &Evaluation, eval_dir: &Path) -> Result<()> {
    std::fs::create_dir_all(eval_dir)?;

    let mut w = csv_writer(&eval_dir.join("diff_scores.csv"))?;
    w.write_record(["cutoff", "measure", "kind", "metric", "value"])?;
    for r in &ev.diff_rows {
        w.write_record([
            &r.cutoff,
            &r.measure,
            r.kind,
            r.metric,
            &fmt_value(r.value, false),
        ])?;
    }
    w.flush()?;

    let mut w = csv_writer(&eval_dir.join("recalls.csv"))?;
    w.write_record(["cutoff", "measure", "kind", "metric", "value"])?;
    for r in &ev.recall_rows {
        w.write_record([
            &r.cutoff,
            &r.measure,
            r.kind,
            r.metric,
            &fmt_value(r.value, true),
        ])?;
    }
    w.flush()?;

    let mut w = csv_writer(&eval_dir.join("overlap_monthly.csv"))?;
    w.write_record(["cutoff", "kind", "measure_i", "measure_j", "value"])?;
    for r in &ev.overlap_monthly {
        w.write_record([
            &r.cutoff,
            r.kind,
            &r.measure_i,
            &r.measure_j,
            &fmt_value(r.value, true),
        ])?;
    }
    w.flush()?;

    write_overlap_summary(ev, &eval_dir.join("overlap_summary.csv"))?;

    let mut w = csv_writer(&eval_dir.join("top_users.csv"))?;
    w.write_record(["cutoff", "measure", "rank", "user", "current_sales", "future_sales"])?;
    for r in &ev.top_users {
        w.write_record([
            &r.cutoff,
            &r.measure,
            &r.rank.to_string(),
            &r.user,
            &sig(r.current, 12),
            &sig(r.future, 12),
        ])?;
    }
    w.flush()?;

    let mut w = csv_writer(&eval_dir.join("trends.csv"))?;
    w.write_record(["measure", "kind", "metric", "n_months", "c0", "c1", "c2", "c3"])?;
    for r in &ev.trend_rows {
        w.write_record([
            r.measure.as_str(),
            r.kind,
            r.metric,
            &r.n_months.to_string(),
            &sig(r.coefficients[0], 12),
            &sig(r.coefficients[1], 12),
            &sig(r.coefficients[2], 12),
            &sig(r.coefficients[3], 12),
        ])?;
    }
    w.flush()?;

    let mut w = csv_writer(&eval_dir.join("key_players.csv"))?;
    w.write_record([
        "cutoff",
        "measure",
        "top_k",
        "with_sales",
        "active_users",
        "active_vendors",
        "p_random",
    ])?;
    for r in &ev.key_players {
        w.write_record([
            &r.cutoff,
            &r.measure,
            &r.top_k.to_string(),
            &r.with_sales.to_string(),
            &r.active_users.to_string(),
            &r.active_vendors.to_string(),
            &sig(r.p_random, 12),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Mean and sample standard deviation across months per (kind, i, j);
/// a single defined month leaves the deviation flagged as NA.
fn write_overlap_summary(ev: &Evaluation, path: &Path) -> Result<()> {
    let mut groups: BTreeMap<(&str, &str, &str), Vec<f64>> = BTreeMap::new();
    for r in &ev.overlap_monthly {
        if let Some(v) = r.value {
            groups
                .entry((r.kind, r.measure_i.as_str(), r.measure_j.as_str()))
                .or_default()
                .push(v);
        }
    }
    let mut w = csv_writer(path)?;
    w.write_record(["kind", "measure_i", "measure_j", "mean", "std", "n_months"])?;
    for ((kind, i, j), values) in &groups {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() > 1 {
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
            Some(var.sqrt())
        } else {
            None
        };
        w.write_record([
            *kind,
            *i,
            *j,
            &pct(mean),
            &std.map(pct).unwrap_or_else(|| "NA".to_string()),
            &values.len().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn csv_writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let file = std::fs::File::create(path).map_err(|e| crate::with_path(e, path))?;
    Ok(csv::Writer::from_writer(file))
}

pub fn run(cfg: &RunConfig) -> Result<()> {
    cfg.sales_path()?;
    let corpus = load_corpus(cfg)?;
    let months = resolve_months(&corpus, cfg)?;
    let scores_dir = cfg.out_dir.join("scores");
    let ev = compute_evaluation(&corpus, cfg, &months, &scores_dir)?;
    write_outputs(&ev, &cfg.out_dir.join("eval"))?;
    write_run_manifest("evaluate", cfg)?;
    eprintln!(
        "evaluate: {} months x {} measures -> {}",
        months.len(),
        cfg.measures.len(),
        cfg.out_dir.join("eval").display()
    );
    Ok(())
}
