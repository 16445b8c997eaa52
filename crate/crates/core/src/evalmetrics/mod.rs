//! Evaluation machinery: normalized difference scores, success percentiles,
//! rank cuts, recalls, overlaps, ROC sweeps, tie diagnostics, random-draw
//! probabilities, and trend fits.

mod hypergeom;
mod roc;
mod trend;

pub use hypergeom::random_inclusion_prob;
pub use roc::{lowest_value_fraction, roc_sweep, RocCurve, RocPoint};
pub use trend::cubic_trend;

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::ingest::UserId;
use crate::measures::ScoreTable;

/// Min-max normalized scores, same users and order as the source table.
#[derive(Debug, Clone)]
pub struct NormalizedScores {
    entries: Vec<(UserId, f64)>,
}

impl NormalizedScores {
    pub fn entries(&self) -> &[(UserId, f64)] {
        &self.entries
    }

    pub fn get(&self, user: UserId) -> Option<f64> {
        self.entries
            .binary_search_by_key(&user, |&(u, _)| u)
            .ok()
            .map(|i| self.entries[i].1)
    }
}

/// Map scores onto [0, 1] by `(s - min) / (max - min)`.
///
/// A constant table carries no ranking information and maps to all zeros.
pub fn minmax_normalize(scores: &ScoreTable) -> Result<NormalizedScores> {
    if scores.is_empty() {
        return Err(Error::EmptyInput("scores to normalize"));
    }
    let min = scores.entries().iter().map(|&(_, s)| s).fold(f64::INFINITY, f64::min);
    let max = scores
        .entries()
        .iter()
        .map(|&(_, s)| s)
        .fold(f64::NEG_INFINITY, f64::max);
    let span = max - min;
    let entries = scores
        .entries()
        .iter()
        .map(|&(u, s)| (u, if span == 0.0 { 0.0 } else { (s - min) / span }))
        .collect();
    Ok(NormalizedScores { entries })
}

/// Mean-difference scores between two user groups over normalized values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffScore {
    pub absolute: f64,
    /// `None` when the reference group's mean is zero.
    pub relative: Option<f64>,
}

/// Absolute difference `mean_a - mean_b` and relative difference
/// `(mean_a - mean_b) / mean_b` of normalized scores.
pub fn diff_scores(
    group_a: &[UserId],
    group_b: &[UserId],
    normalized: &NormalizedScores,
) -> Result<DiffScore> {
    let mean = |group: &[UserId], label| -> Result<f64> {
        if group.is_empty() {
            return Err(Error::EmptyInput(label));
        }
        let mut total = 0.0;
        for &u in group {
            total += normalized
                .get(u)
                .ok_or_else(|| Error::UnknownUser(format!("user #{} not in score table", u.0)))?;
        }
        Ok(total / group.len() as f64)
    };
    let mean_a = mean(group_a, "difference-score group a")?;
    let mean_b = mean(group_b, "difference-score group b")?;
    let absolute = mean_a - mean_b;
    let relative = (mean_b > 0.0).then(|| absolute / mean_b);
    Ok(DiffScore { absolute, relative })
}

/// Which sales figure ranks vendors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SuccessKind {
    Current,
    Future,
}

impl SuccessKind {
    pub fn label(&self) -> &'static str {
        match self {
            SuccessKind::Current => "current",
            SuccessKind::Future => "future",
        }
    }
}

/// Active vendors split into five success percentiles, plus the non-vendor
/// rest of the active user base.
#[derive(Debug, Clone)]
pub struct VendorPercentiles {
    pub kind: SuccessKind,
    /// `groups[0]` is the most successful fifth (the top percentile).
    pub groups: [Vec<UserId>; 5],
    pub non_vendors: Vec<UserId>,
}

impl VendorPercentiles {
    pub fn top(&self) -> &[UserId] {
        &self.groups[0]
    }

    pub fn sub_top(&self) -> &[UserId] {
        &self.groups[1]
    }

    pub fn all_vendors(&self) -> Vec<UserId> {
        let mut v: Vec<UserId> = self.groups.iter().flatten().copied().collect();
        v.sort_unstable();
        v
    }
}

/// Partition active vendors into five near-equal groups by descending sales.
///
/// Ties break by ascending user id; when the count is not divisible by five
/// the earlier (more successful) groups take the remainder. `active_users`
/// minus the vendors becomes the non-vendor group.
pub fn vendor_percentiles(
    vendor_sales: &[(UserId, f64)],
    active_users: &[UserId],
    kind: SuccessKind,
) -> VendorPercentiles {
    let mut ranked: Vec<(UserId, f64)> = vendor_sales.to_vec();
    ranked.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));

    let n = ranked.len();
    let base = n / 5;
    let remainder = n % 5;
    let mut groups: [Vec<UserId>; 5] = Default::default();
    let mut next = 0;
    for (g, group) in groups.iter_mut().enumerate() {
        let size = base + usize::from(g < remainder);
        *group = ranked[next..next + size].iter().map(|&(u, _)| u).collect();
        next += size;
    }

    let vendor_set: Vec<UserId> = {
        let mut v: Vec<UserId> = ranked.iter().map(|&(u, _)| u).collect();
        v.sort_unstable();
        v
    };
    let non_vendors = active_users
        .iter()
        .copied()
        .filter(|u| vendor_set.binary_search(u).is_err())
        .collect();

    VendorPercentiles {
        kind,
        groups,
        non_vendors,
    }
}

/// The top `ceil(fraction * n)` users by descending score, ties broken by
/// ascending user id. Returned in rank order.
pub fn rank_cut(scores: &ScoreTable, fraction: f64) -> Result<Vec<UserId>> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "rank fraction must be in (0, 1], got {fraction}"
        )));
    }
    let k = (fraction * scores.len() as f64).ceil() as usize;
    Ok(scores.ranked().into_iter().take(k).map(|(u, _)| u).collect())
}

fn sorted_copy(users: &[UserId]) -> Vec<UserId> {
    let mut v = users.to_vec();
    v.sort_unstable();
    v
}

fn intersection_count(a: &[UserId], sorted_b: &[UserId]) -> usize {
    a.iter().filter(|u| sorted_b.binary_search(u).is_ok()).count()
}

/// Percentage of the top vendor percentile captured by the rank cut:
/// `100 * |TV ∩ TU| / |TV|`.
pub fn vendor_recall(top_vendors: &[UserId], cut: &[UserId]) -> Result<f64> {
    if top_vendors.is_empty() {
        return Err(Error::EmptyInput("top vendor percentile"));
    }
    let cut_sorted = sorted_copy(cut);
    let hit = intersection_count(top_vendors, &cut_sorted);
    Ok(100.0 * hit as f64 / top_vendors.len() as f64)
}

/// Printed-equation recall variant dividing by the cut size instead:
/// `100 * |TV ∩ TU| / |TU|`.
pub fn vendor_recall_per_cut(top_vendors: &[UserId], cut: &[UserId]) -> Result<f64> {
    if cut.is_empty() {
        return Err(Error::EmptyInput("rank cut"));
    }
    let cut_sorted = sorted_copy(cut);
    let hit = intersection_count(top_vendors, &cut_sorted);
    Ok(100.0 * hit as f64 / cut.len() as f64)
}

/// Share of vendors detected by cut `i` that cut `j` also detects:
/// `100 * |TV ∩ TU_i ∩ TU_j| / |TV ∩ TU_i|`. Asymmetric in `(i, j)`.
pub fn overlap(top_vendors: &[UserId], cut_i: &[UserId], cut_j: &[UserId]) -> Result<f64> {
    let i_sorted = sorted_copy(cut_i);
    let j_sorted = sorted_copy(cut_j);
    let detected_i: Vec<UserId> = top_vendors
        .iter()
        .copied()
        .filter(|u| i_sorted.binary_search(u).is_ok())
        .collect();
    if detected_i.is_empty() {
        return Err(Error::UndefinedMetric("overlap: cut i detects no vendors"));
    }
    let both = intersection_count(&detected_i, &j_sorted);
    Ok(100.0 * both as f64 / detected_i.len() as f64)
}

/// Weighted recall: percentage of the weight carried by detected vendors,
/// `100 * sum(w over TV ∩ TU) / sum(w over TV)`.
fn weighted_recall(
    top_vendors: &[UserId],
    cut: &[UserId],
    weight_of: impl Fn(UserId) -> Result<f64>,
    what: &'static str,
) -> Result<f64> {
    if top_vendors.is_empty() {
        return Err(Error::EmptyInput("top vendor percentile"));
    }
    let cut_sorted = sorted_copy(cut);
    let mut total = 0.0;
    let mut captured = 0.0;
    for &u in top_vendors {
        let w = weight_of(u)?;
        total += w;
        if cut_sorted.binary_search(&u).is_ok() {
            captured += w;
        }
    }
    if total <= 0.0 {
        return Err(Error::UndefinedMetric(what));
    }
    Ok(100.0 * captured / total)
}

/// Percentage of the top percentile's post activity carried by detected
/// vendors.
pub fn post_activity_recall(
    top_vendors: &[UserId],
    cut: &[UserId],
    post_counts: &ScoreTable,
) -> Result<f64> {
    weighted_recall(
        top_vendors,
        cut,
        |u| {
            post_counts
                .get(u)
                .ok_or_else(|| Error::UnknownUser(format!("user #{} has no post count", u.0)))
        },
        "post activity recall: top percentile has no posts",
    )
}

/// Percentage of the top percentile's sales carried by detected vendors.
pub fn sales_recall(
    top_vendors: &[UserId],
    cut: &[UserId],
    sales: &HashMap<UserId, f64>,
) -> Result<f64> {
    weighted_recall(
        top_vendors,
        cut,
        |u| {
            sales
                .get(&u)
                .copied()
                .ok_or_else(|| Error::UnknownUser(format!("user #{} has no sales figure", u.0)))
        },
        "sales recall: top percentile has zero sales",
    )
}
