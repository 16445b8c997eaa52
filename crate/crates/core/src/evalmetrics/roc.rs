//! Threshold sweeps over ranked scores and tie diagnostics.

use crate::error::{Error, Result};
use crate::ingest::UserId;
use crate::measures::ScoreTable;

/// One point of a threshold sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RocPoint {
    /// Fraction of users labelled positive, in [0, 1].
    pub threshold: f64,
    pub tpr: f64,
    pub fpr: f64,
}

#[derive(Debug, Clone)]
pub struct RocCurve {
    pub points: Vec<RocPoint>,
    /// Trapezoid-rule area under (fpr, tpr).
    pub auc: f64,
}

/// Sweep rank-cut thresholds from 0% to 100% in `step_percent` steps,
/// classifying the top fraction as predicted positive each time.
///
/// The positive set must be a nonempty proper subset of the scored users.
pub fn roc_sweep(
    scores: &ScoreTable,
    positives: &[UserId],
    step_percent: u32,
) -> Result<RocCurve> {
    if step_percent == 0 || 100 % step_percent != 0 {
        return Err(Error::InvalidParameter(format!(
            "ROC step must divide 100, got {step_percent}"
        )));
    }
    let n = scores.len();
    let mut is_positive = vec![false; n];
    let ranked = scores.ranked();
    let index_of: std::collections::HashMap<UserId, usize> = ranked
        .iter()
        .enumerate()
        .map(|(i, &(u, _))| (u, i))
        .collect();
    let mut n_pos = 0usize;
    for &u in positives {
        let &i = index_of
            .get(&u)
            .ok_or_else(|| Error::UnknownUser(format!("user #{} not scored", u.0)))?;
        if !is_positive[i] {
            is_positive[i] = true;
            n_pos += 1;
        }
    }
    if n_pos == 0 || n_pos == n {
        return Err(Error::UndefinedMetric(
            "ROC needs a nonempty proper positive subset",
        ));
    }
    let n_neg = n - n_pos;

    // prefix positive counts over the ranking
    let mut prefix_pos = vec![0usize; n + 1];
    for i in 0..n {
        prefix_pos[i + 1] = prefix_pos[i] + usize::from(is_positive[i]);
    }

    let mut points = Vec::new();
    let mut auc = 0.0;
    let mut prev = RocPoint {
        threshold: 0.0,
        tpr: 0.0,
        fpr: 0.0,
    };
    for pct in (0..=100).step_by(step_percent as usize) {
        let fraction = pct as f64 / 100.0;
        let k = (fraction * n as f64).ceil() as usize;
        let tp = prefix_pos[k];
        let fp = k - tp;
        let point = RocPoint {
            threshold: fraction,
            tpr: tp as f64 / n_pos as f64,
            fpr: fp as f64 / n_neg as f64,
        };
        if pct > 0 {
            auc += (point.fpr - prev.fpr) * (point.tpr + prev.tpr) / 2.0;
        }
        points.push(point);
        prev = point;
    }
    Ok(RocCurve { points, auc })
}

/// Percentage of users tied at the minimum score; bounds how much of a
/// ranking's tail is decided by the tiebreak alone.
pub fn lowest_value_fraction(scores: &ScoreTable) -> Result<f64> {
    if scores.is_empty() {
        return Err(Error::EmptyInput("scores"));
    }
    let min = scores
        .entries()
        .iter()
        .map(|&(_, s)| s)
        .fold(f64::INFINITY, f64::min);
    let at_min = scores.entries().iter().filter(|&&(_, s)| s == min).count();
    Ok(100.0 * at_min as f64 / scores.len() as f64)
}
