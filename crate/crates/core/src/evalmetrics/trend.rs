//! Least-squares cubic trend fitting for monthly series.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Fit `y = c0 + c1 x + c2 x^2 + c3 x^3` by least squares and return
/// `[c0, c1, c2, c3]`.
///
/// Solved through an SVD of the Vandermonde matrix. Requires at least four
/// points with distinct x values.
pub fn cubic_trend(points: &[(f64, f64)]) -> Result<[f64; 4]> {
    let mut xs: Vec<f64> = points.iter().map(|&(x, _)| x).collect();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    xs.dedup();
    if xs.len() < 4 {
        return Err(Error::InvalidParameter(format!(
            "cubic fit needs >= 4 distinct x values, got {}",
            xs.len()
        )));
    }
    let m = points.len();
    let a = DMatrix::from_fn(m, 4, |i, j| points[i].0.powi(j as i32));
    let b = DVector::from_fn(m, |i, _| points[i].1);
    let svd = a.svd(true, true);
    let c = svd
        .solve(&b, 1e-14)
        .map_err(|e| Error::InvalidParameter(format!("cubic fit failed: {e}")))?;
    Ok([c[0], c[1], c[2], c[3]])
}
