use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Least-squares line through `(ln x, ln y)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// Points used by the final fit.
    pub points: usize,
    /// Whether the coarsest point was dropped by the pre-asymptotic guard.
    pub excluded_coarsest: bool,
}

/// Minimum number of points for a slope fit.
pub const MIN_FIT_POINTS: usize = 4;

fn least_squares(lx: &[f64], ly: &[f64]) -> (f64, f64) {
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Log-log slope of `y` against `x`. Points must be ordered coarse to fine; the
/// first (coarsest) is excluded when its residual to the fit through the others
/// exceeds three times their RMS residual.
pub fn fit_loglog_slope(x: &[f64], y: &[f64]) -> Result<SlopeFit> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), got: y.len() });
    }
    if x.len() < MIN_FIT_POINTS {
        return Err(Error::InvalidParameter(format!("slope fit needs at least {MIN_FIT_POINTS} points, got {}", x.len())));
    }
    if x.iter().chain(y).any(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(Error::InvalidParameter("slope fit needs positive finite data".into()));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    // Fit without the coarsest point and ask whether it lies on that line.
    let (s1, i1) = least_squares(&lx[1..], &ly[1..]);
    let res: Vec<f64> = lx.iter().zip(&ly).map(|(a, b)| b - (i1 + s1 * a)).collect();
    let rms_rest = (res[1..].iter().map(|r| r * r).sum::<f64>() / (res.len() - 1) as f64).sqrt();
    // Absolute floor of 1% in log units: clean asymptotic data have tiny RMS
    // residuals, and sub-percent deviations of the coarsest point are not pre-asymptotic.
    if res[0].abs() > (3.0 * rms_rest).max(1e-2) {
        return Ok(SlopeFit { slope: s1, intercept: i1, points: x.len() - 1, excluded_coarsest: true });
    }
    let (slope, intercept) = least_squares(&lx, &ly);
    Ok(SlopeFit { slope, intercept, points: x.len(), excluded_coarsest: false })
}
