use rootfind_core::stats::linear_fit;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};
use crate::table::TrialTable;

const MIN_POINTS: usize = 4;
/// Changes in the ratio below this are treated as rounding.
const RATIO_TOL: f64 = 1e-9;

/// Smallest output size reaching a given error level.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingPoint {
    pub k: f64,
    pub epsilon: f64,
}

/// Least-squares fit of `ln K` against `sqrt(ln(1/ε))`, plus the trend of
/// `ln K / ln(1/ε)` used to tell subpolynomial growth from a power law.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: Vec<ScalingPoint>,
    pub residuals: Vec<f64>,
    /// `(ln K, ln K / ln(1/ε))` for points with `K >= 2`.
    pub ratios: Vec<(f64, f64)>,
    /// Slope of the ratio against `ln K`.
    pub ratio_slope: f64,
    /// The ratio falls from the smallest to the largest `K` and its fitted
    /// slope is negative.
    pub subpolynomial: bool,
}

/// Fits the `error` rows of an error-curve table, which must come from a
/// single model and tree size.
pub fn fit_scaling(table: &TrialTable) -> Result<ScalingFit> {
    let rows: Vec<_> = table.with_statistic("error").collect();
    let first = rows.first().ok_or_else(|| HarnessError::Input("table has no `error` rows".into()))?;
    if rows.iter().any(|r| r.model != first.model || r.d != first.d || r.n != first.n) {
        return Err(HarnessError::Input("`error` rows mix several models or tree sizes".into()));
    }
    let mut curve = Vec::with_capacity(rows.len());
    for r in &rows {
        let k = r.k.ok_or_else(|| HarnessError::Input("`error` row without K".into()))?;
        curve.push((k, r.value));
    }
    fit_scaling_points(&scaling_points(&curve))
}

/// For each distinct error level in `(0, 1)`, the smallest `K` attaining it.
fn scaling_points(curve: &[(usize, f64)]) -> Vec<ScalingPoint> {
    let mut levels: Vec<f64> = curve.iter().map(|c| c.1).filter(|&e| e > 0.0 && e < 1.0).collect();
    levels.sort_by(|a, b| b.total_cmp(a));
    levels.dedup();
    levels
        .into_iter()
        .filter_map(|eps| {
            curve.iter().filter(|c| c.1 <= eps).map(|c| c.0).min().map(|k| ScalingPoint { k: k as f64, epsilon: eps })
        })
        .collect()
}

pub fn fit_scaling_points(points: &[ScalingPoint]) -> Result<ScalingFit> {
    if points.len() < MIN_POINTS {
        return Err(HarnessError::Input(format!(
            "need at least {MIN_POINTS} error levels in (0, 1) to fit, got {}",
            points.len()
        )));
    }
    let xs: Vec<f64> = points.iter().map(|p| (1.0 / p.epsilon).ln().sqrt()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.k.ln()).collect();
    let fit = linear_fit(&xs, &ys)?;
    let residuals = xs.iter().zip(&ys).map(|(x, y)| y - (fit.intercept + fit.slope * x)).collect();
    let mut ratios: Vec<(f64, f64)> =
        points.iter().filter(|p| p.k >= 2.0).map(|p| (p.k.ln(), p.k.ln() / (1.0 / p.epsilon).ln())).collect();
    ratios.sort_by(|a, b| a.0.total_cmp(&b.0));
    let ratio_slope = if ratios.len() >= 2 {
        let lx: Vec<f64> = ratios.iter().map(|r| r.0).collect();
        let ly: Vec<f64> = ratios.iter().map(|r| r.1).collect();
        linear_fit(&lx, &ly).map_or(f64::NAN, |f| f.slope)
    } else {
        f64::NAN
    };
    let subpolynomial = match (ratios.first(), ratios.last()) {
        (Some(lo), Some(hi)) if ratios.len() >= 2 => hi.1 < lo.1 - RATIO_TOL && ratio_slope < -RATIO_TOL,
        _ => false,
    };
    Ok(ScalingFit {
        slope: fit.slope,
        intercept: fit.intercept,
        r_squared: fit.r_squared,
        points: points.to_vec(),
        residuals,
        ratios,
        ratio_slope,
        subpolynomial,
    })
}
