use std::collections::BTreeSet;

use serde::Serialize;

use super::{AnchorMode, PiecewiseOkun};
use crate::error::{Error, Result};
use crate::linalg::{mean, ols_line, population_std};
use crate::timeseries::{align, AnnualSeries, Unit, VariableKind, Year};

/// Largest share of points [`exclude_years`] may drop.
pub const MAX_EXCLUDED_FRACTION: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegressionLine {
    pub slope: f64,
    pub intercept: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitStatistics {
    pub n: usize,
    /// Measured minus predicted, percentage points.
    pub residuals: AnnualSeries,
    /// Population standard deviation of the residuals.
    pub residual_sigma: f64,
    pub residual_rms: f64,
    /// Coefficient of determination of measured regressed on predicted.
    pub r_squared: f64,
    /// `1 − SSE/SST` of the prediction itself.
    pub r_squared_prediction: f64,
    pub regression_line: RegressionLine,
    pub mean_u: f64,
    pub excluded_years: Vec<Year>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitReport {
    pub breaks: Vec<Year>,
    pub anchor_mode: AnchorMode,
    pub model: PiecewiseOkun,
    pub measured: AnnualSeries,
    pub predicted: AnnualSeries,
    pub statistics: FitStatistics,
    pub warnings: Vec<String>,
}

/// Residual and regression statistics of `predicted` against `measured`
/// over their common years.
pub fn evaluate(measured: &AnnualSeries, predicted: &AnnualSeries) -> Result<FitStatistics> {
    let (m, p) = align(measured, predicted)?;
    if m.len() < 3 {
        return Err(Error::Constraint(format!(
            "evaluation needs at least 3 common years, got {}",
            m.len()
        )));
    }
    let (mv, pv) = (m.values(), p.values());
    let line = ols_line(&pv, &mv)
        .ok_or_else(|| Error::DegenerateRegression("predicted series has zero variance".into()))?;
    let r_squared = line
        .r_squared
        .ok_or_else(|| Error::DegenerateRegression("measured series has zero variance".into()))?;
    let resid: Vec<f64> = mv.iter().zip(&pv).map(|(a, b)| a - b).collect();
    let mean_u = mean(&mv);
    let sse: f64 = resid.iter().map(|r| r * r).sum();
    let sst: f64 = mv.iter().map(|v| (v - mean_u) * (v - mean_u)).sum();
    Ok(FitStatistics {
        n: mv.len(),
        residual_sigma: population_std(&resid),
        residual_rms: (sse / mv.len() as f64).sqrt(),
        residuals: m.with_values(VariableKind::Derived, Unit::PercentPoints, resid)?,
        r_squared,
        r_squared_prediction: 1.0 - sse / sst,
        regression_line: RegressionLine {
            slope: line.slope,
            intercept: line.intercept,
        },
        mean_u,
        excluded_years: Vec::new(),
    })
}

/// Recomputes the statistics of `report` without the listed years. The
/// model is untouched.
pub fn exclude_years(report: &FitReport, years: &[Year]) -> Result<FitStatistics> {
    let drop: BTreeSet<Year> = years.iter().copied().collect();
    let span = &report.statistics.residuals;
    if let Some(&y) = drop.iter().find(|&&y| !span.contains(y)) {
        return Err(Error::MissingYear {
            series: format!("{}/residuals", span.country()),
            year: y,
        });
    }
    let n = span.len();
    if drop.len() as f64 > MAX_EXCLUDED_FRACTION * n as f64 {
        return Err(Error::Refused(format!(
            "excluding {} of {n} points exceeds {:.0}%",
            drop.len(),
            MAX_EXCLUDED_FRACTION * 100.0
        )));
    }
    let keep = |y: Year| !drop.contains(&y);
    let mut stats = evaluate(&report.measured.filter(keep), &report.predicted.filter(keep))?;
    stats.excluded_years = drop.into_iter().collect();
    Ok(stats)
}
