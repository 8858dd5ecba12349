//! Cross-provider audit of real GDP per capita series: normalize at a common
//! year, then compare every pair through the ratio of the normalized curves.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::ols_line;
use crate::timeseries::{align, normalize, AnnualSeries, Unit, VariableKind, Year};

/// `|ratio − 1|` above this is worth a look.
pub const WARN_DIVERGENCE: f64 = 0.02;
/// `|ratio − 1|` above this is a material disagreement.
pub const ALERT_DIVERGENCE: f64 = 0.10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabelledSeries {
    pub label: String,
    pub series: AnnualSeries,
}

impl LabelledSeries {
    pub fn new(label: impl Into<String>, series: AnnualSeries) -> Self {
        LabelledSeries {
            label: label.into(),
            series,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DivergenceFlag {
    Ok,
    Warn,
    Alert,
}

impl DivergenceFlag {
    pub fn classify(max_divergence: f64) -> Self {
        if max_divergence > ALERT_DIVERGENCE {
            DivergenceFlag::Alert
        } else if max_divergence > WARN_DIVERGENCE {
            DivergenceFlag::Warn
        } else {
            DivergenceFlag::Ok
        }
    }
}

/// OLS line of a ratio curve against calendar year.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioTrend {
    pub from_year: Year,
    pub to_year: Year,
    pub slope: f64,
    pub intercept: f64,
    /// `None` when the ratio is constant over the span.
    pub r_squared: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairDrift {
    pub a: String,
    pub b: String,
    pub max_div: f64,
    pub year_of_max: Year,
    pub trend: RatioTrend,
    pub flag: DivergenceFlag,
    /// Normalized `a` divided by normalized `b` over their common years.
    pub ratio: AnnualSeries,
}

impl PairDrift {
    /// Trend of the ratio restricted to `from..=to`.
    pub fn trend_between(&self, from: Year, to: Year) -> Result<RatioTrend> {
        ratio_trend(&self.ratio.restrict(from, to))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SourceComparison {
    pub ref_year: Year,
    pub normalized: Vec<LabelledSeries>,
    pub pairs: Vec<PairDrift>,
}

fn ratio_trend(ratio: &AnnualSeries) -> Result<RatioTrend> {
    let years: Vec<f64> = ratio.points().iter().map(|p| p.year as f64).collect();
    let line = ols_line(&years, &ratio.values()).ok_or_else(|| {
        Error::DegenerateRegression(format!("{}: fewer than two years for a ratio trend", ratio.label()))
    })?;
    Ok(RatioTrend {
        from_year: ratio.first_year().unwrap_or_default(),
        to_year: ratio.last_year().unwrap_or_default(),
        slope: line.slope,
        intercept: line.intercept,
        r_squared: line.r_squared,
    })
}

fn pair(a: &LabelledSeries, b: &LabelledSeries) -> Result<PairDrift> {
    let (x, y) = align(&a.series, &b.series)?;
    let values: Vec<f64> = x.points().iter().zip(y.points()).map(|(p, q)| p.value / q.value).collect();
    let ratio = x.with_values(VariableKind::Derived, Unit::Dimensionless, values)?;
    let (year_of_max, max_div) = ratio
        .points()
        .iter()
        .map(|p| (p.year, (p.value - 1.0).abs()))
        .fold((ratio.points()[0].year, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
    Ok(PairDrift {
        a: a.label.clone(),
        b: b.label.clone(),
        max_div,
        year_of_max,
        trend: ratio_trend(&ratio)?,
        flag: DivergenceFlag::classify(max_div),
        ratio,
    })
}

/// Normalizes every series at `ref_year` and compares all pairs `(i, j)`
/// with `i < j` in input order.
pub fn compare(series: &[LabelledSeries], ref_year: Year) -> Result<SourceComparison> {
    if series.len() < 2 {
        return Err(Error::Constraint(format!("need at least two series to compare, got {}", series.len())));
    }
    let missing: Vec<&str> = series
        .iter()
        .filter(|s| !s.series.contains(ref_year))
        .map(|s| s.label.as_str())
        .collect();
    if !missing.is_empty() {
        return Err(Error::MissingYear {
            series: missing.join(", "),
            year: ref_year,
        });
    }
    let normalized = series
        .iter()
        .map(|s| Ok(LabelledSeries::new(s.label.clone(), normalize(&s.series, ref_year)?)))
        .collect::<Result<Vec<_>>>()?;
    let index: Vec<(usize, usize)> = (0..normalized.len())
        .flat_map(|i| (i + 1..normalized.len()).map(move |j| (i, j)))
        .collect();
    let pairs = index
        .par_iter()
        .map(|&(i, j)| pair(&normalized[i], &normalized[j]))
        .collect::<Result<Vec<_>>>()?;
    Ok(SourceComparison {
        ref_year,
        normalized,
        pairs,
    })
}

/// `s(to) / s(from)`.
pub fn total_growth_factor(s: &AnnualSeries, from_year: Year, to_year: Year) -> Result<f64> {
    Ok(s.require(to_year)? / s.require(from_year)?)
}
