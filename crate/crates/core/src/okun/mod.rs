//! The piecewise integral Okun model: unemployment moves as
//! `du = a + b·dlnG`, integrated from an anchor level inside each
//! break-delimited segment.

mod evaluate;
mod fit;
mod quarterly;
mod search;
mod synth;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::timeseries::{AnnualSeries, GrowthSeries, Unit, VariableKind, Year};

pub use evaluate::{evaluate, exclude_years, FitReport, FitStatistics, RegressionLine};
pub use fit::{fit_report, fit_segments, FitOptions};
pub use quarterly::{implied_growth, predict_quarterly};
pub use search::{search_breaks, SearchOptions};
pub use synth::synthesize;

/// Where each segment's integration starts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnchorMode {
    /// The measured unemployment rate at the segment's first year.
    #[default]
    Measured,
    /// The previous segment's prediction carried one year forward into the
    /// segment's first year; only the first segment uses a measured value.
    Chained,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SegmentSpec {
    #[serde(rename = "start")]
    pub start_year: Year,
    #[serde(rename = "end")]
    pub end_year: Year,
    /// Drift, percentage points per year.
    pub a: f64,
    /// Response to growth, percentage points per percent of growth.
    pub b: f64,
}

impl SegmentSpec {
    pub fn len(&self) -> usize {
        (self.end_year - self.start_year + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.end_year < self.start_year
    }

    pub fn contains(&self, year: Year) -> bool {
        year >= self.start_year && year <= self.end_year
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Anchor {
    pub year: Year,
    pub u: f64,
}

/// Contiguous segments with one anchor per segment start.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PiecewiseOkun {
    segments: Vec<SegmentSpec>,
    anchors: Vec<Anchor>,
}

impl PiecewiseOkun {
    pub fn new(segments: Vec<SegmentSpec>, anchors: Vec<Anchor>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidModel("no segments".into()));
        }
        if anchors.len() != segments.len() {
            return Err(Error::InvalidModel(format!(
                "{} segments but {} anchors",
                segments.len(),
                anchors.len()
            )));
        }
        for (i, (s, an)) in segments.iter().zip(&anchors).enumerate() {
            if s.start_year >= s.end_year {
                return Err(Error::InvalidModel(format!(
                    "segment {}-{} must span at least two years",
                    s.start_year, s.end_year
                )));
            }
            if i > 0 && s.start_year != segments[i - 1].end_year + 1 {
                return Err(Error::InvalidModel(format!(
                    "segment starting {} does not follow segment ending {}",
                    s.start_year,
                    segments[i - 1].end_year
                )));
            }
            if an.year != s.start_year {
                return Err(Error::InvalidModel(format!(
                    "anchor year {} differs from segment start {}",
                    an.year, s.start_year
                )));
            }
            if !(s.a.is_finite() && s.b.is_finite() && an.u.is_finite()) {
                return Err(Error::InvalidModel(format!(
                    "non-finite coefficient or anchor in segment {}-{}",
                    s.start_year, s.end_year
                )));
            }
        }
        Ok(PiecewiseOkun { segments, anchors })
    }

    pub fn segments(&self) -> &[SegmentSpec] {
        &self.segments
    }

    pub fn anchors(&self) -> &[Anchor] {
        &self.anchors
    }

    /// First years of every segment after the first.
    pub fn breaks(&self) -> Vec<Year> {
        self.segments[1..].iter().map(|s| s.start_year).collect()
    }

    pub fn first_year(&self) -> Year {
        self.segments[0].start_year
    }

    pub fn last_year(&self) -> Year {
        self.segments[self.segments.len() - 1].end_year
    }

    pub fn last_segment(&self) -> &SegmentSpec {
        &self.segments[self.segments.len() - 1]
    }

    /// Notes for segments whose growth response has the unexpected sign.
    pub fn sign_warnings(&self) -> Vec<String> {
        self.segments
            .iter()
            .filter(|s| s.b >= 0.0)
            .map(|s| {
                format!(
                    "segment {}-{}: b = {:.3} is not negative (unemployment rises with growth)",
                    s.start_year, s.end_year, s.b
                )
            })
            .collect()
    }
}

/// The serialized form of a model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub country: String,
    pub segments: Vec<SegmentSpec>,
    pub anchors: Vec<Anchor>,
    #[serde(default)]
    pub meta: BTreeMap<String, serde_json::Value>,
}

impl ModelFile {
    pub fn new(country: impl Into<String>, model: &PiecewiseOkun, meta: BTreeMap<String, serde_json::Value>) -> Self {
        ModelFile {
            country: country.into(),
            segments: model.segments.clone(),
            anchors: model.anchors.clone(),
            meta,
        }
    }

    pub fn model(&self) -> Result<PiecewiseOkun> {
        PiecewiseOkun::new(self.segments.clone(), self.anchors.clone())
    }
}

/// Predicted values by year without range validation.
pub(crate) fn predict_values(model: &PiecewiseOkun, growth: &GrowthSeries) -> Result<Vec<(Year, f64)>> {
    let mut out = Vec::with_capacity((model.last_year() - model.first_year() + 1) as usize);
    for (seg, anchor) in model.segments.iter().zip(&model.anchors) {
        out.push((seg.start_year, anchor.u));
        let mut cum = 0.0;
        for t in seg.start_year + 1..=seg.end_year {
            cum += growth.require(t)?;
            out.push((t, anchor.u + seg.b * cum + seg.a * (t - seg.start_year) as f64));
        }
    }
    Ok(out)
}

/// Integrates the model over its whole span. Each segment starts at its
/// anchor and accumulates `b·dlnG + a` year by year.
pub fn predict(model: &PiecewiseOkun, growth: &GrowthSeries) -> Result<AnnualSeries> {
    AnnualSeries::new(
        growth.country(),
        VariableKind::UnemploymentRate,
        Unit::PercentPoints,
        predict_values(model, growth)?,
    )
}

/// [`predict`] followed by `horizon` further years of the last segment's
/// dynamics, `u(t) = u(t−1) + a + b·g(t)`.
pub fn predict_ahead(model: &PiecewiseOkun, growth: &GrowthSeries, horizon: usize) -> Result<AnnualSeries> {
    let mut values = predict_values(model, growth)?;
    let seg = model.last_segment();
    let mut u = values[values.len() - 1].1;
    for t in model.last_year() + 1..=model.last_year() + horizon as Year {
        u += seg.a + seg.b * growth.require(t)?;
        values.push((t, u));
    }
    AnnualSeries::new(growth.country(), VariableKind::UnemploymentRate, Unit::PercentPoints, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    pub(crate) fn growth(points: impl IntoIterator<Item = (Year, f64)>) -> GrowthSeries {
        GrowthSeries::from_points("T", "test", points).unwrap()
    }

    fn one_segment(start: Year, end: Year, a: f64, b: f64, u0: f64) -> PiecewiseOkun {
        PiecewiseOkun::new(
            vec![SegmentSpec { start_year: start, end_year: end, a, b }],
            vec![Anchor { year: start, u: u0 }],
        )
        .unwrap()
    }

    #[test]
    fn zero_coefficients_hold_the_anchor() {
        let m = one_segment(2000, 2010, 0.0, 0.0, 6.5);
        let g = growth((2001..=2010).map(|y| (y, (y % 5) as f64 - 2.0)));
        assert!(predict(&m, &g).unwrap().values().iter().all(|&v| v == 6.5));
    }

    #[test]
    fn last_us_segment_arithmetic() {
        let m = one_segment(2010, 2019, -0.250, -0.260, 9.63);
        let g = growth((2011..=2019).map(|y| (y, 1.6)));
        let p = predict(&m, &g).unwrap();
        assert_relative_eq!(p.get(2019).unwrap(), 9.63 - 9.0 * 0.666, epsilon = 1e-9);
        assert!((p.get(2019).unwrap() - 3.64).abs() < 0.01);
    }

    #[test]
    fn two_segments_match_recursion() {
        let m = PiecewiseOkun::new(
            vec![
                SegmentSpec { start_year: 1990, end_year: 1999, a: 0.9, b: -0.45 },
                SegmentSpec { start_year: 2000, end_year: 2012, a: -0.2, b: -0.3 },
            ],
            vec![Anchor { year: 1990, u: 15.0 }, Anchor { year: 2000, u: 14.2 }],
        )
        .unwrap();
        let g = growth((1991..=2012).map(|y| (y, ((y * 37) % 11) as f64 * 0.5 - 1.5)));
        let p = predict(&m, &g).unwrap();
        // independent recursion u(t) = u(t-1) + a + b·g(t), reset at anchors
        let mut u = 0.0;
        for y in 1990..=2012 {
            u = match y {
                1990 => 15.0,
                2000 => 14.2,
                y if y < 2000 => u + 0.9 - 0.45 * g.get(y).unwrap(),
                y => u - 0.2 - 0.3 * g.get(y).unwrap(),
            };
            assert_relative_eq!(p.get(y).unwrap(), u, epsilon = 1e-10);
        }
        assert_eq!(m.breaks(), vec![2000]);
    }

    #[test]
    fn horizon_continues_the_last_segment() {
        let m = one_segment(2000, 2005, 0.1, -0.5, 16.0);
        let g = growth((2001..=2008).map(|y| (y, 2.0)));
        let p = predict_ahead(&m, &g, 3).unwrap();
        assert_eq!(p.last_year(), Some(2008));
        for y in 2001..=2008 {
            assert_relative_eq!(p.get(y).unwrap(), 16.0 - 0.9 * (y - 2000) as f64, epsilon = 1e-12);
        }
        assert_eq!(predict_ahead(&m, &g, 0).unwrap(), predict(&m, &g).unwrap());
        assert!(matches!(predict_ahead(&m, &g, 4), Err(Error::Gap { .. })));
    }

    #[test]
    fn missing_growth_is_a_gap() {
        let m = one_segment(2000, 2005, 0.0, -0.3, 5.0);
        let g = growth([(2001, 1.0), (2002, 1.0), (2004, 1.0), (2005, 1.0)]);
        assert!(matches!(predict(&m, &g), Err(Error::Gap { .. })));
    }

    #[test]
    fn invalid_models_are_rejected() {
        let seg = |s, e| SegmentSpec { start_year: s, end_year: e, a: 0.0, b: -0.3 };
        let an = |y| Anchor { year: y, u: 5.0 };
        assert!(PiecewiseOkun::new(vec![], vec![]).is_err());
        assert!(PiecewiseOkun::new(vec![seg(2000, 2000)], vec![an(2000)]).is_err());
        assert!(PiecewiseOkun::new(vec![seg(2000, 2005), seg(2007, 2010)], vec![an(2000), an(2007)]).is_err());
        assert!(PiecewiseOkun::new(vec![seg(2000, 2005)], vec![an(2001)]).is_err());
        assert!(PiecewiseOkun::new(vec![seg(2000, 2005), seg(2006, 2010)], vec![an(2000)]).is_err());
    }

    #[test]
    fn model_file_round_trips_through_json() {
        let m = one_segment(2010, 2019, -0.25, -0.26, 9.63);
        let file = ModelFile::new("US", &m, BTreeMap::new());
        let text = serde_json::to_string(&file).unwrap();
        assert!(text.starts_with(r#"{"country":"US","segments":[{"start":2010,"end":2019,"a":-0.25,"b":-0.26}]"#));
        let back: ModelFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back.model().unwrap(), m);
    }

    #[test]
    fn growth_added_shifts_by_b_times_sum() {
        let m = PiecewiseOkun::new(
            vec![
                SegmentSpec { start_year: 0, end_year: 9, a: 0.3, b: -0.4 },
                SegmentSpec { start_year: 10, end_year: 19, a: -0.1, b: -0.2 },
            ],
            vec![Anchor { year: 0, u: 30.0 }, Anchor { year: 10, u: 31.0 }],
        )
        .unwrap();
        let g1 = growth((1..20).map(|y| (y, 2.0 + (y % 3) as f64)));
        let g2 = growth((1..20).map(|y| (y, (y % 4) as f64 - 1.5)));
        let base = predict_values(&m, &g1).unwrap();
        let both = predict_values(&m, &g1.add(&g2)).unwrap();
        for ((y, p1), (_, p2)) in base.iter().zip(&both) {
            let seg = m.segments().iter().find(|s| s.contains(*y)).unwrap();
            let extra: f64 = (seg.start_year + 1..=*y).map(|t| g2.get(t).unwrap()).sum();
            assert_relative_eq!(p2 - p1, seg.b * extra, epsilon = 1e-10);
        }
    }
}
