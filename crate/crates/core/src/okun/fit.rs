use serde::{Deserialize, Serialize};

use super::{evaluate, predict_values, Anchor, AnchorMode, FitReport, PiecewiseOkun, SegmentSpec};
use crate::error::{Error, Result};
use crate::linalg::{solve_sym2, MAX_CONDITION};
use crate::timeseries::{AnnualSeries, GrowthSeries, Year};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub anchor_mode: AnchorMode,
    pub min_segment: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            anchor_mode: AnchorMode::Measured,
            min_segment: 5,
        }
    }
}

/// Unemployment and cumulative growth on a contiguous span, indexed from 0.
pub(crate) struct Panel {
    pub first: Year,
    pub u: Vec<f64>,
    /// `cum[i] = Σ dlnG(first+1 ..= first+i)`; `cum[0] = 0`.
    pub cum: Vec<f64>,
}

pub(crate) struct SegmentFit {
    pub a: f64,
    pub b: f64,
    /// Squared residuals over the segment's years after the start year.
    pub sse: f64,
}

impl Panel {
    pub fn new(u: &AnnualSeries, growth: &GrowthSeries) -> Result<Self> {
        u.require_contiguous()?;
        let first = u.first_year().ok_or_else(|| Error::Constraint(format!("{} is empty", u.label())))?;
        let mut cum = Vec::with_capacity(u.len());
        cum.push(0.0);
        for y in first + 1..first + u.len() as Year {
            cum.push(cum[cum.len() - 1] + growth.require(y)?);
        }
        Ok(Panel { first, u: u.values(), cum })
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn last(&self) -> Year {
        self.first + self.u.len() as Year - 1
    }

    /// Intercept-free least squares of `u(t) − anchor` on cumulative growth
    /// and elapsed years over rows `s+1 ..= e`.
    pub fn fit_segment(&self, s: usize, e: usize, anchor: f64) -> Result<SegmentFit> {
        let (mut s11, mut s12, mut s22, mut r1, mut r2) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for i in s + 1..=e {
            let x1 = self.cum[i] - self.cum[s];
            let x2 = (i - s) as f64;
            let y = self.u[i] - anchor;
            s11 += x1 * x1;
            s12 += x1 * x2;
            s22 += x2 * x2;
            r1 += x1 * y;
            r2 += x2 * y;
        }
        let sol = solve_sym2([[s11, s12], [s12, s22]], [r1, r2]);
        if !(sol.condition <= MAX_CONDITION) {
            return Err(Error::SingularFit {
                start: self.first + s as Year,
                end: self.first + e as Year,
                condition: sol.condition,
            });
        }
        let [b, a] = sol.x;
        let sse = (s + 1..=e)
            .map(|i| {
                let r = self.u[i] - anchor - b * (self.cum[i] - self.cum[s]) - a * (i - s) as f64;
                r * r
            })
            .sum();
        Ok(SegmentFit { a, b, sse })
    }

    /// Fits every segment delimited by `breaks` and returns the model with
    /// the whole-span sum of squared residuals.
    pub fn fit(&self, breaks: &[Year], mode: AnchorMode) -> Result<(PiecewiseOkun, f64)> {
        let mut starts = vec![0usize];
        starts.extend(breaks.iter().map(|&b| (b - self.first) as usize));
        let mut segments = Vec::with_capacity(starts.len());
        let mut anchors = Vec::with_capacity(starts.len());
        let mut sse = 0.0;
        for (k, &s) in starts.iter().enumerate() {
            let e = starts.get(k + 1).map_or(self.len() - 1, |next| next - 1);
            let anchor = match (mode, segments.last()) {
                (AnchorMode::Chained, Some(prev)) => {
                    let prev: &SegmentSpec = prev;
                    let ps = (prev.start_year - self.first) as usize;
                    let pa: &Anchor = &anchors[k - 1];
                    pa.u + prev.b * (self.cum[s] - self.cum[ps]) + prev.a * (s - ps) as f64
                }
                _ => self.u[s],
            };
            let fit = self.fit_segment(s, e, anchor)?;
            sse += fit.sse + (self.u[s] - anchor) * (self.u[s] - anchor);
            segments.push(SegmentSpec {
                start_year: self.first + s as Year,
                end_year: self.first + e as Year,
                a: fit.a,
                b: fit.b,
            });
            anchors.push(Anchor {
                year: self.first + s as Year,
                u: anchor,
            });
        }
        Ok((PiecewiseOkun::new(segments, anchors)?, sse))
    }
}

pub(crate) fn check_breaks(first: Year, last: Year, breaks: &[Year], min_segment: usize) -> Result<()> {
    let mut edges = vec![first];
    edges.extend_from_slice(breaks);
    edges.push(last + 1);
    for w in edges.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::Constraint(format!(
                "breaks {breaks:?} must be strictly increasing and inside {first}-{last}"
            )));
        }
        if ((w[1] - w[0]) as usize) < min_segment {
            return Err(Error::Constraint(format!(
                "segment {}-{} is shorter than min_segment {min_segment}",
                w[0],
                w[1] - 1
            )));
        }
    }
    Ok(())
}

/// Fits per-segment `(a, b)` with the intercept pinned at each anchor. The
/// fitted span is the span of `u`, which must be contiguous; `growth` must
/// cover every year after the first.
pub fn fit_segments(u: &AnnualSeries, growth: &GrowthSeries, breaks: &[Year], opts: &FitOptions) -> Result<PiecewiseOkun> {
    let panel = Panel::new(u, growth)?;
    check_breaks(panel.first, panel.last(), breaks, opts.min_segment.max(2))?;
    Ok(panel.fit(breaks, opts.anchor_mode)?.0)
}

/// [`fit_segments`] followed by prediction and evaluation.
pub fn fit_report(u: &AnnualSeries, growth: &GrowthSeries, breaks: &[Year], opts: &FitOptions) -> Result<FitReport> {
    let model = fit_segments(u, growth, breaks, opts)?;
    FitReport::build(u, growth, model, opts.anchor_mode)
}

impl FitReport {
    pub(crate) fn build(u: &AnnualSeries, growth: &GrowthSeries, model: PiecewiseOkun, anchor_mode: AnchorMode) -> Result<FitReport> {
        // typed like the measurements so unconstrained inputs stay unconstrained
        let predicted = AnnualSeries::new(u.country(), u.variable(), u.unit(), predict_values(&model, growth)?)?;
        let statistics = evaluate(u, &predicted)?;
        let mut warnings = model.sign_warnings();
        warnings.extend(growth.warnings().iter().cloned());
        Ok(FitReport {
            breaks: model.breaks(),
            anchor_mode,
            model,
            measured: u.clone(),
            predicted,
            statistics,
            warnings,
        })
    }
}
