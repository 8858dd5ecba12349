//! Definitional break detection from the gap between cumulative CPI and
//! GDP-deflator inflation, and the piecewise bridge between the two curves.

mod bridge;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::lstsq_normal;
use crate::placement::{pick_best, placements};
use crate::timeseries::{align, AnnualSeries, Point, Unit, VariableKind, Year};

pub use bridge::{
    bridge_fit, scale_chain, step_factors, suggest_dummy_years, BridgeMode, BridgeSegment, DummyOffset,
    InflationBridge,
};

/// `cpi_cum − dgdp_cum` over the common years.
pub fn difference_curve(cpi_cum: &AnnualSeries, dgdp_cum: &AnnualSeries) -> Result<AnnualSeries> {
    let (c, d) = align(cpi_cum, dgdp_cum)?;
    let values: Vec<f64> = c.points().iter().zip(d.points()).map(|(a, b)| a.value - b.value).collect();
    c.with_values(VariableKind::Derived, Unit::Dimensionless, values)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BreakCandidate {
    pub year: Year,
    /// RMS increase when this break alone is removed from the selected set.
    pub score: f64,
    /// Fitted slope after the year minus fitted slope before it.
    pub slope_change: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectOptions {
    pub max_breaks: usize,
    pub min_segment: usize,
    /// A further break is kept only if it cuts the RMS by at least this
    /// fraction of the RMS without it.
    pub min_relative_improvement: f64,
}

impl Default for DetectOptions {
    fn default() -> Self {
        DetectOptions {
            max_breaks: 3,
            min_segment: 5,
            min_relative_improvement: 0.02,
        }
    }
}

/// The selected continuous piecewise-linear fit of a difference curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Segmentation {
    pub breaks: Vec<Year>,
    pub rms: f64,
    /// Slope of each piece, in curve units per year.
    pub slopes: Vec<f64>,
    pub fitted: Vec<Point>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BreakDetection {
    pub candidates: Vec<BreakCandidate>,
    /// Best achievable RMS with 0, 1, … `max_breaks` breaks.
    pub rms_by_count: Vec<f64>,
    pub segmentation: Segmentation,
}

struct HingeDesign {
    years: Vec<Year>,
    centred: Vec<f64>,
    y: Vec<f64>,
}

impl HingeDesign {
    fn new(diff: &AnnualSeries) -> Self {
        let years = diff.years();
        let mid = (years[0] as f64 + years[years.len() - 1] as f64) / 2.0;
        HingeDesign {
            centred: years.iter().map(|&y| y as f64 - mid).collect(),
            years,
            y: diff.values(),
        }
    }

    fn matrix(&self, knots: &[Year]) -> (Vec<f64>, usize) {
        let cols = 2 + knots.len();
        let mut m = Vec::with_capacity(self.years.len() * cols);
        for (&yr, &t) in self.years.iter().zip(&self.centred) {
            m.push(1.0);
            m.push(t);
            m.extend(knots.iter().map(|&k| ((yr - k) as f64).max(0.0)));
        }
        (m, cols)
    }

    /// Coefficients `[level, slope, hinge…]` and RMS, or `None` if singular.
    fn fit(&self, knots: &[Year]) -> Option<(Vec<f64>, f64)> {
        let (m, cols) = self.matrix(knots);
        let n = self.years.len();
        lstsq_normal(&m, n, cols, &self.y).map(|(beta, sse)| (beta, (sse.max(0.0) / n as f64).sqrt()))
    }

    fn evaluate(&self, knots: &[Year], beta: &[f64]) -> Vec<Point> {
        let (m, cols) = self.matrix(knots);
        self.years
            .iter()
            .enumerate()
            .map(|(i, &year)| Point {
                year,
                value: m[i * cols..(i + 1) * cols].iter().zip(beta).map(|(a, b)| a * b).sum(),
            })
            .collect()
    }
}

/// Best hinge placement with exactly `k` knots over the full grid.
fn best_with(design: &HingeDesign, k: usize, min_segment: i32) -> Option<(Vec<Year>, f64)> {
    let first = design.years[0];
    let last = design.years[design.years.len() - 1];
    let grid: Vec<Year> = (first + 1..=last).collect();
    let scored: Vec<(Vec<Year>, f64)> = placements(&grid, k, first, last, min_segment)
        .into_par_iter()
        .map(|p| {
            let rms = design.fit(&p).map_or(f64::INFINITY, |(_, r)| r);
            (p, rms)
        })
        .collect();
    pick_best(&scored)
}

/// Searches continuous piecewise-linear fits of `diff` with up to
/// `max_breaks` knots and keeps the knots that each improve the RMS by the
/// configured margin.
pub fn detect_breaks(diff: &AnnualSeries, opts: &DetectOptions) -> Result<BreakDetection> {
    if opts.min_segment < 3 {
        return Err(Error::Constraint(format!(
            "min_segment must be at least 3, got {}",
            opts.min_segment
        )));
    }
    let needed = (opts.max_breaks + 1) * opts.min_segment;
    if diff.len() < needed {
        return Err(Error::Constraint(format!(
            "{}: {} points cannot hold {} breaks with min_segment {} (need {needed})",
            diff.label(),
            diff.len(),
            opts.max_breaks,
            opts.min_segment
        )));
    }
    let design = HingeDesign::new(diff);
    let min_segment = opts.min_segment as i32;

    let mut best: Vec<(Vec<Year>, f64)> = Vec::with_capacity(opts.max_breaks + 1);
    for k in 0..=opts.max_breaks {
        match best_with(&design, k, min_segment) {
            Some(b) => best.push(b),
            None if k == 0 => {
                return Err(Error::DegenerateRegression(format!(
                    "{}: linear trend fit is singular",
                    diff.label()
                )))
            }
            None => break,
        }
    }
    let rms_by_count: Vec<f64> = best.iter().map(|(_, r)| *r).collect();

    let scale = design.y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let floor = 1e-12 * (1.0 + scale);
    let mut chosen = 0;
    for k in 1..best.len() {
        let (prev, cur) = (rms_by_count[k - 1], rms_by_count[k]);
        if prev <= floor || prev - cur < opts.min_relative_improvement * prev {
            break;
        }
        chosen = k;
    }

    let breaks = best[chosen].0.clone();
    let (beta, rms) = design.fit(&breaks).expect("selected placement was fitted");
    let candidates = breaks
        .iter()
        .enumerate()
        .map(|(i, &year)| {
            let mut without = breaks.clone();
            without.remove(i);
            let rms_without = design.fit(&without).map_or(f64::INFINITY, |(_, r)| r);
            BreakCandidate {
                year,
                score: (rms_without - rms).max(0.0),
                slope_change: beta[2 + i],
            }
        })
        .collect();
    let mut slopes = vec![beta[1]];
    for h in &beta[2..] {
        slopes.push(slopes[slopes.len() - 1] + h);
    }
    Ok(BreakDetection {
        candidates,
        rms_by_count,
        segmentation: Segmentation {
            fitted: design.evaluate(&breaks, &beta),
            breaks,
            rms,
            slopes,
        },
    })
}

/// Break candidates for `diff`, sorted by year, with the default 2% margin.
pub fn candidate_breaks(diff: &AnnualSeries, max_breaks: usize, min_segment: usize) -> Result<Vec<BreakCandidate>> {
    let opts = DetectOptions {
        max_breaks,
        min_segment,
        ..DetectOptions::default()
    };
    Ok(detect_breaks(diff, &opts)?.candidates)
}
