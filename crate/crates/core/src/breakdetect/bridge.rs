use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{lstsq, population_std};
use crate::timeseries::{align, AnnualSeries, Point, Year};

/// How a segment scale acts on the deflator curve.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BridgeMode {
    /// The scale multiplies the deflator's annual increments inside its
    /// segment, so the bridged curve stays continuous across breaks:
    /// `CPI(t) − CPI(t0) = Σ_k s_k·ΔdGDP_k(t)`.
    #[default]
    Hinged,
    /// The scale multiplies the cumulative deflator level directly:
    /// `CPI(t) = s_k·dGDP(t)` for `t` in segment `k`.
    Proportional,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BridgeSegment {
    pub start_year: Year,
    pub end_year: Year,
    pub scale: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DummyOffset {
    pub year: Year,
    pub offset: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InflationBridge {
    pub mode: BridgeMode,
    pub segments: Vec<BridgeSegment>,
    pub dummies: Vec<DummyOffset>,
    /// Root mean square of `cpi_cum − fitted` over every year of the span.
    pub rms: f64,
    pub fitted: Vec<Point>,
    pub residuals: Vec<Point>,
}

fn segment_bounds(first: Year, last: Year, breaks: &[Year]) -> Result<Vec<(Year, Year)>> {
    let mut bounds = Vec::with_capacity(breaks.len() + 1);
    let mut start = first;
    for (i, &b) in breaks.iter().enumerate() {
        if b <= first || b > last {
            return Err(Error::Constraint(format!("break {b} is not inside {first}-{last}")));
        }
        if i > 0 && b <= breaks[i - 1] {
            return Err(Error::Constraint(format!("breaks must be strictly increasing, got {breaks:?}")));
        }
        bounds.push((start, b - 1));
        start = b;
    }
    bounds.push((start, last));
    if let Some((s, e)) = bounds.iter().find(|(s, e)| e <= s) {
        return Err(Error::Constraint(format!("bridge segment {s}-{e} spans a single year")));
    }
    Ok(bounds)
}

/// Fits one scale per break-delimited segment mapping cumulative deflator
/// inflation onto cumulative CPI inflation, with an additive offset for each
/// dummy year.
pub fn bridge_fit(
    cpi_cum: &AnnualSeries,
    dgdp_cum: &AnnualSeries,
    breaks: &[Year],
    dummy_years: &[Year],
    mode: BridgeMode,
) -> Result<InflationBridge> {
    let (c, d) = align(cpi_cum, dgdp_cum)?;
    c.require_contiguous()?;
    let years = c.years();
    let (cv, dv) = (c.values(), d.values());
    let (first, last) = (years[0], years[years.len() - 1]);
    let bounds = segment_bounds(first, last, breaks)?;

    let mut dummies: Vec<Year> = dummy_years.to_vec();
    dummies.sort_unstable();
    if dummies.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Constraint(format!("duplicate dummy years in {dummy_years:?}")));
    }
    if let Some(y) = dummies.iter().find(|&&y| y < first || y > last) {
        return Err(Error::Constraint(format!("dummy year {y} is outside {first}-{last}")));
    }

    let idx = |y: Year| (y - first) as usize;
    let n = years.len();
    let segment_of = |y: Year| bounds.iter().position(|&(s, e)| y >= s && y <= e).expect("span covered");

    let (scales, offsets, fitted): (Vec<f64>, Vec<f64>, Vec<f64>) = match mode {
        BridgeMode::Proportional => {
            let mut scales = Vec::with_capacity(bounds.len());
            for &(s, e) in &bounds {
                let (mut cd, mut dd) = (0.0, 0.0);
                for y in s..=e {
                    if dummies.binary_search(&y).is_err() {
                        cd += cv[idx(y)] * dv[idx(y)];
                        dd += dv[idx(y)] * dv[idx(y)];
                    }
                }
                if !(dd > 0.0) {
                    return Err(Error::SingularFit { start: s, end: e, condition: f64::INFINITY });
                }
                scales.push(cd / dd);
            }
            let offsets: Vec<f64> = dummies
                .iter()
                .map(|&y| cv[idx(y)] - scales[segment_of(y)] * dv[idx(y)])
                .collect();
            let fitted = years
                .iter()
                .map(|&y| {
                    let base = scales[segment_of(y)] * dv[idx(y)];
                    match dummies.binary_search(&y) {
                        Ok(j) => base + offsets[j],
                        Err(_) => base,
                    }
                })
                .collect();
            (scales, offsets, fitted)
        }
        BridgeMode::Hinged => {
            // columns: accumulated deflator increments per segment, then one
            // indicator per dummy year
            let k = bounds.len();
            let cols = k + dummies.len();
            let mut design = vec![0.0; n * cols];
            let mut acc = vec![0.0; k];
            for (i, &y) in years.iter().enumerate() {
                if i > 0 {
                    acc[segment_of(y)] += dv[i] - dv[i - 1];
                }
                design[i * cols..i * cols + k].copy_from_slice(&acc);
                if let Ok(j) = dummies.binary_search(&y) {
                    design[i * cols + k + j] = 1.0;
                }
            }
            let target: Vec<f64> = cv.iter().map(|v| v - cv[0]).collect();
            let (beta, _) = lstsq(&design, n, cols, &target).ok_or_else(|| {
                let (s, e) = bounds
                    .iter()
                    .copied()
                    .find(|&(s, e)| (s.max(first + 1)..=e).all(|y| dv[idx(y)] == dv[idx(y) - 1]))
                    .unwrap_or((first, last));
                Error::SingularFit { start: s, end: e, condition: f64::INFINITY }
            })?;
            let fitted = (0..n)
                .map(|i| cv[0] + design[i * cols..(i + 1) * cols].iter().zip(&beta).map(|(a, b)| a * b).sum::<f64>())
                .collect();
            (beta[..k].to_vec(), beta[k..].to_vec(), fitted)
        }
    };

    if let Some((i, s)) = scales.iter().enumerate().find(|(_, s)| !(**s > 0.0)) {
        return Err(Error::Constraint(format!(
            "bridge segment {}-{} has non-positive scale {s}",
            bounds[i].0, bounds[i].1
        )));
    }

    let residuals: Vec<Point> = years
        .iter()
        .zip(cv.iter().zip(&fitted))
        .map(|(&year, (c, f))| Point { year, value: c - f })
        .collect();
    let rms = (residuals.iter().map(|p| p.value * p.value).sum::<f64>() / n as f64).sqrt();
    Ok(InflationBridge {
        mode,
        segments: bounds
            .iter()
            .zip(&scales)
            .map(|(&(start_year, end_year), &scale)| BridgeSegment { start_year, end_year, scale })
            .collect(),
        dummies: dummies
            .iter()
            .zip(&offsets)
            .map(|(&year, &offset)| DummyOffset { year, offset })
            .collect(),
        rms,
        fitted: years.iter().zip(&fitted).map(|(&year, &value)| Point { year, value }).collect(),
        residuals,
    })
}

/// Each segment's scale relative to the first segment's.
pub fn scale_chain(bridge: &InflationBridge) -> Vec<f64> {
    let base = bridge.segments.first().map_or(1.0, |s| s.scale);
    bridge.segments.iter().map(|s| s.scale / base).collect()
}

/// Each segment's scale relative to the previous segment's; the first entry
/// is 1. The running product reproduces [`scale_chain`].
pub fn step_factors(bridge: &InflationBridge) -> Vec<f64> {
    let mut out = Vec::with_capacity(bridge.segments.len());
    for (i, s) in bridge.segments.iter().enumerate() {
        out.push(if i == 0 { 1.0 } else { s.scale / bridge.segments[i - 1].scale });
    }
    out
}

/// Years whose residual exceeds `threshold_sigma` population standard
/// deviations of all residuals. A heuristic aid; dummies stay explicit.
pub fn suggest_dummy_years(bridge: &InflationBridge, threshold_sigma: f64) -> Vec<Year> {
    let r: Vec<f64> = bridge.residuals.iter().map(|p| p.value).collect();
    if r.len() < 3 {
        return Vec::new();
    }
    let sigma = population_std(&r);
    if !(sigma > 0.0) {
        return Vec::new();
    }
    bridge
        .residuals
        .iter()
        .filter(|p| p.value.abs() > threshold_sigma * sigma)
        .map(|p| p.year)
        .collect()
}
