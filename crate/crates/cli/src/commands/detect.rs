use std::fmt::Write as _;

use okun_core::breakdetect::{
    bridge_fit, detect_breaks, difference_curve, scale_chain, step_factors, suggest_dummy_years, BreakCandidate,
    BridgeMode, BridgeSegment, DetectOptions, DummyOffset,
};
use okun_core::timeseries::{cumulative_inflation, rates_from_index, AnnualSeries, Year};
use okun_core::Error;
use serde::Serialize;

use crate::config::RunConfig;
use crate::report::{cell, Bundle, Output, Provenance};

#[derive(Serialize)]
struct BridgeOut {
    mode: BridgeMode,
    breaks: Vec<Year>,
    segments: Vec<BridgeSegment>,
    /// Each segment's scale over the first segment's.
    scale_chain: Vec<f64>,
    /// Each segment's scale over the previous segment's.
    step_factors: Vec<f64>,
    dummies: Vec<DummyOffset>,
    rms: f64,
    suggested_dummy_years: Vec<Year>,
}

#[derive(Serialize)]
struct SegmentationOut {
    breaks: Vec<Year>,
    rms: f64,
    slopes: Vec<f64>,
}

#[derive(Serialize)]
struct BreakReport<'a> {
    country: String,
    provenance: Provenance,
    config: &'a RunConfig,
    inflation_start: Year,
    span: (Year, Year),
    candidates: Vec<BreakCandidate>,
    rms_by_count: Vec<f64>,
    segmentation: SegmentationOut,
    bridge: BridgeOut,
}

fn cumulative(idx: &AnnualSeries, start: Year, cfg: &RunConfig) -> Result<AnnualSeries, Error> {
    let cum = cumulative_inflation(&rates_from_index(idx)?, start, cfg.compounding)?;
    Ok(match cfg.to {
        Some(to) => cum.restrict(start, to),
        None => cum,
    })
}

pub fn run(cfg: &RunConfig) -> Result<(), Error> {
    let mut bundle = Bundle::open(cfg)?;
    let (_, cpi) = bundle.series(None, "cpi")?;
    let (_, dgdp) = bundle.series(None, "dgdp")?;
    let earliest = cpi.first_year().max(dgdp.first_year()).unwrap_or_default();
    let start = cfg.inflation_start.or(bundle.manifest.inflation_start).unwrap_or(earliest);

    let cpi_cum = cumulative(&cpi, start, cfg)?;
    let dgdp_cum = cumulative(&dgdp, start, cfg)?;
    let diff = difference_curve(&cpi_cum, &dgdp_cum)?;
    let detection = detect_breaks(
        &diff,
        &DetectOptions {
            max_breaks: cfg.max_breaks,
            min_segment: cfg.min_segment,
            min_relative_improvement: cfg.min_improvement,
        },
    )?;

    let mut bridge_breaks = cfg.bridge_breaks.clone().unwrap_or_else(|| detection.segmentation.breaks.clone());
    bridge_breaks.sort_unstable();
    let mut bridge = bridge_fit(&cpi_cum, &dgdp_cum, &bridge_breaks, &cfg.dummy_years, cfg.bridge_mode)?;
    let suggested = suggest_dummy_years(&bridge, cfg.dummy_threshold);
    if cfg.auto_dummies && suggested.iter().any(|y| !cfg.dummy_years.contains(y)) {
        let mut dummies = cfg.dummy_years.clone();
        dummies.extend(suggested.iter().filter(|y| !cfg.dummy_years.contains(y)));
        bridge = bridge_fit(&cpi_cum, &dgdp_cum, &bridge_breaks, &dummies, cfg.bridge_mode)?;
    }

    let country = bundle.country(cfg);
    println!("{country}: cumulative inflation from {start}, {} years", diff.len());
    for c in &detection.candidates {
        println!("  candidate {}  score {:.4}  slope change {:+.5}", c.year, c.score, c.slope_change);
    }
    for s in &bridge.segments {
        println!("  bridge {}-{}  scale {:.3}", s.start_year, s.end_year, s.scale);
    }
    for d in &bridge.dummies {
        println!("  dummy {}  offset {:+.3}", d.year, d.offset);
    }
    println!("  bridge rms {:.4}", bridge.rms);

    let mut csv = String::from("year,cpi_cum,dgdp_cum,diff,fitted_diff,bridged_cpi\n");
    for p in diff.points() {
        let fitted = detection.segmentation.fitted.iter().find(|q| q.year == p.year).map(|q| q.value);
        let bridged = bridge.fitted.iter().find(|q| q.year == p.year).map(|q| q.value);
        writeln!(
            csv,
            "{},{},{},{},{},{}",
            p.year,
            cell(cpi_cum.get(p.year)),
            cell(dgdp_cum.get(p.year)),
            p.value,
            cell(fitted),
            cell(bridged)
        )
        .unwrap();
    }

    let report = BreakReport {
        country: country.clone(),
        provenance: bundle.inputs.provenance(cfg),
        config: cfg,
        inflation_start: start,
        span: (diff.first_year().unwrap_or_default(), diff.last_year().unwrap_or_default()),
        candidates: detection.candidates.clone(),
        rms_by_count: detection.rms_by_count.clone(),
        segmentation: SegmentationOut {
            breaks: detection.segmentation.breaks.clone(),
            rms: detection.segmentation.rms,
            slopes: detection.segmentation.slopes.clone(),
        },
        bridge: BridgeOut {
            mode: bridge.mode,
            breaks: bridge_breaks,
            scale_chain: scale_chain(&bridge),
            step_factors: step_factors(&bridge),
            segments: bridge.segments,
            dummies: bridge.dummies,
            rms: bridge.rms,
            suggested_dummy_years: suggested,
        },
    };
    let out = Output::new(cfg, &country)?;
    out.write_json("breaks.json", &report)?;
    out.write("breaks.csv", &csv)?;
    Ok(())
}
