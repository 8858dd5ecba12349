use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use okun_core::io::QuarterlyKind;
use okun_core::okun::{implied_growth, predict_ahead, predict_quarterly, ModelFile, PiecewiseOkun};
use okun_core::timeseries::log_growth;
use okun_core::Error;

use crate::config::RunConfig;
use crate::report::{cell, Bundle, Output};

pub(crate) fn load_model(path: &Path) -> Result<(ModelFile, PiecewiseOkun), Error> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.into(),
        source: e,
    })?;
    let file: ModelFile = serde_json::from_str(&text).map_err(|e| Error::Parse {
        file: path.into(),
        line: e.line(),
        message: e.to_string(),
    })?;
    let model = file.model()?;
    Ok((file, model))
}

fn annual(cfg: &RunConfig, bundle: &mut Bundle, model: &PiecewiseOkun) -> Result<String, Error> {
    let (_, gdp) = bundle.series(cfg.gdppc.as_deref(), "gdppc")?;
    let predicted = predict_ahead(model, &log_growth(&gdp)?, cfg.horizon)?;
    let measured = match cfg.unemployment.as_deref() {
        Some(id) => Some(bundle.series(Some(id), "unemployment")?.1),
        None if bundle.manifest.roles.contains_key("unemployment") => Some(bundle.series(None, "unemployment")?.1),
        None => None,
    };
    let mut csv = String::from("year,predicted,measured,residual\n");
    for p in predicted.points() {
        let m = measured.as_ref().and_then(|m| m.get(p.year));
        writeln!(csv, "{},{},{},{}", p.year, p.value, cell(m), cell(m.map(|m| m - p.value))).unwrap();
    }
    let last = predicted.points().last().expect("model spans at least two years");
    println!("predicted {}-{}; {} = {:.3}", model.first_year(), last.year, last.year, last.value);
    Ok(csv)
}

fn quarterly(cfg: &RunConfig, bundle: &mut Bundle, model: &PiecewiseOkun) -> Result<String, Error> {
    let m = &bundle.manifest;
    let g_entry = m
        .quarterly_of_kind(QuarterlyKind::GrowthAnnualized)
        .or_else(|| m.quarterly_of_kind(QuarterlyKind::GrowthQuarterly))
        .ok_or_else(|| Error::Manifest {
            path: m.dir.join("manifest.json"),
            message: "no quarterly growth series".into(),
        })?
        .clone();
    let u_entry = m.quarterly_of_kind(QuarterlyKind::UnemploymentRate).cloned();

    bundle.inputs.add(&bundle.manifest.path_of(&g_entry.file))?;
    let growth = bundle.manifest.load_quarterly(&g_entry.id)?;
    let measured = match &u_entry {
        Some(e) => {
            bundle.inputs.add(&bundle.manifest.path_of(&e.file))?;
            Some(bundle.manifest.load_quarterly(&e.id)?)
        }
        None => None,
    };
    let first = growth
        .points()
        .first()
        .ok_or_else(|| Error::Constraint("quarterly growth series is empty".into()))?
        .quarter;
    let u_start = match cfg.u_start {
        Some(u) => u,
        None => measured.as_ref().and_then(|m| m.get(first.prev())).ok_or_else(|| {
            Error::Constraint(format!("no --u-start and no measured unemployment for {}", first.prev()))
        })?,
    };
    let predicted = predict_quarterly(model, &growth, u_start)?;

    let seg = model.last_segment();
    println!(
        "last segment {}-{}: b = {:.3}, a = {:.3}; start {} u = {:.3}",
        seg.start_year,
        seg.end_year,
        seg.b,
        seg.a,
        first.prev(),
        u_start
    );
    let mut csv = String::from("quarter,growth,predicted,measured,implied_growth\n");
    for (g, p) in growth.points().iter().zip(predicted.points()) {
        let mu = measured.as_ref().and_then(|m| m.get(g.quarter));
        let prev = measured.as_ref().and_then(|m| m.get(g.quarter.prev()));
        let implied = match (prev, mu) {
            (Some(a), Some(b)) => Some(implied_growth(model, a, b)?),
            _ => None,
        };
        println!(
            "  {}  growth {:>7.2}  predicted {:>6.2}  measured {:>6}  implied growth {:>7}",
            g.quarter,
            g.value,
            p.value,
            mu.map_or("-".into(), |v| format!("{v:.2}")),
            implied.map_or("-".into(), |v| format!("{v:.2}"))
        );
        writeln!(csv, "{},{},{},{},{}", g.quarter, g.value, p.value, cell(mu), cell(implied)).unwrap();
    }
    Ok(csv)
}

pub fn run(cfg: &RunConfig) -> Result<(), Error> {
    let model_path = cfg.model_path()?;
    let (file, model) = load_model(model_path)?;
    let mut bundle = Bundle::open(cfg)?;
    bundle.inputs.add(model_path)?;
    let country = cfg.country.clone().unwrap_or(file.country);
    let out = Output::new(cfg, &country)?;
    if cfg.quarterly {
        let csv = quarterly(cfg, &mut bundle, &model)?;
        out.write("predict_quarterly.csv", &csv)?;
    } else {
        let csv = annual(cfg, &mut bundle, &model)?;
        out.write("predict.csv", &csv)?;
    }
    Ok(())
}
