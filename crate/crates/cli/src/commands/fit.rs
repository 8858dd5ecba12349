use std::collections::BTreeMap;
use std::fmt::Write as _;

use okun_core::okun::{
    exclude_years, fit_report, search_breaks, AnchorMode, FitOptions, FitReport, FitStatistics, ModelFile,
    RegressionLine, SearchOptions,
};
use okun_core::timeseries::{log_growth, Point, Year};
use okun_core::Error;
use serde::Serialize;
use serde_json::json;

use crate::config::RunConfig;
use crate::report::{Bundle, Output, Provenance};

#[derive(Serialize)]
struct StatisticsOut {
    n: usize,
    residual_sigma: f64,
    residual_rms: f64,
    r_squared: f64,
    r_squared_prediction: f64,
    regression_line: RegressionLine,
    mean_u: f64,
    excluded_years: Vec<Year>,
}

impl From<&FitStatistics> for StatisticsOut {
    fn from(s: &FitStatistics) -> Self {
        StatisticsOut {
            n: s.n,
            residual_sigma: s.residual_sigma,
            residual_rms: s.residual_rms,
            r_squared: s.r_squared,
            r_squared_prediction: s.r_squared_prediction,
            regression_line: s.regression_line,
            mean_u: s.mean_u,
            excluded_years: s.excluded_years.clone(),
        }
    }
}

#[derive(Serialize)]
struct FitOut<'a> {
    country: String,
    provenance: Provenance,
    config: &'a RunConfig,
    unemployment: String,
    gdppc: String,
    span: (Year, Year),
    searched: bool,
    breaks: Vec<Year>,
    anchor_mode: AnchorMode,
    model: ModelFile,
    statistics: StatisticsOut,
    excluded: Option<StatisticsOut>,
    residuals: Vec<Point>,
    warnings: Vec<String>,
}

fn print_report(country: &str, r: &FitReport, excluded: Option<&FitStatistics>) {
    println!("{country}: {} segments, anchors {:?}", r.model.segments().len(), r.anchor_mode);
    println!("  {:>9}  {:>7}  {:>7}  {:>7}", "segment", "b", "a", "u0");
    for (s, an) in r.model.segments().iter().zip(r.model.anchors()) {
        println!("  {}-{}  {:>7.3}  {:>7.3}  {:>7.3}", s.start_year, s.end_year, s.b, s.a, an.u);
    }
    let st = &r.statistics;
    println!("  n={}  sigma={:.3}  R2={:.3}  R2(prediction)={:.3}", st.n, st.residual_sigma, st.r_squared, st.r_squared_prediction);
    if let Some(x) = excluded {
        println!("  excluding {:?}: n={}  sigma={:.3}  R2={:.3}", x.excluded_years, x.n, x.residual_sigma, x.r_squared);
    }
    for w in &r.warnings {
        println!("  warning: {w}");
    }
}

pub fn run(cfg: &RunConfig) -> Result<(), Error> {
    let mut bundle = Bundle::open(cfg)?;
    let (u_id, u) = bundle.series(cfg.unemployment.as_deref(), "unemployment")?;
    let (g_id, gdp) = bundle.series(cfg.gdppc.as_deref(), "gdppc")?;
    let growth = log_growth(&gdp)?;
    let from = cfg.from.or(u.first_year()).unwrap_or_default();
    let to = cfg.to.or(u.last_year()).unwrap_or_default();
    let u = u.restrict(from, to);

    let (report, searched) = match &cfg.breaks {
        Some(breaks) => {
            let opts = FitOptions {
                anchor_mode: cfg.anchor_mode,
                min_segment: cfg.min_segment,
            };
            (fit_report(&u, &growth, breaks, &opts)?, false)
        }
        None => {
            let n = cfg.n_breaks.unwrap_or(cfg.candidates.len());
            let opts = SearchOptions {
                min_segment: cfg.min_segment,
                search_radius: cfg.search_radius,
                anchor_mode: cfg.anchor_mode,
            };
            (search_breaks(&u, &growth, n, &cfg.candidates, &opts)?, n > 0)
        }
    };
    let excluded = if cfg.exclude_years.is_empty() {
        None
    } else {
        Some(exclude_years(&report, &cfg.exclude_years)?)
    };

    let country = bundle.country(cfg);
    print_report(&country, &report, excluded.as_ref());

    let provenance = bundle.inputs.provenance(cfg);
    let mut meta = BTreeMap::new();
    meta.insert("config_sha256".into(), json!(provenance.config_sha256));
    meta.insert("unemployment".into(), json!(u_id));
    meta.insert("gdppc".into(), json!(g_id));
    meta.insert("anchor_mode".into(), json!(report.anchor_mode));
    meta.insert("residual_sigma".into(), json!(report.statistics.residual_sigma));
    meta.insert("r_squared".into(), json!(report.statistics.r_squared));
    let model = ModelFile::new(country.clone(), &report.model, meta);

    let mut csv = String::from("year,measured,predicted,residual\n");
    for m in report.measured.points() {
        if let Some(p) = report.predicted.get(m.year) {
            writeln!(csv, "{},{},{},{}", m.year, m.value, p, m.value - p).unwrap();
        }
    }

    let out_report = FitOut {
        country: country.clone(),
        provenance,
        config: cfg,
        unemployment: u_id,
        gdppc: g_id,
        span: (report.model.first_year(), report.model.last_year()),
        searched,
        breaks: report.breaks.clone(),
        anchor_mode: report.anchor_mode,
        model: model.clone(),
        statistics: (&report.statistics).into(),
        excluded: excluded.as_ref().map(Into::into),
        residuals: report.statistics.residuals.points().to_vec(),
        warnings: report.warnings.clone(),
    };
    let out = Output::new(cfg, &country)?;
    out.write_json("fit.json", &out_report)?;
    out.write_json("model.json", &model)?;
    out.write("fit.csv", &csv)?;
    Ok(())
}
