use std::collections::BTreeSet;
use std::fmt::Write as _;

use okun_core::sources::{compare, total_growth_factor, DivergenceFlag, LabelledSeries, RatioTrend};
use okun_core::timeseries::{VariableKind, Year};
use okun_core::Error;
use serde::Serialize;

use crate::config::RunConfig;
use crate::report::{cell, Bundle, Output, Provenance};

#[derive(Serialize)]
struct PairOut {
    a: String,
    b: String,
    max_div: f64,
    year_of_max: Year,
    flag: DivergenceFlag,
    trend_slope: f64,
    trend_r2: Option<f64>,
    /// Ratio trend over `trend_from` to the pair's last year, when requested.
    trend_since: Option<RatioTrend>,
}

#[derive(Serialize)]
struct FactorOut {
    source: String,
    factor: f64,
}

#[derive(Serialize)]
struct GrowthFactors {
    from: Year,
    to: Year,
    factors: Vec<FactorOut>,
}

#[derive(Serialize)]
struct AuditOut<'a> {
    country: String,
    provenance: Provenance,
    config: &'a RunConfig,
    ref_year: Year,
    pairs: Vec<PairOut>,
    growth_factors: GrowthFactors,
}

pub fn run(cfg: &RunConfig) -> Result<(), Error> {
    let mut bundle = Bundle::open(cfg)?;
    let ids: Vec<String> = if cfg.sources.is_empty() {
        bundle
            .manifest
            .series
            .iter()
            .filter(|s| s.variable == VariableKind::RealGdpPc)
            .map(|s| s.id.clone())
            .collect()
    } else {
        cfg.sources.clone()
    };
    let mut series = Vec::with_capacity(ids.len());
    for id in &ids {
        let (_, s) = bundle.series(Some(id), "gdppc")?;
        series.push(LabelledSeries::new(id.clone(), s));
    }
    let ref_year = cfg.ref_year.or(bundle.manifest.ref_year).ok_or_else(|| {
        Error::Constraint("no reference year (use --ref-year or `ref_year` in the manifest)".into())
    })?;
    let cmp = compare(&series, ref_year)?;

    let last_common = series.iter().filter_map(|s| s.series.last_year()).min().unwrap_or(ref_year);
    let (from, to) = (cfg.from.unwrap_or(ref_year), cfg.to.unwrap_or(last_common));
    let factors = series
        .iter()
        .map(|s| {
            Ok(FactorOut {
                source: s.label.clone(),
                factor: total_growth_factor(&s.series, from, to)?,
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;

    let mut pairs = Vec::with_capacity(cmp.pairs.len());
    for p in &cmp.pairs {
        let trend_since = match cfg.trend_from {
            Some(y) => Some(p.trend_between(y, p.trend.to_year)?),
            None => None,
        };
        pairs.push(PairOut {
            a: p.a.clone(),
            b: p.b.clone(),
            max_div: p.max_div,
            year_of_max: p.year_of_max,
            flag: p.flag,
            trend_slope: p.trend.slope,
            trend_r2: p.trend.r_squared,
            trend_since,
        });
    }

    let country = bundle.country(cfg);
    println!("{country}: {} sources normalized at {ref_year}", series.len());
    for f in &factors {
        println!("  growth {from}-{to}  {:<16} {:.3}", f.source, f.factor);
    }
    for p in &pairs {
        println!(
            "  {} / {}  max |r-1| {:.3} in {}  trend {:+.5}/yr  {:?}",
            p.a, p.b, p.max_div, p.year_of_max, p.trend_slope, p.flag
        );
    }

    let years: BTreeSet<Year> = cmp.normalized.iter().flat_map(|n| n.series.years()).collect();
    let mut csv = String::from("year");
    for n in &cmp.normalized {
        write!(csv, ",{}", n.label).unwrap();
    }
    for p in &cmp.pairs {
        write!(csv, ",{}/{}", p.a, p.b).unwrap();
    }
    csv.push('\n');
    for y in years {
        write!(csv, "{y}").unwrap();
        for n in &cmp.normalized {
            write!(csv, ",{}", cell(n.series.get(y))).unwrap();
        }
        for p in &cmp.pairs {
            write!(csv, ",{}", cell(p.ratio.get(y))).unwrap();
        }
        csv.push('\n');
    }

    let report = AuditOut {
        country: country.clone(),
        provenance: bundle.inputs.provenance(cfg),
        config: cfg,
        ref_year,
        pairs,
        growth_factors: GrowthFactors { from, to, factors },
    };
    let out = Output::new(cfg, &country)?;
    out.write_json("audit.json", &report)?;
    out.write("audit.csv", &csv)?;
    Ok(())
}
