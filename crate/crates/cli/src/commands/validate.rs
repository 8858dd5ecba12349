use okun_core::io::{Manifest, QuarterlyKind};
use okun_core::timeseries::{AnnualSeries, Unit, VariableKind};
use okun_core::Error;

use crate::config::RunConfig;

fn expected_units(v: VariableKind) -> &'static [Unit] {
    match v {
        VariableKind::UnemploymentRate => &[Unit::PercentPoints],
        VariableKind::RealGdpPc => &[Unit::CurrencyPerCapita, Unit::IndexLevel],
        VariableKind::CpiIndex | VariableKind::DgdpIndex => &[Unit::IndexLevel],
        VariableKind::InflationRate => &[Unit::PercentPerYear, Unit::IndexLevel],
        VariableKind::Derived => &[Unit::Dimensionless, Unit::PercentPoints, Unit::IndexLevel],
    }
}

fn role_kind(role: &str) -> Option<VariableKind> {
    match role {
        "unemployment" => Some(VariableKind::UnemploymentRate),
        "gdppc" => Some(VariableKind::RealGdpPc),
        "cpi" => Some(VariableKind::CpiIndex),
        "dgdp" => Some(VariableKind::DgdpIndex),
        _ => None,
    }
}

fn describe(s: &AnnualSeries) -> String {
    let span = match (s.first_year(), s.last_year()) {
        (Some(a), Some(b)) => format!("{a}-{b}"),
        _ => "empty".into(),
    };
    let gaps = s.gaps();
    let gaps = if gaps.is_empty() {
        "no gaps".to_string()
    } else {
        format!("gaps {}", gaps.iter().map(|y| y.to_string()).collect::<Vec<_>>().join(","))
    };
    format!("{span} n={} {gaps}", s.len())
}

/// Checks one manifest entry beyond what loading already enforces.
fn check_entry(m: &Manifest, id: &str) -> Result<AnnualSeries, Error> {
    let e = m.entry(id)?;
    if !expected_units(e.variable).contains(&e.unit) {
        return Err(Error::WrongKind {
            series: format!("{}/{}", m.country, id),
            expected: expected_units(e.variable)[0].as_str(),
            found: e.unit.to_string(),
        });
    }
    let s = m.load_series(id)?;
    if s.is_empty() {
        return Err(Error::Constraint(format!("{}/{id}: no observations", m.country)));
    }
    Ok(s)
}

pub fn run(cfg: &RunConfig) -> Result<(), Error> {
    let m = Manifest::load(cfg.manifest_path()?)?;
    println!("{}: {} annual, {} quarterly series", m.country, m.series.len(), m.quarterly.len());
    let mut failures: Vec<Error> = Vec::new();

    for e in &m.series {
        match check_entry(&m, &e.id) {
            Ok(s) => println!("  ok    {:<16} {:<18} {:<20} {}  [{}]", e.id, e.variable, e.unit, describe(&s), e.source),
            Err(err) => {
                println!("  FAIL  {:<16} {err}", e.id);
                failures.push(err);
            }
        }
    }
    for q in &m.quarterly {
        match m.load_quarterly(&q.id) {
            Ok(s) => {
                let pts = s.points();
                let span = match (pts.first(), pts.last()) {
                    (Some(a), Some(b)) => format!("{}-{}", a.quarter, b.quarter),
                    _ => "empty".into(),
                };
                let kind = match q.kind {
                    QuarterlyKind::UnemploymentRate => "unemployment_rate",
                    QuarterlyKind::GrowthAnnualized => "growth_annualized",
                    QuarterlyKind::GrowthQuarterly => "growth_quarterly",
                };
                println!("  ok    {:<16} {:<18} {span} n={}  [{}]", q.id, kind, s.len(), q.source);
            }
            Err(err) => {
                println!("  FAIL  {:<16} {err}", q.id);
                failures.push(err);
            }
        }
    }
    for (role, id) in &m.roles {
        let Some(kind) = role_kind(role) else {
            println!("  note  role `{role}` is not used by any command");
            continue;
        };
        if let Ok(e) = m.entry(id) {
            if e.variable != kind {
                let err = Error::WrongKind {
                    series: format!("{}/{id} (role {role})", m.country),
                    expected: kind.as_str(),
                    found: e.variable.to_string(),
                };
                println!("  FAIL  role {role:<11} {err}");
                failures.push(err);
            }
        }
    }

    match failures.into_iter().next() {
        None => {
            println!("all series valid");
            Ok(())
        }
        Some(first) => Err(first),
    }
}
