use serde::{Deserialize, Serialize};

use super::{AnnualSeries, GrowthSeries, Point, Unit, VariableKind, Year};
use crate::error::{Error, Result};

/// How annual inflation rates accumulate into a price curve.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Compounding {
    /// `1 + Σ rate/100`.
    #[default]
    Arithmetic,
    /// `Π (1 + rate/100)`.
    Geometric,
}

/// Year-over-year changes between consecutive observations, keyed by the
/// later year. Gaps produce no point and one warning each.
fn consecutive_changes(
    s: &AnnualSeries,
    operation: &'static str,
    f: impl Fn(f64, f64) -> f64,
) -> Result<(Vec<(Year, f64)>, Vec<String>)> {
    if let Some(p) = s.points().iter().find(|p| p.value <= 0.0) {
        return Err(Error::Domain {
            series: s.label(),
            year: p.year,
            value: p.value,
            operation,
        });
    }
    let mut out = Vec::with_capacity(s.len().saturating_sub(1));
    let mut warnings = Vec::new();
    for w in s.points().windows(2) {
        if w[1].year == w[0].year + 1 {
            out.push((w[1].year, f(w[0].value, w[1].value)));
        } else {
            warnings.push(format!(
                "{}: gap {}-{}, no {} for {}",
                s.label(),
                w[0].year,
                w[1].year,
                operation,
                (w[0].year + 1..=w[1].year)
                    .map(|y| y.to_string())
                    .collect::<Vec<_>>()
                    .join(", ")
            ));
        }
    }
    if out.is_empty() {
        return Err(Error::Constraint(format!(
            "{}: {operation} needs at least two consecutive years",
            s.label()
        )));
    }
    Ok((out, warnings))
}

/// `100·ln(G_y / G_{y-1})` for every consecutive pair of years.
pub fn log_growth(g: &AnnualSeries) -> Result<GrowthSeries> {
    if g.variable() != VariableKind::RealGdpPc {
        return Err(Error::WrongKind {
            series: g.label(),
            expected: "real_gdp_pc",
            found: g.variable().to_string(),
        });
    }
    let (points, warnings) = consecutive_changes(g, "log growth", |prev, next| {
        100.0 * (next / prev).ln()
    })?;
    Ok(GrowthSeries {
        country: g.country().to_string(),
        base: g.label(),
        points: points
            .into_iter()
            .map(|(year, value)| Point { year, value })
            .collect(),
        warnings,
    })
}

/// Divides every value by the value at `ref_year`.
pub fn normalize(s: &AnnualSeries, ref_year: Year) -> Result<AnnualSeries> {
    let base = s.require(ref_year)?;
    if base <= 0.0 {
        return Err(Error::Domain {
            series: s.label(),
            year: ref_year,
            value: base,
            operation: "normalization",
        });
    }
    // divide rather than multiply by 1/base so the reference year is exactly 1
    s.with_values(s.variable(), Unit::IndexLevel, s.points().iter().map(|p| p.value / base))
}

/// Accumulates annual rates into a curve equal to 1.0 at `start_year`.
///
/// The rate recorded for `start_year` itself is not used; the curve moves
/// from the following year on. Every year after `start_year` up to the last
/// rate must be present.
pub fn cumulative_inflation(
    rates: &AnnualSeries,
    start_year: Year,
    compounding: Compounding,
) -> Result<AnnualSeries> {
    if rates.variable() != VariableKind::InflationRate {
        return Err(Error::WrongKind {
            series: rates.label(),
            expected: "inflation_rate",
            found: rates.variable().to_string(),
        });
    }
    let last = match rates.last_year() {
        Some(y) if y >= start_year => y,
        _ => {
            return Err(Error::MissingYear {
                series: rates.label(),
                year: start_year,
            })
        }
    };
    let mut out = Vec::with_capacity((last - start_year + 1) as usize);
    let mut level = 1.0;
    out.push((start_year, level));
    for year in start_year + 1..=last {
        let rate = rates.get(year).ok_or_else(|| Error::Gap {
            series: rates.label(),
            missing: year.to_string(),
        })?;
        level = match compounding {
            Compounding::Arithmetic => level + rate / 100.0,
            Compounding::Geometric => level * (1.0 + rate / 100.0),
        };
        out.push((year, level));
    }
    AnnualSeries::new(rates.country(), VariableKind::InflationRate, Unit::IndexLevel, out)
}

/// `100·(idx_y / idx_{y-1} − 1)` for every consecutive pair of years.
pub fn rates_from_index(idx: &AnnualSeries) -> Result<AnnualSeries> {
    if idx.unit() != Unit::IndexLevel {
        return Err(Error::WrongKind {
            series: idx.label(),
            expected: "index_level",
            found: idx.unit().to_string(),
        });
    }
    let (points, _) = consecutive_changes(idx, "inflation rate", |prev, next| {
        100.0 * (next / prev - 1.0)
    })?;
    AnnualSeries::new(idx.country(), VariableKind::InflationRate, Unit::PercentPerYear, points)
}

/// Restricts both series to their common years.
pub fn align(a: &AnnualSeries, b: &AnnualSeries) -> Result<(AnnualSeries, AnnualSeries)> {
    let a2 = a.filter(|y| b.contains(y));
    if a2.is_empty() {
        return Err(Error::NoOverlap {
            a: a.label(),
            b: b.label(),
        });
    }
    let b2 = b.filter(|y| a.contains(y));
    Ok((a2, b2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn gdp(points: &[(Year, f64)]) -> AnnualSeries {
        AnnualSeries::new("X", VariableKind::RealGdpPc, Unit::CurrencyPerCapita, points.iter().copied())
            .unwrap()
    }

    fn index(points: &[(Year, f64)]) -> AnnualSeries {
        AnnualSeries::new("X", VariableKind::CpiIndex, Unit::IndexLevel, points.iter().copied()).unwrap()
    }

    fn rates(points: &[(Year, f64)]) -> AnnualSeries {
        AnnualSeries::new("X", VariableKind::InflationRate, Unit::PercentPerYear, points.iter().copied())
            .unwrap()
    }

    #[test]
    fn log_growth_constant_and_doubling() {
        let g = log_growth(&gdp(&[(2000, 100.0), (2001, 100.0), (2002, 100.0)])).unwrap();
        assert_eq!(g.points().iter().map(|p| p.value).collect::<Vec<_>>(), vec![0.0, 0.0]);
        let g = log_growth(&gdp(&[(2000, 100.0), (2001, 200.0)])).unwrap();
        assert_relative_eq!(g.get(2001).unwrap(), 69.314_718_055_994_53, epsilon = 1e-12);
    }

    #[test]
    fn log_growth_skips_gaps_with_warning() {
        let g = log_growth(&gdp(&[(2000, 100.0), (2001, 110.0), (2003, 120.0), (2004, 125.0)])).unwrap();
        assert_eq!(g.points().iter().map(|p| p.year).collect::<Vec<_>>(), vec![2001, 2004]);
        assert_eq!(g.warnings().len(), 1);
        assert!(g.warnings()[0].contains("2002"));
    }

    #[test]
    fn log_growth_rejects_non_positive_and_wrong_kind() {
        let s = AnnualSeries::new("X", VariableKind::RealGdpPc, Unit::Dimensionless, [(2000, 1.0), (2001, -1.0)])
            .unwrap();
        assert!(matches!(log_growth(&s), Err(Error::Domain { year: 2001, .. })));
        assert!(matches!(log_growth(&index(&[(2000, 1.0), (2001, 2.0)])), Err(Error::WrongKind { .. })));
        assert!(log_growth(&gdp(&[(2000, 1.0), (2002, 2.0)])).is_err());
    }

    #[test]
    fn normalize_examples() {
        let s = normalize(&gdp(&[(1970, 50.0), (1971, 55.0)]), 1970).unwrap();
        assert_eq!(s.values(), vec![1.0, 1.1]);
        assert_eq!(s.unit(), Unit::IndexLevel);
        assert!(matches!(
            normalize(&gdp(&[(1970, 50.0)]), 1980),
            Err(Error::MissingYear { year: 1980, .. })
        ));
    }

    #[test]
    fn cumulative_inflation_examples() {
        let c = cumulative_inflation(&rates(&[(2001, 10.0), (2002, 10.0)]), 2000, Compounding::Arithmetic)
            .unwrap();
        assert_eq!(c.years(), vec![2000, 2001, 2002]);
        assert_relative_eq!(c.values()[1], 1.1, epsilon = 1e-15);
        assert_relative_eq!(c.values()[2], 1.2, epsilon = 1e-15);
        let c = cumulative_inflation(&rates(&[(2001, 10.0), (2002, 10.0)]), 2000, Compounding::Geometric)
            .unwrap();
        assert_relative_eq!(c.values()[2], 1.21, epsilon = 1e-15);
        let zero = cumulative_inflation(&rates(&[(2001, 0.0), (2002, 0.0), (2003, 0.0)]), 2000, Compounding::Arithmetic)
            .unwrap();
        assert!(zero.values().iter().all(|&v| v == 1.0));
        assert!(matches!(
            cumulative_inflation(&rates(&[(2001, 1.0), (2003, 1.0)]), 2000, Compounding::Arithmetic),
            Err(Error::Gap { .. })
        ));
    }

    #[test]
    fn rates_from_index_examples() {
        let r = rates_from_index(&index(&[(2000, 100.0), (2001, 103.0)])).unwrap();
        assert_relative_eq!(r.get(2001).unwrap(), 3.0, epsilon = 1e-12);
        let flat = rates_from_index(&index(&[(2000, 7.0), (2001, 7.0), (2002, 7.0)])).unwrap();
        assert!(flat.values().iter().all(|&v| v == 0.0));
        let c = cumulative_inflation(&flat, 2000, Compounding::Arithmetic).unwrap();
        assert!(c.values().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn align_examples() {
        let a = index(&(1960..=2000).map(|y| (y, 1.0)).collect::<Vec<_>>());
        let b = index(&(1970..=2010).map(|y| (y, 2.0)).collect::<Vec<_>>());
        let (a2, b2) = align(&a, &b).unwrap();
        assert_eq!(a2.years(), (1970..=2000).collect::<Vec<_>>());
        assert_eq!(a2.years(), b2.years());

        let (a3, a4) = align(&a, &a).unwrap();
        assert_eq!(a3, a);
        assert_eq!(a4, a);

        let gappy = a.filter(|y| y != 1985);
        let (g1, g2) = align(&gappy, &b).unwrap();
        assert!(!g1.contains(1985) && !g2.contains(1985));

        let c = index(&[(2020, 1.0)]);
        assert!(matches!(align(&a, &c), Err(Error::NoOverlap { .. })));
    }

    fn positive_series() -> impl Strategy<Value = AnnualSeries> {
        (1900i32..2000, prop::collection::vec(0.01f64..1e4, 2..40)).prop_map(|(start, vals)| {
            AnnualSeries::new(
                "P",
                VariableKind::RealGdpPc,
                Unit::CurrencyPerCapita,
                vals.into_iter().enumerate().map(|(i, v)| (start + i as i32, v)),
            )
            .unwrap()
        })
    }

    proptest! {
        #[test]
        fn normalize_is_idempotent(s in positive_series(), k in 0usize..40) {
            let y = s.years()[k % s.len()];
            let once = normalize(&s, y).unwrap();
            let twice = normalize(&once, y).unwrap();
            prop_assert_eq!(once.values(), twice.values());
            prop_assert_eq!(once.get(y), Some(1.0));
        }

        #[test]
        fn summed_growth_recovers_level_ratio(s in positive_series()) {
            let g = log_growth(&s).unwrap();
            let total: f64 = g.points().iter().map(|p| p.value).sum();
            let vals = s.values();
            let ratio = vals[vals.len() - 1] / vals[0];
            prop_assert!(((total / 100.0).exp() / ratio - 1.0).abs() < 1e-10);
        }

        #[test]
        fn cumulative_of_rates_starts_at_one_and_rises(
            start in 1900i32..2000,
            steps in prop::collection::vec(0.0f64..0.2, 1..40),
        ) {
            let mut level = 100.0;
            let mut pts = vec![(start, level)];
            for (i, s) in steps.iter().enumerate() {
                level *= 1.0 + s;
                pts.push((start + 1 + i as i32, level));
            }
            let idx = index(&pts);
            let c = cumulative_inflation(&rates_from_index(&idx).unwrap(), start, Compounding::Arithmetic).unwrap();
            prop_assert_eq!(c.values()[0], 1.0);
            prop_assert!(c.values().windows(2).all(|w| w[1] >= w[0]));
        }

        #[test]
        fn align_shares_year_set(
            ya in prop::collection::btree_set(1950i32..2000, 1..30),
            yb in prop::collection::btree_set(1950i32..2000, 1..30),
        ) {
            let a = index(&ya.iter().map(|&y| (y, 1.0)).collect::<Vec<_>>());
            let b = index(&yb.iter().map(|&y| (y, 2.0)).collect::<Vec<_>>());
            match align(&a, &b) {
                Ok((a2, b2)) => {
                    prop_assert_eq!(a2.years(), b2.years());
                    let expected: Vec<Year> = ya.intersection(&yb).copied().collect();
                    prop_assert_eq!(a2.years(), expected);
                }
                Err(Error::NoOverlap { .. }) => prop_assert!(ya.is_disjoint(&yb)),
                Err(e) => prop_assert!(false, "unexpected {e}"),
            }
        }
    }
}
