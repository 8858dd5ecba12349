//! Annual and quarterly series with the growth, normalization and
//! cumulative-inflation primitives the estimators are built on.

mod ops;
mod quarterly;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use ops::{align, cumulative_inflation, log_growth, normalize, rates_from_index, Compounding};
pub use quarterly::{Quarter, QuarterlySeries};

pub type Year = i32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariableKind {
    UnemploymentRate,
    RealGdpPc,
    CpiIndex,
    DgdpIndex,
    InflationRate,
    /// Computed quantities such as residuals, differences and ratios.
    Derived,
}

impl VariableKind {
    pub fn as_str(self) -> &'static str {
        match self {
            VariableKind::UnemploymentRate => "unemployment_rate",
            VariableKind::RealGdpPc => "real_gdp_pc",
            VariableKind::CpiIndex => "cpi_index",
            VariableKind::DgdpIndex => "dgdp_index",
            VariableKind::InflationRate => "inflation_rate",
            VariableKind::Derived => "derived",
        }
    }
}

impl fmt::Display for VariableKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Unit {
    PercentPoints,
    IndexLevel,
    PercentPerYear,
    CurrencyPerCapita,
    Dimensionless,
}

impl Unit {
    pub fn as_str(self) -> &'static str {
        match self {
            Unit::PercentPoints => "percent_points",
            Unit::IndexLevel => "index_level",
            Unit::PercentPerYear => "percent_per_year",
            Unit::CurrencyPerCapita => "currency_per_capita",
            Unit::Dimensionless => "dimensionless",
        }
    }

    fn strictly_positive(self) -> bool {
        matches!(self, Unit::IndexLevel | Unit::CurrencyPerCapita)
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Point {
    pub year: Year,
    pub value: f64,
}

/// A calendar-year series. Construction validates ordering, finiteness and
/// the range implied by the variable kind and unit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnnualSeries {
    country: String,
    variable: VariableKind,
    unit: Unit,
    points: Vec<Point>,
}

impl AnnualSeries {
    pub fn new(
        country: impl Into<String>,
        variable: VariableKind,
        unit: Unit,
        points: impl IntoIterator<Item = (Year, f64)>,
    ) -> Result<Self> {
        let series = AnnualSeries {
            country: country.into(),
            variable,
            unit,
            points: points
                .into_iter()
                .map(|(year, value)| Point { year, value })
                .collect(),
        };
        series.validate()?;
        Ok(series)
    }

    fn validate(&self) -> Result<()> {
        let label = self.label();
        for (i, p) in self.points.iter().enumerate() {
            if i > 0 {
                let prev = self.points[i - 1].year;
                if p.year == prev {
                    return Err(Error::DuplicateYear {
                        series: label,
                        year: p.year,
                    });
                }
                if p.year < prev {
                    return Err(Error::UnorderedYears {
                        series: label,
                        year: p.year,
                    });
                }
            }
            if !p.value.is_finite() {
                return Err(Error::NonFinite {
                    series: label,
                    year: p.year,
                });
            }
            if self.variable == VariableKind::UnemploymentRate && !(0.0..100.0).contains(&p.value) {
                return Err(Error::OutOfRange {
                    series: label,
                    year: p.year,
                    value: p.value,
                    invariant: "unemployment_rate in [0, 100)",
                });
            }
            if self.unit.strictly_positive() && p.value <= 0.0 {
                return Err(Error::OutOfRange {
                    series: label,
                    year: p.year,
                    value: p.value,
                    invariant: "strictly positive index_level / currency_per_capita",
                });
            }
        }
        Ok(())
    }

    /// `country/variable`, used in error messages.
    pub fn label(&self) -> String {
        format!("{}/{}", self.country, self.variable)
    }

    pub fn country(&self) -> &str {
        &self.country
    }

    pub fn variable(&self) -> VariableKind {
        self.variable
    }

    pub fn unit(&self) -> Unit {
        self.unit
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn years(&self) -> Vec<Year> {
        self.points.iter().map(|p| p.year).collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.value).collect()
    }

    pub fn first_year(&self) -> Option<Year> {
        self.points.first().map(|p| p.year)
    }

    pub fn last_year(&self) -> Option<Year> {
        self.points.last().map(|p| p.year)
    }

    pub fn get(&self, year: Year) -> Option<f64> {
        self.points
            .binary_search_by_key(&year, |p| p.year)
            .ok()
            .map(|i| self.points[i].value)
    }

    pub fn require(&self, year: Year) -> Result<f64> {
        self.get(year).ok_or_else(|| Error::MissingYear {
            series: self.label(),
            year,
        })
    }

    pub fn contains(&self, year: Year) -> bool {
        self.get(year).is_some()
    }

    /// Years absent between the first and last observation.
    pub fn gaps(&self) -> Vec<Year> {
        self.points
            .windows(2)
            .flat_map(|w| (w[0].year + 1)..w[1].year)
            .collect()
    }

    pub fn is_contiguous(&self) -> bool {
        self.points.windows(2).all(|w| w[1].year == w[0].year + 1)
    }

    /// Fails with a gap error naming the first missing year.
    pub fn require_contiguous(&self) -> Result<()> {
        match self.gaps().first() {
            None => Ok(()),
            Some(y) => Err(Error::Gap {
                series: self.label(),
                missing: y.to_string(),
            }),
        }
    }

    /// Points with `from <= year <= to`.
    pub fn restrict(&self, from: Year, to: Year) -> AnnualSeries {
        self.filter(|y| y >= from && y <= to)
    }

    pub fn filter(&self, mut keep: impl FnMut(Year) -> bool) -> AnnualSeries {
        AnnualSeries {
            country: self.country.clone(),
            variable: self.variable,
            unit: self.unit,
            points: self.points.iter().copied().filter(|p| keep(p.year)).collect(),
        }
    }

    /// Same years, new values; the result is validated against the new kind.
    pub fn with_values(
        &self,
        variable: VariableKind,
        unit: Unit,
        values: impl IntoIterator<Item = f64>,
    ) -> Result<AnnualSeries> {
        AnnualSeries::new(
            self.country.clone(),
            variable,
            unit,
            self.points.iter().map(|p| p.year).zip(values),
        )
    }
}

/// Year-over-year log growth in percent per year, keyed by the later year.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthSeries {
    country: String,
    base: String,
    points: Vec<Point>,
    warnings: Vec<String>,
}

impl GrowthSeries {
    /// Builds a growth path directly, e.g. for simulation. Years must be
    /// strictly increasing and values finite.
    pub fn from_points(
        country: impl Into<String>,
        base: impl Into<String>,
        points: impl IntoIterator<Item = (Year, f64)>,
    ) -> Result<Self> {
        let country = country.into();
        let base = base.into();
        let points: Vec<Point> = points
            .into_iter()
            .map(|(year, value)| Point { year, value })
            .collect();
        for (i, p) in points.iter().enumerate() {
            if i > 0 && p.year <= points[i - 1].year {
                let series = format!("{country}/growth");
                return Err(if p.year == points[i - 1].year {
                    Error::DuplicateYear { series, year: p.year }
                } else {
                    Error::UnorderedYears { series, year: p.year }
                });
            }
            if !p.value.is_finite() {
                return Err(Error::NonFinite {
                    series: format!("{country}/growth"),
                    year: p.year,
                });
            }
        }
        Ok(GrowthSeries {
            country,
            base,
            points,
            warnings: Vec::new(),
        })
    }

    pub fn country(&self) -> &str {
        &self.country
    }

    /// Provenance of the level series the growth was derived from.
    pub fn base(&self) -> &str {
        &self.base
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn get(&self, year: Year) -> Option<f64> {
        self.points
            .binary_search_by_key(&year, |p| p.year)
            .ok()
            .map(|i| self.points[i].value)
    }

    pub fn require(&self, year: Year) -> Result<f64> {
        self.get(year).ok_or_else(|| Error::Gap {
            series: format!("{}/growth", self.country),
            missing: year.to_string(),
        })
    }

    pub fn label(&self) -> String {
        format!("{}/growth", self.country)
    }

    /// Pointwise sum of two growth paths over their common years.
    pub fn add(&self, other: &GrowthSeries) -> GrowthSeries {
        let points = self
            .points
            .iter()
            .filter_map(|p| other.get(p.year).map(|v| (p.year, p.value + v)));
        GrowthSeries {
            country: self.country.clone(),
            base: format!("{} + {}", self.base, other.base),
            points: points.map(|(year, value)| Point { year, value }).collect(),
            warnings: Vec::new(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unemployment(points: &[(Year, f64)]) -> Result<AnnualSeries> {
        AnnualSeries::new("X", VariableKind::UnemploymentRate, Unit::PercentPoints, points.iter().copied())
    }

    #[test]
    fn rejects_duplicate_and_unordered_years() {
        assert!(matches!(
            unemployment(&[(1990, 5.0), (1990, 5.1)]),
            Err(Error::DuplicateYear { year: 1990, .. })
        ));
        assert!(matches!(
            unemployment(&[(1991, 5.0), (1990, 5.1)]),
            Err(Error::UnorderedYears { year: 1990, .. })
        ));
    }

    #[test]
    fn unemployment_range_is_enforced() {
        assert!(unemployment(&[(2000, 0.0), (2001, 99.9)]).is_ok());
        let err = unemployment(&[(2000, 105.0)]).unwrap_err();
        assert!(err.to_string().contains("unemployment_rate in [0, 100)"), "{err}");
        assert!(unemployment(&[(2000, -0.1)]).is_err());
    }

    #[test]
    fn levels_must_be_positive_and_finite() {
        let level = |v: f64| {
            AnnualSeries::new("X", VariableKind::CpiIndex, Unit::IndexLevel, [(2000, v)])
        };
        assert!(level(0.0).is_err());
        assert!(level(f64::NAN).is_err());
        assert!(level(f64::INFINITY).is_err());
        assert!(level(1e-9).is_ok());
    }

    #[test]
    fn gaps_and_lookup() {
        let s = unemployment(&[(2000, 1.0), (2001, 2.0), (2004, 3.0)]).unwrap();
        assert_eq!(s.gaps(), vec![2002, 2003]);
        assert!(!s.is_contiguous());
        assert_eq!(s.get(2004), Some(3.0));
        assert_eq!(s.get(2002), None);
        assert!(matches!(s.require(2002), Err(Error::MissingYear { year: 2002, .. })));
        assert_eq!(s.restrict(2001, 2010).years(), vec![2001, 2004]);
    }
}
