use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Quarter {
    pub year: i32,
    /// 1..=4
    pub q: u8,
}

impl Quarter {
    pub fn new(year: i32, q: u8) -> Option<Self> {
        (1..=4).contains(&q).then_some(Quarter { year, q })
    }

    pub fn next(self) -> Quarter {
        if self.q == 4 {
            Quarter { year: self.year + 1, q: 1 }
        } else {
            Quarter { year: self.year, q: self.q + 1 }
        }
    }

    pub fn prev(self) -> Quarter {
        if self.q == 1 {
            Quarter { year: self.year - 1, q: 4 }
        } else {
            Quarter { year: self.year, q: self.q - 1 }
        }
    }
}

impl fmt::Display for Quarter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}Q{}", self.year, self.q)
    }
}

impl FromStr for Quarter {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let (y, q) = s
            .trim()
            .split_once(['Q', 'q'])
            .ok_or_else(|| format!("expected a quarter like 2020Q1, got {s:?}"))?;
        let year = y.parse().map_err(|_| format!("bad year in quarter {s:?}"))?;
        let q = q.parse().map_err(|_| format!("bad quarter number in {s:?}"))?;
        Quarter::new(year, q).ok_or_else(|| format!("quarter number must be 1-4 in {s:?}"))
    }
}

impl Serialize for Quarter {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuarterPoint {
    pub quarter: Quarter,
    pub value: f64,
}

/// A quarterly series of unemployment rates or growth rates. Quarters must
/// be strictly increasing; gaps are allowed here and rejected by consumers
/// that need contiguity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuarterlySeries {
    label: String,
    points: Vec<QuarterPoint>,
}

impl QuarterlySeries {
    pub fn new(label: impl Into<String>, points: impl IntoIterator<Item = (Quarter, f64)>) -> Result<Self> {
        let label = label.into();
        let points: Vec<QuarterPoint> = points
            .into_iter()
            .map(|(quarter, value)| QuarterPoint { quarter, value })
            .collect();
        for (i, p) in points.iter().enumerate() {
            if i > 0 && p.quarter <= points[i - 1].quarter {
                return Err(Error::Constraint(format!(
                    "{label}: quarter {} is duplicated or out of order",
                    p.quarter
                )));
            }
            if !p.value.is_finite() {
                return Err(Error::Constraint(format!("{label}: non-finite value in {}", p.quarter)));
            }
        }
        Ok(QuarterlySeries { label, points })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn points(&self) -> &[QuarterPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn get(&self, quarter: Quarter) -> Option<f64> {
        self.points
            .binary_search_by_key(&quarter, |p| p.quarter)
            .ok()
            .map(|i| self.points[i].value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quarter_parse_display_and_step() {
        let q: Quarter = "2020Q4".parse().unwrap();
        assert_eq!(q, Quarter { year: 2020, q: 4 });
        assert_eq!(q.next().to_string(), "2021Q1");
        assert_eq!(q.next().prev(), q);
        assert!("2020Q5".parse::<Quarter>().is_err());
        assert!("2020".parse::<Quarter>().is_err());
    }

    #[test]
    fn series_rejects_out_of_order() {
        let a = Quarter::new(2020, 2).unwrap();
        let b = Quarter::new(2020, 1).unwrap();
        assert!(QuarterlySeries::new("q", [(a, 1.0), (b, 2.0)]).is_err());
        assert!(QuarterlySeries::new("q", [(b, 1.0), (a, 2.0)]).is_ok());
    }
}
