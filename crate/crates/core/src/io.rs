//! CSV snapshots and per-country manifests.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::timeseries::{AnnualSeries, Quarter, QuarterlySeries, Unit, VariableKind, Year};

fn open(path: &Path) -> Result<csv::Reader<fs::File>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(file))
}

fn check_header(reader: &mut csv::Reader<fs::File>, path: &Path, key: &str) -> Result<()> {
    let header = reader.headers().map_err(|e| Error::Parse {
        file: path.into(),
        line: 1,
        message: e.to_string(),
    })?;
    let cols: Vec<String> = header.iter().map(|h| h.to_ascii_lowercase()).collect();
    if cols != [key, "value"] {
        return Err(Error::Parse {
            file: path.into(),
            line: 1,
            message: format!("expected header `{key},value`, found `{}`", cols.join(",")),
        });
    }
    Ok(())
}

/// Rows as `(line, key, value)` with the key still unparsed.
fn rows(path: &Path, key: &str) -> Result<Vec<(usize, String, f64)>> {
    let mut reader = open(path)?;
    check_header(&mut reader, path, key)?;
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse {
            file: path.into(),
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let bad = |message: String| Error::Parse {
            file: path.into(),
            line,
            message,
        };
        if record.len() != 2 {
            return Err(bad(format!("expected 2 fields, found {}", record.len())));
        }
        let value: f64 = record[1]
            .parse()
            .map_err(|_| bad(format!("`{}` is not a number", &record[1])))?;
        out.push((line, record[0].to_string(), value));
    }
    Ok(out)
}

/// Reads a `year,value` file and validates it as a series of the given
/// kind. Errors carry the file name and line.
pub fn read_annual_csv(path: &Path, country: &str, variable: VariableKind, unit: Unit) -> Result<AnnualSeries> {
    let mut points = Vec::new();
    let mut line_of: HashMap<Year, usize> = HashMap::new();
    for (line, key, value) in rows(path, "year")? {
        let year: Year = key.parse().map_err(|_| Error::Parse {
            file: path.into(),
            line,
            message: format!("`{key}` is not a year"),
        })?;
        if let Some(first) = line_of.insert(year, line) {
            return Err(Error::Parse {
                file: path.into(),
                line,
                message: format!("duplicate year {year} (first on line {first})"),
            });
        }
        points.push((year, value));
    }
    AnnualSeries::new(country, variable, unit, points).map_err(|e| match e.year().and_then(|y| line_of.get(&y)) {
        Some(&line) => Error::AtLine {
            file: path.into(),
            line,
            source: Box::new(e),
        },
        None => e,
    })
}

/// Reads a `quarter,value` file with quarters written like `2020Q1`.
pub fn read_quarterly_csv(path: &Path, label: &str) -> Result<QuarterlySeries> {
    let mut points = Vec::new();
    for (line, key, value) in rows(path, "quarter")? {
        let quarter: Quarter = key.parse().map_err(|message| Error::Parse {
            file: path.into(),
            line,
            message,
        })?;
        if points.last().is_some_and(|&(q, _): &(Quarter, f64)| quarter <= q) {
            return Err(Error::Parse {
                file: path.into(),
                line,
                message: format!("quarter {quarter} is duplicated or out of order"),
            });
        }
        points.push((quarter, value));
    }
    QuarterlySeries::new(label, points)
}

/// `year,value` text with shortest round-trip float formatting.
pub fn annual_csv(series: &AnnualSeries) -> String {
    let mut out = String::from("year,value\n");
    for p in series.points() {
        let _ = writeln!(out, "{},{}", p.year, p.value);
    }
    out
}

pub fn quarterly_csv(series: &QuarterlySeries) -> String {
    let mut out = String::from("quarter,value\n");
    for p in series.points() {
        let _ = writeln!(out, "{},{}", p.quarter, p.value);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesEntry {
    pub id: String,
    pub file: PathBuf,
    pub variable: VariableKind,
    pub unit: Unit,
    pub source: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuarterlyKind {
    UnemploymentRate,
    GrowthAnnualized,
    GrowthQuarterly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuarterlyEntry {
    pub id: String,
    pub file: PathBuf,
    pub kind: QuarterlyKind,
    pub source: String,
}

/// One country's bundle of series files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub country: String,
    #[serde(default)]
    pub ref_year: Option<Year>,
    /// First year of the cumulative inflation curves.
    #[serde(default)]
    pub inflation_start: Option<Year>,
    pub series: Vec<SeriesEntry>,
    #[serde(default)]
    pub quarterly: Vec<QuarterlyEntry>,
    /// Which series id plays which part in a fit or detection run
    /// (`unemployment`, `gdppc`, `cpi`, `dgdp`).
    #[serde(default)]
    pub roles: BTreeMap<String, String>,
    /// Directory the file paths are relative to.
    #[serde(skip)]
    pub dir: PathBuf,
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut m: Manifest = serde_json::from_str(&text).map_err(|e| Error::Parse {
            file: path.into(),
            line: e.line(),
            message: e.to_string(),
        })?;
        m.dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        let mut seen = BTreeMap::new();
        for id in m.series.iter().map(|s| &s.id).chain(m.quarterly.iter().map(|q| &q.id)) {
            if seen.insert(id.clone(), ()).is_some() {
                return Err(Error::Manifest {
                    path: path.into(),
                    message: format!("series id `{id}` is listed twice"),
                });
            }
        }
        for (role, id) in &m.roles {
            if !seen.contains_key(id) {
                return Err(Error::Manifest {
                    path: path.into(),
                    message: format!("role `{role}` refers to unknown series `{id}`"),
                });
            }
        }
        Ok(m)
    }

    pub fn entry(&self, id: &str) -> Result<&SeriesEntry> {
        self.series.iter().find(|s| s.id == id).ok_or_else(|| Error::Manifest {
            path: self.dir.join("manifest.json"),
            message: format!("no series `{id}`"),
        })
    }

    pub fn quarterly_entry(&self, id: &str) -> Result<&QuarterlyEntry> {
        self.quarterly.iter().find(|s| s.id == id).ok_or_else(|| Error::Manifest {
            path: self.dir.join("manifest.json"),
            message: format!("no quarterly series `{id}`"),
        })
    }

    /// The series id bound to `role`, e.g. `"unemployment"`.
    pub fn role(&self, role: &str) -> Result<&str> {
        self.roles.get(role).map(String::as_str).ok_or_else(|| Error::Manifest {
            path: self.dir.join("manifest.json"),
            message: format!("no series is assigned the `{role}` role"),
        })
    }

    pub fn path_of(&self, file: &Path) -> PathBuf {
        self.dir.join(file)
    }

    pub fn load_series(&self, id: &str) -> Result<AnnualSeries> {
        let e = self.entry(id)?;
        read_annual_csv(&self.path_of(&e.file), &self.country, e.variable, e.unit)
    }

    pub fn load_role(&self, role: &str) -> Result<AnnualSeries> {
        self.load_series(self.role(role)?)
    }

    pub fn load_quarterly(&self, id: &str) -> Result<QuarterlySeries> {
        let e = self.quarterly_entry(id)?;
        read_quarterly_csv(&self.path_of(&e.file), &format!("{}/{}", self.country, e.id))
    }

    /// The first quarterly series of the given kind.
    pub fn quarterly_of_kind(&self, kind: QuarterlyKind) -> Option<&QuarterlyEntry> {
        self.quarterly.iter().find(|q| q.kind == kind)
    }
}
