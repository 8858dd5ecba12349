//! Provenance and output-file plumbing shared by the subcommands.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use okun_core::io::Manifest;
use okun_core::timeseries::AnnualSeries;
use okun_core::Error;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub config_sha256: String,
    /// Input path as given, mapped to the sha256 of its bytes.
    pub inputs: BTreeMap<String, String>,
}

/// Records every file a command reads.
#[derive(Debug, Default)]
pub struct Inputs(BTreeMap<String, String>);

impl Inputs {
    pub fn add(&mut self, path: &Path) -> Result<(), Error> {
        let bytes = fs::read(path).map_err(|e| Error::Io {
            path: path.into(),
            source: e,
        })?;
        self.0.insert(path.display().to_string(), hex::encode(Sha256::digest(&bytes)));
        Ok(())
    }

    pub fn provenance(self, cfg: &RunConfig) -> Provenance {
        Provenance {
            config_sha256: hex::encode(Sha256::digest(cfg.canonical_json().as_bytes())),
            inputs: self.0,
        }
    }
}

/// A loaded manifest that records the files it hands out.
pub struct Bundle {
    pub manifest: Manifest,
    pub inputs: Inputs,
}

impl Bundle {
    pub fn open(cfg: &RunConfig) -> Result<Self, Error> {
        let path = cfg.manifest_path()?;
        let manifest = Manifest::load(path)?;
        let mut inputs = Inputs::default();
        inputs.add(path)?;
        Ok(Bundle { manifest, inputs })
    }

    /// Series `id`, or the series bound to `role` when `id` is `None`.
    pub fn series(&mut self, id: Option<&str>, role: &str) -> Result<(String, AnnualSeries), Error> {
        let id = match id {
            Some(id) => id.to_string(),
            None => self.manifest.role(role)?.to_string(),
        };
        let entry = self.manifest.entry(&id)?;
        self.inputs.add(&self.manifest.path_of(&entry.file))?;
        Ok((id.clone(), self.manifest.load_series(&id)?))
    }

    pub fn country(&self, cfg: &RunConfig) -> String {
        cfg.country.clone().unwrap_or_else(|| self.manifest.country.clone())
    }
}

/// Lowercase alphanumeric file-name stem for a country label.
pub fn slug(country: &str) -> String {
    let s: String = country
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c.to_ascii_lowercase() } else { '_' })
        .collect();
    if s.is_empty() {
        "run".into()
    } else {
        s
    }
}

pub struct Output {
    dir: PathBuf,
    stem: String,
}

impl Output {
    pub fn new(cfg: &RunConfig, country: &str) -> Result<Self, Error> {
        fs::create_dir_all(&cfg.output_dir).map_err(|e| Error::Io {
            path: cfg.output_dir.clone(),
            source: e,
        })?;
        Ok(Output {
            dir: cfg.output_dir.clone(),
            stem: slug(country),
        })
    }

    pub fn write(&self, suffix: &str, contents: &str) -> Result<PathBuf, Error> {
        let path = self.dir.join(format!("{}_{suffix}", self.stem));
        fs::write(&path, contents).map_err(|e| Error::Io {
            path: path.clone(),
            source: e,
        })?;
        println!("wrote {}", path.display());
        Ok(path)
    }

    pub fn write_json<T: Serialize>(&self, suffix: &str, value: &T) -> Result<PathBuf, Error> {
        let mut text = serde_json::to_string_pretty(value).expect("report serializes");
        text.push('\n');
        self.write(suffix, &text)
    }
}

/// Comma-separated cell; empty when absent.
pub fn cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}
