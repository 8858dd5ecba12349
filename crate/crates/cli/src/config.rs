use std::fs;
use std::path::{Path, PathBuf};

use okun_core::breakdetect::BridgeMode;
use okun_core::okun::AnchorMode;
use okun_core::timeseries::{Compounding, Year};
use okun_core::Error;
use serde::{Deserialize, Serialize};

/// Every tunable of every subcommand. Values come from the built-in
/// defaults, then an optional TOML file, then command-line flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub country: Option<String>,
    pub manifest: Option<PathBuf>,
    pub output_dir: PathBuf,

    // series selection and span
    pub unemployment: Option<String>,
    pub gdppc: Option<String>,
    pub from: Option<Year>,
    pub to: Option<Year>,

    // break detection and bridge
    pub max_breaks: usize,
    pub min_improvement: f64,
    pub inflation_start: Option<Year>,
    pub compounding: Compounding,
    pub bridge_mode: BridgeMode,
    pub bridge_breaks: Option<Vec<Year>>,
    pub dummy_years: Vec<Year>,
    pub auto_dummies: bool,
    pub dummy_threshold: f64,

    // fit and search
    pub breaks: Option<Vec<Year>>,
    pub n_breaks: Option<usize>,
    pub candidates: Vec<Year>,
    pub min_segment: usize,
    pub search_radius: i32,
    pub anchor_mode: AnchorMode,
    pub exclude_years: Vec<Year>,

    // prediction and simulation
    pub model: Option<PathBuf>,
    pub horizon: usize,
    pub quarterly: bool,
    pub u_start: Option<f64>,
    pub noise: f64,
    pub seed: u64,

    // source audit
    pub ref_year: Option<Year>,
    pub sources: Vec<String>,
    pub trend_from: Option<Year>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            country: None,
            manifest: None,
            output_dir: PathBuf::from("out"),
            unemployment: None,
            gdppc: None,
            from: None,
            to: None,
            max_breaks: 3,
            min_improvement: 0.02,
            inflation_start: None,
            compounding: Compounding::Arithmetic,
            bridge_mode: BridgeMode::Hinged,
            bridge_breaks: None,
            dummy_years: Vec::new(),
            auto_dummies: false,
            dummy_threshold: 4.0,
            breaks: None,
            n_breaks: None,
            candidates: Vec::new(),
            min_segment: 5,
            search_radius: 3,
            anchor_mode: AnchorMode::Measured,
            exclude_years: Vec::new(),
            model: None,
            horizon: 0,
            quarterly: false,
            u_start: None,
            noise: 0.0,
            seed: 0,
            ref_year: None,
            sources: Vec::new(),
            trend_from: None,
        }
    }
}

fn missing(flag: &str, key: &str) -> Error {
    Error::Manifest {
        path: PathBuf::from(flag),
        message: format!("required; pass {flag} or set `{key}` in the config file"),
    }
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, Error> {
        let Some(path) = path else {
            return Ok(RunConfig::default());
        };
        let text = fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.into(),
            source: e,
        })?;
        toml::from_str(&text).map_err(|e| {
            let line = e
                .span()
                .map_or(0, |s| text[..s.start.min(text.len())].lines().count().max(1));
            Error::Parse {
                file: path.into(),
                line,
                message: e.message().to_string(),
            }
        })
    }

    /// Stable JSON rendering used for the config digest.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn manifest_path(&self) -> Result<&Path, Error> {
        self.manifest
            .as_deref()
            .ok_or_else(|| missing("--manifest", "manifest"))
    }

    pub fn model_path(&self) -> Result<&Path, Error> {
        self.model
            .as_deref()
            .ok_or_else(|| missing("--model", "model"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_overrides_defaults() {
        let c: RunConfig = toml::from_str("breaks = [1979, 2010]\nanchor_mode = \"chained\"\nmin_segment = 7\n").unwrap();
        assert_eq!(c.breaks, Some(vec![1979, 2010]));
        assert_eq!(c.anchor_mode, AnchorMode::Chained);
        assert_eq!(c.min_segment, 7);
        assert_eq!(c.search_radius, 3);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<RunConfig>("brakes = [1979]\n").is_err());
    }

    #[test]
    fn canonical_json_is_stable() {
        assert_eq!(RunConfig::default().canonical_json(), RunConfig::default().canonical_json());
        assert!(RunConfig::default().canonical_json().starts_with("{\"country\":null,\"manifest\":null"));
    }
}
