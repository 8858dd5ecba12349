use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use okun_core::breakdetect::BridgeMode;
use okun_core::okun::AnchorMode;
use okun_core::timeseries::{Compounding, Year};
use serde::de::DeserializeOwned;

use crate::config::RunConfig;

/// Parses a snake_case enum name the same way the config file does.
fn named<T: DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|e| e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "okun", version, about = "Piecewise Okun's law on real GDP per capita")]
pub struct Cli {
    /// TOML file with any RunConfig keys; flags given on the command line win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load every series of a manifest and report spans, gaps and unit checks.
    Validate(ValidateArgs),
    /// Find definitional breaks in CPI vs GDP deflator and fit the bridge.
    Detect(DetectArgs),
    /// Fit the piecewise model, with fixed breaks or a break search.
    Fit(FitArgs),
    /// Predict unemployment from a model file, annually or for bundled quarters.
    Predict(PredictArgs),
    /// Compare real GDP per capita series from several providers.
    Audit(AuditArgs),
    /// Generate a synthetic unemployment series from a model file.
    Synth(SynthArgs),
}

impl Command {
    pub fn apply(&self, cfg: &mut RunConfig) {
        match self {
            Command::Validate(a) => a.common.apply(cfg),
            Command::Detect(a) => a.apply(cfg),
            Command::Fit(a) => a.apply(cfg),
            Command::Predict(a) => a.apply(cfg),
            Command::Audit(a) => a.apply(cfg),
            Command::Synth(a) => a.apply(cfg),
        }
    }
}

macro_rules! set {
    ($cfg:ident, $args:ident, $($field:ident),+) => {
        $( if let Some(v) = &$args.$field { $cfg.$field = v.clone(); } )+
    };
}

macro_rules! set_opt {
    ($cfg:ident, $args:ident, $($field:ident),+) => {
        $( if let Some(v) = &$args.$field { $cfg.$field = Some(v.clone()); } )+
    };
}

#[derive(Debug, Args)]
pub struct Common {
    /// Country manifest (JSON).
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Directory for output files [default: out]
    #[arg(long = "out")]
    pub output_dir: Option<PathBuf>,
    /// Label used in reports and file names [default: manifest country]
    #[arg(long)]
    pub country: Option<String>,
}

impl Common {
    fn apply(&self, cfg: &mut RunConfig) {
        let a = self;
        set!(cfg, a, output_dir);
        set_opt!(cfg, a, manifest, country);
    }
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    #[command(flatten)]
    pub common: Common,
    /// Last year used [default: last common year of CPI and deflator]
    #[arg(long)]
    pub to: Option<Year>,
    /// Year where both cumulative curves equal 1 [default: manifest inflation_start]
    #[arg(long)]
    pub inflation_start: Option<Year>,
    /// arithmetic or geometric [default: arithmetic]
    #[arg(long, value_parser = named::<Compounding>)]
    pub compounding: Option<Compounding>,
    /// Most breaks considered [default: 3]
    #[arg(long)]
    pub max_breaks: Option<usize>,
    /// Shortest segment, years [default: 5]
    #[arg(long)]
    pub min_segment: Option<usize>,
    /// Relative RMS drop a further break must achieve [default: 0.02]
    #[arg(long)]
    pub min_improvement: Option<f64>,
    /// hinged or proportional [default: hinged]
    #[arg(long, value_parser = named::<BridgeMode>)]
    pub bridge_mode: Option<BridgeMode>,
    /// Bridge segment boundaries [default: detected breaks]
    #[arg(long, value_delimiter = ',')]
    pub bridge_breaks: Option<Vec<Year>>,
    /// Years given their own additive offset in the bridge [default: none]
    #[arg(long, value_delimiter = ',')]
    pub dummy_years: Option<Vec<Year>>,
    /// Add suggested dummy years and refit [default: false]
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub auto_dummies: Option<bool>,
    /// Residual size, in sigmas, that suggests a dummy year [default: 4]
    #[arg(long)]
    pub dummy_threshold: Option<f64>,
}

impl DetectArgs {
    fn apply(&self, cfg: &mut RunConfig) {
        self.common.apply(cfg);
        let a = self;
        set!(cfg, a, compounding, max_breaks, min_segment, min_improvement, bridge_mode, dummy_years, auto_dummies, dummy_threshold);
        set_opt!(cfg, a, to, inflation_start, bridge_breaks);
    }
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub common: Common,
    /// Unemployment series id [default: manifest role `unemployment`]
    #[arg(long)]
    pub unemployment: Option<String>,
    /// Real GDP per capita series id [default: manifest role `gdppc`]
    #[arg(long)]
    pub gdppc: Option<String>,
    /// First year fitted [default: first unemployment year]
    #[arg(long)]
    pub from: Option<Year>,
    /// Last year fitted [default: last unemployment year]
    #[arg(long)]
    pub to: Option<Year>,
    /// Fixed break years; each starts a new segment. Disables the search.
    #[arg(long, value_delimiter = ',')]
    pub breaks: Option<Vec<Year>>,
    /// Number of breaks to search for [default: number of candidates]
    #[arg(long)]
    pub n_breaks: Option<usize>,
    /// Candidate break years; the search looks within --search-radius of each [default: full grid]
    #[arg(long, value_delimiter = ',')]
    pub candidates: Option<Vec<Year>>,
    /// Shortest segment, years [default: 5]
    #[arg(long)]
    pub min_segment: Option<usize>,
    /// Window half-width around each candidate [default: 3]
    #[arg(long)]
    pub search_radius: Option<i32>,
    /// measured or chained [default: measured]
    #[arg(long, value_parser = named::<AnchorMode>)]
    pub anchor_mode: Option<AnchorMode>,
    /// Years left out of the secondary statistics [default: none]
    #[arg(long, value_delimiter = ',')]
    pub exclude_years: Option<Vec<Year>>,
}

impl FitArgs {
    fn apply(&self, cfg: &mut RunConfig) {
        self.common.apply(cfg);
        let a = self;
        set!(cfg, a, candidates, min_segment, search_radius, anchor_mode, exclude_years);
        set_opt!(cfg, a, unemployment, gdppc, from, to, breaks, n_breaks);
    }
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[command(flatten)]
    pub common: Common,
    /// Model file written by `fit`
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Real GDP per capita series id [default: manifest role `gdppc`]
    #[arg(long)]
    pub gdppc: Option<String>,
    /// Unemployment series id shown beside predictions [default: manifest role `unemployment`]
    #[arg(long)]
    pub unemployment: Option<String>,
    /// Years predicted past the model span with the last segment [default: 0]
    #[arg(long)]
    pub horizon: Option<usize>,
    /// Predict the manifest's quarterly growth series instead [default: false]
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub quarterly: Option<bool>,
    /// Unemployment in the quarter before the first growth quarter [default: measured value]
    #[arg(long)]
    pub u_start: Option<f64>,
}

impl PredictArgs {
    fn apply(&self, cfg: &mut RunConfig) {
        self.common.apply(cfg);
        let a = self;
        set!(cfg, a, horizon, quarterly);
        set_opt!(cfg, a, model, gdppc, unemployment, u_start);
    }
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    #[command(flatten)]
    pub common: Common,
    /// Normalization year [default: manifest ref_year]
    #[arg(long)]
    pub ref_year: Option<Year>,
    /// Series ids compared, in order [default: every real_gdp_pc series]
    #[arg(long, value_delimiter = ',')]
    pub sources: Option<Vec<String>>,
    /// Growth factors start here [default: ref_year]
    #[arg(long)]
    pub from: Option<Year>,
    /// Growth factors end here [default: last common year]
    #[arg(long)]
    pub to: Option<Year>,
    /// Also report each ratio trend from this year on [default: none]
    #[arg(long)]
    pub trend_from: Option<Year>,
}

impl AuditArgs {
    fn apply(&self, cfg: &mut RunConfig) {
        self.common.apply(cfg);
        let a = self;
        set!(cfg, a, sources);
        set_opt!(cfg, a, ref_year, from, to, trend_from);
    }
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[command(flatten)]
    pub common: Common,
    /// Model file written by `fit`
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Real GDP per capita series id driving the model [default: manifest role `gdppc`]
    #[arg(long)]
    pub gdppc: Option<String>,
    /// Standard deviation of Gaussian noise added to every year, percentage points [default: 0]
    #[arg(long)]
    pub noise: Option<f64>,
    /// RNG seed [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
}

impl SynthArgs {
    fn apply(&self, cfg: &mut RunConfig) {
        self.common.apply(cfg);
        let a = self;
        set!(cfg, a, noise, seed);
        set_opt!(cfg, a, model, gdppc);
    }
}
