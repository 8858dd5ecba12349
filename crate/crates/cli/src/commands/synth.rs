use okun_core::io::annual_csv;
use okun_core::okun::synthesize;
use okun_core::timeseries::log_growth;
use okun_core::Error;

use super::predict::load_model;
use crate::config::RunConfig;
use crate::report::{Bundle, Output};

pub fn run(cfg: &RunConfig) -> Result<(), Error> {
    let model_path = cfg.model_path()?;
    let (file, model) = load_model(model_path)?;
    let mut bundle = Bundle::open(cfg)?;
    let (_, gdp) = bundle.series(cfg.gdppc.as_deref(), "gdppc")?;
    let u = synthesize(&model, &log_growth(&gdp)?, cfg.noise, cfg.seed)?;
    println!(
        "synthesized {}-{} with noise {} (seed {})",
        model.first_year(),
        model.last_year(),
        cfg.noise,
        cfg.seed
    );
    let country = cfg.country.clone().unwrap_or(file.country);
    Output::new(cfg, &country)?.write("synth.csv", &annual_csv(&u))?;
    Ok(())
}
