use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{predict_values, PiecewiseOkun};
use crate::error::{Error, Result};
use crate::timeseries::{AnnualSeries, GrowthSeries, Unit, VariableKind};

/// The model's prediction plus independent `N(0, noise_sigma²)` noise drawn
/// from a ChaCha8 stream seeded with `seed`.
pub fn synthesize(model: &PiecewiseOkun, growth: &GrowthSeries, noise_sigma: f64, seed: u64) -> Result<AnnualSeries> {
    if !(noise_sigma >= 0.0 && noise_sigma.is_finite()) {
        return Err(Error::Constraint(format!("noise sigma must be finite and non-negative, got {noise_sigma}")));
    }
    let mut values = predict_values(model, growth)?;
    if noise_sigma > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, noise_sigma).expect("validated sigma");
        for (_, v) in values.iter_mut() {
            *v += normal.sample(&mut rng);
        }
    }
    AnnualSeries::new(growth.country(), VariableKind::UnemploymentRate, Unit::PercentPoints, values)
}
