//! Functional predictors from a truncated Karhunen–Loève expansion and
//! responses from the operator model `Y(t) = (T_β X)(t) + ε(t)`.

mod dataset;
mod kl;
pub mod seed;

pub use dataset::{generate_dataset, DataGenerator, Dataset, DATASET_SCHEMA_VERSION};
pub use kl::{draw_predictor, evaluate_predictor, KlProcess};

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Result of [`calibrate_noise`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseCalibration {
    pub sigma: f64,
    /// Set when the signal had zero pooled variance and `sigma` was forced to 0.
    pub zero_variance: bool,
}

/// Pooled (population) variance over every entry, mean removed.
pub fn pooled_variance(values: &DMatrix<f64>) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n
}

/// `σ = sqrt(pooled_variance(signal) / snr)`. An infinite `snr` gives `σ = 0`.
pub fn calibrate_noise(signal: &DMatrix<f64>, snr: f64) -> Result<NoiseCalibration> {
    if snr.is_nan() || snr <= 0.0 {
        return Err(Error::InvalidArgument(format!("snr must be positive, got {snr}")));
    }
    if signal.is_empty() {
        return Err(Error::InvalidArgument("signal is empty".into()));
    }
    let var = pooled_variance(signal);
    if var == 0.0 {
        return Ok(NoiseCalibration {
            sigma: 0.0,
            zero_variance: true,
        });
    }
    Ok(NoiseCalibration {
        sigma: (var / snr).sqrt(),
        zero_variance: false,
    })
}
