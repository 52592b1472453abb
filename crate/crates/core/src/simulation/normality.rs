use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

pub const MIN_NORMALITY_SAMPLES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalityDiagnostics {
    pub skewness: f64,
    pub excess_kurtosis: f64,
    /// Kolmogorov-Smirnov distance of the standardized samples to N(0, 1).
    pub ks_distance: f64,
}

/// Shape diagnostics of samples standardized by their mean and SD.
pub fn normality_diagnostics(samples: &[f64]) -> Result<NormalityDiagnostics> {
    if samples.len() < MIN_NORMALITY_SAMPLES {
        return Err(Error::invalid(format!(
            "normality diagnostics need at least {MIN_NORMALITY_SAMPLES} samples, got {}",
            samples.len()
        )));
    }
    let r = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / r;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (r - 1.0);
    if !(var > 0.0) || !var.is_finite() {
        return Err(Error::Degenerate("samples have zero variance".into()));
    }
    let sd = var.sqrt();
    let mut z: Vec<f64> = samples.iter().map(|x| (x - mean) / sd).collect();
    let skewness = z.iter().map(|v| v.powi(3)).sum::<f64>() / r;
    let excess_kurtosis = z.iter().map(|v| v.powi(4)).sum::<f64>() / r - 3.0;

    z.sort_by(f64::total_cmp);
    let normal = Normal::standard();
    let ks_distance = z
        .iter()
        .enumerate()
        .map(|(k, &v)| {
            let f = normal.cdf(v);
            (f - k as f64 / r).max((k + 1) as f64 / r - f)
        })
        .fold(0.0, f64::max);
    Ok(NormalityDiagnostics {
        skewness,
        excess_kurtosis,
        ks_distance,
    })
}
