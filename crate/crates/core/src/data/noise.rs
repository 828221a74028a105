//! Pixel-space perturbations of keyedge heights.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::KeyedgeObservation;

/// Perturbed heights never drop below this many pixels.
pub const MIN_HEIGHT_PX: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseModel {
    #[default]
    None,
    /// Independent zero-mean Gaussian noise on each height.
    GaussianHeight { sigma_px: f64 },
    /// Heights rounded to the nearest multiple of the quantum.
    PixelQuantization { quantum_px: f64 },
}

impl NoiseModel {
    pub fn validate(&self) -> Result<()> {
        let value = match *self {
            NoiseModel::None => return Ok(()),
            NoiseModel::GaussianHeight { sigma_px } => sigma_px,
            NoiseModel::PixelQuantization { quantum_px } => quantum_px,
        };
        if value >= 0.0 && value.is_finite() {
            Ok(())
        } else {
            Err(Error::Config(format!("noise parameter {value} must be >= 0")))
        }
    }

    /// Standard deviation of the height error in pixels. Quantization is
    /// treated as uniform noise over one quantum.
    pub fn sigma_px(&self) -> f64 {
        match *self {
            NoiseModel::None => 0.0,
            NoiseModel::GaussianHeight { sigma_px } => sigma_px,
            NoiseModel::PixelQuantization { quantum_px } => quantum_px / 12f64.sqrt(),
        }
    }
}

pub fn perturb_heights_with_rng<R: Rng + ?Sized>(
    obs: &KeyedgeObservation,
    noise: &NoiseModel,
    rng: &mut R,
) -> KeyedgeObservation {
    let mut out = *obs;
    match *noise {
        NoiseModel::None => return out,
        NoiseModel::GaussianHeight { sigma_px } => {
            // sigma was validated; a non-finite one degrades to no noise
            if let Ok(normal) = Normal::new(0.0, sigma_px) {
                for edge in &mut out.edges {
                    edge.height += normal.sample(rng);
                }
            }
        }
        NoiseModel::PixelQuantization { quantum_px } => {
            if quantum_px > 0.0 {
                for edge in &mut out.edges {
                    edge.height = (edge.height / quantum_px).round() * quantum_px;
                }
            }
        }
    }
    for edge in &mut out.edges {
        edge.height = edge.height.max(MIN_HEIGHT_PX);
    }
    out
}

/// Deterministic for a given `seed`.
pub fn perturb_heights(obs: &KeyedgeObservation, noise: &NoiseModel, seed: u64) -> KeyedgeObservation {
    perturb_heights_with_rng(obs, noise, &mut ChaCha8Rng::seed_from_u64(seed))
}
