//! Synthetic control: Δ is a noisy linear function of isotropic Gaussian
//! features, so costs are exactly as predictable as a linear model allows.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::cost_model::CostedExample;
use crate::datasets::{CostSource, Dataset};
use crate::error::{Error, Result};
use crate::rng::{self, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SyntheticConfig {
    pub n: usize,
    pub dim: usize,
    /// Euclidean norm of the true weight vector.
    pub weight_norm: f64,
    /// Standard deviation of the additive Gaussian noise on Δ.
    pub noise_sigma: f64,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            n: 1000,
            dim: 50,
            weight_norm: 1.0,
            noise_sigma: 0.15,
            seed: 0,
        }
    }
}

impl SyntheticConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.dim == 0 {
            return Err(Error::invalid("synthetic n and dim must be at least 1"));
        }
        if !(self.weight_norm > 0.0 && self.weight_norm.is_finite()) {
            return Err(Error::invalid("synthetic weight_norm must be positive"));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(Error::invalid("synthetic noise_sigma must be non-negative"));
        }
        Ok(())
    }
}

/// Draws `(dataset, true_weights)`.
///
/// Stream order: the `dim` weight coordinates, then per example its `dim`
/// features followed by one noise draw. The weight vector is rescaled to
/// `weight_norm`.
pub fn generate(cfg: &SyntheticConfig) -> Result<(Dataset, Vec<f64>)> {
    cfg.validate()?;
    let mut rng = rng::stream(cfg.seed, Stream::Synthetic);
    let mut normal = || -> f64 { rng.sample(StandardNormal) };

    let mut w: Vec<f64> = (0..cfg.dim).map(|_| normal()).collect();
    let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
    w.iter_mut().for_each(|x| *x *= cfg.weight_norm / norm);

    let examples = (0..cfg.n)
        .map(|_| {
            let x: Vec<f64> = (0..cfg.dim).map(|_| normal()).collect();
            let signal: f64 = x.iter().zip(&w).map(|(a, b)| a * b).sum();
            let delta = signal + cfg.noise_sigma * normal();
            CostedExample::new(x, delta)
        })
        .collect::<Result<Vec<_>>>()?;
    let name = format!("synthetic-{}", cfg.seed);
    Ok((Dataset::with_dim(name, CostSource::Synthetic, cfg.dim, examples)?, w))
}
