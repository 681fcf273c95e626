//! The experiment drivers behind each subcommand.

mod deconvolution;
mod realizations;
mod tomography;

pub use deconvolution::{interpolate_to, run_deconvolution};
pub use realizations::run_prior_realizations;
pub use tomography::{run_tomography, TomoMode};

use cauchy_prior::sampler::{split_half_cm, Chain};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent generator for one purpose within a run.
pub(crate) fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// `‖a − b‖₂ / ‖b‖₂`.
pub fn relative_l2(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
    let den: f64 = b.iter().map(|y| y * y).sum();
    (num / den).sqrt()
}

pub fn rmse(a: &[f64], b: &[f64]) -> f64 {
    let sum: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
    (sum / a.len() as f64).sqrt()
}

/// Post-burn-in acceptance and mixing summary of one chain.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ChainSummary {
    pub mean_rate: f64,
    pub min_rate: f64,
    pub max_rate: f64,
    /// RMS difference between the CMs of the two halves of the retained
    /// samples.
    pub split_half: f64,
}

impl ChainSummary {
    pub fn of(chain: &Chain) -> cauchy_prior::Result<Self> {
        let rates = chain.acceptance_rates();
        let (min_rate, max_rate) = crate::output::value_range(&rates);
        let (a, b) = split_half_cm(chain)?;
        Ok(Self {
            mean_rate: chain.overall_acceptance(),
            min_rate,
            max_rate,
            split_half: rmse(&a, &b),
        })
    }
}
