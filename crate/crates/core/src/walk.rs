//! Prior realizations: 1D α-stable random walks and 2D lattice draws.

use rand::Rng;

use crate::error::{Error, Result};
use crate::field::{Grid1D, Lattice2D, Layout};
use crate::prior::{Boundary, PriorModel};
use crate::sampler::{scmh_run, Chain, Posterior, SamplerConfig};
use crate::stable::{sample_stable, StableParams};

/// Walk started at zero with iid `S_α(h^{1/α}, β, 0)` increments.
pub fn simulate_walk_1d<R: Rng + ?Sized>(
    alpha: f64,
    beta: f64,
    h: f64,
    n: usize,
    rng: &mut R,
) -> Result<Grid1D> {
    if n == 0 {
        return Err(Error::Size("a walk needs at least one point".into()));
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::domain("h", h, "step must be positive"));
    }
    let params = StableParams::new(alpha, beta, h.powf(1.0 / alpha), 0.0)?;
    let mut values = Vec::with_capacity(n);
    let mut x = 0.0;
    values.push(x);
    for _ in 1..n {
        x += sample_stable(&params, rng);
        values.push(x);
    }
    Grid1D::new(h, values)
}

/// Prior-only chain on an `nx × ny` lattice, started at zero. The prior's
/// boundary is forced to zero: with a free boundary the prior is improper.
pub fn prior_chain_2d(prior: &PriorModel, nx: usize, ny: usize, cfg: &SamplerConfig) -> Result<Chain> {
    let prior = PriorModel {
        boundary: Boundary::Zero,
        ..*prior
    };
    let post = Posterior::prior_only(prior, Layout::Grid { nx, ny })?;
    scmh_run(&post, &vec![0.0; nx * ny], cfg)
}

/// One approximate draw from the 2D prior: the last state of a prior-only
/// chain of `sweeps` sweeps, adapting proposals over the first half.
pub fn sample_prior_2d(
    prior: &PriorModel,
    nx: usize,
    ny: usize,
    sweeps: usize,
    seed: u64,
) -> Result<Lattice2D> {
    // about a hundred stored states, so the burn-in index (and with it the
    // adaptation phase) is not rounded away
    let cfg = SamplerConfig {
        sweeps,
        thin: (sweeps / 100).max(1),
        burn_in_fraction: 0.5,
        initial_sigma: prior.reg,
        seed,
        ..SamplerConfig::default()
    };
    let chain = prior_chain_2d(prior, nx, ny, &cfg)?;
    Lattice2D::new(nx, ny, prior.h, prior.h_prime, chain.final_state)
}
