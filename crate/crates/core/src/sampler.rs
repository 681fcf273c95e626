//! Single-component Metropolis–Hastings over `D(X | m) ∝ D(X) D(m | X)`.
//!
//! Each sweep visits every site once and proposes
//! `X̃_i ∼ N(X_i, σ_i²)`. The proposal is symmetric, so a move is accepted
//! with probability `min(1, exp(Δ log-posterior))`. The change in
//! log-posterior is assembled from the increments touching the site and the
//! residual entries in the site's operator column, so a move costs
//! `O(nnz(column))`.
//!
//! Proposal scales are adapted every `adapt_interval` sweeps during burn-in
//! toward a 25–50 % acceptance band and frozen afterwards.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::field::Layout;
use crate::forward::NoiseModel;
use crate::operator::SparseOperator;
use crate::prior::{BoundPrior, PriorModel};

mod checkpoint;

pub use checkpoint::Checkpoint;

/// Gaussian likelihood `−½ σ⁻² ‖m − A x‖²`.
#[derive(Debug, Clone)]
pub struct GaussianLikelihood {
    pub operator: SparseOperator,
    pub data: Vec<f64>,
    pub noise: NoiseModel,
}

/// Unnormalized posterior. Either factor may be switched off: a prior-only
/// posterior samples the prior, a likelihood-only one has a flat prior.
#[derive(Debug, Clone)]
pub struct Posterior {
    likelihood: Option<GaussianLikelihood>,
    prior: Option<PriorModel>,
    bound: Option<BoundPrior>,
    layout: Layout,
}

impl Posterior {
    pub fn new(
        operator: SparseOperator,
        data: Vec<f64>,
        noise: NoiseModel,
        prior: PriorModel,
        layout: Layout,
    ) -> Result<Self> {
        Self::build(
            Some(GaussianLikelihood {
                operator,
                data,
                noise,
            }),
            Some(prior),
            layout,
        )
    }

    pub fn prior_only(prior: PriorModel, layout: Layout) -> Result<Self> {
        Self::build(None, Some(prior), layout)
    }

    pub fn likelihood_only(
        operator: SparseOperator,
        data: Vec<f64>,
        noise: NoiseModel,
        layout: Layout,
    ) -> Result<Self> {
        Self::build(
            Some(GaussianLikelihood {
                operator,
                data,
                noise,
            }),
            None,
            layout,
        )
    }

    fn build(
        likelihood: Option<GaussianLikelihood>,
        prior: Option<PriorModel>,
        layout: Layout,
    ) -> Result<Self> {
        if layout.is_empty() {
            return Err(Error::Size("posterior over an empty layout".into()));
        }
        if let Some(lik) = &likelihood {
            if lik.operator.n_cols() != layout.len() {
                return Err(Error::Dimension {
                    what: "operator columns vs layout",
                    expected: layout.len(),
                    actual: lik.operator.n_cols(),
                });
            }
            if lik.operator.n_rows() != lik.data.len() {
                return Err(Error::Dimension {
                    what: "operator rows vs data",
                    expected: lik.operator.n_rows(),
                    actual: lik.data.len(),
                });
            }
            NoiseModel::new(lik.noise.stddev)?;
        }
        let bound = prior.as_ref().map(|p| p.bind(layout)).transpose()?;
        Ok(Self {
            likelihood,
            prior,
            bound,
            layout,
        })
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn len(&self) -> usize {
        self.layout.len()
    }

    pub fn is_empty(&self) -> bool {
        self.layout.is_empty()
    }

    pub fn prior(&self) -> Option<&PriorModel> {
        self.prior.as_ref()
    }

    pub fn bound_prior(&self) -> Option<&BoundPrior> {
        self.bound.as_ref()
    }

    pub fn likelihood(&self) -> Option<&GaussianLikelihood> {
        self.likelihood.as_ref()
    }

    fn check_len(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.len() {
            return Err(Error::Dimension {
                what: "state vs layout",
                expected: self.len(),
                actual: x.len(),
            });
        }
        Ok(())
    }

    /// `m − A x`; empty without a likelihood.
    pub fn residual(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_len(x)?;
        Ok(match &self.likelihood {
            None => Vec::new(),
            Some(lik) => {
                let ax = lik.operator.apply(x)?;
                lik.data.iter().zip(&ax).map(|(m, a)| m - a).collect()
            }
        })
    }

    pub fn log_likelihood(&self, x: &[f64]) -> Result<f64> {
        let res = self.residual(x)?;
        Ok(self.log_likelihood_from_residual(&res))
    }

    fn log_likelihood_from_residual(&self, residual: &[f64]) -> f64 {
        match &self.likelihood {
            None => 0.0,
            Some(lik) => {
                let s2 = lik.noise.stddev * lik.noise.stddev;
                -0.5 * residual.iter().map(|r| r * r).sum::<f64>() / s2
            }
        }
    }

    pub fn log_prior(&self, x: &[f64]) -> Result<f64> {
        self.check_len(x)?;
        Ok(self.bound.as_ref().map_or(0.0, |b| b.log_prior(x)))
    }

    pub fn log_posterior(&self, x: &[f64]) -> Result<f64> {
        Ok(self.log_likelihood(x)? + self.log_prior(x)?)
    }
}

/// Change to the residual when `x[site] += delta`.
#[derive(Debug, Clone, Copy)]
pub struct ResidualUpdate<'a> {
    rows: &'a [usize],
    values: &'a [f64],
    delta: f64,
}

impl ResidualUpdate<'_> {
    /// `(row, new residual value)` pairs to write back on acceptance.
    pub fn entries<'r>(&'r self, residual: &'r [f64]) -> impl Iterator<Item = (usize, f64)> + 'r {
        self.rows
            .iter()
            .zip(self.values)
            .map(move |(&r, &v)| (r, residual[r] - v * self.delta))
    }

    pub fn commit(&self, residual: &mut [f64]) {
        for (&r, &v) in self.rows.iter().zip(self.values) {
            residual[r] -= v * self.delta;
        }
    }
}

/// Change in log-likelihood when `x[site] += delta`, from the cached
/// residual `m − A x`:
/// `−(1/2σ²) Σ_{(r,v) ∈ column} ((res_r − v·delta)² − res_r²)`.
pub fn delta_log_likelihood<'a>(
    residual: &[f64],
    op: &'a SparseOperator,
    site: usize,
    delta: f64,
    noise: &NoiseModel,
) -> Result<(f64, ResidualUpdate<'a>)> {
    if site >= op.n_cols() {
        return Err(Error::Index {
            index: site,
            len: op.n_cols(),
        });
    }
    if residual.len() != op.n_rows() {
        return Err(Error::Dimension {
            what: "residual vs operator rows",
            expected: op.n_rows(),
            actual: residual.len(),
        });
    }
    let (rows, values) = op.column(site);
    let value = column_delta(residual, rows, values, delta, noise.stddev);
    Ok((value, ResidualUpdate { rows, values, delta }))
}

#[inline]
fn column_delta(residual: &[f64], rows: &[usize], values: &[f64], delta: f64, stddev: f64) -> f64 {
    // (r − vδ)² − r² = vδ(vδ − 2r)
    let mut acc = 0.0;
    for (&r, &v) in rows.iter().zip(values) {
        let vd = v * delta;
        acc += vd * (vd - 2.0 * residual[r]);
    }
    -0.5 * acc / (stddev * stddev)
}

/// Random-walk proposal `N(current, σ²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianProposal {
    pub sigma: f64,
}

impl GaussianProposal {
    pub fn sample<R: Rng + ?Sized>(&self, current: f64, rng: &mut R) -> f64 {
        current + self.sigma * rng.sample::<f64, _>(StandardNormal)
    }

    /// `log q(to | from)`.
    pub fn log_density(&self, from: f64, to: f64) -> f64 {
        let z = (to - from) / self.sigma;
        -0.5 * z * z - self.sigma.ln() - 0.5 * (2.0 * std::f64::consts::PI).ln()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanOrder {
    Raster,
    /// A fresh random permutation every sweep.
    RandomPermutation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamplerConfig {
    pub sweeps: usize,
    /// Keep every `thin`-th post-sweep state.
    pub thin: usize,
    pub burn_in_fraction: f64,
    /// Sweeps between proposal adaptations during burn-in.
    pub adapt_interval: usize,
    pub initial_sigma: f64,
    /// Acceptance band the burn-in adaptation steers toward. Narrower than
    /// the 25–50 % required afterwards, leaving room for estimation noise.
    pub adapt_band: [f64; 2],
    pub scan: ScanOrder,
    /// Sweeps between from-scratch residual and log-posterior checks.
    pub check_interval: usize,
    pub seed: u64,
    /// ChaCha stream; lets independent chains share one seed.
    pub stream: u64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            sweeps: 10_000,
            thin: 10,
            burn_in_fraction: 0.5,
            adapt_interval: 50,
            initial_sigma: 0.1,
            adapt_band: [0.3, 0.45],
            scan: ScanOrder::Raster,
            check_interval: 1000,
            seed: 0,
            stream: 0,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.sweeps == 0 {
            return Err(Error::Size("sampler needs at least one sweep".into()));
        }
        if self.thin == 0 {
            return Err(Error::Size("thinning stride must be positive".into()));
        }
        if self.adapt_interval == 0 || self.check_interval == 0 {
            return Err(Error::Size("adapt and check intervals must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.burn_in_fraction) {
            return Err(Error::domain(
                "burn_in_fraction",
                self.burn_in_fraction,
                "must lie in [0, 1)",
            ));
        }
        let [lo, hi] = self.adapt_band;
        if !(0.0 < lo && lo < hi && hi < 1.0) {
            return Err(Error::domain("adapt_band", lo, "needs 0 < low < high < 1"));
        }
        if !(self.initial_sigma > 0.0 && self.initial_sigma.is_finite()) {
            return Err(Error::domain(
                "initial_sigma",
                self.initial_sigma,
                "must be positive",
            ));
        }
        Ok(())
    }

    pub fn stored_count(&self) -> usize {
        self.sweeps / self.thin
    }

    /// Index of the first retained sample.
    pub fn burn_in_index(&self) -> usize {
        (self.burn_in_fraction * self.stored_count() as f64).floor() as usize
    }

    /// Adaptation happens only up to and including this sweep.
    pub fn burn_in_sweeps(&self) -> usize {
        self.burn_in_index() * self.thin
    }
}

/// Largest drift seen between incrementally tracked quantities and their
/// from-scratch recomputation.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ChainDiagnostics {
    pub checks: usize,
    /// Relative to `max(1, |log-posterior|)`.
    pub max_log_posterior_drift: f64,
    /// Relative to `max(1, max |residual|)`.
    pub max_residual_drift: f64,
}

/// Result of a sampler run.
#[derive(Debug, Clone, PartialEq)]
pub struct Chain {
    pub samples: Vec<Vec<f64>>,
    pub burn_in: usize,
    pub thin: usize,
    /// Accepted moves per site after burn-in.
    pub accept_counts: Vec<u64>,
    /// Proposed moves per site after burn-in.
    pub propose_counts: Vec<u64>,
    pub proposal_sigmas: Vec<f64>,
    pub seed: u64,
    pub sweeps: usize,
    pub final_state: Vec<f64>,
    pub diagnostics: ChainDiagnostics,
}

impl Chain {
    /// Post-burn-in acceptance rate per site.
    pub fn acceptance_rates(&self) -> Vec<f64> {
        self.accept_counts
            .iter()
            .zip(&self.propose_counts)
            .map(|(&a, &p)| if p == 0 { f64::NAN } else { a as f64 / p as f64 })
            .collect()
    }

    pub fn overall_acceptance(&self) -> f64 {
        let a: u64 = self.accept_counts.iter().sum();
        let p: u64 = self.propose_counts.iter().sum();
        a as f64 / p as f64
    }

    pub fn retained(&self) -> &[Vec<f64>] {
        &self.samples[self.burn_in.min(self.samples.len())..]
    }
}

/// Arithmetic mean of the samples from `burn_in` on.
pub fn cm_estimate(chain: &Chain) -> Result<Vec<f64>> {
    mean_of(chain.retained())
}

/// CM estimates of the two halves of the retained samples.
pub fn split_half_cm(chain: &Chain) -> Result<(Vec<f64>, Vec<f64>)> {
    let kept = chain.retained();
    let mid = kept.len() / 2;
    Ok((mean_of(&kept[..mid])?, mean_of(&kept[mid..])?))
}

/// Per-site sample standard deviation of the retained samples.
pub fn posterior_sd(chain: &Chain) -> Result<Vec<f64>> {
    let kept = chain.retained();
    let mean = mean_of(kept)?;
    if kept.len() < 2 {
        return Ok(vec![0.0; mean.len()]);
    }
    let mut var = vec![0.0; mean.len()];
    for s in kept {
        for ((v, x), m) in var.iter_mut().zip(s).zip(&mean) {
            *v += (x - m) * (x - m);
        }
    }
    Ok(var
        .into_iter()
        .map(|v| (v / (kept.len() - 1) as f64).sqrt())
        .collect())
}

fn mean_of(samples: &[Vec<f64>]) -> Result<Vec<f64>> {
    let first = samples.first().ok_or(Error::EmptyChain)?;
    let mut mean = vec![0.0; first.len()];
    for s in samples {
        for (m, x) in mean.iter_mut().zip(s) {
            *m += x;
        }
    }
    let n = samples.len() as f64;
    mean.iter_mut().for_each(|m| *m /= n);
    Ok(mean)
}

/// One adaptation step: per site, scale σ by 1.5 if the window acceptance
/// exceeds 0.5, divide by 1.5 below 0.25; then reset the window counters.
pub fn adapt_proposals(sigmas: &mut [f64], window_accepts: &mut [u64], window_proposals: &mut [u64]) {
    adapt_toward_band(sigmas, window_accepts, window_proposals, [0.25, 0.5]);
    window_accepts.iter_mut().for_each(|c| *c = 0);
    window_proposals.iter_mut().for_each(|c| *c = 0);
}

/// The sampler's adaptation step. Same ×1.5 rule against `band`, but a
/// site's counters are only reset when its σ changes, so a site sitting on
/// a good scale keeps sharpening its acceptance estimate instead of being
/// pushed around by 50-proposal noise.
pub fn adapt_toward_band(
    sigmas: &mut [f64],
    window_accepts: &mut [u64],
    window_proposals: &mut [u64],
    band: [f64; 2],
) {
    for ((sigma, acc), prop) in sigmas
        .iter_mut()
        .zip(window_accepts.iter_mut())
        .zip(window_proposals.iter_mut())
    {
        if *prop == 0 {
            continue;
        }
        let rate = *acc as f64 / *prop as f64;
        let factor = if rate > band[1] {
            1.5
        } else if rate < band[0] {
            1.0 / 1.5
        } else {
            continue;
        };
        *sigma *= factor;
        *acc = 0;
        *prop = 0;
    }
}

/// Runs `cfg.sweeps` sweeps from `init`.
pub fn scmh_run(post: &Posterior, init: &[f64], cfg: &SamplerConfig) -> Result<Chain> {
    let mut sampler = Scmh::new(post, init, cfg.clone())?;
    sampler.run_to_end()?;
    Ok(sampler.into_chain())
}

/// Resumable sampler state.
#[derive(Debug, Clone)]
pub struct Scmh<'a> {
    post: &'a Posterior,
    cfg: SamplerConfig,
    rng: ChaCha8Rng,
    state: Vec<f64>,
    residual: Vec<f64>,
    log_post: f64,
    sigmas: Vec<f64>,
    window_accepts: Vec<u64>,
    window_proposals: Vec<u64>,
    accepts: Vec<u64>,
    proposals: Vec<u64>,
    order: Vec<usize>,
    sweep: usize,
    samples: Vec<Vec<f64>>,
    diagnostics: ChainDiagnostics,
}

impl<'a> Scmh<'a> {
    pub fn new(post: &'a Posterior, init: &[f64], cfg: SamplerConfig) -> Result<Self> {
        cfg.validate()?;
        let residual = post.residual(init)?;
        let log_post = post.log_posterior(init)?;
        if !log_post.is_finite() {
            return Err(Error::Initialization(format!(
                "log-posterior at the initial state is {log_post}"
            )));
        }
        let n = post.len();
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(cfg.stream);
        Ok(Self {
            post,
            rng,
            state: init.to_vec(),
            residual,
            log_post,
            sigmas: vec![cfg.initial_sigma; n],
            window_accepts: vec![0; n],
            window_proposals: vec![0; n],
            accepts: vec![0; n],
            proposals: vec![0; n],
            order: (0..n).collect(),
            sweep: 0,
            samples: Vec::with_capacity(cfg.stored_count()),
            diagnostics: ChainDiagnostics::default(),
            cfg,
        })
    }

    pub fn sweeps_done(&self) -> usize {
        self.sweep
    }

    pub fn state(&self) -> &[f64] {
        &self.state
    }

    pub fn log_posterior(&self) -> f64 {
        self.log_post
    }

    pub fn config(&self) -> &SamplerConfig {
        &self.cfg
    }

    pub fn run_to_end(&mut self) -> Result<()> {
        let remaining = self.cfg.sweeps - self.sweep;
        self.run_sweeps(remaining)
    }

    /// Runs up to `count` sweeps, stopping at the configured total.
    pub fn run_sweeps(&mut self, count: usize) -> Result<()> {
        let end = (self.sweep + count).min(self.cfg.sweeps);
        while self.sweep < end {
            self.sweep_once();
            self.sweep += 1;
            let s = self.sweep;
            let burn_sweeps = self.cfg.burn_in_sweeps();
            if s <= burn_sweeps && s.is_multiple_of(self.cfg.adapt_interval) {
                adapt_toward_band(
                    &mut self.sigmas,
                    &mut self.window_accepts,
                    &mut self.window_proposals,
                    self.cfg.adapt_band,
                );
            }
            if s.is_multiple_of(self.cfg.thin) {
                self.samples.push(self.state.clone());
            }
            if s.is_multiple_of(self.cfg.check_interval) || s == self.cfg.sweeps {
                self.resync()?;
            }
        }
        Ok(())
    }

    fn sweep_once(&mut self) {
        if self.cfg.scan == ScanOrder::RandomPermutation {
            self.order.shuffle(&mut self.rng);
        }
        let counting = self.sweep >= self.cfg.burn_in_sweeps();
        let prior = self.post.bound.as_ref();
        let lik = self.post.likelihood.as_ref();
        for k in 0..self.order.len() {
            let site = self.order[k];
            let old = self.state[site];
            let proposed = old + self.sigmas[site] * self.rng.sample::<f64, _>(StandardNormal);
            let delta = proposed - old;

            let d_prior = prior.map_or(0.0, |p| p.delta(&self.state, site, proposed));
            let column = lik.map(|l| l.operator.column(site));
            let d_lik = match (lik, column) {
                (Some(l), Some((rows, vals))) => {
                    column_delta(&self.residual, rows, vals, delta, l.noise.stddev)
                }
                _ => 0.0,
            };
            let log_ratio = d_prior + d_lik;

            let accept = log_ratio >= 0.0 || self.rng.random::<f64>().ln() < log_ratio;
            self.window_proposals[site] += 1;
            if counting {
                self.proposals[site] += 1;
            }
            if accept {
                self.state[site] = proposed;
                self.log_post += log_ratio;
                if let Some((rows, vals)) = column {
                    for (&r, &v) in rows.iter().zip(vals) {
                        self.residual[r] -= v * delta;
                    }
                }
                self.window_accepts[site] += 1;
                if counting {
                    self.accepts[site] += 1;
                }
            }
        }
    }

    /// Recomputes residual and log-posterior from scratch, records the drift
    /// of the incremental values and replaces them.
    fn resync(&mut self) -> Result<()> {
        let exact_res = self.post.residual(&self.state)?;
        let exact_lp = self.post.log_posterior(&self.state)?;
        let res_scale = exact_res.iter().fold(1.0f64, |a, r| a.max(r.abs()));
        let res_drift = exact_res
            .iter()
            .zip(&self.residual)
            .fold(0.0f64, |a, (e, c)| a.max((e - c).abs()))
            / res_scale;
        let lp_drift = (exact_lp - self.log_post).abs() / exact_lp.abs().max(1.0);
        let d = &mut self.diagnostics;
        d.checks += 1;
        d.max_residual_drift = d.max_residual_drift.max(res_drift);
        d.max_log_posterior_drift = d.max_log_posterior_drift.max(lp_drift);
        self.residual = exact_res;
        self.log_post = exact_lp;
        Ok(())
    }

    pub fn into_chain(self) -> Chain {
        let burn_in = self.cfg.burn_in_index().min(self.samples.len());
        Chain {
            samples: self.samples,
            burn_in,
            thin: self.cfg.thin,
            accept_counts: self.accepts,
            propose_counts: self.proposals,
            proposal_sigmas: self.sigmas,
            seed: self.cfg.seed,
            sweeps: self.sweep,
            final_state: self.state,
            diagnostics: self.diagnostics,
        }
    }
}
