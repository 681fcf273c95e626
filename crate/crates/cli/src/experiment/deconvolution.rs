use cauchy_prior::forward::{add_noise, build_convolution_operator, unit_grid};
use cauchy_prior::phantom::piecewise_signal_1d;
use cauchy_prior::prior::{PriorFamily, PriorModel};
use cauchy_prior::sampler::{cm_estimate, posterior_sd, scmh_run, Chain, Posterior};
use cauchy_prior::Layout;
use rayon::prelude::*;

use super::{relative_l2, rng_for, ChainSummary};
use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::output::{Cell, OutputDir};

const NOISE_STREAM: u64 = 1_000_000;
const CAUCHY_STREAM: u64 = 2_000_000;
const GAUSSIAN_STREAM: u64 = 3_000_000;

struct GridRun {
    n: usize,
    truth: Vec<f64>,
    data: Vec<f64>,
    cauchy: Chain,
    cauchy_cm: Vec<f64>,
    gaussian: Option<(Chain, Vec<f64>)>,
}

/// Linear interpolation of samples on `t_j = j/(len−1)` onto the `n`-point
/// grid of the same interval.
pub fn interpolate_to(values: &[f64], n: usize) -> Vec<f64> {
    let last = values.len() - 1;
    unit_grid(n)
        .into_iter()
        .map(|t| {
            let pos = t * last as f64;
            let i = (pos.floor() as usize).min(last.saturating_sub(1));
            let f = pos - i as f64;
            if f == 0.0 || last == 0 {
                values[i]
            } else {
                values[i] * (1.0 - f) + values[i + 1] * f
            }
        })
        .collect()
}

fn run_grid(cfg: &ExperimentConfig, n: usize) -> Result<GridRun, CliError> {
    let d = &cfg.deconvolution;
    let truth = piecewise_signal_1d(n)?;
    let op = build_convolution_operator(n, d.kernel_width)?;
    let clean = op.apply(&truth.values)?;
    let (data, noise) = add_noise(
        &clean,
        d.noise_level,
        &mut rng_for(cfg.seed, NOISE_STREAM + n as u64),
    )?;

    let chain_for = |family: PriorFamily, reg: f64, stream: u64| -> Result<Chain, CliError> {
        log::info!(
            "deconvolution n={n}: {} chain, {} sweeps",
            family.name(),
            d.sweeps
        );
        let prior = PriorModel::line(family, reg, truth.h, d.boundary.into())?;
        let post = Posterior::new(op.clone(), data.clone(), noise, prior, Layout::Line { n })?;
        let sampler = cfg.sampler.to_config(d.sweeps, cfg.seed, stream + n as u64);
        // the blurred data is a cheap, reasonable starting point
        Ok(scmh_run(&post, &data, &sampler)?)
    };
    let cauchy = chain_for(PriorFamily::Cauchy, d.cauchy_reg, CAUCHY_STREAM)?;
    let cauchy_cm = cm_estimate(&cauchy)?;
    let gaussian = if d.gaussian_reg > 0.0 {
        let chain = chain_for(PriorFamily::Gaussian, d.gaussian_reg, GAUSSIAN_STREAM)?;
        let cm = cm_estimate(&chain)?;
        Some((chain, cm))
    } else {
        None
    };
    Ok(GridRun {
        n,
        truth: truth.values,
        data,
        cauchy,
        cauchy_cm,
        gaussian,
    })
}

/// Cauchy-prior CM estimates on every configured grid, each with its own
/// data, plus the optional Gaussian-prior baseline and a cross-grid table.
pub fn run_deconvolution(cfg: &ExperimentConfig, out: &OutputDir) -> Result<(), CliError> {
    let runs: Vec<GridRun> = cfg
        .deconvolution
        .grid_sizes
        .par_iter()
        .map(|&n| run_grid(cfg, n))
        .collect::<Result<_, _>>()?;

    let mut errors = Vec::new();
    for run in &runs {
        let n = run.n;
        let t = unit_grid(n);
        let series = |values: &[f64]| -> Vec<Vec<Cell>> {
            t.iter()
                .zip(values)
                .map(|(&t, &v)| vec![Cell::F(t), Cell::F(v)])
                .collect()
        };
        out.csv(&format!("deconv_n{n}_truth.csv"), "t,value", series(&run.truth))?;
        out.csv(&format!("deconv_n{n}_data.csv"), "t,value", series(&run.data))?;

        let sd = posterior_sd(&run.cauchy)?;
        let mut header = String::from("t,cauchy_cm,cauchy_sd");
        let mut acc_header = String::from("site,cauchy_sigma,cauchy_acceptance");
        if run.gaussian.is_some() {
            header.push_str(",gaussian_cm");
            acc_header.push_str(",gaussian_sigma,gaussian_acceptance");
        }
        let rows = (0..n).map(|j| {
            let mut row = vec![Cell::F(t[j]), Cell::F(run.cauchy_cm[j]), Cell::F(sd[j])];
            if let Some((_, cm)) = &run.gaussian {
                row.push(Cell::F(cm[j]));
            }
            row
        });
        out.csv(&format!("deconv_n{n}_cm.csv"), &header, rows)?;

        let cauchy_rates = run.cauchy.acceptance_rates();
        let gaussian_rates = run.gaussian.as_ref().map(|(c, _)| c.acceptance_rates());
        let rows = (0..n).map(|j| {
            let mut row = vec![
                Cell::Int(j),
                Cell::F(run.cauchy.proposal_sigmas[j]),
                Cell::F(cauchy_rates[j]),
            ];
            if let (Some((chain, _)), Some(rates)) = (&run.gaussian, &gaussian_rates) {
                row.push(Cell::F(chain.proposal_sigmas[j]));
                row.push(Cell::F(rates[j]));
            }
            row
        });
        out.csv(&format!("deconv_n{n}_acceptance.csv"), &acc_header, rows)?;

        let mut summarize = |method: &str, chain: &Chain, cm: &[f64]| -> Result<(), CliError> {
            let s = ChainSummary::of(chain)?;
            errors.push(vec![
                Cell::Int(n),
                Cell::Text(method.into()),
                Cell::F(relative_l2(cm, &run.truth)),
                Cell::F(s.mean_rate),
                Cell::F(s.min_rate),
                Cell::F(s.max_rate),
                Cell::F(s.split_half),
            ]);
            Ok(())
        };
        summarize("cm_cauchy", &run.cauchy, &run.cauchy_cm)?;
        if let Some((chain, cm)) = &run.gaussian {
            summarize("cm_gaussian", chain, cm)?;
        }
    }
    out.csv(
        "deconv_errors.csv",
        "n,method,relative_l2_error,mean_acceptance,min_acceptance,max_acceptance,split_half_rms",
        errors,
    )?;

    // every Cauchy CM on the finest grid; distance relative to the finer one
    let finest = runs.iter().map(|r| r.n).max().unwrap_or(0);
    let lifted: Vec<Vec<f64>> = runs
        .iter()
        .map(|r| interpolate_to(&r.cauchy_cm, finest))
        .collect();
    let mut rows = Vec::new();
    for a in 0..runs.len() {
        for b in a + 1..runs.len() {
            let (coarse, fine) = if runs[a].n <= runs[b].n { (a, b) } else { (b, a) };
            rows.push(vec![
                Cell::Int(runs[coarse].n),
                Cell::Int(runs[fine].n),
                Cell::F(relative_l2(&lifted[coarse], &lifted[fine])),
            ]);
        }
    }
    out.csv("deconv_comparison.csv", "n_coarse,n_fine,relative_l2", rows)
}
