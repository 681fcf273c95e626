use cauchy_prior::forward::unit_grid;
use cauchy_prior::prior::{Boundary, PriorModel};
use cauchy_prior::walk::{prior_chain_2d, simulate_walk_1d};
use cauchy_prior::Lattice2D;
use rayon::prelude::*;

use super::{rng_for, ChainSummary};
use crate::config::{ExperimentConfig, Family};
use crate::error::CliError;
use crate::output::{value_range, Cell, OutputDir};

const WALK_STREAM: u64 = 10;
const LATTICE_STREAM: u64 = 20;

fn family_name(f: Family) -> &'static str {
    match f {
        Family::Cauchy => "cauchy",
        Family::Gaussian => "gaussian",
        Family::Tv => "tv",
    }
}

/// 1D α-stable walks on `[0, 1]` and cropped 2D prior draws.
pub fn run_prior_realizations(cfg: &ExperimentConfig, out: &OutputDir) -> Result<(), CliError> {
    let r = &cfg.realizations;
    let n = r.walk_points;
    let t = unit_grid(n);
    for (i, &alpha) in r.alphas.iter().enumerate() {
        let mut rng = rng_for(cfg.seed, WALK_STREAM + i as u64);
        let walk = simulate_walk_1d(alpha, 0.0, 1.0 / (n - 1) as f64, n, &mut rng)?;
        let rows = t
            .iter()
            .zip(&walk.values)
            .map(|(&t, &v)| vec![Cell::F(t), Cell::F(v)]);
        out.csv(&format!("walk_alpha{alpha}.csv"), "t,value", rows)?;
    }

    let size = r.lattice_size;
    let full = size + 2 * r.crop;
    let h = 1.0 / size as f64;
    let draws: Vec<(Family, Lattice2D, ChainSummary)> = r
        .families
        .par_iter()
        .enumerate()
        .map(|(j, &family)| {
            log::info!("{} prior draw on {full}x{full}", family_name(family));
            let prior = PriorModel::new(family.into(), r.reg(family), h, h, Boundary::Zero)?;
            let sampler = cfg
                .sampler
                .to_config(r.sweeps, cfg.seed, LATTICE_STREAM + j as u64);
            let chain = prior_chain_2d(&prior, full, full, &sampler)?;
            let summary = ChainSummary::of(&chain)?;
            let lattice = Lattice2D::new(full, full, h, h, chain.final_state)?.crop(r.crop)?;
            Ok((family, lattice, summary))
        })
        .collect::<Result<_, CliError>>()?;

    let mut report = Vec::new();
    for (family, lattice, summary) in draws {
        let name = family_name(family);
        out.pgm(
            &format!("realization_{name}.pgm"),
            &lattice.values,
            lattice.nx,
            lattice.ny,
            value_range(&lattice.values),
        )?;
        out.image_csv(&format!("realization_{name}.csv"), &lattice.values, lattice.nx)?;
        report.push(vec![
            Cell::Text(name.into()),
            Cell::F(summary.mean_rate),
            Cell::F(summary.min_rate),
            Cell::F(summary.max_rate),
        ]);
    }
    out.csv(
        "realization_acceptance.csv",
        "family,mean_acceptance,min_acceptance,max_acceptance",
        report,
    )
}
