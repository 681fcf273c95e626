use std::time::Instant;

use cauchy_prior::fbp::fbp_reconstruct;
use cauchy_prior::forward::{add_noise, build_fanbeam_operator, PixelGrid};
use cauchy_prior::map::map_estimate;
use cauchy_prior::phantom::shepp_logan;
use cauchy_prior::sampler::{cm_estimate, scmh_run, Posterior};
use cauchy_prior::Layout;
use rayon::prelude::*;

use super::{rmse, rng_for, ChainSummary};
use crate::config::{ExperimentConfig, Family};
use crate::error::CliError;
use crate::output::{fmt_f, value_range, Cell, OutputDir};

const NOISE_STREAM: u64 = 1;

/// Which estimators a tomography run computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TomoMode {
    All,
    FbpOnly,
    MapOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Method {
    MapCauchy,
    Cm(Family),
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Method::MapCauchy => "map_cauchy",
            Method::Cm(Family::Cauchy) => "cm_cauchy",
            Method::Cm(Family::Tv) => "cm_tv",
            Method::Cm(Family::Gaussian) => "cm_gaussian",
        }
    }

    fn stream(self) -> u64 {
        match self {
            Method::MapCauchy => 0,
            Method::Cm(Family::Cauchy) => 2,
            Method::Cm(Family::Tv) => 3,
            Method::Cm(Family::Gaussian) => 4,
        }
    }
}

struct Estimate {
    name: &'static str,
    values: Vec<f64>,
    runtime_s: f64,
    chain: Option<ChainSummary>,
}

/// Shepp-Logan phantom through the fan-beam scanner, reconstructed by FBP,
/// Cauchy MAP and the Cauchy, TV and Gaussian CM estimates.
pub fn run_tomography(cfg: &ExperimentConfig, out: &OutputDir, mode: TomoMode) -> Result<(), CliError> {
    let t = &cfg.tomography;
    let n = t.size;
    let geom = t.geometry();
    let system = build_fanbeam_operator(&geom, n, n, t.fov)?;
    // the phantom's [−1, 1]² fills the field of view
    let truth = shepp_logan(n, n, t.phantom.into())?;
    let clean = system.operator.apply(&truth.values)?;
    let (sinogram, noise) = add_noise(&clean, t.noise_level, &mut rng_for(cfg.seed, NOISE_STREAM))?;

    let start = Instant::now();
    let fbp = fbp_reconstruct(&sinogram, &geom, n, n, t.fov, t.fbp_filter.into())?;
    let fbp_time = start.elapsed().as_secs_f64();

    let methods: Vec<Method> = match mode {
        TomoMode::All => vec![
            Method::MapCauchy,
            Method::Cm(Family::Cauchy),
            Method::Cm(Family::Tv),
            Method::Cm(Family::Gaussian),
        ],
        TomoMode::FbpOnly => vec![],
        TomoMode::MapOnly => vec![Method::MapCauchy],
    };
    let run = |method: Method| -> Result<Estimate, CliError> {
        let family = match method {
            Method::MapCauchy => Family::Cauchy,
            Method::Cm(f) => f,
        };
        let post = Posterior::new(
            system.operator.clone(),
            sinogram.clone(),
            noise,
            t.prior(family)?,
            Layout::Grid { nx: n, ny: n },
        )?;
        log::info!("tomography: {}", method.name());
        let start = Instant::now();
        // both start from the FBP image
        let (values, chain) = match method {
            Method::MapCauchy => {
                let result = map_estimate(&post, &fbp.values, &cfg.solver.to_config())?;
                if !result.converged {
                    log::warn!(
                        "MAP stopped after {} iterations with gradient {}",
                        result.iterations,
                        result.grad_norm
                    );
                }
                (result.x, None)
            }
            Method::Cm(_) => {
                let sampler = cfg.sampler.to_config(t.sweeps, cfg.seed, method.stream());
                let chain = scmh_run(&post, &fbp.values, &sampler)?;
                (cm_estimate(&chain)?, Some(ChainSummary::of(&chain)?))
            }
        };
        Ok(Estimate {
            name: method.name(),
            values,
            runtime_s: start.elapsed().as_secs_f64(),
            chain,
        })
    };
    let computed: Vec<Estimate> = methods.par_iter().map(|&m| run(m)).collect::<Result<_, _>>()?;
    let mut estimates = Vec::new();
    if mode != TomoMode::MapOnly {
        estimates.push(Estimate {
            name: "fbp",
            values: fbp.values,
            runtime_s: fbp_time,
            chain: None,
        });
    }
    estimates.extend(computed);

    // one grey scale for every image, so they can be compared by eye
    let range = value_range(&truth.values);
    out.pgm("tomo_truth.pgm", &truth.values, n, n, range)?;
    out.image_csv("tomo_truth.csv", &truth.values, n)?;
    for e in &estimates {
        out.pgm(&format!("tomo_{}.pgm", e.name), &e.values, n, n, range)?;
        out.image_csv(&format!("tomo_{}.csv", e.name), &e.values, n)?;
    }

    let rows = estimates.iter().map(|e| {
        vec![
            Cell::Text(e.name.into()),
            Cell::F(rmse(&e.values, &truth.values)),
            Cell::Text(format!("{:.3}", e.runtime_s)),
        ]
    });
    out.csv("rmse.csv", "method,rmse,runtime_s", rows)?;

    let rows = estimates.iter().filter_map(|e| {
        e.chain.map(|s| {
            vec![
                Cell::Text(e.name.into()),
                Cell::F(s.mean_rate),
                Cell::F(s.min_rate),
                Cell::F(s.max_rate),
                Cell::F(s.split_half),
            ]
        })
    });
    out.csv(
        "tomo_acceptance.csv",
        "method,mean_acceptance,min_acceptance,max_acceptance,split_half_rms",
        rows,
    )?;

    let n_det = geom.n_detector_pixels;
    let rows = sinogram.iter().enumerate().map(|(row, &v)| {
        vec![
            Cell::Text(fmt_f(geom.angles_deg[row / n_det])),
            Cell::Int(row % n_det),
            Cell::F(v),
        ]
    });
    out.csv("tomo_sinogram.csv", "angle_deg,detector,value", rows)?;

    // profiles through the centre: the middle row (varying x) and the
    // middle column (varying y, top to bottom)
    let grid = PixelGrid {
        nx: n,
        ny: n,
        fov: t.fov,
    };
    let mid = n / 2;
    let mut header = String::from("x,truth");
    for e in &estimates {
        header.push(',');
        header.push_str(e.name);
    }
    let profile = |index: &dyn Fn(usize) -> usize, coord: &dyn Fn(usize) -> f64| {
        (0..n)
            .map(|k| {
                let mut row = vec![Cell::F(coord(k)), Cell::F(truth.values[index(k)])];
                row.extend(estimates.iter().map(|e| Cell::F(e.values[index(k)])));
                row
            })
            .collect::<Vec<_>>()
    };
    out.csv(
        "tomo_cross_row.csv",
        &header,
        profile(&|k| mid * n + k, &|k| grid.center(k, mid)[0]),
    )?;
    out.csv(
        "tomo_cross_column.csv",
        &header.replacen('x', "y", 1),
        profile(&|k| k * n + mid, &|k| grid.center(mid, k)[1]),
    )
}
