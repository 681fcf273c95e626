//! Experiment configuration, read from TOML.
//!
//! Every section is optional and falls back to the desk-scale defaults
//! below; only `seed` is required. A run manifest is itself a valid config.

use std::path::Path;

use cauchy_prior::fbp::Filter;
use cauchy_prior::forward::FanBeamGeometry;
use cauchy_prior::map::MapConfig;
use cauchy_prior::phantom::SheppLoganVariant;
use cauchy_prior::prior::{Boundary, PriorFamily, PriorModel};
use cauchy_prior::sampler::{SamplerConfig, ScanOrder};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    /// Used when `--out` is not given. Left out of manifests.
    #[serde(default, skip_serializing)]
    pub output_dir: Option<String>,
    /// Provenance block of a manifest; ignored on input.
    #[serde(default, skip_serializing)]
    pub run: Option<toml::Table>,
    #[serde(default)]
    pub sampler: SamplerSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub realizations: RealizationsSection,
    #[serde(default)]
    pub deconvolution: DeconvolutionSection,
    #[serde(default)]
    pub tomography: TomographySection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Cauchy,
    Gaussian,
    Tv,
}

impl From<Family> for PriorFamily {
    fn from(f: Family) -> Self {
        match f {
            Family::Cauchy => PriorFamily::Cauchy,
            Family::Gaussian => PriorFamily::Gaussian,
            Family::Tv => PriorFamily::Tv,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scan {
    Raster,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryName {
    Zero,
    Free,
}

impl From<BoundaryName> for Boundary {
    fn from(b: BoundaryName) -> Self {
        match b {
            BoundaryName::Zero => Boundary::Zero,
            BoundaryName::Free => Boundary::Free,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FilterName {
    Ramlak,
    Hann,
}

impl From<FilterName> for Filter {
    fn from(f: FilterName) -> Self {
        match f {
            FilterName::Ramlak => Filter::RamLak,
            FilterName::Hann => Filter::Hann,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhantomName {
    Modified,
    Classic,
}

impl From<PhantomName> for SheppLoganVariant {
    fn from(p: PhantomName) -> Self {
        match p {
            PhantomName::Modified => SheppLoganVariant::Modified,
            PhantomName::Classic => SheppLoganVariant::Classic,
        }
    }
}

/// Sampler settings shared by all experiments. Chain lengths live in the
/// experiment sections.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplerSection {
    pub thin: usize,
    pub burn_in_fraction: f64,
    pub adapt_interval: usize,
    pub initial_sigma: f64,
    pub adapt_band: [f64; 2],
    pub scan: Scan,
    pub check_interval: usize,
}

impl Default for SamplerSection {
    fn default() -> Self {
        let d = SamplerConfig::default();
        Self {
            thin: d.thin,
            burn_in_fraction: d.burn_in_fraction,
            adapt_interval: d.adapt_interval,
            initial_sigma: 0.05,
            adapt_band: d.adapt_band,
            scan: Scan::Raster,
            check_interval: d.check_interval,
        }
    }
}

impl SamplerSection {
    pub fn to_config(&self, sweeps: usize, seed: u64, stream: u64) -> SamplerConfig {
        SamplerConfig {
            sweeps,
            thin: self.thin,
            burn_in_fraction: self.burn_in_fraction,
            adapt_interval: self.adapt_interval,
            initial_sigma: self.initial_sigma,
            adapt_band: self.adapt_band,
            scan: match self.scan {
                Scan::Raster => ScanOrder::Raster,
                Scan::Random => ScanOrder::RandomPermutation,
            },
            check_interval: self.check_interval,
            seed,
            stream,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSection {
    pub max_iters: usize,
    pub grad_tol: f64,
    pub shrink: f64,
    pub max_backtracks: usize,
    pub armijo: f64,
    pub linear_solver_tol: f64,
    pub max_cg_iters: usize,
}

impl Default for SolverSection {
    fn default() -> Self {
        let d = MapConfig::default();
        Self {
            max_iters: d.max_iters,
            grad_tol: d.grad_tol,
            shrink: d.shrink,
            max_backtracks: d.max_backtracks,
            armijo: d.armijo,
            linear_solver_tol: d.linear_solver_tol,
            max_cg_iters: d.max_cg_iters,
        }
    }
}

impl SolverSection {
    pub fn to_config(&self) -> MapConfig {
        MapConfig {
            max_iters: self.max_iters,
            grad_tol: self.grad_tol,
            shrink: self.shrink,
            max_backtracks: self.max_backtracks,
            armijo: self.armijo,
            linear_solver_tol: self.linear_solver_tol,
            max_cg_iters: self.max_cg_iters,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RealizationsSection {
    /// Points per 1D walk, on `t_j = j/(n−1)`.
    pub walk_points: usize,
    pub alphas: Vec<f64>,
    pub lattice_size: usize,
    /// Border dropped from each side of the 2D draws; the lattice is sampled
    /// at `lattice_size + 2·crop`.
    pub crop: usize,
    pub families: Vec<Family>,
    pub cauchy_reg: f64,
    pub gaussian_reg: f64,
    pub tv_reg: f64,
    pub sweeps: usize,
}

impl Default for RealizationsSection {
    fn default() -> Self {
        Self {
            walk_points: 1000,
            alphas: vec![1.0, 2.0],
            lattice_size: 64,
            crop: 8,
            families: vec![Family::Cauchy, Family::Gaussian],
            cauchy_reg: 1.0,
            gaussian_reg: 1.0,
            tv_reg: 64.0,
            sweeps: 2000,
        }
    }
}

impl RealizationsSection {
    pub fn reg(&self, family: Family) -> f64 {
        match family {
            Family::Cauchy => self.cauchy_reg,
            Family::Gaussian => self.gaussian_reg,
            Family::Tv => self.tv_reg,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DeconvolutionSection {
    pub grid_sizes: Vec<usize>,
    pub kernel_width: f64,
    /// Noise standard deviation relative to `max |A x_true|`.
    pub noise_level: f64,
    pub boundary: BoundaryName,
    pub cauchy_reg: f64,
    /// Scale of the Gaussian baseline chain; 0 skips it.
    pub gaussian_reg: f64,
    pub sweeps: usize,
}

impl Default for DeconvolutionSection {
    fn default() -> Self {
        Self {
            grid_sizes: vec![66, 131, 261, 521],
            kernel_width: 0.04,
            noise_level: 0.01,
            boundary: BoundaryName::Free,
            cauchy_reg: 1.0,
            gaussian_reg: 1.0,
            sweeps: 200_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TomographySection {
    pub size: usize,
    /// Image half-width; the image covers `[−fov, fov]²`.
    pub fov: f64,
    pub phantom: PhantomName,
    pub source_radius: f64,
    pub detector_radius: f64,
    pub detector_width: f64,
    pub detector_pixels: usize,
    pub n_angles: usize,
    pub angle_start_deg: f64,
    pub angle_end_deg: f64,
    pub noise_level: f64,
    pub boundary: BoundaryName,
    pub cauchy_reg: f64,
    pub gaussian_reg: f64,
    pub tv_reg: f64,
    pub fbp_filter: FilterName,
    pub sweeps: usize,
}

impl Default for TomographySection {
    fn default() -> Self {
        Self {
            size: 64,
            fov: 1.0,
            phantom: PhantomName::Modified,
            source_radius: 4.0,
            detector_radius: 2.0,
            detector_width: 3.0,
            detector_pixels: 200,
            n_angles: 20,
            angle_start_deg: -10.0,
            angle_end_deg: 190.0,
            noise_level: 0.001,
            boundary: BoundaryName::Free,
            cauchy_reg: 0.3,
            gaussian_reg: 1.0,
            tv_reg: 100.0,
            fbp_filter: FilterName::Hann,
            sweeps: 20_000,
        }
    }
}

impl TomographySection {
    pub fn geometry(&self) -> FanBeamGeometry {
        FanBeamGeometry::with_angle_span(
            self.source_radius,
            self.detector_radius,
            self.detector_width,
            self.detector_pixels,
            self.angle_start_deg,
            self.angle_end_deg,
            self.n_angles,
        )
    }

    /// Pixel side length.
    pub fn h(&self) -> f64 {
        2.0 * self.fov / self.size as f64
    }

    pub fn prior(&self, family: Family) -> Result<PriorModel, CliError> {
        let reg = match family {
            Family::Cauchy => self.cauchy_reg,
            Family::Gaussian => self.gaussian_reg,
            Family::Tv => self.tv_reg,
        };
        let h = self.h();
        Ok(PriorModel::new(family.into(), reg, h, h, self.boundary.into())?)
    }
}

fn check(ok: bool, what: &str) -> Result<(), CliError> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Config(what.to_owned()))
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config always serializes")
    }

    /// Checks every numeric field against the domain of the module it feeds,
    /// so that failures during a run are numerical rather than input errors.
    pub fn validate(&self) -> Result<(), CliError> {
        self.check_domains().map_err(|e| match e {
            CliError::Numeric(inner) => CliError::Config(inner.to_string()),
            other => other,
        })
    }

    fn check_domains(&self) -> Result<(), CliError> {
        self.sampler.to_config(1, self.seed, 0).validate()?;
        self.solver.to_config().validate()?;

        let r = &self.realizations;
        check(r.walk_points >= 2, "realizations.walk_points must be at least 2")?;
        check(r.lattice_size >= 1, "realizations.lattice_size must be positive")?;
        check(r.sweeps >= 1, "realizations.sweeps must be positive")?;
        for &alpha in &r.alphas {
            cauchy_prior::stable::StableParams::symmetric(alpha, 1.0)?;
        }
        for &family in &r.families {
            PriorModel::new(family.into(), r.reg(family), 1.0, 1.0, Boundary::Zero)?;
        }

        let d = &self.deconvolution;
        check(!d.grid_sizes.is_empty(), "deconvolution.grid_sizes is empty")?;
        check(
            d.grid_sizes.iter().all(|&n| n >= 2),
            "deconvolution grid sizes must be at least 2",
        )?;
        check(d.sweeps >= 1, "deconvolution.sweeps must be positive")?;
        check(
            d.noise_level > 0.0 && d.noise_level.is_finite(),
            "deconvolution.noise_level must be positive",
        )?;
        check(
            d.kernel_width > 0.0 && d.kernel_width < 1.0,
            "deconvolution.kernel_width must lie in (0, 1)",
        )?;
        PriorModel::line(PriorFamily::Cauchy, d.cauchy_reg, 1.0, d.boundary.into())?;
        if d.gaussian_reg != 0.0 {
            PriorModel::line(PriorFamily::Gaussian, d.gaussian_reg, 1.0, d.boundary.into())?;
        }

        let t = &self.tomography;
        check(t.size >= 2, "tomography.size must be at least 2")?;
        check(t.n_angles >= 1, "tomography.n_angles must be positive")?;
        check(
            t.detector_pixels >= 1,
            "tomography.detector_pixels must be positive",
        )?;
        check(t.sweeps >= 1, "tomography.sweeps must be positive")?;
        check(
            t.noise_level > 0.0 && t.noise_level.is_finite(),
            "tomography.noise_level must be positive",
        )?;
        check(
            t.fov > 0.0 && t.fov.is_finite(),
            "tomography.fov must be positive",
        )?;
        t.geometry().validate(t.fov)?;
        for family in [Family::Cauchy, Family::Gaussian, Family::Tv] {
            t.prior(family)?;
        }
        Ok(())
    }
}
