//! Lévy α-stable laws: sampling for every index, closed-form densities for
//! the Cauchy (α = 1) and Gaussian (α = 2) members.
//!
//! Parameterization is `S_α(σ, β, μ)` with characteristic function
//! `exp(iμt − σ^α |t|^α)` in the symmetric case.
//!
//! **Scale convention at α = 2:** `S_2(σ, 0, 0)` is `N(0, 2σ²)`, not
//! `N(0, σ²)`. Every Gaussian quantity in this crate that is expressed as a
//! stable scale carries this factor of two.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;
use rand_distr::Exp1;

use crate::error::{Error, Result};

/// Parameters of a stable law `S_α(scale, β, location)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StableParams {
    alpha: f64,
    beta: f64,
    scale: f64,
    location: f64,
}

impl StableParams {
    /// Validates the parameters. At α = 2 the skewness has no effect on the
    /// law and is normalized to zero.
    pub fn new(alpha: f64, beta: f64, scale: f64, location: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 2.0) {
            return Err(Error::domain("alpha", alpha, "must lie in (0, 2]"));
        }
        if !(-1.0..=1.0).contains(&beta) {
            return Err(Error::domain("beta", beta, "must lie in [-1, 1]"));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::domain("scale", scale, "must be positive and finite"));
        }
        if !location.is_finite() {
            return Err(Error::domain("location", location, "must be finite"));
        }
        let beta = if alpha == 2.0 { 0.0 } else { beta };
        Ok(Self {
            alpha,
            beta,
            scale,
            location,
        })
    }

    /// Symmetric law `S_α(scale, 0, 0)`.
    pub fn symmetric(alpha: f64, scale: f64) -> Result<Self> {
        Self::new(alpha, 0.0, scale, 0.0)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn location(&self) -> f64 {
        self.location
    }
}

/// Draws one variate from `S_α(scale, β, location)` with the
/// Chambers–Mallows–Stuck transform.
pub fn sample_stable<R: Rng + ?Sized>(params: &StableParams, rng: &mut R) -> f64 {
    // u must avoid 0 so that the angle stays strictly inside (−π/2, π/2).
    let u = loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            break u;
        }
    };
    let w: f64 = rng.sample(Exp1);
    cms_transform(params, u, w)
}

/// The deterministic part of the Chambers–Mallows–Stuck generator: maps a
/// uniform `u ∈ (0, 1)` and a unit exponential `w > 0` to a stable variate.
pub fn cms_transform(params: &StableParams, u: f64, w: f64) -> f64 {
    let StableParams {
        alpha,
        beta,
        scale,
        location,
    } = *params;
    let v = PI * (u - 0.5);

    if alpha == 1.0 {
        if beta == 0.0 {
            return location + scale * v.tan();
        }
        let shifted = FRAC_PI_2 + beta * v;
        let x = (shifted * v.tan() - beta * ((FRAC_PI_2 * w * v.cos()) / shifted).ln()) / FRAC_PI_2;
        return scale * x + beta * scale * scale.ln() / FRAC_PI_2 + location;
    }

    let tan_term = beta * (PI * alpha / 2.0).tan();
    let skew_shift = tan_term.atan() / alpha;
    let amplitude = (1.0 + tan_term * tan_term).powf(1.0 / (2.0 * alpha));
    let arg = alpha * (v + skew_shift);
    let x =
        amplitude * arg.sin() / v.cos().powf(1.0 / alpha) * ((v - arg).cos() / w).powf((1.0 - alpha) / alpha);
    scale * x + location
}

fn check_scale(name: &'static str, scale: f64) -> Result<()> {
    if scale > 0.0 && scale.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(name, scale, "must be positive and finite"))
    }
}

/// `log(scale/π) − log(scale² + (x − location)²)`.
pub fn cauchy_logpdf(x: f64, location: f64, scale: f64) -> Result<f64> {
    check_scale("scale", scale)?;
    let d = x - location;
    Ok((scale / PI).ln() - (scale * scale + d * d).ln())
}

pub fn gaussian_logpdf(x: f64, location: f64, stddev: f64) -> Result<f64> {
    check_scale("stddev", stddev)?;
    let z = (x - location) / stddev;
    Ok(-0.5 * z * z - stddev.ln() - 0.5 * (2.0 * PI).ln())
}

pub fn cauchy_cdf(x: f64, location: f64, scale: f64) -> Result<f64> {
    check_scale("scale", scale)?;
    Ok(0.5 + ((x - location) / scale).atan() / PI)
}
