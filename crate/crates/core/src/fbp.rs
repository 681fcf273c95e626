//! Flat-detector fan-beam filtered back-projection.
//!
//! Detector samples are rescaled to a virtual detector through the rotation
//! axis, `s′ = s R/(R + R_d)` with `R` the source radius. Each projection is
//! cosine weighted by `R/√(R² + s′²)`, convolved with the discrete ramp
//! filter and back-projected with weight `R²/L²`, where `L` is the depth of
//! the pixel along the central ray.
//!
//! Scans shorter than a full circle measure some rays twice and others
//! once. Each ray `(β, γ)`, with fan angle `γ = atan(s′/R)`, is weighted by
//! `c(β) / (c(β) + c(β + π − 2γ))`, where `c` is one inside the scan and
//! tapers as `sin²` to zero over the first and last `TAPER_DEG` degrees.
//! Redundant pairs then sum to one and single rays keep full weight.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::field::Lattice2D;
use crate::forward::{FanBeamGeometry, PixelGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Filter {
    #[default]
    RamLak,
    /// Ram-Lak smoothed by `[¼, ½, ¼]`, the spatial form of a Hann window.
    Hann,
}

const TAPER_DEG: f64 = 10.0;

/// Reconstructs an `nx × ny` image on `[−fov, fov]²` from a sinogram laid out
/// as `angle · N + k`.
pub fn fbp_reconstruct(
    sinogram: &[f64],
    geom: &FanBeamGeometry,
    nx: usize,
    ny: usize,
    fov: f64,
    filter: Filter,
) -> Result<Lattice2D> {
    geom.validate(fov)?;
    if sinogram.len() != geom.n_rays() {
        return Err(Error::Dimension {
            what: "sinogram vs geometry",
            expected: geom.n_rays(),
            actual: sinogram.len(),
        });
    }
    if nx == 0 || ny == 0 {
        return Err(Error::Size(format!("image {nx}x{ny} has no pixels")));
    }
    let n_det = geom.n_detector_pixels;
    let r = geom.source_radius;
    let magnification = r / (r + geom.detector_radius);
    let a = geom.detector_pitch() * magnification;
    let virtual_pos: Vec<f64> = (0..n_det)
        .map(|k| geom.detector_offset(k) * magnification)
        .collect();
    let kernel = ramp_kernel(n_det, a, filter);

    let angles: Vec<f64> = geom.angles_deg.iter().map(|d| d.to_radians()).collect();
    let redundancy = Redundancy::new(&geom.angles_deg);
    let d_beta = redundancy.step.to_radians();

    let grid = PixelGrid { nx, ny, fov };
    let mut image = vec![0.0; nx * ny];
    let mut weighted = vec![0.0; n_det];
    let mut filtered = vec![0.0; n_det];
    for (i, &beta) in angles.iter().enumerate() {
        let row = &sinogram[i * n_det..(i + 1) * n_det];
        for k in 0..n_det {
            let s = virtual_pos[k];
            let cosine = r / (r * r + s * s).sqrt();
            let w = redundancy.weight(geom.angles_deg[i], (s / r).atan().to_degrees());
            weighted[k] = row[k] * cosine * w;
        }
        for (n, out) in filtered.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (k, &v) in weighted.iter().enumerate() {
                if v != 0.0 {
                    acc += v * kernel[n_det - 1 + n - k];
                }
            }
            *out = a * acc;
        }

        let (sin, cos) = beta.sin_cos();
        for iy in 0..ny {
            for ix in 0..nx {
                let [x, y] = grid.center(ix, iy);
                let depth = r - (x * cos + y * sin);
                let lateral = -x * sin + y * cos;
                let s = r * lateral / depth;
                let u = (s - virtual_pos[0]) / a;
                if u < 0.0 || u > (n_det - 1) as f64 {
                    continue;
                }
                let k0 = (u.floor() as usize).min(n_det.saturating_sub(2));
                let frac = u - k0 as f64;
                let q = if n_det == 1 {
                    filtered[0]
                } else {
                    (1.0 - frac) * filtered[k0] + frac * filtered[k0 + 1]
                };
                image[iy * nx + ix] += d_beta * r * r / (depth * depth) * q;
            }
        }
    }
    Lattice2D::new(nx, ny, grid.dx(), grid.dy(), image)
}

/// Discrete ramp filter on spacing `a`, indices `−(n−1)..=(n−1)` stored at
/// offset `n − 1`.
fn ramp_kernel(n: usize, a: f64, filter: Filter) -> Vec<f64> {
    let len = 2 * n - 1;
    let ram_lak = |k: i64| -> f64 {
        if k == 0 {
            1.0 / (4.0 * a * a)
        } else if k % 2 == 0 {
            0.0
        } else {
            -1.0 / (PI * PI * (k * k) as f64 * a * a)
        }
    };
    let centre = n as i64 - 1;
    (0..len as i64)
        .map(|i| {
            let k = i - centre;
            match filter {
                Filter::RamLak => ram_lak(k),
                Filter::Hann => 0.25 * ram_lak(k - 1) + 0.5 * ram_lak(k) + 0.25 * ram_lak(k + 1),
            }
        })
        .collect()
}

/// Redundancy weights for the sampled source angles.
struct Redundancy {
    full: bool,
    /// Angular step represented by each projection, degrees.
    step: f64,
    start: f64,
    end: f64,
}

impl Redundancy {
    fn new(angles_deg: &[f64]) -> Self {
        let lo = angles_deg.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = angles_deg.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let n = angles_deg.len();
        let step = if n > 1 { (hi - lo) / (n - 1) as f64 } else { 360.0 };
        let full = hi - lo + step >= 360.0 - 1e-9;
        if full {
            return Self {
                full,
                step: 360.0 / n as f64,
                start: lo,
                end: hi,
            };
        }
        // each projection stands for half a step either side
        Self {
            full,
            step,
            start: lo - 0.5 * step,
            end: hi + 0.5 * step,
        }
    }

    fn coverage(&self, beta: f64) -> f64 {
        let mut b = beta;
        while b < self.start {
            b += 360.0;
        }
        while b > self.start + 360.0 {
            b -= 360.0;
        }
        if b > self.end {
            return 0.0;
        }
        let taper = TAPER_DEG.min(0.25 * (self.end - self.start));
        let edge = (b - self.start).min(self.end - b);
        if edge >= taper {
            1.0
        } else {
            (0.5 * PI * edge / taper).sin().powi(2)
        }
    }

    fn weight(&self, beta: f64, gamma: f64) -> f64 {
        if self.full {
            return 0.5;
        }
        let c = self.coverage(beta);
        let conj = self.coverage(beta + 180.0 - 2.0 * gamma);
        if c + conj == 0.0 {
            0.0
        } else {
            c / (c + conj)
        }
    }
}
