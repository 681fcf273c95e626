//! Forward models `m = A X + e`: 1D convolution, 2D fan-beam ray tracing and
//! additive Gaussian noise.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::operator::SparseOperator;

/// Diagonal Gaussian measurement noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    pub stddev: f64,
}

impl NoiseModel {
    pub fn new(stddev: f64) -> Result<Self> {
        if !(stddev > 0.0 && stddev.is_finite()) {
            return Err(Error::domain("stddev", stddev, "must be positive and finite"));
        }
        Ok(Self { stddev })
    }
}

/// Adds white noise with standard deviation `level · max |m_clean|`.
pub fn add_noise<R: Rng + ?Sized>(
    m_clean: &[f64],
    level: f64,
    rng: &mut R,
) -> Result<(Vec<f64>, NoiseModel)> {
    if !(level > 0.0 && level.is_finite()) {
        return Err(Error::domain("level", level, "must be positive"));
    }
    let peak = m_clean.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if peak == 0.0 {
        return Err(Error::DegenerateSignal(
            "noise level is relative to an all-zero signal",
        ));
    }
    let noise = NoiseModel::new(level * peak)?;
    let m = m_clean
        .iter()
        .map(|&v| v + noise.stddev * rng.sample::<f64, _>(StandardNormal))
        .collect();
    Ok((m, noise))
}

/// Sample points `t_j = j / (n − 1)` of the unit interval.
pub fn unit_grid(n: usize) -> Vec<f64> {
    let last = (n.max(2) - 1) as f64;
    (0..n).map(|j| j as f64 / last).collect()
}

/// Discrete convolution with the raised-cosine kernel
/// `k(s) ∝ cos(π s / w)` on `|s| < w/2`, sampled on the grid `t_j = j h`,
/// `h = 1/(n − 1)`.
///
/// The sampled taps are normalized to sum to one, so interior rows
/// reproduce constants exactly; rows near the ends are clipped and not
/// renormalized.
pub fn build_convolution_operator(n: usize, kernel_width: f64) -> Result<SparseOperator> {
    if n < 2 {
        return Err(Error::Size(format!("convolution grid needs n >= 2, got {n}")));
    }
    if !(kernel_width > 0.0 && kernel_width < 1.0) {
        return Err(Error::domain("kernel_width", kernel_width, "must lie in (0, 1)"));
    }
    let h = 1.0 / (n - 1) as f64;
    let half = 0.5 * kernel_width;
    let taps: Vec<f64> = (0..)
        .map(|k| k as f64 * h)
        .take_while(|&s| s < half * (1.0 - 1e-12))
        .map(|s| (std::f64::consts::PI * s / kernel_width).cos())
        .collect();
    let total = taps[0] + 2.0 * taps[1..].iter().sum::<f64>();
    let reach = taps.len() - 1;

    let mut triplets = Vec::with_capacity(n * (2 * reach + 1));
    for i in 0..n {
        let lo = i.saturating_sub(reach);
        let hi = (i + reach).min(n - 1);
        for j in lo..=hi {
            triplets.push((i, j, taps[i.abs_diff(j)] / total));
        }
    }
    SparseOperator::from_triplets(n, n, triplets)
}

/// Flat-detector fan-beam scanner.
///
/// The source sits at `source_radius · (cos β, sin β)` for each angle β
/// (degrees, counter-clockwise from +x). The detector centre is
/// diametrically opposite at distance `detector_radius`, perpendicular to
/// the source–origin line, with pixel `k` centred at offset
/// `−w/2 + (k + ½) w/N` along `(−sin β, cos β)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FanBeamGeometry {
    pub source_radius: f64,
    pub detector_radius: f64,
    pub detector_width: f64,
    pub n_detector_pixels: usize,
    pub angles_deg: Vec<f64>,
}

impl FanBeamGeometry {
    /// `n_angles` source positions evenly spanning `[start_deg, end_deg]`.
    pub fn with_angle_span(
        source_radius: f64,
        detector_radius: f64,
        detector_width: f64,
        n_detector_pixels: usize,
        start_deg: f64,
        end_deg: f64,
        n_angles: usize,
    ) -> Self {
        let angles_deg = match n_angles {
            0 => Vec::new(),
            1 => vec![start_deg],
            _ => {
                let step = (end_deg - start_deg) / (n_angles - 1) as f64;
                (0..n_angles).map(|k| start_deg + k as f64 * step).collect()
            }
        };
        Self {
            source_radius,
            detector_radius,
            detector_width,
            n_detector_pixels,
            angles_deg,
        }
    }

    /// `n_angles` source positions covering the full circle.
    pub fn full_circle(
        source_radius: f64,
        detector_radius: f64,
        detector_width: f64,
        n_detector_pixels: usize,
        n_angles: usize,
    ) -> Self {
        let step = 360.0 / n_angles as f64;
        Self {
            source_radius,
            detector_radius,
            detector_width,
            n_detector_pixels,
            angles_deg: (0..n_angles).map(|k| k as f64 * step).collect(),
        }
    }

    /// Checks the geometry against an image domain `[−fov, fov]²`: all
    /// lengths positive and the source outside the image.
    pub fn validate(&self, fov: f64) -> Result<()> {
        for (name, v) in [
            ("source_radius", self.source_radius),
            ("detector_radius", self.detector_radius),
            ("detector_width", self.detector_width),
            ("fov", fov),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::domain(name, v, "must be positive and finite"));
            }
        }
        if self.n_detector_pixels == 0 {
            return Err(Error::Size("detector needs at least one pixel".into()));
        }
        if self.angles_deg.is_empty() {
            return Err(Error::Size("geometry has no angles".into()));
        }
        if self.source_radius <= fov * std::f64::consts::SQRT_2 {
            return Err(Error::domain(
                "source_radius",
                self.source_radius,
                "source must lie outside the image domain",
            ));
        }
        Ok(())
    }

    pub fn n_rays(&self) -> usize {
        self.angles_deg.len() * self.n_detector_pixels
    }

    pub fn detector_pitch(&self) -> f64 {
        self.detector_width / self.n_detector_pixels as f64
    }

    /// Offset of detector pixel `k` from the detector centre.
    pub fn detector_offset(&self, k: usize) -> f64 {
        -0.5 * self.detector_width + (k as f64 + 0.5) * self.detector_pitch()
    }

    /// Half-angle of the fan, radians.
    pub fn fan_half_angle(&self) -> f64 {
        (0.5 * self.detector_width / (self.source_radius + self.detector_radius)).atan()
    }

    /// Radius of the circle seen by every projection.
    pub fn fov_radius(&self) -> f64 {
        self.source_radius * self.fan_half_angle().sin()
    }

    /// Endpoints (source, detector pixel centre) of ray `(angle, k)`.
    pub fn ray(&self, angle: usize, k: usize) -> ([f64; 2], [f64; 2]) {
        let beta = self.angles_deg[angle].to_radians();
        let (sin, cos) = beta.sin_cos();
        let source = [self.source_radius * cos, self.source_radius * sin];
        let s = self.detector_offset(k);
        let detector = [
            -self.detector_radius * cos - s * sin,
            -self.detector_radius * sin + s * cos,
        ];
        (source, detector)
    }
}

/// Fan-beam system matrix plus the rays that missed the image.
#[derive(Debug, Clone)]
pub struct FanBeamSystem {
    pub operator: SparseOperator,
    pub empty_rays: Vec<usize>,
}

/// One row per `(angle, detector pixel)` (row `angle · N + k`); entries are
/// the exact intersection lengths of each ray with the pixels of an
/// `nx × ny` image on `[−fov, fov]²`.
pub fn build_fanbeam_operator(
    geom: &FanBeamGeometry,
    nx: usize,
    ny: usize,
    fov: f64,
) -> Result<FanBeamSystem> {
    geom.validate(fov)?;
    if nx == 0 || ny == 0 {
        return Err(Error::Size(format!("image {nx}x{ny} has no pixels")));
    }
    let grid = PixelGrid { nx, ny, fov };
    let mut triplets = Vec::new();
    let mut empty_rays = Vec::new();
    let mut buffer = Vec::new();
    for a in 0..geom.angles_deg.len() {
        for k in 0..geom.n_detector_pixels {
            let row = a * geom.n_detector_pixels + k;
            let (src, det) = geom.ray(a, k);
            buffer.clear();
            grid.trace(src, det, &mut buffer);
            if buffer.is_empty() {
                empty_rays.push(row);
            }
            triplets.extend(buffer.iter().map(|&(pixel, len)| (row, pixel, len)));
        }
    }
    if !empty_rays.is_empty() {
        log::warn!("{} of {} rays miss the image", empty_rays.len(), geom.n_rays());
    }
    Ok(FanBeamSystem {
        operator: SparseOperator::from_triplets(geom.n_rays(), nx * ny, triplets)?,
        empty_rays,
    })
}

/// Square-pixel image on `[−fov, fov]²`, row 0 at the top.
#[derive(Debug, Clone, Copy)]
pub struct PixelGrid {
    pub nx: usize,
    pub ny: usize,
    pub fov: f64,
}

impl PixelGrid {
    pub fn dx(&self) -> f64 {
        2.0 * self.fov / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        2.0 * self.fov / self.ny as f64
    }

    /// Centre of pixel `(ix, iy)`.
    pub fn center(&self, ix: usize, iy: usize) -> [f64; 2] {
        [
            -self.fov + (ix as f64 + 0.5) * self.dx(),
            self.fov - (iy as f64 + 0.5) * self.dy(),
        ]
    }

    /// Appends `(pixel, length)` for every pixel the segment `a → b` crosses,
    /// walking cell boundaries in parametric order.
    pub fn trace(&self, a: [f64; 2], b: [f64; 2], out: &mut Vec<(usize, f64)>) {
        let length = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
        if length == 0.0 {
            return;
        }
        // grid coordinates: x to the right, y downward, one unit per pixel
        let g0 = [(a[0] + self.fov) / self.dx(), (self.fov - a[1]) / self.dy()];
        let g1 = [(b[0] + self.fov) / self.dx(), (self.fov - b[1]) / self.dy()];
        let gd = [g1[0] - g0[0], g1[1] - g0[1]];
        let dims = [self.nx as f64, self.ny as f64];

        let (mut t_enter, mut t_exit) = (0.0f64, 1.0f64);
        for axis in 0..2 {
            if gd[axis] == 0.0 {
                if g0[axis] < 0.0 || g0[axis] > dims[axis] {
                    return;
                }
            } else {
                let ta = (0.0 - g0[axis]) / gd[axis];
                let tb = (dims[axis] - g0[axis]) / gd[axis];
                t_enter = t_enter.max(ta.min(tb));
                t_exit = t_exit.min(ta.max(tb));
            }
        }
        if t_enter >= t_exit {
            return;
        }

        let limits = [self.nx as i64, self.ny as i64];
        let mut cell = [0i64; 2];
        let mut step = [0i64; 2];
        let mut t_max = [f64::INFINITY; 2];
        let mut t_delta = [f64::INFINITY; 2];
        for axis in 0..2 {
            let p = g0[axis] + t_enter * gd[axis];
            let c = if gd[axis] >= 0.0 {
                p.floor()
            } else {
                p.ceil() - 1.0
            };
            cell[axis] = (c as i64).clamp(0, limits[axis] - 1);
            if gd[axis] > 0.0 {
                step[axis] = 1;
                t_delta[axis] = 1.0 / gd[axis];
                t_max[axis] = ((cell[axis] + 1) as f64 - g0[axis]) / gd[axis];
            } else if gd[axis] < 0.0 {
                step[axis] = -1;
                t_delta[axis] = -1.0 / gd[axis];
                t_max[axis] = (cell[axis] as f64 - g0[axis]) / gd[axis];
            }
        }

        let mut t = t_enter;
        loop {
            let t_next = t_max[0].min(t_max[1]).min(t_exit);
            if t_next > t {
                let pixel = cell[1] as usize * self.nx + cell[0] as usize;
                out.push((pixel, (t_next - t) * length));
            }
            if t_next >= t_exit {
                break;
            }
            for axis in 0..2 {
                if t_max[axis] == t_next {
                    cell[axis] += step[axis];
                    t_max[axis] += t_delta[axis];
                }
            }
            if cell.iter().zip(&limits).any(|(&c, &l)| c < 0 || c >= l) {
                break;
            }
            t = t_next;
        }
    }
}
