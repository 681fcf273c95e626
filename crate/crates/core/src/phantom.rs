//! Ground-truth signals: the Shepp–Logan head phantom and a piecewise
//! constant 1D signal.

use crate::error::{Error, Result};
use crate::field::{Grid1D, Lattice2D};
use crate::forward::{unit_grid, PixelGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SheppLoganVariant {
    /// Higher-contrast intensities (Toft); values in `[0, 1]`.
    #[default]
    Modified,
    /// Original intensities; values in `[0, 2]`.
    Classic,
}

/// Ellipse `(a, b, x0, y0, φ°)`: semi-axes, centre and rotation.
const ELLIPSES: [(f64, f64, f64, f64, f64); 10] = [
    (0.69, 0.92, 0.0, 0.0, 0.0),
    (0.6624, 0.874, 0.0, -0.0184, 0.0),
    (0.11, 0.31, 0.22, 0.0, -18.0),
    (0.16, 0.41, -0.22, 0.0, 18.0),
    (0.21, 0.25, 0.0, 0.35, 0.0),
    (0.046, 0.046, 0.0, 0.1, 0.0),
    (0.046, 0.046, 0.0, -0.1, 0.0),
    (0.046, 0.023, -0.08, -0.605, 0.0),
    (0.023, 0.023, 0.0, -0.606, 0.0),
    (0.023, 0.046, 0.06, -0.605, 0.0),
];

const CLASSIC: [f64; 10] = [2.0, -0.98, -0.02, -0.02, 0.01, 0.01, 0.01, 0.01, 0.01, 0.01];
const MODIFIED: [f64; 10] = [1.0, -0.8, -0.2, -0.2, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1];

/// Phantom value at `(x, y)` in `[−1, 1]²`, `y` pointing up.
pub fn shepp_logan_value(x: f64, y: f64, variant: SheppLoganVariant) -> f64 {
    let intensities = match variant {
        SheppLoganVariant::Modified => &MODIFIED,
        SheppLoganVariant::Classic => &CLASSIC,
    };
    ELLIPSES
        .iter()
        .zip(intensities)
        .filter(|((a, b, x0, y0, phi), _)| {
            let (sin, cos) = phi.to_radians().sin_cos();
            let dx = x - x0;
            let dy = y - y0;
            let u = dx * cos + dy * sin;
            let v = -dx * sin + dy * cos;
            (u / a).powi(2) + (v / b).powi(2) <= 1.0
        })
        .map(|(_, rho)| rho)
        .sum()
}

/// Samples the phantom at pixel centres of an `nx × ny` image on `[−1, 1]²`.
pub fn shepp_logan(nx: usize, ny: usize, variant: SheppLoganVariant) -> Result<Lattice2D> {
    if nx == 0 || ny == 0 {
        return Err(Error::Size(format!("image {nx}x{ny} has no pixels")));
    }
    let grid = PixelGrid { nx, ny, fov: 1.0 };
    let mut values = Vec::with_capacity(nx * ny);
    for iy in 0..ny {
        for ix in 0..nx {
            let [x, y] = grid.center(ix, iy);
            values.push(shepp_logan_value(x, y, variant));
        }
    }
    Lattice2D::new(nx, ny, grid.dx(), grid.dy(), values)
}

const BREAKS: [f64; 4] = [0.15, 0.35, 0.6, 0.85];
const LEVELS: [f64; 5] = [0.0, 1.0, 0.3, -0.5, 0.0];

/// Piecewise-constant test signal at `t ∈ [0, 1]`; each piece is closed on
/// the left.
pub fn piecewise_value(t: f64) -> f64 {
    LEVELS[BREAKS.iter().take_while(|&&b| t >= b).count()]
}

/// The test signal on `t_j = j/(n−1)`.
pub fn piecewise_signal_1d(n: usize) -> Result<Grid1D> {
    if n < 2 {
        return Err(Error::Size(format!("signal needs n >= 2, got {n}")));
    }
    let t = unit_grid(n);
    Grid1D::new(1.0 / (n - 1) as f64, t.into_iter().map(piecewise_value).collect())
}
