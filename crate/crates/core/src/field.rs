//! Discretized unknowns: values on a 1D grid or a 2D lattice.

use crate::error::{Error, Result};

/// Shape of the unknown vector.
///
/// Lattice storage is row-major: site `iy * nx + ix`, where `ix` runs along
/// the first coordinate (step `h`) and `iy` along the second (step `h′`).
/// Row `iy = 0` is the top of an image.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    Line { n: usize },
    Grid { nx: usize, ny: usize },
}

impl Layout {
    pub fn len(&self) -> usize {
        match *self {
            Layout::Line { n } => n,
            Layout::Grid { nx, ny } => nx * ny,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Samples `X_j` at `t = j h`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid1D {
    pub h: f64,
    pub values: Vec<f64>,
}

impl Grid1D {
    pub fn new(h: f64, values: Vec<f64>) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::domain("h", h, "step must be positive"));
        }
        Ok(Self { h, values })
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn layout(&self) -> Layout {
        Layout::Line { n: self.n() }
    }

    /// Abscissa of sample `j`.
    pub fn t(&self, j: usize) -> f64 {
        j as f64 * self.h
    }
}

/// Samples `X_{j,j′}` on the lattice `(h j, h′ j′)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Lattice2D {
    pub nx: usize,
    pub ny: usize,
    pub h: f64,
    pub h_prime: f64,
    pub values: Vec<f64>,
}

impl Lattice2D {
    pub fn new(nx: usize, ny: usize, h: f64, h_prime: f64, values: Vec<f64>) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(Error::Size(format!("lattice {nx}x{ny} has no sites")));
        }
        if values.len() != nx * ny {
            return Err(Error::Dimension {
                what: "lattice values",
                expected: nx * ny,
                actual: values.len(),
            });
        }
        for (name, step) in [("h", h), ("h_prime", h_prime)] {
            if !(step > 0.0 && step.is_finite()) {
                return Err(Error::domain(name, step, "step must be positive"));
            }
        }
        Ok(Self {
            nx,
            ny,
            h,
            h_prime,
            values,
        })
    }

    pub fn zeros(nx: usize, ny: usize, h: f64, h_prime: f64) -> Result<Self> {
        Self::new(nx, ny, h, h_prime, vec![0.0; nx * ny])
    }

    pub fn layout(&self) -> Layout {
        Layout::Grid {
            nx: self.nx,
            ny: self.ny,
        }
    }

    pub fn get(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.nx + ix]
    }

    /// Row `iy` as a slice.
    pub fn row(&self, iy: usize) -> &[f64] {
        &self.values[iy * self.nx..(iy + 1) * self.nx]
    }

    /// Column `ix`, top to bottom.
    pub fn column(&self, ix: usize) -> Vec<f64> {
        (0..self.ny).map(|iy| self.get(ix, iy)).collect()
    }

    /// Drops `border` sites from every edge.
    pub fn crop(&self, border: usize) -> Result<Self> {
        if 2 * border >= self.nx || 2 * border >= self.ny {
            return Err(Error::Size(format!(
                "cannot crop {border} from a {}x{} lattice",
                self.nx, self.ny
            )));
        }
        let nx = self.nx - 2 * border;
        let ny = self.ny - 2 * border;
        let values = (border..border + ny)
            .flat_map(|iy| self.row(iy)[border..border + nx].iter().copied())
            .collect();
        Self::new(nx, ny, self.h, self.h_prime, values)
    }
}

/// Anything the difference priors can be evaluated on.
pub trait Field {
    fn layout(&self) -> Layout;
    fn values(&self) -> &[f64];
}

impl Field for Grid1D {
    fn layout(&self) -> Layout {
        Grid1D::layout(self)
    }

    fn values(&self) -> &[f64] {
        &self.values
    }
}

impl Field for Lattice2D {
    fn layout(&self) -> Layout {
        Lattice2D::layout(self)
    }

    fn values(&self) -> &[f64] {
        &self.values
    }
}
