//! Difference priors on 1D grids and 2D lattices.
//!
//! Every prior is a product over increments `d = X_site − X_neighbour` of a
//! one-dimensional log-density term:
//!
//! | family   | term for scale γ              |
//! |----------|-------------------------------|
//! | Cauchy   | `ln γ − ln(γ² + d²)`          |
//! | Gaussian | `−d² / (4γ²)` (Var = 2γ²)     |
//! | TV       | `−reg · |d|`                  |
//!
//! The Cauchy and Gaussian scales follow the α-stable lattice scaling in
//! [`scale_for_direction`]. Densities are unnormalized.
//!
//! An axis of length one carries no increments, so a single-row lattice is
//! exactly a 1D grid. The zero boundary anchors the first site of every
//! non-degenerate axis to a phantom zero, as a random walk started at the
//! origin; the far end is left free.

use crate::error::{Error, Result};
use crate::field::{Field, Grid1D, Lattice2D, Layout};

mod modality;

pub use modality::{analyze_modality, conditional_site_density, Modality, ModalityReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PriorFamily {
    Cauchy,
    Gaussian,
    Tv,
}

impl PriorFamily {
    /// Stability index of the increment law; `None` for TV.
    pub fn alpha(self) -> Option<f64> {
        match self {
            PriorFamily::Cauchy => Some(1.0),
            PriorFamily::Gaussian => Some(2.0),
            PriorFamily::Tv => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PriorFamily::Cauchy => "cauchy",
            PriorFamily::Gaussian => "gaussian",
            PriorFamily::Tv => "tv",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Boundary {
    Zero,
    Free,
}

/// A difference prior: family, regularization scale (λ for Cauchy, σ for
/// Gaussian, weight for TV), lattice steps and boundary condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriorModel {
    pub family: PriorFamily,
    pub reg: f64,
    pub h: f64,
    pub h_prime: f64,
    pub boundary: Boundary,
}

impl PriorModel {
    pub fn new(family: PriorFamily, reg: f64, h: f64, h_prime: f64, boundary: Boundary) -> Result<Self> {
        let model = Self {
            family,
            reg,
            h,
            h_prime,
            boundary,
        };
        model.validate()?;
        Ok(model)
    }

    /// 1D prior; `h_prime` is set to one.
    pub fn line(family: PriorFamily, reg: f64, h: f64, boundary: Boundary) -> Result<Self> {
        Self::new(family, reg, h, 1.0, boundary)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.reg > 0.0 && self.reg.is_finite()) {
            return Err(Error::domain("reg", self.reg, "must be positive and finite"));
        }
        for (name, step) in [("h", self.h), ("h_prime", self.h_prime)] {
            if !(step > 0.0 && step.is_finite()) {
                return Err(Error::domain(name, step, "step must be positive"));
            }
        }
        Ok(())
    }

    /// Precomputes the directional scales for a layout.
    pub fn bind(&self, layout: Layout) -> Result<BoundPrior> {
        self.validate()?;
        let (nx, ny) = match layout {
            Layout::Line { n } => (n, 1),
            Layout::Grid { nx, ny } => (nx, ny),
        };
        if nx == 0 || ny == 0 {
            return Err(Error::Size("prior bound to an empty layout".into()));
        }
        let (scale_x, scale_y) = match (self.family.alpha(), layout) {
            (None, _) => (self.reg, self.reg),
            (Some(alpha), Layout::Line { .. }) => (scale_for_direction(alpha, self.reg, self.h, 1.0)?, 0.0),
            (Some(alpha), Layout::Grid { .. }) => (
                scale_for_direction(alpha, self.reg, self.h, self.h_prime)?,
                scale_for_direction(alpha, self.reg, self.h_prime, self.h)?,
            ),
        };
        Ok(BoundPrior {
            family: self.family,
            reg: self.reg,
            boundary: self.boundary,
            nx,
            ny,
            scale_x,
            scale_y,
        })
    }
}

/// Stable scale of an increment taken along a direction with step
/// `h_along`, on a lattice whose perpendicular step is `h_perp`:
/// `reg · h_along^{1/α} · h_perp^{−(α−1)/α}`.
///
/// At α = 1 this is `reg · h_along`; at α = 2 it is
/// `reg · √(h_along / h_perp)`. A 1D walk is the case `h_perp = 1`.
pub fn scale_for_direction(alpha: f64, reg: f64, h_along: f64, h_perp: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(Error::domain("alpha", alpha, "must lie in (0, 2]"));
    }
    if !(reg > 0.0 && reg.is_finite()) {
        return Err(Error::domain("reg", reg, "must be positive and finite"));
    }
    for (name, step) in [("h_along", h_along), ("h_perp", h_perp)] {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::domain(name, step, "step must be positive"));
        }
    }
    Ok(if alpha == 1.0 {
        reg * h_along
    } else if alpha == 2.0 {
        reg * (h_along / h_perp).sqrt()
    } else {
        reg * h_along.powf(1.0 / alpha) * h_perp.powf(-(alpha - 1.0) / alpha)
    })
}

/// A prior with its directional scales resolved for one layout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundPrior {
    family: PriorFamily,
    reg: f64,
    boundary: Boundary,
    nx: usize,
    ny: usize,
    scale_x: f64,
    scale_y: f64,
}

impl BoundPrior {
    pub fn family(&self) -> PriorFamily {
        self.family
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Scales of horizontal and vertical increments.
    pub fn scales(&self) -> (f64, f64) {
        (self.scale_x, self.scale_y)
    }

    /// Log-density contribution of one increment.
    #[inline]
    pub fn term(&self, d: f64, scale: f64) -> f64 {
        match self.family {
            PriorFamily::Cauchy => scale.ln() - (scale * scale + d * d).ln(),
            PriorFamily::Gaussian => -d * d / (4.0 * scale * scale),
            PriorFamily::Tv => -self.reg * d.abs(),
        }
    }

    /// Derivative of [`term`](Self::term) with respect to `d`.
    #[inline]
    pub fn term_derivative(&self, d: f64, scale: f64) -> f64 {
        match self.family {
            PriorFamily::Cauchy => -2.0 * d / (scale * scale + d * d),
            PriorFamily::Gaussian => -d / (2.0 * scale * scale),
            PriorFamily::Tv => -self.reg * d.signum(),
        }
    }

    /// Curvature `w` of the quadratic `w · d²` that majorizes `−term` at the
    /// current increment `d`, up to a constant. Exact for Gaussian.
    #[inline]
    pub fn majorizer_weight(&self, d: f64, scale: f64) -> Result<f64> {
        match self.family {
            PriorFamily::Cauchy => Ok(1.0 / (scale * scale + d * d)),
            PriorFamily::Gaussian => Ok(1.0 / (4.0 * scale * scale)),
            PriorFamily::Tv => Err(Error::Unsupported("TV prior has no smooth majorizer")),
        }
    }

    /// Calls `f(site, other, scale)` once per increment `x[site] − x[other]`;
    /// `other = None` is the phantom zero of the zero boundary.
    pub fn for_each_increment(&self, mut f: impl FnMut(usize, Option<usize>, f64)) {
        let (nx, ny) = (self.nx, self.ny);
        let zero = self.boundary == Boundary::Zero;
        if nx > 1 {
            for iy in 0..ny {
                let row = iy * nx;
                if zero {
                    f(row, None, self.scale_x);
                }
                for ix in 1..nx {
                    f(row + ix, Some(row + ix - 1), self.scale_x);
                }
            }
        }
        if ny > 1 {
            if zero {
                for ix in 0..nx {
                    f(ix, None, self.scale_y);
                }
            }
            for iy in 1..ny {
                for ix in 0..nx {
                    let site = iy * nx + ix;
                    f(site, Some(site - nx), self.scale_y);
                }
            }
        }
    }

    /// Number of increments.
    pub fn increment_count(&self) -> usize {
        let mut count = 0;
        self.for_each_increment(|_, _, _| count += 1);
        count
    }

    /// Visits the up to four increments touching `site` as `(neighbour, scale)`.
    #[inline]
    pub fn for_each_neighbour(&self, site: usize, mut f: impl FnMut(Option<usize>, f64)) {
        let (nx, ny) = (self.nx, self.ny);
        let ix = site % nx;
        let iy = site / nx;
        let zero = self.boundary == Boundary::Zero;
        if nx > 1 {
            if ix > 0 {
                f(Some(site - 1), self.scale_x);
            } else if zero {
                f(None, self.scale_x);
            }
            if ix + 1 < nx {
                f(Some(site + 1), self.scale_x);
            }
        }
        if ny > 1 {
            if iy > 0 {
                f(Some(site - nx), self.scale_y);
            } else if zero {
                f(None, self.scale_y);
            }
            if iy + 1 < ny {
                f(Some(site + nx), self.scale_y);
            }
        }
    }

    pub fn log_prior(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.len());
        let mut total = 0.0;
        self.for_each_increment(|a, b, scale| {
            let d = values[a] - b.map_or(0.0, |b| values[b]);
            total += self.term(d, scale);
        });
        total
    }

    /// `log_prior(x with site ← new_value) − log_prior(x)` from the
    /// increments touching `site` only.
    #[inline]
    pub fn delta(&self, values: &[f64], site: usize, new_value: f64) -> f64 {
        let old = values[site];
        match self.family {
            PriorFamily::Cauchy => {
                let mut ratio = 1.0;
                self.for_each_neighbour(site, |other, scale| {
                    let v = other.map_or(0.0, |o| values[o]);
                    let s2 = scale * scale;
                    let d_old = old - v;
                    let d_new = new_value - v;
                    ratio *= (s2 + d_old * d_old) / (s2 + d_new * d_new);
                });
                ratio.ln()
            }
            PriorFamily::Gaussian => {
                let mut total = 0.0;
                self.for_each_neighbour(site, |other, scale| {
                    let v = other.map_or(0.0, |o| values[o]);
                    let d_old = old - v;
                    let d_new = new_value - v;
                    total -= (d_new * d_new - d_old * d_old) / (4.0 * scale * scale);
                });
                total
            }
            PriorFamily::Tv => {
                let mut total = 0.0;
                self.for_each_neighbour(site, |other, _| {
                    let v = other.map_or(0.0, |o| values[o]);
                    total += (old - v).abs() - (new_value - v).abs();
                });
                self.reg * total
            }
        }
    }
}

pub fn log_prior_1d(x: &Grid1D, prior: &PriorModel) -> Result<f64> {
    if x.n() < 2 {
        return Err(Error::Size(format!("1D prior needs n >= 2, got {}", x.n())));
    }
    Ok(prior.bind(x.layout())?.log_prior(&x.values))
}

/// Requires at least two sites; an axis of length one is degenerate.
pub fn log_prior_2d(x: &Lattice2D, prior: &PriorModel) -> Result<f64> {
    if x.nx * x.ny < 2 {
        return Err(Error::Size(format!(
            "2D prior needs at least two sites, got {}x{}",
            x.nx, x.ny
        )));
    }
    Ok(prior.bind(x.layout())?.log_prior(&x.values))
}

pub fn delta_log_prior<F: Field + ?Sized>(
    x: &F,
    site: usize,
    new_value: f64,
    prior: &PriorModel,
) -> Result<f64> {
    let values = x.values();
    if site >= values.len() {
        return Err(Error::Index {
            index: site,
            len: values.len(),
        });
    }
    Ok(prior.bind(x.layout())?.delta(values, site, new_value))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(values: &[f64]) -> Grid1D {
        Grid1D::new(1.0, values.to_vec()).unwrap()
    }

    #[test]
    fn constant_signal_at_unit_scale_is_zero() {
        let prior = PriorModel::line(PriorFamily::Cauchy, 1.0, 1.0, Boundary::Free).unwrap();
        let lp = log_prior_1d(&grid(&[3.0; 5]), &prior).unwrap();
        assert_eq!(lp, 0.0);
        // λh = 0.5: each of the four terms is ln(0.5) − ln(0.25) = ln 2
        let prior = PriorModel::line(PriorFamily::Cauchy, 5.0, 0.1, Boundary::Free).unwrap();
        let lp = log_prior_1d(&grid(&[3.0; 5]), &prior).unwrap();
        assert!((lp - 4.0 * 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn one_dimensional_examples() {
        let tv = PriorModel::line(PriorFamily::Tv, 2.0, 1.0, Boundary::Free).unwrap();
        assert_eq!(log_prior_1d(&grid(&[0.0, 1.0]), &tv).unwrap(), -2.0);

        let cauchy = PriorModel::line(PriorFamily::Cauchy, 2.0, 1.0, Boundary::Free).unwrap();
        let lp = log_prior_1d(&grid(&[0.0, 3.0]), &cauchy).unwrap();
        assert!((lp - (2.0f64 / 13.0).ln()).abs() < 1e-14);
        assert!((lp + 1.8718).abs() < 1e-4);

        // Var = 2σ²h: σ = 1, h = 1, Δ = 2 → −4/4
        let gauss = PriorModel::line(PriorFamily::Gaussian, 1.0, 1.0, Boundary::Free).unwrap();
        assert_eq!(log_prior_1d(&grid(&[0.0, 2.0]), &gauss).unwrap(), -1.0);
    }

    #[test]
    fn zero_boundary_adds_the_first_increment() {
        let tv = PriorModel::line(PriorFamily::Tv, 1.0, 1.0, Boundary::Zero).unwrap();
        assert_eq!(log_prior_1d(&grid(&[2.0, 3.0]), &tv).unwrap(), -3.0);
    }

    #[test]
    fn short_grid_is_a_size_error() {
        let tv = PriorModel::line(PriorFamily::Tv, 1.0, 1.0, Boundary::Free).unwrap();
        assert!(matches!(log_prior_1d(&grid(&[1.0]), &tv), Err(Error::Size(_))));
    }

    #[test]
    fn two_dimensional_examples() {
        let tv = PriorModel::new(PriorFamily::Tv, 1.0, 1.0, 1.0, Boundary::Free).unwrap();
        let lat = Lattice2D::new(2, 2, 1.0, 1.0, vec![0.0, 0.0, 0.0, 1.0]).unwrap();
        assert_eq!(log_prior_2d(&lat, &tv).unwrap(), -2.0);

        // h = h′ = 0.5, λ = 2 → both directional scales are 1
        let cauchy = PriorModel::new(PriorFamily::Cauchy, 2.0, 0.5, 0.5, Boundary::Free).unwrap();
        let lat = Lattice2D::new(3, 3, 0.5, 0.5, vec![1.5; 9]).unwrap();
        assert_eq!(log_prior_2d(&lat, &cauchy).unwrap(), 0.0);
    }

    #[test]
    fn single_row_lattice_is_a_line() {
        let values = [0.3, -1.0, 2.5, 2.4];
        for family in [PriorFamily::Cauchy, PriorFamily::Gaussian, PriorFamily::Tv] {
            for boundary in [Boundary::Zero, Boundary::Free] {
                let p = PriorModel::new(family, 1.7, 0.2, 1.0, boundary).unwrap();
                let line = log_prior_1d(&Grid1D::new(0.2, values.to_vec()).unwrap(), &p).unwrap();
                let lat = Lattice2D::new(4, 1, 0.2, 1.0, values.to_vec()).unwrap();
                assert_eq!(log_prior_2d(&lat, &p).unwrap(), line);
            }
        }
        let p = PriorModel::new(PriorFamily::Tv, 1.0, 1.0, 1.0, Boundary::Free).unwrap();
        let two_by_one = Lattice2D::new(2, 1, 1.0, 1.0, vec![0.0, 1.0]).unwrap();
        assert_eq!(log_prior_2d(&two_by_one, &p).unwrap(), -1.0);
    }

    #[test]
    fn delta_matches_hand_evaluation() {
        // neighbours (−2, 2), old 0 → new 2, λh = 1
        let p = PriorModel::line(PriorFamily::Cauchy, 1.0, 1.0, Boundary::Free).unwrap();
        let x = grid(&[-2.0, 0.0, 2.0]);
        let d = delta_log_prior(&x, 1, 2.0, &p).unwrap();
        let want = -(17f64.ln()) + 2.0 * 5f64.ln();
        assert!((d - want).abs() < 1e-14);
        assert!((d - 0.3857).abs() < 1e-4);
        assert_eq!(delta_log_prior(&x, 1, 0.0, &p).unwrap(), 0.0);
        assert!(matches!(
            delta_log_prior(&x, 3, 0.0, &p),
            Err(Error::Index { index: 3, len: 3 })
        ));
    }

    #[test]
    fn scale_special_cases() {
        let lambda = 3.0;
        assert_eq!(scale_for_direction(1.0, lambda, 0.1, 7.0).unwrap(), lambda * 0.1);
        assert_eq!(scale_for_direction(2.0, 2.0, 1.0, 4.0).unwrap(), 1.0);
        // a 1D walk is the unit-perpendicular case: reg · h^{1/α}
        for alpha in [0.5, 1.0, 1.5, 2.0] {
            let s = scale_for_direction(alpha, 1.3, 0.25, 1.0).unwrap();
            assert!((s - 1.3 * 0.25f64.powf(1.0 / alpha)).abs() < 1e-15);
        }
        // the generic branch agrees with the closed forms
        let generic = |a: f64, h: f64, hp: f64| h.powf(1.0 / a) * hp.powf(-(a - 1.0) / a);
        assert!((generic(2.0, 0.3, 0.7) - (0.3f64 / 0.7).sqrt()).abs() < 1e-15);
        assert!(scale_for_direction(2.5, 1.0, 1.0, 1.0).is_err());
        assert!(scale_for_direction(1.0, 1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn increment_count_by_boundary() {
        let free = PriorModel::new(PriorFamily::Tv, 1.0, 1.0, 1.0, Boundary::Free).unwrap();
        let zero = PriorModel {
            boundary: Boundary::Zero,
            ..free
        };
        let layout = Layout::Grid { nx: 4, ny: 3 };
        assert_eq!(free.bind(layout).unwrap().increment_count(), 3 * 3 + 4 * 2);
        assert_eq!(zero.bind(layout).unwrap().increment_count(), 4 * 3 * 2);
    }
}
