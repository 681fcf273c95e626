//! Shape of the conditional Cauchy density of one site given neighbours at
//! `−a` and `+a`:
//!
//! `D(x) ∝ 1 / ((1 + (x − a)²)(1 + (x + a)²))`
//!
//! Writing the denominator as `P(x) = (1 + x² + a²)² − 4a²x²` gives
//! `P′(x) = 4x(1 + x² − a²)` and `D″(0) = −4(1 − a²) / (1 + a²)⁴`.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Modality {
    Unimodal,
    Flat,
    Bimodal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModalityReport {
    pub classification: Modality,
    pub second_derivative_at_zero: f64,
    /// Maximizers of `D`, ascending.
    pub modes: Vec<f64>,
}

pub fn conditional_site_density(a: f64, x: f64) -> f64 {
    let lo = x - a;
    let hi = x + a;
    1.0 / ((1.0 + lo * lo) * (1.0 + hi * hi))
}

pub fn analyze_modality(a: f64) -> ModalityReport {
    let a2 = a * a;
    let second_derivative_at_zero = -4.0 * (1.0 - a2) / (1.0 + a2).powi(4);
    let abs = a.abs();
    let classification = if abs < 1.0 {
        Modality::Unimodal
    } else if abs == 1.0 {
        Modality::Flat
    } else {
        Modality::Bimodal
    };
    let modes = match classification {
        Modality::Bimodal => {
            let m = (a2 - 1.0).sqrt();
            vec![-m, m]
        }
        _ => vec![0.0],
    };
    ModalityReport {
        classification,
        second_derivative_at_zero,
        modes,
    }
}
