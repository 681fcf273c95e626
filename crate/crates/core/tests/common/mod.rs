#![allow(dead_code)]

use std::f64::consts::PI;

/// Kolmogorov–Smirnov distance between the sample and a continuous CDF.
pub fn ks_one_sample(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter().enumerate().fold(0.0, |d, (i, &x)| {
        let f = cdf(x);
        d.max((f - i as f64 / n).abs())
            .max(((i + 1) as f64 / n - f).abs())
    })
}

/// Two-sample Kolmogorov–Smirnov distance.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// CDF of the symmetric stable law with characteristic function
/// `exp(−|t|^α)`, from Gil-Pelaez inversion
/// `F(x) = ½ + (1/π) ∫₀^∞ sin(xt)/t · exp(−t^α) dt`
/// by Simpson quadrature, tabulated and linearly interpolated.
pub struct StableCdf {
    xs: Vec<f64>,
    fs: Vec<f64>,
}

impl StableCdf {
    pub fn new(alpha: f64) -> Self {
        // exp(−t^α) is negligible well before t_max
        let t_max = 40f64.max(800f64.powf(1.0 / alpha));
        let intervals = 80_000;
        let h = t_max / intervals as f64;
        let weights: Vec<(f64, f64)> = (0..=intervals)
            .map(|k| {
                let t = k as f64 * h;
                let simpson = if k == 0 || k == intervals {
                    1.0
                } else if k % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                (t, simpson * h / 3.0 * (-t.powf(alpha)).exp())
            })
            .collect();
        let mut xs: Vec<f64> = (0..250).map(|i| i as f64 * 0.02).collect();
        xs.extend((0..=975).map(|i| 5.0 + i as f64 * 0.2));
        let fs = xs
            .iter()
            .map(|&x| {
                let integral: f64 = weights
                    .iter()
                    .map(|&(t, w)| if t == 0.0 { x * w } else { (x * t).sin() / t * w })
                    .sum();
                0.5 + integral / PI
            })
            .collect();
        Self { xs, fs }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let ax = x.abs();
        let f = match self.xs.partition_point(|&g| g < ax) {
            i if i == self.xs.len() => *self.fs.last().unwrap(),
            0 => self.fs[0],
            i => {
                let w = (ax - self.xs[i - 1]) / (self.xs[i] - self.xs[i - 1]);
                (1.0 - w) * self.fs[i - 1] + w * self.fs[i]
            }
        };
        if x < 0.0 {
            1.0 - f
        } else {
            f
        }
    }
}

/// `Φ(x / sd)` via statrs.
pub fn normal_cdf(x: f64, sd: f64) -> f64 {
    use statrs::distribution::{ContinuousCDF, Normal};
    Normal::new(0.0, sd).unwrap().cdf(x)
}
