//! MAP estimation by majorize–minimize Gauss–Newton.
//!
//! Each Cauchy term `ln(γ² + d²)` of the negative log-posterior is concave
//! in `d²`, so it is majorized at the current increment `d₀` by the
//! quadratic `d² / (γ² + d₀²)` plus a constant. Together with the exact
//! Gaussian likelihood this gives the positive semidefinite system
//!
//! ```text
//! (σ⁻² AᵀA + 2 LᵀWL) p = −∇f
//! ```
//!
//! solved matrix-free by Jacobi-preconditioned conjugate gradients. A
//! backtracking Armijo search along `p` keeps the objective monotone.

use crate::error::{Error, Result};
use crate::prior::{BoundPrior, PriorFamily};
use crate::sampler::Posterior;

#[derive(Debug, Clone, PartialEq)]
pub struct MapConfig {
    pub max_iters: usize,
    /// Stop once `‖∇f‖∞` falls below this.
    pub grad_tol: f64,
    /// Step shrink factor of the backtracking search, in (0, 1).
    pub shrink: f64,
    pub max_backtracks: usize,
    /// Sufficient-decrease constant of the Armijo test.
    pub armijo: f64,
    /// Relative residual at which the inner CG solve stops.
    pub linear_solver_tol: f64,
    pub max_cg_iters: usize,
}

impl Default for MapConfig {
    fn default() -> Self {
        Self {
            max_iters: 200,
            grad_tol: 1e-6,
            shrink: 0.5,
            max_backtracks: 40,
            armijo: 1e-4,
            linear_solver_tol: 1e-10,
            max_cg_iters: 5000,
        }
    }
}

impl MapConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 || self.max_backtracks == 0 || self.max_cg_iters == 0 {
            return Err(Error::Size("MAP iteration limits must be positive".into()));
        }
        if !(self.shrink > 0.0 && self.shrink < 1.0) {
            return Err(Error::domain("shrink", self.shrink, "must lie in (0, 1)"));
        }
        for (name, v) in [
            ("grad_tol", self.grad_tol),
            ("armijo", self.armijo),
            ("linear_solver_tol", self.linear_solver_tol),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::domain(name, v, "must be positive"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MapResult {
    pub x: Vec<f64>,
    /// Objective at the start and after every accepted step.
    pub trace: Vec<f64>,
    pub grad_norm: f64,
    pub iterations: usize,
    /// Whether the gradient tolerance was reached.
    pub converged: bool,
}

/// `½ σ⁻² ‖m − A x‖² − log_prior(x)`.
pub fn negative_log_posterior(x: &[f64], post: &Posterior) -> Result<f64> {
    Ok(-post.log_posterior(x)?)
}

/// Gradient of [`negative_log_posterior`]. TV is rejected.
pub fn gradient(x: &[f64], post: &Posterior) -> Result<Vec<f64>> {
    let res = post.residual(x)?;
    let mut g = vec![0.0; x.len()];
    if let Some(lik) = post.likelihood() {
        lik.operator.apply_transpose_into(&res, &mut g);
        let s2 = lik.noise.stddev * lik.noise.stddev;
        g.iter_mut().for_each(|v| *v = -*v / s2);
    }
    if let Some(prior) = post.bound_prior() {
        reject_tv(prior)?;
        prior.for_each_increment(|a, b, scale| {
            let d = x[a] - b.map_or(0.0, |b| x[b]);
            let t = prior.term_derivative(d, scale);
            g[a] -= t;
            if let Some(b) = b {
                g[b] += t;
            }
        });
    }
    Ok(g)
}

fn reject_tv(prior: &BoundPrior) -> Result<()> {
    if prior.family() == PriorFamily::Tv {
        return Err(Error::Unsupported("MAP estimation with the TV prior"));
    }
    Ok(())
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |a, x| a.max(x.abs()))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Majorizer Hessian at a fixed iterate.
struct Majorizer<'a> {
    post: &'a Posterior,
    /// `2w` per increment, in `for_each_increment` order.
    weights: Vec<f64>,
    diag: Vec<f64>,
    scratch: Vec<f64>,
}

impl<'a> Majorizer<'a> {
    fn at(post: &'a Posterior, x: &[f64]) -> Result<Self> {
        let n = x.len();
        let mut diag = vec![0.0; n];
        let mut scratch = Vec::new();
        if let Some(lik) = post.likelihood() {
            let inv_s2 = 1.0 / (lik.noise.stddev * lik.noise.stddev);
            for (j, d) in diag.iter_mut().enumerate() {
                let (_, vals) = lik.operator.column(j);
                *d = inv_s2 * vals.iter().map(|v| v * v).sum::<f64>();
            }
            scratch = vec![0.0; lik.operator.n_rows()];
        }
        let mut weights = Vec::new();
        if let Some(prior) = post.bound_prior() {
            reject_tv(prior)?;
            let mut err = None;
            prior.for_each_increment(|a, b, scale| {
                let d = x[a] - b.map_or(0.0, |b| x[b]);
                match prior.majorizer_weight(d, scale) {
                    Ok(w) => {
                        let w2 = 2.0 * w;
                        weights.push(w2);
                        diag[a] += w2;
                        if let Some(b) = b {
                            diag[b] += w2;
                        }
                    }
                    Err(e) => err = Some(e),
                }
            });
            if let Some(e) = err {
                return Err(e);
            }
        }
        Ok(Self {
            post,
            weights,
            diag,
            scratch,
        })
    }

    fn apply(&mut self, v: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        if let Some(lik) = self.post.likelihood() {
            let inv_s2 = 1.0 / (lik.noise.stddev * lik.noise.stddev);
            lik.operator.apply_into(v, &mut self.scratch);
            lik.operator.apply_transpose_into(&self.scratch, out);
            out.iter_mut().for_each(|o| *o *= inv_s2);
        }
        if let Some(prior) = self.post.bound_prior() {
            let mut k = 0;
            let weights = &self.weights;
            prior.for_each_increment(|a, b, _| {
                let w = weights[k];
                k += 1;
                let d = v[a] - b.map_or(0.0, |b| v[b]);
                out[a] += w * d;
                if let Some(b) = b {
                    out[b] -= w * d;
                }
            });
        }
    }

    /// Preconditioned CG for `H p = rhs`, starting from zero.
    fn solve(&mut self, rhs: &[f64], tol: f64, max_iters: usize) -> Vec<f64> {
        let n = rhs.len();
        let inv_diag: Vec<f64> = self
            .diag
            .iter()
            .map(|&d| if d > 0.0 { 1.0 / d } else { 1.0 })
            .collect();
        let mut p = vec![0.0; n];
        let mut r = rhs.to_vec();
        let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(r, m)| r * m).collect();
        let mut dir = z.clone();
        let mut hd = vec![0.0; n];
        let mut rz = dot(&r, &z);
        let stop = tol * dot(rhs, rhs).sqrt();
        for _ in 0..max_iters {
            if dot(&r, &r).sqrt() <= stop {
                break;
            }
            self.apply(&dir, &mut hd);
            let curv = dot(&dir, &hd);
            if !(curv > 0.0) {
                break;
            }
            let step = rz / curv;
            for i in 0..n {
                p[i] += step * dir[i];
                r[i] -= step * hd[i];
            }
            for i in 0..n {
                z[i] = r[i] * inv_diag[i];
            }
            let rz_next = dot(&r, &z);
            let beta = rz_next / rz;
            rz = rz_next;
            for i in 0..n {
                dir[i] = z[i] + beta * dir[i];
            }
        }
        p
    }
}

/// Minimizes the negative log-posterior from `init`.
pub fn map_estimate(post: &Posterior, init: &[f64], cfg: &MapConfig) -> Result<MapResult> {
    cfg.validate()?;
    if post.likelihood().is_none() && post.bound_prior().is_none() {
        return Err(Error::Unsupported(
            "MAP of a posterior with neither likelihood nor prior",
        ));
    }
    let mut x = init.to_vec();
    let mut f = negative_log_posterior(&x, post)?;
    let mut trace = vec![f];
    if !f.is_finite() {
        return Err(Error::Divergence { trace });
    }
    let mut g = gradient(&x, post)?;
    let mut iterations = 0;
    let mut trial = vec![0.0; x.len()];
    while iterations < cfg.max_iters && inf_norm(&g) >= cfg.grad_tol {
        let neg_g: Vec<f64> = g.iter().map(|v| -v).collect();
        let p = Majorizer::at(post, &x)?.solve(&neg_g, cfg.linear_solver_tol, cfg.max_cg_iters);
        let slope = dot(&g, &p);
        if !(slope < 0.0) {
            break;
        }
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..cfg.max_backtracks {
            for i in 0..x.len() {
                trial[i] = x[i] + t * p[i];
            }
            let f_trial = negative_log_posterior(&trial, post)?;
            if f_trial <= f + cfg.armijo * t * slope {
                accepted = Some(f_trial);
                break;
            }
            t *= cfg.shrink;
        }
        let Some(f_new) = accepted else {
            // no representable decrease left along p
            break;
        };
        if !f_new.is_finite() {
            trace.push(f_new);
            return Err(Error::Divergence { trace });
        }
        std::mem::swap(&mut x, &mut trial);
        f = f_new;
        trace.push(f);
        g = gradient(&x, post)?;
        iterations += 1;
    }
    let grad_norm = inf_norm(&g);
    Ok(MapResult {
        x,
        trace,
        grad_norm,
        iterations,
        converged: grad_norm < cfg.grad_tol,
    })
}
