//! Plain-text sampler checkpoints.
//!
//! One `key value...` record per line. Floats are written with `{:e}`, which
//! round-trips exactly, so a resumed run is bit-identical to an
//! uninterrupted one.

use std::io::{self, BufRead, Write};
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{ChainDiagnostics, Posterior, SamplerConfig, ScanOrder, Scmh};
use crate::error::{Error, Result};

const MAGIC: &str = "# scmh-checkpoint v1";

/// Everything needed to continue a run with the same posterior.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub config: SamplerConfig,
    pub sweep: usize,
    pub word_pos: u128,
    pub state: Vec<f64>,
    pub log_posterior: f64,
    pub residual: Vec<f64>,
    pub sigmas: Vec<f64>,
    pub window_accepts: Vec<u64>,
    pub window_proposals: Vec<u64>,
    pub accepts: Vec<u64>,
    pub proposals: Vec<u64>,
    pub order: Vec<usize>,
    pub samples: Vec<Vec<f64>>,
    pub diagnostics: ChainDiagnostics,
}

impl<'a> Scmh<'a> {
    pub fn checkpoint(&self) -> Checkpoint {
        Checkpoint {
            config: self.cfg.clone(),
            sweep: self.sweep,
            word_pos: self.rng.get_word_pos(),
            state: self.state.clone(),
            log_posterior: self.log_post,
            residual: self.residual.clone(),
            sigmas: self.sigmas.clone(),
            window_accepts: self.window_accepts.clone(),
            window_proposals: self.window_proposals.clone(),
            accepts: self.accepts.clone(),
            proposals: self.proposals.clone(),
            order: self.order.clone(),
            samples: self.samples.clone(),
            diagnostics: self.diagnostics,
        }
    }

    /// Continues from `ckpt`; `post` must be the posterior it was taken from.
    pub fn resume(post: &'a Posterior, ckpt: Checkpoint) -> Result<Self> {
        ckpt.config.validate()?;
        let n = post.len();
        let dim = |what, actual| {
            if actual == n {
                Ok(())
            } else {
                Err(Error::Dimension {
                    what,
                    expected: n,
                    actual,
                })
            }
        };
        dim("checkpoint state", ckpt.state.len())?;
        dim("checkpoint sigmas", ckpt.sigmas.len())?;
        dim("checkpoint order", ckpt.order.len())?;
        dim("checkpoint counters", ckpt.accepts.len())?;
        dim("checkpoint counters", ckpt.proposals.len())?;
        dim("checkpoint counters", ckpt.window_accepts.len())?;
        dim("checkpoint counters", ckpt.window_proposals.len())?;
        let n_rows = post.likelihood().map_or(0, |l| l.operator.n_rows());
        if ckpt.residual.len() != n_rows {
            return Err(Error::Dimension {
                what: "checkpoint residual",
                expected: n_rows,
                actual: ckpt.residual.len(),
            });
        }
        if ckpt.sweep > ckpt.config.sweeps {
            return Err(Error::Format {
                format: "checkpoint",
                reason: format!("sweep {} beyond total {}", ckpt.sweep, ckpt.config.sweeps),
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(ckpt.config.seed);
        rng.set_stream(ckpt.config.stream);
        rng.set_word_pos(ckpt.word_pos);
        Ok(Self {
            post,
            cfg: ckpt.config,
            rng,
            state: ckpt.state,
            residual: ckpt.residual,
            log_post: ckpt.log_posterior,
            sigmas: ckpt.sigmas,
            window_accepts: ckpt.window_accepts,
            window_proposals: ckpt.window_proposals,
            accepts: ckpt.accepts,
            proposals: ckpt.proposals,
            order: ckpt.order,
            sweep: ckpt.sweep,
            samples: ckpt.samples,
            diagnostics: ckpt.diagnostics,
        })
    }
}

fn join<T: std::fmt::Display>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn join_f(xs: &[f64]) -> String {
    xs.iter().map(|x| format!("{x:e}")).collect::<Vec<_>>().join(" ")
}

impl Checkpoint {
    pub fn write<W: Write>(&self, mut w: W) -> io::Result<()> {
        let c = &self.config;
        let d = &self.diagnostics;
        writeln!(w, "{MAGIC}")?;
        writeln!(w, "sweeps {}", c.sweeps)?;
        writeln!(w, "thin {}", c.thin)?;
        writeln!(w, "burn_in_fraction {:e}", c.burn_in_fraction)?;
        writeln!(w, "adapt_interval {}", c.adapt_interval)?;
        writeln!(w, "initial_sigma {:e}", c.initial_sigma)?;
        writeln!(w, "adapt_band {:e} {:e}", c.adapt_band[0], c.adapt_band[1])?;
        let scan = match c.scan {
            ScanOrder::Raster => "raster",
            ScanOrder::RandomPermutation => "random",
        };
        writeln!(w, "scan {scan}")?;
        writeln!(w, "check_interval {}", c.check_interval)?;
        writeln!(w, "seed {}", c.seed)?;
        writeln!(w, "stream {}", c.stream)?;
        writeln!(w, "sweep {}", self.sweep)?;
        writeln!(w, "word_pos {}", self.word_pos)?;
        writeln!(w, "log_posterior {:e}", self.log_posterior)?;
        writeln!(
            w,
            "diagnostics {} {:e} {:e}",
            d.checks, d.max_log_posterior_drift, d.max_residual_drift
        )?;
        writeln!(w, "state {}", join_f(&self.state))?;
        writeln!(w, "residual {}", join_f(&self.residual))?;
        writeln!(w, "sigmas {}", join_f(&self.sigmas))?;
        writeln!(w, "window_accepts {}", join(&self.window_accepts))?;
        writeln!(w, "window_proposals {}", join(&self.window_proposals))?;
        writeln!(w, "accepts {}", join(&self.accepts))?;
        writeln!(w, "proposals {}", join(&self.proposals))?;
        writeln!(w, "order {}", join(&self.order))?;
        writeln!(w, "samples {}", self.samples.len())?;
        for s in &self.samples {
            writeln!(w, "{}", join_f(s))?;
        }
        Ok(())
    }

    pub fn read<R: BufRead>(reader: R) -> Result<Self> {
        let mut lines = reader.lines();
        let mut next_line = || -> Result<String> {
            match lines.next() {
                Some(Ok(l)) => Ok(l),
                Some(Err(e)) => Err(bad(e.to_string())),
                None => Err(bad("unexpected end of file".into())),
            }
        };
        if next_line()? != MAGIC {
            return Err(bad("missing header line".into()));
        }
        let mut record = |key: &str| -> Result<String> {
            let line = next_line()?;
            let (k, rest) = line.split_once(' ').unwrap_or((line.as_str(), ""));
            if k != key {
                return Err(bad(format!("expected `{key}`, found `{k}`")));
            }
            Ok(rest.to_owned())
        };
        let sweeps = scalar(&record("sweeps")?)?;
        let thin = scalar(&record("thin")?)?;
        let burn_in_fraction = scalar(&record("burn_in_fraction")?)?;
        let adapt_interval = scalar(&record("adapt_interval")?)?;
        let initial_sigma = scalar(&record("initial_sigma")?)?;
        let band: Vec<f64> = list(&record("adapt_band")?)?;
        let [lo, hi] = band[..] else {
            return Err(bad("adapt_band needs 2 fields".into()));
        };
        let scan = match record("scan")?.as_str() {
            "raster" => ScanOrder::Raster,
            "random" => ScanOrder::RandomPermutation,
            other => return Err(bad(format!("unknown scan order `{other}`"))),
        };
        let check_interval = scalar(&record("check_interval")?)?;
        let seed = scalar(&record("seed")?)?;
        let stream = scalar(&record("stream")?)?;
        let sweep = scalar(&record("sweep")?)?;
        let word_pos = scalar(&record("word_pos")?)?;
        let log_posterior = scalar(&record("log_posterior")?)?;
        let diag: Vec<String> = list(&record("diagnostics")?)?;
        let [checks, lp_drift, res_drift] = &diag[..] else {
            return Err(bad("diagnostics needs 3 fields".into()));
        };
        let diagnostics = ChainDiagnostics {
            checks: scalar(checks)?,
            max_log_posterior_drift: scalar(lp_drift)?,
            max_residual_drift: scalar(res_drift)?,
        };
        let state = list(&record("state")?)?;
        let residual = list(&record("residual")?)?;
        let sigmas = list(&record("sigmas")?)?;
        let window_accepts = list(&record("window_accepts")?)?;
        let window_proposals = list(&record("window_proposals")?)?;
        let accepts = list(&record("accepts")?)?;
        let proposals = list(&record("proposals")?)?;
        let order = list(&record("order")?)?;
        let n_samples: usize = scalar(&record("samples")?)?;
        let mut samples = Vec::with_capacity(n_samples);
        for _ in 0..n_samples {
            samples.push(list(&next_line()?)?);
        }
        Ok(Self {
            config: SamplerConfig {
                sweeps,
                thin,
                burn_in_fraction,
                adapt_interval,
                initial_sigma,
                adapt_band: [lo, hi],
                scan,
                check_interval,
                seed,
                stream,
            },
            sweep,
            word_pos,
            state,
            log_posterior,
            residual,
            sigmas,
            window_accepts,
            window_proposals,
            accepts,
            proposals,
            order,
            samples,
            diagnostics,
        })
    }
}

fn bad(reason: String) -> Error {
    Error::Format {
        format: "checkpoint",
        reason,
    }
}

fn scalar<T: FromStr>(s: &str) -> Result<T> {
    s.trim().parse().map_err(|_| bad(format!("cannot parse `{s}`")))
}

fn list<T: FromStr>(s: &str) -> Result<Vec<T>> {
    s.split_whitespace().map(scalar).collect()
}
