//! Plain-text writers: CSV, PGM (P2) and the run manifest.
//!
//! CSV files start with a header row; floats are written as `{:.11e}`
//! (12 significant digits). PGM files carry one comment line with the value
//! range mapped onto 0..255.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::config::ExperimentConfig;
use crate::error::CliError;

/// `git describe`-style version, overridable at build time.
pub const VERSION: &str = match option_env!("CAUCHY_PRIOR_GIT_DESCRIBE") {
    Some(v) => v,
    None => concat!("v", env!("CARGO_PKG_VERSION")),
};

pub const MANIFEST: &str = "manifest.toml";

pub fn fmt_f(v: f64) -> String {
    // adding zero turns −0 into 0
    format!("{:.11e}", v + 0.0)
}

/// Writes every file of one run into a single directory.
#[derive(Debug, Clone)]
pub struct OutputDir {
    root: PathBuf,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(root).map_err(|source| CliError::Io {
            path: root.to_owned(),
            source,
        })?;
        Ok(Self {
            root: root.to_owned(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn write(&self, name: &str, contents: &str) -> Result<(), CliError> {
        let path = self.path(name);
        log::info!("writing {}", path.display());
        fs::write(&path, contents).map_err(|source| CliError::Io { path, source })
    }

    /// `header` is the comma-separated column list; each row is formatted
    /// with [`fmt_f`] unless already a string.
    pub fn csv(
        &self,
        name: &str,
        header: &str,
        rows: impl IntoIterator<Item = Vec<Cell>>,
    ) -> Result<(), CliError> {
        let mut s = String::new();
        s.push_str(header);
        s.push('\n');
        for row in rows {
            let cells: Vec<String> = row.into_iter().map(Cell::render).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        self.write(name, &s)
    }

    /// Row-major `nx × ny` image as `ix,iy,value` rows.
    pub fn image_csv(&self, name: &str, values: &[f64], nx: usize) -> Result<(), CliError> {
        let rows = values
            .iter()
            .enumerate()
            .map(|(i, &v)| vec![Cell::Int(i % nx), Cell::Int(i / nx), Cell::F(v)]);
        self.csv(name, "ix,iy,value", rows)
    }

    pub fn pgm(
        &self,
        name: &str,
        values: &[f64],
        nx: usize,
        ny: usize,
        range: (f64, f64),
    ) -> Result<(), CliError> {
        self.write(name, &pgm(values, nx, ny, range))
    }

    pub fn manifest(&self, command: &str, cfg: &ExperimentConfig) -> Result<(), CliError> {
        self.write(MANIFEST, &manifest(command, cfg))
    }
}

#[derive(Debug, Clone)]
pub enum Cell {
    F(f64),
    Int(usize),
    Text(String),
}

impl Cell {
    fn render(self) -> String {
        match self {
            Cell::F(v) => fmt_f(v),
            Cell::Int(i) => i.to_string(),
            Cell::Text(t) => t,
        }
    }
}

/// Plain PGM with `range` mapped linearly onto 0..255 and clamped.
pub fn pgm(values: &[f64], nx: usize, ny: usize, range: (f64, f64)) -> String {
    assert_eq!(values.len(), nx * ny, "image size");
    let (lo, hi) = range;
    let span = if hi > lo { hi - lo } else { 1.0 };
    let mut s = format!("P2\n# range {} {}\n{nx} {ny}\n255\n", fmt_f(lo), fmt_f(hi));
    for row in values.chunks(nx) {
        let line: Vec<String> = row
            .iter()
            .map(|&v| {
                let g = ((v - lo) / span * 255.0).round().clamp(0.0, 255.0);
                (g as u8).to_string()
            })
            .collect();
        s.push_str(&line.join(" "));
        s.push('\n');
    }
    s
}

pub fn value_range(values: &[f64]) -> (f64, f64) {
    values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        })
}

/// The resolved config followed by a `[run]` block. Loading it back as a
/// config reproduces the run.
pub fn manifest(command: &str, cfg: &ExperimentConfig) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# rerun: cauchy-prior-cli {command} --config {MANIFEST}");
    s.push_str(&cfg.to_toml());
    let _ = write!(
        s,
        "\n[run]\ncommand = \"{command}\"\nversion = \"{VERSION}\"\nseed = {}\n",
        cfg.seed
    );
    s
}
