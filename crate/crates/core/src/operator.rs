//! Column-compressed sparse operator with O(nnz(column)) column access.

use std::io::{self, BufRead, Write};

use crate::error::{Error, Result};

/// Discretized linear forward map stored column by column.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator {
    n_rows: usize,
    n_cols: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseOperator {
    /// Assembles from `(row, col, value)` triplets. Duplicates are summed and
    /// exact zeros dropped.
    pub fn from_triplets(
        n_rows: usize,
        n_cols: usize,
        mut triplets: Vec<(usize, usize, f64)>,
    ) -> Result<Self> {
        for &(r, c, v) in &triplets {
            if r >= n_rows {
                return Err(Error::Index {
                    index: r,
                    len: n_rows,
                });
            }
            if c >= n_cols {
                return Err(Error::Index {
                    index: c,
                    len: n_cols,
                });
            }
            if !v.is_finite() {
                return Err(Error::domain("value", v, "operator entries must be finite"));
            }
        }
        triplets.sort_by_key(|&(r, c, _)| (c, r));

        let mut col_ptr = vec![0usize; n_cols + 1];
        let mut row_idx = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        let mut iter = triplets.into_iter().peekable();
        while let Some((r, c, mut v)) = iter.next() {
            while let Some(&(r2, c2, v2)) = iter.peek() {
                if (r2, c2) != (r, c) {
                    break;
                }
                v += v2;
                iter.next();
            }
            if v != 0.0 {
                row_idx.push(r);
                values.push(v);
                col_ptr[c + 1] += 1;
            }
        }
        for c in 0..n_cols {
            col_ptr[c + 1] += col_ptr[c];
        }
        Ok(Self {
            n_rows,
            n_cols,
            col_ptr,
            row_idx,
            values,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n_rows: n,
            n_cols: n,
            col_ptr: (0..=n).collect(),
            row_idx: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            col_ptr: vec![0; n_cols + 1],
            row_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Row indices and values of column `j`.
    #[inline]
    pub fn column(&self, j: usize) -> (&[usize], &[f64]) {
        let range = self.col_ptr[j]..self.col_ptr[j + 1];
        (&self.row_idx[range.clone()], &self.values[range])
    }

    /// Iterates all entries as `(row, col, value)`, column by column.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n_cols).flat_map(move |c| {
            let (rows, vals) = self.column(c);
            rows.iter().zip(vals).map(move |(&r, &v)| (r, c, v))
        })
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n_cols {
            return Err(Error::Dimension {
                what: "operator input",
                expected: self.n_cols,
                actual: x.len(),
            });
        }
        let mut out = vec![0.0; self.n_rows];
        self.apply_into(x, &mut out);
        Ok(out)
    }

    /// `out ← A x`; lengths are the caller's responsibility.
    pub fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for (j, &xj) in x.iter().enumerate() {
            if xj == 0.0 {
                continue;
            }
            let (rows, vals) = self.column(j);
            for (&r, &v) in rows.iter().zip(vals) {
                out[r] += v * xj;
            }
        }
    }

    pub fn apply_transpose(&self, y: &[f64]) -> Result<Vec<f64>> {
        if y.len() != self.n_rows {
            return Err(Error::Dimension {
                what: "adjoint input",
                expected: self.n_rows,
                actual: y.len(),
            });
        }
        let mut out = vec![0.0; self.n_cols];
        self.apply_transpose_into(y, &mut out);
        Ok(out)
    }

    pub fn apply_transpose_into(&self, y: &[f64], out: &mut [f64]) {
        for (j, o) in out.iter_mut().enumerate() {
            let (rows, vals) = self.column(j);
            *o = rows.iter().zip(vals).map(|(&r, &v)| v * y[r]).sum();
        }
    }

    /// Sum of each row.
    pub fn row_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.n_rows];
        for (r, _, v) in self.triplets() {
            sums[r] += v;
        }
        sums
    }

    /// Writes the sparse triplet text format:
    ///
    /// ```text
    /// % sparse-triplet: header is "rows cols nnz"; entries are "row col value", 0-based
    /// 3 3 3
    /// 0 0 1e0
    /// ...
    /// ```
    ///
    /// Values use the shortest representation that parses back exactly.
    pub fn write_triplets<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(
            w,
            "% sparse-triplet: header is \"rows cols nnz\"; entries are \"row col value\", 0-based"
        )?;
        writeln!(w, "{} {} {}", self.n_rows, self.n_cols, self.nnz())?;
        for (r, c, v) in self.triplets() {
            writeln!(w, "{r} {c} {v:e}")?;
        }
        Ok(())
    }

    pub fn read_triplets<R: BufRead>(reader: R) -> Result<Self> {
        let bad = |reason: String| Error::Format {
            format: "sparse triplet",
            reason,
        };
        let mut lines = reader
            .lines()
            .map(|l| l.map_err(|e| bad(e.to_string())))
            .filter(|l| !matches!(l, Ok(s) if s.starts_with('%') || s.trim().is_empty()));
        let header = lines.next().ok_or_else(|| bad("missing header".into()))??;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| bad(format!("bad header token `{t}`"))))
            .collect::<Result<_>>()?;
        let [n_rows, n_cols, nnz] = dims[..] else {
            return Err(bad(format!("header needs 3 fields, got {}", dims.len())));
        };
        let mut triplets = Vec::with_capacity(nnz);
        for line in lines {
            let line = line?;
            let mut it = line.split_whitespace();
            let mut field = |name: &str| {
                it.next()
                    .ok_or_else(|| bad(format!("missing {name} in `{line}`")))
                    .map(str::to_owned)
            };
            let r = field("row")?;
            let c = field("col")?;
            let v = field("value")?;
            triplets.push((
                r.parse().map_err(|_| bad(format!("bad row `{r}`")))?,
                c.parse().map_err(|_| bad(format!("bad col `{c}`")))?,
                v.parse().map_err(|_| bad(format!("bad value `{v}`")))?,
            ));
        }
        if triplets.len() != nnz {
            return Err(bad(format!(
                "header says {nnz} entries, found {}",
                triplets.len()
            )));
        }
        Self::from_triplets(n_rows, n_cols, triplets)
    }
}
