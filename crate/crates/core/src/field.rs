//! Real spatial fields, complex spectral fields and the `FLD1` file format.

use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::Grid2D;

/// Real-valued samples on the spatial nodes of a [`Grid2D`], row-major with
/// the first index running over the first axis.
#[derive(Debug, Clone, PartialEq)]
pub struct RealField {
    grid: Grid2D,
    values: Vec<f64>,
}

/// Complex Fourier coefficients on the frequency nodes of a [`Grid2D`],
/// same memory layout as [`RealField`].
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: Grid2D,
    values: Vec<Complex64>,
}

impl RealField {
    /// All-zero field.
    pub fn zeros(grid: Grid2D) -> Self {
        RealField {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    /// Samples `f(x1, x2)` at every spatial node.
    pub fn from_fn(grid: Grid2D, mut f: impl FnMut(f64, f64) -> f64) -> Self {
        let n = grid.n();
        let mut values = Vec::with_capacity(grid.len());
        for i in 0..n {
            let x1 = grid.x(i);
            for j in 0..n {
                values.push(f(x1, grid.x(j)));
            }
        }
        RealField { grid, values }
    }

    /// Wraps an existing sample vector; the length must be `N^2` and every
    /// sample finite.
    pub fn from_values(grid: Grid2D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidField(format!(
                "expected {} samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        let field = RealField { grid, values };
        field.check_finite()?;
        Ok(field)
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.idx(i, j)]
    }

    /// Discrete L2 norm with quadrature weight `kappa` per axis, so that
    /// Parseval holds against [`SpectralField::l2_norm`].
    pub fn l2_norm(&self) -> f64 {
        let sum: f64 = self.values.iter().map(|v| v * v).sum();
        self.grid.kappa() * sum.sqrt()
    }

    /// Largest absolute sample.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub(crate) fn check_finite(&self) -> Result<()> {
        if self.values.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::InvalidField(
                "field contains NaN or infinite samples".into(),
            ))
        }
    }

    /// `self + scale * other`.
    pub fn axpy(&self, scale: f64, other: &RealField) -> RealField {
        assert_eq!(
            self.grid, other.grid,
            "axpy requires fields on the same grid"
        );
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + scale * b)
            .collect();
        RealField {
            grid: self.grid,
            values,
        }
    }

    /// Pointwise difference `self - other`.
    pub fn sub(&self, other: &RealField) -> RealField {
        self.axpy(-1.0, other)
    }

    /// Pointwise scaling.
    pub fn scale(&self, scale: f64) -> RealField {
        RealField {
            grid: self.grid,
            values: self.values.iter().map(|v| v * scale).collect(),
        }
    }

    /// Relative L2 distance `||self - reference|| / ||reference||`.
    pub fn rel_err(&self, reference: &RealField) -> f64 {
        self.sub(reference).l2_norm() / reference.l2_norm()
    }

    /// Writes the field in the `FLD1` text format: a header line
    /// `FLD1 N L` followed by `N` lines of `N` space-separated samples
    /// printed with 17 significant digits.
    pub fn write_fld(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        let n = self.grid.n();
        let io_err = |e| Error::io(path, e);
        writeln!(w, "FLD1 {} {}", n, fmt_f64(self.grid.l())).map_err(io_err)?;
        for i in 0..n {
            let row = &self.values[i * n..(i + 1) * n];
            let mut line = String::with_capacity(n * 24);
            for (j, v) in row.iter().enumerate() {
                if j > 0 {
                    line.push(' ');
                }
                line.push_str(&fmt_f64(*v));
            }
            writeln!(w, "{line}").map_err(io_err)?;
        }
        w.flush().map_err(io_err)
    }

    /// Reads a field written by [`RealField::write_fld`]; rejects header or
    /// dimension mismatches.
    pub fn read_fld(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let mut lines = BufReader::new(file).lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::malformed(path, "empty file"))?
            .map_err(|e| Error::io(path, e))?;
        let mut parts = header.split_whitespace();
        if parts.next() != Some("FLD1") {
            return Err(Error::malformed(path, "missing FLD1 magic"));
        }
        let n: usize = parts
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::malformed(path, "bad sample count in header"))?;
        let l: f64 = parts
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::malformed(path, "bad half-width in header"))?;
        if parts.next().is_some() {
            return Err(Error::malformed(path, "trailing tokens in header"));
        }
        let grid = Grid2D::new(n, l)?;
        let mut values = Vec::with_capacity(grid.len());
        for (row, line) in lines.enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            if line.trim().is_empty() {
                continue;
            }
            if row >= n {
                return Err(Error::malformed(path, format!("more than {n} rows")));
            }
            let before = values.len();
            for tok in line.split_whitespace() {
                let v: f64 = tok
                    .parse()
                    .map_err(|_| Error::malformed(path, format!("bad float {tok:?}")))?;
                values.push(v);
            }
            if values.len() - before != n {
                return Err(Error::malformed(
                    path,
                    format!("row {row} has {} samples, expected {n}", values.len() - before),
                ));
            }
        }
        if values.len() != grid.len() {
            return Err(Error::malformed(
                path,
                format!("expected {} samples, got {}", grid.len(), values.len()),
            ));
        }
        RealField::from_values(grid, values)
    }
}

impl SpectralField {
    pub fn zeros(grid: Grid2D) -> Self {
        SpectralField {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub(crate) fn from_raw(grid: Grid2D, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        SpectralField { grid, values }
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn get(&self, k1: usize, k2: usize) -> Complex64 {
        self.values[self.grid.idx(k1, k2)]
    }

    /// Discrete L2 norm with quadrature weight `xi_spacing` per axis.
    pub fn l2_norm(&self) -> f64 {
        let sum: f64 = self.values.iter().map(|v| v.norm_sqr()).sum();
        self.grid.xi_spacing() * sum.sqrt()
    }

    pub(crate) fn check_finite(&self) -> Result<()> {
        if self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
            Ok(())
        } else {
            Err(Error::InvalidField(
                "spectral field contains NaN or infinite coefficients".into(),
            ))
        }
    }

    /// Pointwise difference `self - other`.
    pub fn sub(&self, other: &SpectralField) -> SpectralField {
        assert_eq!(self.grid, other.grid, "sub requires fields on the same grid");
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        SpectralField {
            grid: self.grid,
            values,
        }
    }
}

/// Formats a float with 17 significant digits, enough to reparse the exact
/// same `f64`.
pub(crate) fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}
