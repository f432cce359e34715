//! Uniform grids on `[0, pi]` and complex-valued sample vectors with quadrature
//! and interpolation.
//!
//! Everything downstream (solvers, characteristic functions, weight extraction)
//! shares one discretization: `n` equal subintervals with nodes `x_k = k*pi/n`.
//! `n` must be even so that composite Simpson quadrature applies directly.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Uniform grid with `n` subintervals (hence `n + 1` nodes) on `[0, pi]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grid {
    n: usize,
}

impl Grid {
    /// Creates a grid with `n` subintervals. `n` must be even and at least 2.
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 || n % 2 != 0 {
            return Err(Error::InvalidGridSize(n));
        }
        Ok(Grid { n })
    }

    /// Number of subintervals.
    pub fn subintervals(&self) -> usize {
        self.n
    }

    /// Number of nodes, `n + 1`.
    pub fn len(&self) -> usize {
        self.n + 1
    }

    /// Mesh width `pi / n`.
    pub fn step(&self) -> f64 {
        PI / self.n as f64
    }

    /// Node `x_k = k*pi/n`. The right endpoint is returned as `pi` exactly.
    pub fn node(&self, k: usize) -> f64 {
        debug_assert!(k <= self.n);
        if k == self.n {
            PI
        } else {
            k as f64 * PI / self.n as f64
        }
    }

    /// All nodes in order.
    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.n).map(|k| self.node(k)).collect()
    }

    /// Grid with twice as many subintervals.
    pub fn refined(&self) -> Grid {
        Grid { n: 2 * self.n }
    }
}

/// Immutable vector of complex samples on the nodes of a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSamples {
    grid: Grid,
    values: Vec<Complex64>,
}

impl ComplexSamples {
    /// Wraps `values` (one per node, all finite) on `grid`.
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::SampleLength {
                got: values.len(),
                expected: grid.len(),
            });
        }
        for (index, v) in values.iter().enumerate() {
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::NonFiniteSample { index });
            }
        }
        Ok(ComplexSamples { grid, values })
    }

    /// Samples a closure on every node.
    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        Self::new(grid, (0..grid.len()).map(|k| f(grid.node(k))).collect())
    }

    /// Constant function.
    pub fn constant(grid: Grid, c: Complex64) -> Self {
        ComplexSamples {
            grid,
            values: vec![c; grid.len()],
        }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn value(&self, k: usize) -> Complex64 {
        self.values[k]
    }

    /// Largest modulus over all nodes.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    fn check_same_grid(&self, other: &ComplexSamples) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch {
                left: self.grid.n,
                right: other.grid.n,
            });
        }
        Ok(())
    }

    /// Pointwise combination of two sample vectors on the same grid.
    pub fn zip_with(
        &self,
        other: &ComplexSamples,
        op: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<ComplexSamples> {
        self.check_same_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| op(a, b))
            .collect();
        Ok(ComplexSamples {
            grid: self.grid,
            values,
        })
    }

    /// Pointwise map.
    pub fn map(&self, op: impl Fn(Complex64) -> Complex64) -> ComplexSamples {
        ComplexSamples {
            grid: self.grid,
            values: self.values.iter().map(|&v| op(v)).collect(),
        }
    }

    /// Samples of `x -> f(pi - x)`, i.e. the vector reversed node-for-node.
    pub fn reversed(&self) -> ComplexSamples {
        let mut values = self.values.clone();
        values.reverse();
        ComplexSamples {
            grid: self.grid,
            values,
        }
    }

    /// Composite Simpson approximation of the integral over `[0, pi]`.
    pub fn integrate(&self) -> Complex64 {
        let n = self.grid.n;
        let h = self.grid.step();
        let mut odd = Complex64::ZERO;
        let mut even = Complex64::ZERO;
        let mut k = 1;
        while k < n {
            odd += self.values[k];
            k += 2;
        }
        k = 2;
        while k < n {
            even += self.values[k];
            k += 2;
        }
        (self.values[0] + self.values[n] + 4.0 * odd + 2.0 * even) * (h / 3.0)
    }

    /// Running integral `x_k -> integral over [0, x_k]`, fourth-order accurate.
    ///
    /// Even nodes use composite Simpson; odd nodes add the half-panel rule
    /// `h/12 * (5 f_{k-1} + 8 f_k - f_{k+1})` so every node gets a value.
    pub fn cumulative_integral(&self) -> ComplexSamples {
        let n = self.grid.n;
        let h = self.grid.step();
        let f = &self.values;
        let mut out = vec![Complex64::ZERO; n + 1];
        let mut k = 2;
        while k <= n {
            out[k] = out[k - 2] + (f[k - 2] + 4.0 * f[k - 1] + f[k]) * (h / 3.0);
            k += 2;
        }
        k = 1;
        while k <= n - 1 {
            out[k] = out[k - 1] + (5.0 * f[k - 1] + 8.0 * f[k] - f[k + 1]) * (h / 12.0);
            k += 2;
        }
        ComplexSamples {
            grid: self.grid,
            values: out,
        }
    }

    /// Simpson-weighted Hermitian inner product `integral of conj(self) * other`.
    pub fn inner(&self, other: &ComplexSamples) -> Result<Complex64> {
        Ok(self.zip_with(other, |a, b| a.conj() * b)?.integrate())
    }

    /// `L^2` norm induced by [`ComplexSamples::inner`].
    pub fn norm(&self) -> f64 {
        self.zip_with(self, |a, b| a.conj() * b)
            .expect("same grid")
            .integrate()
            .re
            .max(0.0)
            .sqrt()
    }

    /// Interpolates the samples at an arbitrary `x` in `[0, pi]`.
    ///
    /// Cubic (4-point) Lagrange interpolation on the stencil nearest to `x`,
    /// clamped at the interval ends; exact when `x` is a node.
    pub fn value_at(&self, x: f64) -> Result<Complex64> {
        if !x.is_finite() || x < 0.0 || x > PI {
            return Err(Error::OutOfDomain { x });
        }
        let n = self.grid.n;
        let h = self.grid.step();
        let nearest = ((x / h).round() as usize).min(n);
        if self.grid.node(nearest) == x {
            return Ok(self.values[nearest]);
        }
        // Stencil of up to four nodes around the containing subinterval.
        let width = 4.min(n + 1);
        let k = ((x / h).floor() as usize).min(n - 1);
        let start = k
            .saturating_sub(1)
            .min(n + 1 - width);
        let mut acc = Complex64::ZERO;
        for j in 0..width {
            let xj = self.grid.node(start + j);
            let mut w = 1.0;
            for m in 0..width {
                if m != j {
                    let xm = self.grid.node(start + m);
                    w *= (x - xm) / (xj - xm);
                }
            }
            acc += w * self.values[start + j];
        }
        Ok(acc)
    }

    /// Writes the samples as CSV with header `x,value_re,value_im`.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut out = String::new();
        out.push_str("x,value_re,value_im\n");
        for k in 0..self.grid.len() {
            let v = self.values[k];
            let _ = writeln!(out, "{},{},{}", fmt_f64(self.grid.node(k)), fmt_f64(v.re), fmt_f64(v.im));
        }
        std::fs::write(path, out)?;
        Ok(())
    }

    /// Reads samples written by [`ComplexSamples::write_csv`], verifying that the
    /// abscissae match the nodes of `grid`.
    pub fn read_csv(path: impl AsRef<Path>, grid: Grid) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_path(path.as_ref())
            .map_err(|e| Error::Malformed {
                line: 0,
                message: e.to_string(),
            })?;
        let mut values = Vec::with_capacity(grid.len());
        for (i, record) in reader.records().enumerate() {
            let line = i + 2; // 1-based, after the header
            let record = record.map_err(|e| Error::Malformed {
                line,
                message: e.to_string(),
            })?;
            if record.len() != 3 {
                return Err(Error::Malformed {
                    line,
                    message: format!("expected 3 fields, got {}", record.len()),
                });
            }
            let parse = |field: &str, name: &str| -> Result<f64> {
                field.parse::<f64>().map_err(|_| Error::Malformed {
                    line,
                    message: format!("cannot parse {name} value {field:?}"),
                })
            };
            let x = parse(&record[0], "x")?;
            let re = parse(&record[1], "value_re")?;
            let im = parse(&record[2], "value_im")?;
            let k = values.len();
            if k >= grid.len() {
                return Err(Error::Malformed {
                    line,
                    message: format!("more than {} rows for the target grid", grid.len()),
                });
            }
            if (x - grid.node(k)).abs() > 1e-9 {
                return Err(Error::Malformed {
                    line,
                    message: format!(
                        "abscissa {x} does not match grid node {} at index {k}",
                        grid.node(k)
                    ),
                });
            }
            values.push(Complex64::new(re, im));
        }
        if values.len() != grid.len() {
            return Err(Error::SampleLength {
                got: values.len(),
                expected: grid.len(),
            });
        }
        Self::new(grid, values)
    }
}

/// Formats a float with 17 significant digits so that `f64` round-trips exactly.
pub(crate) fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}
