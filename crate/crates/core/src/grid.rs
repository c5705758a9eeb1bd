//! Uniform truncated periodic grid on `[-L, L)`, sampled fields, spectral
//! differentiation, quadrature and discrete norms.

use std::io::{Read, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{self, FourierPair};
use crate::stencil;

/// Smallest admissible number of grid points.
pub const MIN_POINTS: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    half_length: f64,
    point_count: usize,
    dx: f64,
}

/// Build the grid `x_j = -L + j·dx`, `dx = 2L/N`.
pub fn make_grid(half_length: f64, point_count: usize) -> Result<Grid> {
    if !(half_length.is_finite() && half_length > 0.0) {
        return Err(Error::InvalidGrid(format!(
            "half length must be positive, got {half_length}"
        )));
    }
    if point_count % 2 != 0 {
        return Err(Error::InvalidGrid(format!(
            "odd point count {point_count}"
        )));
    }
    if point_count < MIN_POINTS {
        return Err(Error::InvalidGrid(format!(
            "point count {point_count} below minimum {MIN_POINTS}"
        )));
    }
    Ok(Grid {
        half_length,
        point_count,
        dx: 2.0 * half_length / point_count as f64,
    })
}

impl Grid {
    pub fn new(half_length: f64, point_count: usize) -> Result<Self> {
        make_grid(half_length, point_count)
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn point_count(&self) -> usize {
        self.point_count
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn node(&self, j: usize) -> f64 {
        -self.half_length + j as f64 * self.dx
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.point_count).map(move |j| self.node(j))
    }

    /// Index of the node nearest to `x` (no wrap).
    pub fn nearest_index(&self, x: f64) -> usize {
        let j = ((x + self.half_length) / self.dx).round();
        j.clamp(0.0, (self.point_count - 1) as f64) as usize
    }

    pub fn ensure_same(&self, other: &Grid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch {
                expected_n: self.point_count,
                expected_l: self.half_length,
                got_n: other.point_count,
                got_l: other.half_length,
            })
        }
    }
}

pub(crate) fn check_finite(values: &[f64], context: &str) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(Error::NonFinite {
            context: context.to_string(),
            index,
        }),
        None => Ok(()),
    }
}

/// A real field sampled on the nodes of a [`Grid`]. Values are always finite.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.point_count() {
            return Err(Error::LengthMismatch {
                expected: grid.point_count(),
                got: values.len(),
            });
        }
        check_finite(&values, "grid function")?;
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(grid, grid.nodes().map(f).collect())
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.point_count()],
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Pointwise map; fails if the result is not finite.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    /// Pointwise combination with another field on the same grid.
    pub fn zip_map(&self, other: &GridFunction, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.grid.ensure_same(&other.grid)?;
        Self::new(
            self.grid,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }

    /// Cyclic shift by a whole number of cells: `out[j] = in[j - cells]`.
    pub fn shifted(&self, cells: isize) -> Self {
        let n = self.values.len() as isize;
        let values = (0..n)
            .map(|j| self.values[(j - cells).rem_euclid(n) as usize])
            .collect();
        Self {
            grid: self.grid,
            values,
        }
    }

    /// Value at an arbitrary point by local 8-point Lagrange interpolation.
    pub fn interpolate(&self, x: f64) -> f64 {
        stencil::periodic_interpolate(&self.values, self.grid.node(0), self.grid.dx(), x)
    }

    /// `|u(±L)| / ‖u‖_∞`, zero for the zero field.
    pub fn boundary_tail(&self) -> f64 {
        let max = self.max_abs();
        if max == 0.0 {
            0.0
        } else {
            self.values[0].abs() / max
        }
    }

    /// CSV with header `x,value`, 17 significant digits.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["x", "value"])?;
        for (x, v) in self.grid.nodes().zip(&self.values) {
            w.write_record([format!("{x:.16e}"), format!("{v:.16e}")])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Read a CSV produced by [`GridFunction::write_csv`]; nodes must match the grid.
    pub fn read_csv<R: Read>(grid: Grid, reader: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let headers = r.headers()?.clone();
        if headers.len() != 2 || &headers[0] != "x" || &headers[1] != "value" {
            return Err(Error::InvalidParameter {
                name: "csv header".into(),
                reason: format!("expected `x,value`, got `{}`", headers.iter().collect::<Vec<_>>().join(",")),
            });
        }
        let mut values = Vec::with_capacity(grid.point_count());
        for (j, record) in r.records().enumerate() {
            let record = record?;
            let parse = |s: &str| -> Result<f64> {
                s.trim().parse::<f64>().map_err(|e| Error::InvalidParameter {
                    name: format!("csv row {j}"),
                    reason: e.to_string(),
                })
            };
            let x = parse(&record[0])?;
            let v = parse(&record[1])?;
            if j >= grid.point_count() || (x - grid.node(j)).abs() > 1e-9 * grid.half_length() {
                return Err(Error::InvalidParameter {
                    name: format!("csv row {j}"),
                    reason: format!("node x = {x} does not match the grid"),
                });
            }
            values.push(v);
        }
        Self::new(grid, values)
    }
}

/// `∂x u` by the Fourier multiplier `ik` (Nyquist mode dropped).
pub fn spectral_derivative(u: &GridFunction) -> Result<GridFunction> {
    let pair = FourierPair::new(u.grid.point_count());
    Ok(GridFunction::new(u.grid, spectral_derivative_raw(&pair, &u.grid, &u.values))?)
}

pub(crate) fn spectral_derivative_raw(pair: &FourierPair, grid: &Grid, values: &[f64]) -> Vec<f64> {
    let k = spectral::wavenumbers(grid);
    let nyquist = grid.point_count() / 2;
    spectral::apply_multiplier(pair, values, |i| {
        if i == nyquist {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(0.0, k[i])
        }
    })
}

/// Periodic rectangle rule `dx·Σ u_j`.
pub fn integrate(u: &GridFunction) -> f64 {
    u.grid.dx() * compensated_sum(u.values.iter().copied())
}

/// Neumaier-compensated sum; keeps quadrature of millions of cells at round-off level.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut carry = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            carry += (sum - t) + v;
        } else {
            carry += (v - t) + sum;
        }
        sum = t;
    }
    sum + carry
}

/// Discrete `L^p` norm; `p = f64::INFINITY` gives the grid maximum.
pub fn lp_norm(u: &GridFunction, p: f64) -> Result<f64> {
    lp_norm_raw(&u.values, u.grid.dx(), p)
}

pub(crate) fn lp_norm_raw(values: &[f64], dx: f64, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidParameter {
            name: "p".into(),
            reason: format!("norm exponent must be >= 1, got {p}"),
        });
    }
    let max = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if p.is_infinite() || max == 0.0 {
        return Ok(max);
    }
    // Scale by the maximum so large p does not underflow.
    let sum = compensated_sum(values.iter().map(|v| (v.abs() / max).powf(p)));
    Ok(max * (dx * sum).powf(1.0 / p))
}
