//! Discretely sampled open curves on a uniform parameter grid over `[0, 1]`.
//!
//! A curve with `T` samples lives on the grid `t_i = i / (T - 1)`. All
//! integrals over the parameter domain use the trapezoidal rule and all
//! derivatives use central differences with one-sided endpoint stencils.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Minimum number of samples for any curve or curve-like function.
pub const MIN_SAMPLES: usize = 3;

/// A discrete open curve `beta: [0,1] -> R^n` stored as a `T x n` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    samples: DMatrix<f64>,
}

impl Curve {
    pub fn new(samples: DMatrix<f64>) -> Result<Self> {
        if samples.nrows() < MIN_SAMPLES {
            return Err(Error::InvalidArgument(format!(
                "curve needs at least {MIN_SAMPLES} samples, got {}",
                samples.nrows()
            )));
        }
        if samples.ncols() == 0 {
            return Err(Error::InvalidArgument("curve dimension must be >= 1".into()));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("curve samples must be finite".into()));
        }
        Ok(Self { samples })
    }

    /// Builds a curve from one row per sample.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidArgument("ragged sample rows".into()));
        }
        Self::new(DMatrix::from_fn(rows.len(), n, |i, j| rows[i][j]))
    }

    /// Samples `f` on the uniform grid of `t_count` points.
    pub fn from_fn(t_count: usize, dim: usize, f: impl Fn(f64) -> Vec<f64>) -> Result<Self> {
        let grid = uniform_grid(t_count);
        let rows: Vec<Vec<f64>> = grid.iter().map(|&t| f(t)).collect();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::InvalidArgument("sample function returned wrong dimension".into()));
        }
        Self::from_rows(&rows)
    }

    pub fn samples(&self) -> &DMatrix<f64> {
        &self.samples
    }

    pub fn into_samples(self) -> DMatrix<f64> {
        self.samples
    }

    /// Number of samples `T`.
    pub fn len(&self) -> usize {
        self.samples.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.nrows() == 0
    }

    /// Ambient dimension `n`.
    pub fn dim(&self) -> usize {
        self.samples.ncols()
    }

    pub fn point(&self, i: usize) -> Vec<f64> {
        self.samples.row(i).iter().copied().collect()
    }

    /// Piecewise-linear resampling onto `t_out` uniform parameters. Endpoints
    /// are preserved exactly.
    pub fn resample(&self, t_out: usize) -> Result<Curve> {
        if t_out < MIN_SAMPLES {
            return Err(Error::InvalidArgument(format!(
                "resample target must be >= {MIN_SAMPLES}, got {t_out}"
            )));
        }
        if t_out == self.len() {
            return Ok(self.clone());
        }
        let out = resample_matrix(&self.samples, t_out);
        Ok(Curve { samples: out })
    }

    /// Velocity `beta'(t)` on the same grid.
    pub fn derivative(&self) -> Curve {
        Curve {
            samples: derivative_matrix(&self.samples),
        }
    }

    /// `int_0^1 |beta'(t)| dt` by the trapezoidal rule.
    pub fn arc_length(&self) -> f64 {
        let vel = derivative_matrix(&self.samples);
        let speeds: Vec<f64> = vel.row_iter().map(|r| r.norm()).collect();
        trapezoid(&speeds)
    }

    /// Uniformly rescales the curve to unit arc length.
    pub fn normalize_length(&self) -> Result<Curve> {
        let length = self.arc_length();
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::DegenerateInput(
                "cannot normalize a curve of zero length".into(),
            ));
        }
        Ok(Curve {
            samples: &self.samples / length,
        })
    }

    pub fn translate(&self, offset: &[f64]) -> Result<Curve> {
        if offset.len() != self.dim() {
            return Err(Error::InvalidArgument("offset dimension mismatch".into()));
        }
        let mut samples = self.samples.clone();
        for (j, &o) in offset.iter().enumerate() {
            samples.column_mut(j).add_scalar_mut(o);
        }
        Ok(Curve { samples })
    }

    pub fn scale(&self, factor: f64) -> Curve {
        Curve {
            samples: &self.samples * factor,
        }
    }
}

/// `T` uniformly spaced parameters on `[0, 1]` with exact endpoints.
pub fn uniform_grid(t_count: usize) -> Vec<f64> {
    let last = (t_count.max(2) - 1) as f64;
    (0..t_count).map(|i| i as f64 / last).collect()
}

/// Trapezoidal rule for samples on the uniform unit grid.
pub fn trapezoid(values: &[f64]) -> f64 {
    let t = values.len();
    if t < 2 {
        return 0.0;
    }
    let h = 1.0 / (t - 1) as f64;
    let interior: f64 = values[1..t - 1].iter().sum();
    h * (interior + 0.5 * (values[0] + values[t - 1]))
}

/// Quadrature weights matching [`trapezoid`].
pub fn trapezoid_weights(t_count: usize) -> Vec<f64> {
    let h = 1.0 / (t_count - 1) as f64;
    let mut w = vec![h; t_count];
    w[0] = 0.5 * h;
    w[t_count - 1] = 0.5 * h;
    w
}

/// Row-wise derivative of a `T x n` matrix sampled on the uniform unit grid.
pub(crate) fn derivative_matrix(m: &DMatrix<f64>) -> DMatrix<f64> {
    let t = m.nrows();
    let inv_h = (t - 1) as f64;
    DMatrix::from_fn(t, m.ncols(), |i, j| {
        if i == 0 {
            (m[(1, j)] - m[(0, j)]) * inv_h
        } else if i == t - 1 {
            (m[(t - 1, j)] - m[(t - 2, j)]) * inv_h
        } else {
            (m[(i + 1, j)] - m[(i - 1, j)]) * 0.5 * inv_h
        }
    })
}

/// Derivative of a scalar function sampled on the uniform unit grid.
pub(crate) fn derivative_slice(v: &[f64]) -> Vec<f64> {
    let t = v.len();
    let inv_h = (t - 1) as f64;
    (0..t)
        .map(|i| {
            if i == 0 {
                (v[1] - v[0]) * inv_h
            } else if i == t - 1 {
                (v[t - 1] - v[t - 2]) * inv_h
            } else {
                (v[i + 1] - v[i - 1]) * 0.5 * inv_h
            }
        })
        .collect()
}

/// Splits a parameter `s` in `[0, 1]` into a left sample index and a weight
/// for linear interpolation on a `t_count`-point grid.
#[inline]
pub(crate) fn locate(s: f64, t_count: usize) -> (usize, f64) {
    let last = t_count - 1;
    let pos = s.clamp(0.0, 1.0) * last as f64;
    let idx = (pos.floor() as usize).min(last - 1);
    (idx, pos - idx as f64)
}

/// Linear interpolation of the rows of `m` at parameter `s`, written to `out`.
pub(crate) fn interpolate_row(m: &DMatrix<f64>, s: f64, out: &mut [f64]) {
    let (i, w) = locate(s, m.nrows());
    for (j, o) in out.iter_mut().enumerate() {
        *o = if w == 0.0 {
            m[(i, j)]
        } else {
            (1.0 - w) * m[(i, j)] + w * m[(i + 1, j)]
        };
    }
}

pub(crate) fn resample_matrix(m: &DMatrix<f64>, t_out: usize) -> DMatrix<f64> {
    let grid = uniform_grid(t_out);
    let n = m.ncols();
    let mut out = DMatrix::zeros(t_out, n);
    let mut row = vec![0.0; n];
    for (i, &s) in grid.iter().enumerate() {
        interpolate_row(m, s, &mut row);
        for j in 0..n {
            out[(i, j)] = row[j];
        }
    }
    // Exact endpoints regardless of rounding in the grid.
    let last_in = m.nrows() - 1;
    for j in 0..n {
        out[(0, j)] = m[(0, j)];
        out[(t_out - 1, j)] = m[(last_in, j)];
    }
    out
}
