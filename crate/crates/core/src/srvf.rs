//! Square-root velocity functions and their L2 geometry.
//!
//! For a curve `beta`, `q(t) = beta'(t) / sqrt(|beta'(t)|)`. The L2 metric on
//! SRVFs is invariant to simultaneous reparameterization of both arguments,
//! and unit-length curves map onto the unit sphere of `L2([0,1], R^n)`.

use nalgebra::DMatrix;

use crate::curve::{self, Curve, MIN_SAMPLES};
use crate::error::{Error, Result};
use crate::elastic::WarpingFunction;

/// Velocities below this norm map to `q = 0`.
pub const ZERO_VELOCITY_EPS: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct Srvf {
    values: DMatrix<f64>,
}

impl Srvf {
    pub fn new(values: DMatrix<f64>) -> Result<Self> {
        if values.nrows() < MIN_SAMPLES || values.ncols() == 0 {
            return Err(Error::InvalidArgument(format!(
                "srvf must be at least {MIN_SAMPLES} x 1, got {} x {}",
                values.nrows(),
                values.ncols()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("srvf values must be finite".into()));
        }
        Ok(Self { values })
    }

    pub(crate) fn from_values_unchecked(values: DMatrix<f64>) -> Self {
        Self { values }
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.values.nrows() == 0
    }

    pub fn dim(&self) -> usize {
        self.values.ncols()
    }

    pub fn from_curve(c: &Curve) -> Srvf {
        let vel = curve::derivative_matrix(c.samples());
        let mut values = vel;
        for mut row in values.row_iter_mut() {
            let speed = row.norm();
            if speed < ZERO_VELOCITY_EPS {
                row.fill(0.0);
            } else {
                row /= speed.sqrt();
            }
        }
        Srvf { values }
    }

    /// Reconstructs `beta(t) = start + int_0^t q(s) |q(s)| ds` by cumulative
    /// trapezoidal integration.
    pub fn to_curve(&self, start: &[f64]) -> Result<Curve> {
        if start.len() != self.dim() {
            return Err(Error::InvalidArgument("start point dimension mismatch".into()));
        }
        let t = self.len();
        let n = self.dim();
        let h = 1.0 / (t - 1) as f64;
        let mut velocity = self.values.clone();
        for mut row in velocity.row_iter_mut() {
            let norm = row.norm();
            row *= norm;
        }
        let mut out = DMatrix::zeros(t, n);
        for j in 0..n {
            out[(0, j)] = start[j];
            for i in 1..t {
                out[(i, j)] =
                    out[(i - 1, j)] + 0.5 * h * (velocity[(i - 1, j)] + velocity[(i, j)]);
            }
        }
        Curve::new(out)
    }

    /// L2 inner product `int <q1(t), q2(t)> dt` (trapezoid).
    pub fn inner(&self, other: &Srvf) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self.inner_unchecked(other))
    }

    pub(crate) fn inner_unchecked(&self, other: &Srvf) -> f64 {
        inner_matrices(&self.values, &other.values)
    }

    pub fn norm(&self) -> f64 {
        self.inner_unchecked(self).max(0.0).sqrt()
    }

    pub fn distance(&self, other: &Srvf) -> Result<f64> {
        self.check_same_shape(other)?;
        let diff = Srvf::from_values_unchecked(&self.values - &other.values);
        Ok(diff.norm())
    }

    /// Rescales onto the unit sphere `int |q|^2 dt = 1`.
    pub fn project_sphere(&self) -> Result<Srvf> {
        let norm = self.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::DegenerateInput("cannot project a zero srvf onto the sphere".into()));
        }
        Ok(Srvf {
            values: &self.values / norm,
        })
    }

    /// The group action `(q o gamma) sqrt(gamma')`, with `q` linearly
    /// interpolated at `gamma(t_i)` and `gamma'` by finite differences.
    pub fn warp(&self, gamma: &WarpingFunction) -> Result<Srvf> {
        if gamma.len() != self.len() {
            return Err(Error::InvalidArgument(format!(
                "warp has {} samples, srvf has {}",
                gamma.len(),
                self.len()
            )));
        }
        let slope = curve::derivative_slice(gamma.values());
        let n = self.dim();
        let mut out = DMatrix::zeros(self.len(), n);
        let mut row = vec![0.0; n];
        for (i, (&g, &d)) in gamma.values().iter().zip(&slope).enumerate() {
            curve::interpolate_row(&self.values, g, &mut row);
            let factor = d.max(0.0).sqrt();
            for j in 0..n {
                out[(i, j)] = row[j] * factor;
            }
        }
        Ok(Srvf { values: out })
    }

    /// Applies an `n x n` matrix to every sample: `q(t) -> R q(t)`.
    pub fn rotate(&self, r: &DMatrix<f64>) -> Result<Srvf> {
        if r.nrows() != self.dim() || r.ncols() != self.dim() {
            return Err(Error::InvalidArgument("rotation dimension mismatch".into()));
        }
        Ok(Srvf {
            values: &self.values * r.transpose(),
        })
    }

    pub(crate) fn check_same_shape(&self, other: &Srvf) -> Result<()> {
        if self.values.shape() != other.values.shape() {
            return Err(Error::InvalidArgument(format!(
                "shape mismatch: {:?} vs {:?}",
                self.values.shape(),
                other.values.shape()
            )));
        }
        Ok(())
    }
}

/// Trapezoid L2 inner product of two `T x n` sample matrices.
pub(crate) fn inner_matrices(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let t = a.nrows();
    let weights = curve::trapezoid_weights(t);
    let mut total = 0.0;
    for j in 0..a.ncols() {
        let (ca, cb) = (a.column(j), b.column(j));
        for i in 0..t {
            total += weights[i] * (ca[i] * cb[i]);
        }
    }
    total
}
