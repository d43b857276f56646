//! Great-circle geometry on the unit sphere of SRVFs.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::srvf::{inner_matrices, Srvf};

/// Below this angle the log and geodesic use their `theta -> 0` limits.
pub const SMALL_ANGLE: f64 = 1e-8;
/// Pairs closer than this to antipodal are rejected.
pub const ANTIPODAL_MARGIN: f64 = 1e-6;

/// A tangent vector at `base`, stored on the same sample grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector {
    values: DMatrix<f64>,
    base: Srvf,
}

impl TangentVector {
    pub fn new(base: &Srvf, values: DMatrix<f64>) -> Result<Self> {
        if values.shape() != base.values().shape() {
            return Err(Error::InvalidArgument("tangent vector shape mismatch".into()));
        }
        Ok(Self {
            values,
            base: base.clone(),
        })
    }

    pub fn zero(base: &Srvf) -> Self {
        Self {
            values: DMatrix::zeros(base.len(), base.dim()),
            base: base.clone(),
        }
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn base(&self) -> &Srvf {
        &self.base
    }

    pub fn inner(&self, other: &TangentVector) -> f64 {
        inner_matrices(&self.values, &other.values)
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).max(0.0).sqrt()
    }

    /// `<v, base>`, zero for a true tangent vector.
    pub fn base_component(&self) -> f64 {
        inner_matrices(&self.values, self.base.values())
    }
}

fn cos_angle(q0: &Srvf, q1: &Srvf) -> Result<f64> {
    Ok(q0.inner(q1)?.clamp(-1.0, 1.0))
}

/// Arc length `acos(<q0, q1>)` of the great circle between two unit SRVFs.
pub fn geodesic_distance(q0: &Srvf, q1: &Srvf) -> Result<f64> {
    Ok(cos_angle(q0, q1)?.acos())
}

/// Point at fraction `tau` along the great circle from `q0` to `q1`.
pub fn geodesic(q0: &Srvf, q1: &Srvf, tau: f64) -> Result<Srvf> {
    let theta = geodesic_distance(q0, q1)?;
    if theta >= PI - ANTIPODAL_MARGIN {
        return Err(Error::Antipodal { theta });
    }
    if theta < SMALL_ANGLE {
        let values = q0.values() * (1.0 - tau) + q1.values() * tau;
        return Ok(Srvf::from_values_unchecked(values));
    }
    let s = theta.sin();
    let a = (theta * (1.0 - tau)).sin() / s;
    let b = (theta * tau).sin() / s;
    Ok(Srvf::from_values_unchecked(q0.values() * a + q1.values() * b))
}

/// Inverse exponential map at `q0`: `theta / sin(theta) (q1 - <q0,q1> q0)`.
pub fn log_sphere(q0: &Srvf, q1: &Srvf) -> Result<TangentVector> {
    let c = cos_angle(q0, q1)?;
    let theta = c.acos();
    if theta >= PI - ANTIPODAL_MARGIN {
        return Err(Error::Antipodal { theta });
    }
    if theta < SMALL_ANGLE {
        return Ok(TangentVector::zero(q0));
    }
    let scale = theta / theta.sin();
    let values = (q1.values() - q0.values() * c) * scale;
    TangentVector::new(q0, values)
}

/// `cos(|v|) q0 + sin(|v|) v / |v|`.
pub fn exp_sphere(q0: &Srvf, v: &TangentVector) -> Result<Srvf> {
    if v.values().shape() != q0.values().shape() {
        return Err(Error::InvalidArgument("tangent vector shape mismatch".into()));
    }
    let norm = v.norm();
    if norm >= PI {
        return Err(Error::OutOfInjectivity { norm });
    }
    if norm < SMALL_ANGLE {
        return Ok(Srvf::from_values_unchecked(q0.values() + v.values()));
    }
    let values = q0.values() * norm.cos() + v.values() * (norm.sin() / norm);
    Ok(Srvf::from_values_unchecked(values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::uniform_grid;
    use approx::assert_abs_diff_eq;

    fn basis(k: usize, t: usize) -> Srvf {
        // Orthonormal cosine basis under the trapezoid rule for k < t - 1.
        let g = uniform_grid(t);
        let v = DMatrix::from_fn(t, 1, |i, _| {
            if k == 0 {
                1.0
            } else {
                2f64.sqrt() * (PI * k as f64 * g[i]).cos()
            }
        });
        Srvf::new(v).unwrap().project_sphere().unwrap()
    }

    #[test]
    fn geodesic_endpoints_and_midpoint() {
        let (q0, q1) = (basis(0, 101), basis(1, 101));
        assert_abs_diff_eq!(q0.inner(&q1).unwrap(), 0.0, epsilon = 1e-12);
        let start = geodesic(&q0, &q1, 0.0).unwrap();
        let end = geodesic(&q0, &q1, 1.0).unwrap();
        assert!((start.values() - q0.values()).amax() < 1e-12);
        assert!((end.values() - q1.values()).amax() < 1e-12);
        let mid = geodesic(&q0, &q1, 0.5).unwrap();
        let expected = (q0.values() + q1.values()) / 2f64.sqrt();
        assert!((mid.values() - expected).amax() < 1e-10);
        assert_abs_diff_eq!(mid.norm(), 1.0, epsilon = 1e-8);

        let same = geodesic(&q0, &q0, 0.3).unwrap();
        assert!((same.values() - q0.values()).amax() < 1e-15);
    }

    #[test]
    fn antipodal_pairs_are_rejected() {
        let q0 = basis(2, 64);
        let neg = Srvf::new(-q0.values()).unwrap();
        assert!(matches!(geodesic(&q0, &neg, 0.5), Err(Error::Antipodal { .. })));
        assert!(matches!(log_sphere(&q0, &neg), Err(Error::Antipodal { .. })));
    }

    #[test]
    fn distance_cases() {
        let (q0, q1) = (basis(0, 101), basis(3, 101));
        assert_eq!(geodesic_distance(&q0, &q0).unwrap(), 0.0);
        assert_abs_diff_eq!(geodesic_distance(&q0, &q1).unwrap(), PI / 2.0, epsilon = 1e-12);
    }

    #[test]
    fn log_cases() {
        let (q0, q1) = (basis(0, 101), basis(1, 101));
        let zero = log_sphere(&q0, &q0).unwrap();
        assert!(zero.values().iter().all(|&v| v == 0.0));
        let v = log_sphere(&q0, &q1).unwrap();
        let expected = q1.values() * (PI / 2.0);
        assert!((v.values() - expected).amax() < 1e-10);
        assert!(v.base_component().abs() < 1e-8);
    }

    #[test]
    fn exp_cases() {
        let (q0, q1) = (basis(0, 101), basis(1, 101));
        let back = exp_sphere(&q0, &TangentVector::zero(&q0)).unwrap();
        assert_eq!(back, q0);
        let v = TangentVector::new(&q0, q1.values() * (PI / 2.0)).unwrap();
        let p = exp_sphere(&q0, &v).unwrap();
        assert!((p.values() - q1.values()).amax() < 1e-12);

        let far = TangentVector::new(&q0, q1.values() * 3.5).unwrap();
        assert!(matches!(exp_sphere(&q0, &far), Err(Error::OutOfInjectivity { .. })));
    }
}
