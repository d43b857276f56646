use nalgebra::DMatrix;

use crate::curve::trapezoid_weights;
use crate::error::{Error, Result};
use crate::srvf::Srvf;

const ORTHOGONALITY_TOL: f64 = 1e-10;

/// An element of SO(n).
#[derive(Debug, Clone, PartialEq)]
pub struct Rotation {
    matrix: DMatrix<f64>,
}

impl Rotation {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(Error::InvalidArgument("rotation must be a non-empty square matrix".into()));
        }
        let n = matrix.nrows();
        let gram = matrix.transpose() * &matrix;
        if (gram - DMatrix::<f64>::identity(n, n)).amax() > ORTHOGONALITY_TOL {
            return Err(Error::InvalidArgument("rotation is not orthogonal".into()));
        }
        let det = matrix.determinant();
        if (det - 1.0).abs() > ORTHOGONALITY_TOL {
            return Err(Error::InvalidArgument(format!("rotation determinant {det} != 1")));
        }
        Ok(Self { matrix })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            matrix: DMatrix::identity(n, n),
        }
    }

    /// Planar rotation by `angle` radians.
    pub fn planar(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self {
            matrix: DMatrix::from_row_slice(2, 2, &[c, -s, s, c]),
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn transpose(&self) -> Rotation {
        Rotation {
            matrix: self.matrix.transpose(),
        }
    }

    /// `t -> R q(t)`.
    pub fn apply(&self, q: &Srvf) -> Result<Srvf> {
        q.rotate(&self.matrix)
    }
}

/// Cross-covariance `int q0(t) q1(t)^T dt` (trapezoid).
fn cross_covariance(q0: &Srvf, q1: &Srvf) -> DMatrix<f64> {
    let w = trapezoid_weights(q0.len());
    let n = q0.dim();
    let (a, b) = (q0.values(), q1.values());
    DMatrix::from_fn(n, n, |r, c| {
        (0..q0.len()).map(|t| w[t] * a[(t, r)] * b[(t, c)]).sum()
    })
}

/// The rotation maximizing `<q0, R q1>` over SO(n) (Kabsch with
/// determinant correction). Identity for `n = 1`.
pub fn optimal_rotation(q0: &Srvf, q1: &Srvf) -> Result<Rotation> {
    q0.check_same_shape(q1)?;
    let n = q0.dim();
    if n == 1 {
        return Ok(Rotation::identity(1));
    }
    let a = cross_covariance(q0, q1);
    let svd = a.svd(true, true);
    let (u, v_t) = match (svd.u, svd.v_t) {
        (Some(u), Some(v_t)) => (u, v_t),
        _ => return Err(Error::NumericalFailure {
            iteration: 0,
            message: "svd of cross-covariance failed".into(),
        }),
    };
    let mut d = DMatrix::<f64>::identity(n, n);
    if (&u * &v_t).determinant() < 0.0 {
        d[(n - 1, n - 1)] = -1.0;
    }
    Ok(Rotation {
        matrix: u * d * v_t,
    })
}
