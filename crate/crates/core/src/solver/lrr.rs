//! Euclidean LRR baseline:
//!
//! ```text
//! min_{Z,E} 1/2 |E|_noise + lambda |Z|_*   s.t.  X = X Z + E
//! ```
//!
//! solved by an alternating direction method on the split `Z = J`. Each sweep
//! updates `(J, E)` jointly (SVT and the noise prox are separable), then `Z`
//! by a cached Cholesky solve of `(I + X^T X)`, then both multipliers.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{numerical_rank, svt, CoefficientMatrix, SolverDiagnostics};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum NoiseModel {
    /// `|E|_F^2`, the Gaussian-noise choice.
    #[default]
    Frobenius,
    /// Column-wise `l2,1` norm for sample-specific corruption.
    L21,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LrrConfig {
    pub lambda: f64,
    pub mu0: f64,
    pub mu_max: f64,
    pub rho0: f64,
    pub tol: f64,
    pub max_iters: usize,
    pub noise: NoiseModel,
}

impl Default for LrrConfig {
    fn default() -> Self {
        Self {
            lambda: 1.0,
            mu0: 0.1,
            mu_max: 10.0,
            rho0: 1.1,
            tol: 1e-4,
            max_iters: 1000,
            noise: NoiseModel::Frobenius,
        }
    }
}

fn noise_prox(v: &DMatrix<f64>, mu: f64, noise: NoiseModel) -> DMatrix<f64> {
    match noise {
        // argmin 1/2 |E|^2 + mu/2 |E - V|^2
        NoiseModel::Frobenius => v * (mu / (1.0 + mu)),
        // argmin 1/2 |E|_{2,1} + mu/2 |E - V|^2, column shrinkage
        NoiseModel::L21 => {
            let tau = 0.5 / mu;
            let mut out = v.clone();
            for mut col in out.column_iter_mut() {
                let norm = col.norm();
                if norm <= tau {
                    col.fill(0.0);
                } else {
                    col *= (norm - tau) / norm;
                }
            }
            out
        }
    }
}

fn noise_value(e: &DMatrix<f64>, noise: NoiseModel) -> f64 {
    match noise {
        NoiseModel::Frobenius => 0.5 * e.norm_squared(),
        NoiseModel::L21 => 0.5 * e.column_iter().map(|c| c.norm()).sum::<f64>(),
    }
}

pub fn solve_lrr(x: &DMatrix<f64>, lambda: f64) -> Result<(CoefficientMatrix, SolverDiagnostics)> {
    solve_lrr_with(
        x,
        &LrrConfig {
            lambda,
            ..LrrConfig::default()
        },
    )
}

/// Runs the baseline on a `D x N` data matrix (one sample per column).
pub fn solve_lrr_with(
    x: &DMatrix<f64>,
    cfg: &LrrConfig,
) -> Result<(CoefficientMatrix, SolverDiagnostics)> {
    if !(cfg.lambda > 0.0) || !(cfg.mu0 > 0.0) || cfg.mu0 > cfg.mu_max || !(cfg.rho0 > 1.0) {
        return Err(Error::InvalidArgument(format!("invalid LRR configuration {cfg:?}")));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("data matrix must be finite".into()));
    }
    let n = x.ncols();
    if n < 2 {
        return Err(Error::InvalidArgument("LRR needs at least 2 samples".into()));
    }

    let xtx = x.transpose() * x;
    let system = (&xtx + DMatrix::<f64>::identity(n, n))
        .cholesky()
        .ok_or_else(|| Error::NumericalFailure {
            iteration: 0,
            message: "I + X^T X is not positive definite".into(),
        })?;
    let x_scale = x.norm().max(1.0);

    let mut z = DMatrix::<f64>::zeros(n, n);
    let mut j = DMatrix::<f64>::zeros(n, n);
    let mut e = DMatrix::<f64>::zeros(x.nrows(), n);
    let mut y1 = DMatrix::<f64>::zeros(x.nrows(), n);
    let mut y2 = DMatrix::<f64>::zeros(n, n);
    let mut mu = cfg.mu0;

    let mut diag = SolverDiagnostics {
        iterations: 0,
        objective_trace: Vec::new(),
        feasibility_trace: Vec::new(),
        beta_trace: Vec::new(),
        final_rank: 0,
        converged: false,
        residual: 0.0,
        eta: 1.0,
    };

    for k in 0..cfg.max_iters {
        let j_next = svt(&(&z + &y2 / mu), cfg.lambda / mu);
        let xz = x * &z;
        let e_next = noise_prox(&(x - &xz + &y1 / mu), mu, cfg.noise);
        let rhs = x.transpose() * (x - &e_next) + &j_next + (x.transpose() * &y1 - &y2) / mu;
        let z_next = system.solve(&rhs);
        if z_next.iter().any(|v| !v.is_finite()) {
            return Err(Error::NumericalFailure {
                iteration: k,
                message: "non-finite Z iterate".into(),
            });
        }

        let primal = x - x * &z_next - &e_next;
        let split = &z_next - &j_next;
        let change = (&z_next - &z)
            .norm()
            .max((&j_next - &j).norm())
            .max((&e_next - &e).norm() / x_scale);

        y1 += &primal * mu;
        y2 += &split * mu;
        z = z_next;
        j = j_next;
        e = e_next;

        let feas = (primal.norm() / x_scale).max(split.norm());
        diag.iterations = k + 1;
        diag.objective_trace
            .push(cfg.lambda * j.singular_values().sum() + noise_value(&e, cfg.noise));
        diag.feasibility_trace.push(feas);
        diag.beta_trace.push(mu);

        let small_change = mu * change <= cfg.tol;
        if small_change && feas <= cfg.tol {
            diag.converged = true;
            break;
        }
        let rho = if small_change { cfg.rho0 } else { 1.0 };
        mu = cfg.mu_max.min(rho * mu);
    }

    let residual = x - x * &z;
    diag.residual = noise_value(&residual, cfg.noise);
    diag.final_rank = numerical_rank(&z);
    Ok((CoefficientMatrix::new(z)?, diag))
}
