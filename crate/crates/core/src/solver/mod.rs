//! Nuclear-norm regularized self-expression solvers.
//!
//! [`solve_clrr`] minimizes
//!
//! ```text
//! lambda |W|_* + 1/2 sum_i w_i B^i w_i^T   s.t.  W 1 = 1
//! ```
//!
//! by the linearized alternating direction method with adaptive penalty: the
//! smooth part of the augmented Lagrangian is linearized at the current
//! iterate, which reduces each W-step to one singular value thresholding.
//! [`solve_lrr`] is the Euclidean baseline on a data matrix.

mod lrr;

use std::io::Write;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gram::GramTensor;

pub use lrr::{solve_lrr, solve_lrr_with, LrrConfig, NoiseModel};

/// Singular values at or below `RANK_TOL * sigma_max` do not count toward rank.
pub const RANK_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub lambda: f64,
    pub beta0: f64,
    pub beta_max: f64,
    pub rho0: f64,
    pub eps1: f64,
    pub eps2: f64,
    pub max_iters: usize,
    pub eta_override: Option<f64>,
    /// Force `w_ii = 0` after every step.
    pub zero_diagonal: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            lambda: 0.1,
            beta0: 0.1,
            beta_max: 10.0,
            rho0: 1.1,
            eps1: 1e-4,
            eps2: 1e-4,
            max_iters: 500,
            eta_override: None,
            zero_diagonal: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("lambda", self.lambda),
            ("beta0", self.beta0),
            ("beta_max", self.beta_max),
            ("eps1", self.eps1),
            ("eps2", self.eps2),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")));
            }
        }
        if self.beta0 > self.beta_max {
            return Err(Error::InvalidArgument("beta0 must not exceed beta_max".into()));
        }
        if !(self.rho0 > 1.0) {
            return Err(Error::InvalidArgument("rho0 must exceed 1".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidArgument("max_iters must be positive".into()));
        }
        if let Some(eta) = self.eta_override {
            if !(eta > 0.0) {
                return Err(Error::InvalidArgument("eta_override must be positive".into()));
            }
        }
        Ok(())
    }
}

/// Per-iteration record, also the JSON-lines trace schema.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub k: usize,
    pub obj: f64,
    pub feas: f64,
    pub beta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverDiagnostics {
    pub iterations: usize,
    pub objective_trace: Vec<f64>,
    pub feasibility_trace: Vec<f64>,
    pub beta_trace: Vec<f64>,
    pub final_rank: usize,
    pub converged: bool,
    /// Final value of the fit term (`1/2 sum_i w_i B^i w_i^T`, or
    /// `1/2 |E|_F^2` for the baseline).
    pub residual: f64,
    pub eta: f64,
}

impl SolverDiagnostics {
    pub fn trace(&self) -> impl Iterator<Item = TraceRecord> + '_ {
        (0..self.iterations).map(move |k| TraceRecord {
            k,
            obj: self.objective_trace[k],
            feas: self.feasibility_trace[k],
            beta: self.beta_trace[k],
        })
    }

    pub fn write_trace(&self, mut w: impl Write) -> Result<()> {
        for rec in self.trace() {
            serde_json::to_writer(&mut w, &rec)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }
}

/// Self-expression coefficients, one row per curve.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientMatrix {
    w: DMatrix<f64>,
}

impl CoefficientMatrix {
    pub fn new(w: DMatrix<f64>) -> Result<Self> {
        if !w.is_square() {
            return Err(Error::InvalidArgument("coefficient matrix must be square".into()));
        }
        if w.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("coefficient matrix must be finite".into()));
        }
        Ok(Self { w })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.w
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.w
    }

    pub fn len(&self) -> usize {
        self.w.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.w.nrows() == 0
    }

    /// `|W 1 - 1|_2`.
    pub fn row_sum_residual(&self) -> f64 {
        row_sum_residual(&self.w).norm()
    }

    pub fn nuclear_norm(&self) -> f64 {
        self.w.singular_values().sum()
    }
}

fn row_sum_residual(w: &DMatrix<f64>) -> DVector<f64> {
    DVector::from_iterator(w.nrows(), w.row_iter().map(|r| r.sum() - 1.0))
}

/// Numerical rank at relative threshold [`RANK_TOL`].
pub fn numerical_rank(m: &DMatrix<f64>) -> usize {
    let sv = m.singular_values();
    let max = sv.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > RANK_TOL * max).count()
}

/// Singular value thresholding `U diag(max(sigma - tau, 0)) V^T`, the
/// proximal operator of `tau |.|_*`.
pub fn svt(m: &DMatrix<f64>, tau: f64) -> DMatrix<f64> {
    let mut svd = m.clone().svd(true, true);
    for s in svd.singular_values.iter_mut() {
        *s = (*s - tau).max(0.0);
    }
    svd.recompose().expect("svd computed with u and v")
}

/// `1/2 sum_i w_i B^i w_i^T`.
pub fn fit_term(w: &DMatrix<f64>, g: &GramTensor) -> f64 {
    0.5 * (0..w.nrows())
        .map(|i| {
            let row = w.row(i);
            (row * g.slice(i) * row.transpose())[(0, 0)]
        })
        .sum::<f64>()
}

/// Smooth part of the augmented Lagrangian:
/// `1/2 sum_i w_i B^i w_i^T + <y, W1 - 1> + beta/2 |W1 - 1|^2`.
pub fn smooth_objective(w: &DMatrix<f64>, y: &DVector<f64>, beta: f64, g: &GramTensor) -> f64 {
    let r = row_sum_residual(w);
    fit_term(w, g) + y.dot(&r) + 0.5 * beta * r.norm_squared()
}

/// Gradient of [`smooth_objective`]: row `i` is
/// `w_i B^i + (y_i + beta (sum_j w_ij - 1)) 1^T`.
pub fn gradient_f(w: &DMatrix<f64>, y: &DVector<f64>, beta: f64, g: &GramTensor) -> DMatrix<f64> {
    let n = w.nrows();
    let r = row_sum_residual(w);
    let mut out = DMatrix::zeros(n, n);
    for i in 0..n {
        let wb = w.row(i) * g.slice(i);
        let shift = y[i] + beta * r[i];
        for j in 0..n {
            out[(i, j)] = wb[j] + shift;
        }
    }
    out
}

/// Full cLRR objective `lambda |W|_* + 1/2 sum_i w_i B^i w_i^T`.
pub fn clrr_objective(w: &DMatrix<f64>, g: &GramTensor, lambda: f64) -> f64 {
    lambda * w.singular_values().sum() + fit_term(w, g)
}

fn check_finite(m: &DMatrix<f64>, iteration: usize, what: &str) -> Result<()> {
    if m.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NumericalFailure {
            iteration,
            message: format!("non-finite {what}"),
        })
    }
}

pub fn solve_clrr(
    g: &GramTensor,
    cfg: &SolverConfig,
) -> Result<(CoefficientMatrix, SolverDiagnostics)> {
    cfg.validate()?;
    let n = g.len();
    if n < 2 {
        return Err(Error::InvalidArgument("solver needs at least 2 curves".into()));
    }
    let eta = cfg.eta_override.unwrap_or_else(|| g.eta_bound());

    let mut w = DMatrix::<f64>::zeros(n, n);
    let mut y = DVector::<f64>::zeros(n);
    let mut beta = cfg.beta0;
    let mut diag = SolverDiagnostics {
        iterations: 0,
        objective_trace: Vec::new(),
        feasibility_trace: Vec::new(),
        beta_trace: Vec::new(),
        final_rank: 0,
        converged: false,
        residual: 0.0,
        eta,
    };

    for k in 0..cfg.max_iters {
        let step = 1.0 / (eta * beta);
        let grad = gradient_f(&w, &y, beta, g);
        let mut next = svt(&(&w - grad * step), cfg.lambda * step);
        if cfg.zero_diagonal {
            next.fill_diagonal(0.0);
        }
        check_finite(&next, k, "W iterate")?;

        let change = (&next - &w).norm();
        let r = row_sum_residual(&next);
        let feas = r.norm();
        w = next;
        y += &r * beta;

        diag.iterations = k + 1;
        diag.objective_trace.push(clrr_objective(&w, g, cfg.lambda));
        diag.feasibility_trace.push(feas);
        diag.beta_trace.push(beta);

        let small_change = beta * change <= cfg.eps1;
        if small_change && feas <= cfg.eps2 {
            diag.converged = true;
            break;
        }
        let rho = if small_change { cfg.rho0 } else { 1.0 };
        beta = cfg.beta_max.min(rho * beta);
    }

    diag.final_rank = numerical_rank(&w);
    diag.residual = fit_term(&w, g);
    Ok((CoefficientMatrix { w }, diag))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn svt_on_diagonal() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, 1.0, 0.2]));
        let out = svt(&m, 1.0);
        let expected = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 0.0, 0.0]));
        assert!((out - expected).amax() < 1e-12);
    }

    #[test]
    fn svt_with_zero_threshold_is_identity() {
        let m = DMatrix::from_fn(5, 5, |i, j| ((i * 7 + j * 3) % 11) as f64 - 5.0);
        assert!((svt(&m, 0.0) - &m).amax() < 1e-12);
    }

    #[test]
    fn gradient_trivial_cases() {
        let g = GramTensor::zeros(4);
        let y = DVector::zeros(4);
        let grad = gradient_f(&DMatrix::zeros(4, 4), &y, 0.7, &g);
        assert!(grad.iter().all(|&v| (v + 0.7).abs() < 1e-15));
        let stochastic = DMatrix::from_element(4, 4, 0.25);
        assert!(gradient_f(&stochastic, &y, 0.7, &g).amax() < 1e-15);
    }

    #[test]
    fn zero_tensor_converges_to_averaging_matrix() {
        let g = GramTensor::zeros(4);
        let (w, diag) = solve_clrr(&g, &SolverConfig::default()).unwrap();
        assert!(diag.converged, "{diag:?}");
        assert!(w.row_sum_residual() <= 1e-4);
        assert_abs_diff_eq!(w.nuclear_norm(), 1.0, epsilon = 1e-3);
        assert_eq!(diag.final_rank, 1);
        assert_eq!(diag.objective_trace.len(), diag.iterations);
    }

    #[test]
    fn zero_diagonal_mode() {
        let g = GramTensor::zeros(5);
        let cfg = SolverConfig {
            zero_diagonal: true,
            ..SolverConfig::default()
        };
        let (w, _) = solve_clrr(&g, &cfg).unwrap();
        assert!(w.matrix().diagonal().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn config_validation() {
        let bad = [
            SolverConfig { lambda: 0.0, ..Default::default() },
            SolverConfig { rho0: 1.0, ..Default::default() },
            SolverConfig { beta0: 20.0, ..Default::default() },
            SolverConfig { max_iters: 0, ..Default::default() },
            SolverConfig { eta_override: Some(-1.0), ..Default::default() },
        ];
        for cfg in bad {
            assert!(cfg.validate().is_err(), "{cfg:?}");
        }
    }

    #[test]
    fn trace_lines_parse() {
        let (_, diag) = solve_clrr(&GramTensor::zeros(3), &SolverConfig::default()).unwrap();
        let mut buf = Vec::new();
        diag.write_trace(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), diag.iterations);
        let first: TraceRecord = serde_json::from_str(lines[0]).unwrap();
        assert_eq!(first.k, 0);
        assert!(lines[0].contains("\"obj\"") && lines[0].contains("\"beta\""));
    }
}
