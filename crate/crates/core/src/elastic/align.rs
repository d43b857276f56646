//! Alignment of one SRVF orbit to a fixed reference, and the resulting tangent
//! representative of the quotient log map.

use crate::error::Result;
use crate::srvf::Srvf;

use super::rotation::optimal_rotation;
use super::sphere::{geodesic_distance, log_sphere, TangentVector};
use super::warping::optimal_warping;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlignConfig {
    /// Maximum number of rotation/warping rounds.
    pub rounds: usize,
    /// Stop once a round improves the geodesic distance by less than this.
    pub tolerance: f64,
    /// Warping lattice size; `None` uses the sample grid.
    pub lattice: Option<usize>,
}

impl Default for AlignConfig {
    fn default() -> Self {
        Self {
            rounds: 3,
            tolerance: 1e-8,
            lattice: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Alignment {
    pub aligned: Srvf,
    pub distance: f64,
    pub initial_distance: f64,
    /// Rounds that produced an accepted improvement.
    pub rounds: usize,
}

/// Aligns `q1` to `q0` by alternating Procrustes rotation and DP warping.
///
/// The returned representative never lies farther from `q0` than `q1` does.
pub fn align_with(q0: &Srvf, q1: &Srvf, cfg: &AlignConfig) -> Result<Alignment> {
    let initial = geodesic_distance(q0, q1)?;
    let mut best = q1.clone();
    let mut best_distance = initial;
    let mut accepted = 0;
    let lattice = cfg.lattice.unwrap_or(q0.len());

    for _ in 0..cfg.rounds {
        let rotated = if q0.dim() > 1 {
            optimal_rotation(q0, &best)?.apply(&best)?
        } else {
            best.clone()
        };
        let gamma = optimal_warping(q0, &rotated, lattice)?;
        let candidate = rotated.warp(&gamma)?.project_sphere()?;
        let d = geodesic_distance(q0, &candidate)?;
        if d < best_distance - cfg.tolerance {
            best = candidate;
            best_distance = d;
            accepted += 1;
        } else {
            break;
        }
    }

    Ok(Alignment {
        aligned: best,
        distance: best_distance,
        initial_distance: initial,
        rounds: accepted,
    })
}

/// `align_with` under the default configuration, returning the representative.
pub fn align(q0: &Srvf, q1: &Srvf) -> Result<Srvf> {
    Ok(align_with(q0, q1, &AlignConfig::default())?.aligned)
}

/// Tangent representative at `q0` of the log map on the shape quotient.
pub fn log_quotient_with(q0: &Srvf, q1: &Srvf, cfg: &AlignConfig) -> Result<TangentVector> {
    let aligned = align_with(q0, q1, cfg)?.aligned;
    log_sphere(q0, &aligned)
}

pub fn log_quotient(q0: &Srvf, q1: &Srvf) -> Result<TangentVector> {
    log_quotient_with(q0, q1, &AlignConfig::default())
}
