//! End-to-end clustering pipelines for the manifold method and the Euclidean
//! baseline.

use nalgebra::DMatrix;

use crate::cluster::{affinity, spectral_cluster, ClusterLabels};
use crate::dataset::{flatten_for_lrr, Dataset};
use crate::elastic::AlignConfig;
use crate::error::{Error, Result};
use crate::gram::{build_gram_with, GramTensor};
use crate::solver::{solve_clrr, solve_lrr_with, CoefficientMatrix, LrrConfig, SolverConfig, SolverDiagnostics};
use crate::srvf::Srvf;

#[derive(Debug, Clone)]
pub struct ClusterOutput {
    pub labels: ClusterLabels,
    pub affinity: DMatrix<f64>,
    pub coefficients: CoefficientMatrix,
    pub diagnostics: SolverDiagnostics,
}

/// Common sample count for a dataset: the longest curve.
pub fn common_samples(d: &Dataset) -> usize {
    d.max_samples()
}

/// Resamples to `t_count`, normalizes to unit length and maps every curve
/// to its SRVF on the unit sphere.
pub fn prepare_srvfs(d: &Dataset, t_count: usize) -> Result<Vec<Srvf>> {
    d.curves
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let unit = c
                .resample(t_count)?
                .normalize_length()
                .map_err(|e| Error::DegenerateInput(format!("curve {}: {e}", d.ids[i])))?;
            Srvf::from_curve(&unit).project_sphere()
        })
        .collect()
}

pub fn clrr_gram(d: &Dataset, align: &AlignConfig) -> Result<GramTensor> {
    let srvfs = prepare_srvfs(d, common_samples(d))?;
    build_gram_with(&srvfs, align)
}

fn check_k(d: &Dataset, k: usize) -> Result<()> {
    if k == 0 || k > d.len() {
        return Err(Error::InvalidArgument(format!(
            "k = {k} must be between 1 and the number of curves ({})",
            d.len()
        )));
    }
    Ok(())
}

/// Clusters from a precomputed Gram tensor.
pub fn cluster_from_gram(g: &GramTensor, k: usize, cfg: &SolverConfig, seed: u64) -> Result<ClusterOutput> {
    let (coefficients, diagnostics) = solve_clrr(g, cfg)?;
    let a = affinity(&coefficients);
    let labels = spectral_cluster(&a, k, seed)?;
    Ok(ClusterOutput {
        labels,
        affinity: a,
        coefficients,
        diagnostics,
    })
}

pub fn run_clrr(
    d: &Dataset,
    k: usize,
    cfg: &SolverConfig,
    align: &AlignConfig,
    seed: u64,
) -> Result<ClusterOutput> {
    check_k(d, k)?;
    let g = clrr_gram(d, align)?;
    cluster_from_gram(&g, k, cfg, seed)
}

pub fn run_lrr(d: &Dataset, k: usize, cfg: &LrrConfig, seed: u64) -> Result<ClusterOutput> {
    check_k(d, k)?;
    let x = flatten_for_lrr(&d.resampled(common_samples(d))?)?;
    let (coefficients, diagnostics) = solve_lrr_with(&x, cfg)?;
    let a = affinity(&coefficients);
    let labels = spectral_cluster(&a, k, seed)?;
    Ok(ClusterOutput {
        labels,
        affinity: a,
        coefficients,
        diagnostics,
    })
}
