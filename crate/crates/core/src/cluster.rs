//! Spectral clustering of a learned affinity and clustering-accuracy scoring.

use nalgebra::{DMatrix, SymmetricEigen};
use pathfinding::prelude::{kuhn_munkres, Matrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::solver::CoefficientMatrix;

pub const KMEANS_RESTARTS: usize = 20;
pub const KMEANS_ITERS: usize = 300;
/// Vertex degrees are floored here before normalization.
pub const DEGREE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterLabels {
    labels: Vec<usize>,
    k: usize,
}

impl ClusterLabels {
    pub fn new(labels: Vec<usize>, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("cluster count must be positive".into()));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= k) {
            return Err(Error::InvalidArgument(format!("label {bad} out of range for k = {k}")));
        }
        Ok(Self { labels, k })
    }

    /// Uses `max label + 1` as the cluster count.
    pub fn from_labels(labels: Vec<usize>) -> Result<Self> {
        let k = labels.iter().max().map_or(1, |m| m + 1);
        Self::new(labels, k)
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }
}

/// `(|W| + |W|^T) / 2`.
pub fn affinity(w: &CoefficientMatrix) -> DMatrix<f64> {
    affinity_matrix(w.matrix())
}

pub fn affinity_matrix(w: &DMatrix<f64>) -> DMatrix<f64> {
    let n = w.nrows();
    DMatrix::from_fn(n, n, |i, j| 0.5 * (w[(i, j)].abs() + w[(j, i)].abs()))
}

/// Normalized spectral embedding followed by seeded k-means.
///
/// Uses the symmetric normalized Laplacian `I - D^{-1/2} A D^{-1/2}`, keeps the
/// eigenvectors of its `k` smallest eigenvalues, normalizes embedding rows to
/// unit length and runs k-means with [`KMEANS_RESTARTS`] restarts.
pub fn spectral_cluster(a: &DMatrix<f64>, k: usize, seed: u64) -> Result<ClusterLabels> {
    let n = a.nrows();
    if !a.is_square() || n == 0 {
        return Err(Error::InvalidArgument("affinity must be a non-empty square matrix".into()));
    }
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!("need 1 <= k <= N, got k = {k}, N = {n}")));
    }
    if a.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::InvalidArgument("affinity must be finite and nonnegative".into()));
    }
    if k == 1 {
        return ClusterLabels::new(vec![0; n], 1);
    }

    let mut isolated = 0;
    let inv_sqrt_deg: Vec<f64> = a
        .row_iter()
        .map(|r| {
            let d = r.sum();
            if d < DEGREE_FLOOR {
                isolated += 1;
            }
            1.0 / d.max(DEGREE_FLOOR).sqrt()
        })
        .collect();
    if isolated > 0 {
        log::warn!("{isolated} isolated vertices; degree floored at {DEGREE_FLOOR}");
    }
    let normalized = DMatrix::from_fn(n, n, |i, j| {
        let v = inv_sqrt_deg[i] * a[(i, j)] * inv_sqrt_deg[j];
        let w = inv_sqrt_deg[j] * a[(j, i)] * inv_sqrt_deg[i];
        0.5 * (v + w)
    });
    let eig = SymmetricEigen::new(normalized);
    // Smallest Laplacian eigenvalues are the largest of the normalized affinity.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| {
        eig.eigenvalues[y]
            .partial_cmp(&eig.eigenvalues[x])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(x.cmp(&y))
    });

    let points: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut row: Vec<f64> = order[..k].iter().map(|&c| eig.eigenvectors[(i, c)]).collect();
            let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 0.0 {
                row.iter_mut().for_each(|v| *v /= norm);
            }
            row
        })
        .collect();

    let labels = kmeans(&points, k, KMEANS_RESTARTS, KMEANS_ITERS, seed);
    ClusterLabels::new(labels, k)
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(p: &[f64], centers: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, center) in centers.iter().enumerate() {
        let d = sq_dist(p, center);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn kmeans_pp_init(points: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = points.len();
    let mut centers = vec![points[rng.random_range(0..n)].clone()];
    let mut dist: Vec<f64> = points.iter().map(|p| sq_dist(p, &centers[0])).collect();
    while centers.len() < k {
        let total: f64 = dist.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut chosen = n - 1;
            for (i, &d) in dist.iter().enumerate() {
                if target < d {
                    chosen = i;
                    break;
                }
                target -= d;
            }
            chosen
        } else {
            rng.random_range(0..n)
        };
        centers.push(points[next].clone());
        for (d, p) in dist.iter_mut().zip(points) {
            *d = d.min(sq_dist(p, &centers[centers.len() - 1]));
        }
    }
    centers
}

fn lloyd(points: &[Vec<f64>], mut centers: Vec<Vec<f64>>, iters: usize) -> (Vec<usize>, f64) {
    let k = centers.len();
    let dim = points[0].len();
    let mut labels = vec![usize::MAX; points.len()];
    for _ in 0..iters {
        let mut changed = false;
        for (i, p) in points.iter().enumerate() {
            let (c, _) = nearest(p, &centers);
            if labels[i] != c {
                labels[i] = c;
                changed = true;
            }
        }
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (p, &l) in points.iter().zip(&labels) {
            counts[l] += 1;
            for (s, v) in sums[l].iter_mut().zip(p) {
                *s += v;
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                centers[c] = sums[c].iter().map(|s| s / counts[c] as f64).collect();
            } else {
                // Reseed an empty cluster at the point worst served by its center.
                let far = (0..points.len())
                    .max_by(|&x, &y| {
                        let dx = sq_dist(&points[x], &centers[labels[x]]);
                        let dy = sq_dist(&points[y], &centers[labels[y]]);
                        dx.partial_cmp(&dy).unwrap_or(std::cmp::Ordering::Equal).then(y.cmp(&x))
                    })
                    .unwrap_or(0);
                centers[c] = points[far].clone();
                labels[far] = c;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let inertia = points
        .iter()
        .zip(&labels)
        .map(|(p, &l)| sq_dist(p, &centers[l]))
        .sum();
    (labels, inertia)
}

/// k-means++ with `restarts` seeded restarts; lowest inertia wins, ties go to
/// the earliest restart.
pub fn kmeans(points: &[Vec<f64>], k: usize, restarts: usize, iters: usize, seed: u64) -> Vec<usize> {
    let mut best: Option<(Vec<usize>, f64)> = None;
    for r in 0..restarts.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(r as u64));
        let centers = kmeans_pp_init(points, k, &mut rng);
        let (labels, inertia) = lloyd(points, centers, iters);
        if best.as_ref().is_none_or(|(_, b)| inertia < *b) {
            best = Some((labels, inertia));
        }
    }
    best.map(|(l, _)| l).unwrap_or_default()
}

/// Subspace clustering accuracy in percent: `100 (1 - misclassified / N)`
/// under the best one-to-one matching of predicted to true labels.
pub fn sca(predicted: &ClusterLabels, truth: &ClusterLabels) -> Result<f64> {
    let n = truth.len();
    if predicted.len() != n {
        return Err(Error::InvalidArgument(format!(
            "label length mismatch: {} predicted vs {} true",
            predicted.len(),
            n
        )));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("cannot score empty labelings".into()));
    }
    let size = predicted.k().max(truth.k());
    let mut confusion = Matrix::new(size, size, 0i64);
    for (&p, &t) in predicted.labels().iter().zip(truth.labels()) {
        confusion[(p, t)] += 1;
    }
    let (matched, _) = kuhn_munkres(&confusion);
    let misclassified = n as i64 - matched;
    Ok(100.0 * (1.0 - misclassified as f64 / n as f64))
}
