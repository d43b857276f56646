#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use curveclust::{Curve, Srvf};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Smooth random curve: a line plus a few random low-frequency modes.
pub fn smooth_curve(t: usize, n: usize, seed: u64) -> Curve {
    let mut r = rng(seed);
    let coeffs: Vec<Vec<(f64, f64)>> = (0..n)
        .map(|_| (1..=3).map(|_| (r.random_range(-1.0..1.0), r.random_range(-1.0..1.0))).collect())
        .collect();
    let slope: Vec<f64> = (0..n).map(|_| r.random_range(-1.0..1.0)).collect();
    Curve::from_fn(t, n, |s| {
        (0..n)
            .map(|d| {
                slope[d] * s
                    + coeffs[d]
                        .iter()
                        .enumerate()
                        .map(|(k, (a, b))| {
                            let w = PI * (k + 1) as f64;
                            (a * (w * s).sin() + b * (w * s).cos()) / (k + 1) as f64
                        })
                        .sum::<f64>()
            })
            .collect()
    })
    .unwrap()
}

/// Unit-sphere SRVF of a smooth random unit-length curve.
pub fn curve_srvf(t: usize, n: usize, seed: u64) -> Srvf {
    Srvf::from_curve(&smooth_curve(t, n, seed).normalize_length().unwrap())
        .project_sphere()
        .unwrap()
}

/// Random smooth function on the sphere, not necessarily an SRVF of a
/// "nice" curve; covers the full range of angles.
pub fn sphere_point(t: usize, n: usize, seed: u64) -> Srvf {
    let mut r = rng(seed);
    let coeffs: Vec<f64> = (0..n * 5).map(|_| r.random_range(-1.0..1.0)).collect();
    let values = DMatrix::from_fn(t, n, |i, d| {
        let s = i as f64 / (t - 1) as f64;
        (0..5).map(|k| coeffs[d * 5 + k] * (PI * k as f64 * s).cos()).sum()
    });
    Srvf::new(values).unwrap().project_sphere().unwrap()
}

pub fn random_matrix(rows: usize, cols: usize, seed: u64) -> DMatrix<f64> {
    let mut r = rng(seed);
    DMatrix::from_fn(rows, cols, |_, _| r.random_range(-1.0..1.0))
}

pub fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).amax()
}
