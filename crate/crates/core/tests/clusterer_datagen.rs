mod common;

use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

use curveclust::cluster::*;
use curveclust::datagen::*;
use curveclust::dataset::flatten_for_lrr;
use curveclust::{Curve, Dataset};

use common::*;

fn blocks(sizes: &[usize]) -> (DMatrix<f64>, ClusterLabels) {
    let labels: Vec<usize> = sizes.iter().enumerate().flat_map(|(c, &s)| std::iter::repeat_n(c, s)).collect();
    let n = labels.len();
    let a = DMatrix::from_fn(n, n, |i, j| if labels[i] == labels[j] { 1.0 } else { 0.0 });
    (a, ClusterLabels::from_labels(labels).unwrap())
}

fn labels(v: &[usize]) -> ClusterLabels {
    ClusterLabels::from_labels(v.to_vec()).unwrap()
}

#[test]
fn block_diagonal_affinity_is_recovered() {
    let (a, truth) = blocks(&[20, 20, 20]);
    let got = spectral_cluster(&a, 3, 0).unwrap();
    assert_eq!(sca(&got, &truth).unwrap(), 100.0);
    assert_eq!(got.cluster_sizes(), vec![20, 20, 20]);
}

#[test]
fn perturbed_blocks_are_recovered() {
    let (base, truth) = blocks(&[20, 20, 20]);
    for seed in 0..20 {
        let mut r = rng(seed);
        let mut a = DMatrix::zeros(60, 60);
        for i in 0..60 {
            for j in i..60 {
                let v = if base[(i, j)] > 0.0 { r.random_range(0.5..1.0) } else { r.random_range(0.0..0.01) };
                a[(i, j)] = v;
                a[(j, i)] = v;
            }
        }
        let got = spectral_cluster(&a, 3, seed).unwrap();
        assert_eq!(sca(&got, &truth).unwrap(), 100.0, "seed {seed}");
    }
}

#[test]
fn spectral_clustering_is_scale_invariant() {
    let w = random_matrix(30, 30, 4);
    let a = affinity_matrix(&w);
    let first = spectral_cluster(&a, 3, 7).unwrap();
    for c in [1e-3, 0.5, 4.0, 1e3] {
        assert_eq!(spectral_cluster(&(&a * c), 3, 7).unwrap(), first, "scale {c}");
    }
}

#[test]
fn spectral_clustering_is_permutation_equivariant() {
    let (a, truth) = blocks(&[8, 12, 10]);
    let mut perm: Vec<usize> = (0..30).collect();
    perm.shuffle(&mut rng(1));
    let permuted = DMatrix::from_fn(30, 30, |i, j| a[(perm[i], perm[j])]);
    let got = spectral_cluster(&permuted, 3, 0).unwrap();
    let expected = labels(&perm.iter().map(|&p| truth.labels()[p]).collect::<Vec<_>>());
    assert_eq!(sca(&got, &expected).unwrap(), 100.0);
}

#[test]
fn isolated_vertices_do_not_break_clustering() {
    let (mut a, _) = blocks(&[5, 5]);
    a.row_mut(9).fill(0.0);
    a.column_mut(9).fill(0.0);
    let got = spectral_cluster(&a, 2, 0).unwrap();
    assert_eq!(got.len(), 10);
}

#[test]
fn sca_arithmetic() {
    let truth: Vec<usize> = (0..60).map(|i| i / 20).collect();
    let mut wrong = truth.clone();
    wrong[7] = 2;
    assert_eq!(sca(&labels(&truth), &labels(&truth)).unwrap(), 100.0);
    assert_eq!(sca(&labels(&wrong), &labels(&truth)).unwrap(), 100.0 * (1.0 - 1.0 / 60.0));
    assert_eq!(format!("{:.2}", sca(&labels(&wrong), &labels(&truth)).unwrap()), "98.33");
    assert!(sca(&labels(&truth[..59]), &labels(&truth)).is_err());
}

proptest! {
    #[test]
    fn sca_is_symmetric_and_permutation_invariant(
        raw in prop::collection::vec((0usize..3, 0usize..3), 3..80),
        perm in Just([0usize, 1, 2]).prop_shuffle(),
    ) {
        let mut p: Vec<usize> = raw.iter().map(|x| x.0).collect();
        let mut t: Vec<usize> = raw.iter().map(|x| x.1).collect();
        p[..3].copy_from_slice(&[0, 1, 2]);
        t[..3].copy_from_slice(&[0, 1, 2]);
        let (p, t) = (ClusterLabels::new(p, 3).unwrap(), ClusterLabels::new(t, 3).unwrap());
        let s = sca(&p, &t).unwrap();
        prop_assert_eq!(s, sca(&t, &p).unwrap());
        let renamed = ClusterLabels::new(p.labels().iter().map(|&l| perm[l]).collect(), 3).unwrap();
        prop_assert_eq!(s, sca(&renamed, &t).unwrap());
        prop_assert!((0.0..=100.0).contains(&s));
    }

    #[test]
    fn affinity_is_symmetric_nonnegative(seed in any::<u64>(), n in 1usize..20) {
        let a = affinity_matrix(&random_matrix(n, n, seed));
        prop_assert_eq!(&a, &a.transpose());
        prop_assert!(a.iter().all(|v| *v >= 0.0));
    }

    #[test]
    fn warps_from_generators_are_valid(seed in any::<u64>(), strength in 0.0f64..3.0) {
        let g = random_warp(100, strength, seed).unwrap();
        prop_assert_eq!(g.values()[0], 0.0);
        prop_assert_eq!(g.values()[99], 1.0);
        prop_assert!(g.values().windows(2).all(|w| w[1] > w[0]));
    }
}

#[test]
fn sine_generator_shape_and_determinism() {
    let d = gen_sine_clusters(3, 20, 100, &WarpConfig::sine(), 5).unwrap();
    assert_eq!(d.len(), 60);
    assert_eq!(d.truth().unwrap().cluster_sizes(), vec![20, 20, 20]);
    assert_eq!(d, gen_sine_clusters(3, 20, 100, &WarpConfig::sine(), 5).unwrap());
    let other = gen_sine_clusters(3, 20, 100, &WarpConfig::sine(), 6).unwrap();
    assert_eq!(other.labels, d.labels);
    let diff = d
        .curves
        .iter()
        .zip(&other.curves)
        .map(|(a, b)| (a.samples() - b.samples()).amax())
        .fold(0.0, f64::max);
    assert!(diff > 0.0);
}

#[test]
fn generated_csv_is_byte_identical() {
    let cfg = WarpConfig::template();
    let templates = builtin_templates(100).unwrap();
    let bytes = |seed| {
        let mut out = Vec::new();
        gen_template_clusters(&templates, 20, &cfg, seed).unwrap().write_csv(&mut out).unwrap();
        out
    };
    assert_eq!(bytes(3), bytes(3));
    assert_ne!(bytes(3), bytes(4));
    let d = gen_template_clusters(&templates, 20, &cfg, 3).unwrap();
    assert_eq!(d.len(), 60);
    assert!(d.curves.iter().all(|c| c.samples().iter().all(|v| v.is_finite()) && c.len() >= 3));
}

#[test]
fn unperturbed_templates_are_copies() {
    let templates = builtin_templates(80).unwrap();
    let d = gen_template_clusters(&templates, 20, &WarpConfig::none(), 0).unwrap();
    for (c, l) in d.curves.iter().zip(&d.labels) {
        assert!((c.samples() - templates[l.unwrap()].samples()).amax() <= 1e-12);
    }
}

fn mean_within_class_distance(d: &Dataset) -> f64 {
    let (mut total, mut count) = (0.0, 0);
    for i in 0..d.len() {
        for j in i + 1..d.len() {
            if d.labels[i] == d.labels[j] {
                total += (d.curves[i].samples() - d.curves[j].samples()).norm();
                count += 1;
            }
        }
    }
    total / count as f64
}

#[test]
fn trajectory_perturbation() {
    let d = gen_letter_trajectories(10, 100, 2).unwrap();
    let same = perturb_trajectories(&d, &WarpConfig::none(), 9).unwrap();
    assert_eq!(same.curves, d.curves);
    assert_eq!(same.labels, d.labels);
    let p = perturb_trajectories(&d, &WarpConfig::trajectory(), 9).unwrap();
    assert_eq!(p.len(), d.len());
    assert_eq!(p.labels, d.labels);
    assert!(mean_within_class_distance(&p) > mean_within_class_distance(&d));
}

// Inverse of the column layout used for the Euclidean baseline.
fn unflatten(x: &DMatrix<f64>, n: usize) -> Vec<Curve> {
    let t = x.nrows() / n;
    x.column_iter()
        .map(|col| Curve::new(DMatrix::from_fn(t, n, |s, d| col[d * t + s])).unwrap())
        .collect()
}

#[test]
fn flatten_roundtrip() {
    let d = gen_letter_trajectories(3, 100, 0).unwrap();
    let x = flatten_for_lrr(&d).unwrap();
    assert_eq!(x.shape(), (200, 9));
    assert_eq!(unflatten(&x, 2), d.curves);
    let s = gen_sine_clusters(2, 3, 50, &WarpConfig::none(), 0).unwrap();
    let x = flatten_for_lrr(&s).unwrap();
    for (j, c) in s.curves.iter().enumerate() {
        assert_eq!(x.column(j).as_slice(), c.samples().as_slice());
    }
    let mixed = Dataset::labelled(vec![d.curves[0].clone(), s.curves[0].clone()], vec![0, 1]);
    assert!(mixed.and_then(|m| flatten_for_lrr(&m)).is_err());
}
