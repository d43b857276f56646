//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails.

mod common;

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rayon::prelude::*;

use curveclust::bench::{BenchmarkConfig, Experiment};
use curveclust::cluster::{sca, ClusterLabels};
use curveclust::datagen::{gen_letter_trajectories, random_warp};
use curveclust::dataset::Dataset;
use curveclust::elastic::{exp_sphere, geodesic_distance, log_sphere, AlignConfig, Lattice, STEP};
use curveclust::gram::GramTensor;
use curveclust::pipeline::{clrr_gram, cluster_from_gram, run_lrr};
use curveclust::solver::{gradient_f, smooth_objective, svt};

use common::*;

struct Trial {
    clrr: f64,
    lrr: f64,
    iterations: usize,
    converged: bool,
    feasibility: f64,
    gram_ok: bool,
}

fn gram_ok(g: &GramTensor) -> bool {
    (0..g.len()).all(|i| {
        let s = g.slice(i);
        (s - s.transpose()).amax() <= 1e-10
            && s.clone().symmetric_eigenvalues().min() >= -1e-8
            && s.row(i).iter().all(|v| *v == 0.0)
            && s.column(i).iter().all(|v| *v == 0.0)
    })
}

fn run_trials(cfg: &BenchmarkConfig, trials: usize, source: Option<&Dataset>) -> Vec<Trial> {
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let seed = cfg.trial_seed(t);
            let d = cfg.trial_dataset(t, source).unwrap();
            let truth = d.truth().unwrap();
            let g = clrr_gram(&d, &AlignConfig::default()).unwrap();
            let clrr = cluster_from_gram(&g, cfg.k, &cfg.clrr, seed).unwrap();
            let lrr = run_lrr(&d, cfg.k, &cfg.lrr, seed).unwrap();
            let diag = &clrr.diagnostics;
            Trial {
                clrr: sca(&clrr.labels, &truth).unwrap(),
                lrr: sca(&lrr.labels, &truth).unwrap(),
                iterations: diag.iterations,
                converged: diag.converged,
                feasibility: *diag.feasibility_trace.last().unwrap(),
                gram_ok: gram_ok(&g),
            }
        })
        .collect()
}

fn mean(v: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = v.collect();
    v.iter().sum::<f64>() / v.len() as f64
}

struct Report {
    failed: usize,
}

impl Report {
    fn line(&mut self, id: usize, name: &str, pass: bool, detail: String) {
        if !pass {
            self.failed += 1;
        }
        println!("[{}] criterion {id:>2} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    }
}

fn criterion_reparam() -> (bool, String) {
    let mut worst = 0.0f64;
    for k in 0..100u64 {
        let q1 = curve_srvf(500, 1 + (k as usize % 2), 2 * k);
        let q2 = curve_srvf(500, q1.dim(), 2 * k + 1);
        let gamma = random_warp(500, 0.5, 1000 + k).unwrap();
        let before = q1.distance(&q2).unwrap();
        let after = q1.warp(&gamma).unwrap().distance(&q2.warp(&gamma).unwrap()).unwrap();
        worst = worst.max((after - before).abs() / before);
    }
    (worst <= 1e-2, format!("max relative change {worst:.2e} (limit 1e-2)"))
}

fn criterion_roundtrip() -> (bool, String) {
    let mut worst = 0.0f64;
    let mut done = 0;
    let mut seed = 0u64;
    while done < 100 {
        let q0 = sphere_point(100, 2, seed);
        let q1 = sphere_point(100, 2, seed + 50_000);
        seed += 1;
        if geodesic_distance(&q0, &q1).unwrap() >= std::f64::consts::PI - 0.1 {
            continue;
        }
        let back = exp_sphere(&q0, &log_sphere(&q0, &q1).unwrap()).unwrap();
        worst = worst.max(back.distance(&q1).unwrap());
        done += 1;
    }
    (worst <= 1e-8, format!("max L2 error {worst:.2e} over 100 pairs (limit 1e-8)"))
}

fn criterion_svt() -> (bool, String) {
    let mut r = rng(77);
    let tau = 0.5;
    let objective = |x: &DMatrix<f64>, m: &DMatrix<f64>| tau * x.singular_values().sum() + 0.5 * (x - m).norm_squared();
    let mut beaten = 0;
    for inst in 0..20 {
        let m = random_matrix(10, 10, 9000 + inst);
        let x = svt(&m, tau);
        let best = objective(&x, &m);
        let all = (0..1000).all(|_| {
            let mut p = DMatrix::from_fn(10, 10, |_, _| r.random_range(-1.0..1.0));
            p *= r.random_range(0.0..0.1) / p.norm();
            best <= objective(&(&x + p), &m)
        });
        beaten += usize::from(all);
    }
    (beaten == 20, format!("{beaten}/20 instances optimal against 1000 perturbations"))
}

fn criterion_gradient() -> (bool, String) {
    let mut worst = 0.0f64;
    for inst in 0..20u64 {
        let n = 2 + (inst as usize % 7);
        let slices = (0..n)
            .map(|i| {
                let mut v = random_matrix(n, n, inst * 31 + i as u64);
                v.row_mut(i).fill(0.0);
                &v * v.transpose()
            })
            .collect();
        let g = GramTensor::from_slices(slices).unwrap();
        let w = random_matrix(n, n, 500 + inst);
        let y = DVector::from_iterator(n, random_matrix(n, 1, 700 + inst).iter().copied());
        let beta = 0.1 + inst as f64 * 0.5;
        let grad = gradient_f(&w, &y, beta, &g);
        let h = 1e-5;
        let fd = DMatrix::from_fn(n, n, |i, j| {
            let (mut p, mut m) = (w.clone(), w.clone());
            p[(i, j)] += h;
            m[(i, j)] -= h;
            (smooth_objective(&p, &y, beta, &g) - smooth_objective(&m, &y, beta, &g)) / (2.0 * h)
        });
        worst = worst.max((&grad - &fd).norm() / grad.norm());
    }
    (worst <= 1e-5, format!("max relative error {worst:.2e} over 20 instances (limit 1e-5)"))
}

fn brute_force(lattice: &Lattice, m: usize) -> f64 {
    fn go(l: &Lattice, m: usize, path: &mut Vec<(usize, usize)>, best: &mut f64) {
        let (i, j) = *path.last().unwrap();
        if (i, j) == (m - 1, m - 1) {
            *best = best.min(l.path_cost(path));
            return;
        }
        for a in 1..=STEP {
            for b in 1..=STEP {
                if i + a < m && j + b < m {
                    path.push((i + a, j + b));
                    go(l, m, path, best);
                    path.pop();
                }
            }
        }
    }
    let mut best = f64::INFINITY;
    go(lattice, m, &mut vec![(0, 0)], &mut best);
    best
}

fn criterion_dp() -> (bool, String) {
    let exact = (0..20u64)
        .filter(|&p| {
            let m = 12 - (p as usize % 4);
            let q0 = sphere_point(m, 1 + (p as usize % 2), 100 + p);
            let q1 = sphere_point(m, q0.dim(), 200 + p);
            let lattice = Lattice::new(&q0, &q1, m).unwrap();
            lattice.solve().1 == brute_force(&lattice, m)
        })
        .count();
    (exact == 20, format!("{exact}/20 pairs with DP cost equal to brute force"))
}

fn criterion_sca() -> (bool, String) {
    let truth: Vec<usize> = (0..60).map(|i| i / 20).collect();
    let t = ClusterLabels::from_labels(truth.clone()).unwrap();
    let renamed = ClusterLabels::from_labels(truth.iter().map(|l| [2, 0, 1][*l]).collect()).unwrap();
    let mut wrong = truth.clone();
    wrong[0] = 1;
    let wrong = ClusterLabels::from_labels(wrong).unwrap();
    let perm = sca(&renamed, &t).unwrap();
    let one = sca(&wrong, &t).unwrap();
    let pass = perm == 100.0 && one == 100.0 * 59.0 / 60.0 && format!("{one:.2}") == "98.33";
    (pass, format!("permuted labels {perm:.2}, one of 60 wrong {one:.2}"))
}

fn main() {
    let start = Instant::now();
    let mut report = Report { failed: 0 };

    let sine = BenchmarkConfig::new(Experiment::Sine);
    let sine_trials = run_trials(&sine, 50, None);
    eprintln!("sine trials done after {:.0}s", start.elapsed().as_secs_f64());
    let template = BenchmarkConfig::new(Experiment::Template);
    let template_trials = run_trials(&template, 50, None);
    eprintln!("template trials done after {:.0}s", start.elapsed().as_secs_f64());
    let source = gen_letter_trajectories(40, 100, 2024).unwrap();
    let trajectory = BenchmarkConfig::new(Experiment::Trajectory);
    let trajectory_trials = run_trials(&trajectory, 10, Some(&source));
    eprintln!("trajectory trials done after {:.0}s", start.elapsed().as_secs_f64());

    let (c, l) = (
        mean(sine_trials.iter().map(|t| t.clrr)),
        mean(sine_trials.iter().map(|t| t.lrr)),
    );
    report.line(
        1,
        "sine experiment",
        c >= 90.0 && c - l >= 10.0,
        format!("cLRR mean {c:.2}, LRR mean {l:.2}, gap {:.2} (need >= 90 and gap >= 10)", c - l),
    );

    let perfect = template_trials.iter().filter(|t| t.clrr == 100.0).count();
    let c = mean(template_trials.iter().map(|t| t.clrr));
    report.line(
        2,
        "template experiment",
        perfect >= 45 && c >= 99.0,
        format!("cLRR 100% in {perfect}/50 trials, mean {c:.2} (need >= 45 and mean >= 99)"),
    );

    let (c, l) = (
        mean(trajectory_trials.iter().map(|t| t.clrr)),
        mean(trajectory_trials.iter().map(|t| t.lrr)),
    );
    report.line(
        3,
        "trajectory experiment",
        c >= l,
        format!("cLRR mean {c:.2} vs LRR mean {l:.2} over 10 trials (need cLRR >= LRR)"),
    );

    let solver: Vec<&Trial> = sine_trials.iter().chain(&template_trials).collect();
    let good = solver
        .iter()
        .filter(|t| t.converged && t.iterations <= 100 && t.feasibility <= 1e-4)
        .count();
    let converged = solver.iter().filter(|t| t.converged).count();
    let max_k = solver.iter().map(|t| t.iterations).max().unwrap();
    let median_k = {
        let mut k: Vec<usize> = solver.iter().map(|t| t.iterations).collect();
        k.sort_unstable();
        k[k.len() / 2]
    };
    report.line(
        4,
        "solver convergence",
        good == solver.len(),
        format!(
            "{good}/{} trials converged with K <= 100 and feasibility <= 1e-4 ({converged} converged, median K {median_k}, max K {max_k})",
            solver.len()
        ),
    );

    let (pass, detail) = criterion_reparam();
    report.line(5, "reparameterization invariance", pass, detail);
    let (pass, detail) = criterion_roundtrip();
    report.line(6, "exp/log roundtrip", pass, detail);
    let (pass, detail) = criterion_svt();
    report.line(7, "svt proximal optimality", pass, detail);
    let (pass, detail) = criterion_gradient();
    report.line(8, "gradient oracle", pass, detail);

    let all: Vec<&Trial> = solver.iter().copied().chain(&trajectory_trials).collect();
    let ok = all.iter().filter(|t| t.gram_ok).count();
    report.line(
        9,
        "gram tensor properties",
        ok == all.len(),
        format!("{ok}/{} tensors with symmetric, PSD slices and zero base row/column", all.len()),
    );

    let (pass, detail) = criterion_dp();
    report.line(10, "dp warping exactness", pass, detail);
    let (pass, detail) = criterion_sca();
    report.line(11, "sca correctness", pass, detail);

    println!(
        "acceptance: {} passed, {} failed in {:.0}s",
        11 - report.failed,
        report.failed,
        start.elapsed().as_secs_f64()
    );
    if report.failed > 0 {
        std::process::exit(1);
    }
}
