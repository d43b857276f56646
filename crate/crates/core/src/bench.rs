//! Experiment configuration, repeated-trial benchmarks and report output.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cluster::sca;
use crate::datagen::{self, WarpConfig};
use crate::dataset::Dataset;
use crate::elastic::AlignConfig;
use crate::error::{Error, Result};
use crate::pipeline::{run_clrr, run_lrr, ClusterOutput};
use crate::solver::{LrrConfig, SolverConfig};

/// Schema of the trajectory ingestion CSV, quoted in missing-data errors.
pub const TRAJECTORY_SCHEMA: &str =
    "curve_id,label,t_index,dim_0,dim_1 (one row per sample of a 2-D pen-velocity trajectory)";

fn default_clusters() -> usize {
    3
}
fn default_per_cluster() -> usize {
    20
}
fn default_samples() -> usize {
    100
}
fn default_sine_warp() -> WarpConfig {
    WarpConfig::sine()
}
fn default_template_warp() -> WarpConfig {
    WarpConfig::template()
}
fn default_trajectory_warp() -> WarpConfig {
    WarpConfig::trajectory()
}

/// Dataset generator selection, as read from a JSON config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "lowercase")]
pub enum GeneratorConfig {
    Sine {
        #[serde(default = "default_clusters")]
        clusters: usize,
        #[serde(default = "default_per_cluster")]
        per_cluster: usize,
        #[serde(default = "default_samples")]
        samples: usize,
        #[serde(default = "default_sine_warp")]
        warp: WarpConfig,
        #[serde(default)]
        seed: u64,
    },
    Template {
        #[serde(default = "default_per_cluster")]
        per_cluster: usize,
        #[serde(default = "default_samples")]
        samples: usize,
        #[serde(default = "default_template_warp")]
        warp: WarpConfig,
        #[serde(default)]
        seed: u64,
    },
    /// Synthetic stand-in for recorded pen trajectories.
    Letters {
        #[serde(default = "default_per_cluster")]
        per_class: usize,
        #[serde(default = "default_samples")]
        samples: usize,
        #[serde(default)]
        seed: u64,
    },
    /// Perturbs an ingested trajectory dataset.
    Trajectory {
        input: PathBuf,
        #[serde(default)]
        per_class: Option<usize>,
        #[serde(default = "default_trajectory_warp")]
        warp: WarpConfig,
        #[serde(default)]
        seed: u64,
    },
}

impl GeneratorConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format(format!("generator config: {e}")))
    }

    pub fn seed(&self) -> u64 {
        match self {
            Self::Sine { seed, .. }
            | Self::Template { seed, .. }
            | Self::Letters { seed, .. }
            | Self::Trajectory { seed, .. } => *seed,
        }
    }

    pub fn generate(&self) -> Result<Dataset> {
        match self {
            Self::Sine {
                clusters,
                per_cluster,
                samples,
                warp,
                seed,
            } => datagen::gen_sine_clusters(*clusters, *per_cluster, *samples, warp, *seed),
            Self::Template {
                per_cluster,
                samples,
                warp,
                seed,
            } => datagen::gen_template_clusters(&datagen::builtin_templates(*samples)?, *per_cluster, warp, *seed),
            Self::Letters {
                per_class,
                samples,
                seed,
            } => datagen::gen_letter_trajectories(*per_class, *samples, *seed),
            Self::Trajectory {
                input,
                per_class,
                warp,
                seed,
            } => {
                let source = load_trajectories(input)?;
                let picked = match per_class {
                    Some(p) => datagen::sample_per_class(&source, *p, *seed)?,
                    None => source,
                };
                datagen::perturb_trajectories(&picked, warp, *seed)
            }
        }
    }
}

/// Loads an ingested trajectory dataset, reporting the expected schema when
/// the file is absent.
pub fn load_trajectories(path: &Path) -> Result<Dataset> {
    if !path.exists() {
        return Err(Error::MissingData(format!(
            "trajectory data file {} not found; expected CSV with header {TRAJECTORY_SCHEMA}",
            path.display()
        )));
    }
    Dataset::load(path)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Sine,
    Template,
    Trajectory,
}

impl std::str::FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sine" => Ok(Self::Sine),
            "template" => Ok(Self::Template),
            "trajectory" => Ok(Self::Trajectory),
            other => Err(Error::InvalidArgument(format!(
                "unknown experiment '{other}' (expected sine, template or trajectory)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BenchmarkConfig {
    pub experiment: Experiment,
    pub trials: usize,
    pub seed: u64,
    pub k: usize,
    pub per_cluster: usize,
    pub samples: usize,
    pub warp: WarpConfig,
    /// Source dataset for the trajectory experiment.
    pub data: Option<PathBuf>,
    pub clrr: SolverConfig,
    pub lrr: LrrConfig,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        Self::new(Experiment::Sine)
    }
}

impl BenchmarkConfig {
    pub fn new(experiment: Experiment) -> Self {
        let warp = match experiment {
            Experiment::Sine => WarpConfig::sine(),
            Experiment::Template => WarpConfig::template(),
            Experiment::Trajectory => WarpConfig::trajectory(),
        };
        Self {
            experiment,
            trials: 50,
            seed: 0,
            k: 3,
            per_cluster: 20,
            samples: 100,
            warp,
            data: None,
            clrr: SolverConfig::default(),
            lrr: LrrConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trials must be positive".into()));
        }
        if self.k < 2 {
            return Err(Error::InvalidArgument("benchmarks need k >= 2".into()));
        }
        self.clrr.validate()?;
        self.warp.validate()
    }

    pub fn trial_seed(&self, trial: usize) -> u64 {
        self.seed.wrapping_add(trial as u64)
    }

    /// Dataset of trial `trial`; `source` is the loaded trajectory data.
    pub fn trial_dataset(&self, trial: usize, source: Option<&Dataset>) -> Result<Dataset> {
        let seed = self.trial_seed(trial);
        match self.experiment {
            Experiment::Sine => datagen::gen_sine_clusters(self.k, self.per_cluster, self.samples, &self.warp, seed),
            Experiment::Template => {
                let templates = datagen::builtin_templates(self.samples)?;
                if templates.len() < self.k {
                    return Err(Error::InvalidArgument(format!(
                        "the template experiment has {} classes",
                        templates.len()
                    )));
                }
                datagen::gen_template_clusters(&templates[..self.k], self.per_cluster, &self.warp, seed)
            }
            Experiment::Trajectory => {
                let source = source.ok_or_else(|| {
                    Error::MissingData(format!(
                        "the trajectory experiment needs an ingested dataset (--dataset) in CSV with header {TRAJECTORY_SCHEMA}"
                    ))
                })?;
                let picked = datagen::sample_per_class(source, self.per_cluster, seed)?;
                datagen::perturb_trajectories(&picked, &self.warp, seed)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodTrial {
    pub sca: f64,
    pub iterations: usize,
    pub converged: bool,
    pub feasibility: f64,
    pub rank: usize,
}

impl MethodTrial {
    fn from_output(out: &ClusterOutput, truth: &crate::cluster::ClusterLabels) -> Result<Self> {
        let diag = &out.diagnostics;
        Ok(Self {
            sca: sca(&out.labels, truth)?,
            iterations: diag.iterations,
            converged: diag.converged,
            feasibility: diag.feasibility_trace.last().copied().unwrap_or(f64::NAN),
            rank: diag.final_rank,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub trial: usize,
    pub seed: u64,
    pub clrr: MethodTrial,
    pub lrr: MethodTrial,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub median: f64,
    pub min: f64,
    pub max: f64,
}

impl Summary {
    pub fn from_values(values: &[f64]) -> Self {
        if values.is_empty() {
            return Self {
                mean: f64::NAN,
                median: f64::NAN,
                min: f64::NAN,
                max: f64::NAN,
            };
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len();
        let median = if n % 2 == 1 {
            sorted[n / 2]
        } else {
            0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
        };
        Self {
            mean: values.iter().sum::<f64>() / n as f64,
            median,
            min: sorted[0],
            max: sorted[n - 1],
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub total_seconds: f64,
    pub trial_seconds: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub experiment: Experiment,
    pub seed: u64,
    pub config: BenchmarkConfig,
    pub trials: Vec<TrialResult>,
    pub clrr: Summary,
    pub lrr: Summary,
    /// Wall-clock timings; written to a separate file so the report itself
    /// is reproducible byte for byte.
    #[serde(skip)]
    pub timing: Timing,
}

/// Everything a trial produced, for plotting.
#[derive(Debug, Clone)]
pub struct TrialArtifacts {
    pub dataset: Dataset,
    pub clrr: ClusterOutput,
    pub lrr: ClusterOutput,
}

pub fn run_trial(cfg: &BenchmarkConfig, trial: usize, source: Option<&Dataset>) -> Result<(TrialResult, TrialArtifacts)> {
    let seed = cfg.trial_seed(trial);
    let dataset = cfg.trial_dataset(trial, source)?;
    let truth = dataset.truth()?;
    let clrr = run_clrr(&dataset, cfg.k, &cfg.clrr, &AlignConfig::default(), seed)?;
    let lrr = run_lrr(&dataset, cfg.k, &cfg.lrr, seed)?;
    let result = TrialResult {
        trial,
        seed,
        clrr: MethodTrial::from_output(&clrr, &truth)?,
        lrr: MethodTrial::from_output(&lrr, &truth)?,
    };
    Ok((result, TrialArtifacts { dataset, clrr, lrr }))
}

impl BenchmarkReport {
    pub fn from_trials(cfg: &BenchmarkConfig, trials: Vec<TrialResult>, timing: Timing) -> Self {
        let clrr: Vec<f64> = trials.iter().map(|t| t.clrr.sca).collect();
        let lrr: Vec<f64> = trials.iter().map(|t| t.lrr.sca).collect();
        Self {
            experiment: cfg.experiment,
            seed: cfg.seed,
            config: cfg.clone(),
            clrr: Summary::from_values(&clrr),
            lrr: Summary::from_values(&lrr),
            trials,
            timing,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// SCA summary table, one row per method.
    pub fn markdown_table(&self) -> String {
        let mut out = String::from("| Method | Mean | Median | Min | Max |\n|---|---|---|---|---|\n");
        for (name, s) in [("LRR", &self.lrr), ("cLRR", &self.clrr)] {
            out.push_str(&format!(
                "| {name} | {:.2} | {:.2} | {:.2} | {:.2} |\n",
                s.mean, s.median, s.min, s.max
            ));
        }
        out
    }
}

/// Runs every trial (in parallel, keyed by index) and aggregates the report.
/// The artifacts of trial 0 are returned for plotting.
pub fn run_benchmark(cfg: &BenchmarkConfig) -> Result<(BenchmarkReport, TrialArtifacts)> {
    cfg.validate()?;
    let source = match cfg.experiment {
        Experiment::Trajectory => {
            let path = cfg.data.as_ref().ok_or_else(|| {
                Error::MissingData(format!(
                    "the trajectory experiment needs an ingested dataset (--dataset) in CSV with header {TRAJECTORY_SCHEMA}"
                ))
            })?;
            Some(load_trajectories(path)?)
        }
        _ => None,
    };
    let start = Instant::now();
    let mut outcomes = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let begin = Instant::now();
            let (result, artifacts) = run_trial(cfg, t, source.as_ref())?;
            let elapsed = begin.elapsed().as_secs_f64();
            log::info!(
                "trial {t}: clrr {:.2} (K={}), lrr {:.2}",
                result.clrr.sca,
                result.clrr.iterations,
                result.lrr.sca
            );
            Ok((result, (t == 0).then_some(artifacts), elapsed))
        })
        .collect::<Result<Vec<_>>>()?;
    let first = outcomes[0].1.take().expect("trial 0 keeps its artifacts");
    let timing = Timing {
        total_seconds: start.elapsed().as_secs_f64(),
        trial_seconds: outcomes.iter().map(|o| o.2).collect(),
    };
    let trials = outcomes.into_iter().map(|o| o.0).collect();
    Ok((BenchmarkReport::from_trials(cfg, trials, timing), first))
}
