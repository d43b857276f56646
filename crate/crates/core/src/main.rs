use std::collections::HashMap;
use std::fs::{self, File};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;

use curveclust::bench::{run_benchmark, BenchmarkConfig, Experiment, GeneratorConfig};
use curveclust::cluster::{affinity, sca, spectral_cluster, ClusterLabels};
use curveclust::dataset::{flatten_for_lrr, read_labels_csv, write_labels_csv, Dataset};
use curveclust::elastic::AlignConfig;
use curveclust::gram::build_gram_with;
use curveclust::pipeline::{common_samples, prepare_srvfs};
use curveclust::plot::{curves_svg, heatmap_svg, label_order};
use curveclust::solver::{solve_clrr, solve_lrr_with, LrrConfig, SolverConfig};
use curveclust::Error;

#[derive(Parser)]
#[command(name = "curveclust", version, about = "Low-rank representation clustering of open curves")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Clrr,
    Lrr,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a dataset from a JSON generator config.
    Generate {
        #[arg(long)]
        config: PathBuf,
        /// Output dataset (.csv or .json); a .meta.json sidecar is written next to it.
        #[arg(long)]
        out: PathBuf,
        /// Overrides the seed in the config.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Cluster a dataset and write labels, affinity and solver trace.
    Cluster {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long, value_enum, default_value = "clrr")]
        method: Method,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Solver config JSON (SolverConfig for clrr, LrrConfig for lrr).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        /// Trace path; defaults to trace.jsonl in the output directory.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Repeated-trial comparison of cLRR and LRR.
    Benchmark {
        #[arg(value_parser = parse_experiment)]
        experiment: Experiment,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        k: usize,
        /// cLRR nuclear-norm weight.
        #[arg(long)]
        lambda: Option<f64>,
        /// Trajectory source data for the trajectory experiment.
        #[arg(long)]
        dataset: Option<PathBuf>,
        /// Full BenchmarkConfig JSON; command-line flags take precedence.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score predicted labels against ground truth.
    Eval {
        labels: PathBuf,
        /// Truth labels CSV or a labelled dataset file.
        truth: PathBuf,
        /// JSON output path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_experiment(s: &str) -> Result<Experiment, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

enum Failure {
    Usage(String),
    Run(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_) | Error::MissingData(_) => Failure::Usage(e.to_string()),
            other => Failure::Run(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Run(e.to_string())
    }
}

type CliResult<T> = Result<T, Failure>;

fn stage<T>(name: &str, r: curveclust::Result<T>) -> CliResult<T> {
    r.map_err(|e| match Failure::from(e) {
        Failure::Usage(m) => Failure::Usage(format!("{name}: {m}")),
        Failure::Run(m) => Failure::Run(format!("{name}: {m}")),
    })
}

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

/// Writes a whole file at once so a failed command leaves no partial artifact.
fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, bytes).map_err(|e| Failure::Run(format!("cannot write {}: {e}", path.display())))
}

fn matrix_csv(m: &DMatrix<f64>) -> String {
    let mut out = String::new();
    for row in m.row_iter() {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn sidecar_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}.meta.json"))
}

fn cmd_generate(config: &Path, out: &Path, seed: Option<u64>) -> CliResult<()> {
    let mut cfg = GeneratorConfig::from_json(&read_text(config)?).map_err(|e| Failure::Usage(e.to_string()))?;
    if let Some(s) = seed {
        match &mut cfg {
            GeneratorConfig::Sine { seed, .. }
            | GeneratorConfig::Template { seed, .. }
            | GeneratorConfig::Letters { seed, .. }
            | GeneratorConfig::Trajectory { seed, .. } => *seed = s,
        }
    }
    let dataset = stage("datagen", cfg.generate())?;
    let mut bytes = Vec::new();
    match out.extension().and_then(|e| e.to_str()) {
        Some("json") => stage("dataset", dataset.write_json(&mut bytes))?,
        Some("csv") => stage("dataset", dataset.write_csv(&mut bytes))?,
        _ => return Err(Failure::Usage("--out must end in .csv or .json".into())),
    }
    let meta = serde_json::to_vec_pretty(&dataset.meta).map_err(|e| Failure::Run(e.to_string()))?;
    write_file(out, &bytes)?;
    write_file(&sidecar_path(out), &meta)?;
    println!("wrote {} curves to {}", dataset.len(), out.display());
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_cluster(
    dataset: &Path,
    method: Method,
    k: usize,
    lambda: Option<f64>,
    seed: u64,
    config: Option<&Path>,
    out: &Path,
    trace: Option<&Path>,
) -> CliResult<()> {
    let d = stage("dataset", Dataset::load(dataset))?;
    if k < 2 || k > d.len() {
        return Err(Failure::Usage(format!("--k must be between 2 and the number of curves ({})", d.len())));
    }
    let config_text = config.map(read_text).transpose()?;
    let parse_err = |e: serde_json::Error| Failure::Usage(format!("solver config: {e}"));

    let (coefficients, diagnostics) = match method {
        Method::Clrr => {
            let mut cfg: SolverConfig = match &config_text {
                Some(t) => serde_json::from_str(t).map_err(parse_err)?,
                None => SolverConfig::default(),
            };
            if let Some(l) = lambda {
                cfg.lambda = l;
            }
            let srvfs = stage("srvf", prepare_srvfs(&d, common_samples(&d)))?;
            let g = stage("gram", build_gram_with(&srvfs, &AlignConfig::default()))?;
            stage("solver", solve_clrr(&g, &cfg))?
        }
        Method::Lrr => {
            let mut cfg: LrrConfig = match &config_text {
                Some(t) => serde_json::from_str(t).map_err(parse_err)?,
                None => LrrConfig::default(),
            };
            if let Some(l) = lambda {
                cfg.lambda = l;
            }
            let resampled = stage("curve", d.resampled(common_samples(&d)))?;
            let x = stage("dataset", flatten_for_lrr(&resampled))?;
            stage("solver", solve_lrr_with(&x, &cfg))?
        }
    };
    if !diagnostics.converged {
        log::warn!("solver stopped after {} iterations without converging", diagnostics.iterations);
    }
    let a = affinity(&coefficients);
    let labels = stage("clusterer", spectral_cluster(&a, k, seed))?;

    let mut labels_csv = Vec::new();
    stage("clusterer", write_labels_csv(&d.ids, &labels, &mut labels_csv))?;
    let mut trace_bytes = Vec::new();
    stage("solver", diagnostics.write_trace(&mut trace_bytes))?;
    write_file(&out.join("labels.csv"), &labels_csv)?;
    write_file(&out.join("affinity.csv"), matrix_csv(&a).as_bytes())?;
    let trace_path = trace.map(Path::to_path_buf).unwrap_or_else(|| out.join("trace.jsonl"));
    write_file(&trace_path, &trace_bytes)?;
    if d.labels.iter().all(Option::is_some) {
        let truth = stage("dataset", d.truth())?;
        println!("SCA {:.2}", stage("clusterer", sca(&labels, &truth))?);
    }
    println!(
        "{} iterations, converged {}, rank {}",
        diagnostics.iterations, diagnostics.converged, diagnostics.final_rank
    );
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_benchmark(
    experiment: Experiment,
    trials: usize,
    seed: u64,
    k: usize,
    lambda: Option<f64>,
    dataset: Option<PathBuf>,
    config: Option<&Path>,
    out: &Path,
) -> CliResult<()> {
    let mut cfg = match config {
        Some(p) => serde_json::from_str(&read_text(p)?)
            .map_err(|e| Failure::Usage(format!("benchmark config: {e}")))?,
        None => BenchmarkConfig::new(experiment),
    };
    cfg.experiment = experiment;
    cfg.trials = trials;
    cfg.seed = seed;
    cfg.k = k;
    if let Some(l) = lambda {
        cfg.clrr.lambda = l;
    }
    if dataset.is_some() {
        cfg.data = dataset;
    }
    let (report, first) = stage("benchmark", run_benchmark(&cfg))?;
    let json = stage("benchmark", report.to_json())?;
    let timing = serde_json::to_string_pretty(&report.timing).map_err(|e| Failure::Run(e.to_string()))?;
    let order = label_order(&first.dataset.labels);

    write_file(&out.join("report.json"), json.as_bytes())?;
    write_file(&out.join("timing.json"), timing.as_bytes())?;
    write_file(&out.join("table.md"), report.markdown_table().as_bytes())?;
    write_file(&out.join("curves.svg"), curves_svg(&first.dataset).as_bytes())?;
    write_file(&out.join("affinity_clrr.svg"), heatmap_svg(&first.clrr.affinity, &order).as_bytes())?;
    write_file(&out.join("affinity_lrr.svg"), heatmap_svg(&first.lrr.affinity, &order).as_bytes())?;
    print!("{}", report.markdown_table());
    Ok(())
}

fn read_truth(path: &Path) -> CliResult<(Vec<String>, Vec<usize>)> {
    let is_labels_csv = path.extension().and_then(|e| e.to_str()) == Some("csv")
        && read_text(path)?.lines().next().map(str::trim) == Some("curve_id,label");
    if is_labels_csv {
        return stage("eval", File::open(path).map_err(Error::from).and_then(read_labels_csv));
    }
    let d = stage("dataset", Dataset::load(path))?;
    let truth = stage("dataset", d.truth())?;
    Ok((d.ids, truth.labels().to_vec()))
}

fn cmd_eval(labels: &Path, truth: &Path, out: Option<&Path>) -> CliResult<()> {
    let file = File::open(labels).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", labels.display())))?;
    let (ids, predicted) = stage("eval", read_labels_csv(file))?;
    let (truth_ids, truth_labels) = read_truth(truth)?;
    let lookup: HashMap<&str, usize> = truth_ids.iter().map(String::as_str).zip(truth_labels.iter().copied()).collect();
    let mut matched = Vec::with_capacity(ids.len());
    for id in &ids {
        match lookup.get(id.as_str()) {
            Some(&l) => matched.push(l),
            None => return Err(Failure::Usage(format!("id mismatch: '{id}' is not in the truth file"))),
        }
    }
    if ids.len() != truth_ids.len() {
        let known: std::collections::HashSet<&str> = ids.iter().map(String::as_str).collect();
        let missing = truth_ids.iter().find(|t| !known.contains(t.as_str())).map_or("?", String::as_str);
        return Err(Failure::Usage(format!("id mismatch: '{missing}' has no predicted label")));
    }
    let p = stage("eval", ClusterLabels::from_labels(predicted))?;
    let t = stage("eval", ClusterLabels::from_labels(matched))?;
    let score = stage("eval", sca(&p, &t))?;
    println!("{score:.2}");
    if let Some(path) = out {
        let json = serde_json::json!({ "sca": score }).to_string();
        write_file(path, json.as_bytes())?;
    }
    Ok(())
}

fn configure_threads() {
    if let Some(n) = std::env::var("CURVECLUST_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global() {
            log::warn!("could not size the worker pool: {e}");
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    configure_threads();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate { config, out, seed } => cmd_generate(&config, &out, seed),
        Command::Cluster {
            dataset,
            method,
            k,
            lambda,
            seed,
            config,
            out,
            trace,
        } => cmd_cluster(&dataset, method, k, lambda, seed, config.as_deref(), &out, trace.as_deref()),
        Command::Benchmark {
            experiment,
            trials,
            seed,
            k,
            lambda,
            dataset,
            config,
            out,
        } => cmd_benchmark(experiment, trials, seed, k, lambda, dataset, config.as_deref(), &out),
        Command::Eval { labels, truth, out } => cmd_eval(&labels, &truth, out.as_deref()),
    };
    let _ = std::io::stdout().flush();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Run(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
