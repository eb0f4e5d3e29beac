//! geocurve: fit per-class geodesic curves in pre-shape space and sample
//! augmented features along them.

mod io;

use clap::{Args, Parser, Subcommand};
use geocurve_core::preshape::geodesic_distance;
use geocurve_core::{
    augment_dataset, evaluate, fit_all_classes, selfcheck, synth, ClassifierKind, EvalConfig,
    FitConfig, Method, SynthKind,
};
use io::CurvesFile;
use serde::Serialize;
use std::fmt;
use std::process::ExitCode;
use std::time::Instant;

const SCHEMAS: &str = "\
File schemas:
  feature CSV    header `label,f0,...,f{d-1}`, one sample per row; label is a
                 token without commas, features are decimal reals (d >= 2)
  augmented CSV  header `label,f0,...,f{2d-1},augmented`; rows are pre-shape
                 coordinates plus a 0/1 augmented flag
  curves JSON    {\"curves\": [{label, d, tau_start, tau_end, theta,
                 final_loss, loss_trace, degenerate_recoveries}, ...]}
  eval JSON      {method, classifier, k, n, project, seeds, accuracies,
                 mean, std}; eval CSV has columns seed,method,classifier,accuracy
  bench JSON     {m, d, epochs, repeats, seconds, min_seconds, mean_seconds,
                 std_seconds, hardware}

Exit codes: 0 ok, 1 check failure, 2 input error, 3 runtime failure, 64 usage.

Synthetic data with the same --seed shares class structure (blob means,
latent arcs) across different --per-class counts without sharing samples,
so one seed yields a train/test pair.";

#[derive(Parser)]
#[command(
    name = "geocurve",
    version,
    about = "Geodesic-curve feature augmentation in pre-shape space",
    after_help = SCHEMAS
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Input(String),
    Runtime(String),
    CheckFailed,
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "usage: {msg}"),
            CliError::Input(msg) => write!(f, "input: {msg}"),
            CliError::Runtime(msg) => write!(f, "runtime: {msg}"),
            CliError::CheckFailed => write!(f, "self-check failed"),
        }
    }
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::CheckFailed => 1,
            CliError::Input(_) => 2,
            CliError::Runtime(_) => 3,
            CliError::Usage(_) => 64,
        }
    }
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Deterministic seed for all randomness of this command.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads for per-class fits and per-seed evaluations.
    #[arg(long, env = "GEOCURVE_THREADS", default_value_t = 1)]
    threads: usize,
    /// Output path for the primary artifact; `-` writes to stdout.
    #[arg(long, default_value = "-")]
    out: String,
}

#[derive(Subcommand)]
enum Command {
    /// Generate synthetic labeled features (gaussian blobs or latent arcs).
    Synth {
        #[command(flatten)]
        common: CommonArgs,
        /// gaussian | geodesic
        #[arg(long)]
        kind: String,
        /// Number of classes (>= 2).
        #[arg(long, default_value_t = 10)]
        classes: usize,
        /// Samples per class (>= 1).
        #[arg(long = "per-class", default_value_t = 5)]
        per_class: usize,
        /// Feature dimension (>= 4).
        #[arg(long, default_value_t = 32)]
        dim: usize,
        /// Noise scale; 0 puts geodesic classes exactly on their arcs.
        #[arg(long, default_value_t = 0.05)]
        noise: f64,
    },
    /// Fit one geodesic curve per class of a feature CSV.
    Fit {
        #[command(flatten)]
        common: CommonArgs,
        /// Input feature CSV.
        #[arg(long)]
        input: String,
        /// Divergence-loss weight.
        #[arg(long, default_value_t = 0.3)]
        beta: f64,
        /// Endpoint learning rate (eta_p).
        #[arg(long = "lr-p", default_value_t = 3e-4)]
        lr_p: f64,
        /// Sampling-parameter learning rate (eta_t).
        #[arg(long = "lr-t", default_value_t = 3e-3)]
        lr_t: f64,
        /// Training epochs per class (>= 1).
        #[arg(long, default_value_t = 2000)]
        epochs: usize,
        /// Stop early when the 100-epoch moving loss average stalls.
        #[arg(long, default_value_t = false)]
        early_stop: bool,
    },
    /// Sample augmented pre-shape features along fitted curves.
    Augment {
        #[command(flatten)]
        common: CommonArgs,
        /// Curves JSON produced by `fit`.
        #[arg(long)]
        curves: String,
        /// Augmented samples per class.
        #[arg(long)]
        n: usize,
    },
    /// Train and score a classifier with and without augmentation.
    Eval {
        #[command(flatten)]
        common: CommonArgs,
        /// Training feature CSV.
        #[arg(long)]
        train: String,
        /// Test feature CSV.
        #[arg(long)]
        test: String,
        /// none | faagc | mixup
        #[arg(long, default_value = "none")]
        method: String,
        /// knn | linear
        #[arg(long, default_value = "knn")]
        classifier: String,
        /// Neighbors for the k-NN classifier.
        #[arg(long, default_value_t = 5)]
        k: usize,
        /// Augmented samples per class; omit to match each class's count.
        #[arg(long)]
        n: Option<usize>,
        /// Number of evaluation seeds (seed, seed+1, ...).
        #[arg(long, default_value_t = 6)]
        seeds: usize,
        /// Classify raw features (Euclidean k-NN) instead of pre-shapes.
        /// Only valid with --method none --classifier knn.
        #[arg(long, default_value_t = false)]
        raw: bool,
        /// Per-seed CSV output path (defaults to the JSON path with a .csv
        /// extension when --out is a file).
        #[arg(long)]
        csv: Option<String>,
        /// Fit epochs for --method faagc.
        #[arg(long, default_value_t = 2000)]
        epochs: usize,
    },
    /// Run the randomized diagnostic suites; optionally verify an augmented
    /// CSV against its curves file.
    Check {
        /// Curves JSON to verify augmented rows against.
        #[arg(long, requires = "augmented")]
        curves: Option<String>,
        /// Augmented CSV whose rows must lie on their class curves.
        #[arg(long, requires = "curves")]
        augmented: Option<String>,
    },
    /// Time a single-class fit at the given sizes, single-threaded.
    Bench {
        #[command(flatten)]
        common: CommonArgs,
        /// Samples in the class.
        #[arg(long, default_value_t = 10)]
        m: usize,
        /// Feature dimension.
        #[arg(long, default_value_t = 192)]
        d: usize,
        /// Training epochs.
        #[arg(long, default_value_t = 2000)]
        epochs: usize,
        /// Timed repetitions.
        #[arg(long, default_value_t = 3)]
        repeats: usize,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    ExitCode::SUCCESS
                }
                _ => {
                    eprint!("{e}");
                    ExitCode::from(64)
                }
            };
        }
    };

    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("geocurve: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Synth {
            common,
            kind,
            classes,
            per_class,
            dim,
            noise,
        } => cmd_synth(common, &kind, classes, per_class, dim, noise),
        Command::Fit {
            common,
            input,
            beta,
            lr_p,
            lr_t,
            epochs,
            early_stop,
        } => cmd_fit(common, &input, beta, lr_p, lr_t, epochs, early_stop),
        Command::Augment { common, curves, n } => cmd_augment(common, &curves, n),
        Command::Eval {
            common,
            train,
            test,
            method,
            classifier,
            k,
            n,
            seeds,
            raw,
            csv,
            epochs,
        } => cmd_eval(
            common,
            &train,
            &test,
            &method,
            &classifier,
            k,
            n,
            seeds,
            raw,
            csv,
            epochs,
        ),
        Command::Check { curves, augmented } => cmd_check(curves, augmented),
        Command::Bench {
            common,
            m,
            d,
            epochs,
            repeats,
        } => cmd_bench(common, m, d, epochs, repeats),
    }
}

fn read_file(path: &str) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {path}: {e}")))
}

fn write_output(path: &str, content: &str) -> Result<(), CliError> {
    if path == "-" {
        print!("{content}");
        Ok(())
    } else {
        std::fs::write(path, content)
            .map_err(|e| CliError::Runtime(format!("cannot write {path}: {e}")))
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut out = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Runtime(format!("serialization: {e}")))?;
    out.push('\n');
    Ok(out)
}

fn cmd_synth(
    common: CommonArgs,
    kind: &str,
    classes: usize,
    per_class: usize,
    dim: usize,
    noise: f64,
) -> Result<(), CliError> {
    let kind: SynthKind = kind.parse().map_err(CliError::Usage)?;
    let set = synth(kind, classes, per_class, dim, noise, common.seed)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    write_output(&common.out, &io::raw_set_to_csv(&set)?)
}

fn cmd_fit(
    common: CommonArgs,
    input: &str,
    beta: f64,
    lr_p: f64,
    lr_t: f64,
    epochs: usize,
    early_stop: bool,
) -> Result<(), CliError> {
    let config = FitConfig {
        beta,
        lr_endpoints: lr_p,
        lr_t,
        epochs,
        seed: common.seed,
        early_stop,
        ..FitConfig::default()
    };
    config
        .validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;

    let set = io::raw_set_from_csv(&read_file(input)?)?;
    let curves = fit_all_classes(&set, &config, common.threads.max(1))
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    write_output(&common.out, &to_json(&CurvesFile::from_fits(&curves))?)
}

fn cmd_augment(common: CommonArgs, curves_path: &str, n: usize) -> Result<(), CliError> {
    let file: CurvesFile = serde_json::from_str(&read_file(curves_path)?)
        .map_err(|e| CliError::Input(format!("{curves_path}: {e}")))?;
    let curves = file.to_fits()?;
    let labels: Vec<String> = curves.keys().cloned().collect();
    let augmented = augment_dataset(&curves, &labels, n, common.seed)
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    write_output(&common.out, &io::preshape_set_to_csv(&augmented)?)
}

#[allow(clippy::too_many_arguments)]
fn cmd_eval(
    common: CommonArgs,
    train: &str,
    test: &str,
    method: &str,
    classifier: &str,
    k: usize,
    n: Option<usize>,
    seeds: usize,
    raw: bool,
    csv: Option<String>,
    epochs: usize,
) -> Result<(), CliError> {
    let method: Method = method.parse().map_err(CliError::Usage)?;
    let classifier: ClassifierKind = classifier.parse().map_err(CliError::Usage)?;
    if seeds == 0 {
        return Err(CliError::Usage("--seeds must be >= 1".into()));
    }
    if k == 0 {
        return Err(CliError::Usage("--k must be >= 1".into()));
    }
    let fit = FitConfig {
        epochs,
        ..FitConfig::default()
    };
    fit.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    if raw && !(method == Method::None && classifier == ClassifierKind::Knn) {
        return Err(CliError::Usage(
            "--raw is only valid with --method none --classifier knn".into(),
        ));
    }

    let train_set = io::raw_set_from_csv(&read_file(train)?)?;
    let test_set = io::raw_set_from_csv(&read_file(test)?)?;

    let config = EvalConfig {
        method,
        classifier,
        k,
        n,
        seeds: (common.seed..common.seed + seeds as u64).collect(),
        fit,
        project: !raw,
        threads: common.threads.max(1),
        ..EvalConfig::default()
    };
    let report =
        evaluate(&train_set, &test_set, &config).map_err(|e| CliError::Runtime(e.to_string()))?;

    write_output(&common.out, &to_json(&report)?)?;

    let csv_path = csv.or_else(|| {
        (common.out != "-").then(|| {
            let mut path = std::path::PathBuf::from(&common.out);
            path.set_extension("csv");
            path.to_string_lossy().into_owned()
        })
    });
    if let Some(path) = csv_path {
        write_output(&path, &report.to_csv())?;
    } else {
        eprintln!("note: no --csv path and JSON went to stdout; per-seed CSV skipped");
    }
    Ok(())
}

fn cmd_check(curves: Option<String>, augmented: Option<String>) -> Result<(), CliError> {
    let report = selfcheck::run_default().map_err(|e| CliError::Runtime(e.to_string()))?;
    let mut all_pass = true;
    for suite in &report.suites {
        let status = if suite.pass { "PASS" } else { "FAIL" };
        println!("{status} {}: {}", suite.name, suite.detail);
        all_pass &= suite.pass;
    }

    if let (Some(curves_path), Some(aug_path)) = (curves, augmented) {
        let file: CurvesFile = serde_json::from_str(&read_file(&curves_path)?)
            .map_err(|e| CliError::Input(format!("{curves_path}: {e}")))?;
        let curves = file.to_fits()?;
        let set = io::preshape_set_from_csv(&read_file(&aug_path)?)?;
        let mut max_err = 0.0f64;
        let mut rows = 0usize;
        for (label, members) in &set.classes {
            let fitted = curves.get(label).ok_or_else(|| {
                CliError::Input(format!("no curve for label {label:?} in {curves_path}"))
            })?;
            for m in members {
                let a = geodesic_distance(fitted.curve.tau_start(), &m.vector)
                    .map_err(|e| CliError::Input(e.to_string()))?;
                let b = geodesic_distance(&m.vector, fitted.curve.tau_end())
                    .map_err(|e| CliError::Input(e.to_string()))?;
                max_err = max_err.max((a + b - fitted.curve.theta()).abs());
                rows += 1;
            }
        }
        let on_curve_ok = max_err <= 1e-9;
        let status = if on_curve_ok { "PASS" } else { "FAIL" };
        println!(
            "{status} augmented-on-curve: {rows} rows, max additivity err {max_err:.3e} (<= 1e-9)"
        );
        all_pass &= on_curve_ok;
    }

    if all_pass {
        Ok(())
    } else {
        Err(CliError::CheckFailed)
    }
}

#[derive(Serialize)]
struct BenchReport {
    m: usize,
    d: usize,
    epochs: usize,
    repeats: usize,
    seconds: Vec<f64>,
    min_seconds: f64,
    mean_seconds: f64,
    std_seconds: f64,
    hardware: String,
}

fn cmd_bench(
    common: CommonArgs,
    m: usize,
    d: usize,
    epochs: usize,
    repeats: usize,
) -> Result<(), CliError> {
    if m < 1 || d < 4 || epochs < 1 || repeats < 1 {
        return Err(CliError::Usage(
            "need --m >= 1, --d >= 4, --epochs >= 1, --repeats >= 1".into(),
        ));
    }
    let set = synth(SynthKind::Geodesic, 2, m, d, 0.05, common.seed)
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    let (label, members) = set.classes.iter().next().expect("two classes generated");
    let config = FitConfig {
        epochs,
        seed: common.seed,
        ..FitConfig::default()
    };

    let mut seconds = Vec::with_capacity(repeats);
    for _ in 0..repeats {
        let mut rng = geocurve_core::rng::class_stream(
            common.seed,
            label,
            geocurve_core::rng::StreamKind::Fit,
        );
        let start = Instant::now();
        geocurve_core::fit(label, members, &config, &mut rng)
            .map_err(|e| CliError::Runtime(e.to_string()))?;
        seconds.push(start.elapsed().as_secs_f64());
    }
    let min = seconds.iter().cloned().fold(f64::INFINITY, f64::min);
    let mean = seconds.iter().sum::<f64>() / seconds.len() as f64;
    let var = seconds.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / seconds.len() as f64;

    let report = BenchReport {
        m,
        d,
        epochs,
        repeats,
        seconds,
        min_seconds: min,
        mean_seconds: mean,
        std_seconds: var.sqrt(),
        hardware: hardware_string(),
    };
    write_output(&common.out, &to_json(&report)?)
}

fn hardware_string() -> String {
    let cpu = std::fs::read_to_string("/proc/cpuinfo")
        .ok()
        .and_then(|text| {
            text.lines()
                .find(|l| l.starts_with("model name"))
                .and_then(|l| l.split(':').nth(1))
                .map(|s| s.trim().to_string())
        })
        .unwrap_or_else(|| "unknown cpu".to_string());
    format!(
        "{cpu} ({}/{})",
        std::env::consts::ARCH,
        std::env::consts::OS
    )
}
