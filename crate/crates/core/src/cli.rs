//! Command-line front end: `simulate`, `similarity`, `tune`, `forecast` and
//! `evaluate`.
//!
//! Exit codes are 0 on success, 1 on runtime errors and 2 on usage errors.
//! Diagnostics go to stderr; data only to files. Every run writes one JSON
//! manifest (`--manifest`, defaulting to `<out>.manifest.json`, or
//! `<out>/manifest.json` for `simulate`).

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::dataio::{self, DatasetSchema};
use crate::dataset::TimeSeriesDataset;
use crate::distance::Metric;
use crate::error::Error;
use crate::forecast::{knn_forecast, ols_baseline, seasonal_naive};
use crate::similarity::{self, SimilarityMatrix, WeightTriple};
use crate::simulation::{simulate_series, Family, SimulationConfig};
use crate::tuning::{mape, random_search_tune, TuningConfig};

/// Seed used when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 10;

#[derive(Debug, Parser)]
#[command(name = "knnwt", version, about = "Weighted-similarity KNN forecasting")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a synthetic benchmark series (CSV + component JSON).
    Simulate(SimulateArgs),
    /// Dump a similarity matrix as CSV.
    Similarity(SimilarityArgs),
    /// Random-search tuning of k and the similarity weights.
    Tune(TuneArgs),
    /// Forecast the trailing observations of a series.
    Forecast(ForecastArgs),
    /// MAPE table for one or more forecasts, optional ensemble and baselines.
    Evaluate(EvaluateArgs),
}

/// `--seed N` or `--seed random`.
#[derive(Debug, Clone, Copy, Serialize)]
#[serde(untagged)]
enum SeedArg {
    Fixed(u64),
    Random,
}

impl FromStr for SeedArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("random") {
            return Ok(SeedArg::Random);
        }
        s.parse()
            .map(SeedArg::Fixed)
            .map_err(|_| format!("expected an unsigned integer or `random`, got `{s}`"))
    }
}

impl SeedArg {
    fn resolve(self) -> u64 {
        match self {
            SeedArg::Fixed(seed) => seed,
            SeedArg::Random => rand::rng().random(),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
struct WeightsArg([f64; 3]);

impl FromStr for WeightsArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<f64> = s
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| format!("weights must be three numbers `alpha,beta,gamma`, got `{s}`"))?;
        match parts[..] {
            [a, b, g] => Ok(WeightsArg([a, b, g])),
            _ => Err(format!("expected three weights, got {}", parts.len())),
        }
    }
}

fn parse_metric(s: &str) -> Result<Metric, String> {
    s.parse::<Metric>().map_err(|e| e.to_string())
}

#[derive(Debug, Args, Serialize)]
struct DatasetArgs {
    /// CSV file with a header row.
    #[arg(long)]
    input: PathBuf,
    /// JSON column mapping; defaults to the `t,p,y,x1..` layout written by `simulate`.
    #[arg(long)]
    schema: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct SimulateArgs {
    #[arg(long, value_enum)]
    family: Family,
    #[arg(long, default_value_t = 100)]
    n: usize,
    /// Predictor count for mvnorm-x.
    #[arg(long, default_value_t = 3)]
    d: usize,
    #[arg(long, default_value = "10")]
    seed: SeedArg,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum MatrixKind {
    St,
    Sp,
    Sx,
    Sw,
}

#[derive(Debug, Args, Serialize)]
struct SimilarityArgs {
    #[command(flatten)]
    data: DatasetArgs,
    #[arg(long, value_enum)]
    kind: MatrixKind,
    /// `alpha,beta,gamma`; required for `--kind sw`.
    #[arg(long)]
    weights: Option<WeightsArg>,
    #[arg(long, default_value = "euclidean", value_parser = parse_metric)]
    metric: Metric,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    manifest: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct TuneArgs {
    #[command(flatten)]
    data: DatasetArgs,
    #[arg(long, default_value_t = 1000)]
    grid_len: usize,
    #[arg(long)]
    test_h: usize,
    #[arg(long, default_value_t = 0)]
    val_holdout: usize,
    #[arg(long)]
    max_k: Option<usize>,
    #[arg(long, default_value = "euclidean", value_parser = parse_metric)]
    metric: Metric,
    #[arg(long, default_value = "10")]
    seed: SeedArg,
    /// Worker threads for grid evaluation; does not affect results.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Report JSON; the winning matrix goes to `<stem>.sw.csv` beside it.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    manifest: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct ForecastArgs {
    #[command(flatten)]
    data: DatasetArgs,
    /// `alpha,beta,gamma`.
    #[arg(long, required_unless_present = "report")]
    weights: Option<WeightsArg>,
    #[arg(long, required_unless_present = "report")]
    k: Option<usize>,
    /// Take weights and k from a `tune` report instead.
    #[arg(long, conflicts_with_all = ["weights", "k"])]
    report: Option<PathBuf>,
    /// Number of trailing observations to forecast.
    #[arg(long)]
    horizon: usize,
    #[arg(long, default_value = "euclidean", value_parser = parse_metric)]
    metric: Metric,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Baseline {
    SeasonalNaive,
    Ols,
}

#[derive(Debug, Args, Serialize)]
struct EvaluateArgs {
    /// CSV with `index` and `actual` columns (a forecast file works).
    #[arg(long)]
    actuals: PathBuf,
    /// Comma-separated forecast CSVs with `index` and `estimate` columns.
    #[arg(long, value_delimiter = ',')]
    forecasts: Vec<PathBuf>,
    /// Add the equal-weight average of the forecasts.
    #[arg(long)]
    ensemble: bool,
    /// Baselines computed from `--input`.
    #[arg(long, value_enum, value_delimiter = ',')]
    baseline: Vec<Baseline>,
    #[arg(long, requires = "baseline")]
    input: Option<PathBuf>,
    #[arg(long, requires = "input")]
    schema: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    manifest: Option<PathBuf>,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Runtime(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Runtime(e)
    }
}

type CliResult<T> = Result<T, CliError>;

/// Record of one invocation.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub options: serde_json::Value,
    pub seed: Option<u64>,
    /// SHA-256 of each input file, keyed by path.
    pub input_hashes: BTreeMap<String, String>,
    pub outputs: Vec<String>,
    pub wall_time_seconds: f64,
}

struct Outcome {
    seed: Option<u64>,
    inputs: Vec<PathBuf>,
    outputs: Vec<PathBuf>,
    manifest_path: PathBuf,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .try_init();
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let started = Instant::now();
    let (name, options) = describe(&cli.command);
    let result = match &cli.command {
        Command::Simulate(a) => cmd_simulate(a),
        Command::Similarity(a) => cmd_similarity(a),
        Command::Tune(a) => cmd_tune(a),
        Command::Forecast(a) => cmd_forecast(a),
        Command::Evaluate(a) => cmd_evaluate(a),
    };
    let outcome = match result {
        Ok(outcome) => outcome,
        Err(CliError::Usage(message)) => {
            eprintln!("error: {message}");
            return 2;
        }
        Err(CliError::Runtime(e)) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    match write_manifest(name, options, outcome, started) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn describe(command: &Command) -> (&'static str, serde_json::Value) {
    let value = match command {
        Command::Simulate(a) => serde_json::to_value(a),
        Command::Similarity(a) => serde_json::to_value(a),
        Command::Tune(a) => serde_json::to_value(a),
        Command::Forecast(a) => serde_json::to_value(a),
        Command::Evaluate(a) => serde_json::to_value(a),
    };
    let name = match command {
        Command::Simulate(_) => "simulate",
        Command::Similarity(_) => "similarity",
        Command::Tune(_) => "tune",
        Command::Forecast(_) => "forecast",
        Command::Evaluate(_) => "evaluate",
    };
    (name, value.unwrap_or(serde_json::Value::Null))
}

fn sha256_file(path: &Path) -> Result<String, Error> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

fn write_manifest(
    command: &str,
    options: serde_json::Value,
    outcome: Outcome,
    started: Instant,
) -> Result<(), Error> {
    let input_hashes = outcome
        .inputs
        .iter()
        .map(|p| Ok((p.display().to_string(), sha256_file(p)?)))
        .collect::<Result<_, Error>>()?;
    let manifest = RunManifest {
        command: command.to_string(),
        options,
        seed: outcome.seed,
        input_hashes,
        outputs: outcome.outputs.iter().map(|p| p.display().to_string()).collect(),
        wall_time_seconds: started.elapsed().as_secs_f64(),
    };
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    std::fs::write(&outcome.manifest_path, text).map_err(|e| Error::io(&outcome.manifest_path, e))
}

fn default_manifest(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_os_string();
    name.push(".manifest.json");
    PathBuf::from(name)
}

fn load_dataset(args: &DatasetArgs) -> CliResult<(TimeSeriesDataset, Vec<PathBuf>)> {
    load_dataset_from(&args.input, args.schema.as_deref())
}

fn load_dataset_from(
    input: &Path,
    schema: Option<&Path>,
) -> CliResult<(TimeSeriesDataset, Vec<PathBuf>)> {
    let mut inputs = vec![input.to_path_buf()];
    let schema = match schema {
        Some(path) => {
            inputs.push(path.to_path_buf());
            DatasetSchema::from_json_file(path)?
        }
        None => DatasetSchema::series_layout(&dataio::read_header(input)?),
    };
    Ok((dataio::read_dataset(input, &schema)?, inputs))
}

fn cmd_simulate(args: &SimulateArgs) -> CliResult<Outcome> {
    let seed = args.seed.resolve();
    let config = SimulationConfig::new(args.family, args.n, seed).with_predictors(args.d);
    config.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let series = simulate_series(&config)?;
    let (csv, json) = dataio::write_simulation(&series, &args.out)?;
    Ok(Outcome {
        seed: Some(seed),
        inputs: vec![],
        outputs: vec![csv, json],
        manifest_path: args
            .manifest
            .clone()
            .unwrap_or_else(|| args.out.join("manifest.json")),
    })
}

fn weights_from(arg: WeightsArg) -> CliResult<WeightTriple> {
    let [a, b, g] = arg.0;
    WeightTriple::new(a, b, g).map_err(|e| CliError::Usage(e.to_string()))
}

fn cmd_similarity(args: &SimilarityArgs) -> CliResult<Outcome> {
    let (dataset, inputs) = load_dataset(&args.data)?;
    let matrix: SimilarityMatrix = match args.kind {
        MatrixKind::St => similarity::st_matrix(dataset.t())?,
        MatrixKind::Sp => similarity::sp_matrix(dataset.p(), dataset.n_periods())?,
        MatrixKind::Sx => {
            let x = dataset.x().ok_or(Error::MissingExogenous)?;
            similarity::sx_matrix(x, args.metric)?
        }
        MatrixKind::Sw => {
            let weights = args
                .weights
                .ok_or_else(|| CliError::Usage("--kind sw requires --weights".into()))?;
            similarity::sw_matrix(&dataset, &weights_from(weights)?, args.metric)?.sw
        }
    };
    dataio::write_matrix_csv(&matrix, &args.out)?;
    Ok(Outcome {
        seed: None,
        inputs,
        outputs: vec![args.out.clone()],
        manifest_path: args.manifest.clone().unwrap_or_else(|| default_manifest(&args.out)),
    })
}

fn cmd_tune(args: &TuneArgs) -> CliResult<Outcome> {
    let (dataset, inputs) = load_dataset(&args.data)?;
    let seed = args.seed.resolve();
    let mut config = TuningConfig::new(args.grid_len, args.test_h, args.val_holdout, seed)
        .with_jobs(args.jobs);
    config.max_k = args.max_k;
    config
        .validate(dataset.len())
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let x = dataset.x().ok_or(Error::MissingExogenous)?;
    let st = similarity::st_matrix(dataset.t())?;
    let sp = similarity::sp_matrix(dataset.p(), dataset.n_periods())?;
    let sx = similarity::sx_matrix(x, args.metric)?;
    let report = random_search_tune(&st, &sp, &sx, dataset.y(), &config)?;
    let matrix_path = dataio::write_tuning_report(&report, &args.out)?;
    Ok(Outcome {
        seed: Some(seed),
        inputs,
        outputs: vec![args.out.clone(), matrix_path],
        manifest_path: args.manifest.clone().unwrap_or_else(|| default_manifest(&args.out)),
    })
}

fn read_report_choice(path: &Path) -> CliResult<(WeightTriple, usize)> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(Error::from)?;
    let bad = || {
        CliError::Runtime(Error::Parse {
            path: path.display().to_string(),
            message: "expected `weight_opt` (three numbers) and `k_opt`".into(),
        })
    };
    let weights: Vec<f64> = value["weight_opt"]
        .as_array()
        .ok_or_else(bad)?
        .iter()
        .map(|v| v.as_f64().ok_or_else(bad))
        .collect::<CliResult<_>>()?;
    let k = value["k_opt"].as_u64().ok_or_else(bad)? as usize;
    match weights[..] {
        [a, b, g] => Ok((WeightTriple::new(a, b, g)?, k)),
        _ => Err(bad()),
    }
}

fn cmd_forecast(args: &ForecastArgs) -> CliResult<Outcome> {
    let (dataset, mut inputs) = load_dataset(&args.data)?;
    let (weights, k) = match (&args.report, args.weights, args.k) {
        (Some(report), _, _) => {
            inputs.push(report.clone());
            read_report_choice(report)?
        }
        (None, Some(w), Some(k)) => (weights_from(w)?, k),
        _ => return Err(CliError::Usage("--weights and --k are required".into())),
    };
    let n = dataset.len();
    if args.horizon == 0 || args.horizon >= n {
        return Err(CliError::Usage(format!(
            "--horizon must be between 1 and {}, got {}",
            n.saturating_sub(1),
            args.horizon
        )));
    }
    let sw = similarity::sw_matrix(&dataset, &weights, args.metric)?.sw;
    let f_index: Vec<usize> = (n - args.horizon + 1..=n).collect();
    let result = knn_forecast(&sw, &f_index, k, dataset.y())?;
    let actuals: Vec<f64> = f_index.iter().map(|&j| dataset.y()[j - 1]).collect();
    dataio::write_forecast(&result, Some(&actuals), &args.out)?;
    Ok(Outcome {
        seed: None,
        inputs,
        outputs: vec![args.out.clone()],
        manifest_path: args.manifest.clone().unwrap_or_else(|| default_manifest(&args.out)),
    })
}

fn column_name(path: &Path, taken: &[(String, f64)]) -> String {
    let stem = path
        .file_stem()
        .map_or_else(|| "forecast".into(), |s| s.to_string_lossy().into_owned());
    let mut name = stem.clone();
    let mut suffix = 2;
    while taken.iter().any(|(existing, _)| *existing == name) {
        name = format!("{stem}_{suffix}");
        suffix += 1;
    }
    name
}

fn cmd_evaluate(args: &EvaluateArgs) -> CliResult<Outcome> {
    if args.forecasts.is_empty() && args.baseline.is_empty() {
        return Err(CliError::Usage(
            "nothing to evaluate: pass --forecasts and/or --baseline".into(),
        ));
    }
    if !args.baseline.is_empty() && args.input.is_none() {
        return Err(CliError::Usage("--baseline requires --input".into()));
    }
    let mut inputs = vec![args.actuals.clone()];
    let truth = dataio::read_forecast_table(&args.actuals)?;
    let actuals = truth.actual.ok_or_else(|| Error::MissingColumn("actual".into()))?;

    let mut columns: Vec<(String, f64)> = Vec::new();
    let mut estimates_by_forecast = Vec::new();
    for path in &args.forecasts {
        inputs.push(path.clone());
        let table = dataio::read_forecast_table(path)?;
        let estimates = table
            .estimate
            .ok_or_else(|| Error::MissingColumn("estimate".into()))?;
        if table.index != truth.index {
            return Err(Error::LengthMismatch {
                what: "forecast rows matching the actuals' index",
                expected: truth.index.len(),
                found: table.index.len(),
            }
            .into());
        }
        let name = column_name(path, &columns);
        columns.push((name, mape(&actuals, &estimates)?));
        estimates_by_forecast.push(estimates);
    }
    if args.ensemble && !estimates_by_forecast.is_empty() {
        let count = estimates_by_forecast.len() as f64;
        let ensemble: Vec<f64> = (0..actuals.len())
            .map(|i| estimates_by_forecast.iter().map(|e| e[i]).sum::<f64>() / count)
            .collect();
        columns.push(("ensemble".into(), mape(&actuals, &ensemble)?));
    }
    if let Some(input) = &args.input {
        let (dataset, dataset_inputs) = load_dataset_from(input, args.schema.as_deref())?;
        inputs.extend(dataset_inputs);
        if truth.index.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CliError::Usage(
                "baselines need the actuals' index in strictly increasing order".into(),
            ));
        }
        for baseline in &args.baseline {
            let (name, estimates) = match baseline {
                Baseline::SeasonalNaive => (
                    "seasonal_naive",
                    seasonal_naive(dataset.y(), dataset.p(), &truth.index)?,
                ),
                Baseline::Ols => {
                    let x = dataset.x().ok_or(Error::MissingExogenous)?;
                    ("ols", ols_baseline(x, dataset.y(), &truth.index)?)
                }
            };
            columns.push((name.into(), mape(&actuals, &estimates)?));
        }
    }
    dataio::write_mape_table(&args.out, &columns)?;
    Ok(Outcome {
        seed: None,
        inputs,
        outputs: vec![args.out.clone()],
        manifest_path: args.manifest.clone().unwrap_or_else(|| default_manifest(&args.out)),
    })
}
