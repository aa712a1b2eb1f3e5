//! Commands behind the `dlglab` binary.
//!
//! Each command returns a [`RunReport`]; [`execute`] times it, writes
//! `report.json` into the output directory (also when the command fails)
//! and maps the outcome to an exit code: 0 on success, 1 when a check fails
//! or a computation errors, 2 for usage and parse errors.

use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::data::{self, DataError, Dataset, SynthConfig};
use crate::dlg::{self, DlgMatrices};
use crate::hypergraph::ComplexMatrix;
use crate::net::{self, Metrics, ModelFormatError, NetError, TrainConfig};
use crate::spectral::{self, SpectralError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Environment variable capping the number of folds trained in parallel.
pub const THREADS_ENV: &str = "DLGLAB_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Net(#[from] NetError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Model(#[from] ModelFormatError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Data(_) | CliError::Usage(_) => EXIT_USAGE,
            _ => EXIT_CHECK_FAILED,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_owned(), source }
}

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(io_err(path))
}

fn create_dir(path: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(path).map_err(io_err(path))
}

/// The single JSON record every run leaves in its output directory.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    /// Effective configuration with every default filled in.
    pub config: Value,
    pub seed: u64,
    pub wall_time_s: f64,
    pub outputs: Vec<PathBuf>,
    pub payload: Value,
    pub passed: bool,
    pub exit_code: i32,
    pub error: Option<String>,
}

impl RunReport {
    fn new(command: &str, config: &impl Serialize, seed: u64) -> Self {
        Self {
            command: command.into(),
            config: serde_json::to_value(config).expect("config serializes"),
            seed,
            wall_time_s: 0.0,
            outputs: Vec::new(),
            payload: Value::Null,
            passed: true,
            exit_code: EXIT_OK,
            error: None,
        }
    }
}

/// A parsed command line.
#[derive(Debug, Clone)]
pub enum Command {
    Verify(VerifyArgs),
    Train(TrainArgs),
    Gen(GenArgs),
    Inspect(InspectArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Verify(_) => "verify",
            Command::Train(_) => "train",
            Command::Gen(_) => "gen",
            Command::Inspect(_) => "inspect",
        }
    }

    fn config(&self) -> (Value, u64) {
        let to = |r: Result<Value, serde_json::Error>| r.expect("config serializes");
        match self {
            Command::Verify(a) => (to(serde_json::to_value(a)), a.seed),
            Command::Train(a) => (to(serde_json::to_value(a.effective())), a.train.seed),
            Command::Gen(a) => (to(serde_json::to_value(a)), a.synth.seed),
            Command::Inspect(a) => (to(serde_json::to_value(a)), 0),
        }
    }
}

/// Runs `cmd`, writes `report.json` into `out_dir` and returns the report
/// together with the process exit code.
pub fn execute(cmd: &Command, out_dir: &Path) -> (RunReport, i32) {
    let start = Instant::now();
    let result = create_dir(out_dir).and_then(|()| match cmd {
        Command::Verify(a) => cmd_verify(a, out_dir),
        Command::Train(a) => cmd_train(a, out_dir),
        Command::Gen(a) => cmd_gen(a, out_dir),
        Command::Inspect(a) => cmd_inspect(a, out_dir),
    });
    let mut report = match result {
        Ok(report) => report,
        Err(e) => {
            let (config, seed) = cmd.config();
            let mut report = RunReport::new(cmd.name(), &config, seed);
            report.passed = false;
            report.exit_code = e.exit_code();
            report.error = Some(e.to_string());
            report
        }
    };
    if report.error.is_none() && !report.passed {
        report.exit_code = EXIT_CHECK_FAILED;
    }
    report.wall_time_s = start.elapsed().as_secs_f64();
    let path = out_dir.join("report.json");
    let text = serde_json::to_string_pretty(&report).expect("report serializes");
    if let Err(e) = std::fs::write(&path, text) {
        eprintln!("cannot write {}: {e}", path.display());
        if report.exit_code == EXIT_OK {
            report.exit_code = EXIT_CHECK_FAILED;
        }
    }
    let code = report.exit_code;
    (report, code)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyArgs {
    pub dataset: PathBuf,
    pub trials: usize,
    pub seed: u64,
    /// Check this Laplacian (CSV `i,j,re,im`) against the dataset's
    /// hypergraph instead of the one built from it.
    pub laplacian_csv: Option<PathBuf>,
}

/// Spectral checks on a dataset's hypergraph; `passed` is false when any check fails.
pub fn cmd_verify(args: &VerifyArgs, out_dir: &Path) -> Result<RunReport, CliError> {
    let dataset = data::parse_dataset(&args.dataset)?;
    let h = &dataset.hypergraph;
    let signal_seed = crate::sub_seed(args.seed, "signals");
    let spectrum = match &args.laplacian_csv {
        None => spectral::verify_hypergraph(h, args.trials, signal_seed)?,
        Some(path) => {
            let laplacian = read_matrix_csv(path, h.m())?;
            let mats =
                DlgMatrices { adjacency: dlg::dlg_adjacency(h), signless: dlg::identity_minus(&laplacian), laplacian };
            spectral::verify_matrices(h, &mats, args.trials, signal_seed)?
        }
    };
    let path = out_dir.join("spectrum.json");
    write_file(&path, serde_json::to_string_pretty(&spectrum).expect("spectrum serializes"))?;
    let mut report = RunReport::new("verify", args, args.seed);
    report.passed = spectrum.passed;
    report.outputs.push(path);
    report.payload = serde_json::to_value(&spectrum).expect("spectrum serializes");
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ablation {
    #[default]
    None,
    Undirected,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainArgs {
    pub dataset: PathBuf,
    /// Replace the dataset's folds with this many fresh stratified splits.
    pub folds: Option<usize>,
    pub ablation: Ablation,
    pub train: TrainConfig,
}

impl TrainArgs {
    /// The arguments with the ablation applied to the training config.
    pub fn effective(&self) -> Self {
        let mut out = self.clone();
        out.train.directed = self.ablation == Ablation::None;
        out
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FoldResult {
    pub fold: usize,
    pub best_epoch: usize,
    pub train: Metrics,
    pub val: Option<Metrics>,
    pub test: Metrics,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainSummary {
    pub folds: Vec<FoldResult>,
    pub mean_test_macro_f1: f64,
    /// Sample standard deviation over folds (0 for a single fold).
    pub std_test_macro_f1: f64,
}

/// Mean and sample standard deviation.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn fold_threads() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&t| t > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Trains and scores one model per fold.
pub fn run_folds(dataset: &Dataset, cfg: &TrainConfig) -> Result<Vec<(FoldResult, net::TrainOutcome)>, CliError> {
    if dataset.folds.is_empty() {
        return Err(CliError::Usage("dataset has no folds; pass --folds k to create them".into()));
    }
    let graph = net::prepare(dataset, cfg)?;
    let one = |f: usize| -> Result<(FoldResult, net::TrainOutcome), CliError> {
        let fold = &dataset.folds[f];
        let outcome = net::train_prepared(
            &graph,
            &dataset.targets(&fold.train),
            &dataset.targets(&fold.val),
            dataset.classes(),
            cfg,
        )?;
        let score = |ids: &[usize]| net::evaluate(&outcome.model, &graph, dataset, ids);
        let result = FoldResult {
            fold: f,
            best_epoch: outcome.best_epoch,
            train: score(&fold.train)?,
            val: if fold.val.is_empty() { None } else { Some(score(&fold.val)?) },
            test: score(&fold.test)?,
        };
        Ok((result, outcome))
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(fold_threads().min(dataset.folds.len()))
        .build()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    pool.install(|| (0..dataset.folds.len()).into_par_iter().map(one).collect())
}

/// Per-fold training with the fold's test scores, confusion matrices, loss
/// histories and best models written under `out_dir/fold-<k>/`.
pub fn cmd_train(args: &TrainArgs, out_dir: &Path) -> Result<RunReport, CliError> {
    let args = args.effective();
    let cfg = &args.train;
    cfg.validate()?;
    let mut dataset = data::parse_dataset(&args.dataset)?;
    let mut report = RunReport::new("train", &args, cfg.seed);
    if let Some(k) = args.folds {
        dataset = data::make_folds(&dataset, k, crate::sub_seed(cfg.seed, "split"))?;
        let path = out_dir.join("folds.json");
        data::write_folds(&dataset.folds, &path)?;
        report.outputs.push(path);
    }
    let results = run_folds(&dataset, cfg)?;
    let mut folds = Vec::with_capacity(results.len());
    for (result, outcome) in results {
        let dir = out_dir.join(format!("fold-{}", result.fold));
        create_dir(&dir)?;
        let confusion = dir.join("confusion.csv");
        write_file(&confusion, result.test.confusion_csv(&dataset.class_names))?;
        let history = dir.join("history.csv");
        let mut text = String::from("epoch,loss,train_macro_f1,val_macro_f1\n");
        for r in &outcome.history {
            text.push_str(&format!("{},{},{},{}\n", r.epoch, r.loss, r.train_f1, r.val_f1));
        }
        write_file(&history, text)?;
        let model = dir.join("model.json");
        outcome.model.save(&model)?;
        report.outputs.extend([confusion, history, model]);
        folds.push(result);
    }
    let f1: Vec<f64> = folds.iter().map(|r| r.test.macro_f1).collect();
    let (mean, std) = mean_std(&f1);
    let summary = TrainSummary { folds, mean_test_macro_f1: mean, std_test_macro_f1: std };
    report.payload = serde_json::to_value(&summary).expect("summary serializes");
    Ok(report)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GenArgs {
    pub synth: SynthConfig,
    /// Where the dataset file goes.
    pub out: PathBuf,
}

/// Writes a synthetic direction-motif dataset.
pub fn cmd_gen(args: &GenArgs, _out_dir: &Path) -> Result<RunReport, CliError> {
    let dataset = data::generate_synthetic(&args.synth)?;
    if let Some(parent) = args.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        create_dir(parent)?;
    }
    write_file(&args.out, dataset.to_json())?;
    let mut report = RunReport::new("gen", args, args.synth.seed);
    report.outputs.push(args.out.clone());
    report.payload = json!({
        "vertices": dataset.hypergraph.n(),
        "hyperedges": dataset.hypergraph.m(),
        "classes": dataset.class_names,
        "generator": dataset.meta,
    });
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatrixKind {
    Adjacency,
    #[default]
    Laplacian,
    Signless,
    Undirected,
}

impl MatrixKind {
    pub fn name(self) -> &'static str {
        match self {
            MatrixKind::Adjacency => "adjacency",
            MatrixKind::Laplacian => "laplacian",
            MatrixKind::Signless => "signless",
            MatrixKind::Undirected => "undirected",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InspectArgs {
    pub dataset: PathBuf,
    pub matrix: MatrixKind,
}

/// The requested line-graph matrix of a dataset.
pub fn build_matrix(dataset: &Dataset, kind: MatrixKind) -> ComplexMatrix {
    let h = &dataset.hypergraph;
    match kind {
        MatrixKind::Adjacency => dlg::dlg_adjacency(h),
        MatrixKind::Laplacian => dlg::directed_laplacians(h).laplacian,
        MatrixKind::Signless => dlg::directed_laplacians(h).signless,
        MatrixKind::Undirected => dlg::undirected_laplacian(h),
    }
}

/// Writes the selected matrix to `out_dir/<matrix>.csv`.
pub fn cmd_inspect(args: &InspectArgs, out_dir: &Path) -> Result<RunReport, CliError> {
    let dataset = data::parse_dataset(&args.dataset)?;
    let matrix = build_matrix(&dataset, args.matrix);
    let path = out_dir.join(format!("{}.csv", args.matrix.name()));
    write_file(&path, matrix_csv(&matrix))?;
    let mut report = RunReport::new("inspect", args, 0);
    report.outputs.push(path);
    report.payload = json!({ "matrix": args.matrix, "rows": matrix.nrows(), "cols": matrix.ncols() });
    Ok(report)
}

/// Every entry as `i,j,re,im`, row-major, with shortest round-trip floats.
pub fn matrix_csv(m: &ComplexMatrix) -> String {
    let mut out = String::from("i,j,re,im\n");
    for ((i, j), z) in m.indexed_iter() {
        // + 0.0 turns -0.0 into 0.0
        out.push_str(&format!("{i},{j},{:?},{:?}\n", z.re + 0.0, z.im + 0.0));
    }
    out
}

/// Parses a `i,j,re,im` CSV into an `m × m` matrix; missing entries are zero.
pub fn parse_matrix_csv(text: &str, m: usize) -> Result<ComplexMatrix, DataError> {
    let mut out = ComplexMatrix::zeros((m, m));
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (k == 0 && line.starts_with('i')) {
            continue;
        }
        let bad = |message: String| DataError::Parse { line: k + 1, column: 1, message };
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        if cols.len() != 4 {
            return Err(bad(format!("expected 4 columns, found {}", cols.len())));
        }
        let idx = |s: &str| s.parse::<usize>().map_err(|e| bad(format!("{s:?}: {e}")));
        let num = |s: &str| s.parse::<f64>().map_err(|e| bad(format!("{s:?}: {e}")));
        let (i, j) = (idx(cols[0])?, idx(cols[1])?);
        if i >= m || j >= m {
            return Err(bad(format!("entry ({i}, {j}) outside a {m} x {m} matrix")));
        }
        out[[i, j]] = Complex64::new(num(cols[2])?, num(cols[3])?);
    }
    Ok(out)
}

pub fn read_matrix_csv(path: &Path, m: usize) -> Result<ComplexMatrix, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| DataError::Io { path: path.to_owned(), source })?;
    Ok(parse_matrix_csv(&text, m)?)
}
