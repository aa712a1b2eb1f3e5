use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use dlglab::cli::{self, Ablation, Command, GenArgs, InspectArgs, MatrixKind, TrainArgs, VerifyArgs};
use dlglab::data::SynthConfig;
use dlglab::net::TrainConfig;
use dlglab::Operator;

#[derive(Parser)]
#[command(name = "dlglab", version, about = "Directed line graph Laplacians and DLGNet training")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Check the spectral properties of a dataset's line-graph Laplacian.
    Verify {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Verify this Laplacian CSV (i,j,re,im) instead of the built one.
        #[arg(long)]
        laplacian_csv: Option<PathBuf>,
        #[arg(long, default_value = "dlglab-out")]
        out_dir: PathBuf,
    },
    /// Train and evaluate one model per fold.
    Train {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        epochs: usize,
        #[arg(long, default_value_t = 5e-3)]
        lr: f64,
        #[arg(long, default_value_t = 5e-4)]
        weight_decay: f64,
        #[arg(long, default_value_t = 2)]
        conv_layers: usize,
        #[arg(long, default_value_t = 32)]
        filters: usize,
        #[arg(long, default_value_t = 32)]
        hidden: usize,
        /// Create this many stratified folds instead of using the dataset's.
        #[arg(long)]
        folds: Option<usize>,
        #[arg(long, value_enum, default_value = "none")]
        ablation: AblationArg,
        #[arg(long, value_enum, default_value = "laplacian")]
        laplacian: OperatorArg,
        #[arg(long)]
        theta0_zero: bool,
        #[arg(long)]
        no_residual: bool,
        #[arg(long, default_value = "dlglab-out")]
        out_dir: PathBuf,
    },
    /// Generate a synthetic direction-motif dataset.
    Gen {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        classes: usize,
        #[arg(long, default_value_t = 200)]
        per_class: usize,
        #[arg(long, default_value_t = 60)]
        pool_size: usize,
        #[arg(long, default_value_t = 2)]
        side_min: usize,
        #[arg(long, default_value_t = 2)]
        side_max: usize,
        #[arg(long, default_value_t = 8)]
        feature_dim: usize,
        #[arg(long, default_value_t = 1.0)]
        motif: f64,
        #[arg(long, default_value_t = 1.0)]
        noise: f64,
        #[arg(long, default_value_t = 1.0)]
        signal: f64,
        #[arg(long, default_value = "dlglab-out")]
        out_dir: PathBuf,
    },
    /// Write a line-graph matrix as CSV (i,j,re,im).
    Inspect {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long, value_enum, default_value = "laplacian")]
        matrix: MatrixArg,
        #[arg(long, default_value = "dlglab-out")]
        out_dir: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum AblationArg {
    None,
    Undirected,
}

#[derive(Clone, Copy, ValueEnum)]
enum OperatorArg {
    Laplacian,
    Signless,
}

#[derive(Clone, Copy, ValueEnum)]
enum MatrixArg {
    Adjacency,
    Laplacian,
    Signless,
    Undirected,
}

fn main() -> ExitCode {
    let (cmd, out_dir) = match Cli::parse().command {
        Sub::Verify { dataset, trials, seed, laplacian_csv, out_dir } => {
            (Command::Verify(VerifyArgs { dataset, trials, seed, laplacian_csv }), out_dir)
        }
        Sub::Train {
            dataset,
            seed,
            epochs,
            lr,
            weight_decay,
            conv_layers,
            filters,
            hidden,
            folds,
            ablation,
            laplacian,
            theta0_zero,
            no_residual,
            out_dir,
        } => {
            let train = TrainConfig {
                epochs,
                lr,
                weight_decay,
                seed,
                conv_layers,
                filters,
                hidden,
                residual: !no_residual,
                theta0_zero,
                operator: match laplacian {
                    OperatorArg::Laplacian => Operator::Laplacian,
                    OperatorArg::Signless => Operator::Signless,
                },
                ..TrainConfig::default()
            };
            let ablation = match ablation {
                AblationArg::None => Ablation::None,
                AblationArg::Undirected => Ablation::Undirected,
            };
            (Command::Train(TrainArgs { dataset, folds, ablation, train }), out_dir)
        }
        Sub::Gen {
            out,
            seed,
            classes,
            per_class,
            pool_size,
            side_min,
            side_max,
            feature_dim,
            motif,
            noise,
            signal,
            out_dir,
        } => {
            let synth = SynthConfig {
                classes,
                per_class,
                pool_size,
                side_size: (side_min, side_max),
                feature_dim,
                motif_strength: motif,
                noise,
                signal,
                seed,
            };
            (Command::Gen(GenArgs { synth, out }), out_dir)
        }
        Sub::Inspect { dataset, matrix, out_dir } => {
            let matrix = match matrix {
                MatrixArg::Adjacency => MatrixKind::Adjacency,
                MatrixArg::Laplacian => MatrixKind::Laplacian,
                MatrixArg::Signless => MatrixKind::Signless,
                MatrixArg::Undirected => MatrixKind::Undirected,
            };
            (Command::Inspect(InspectArgs { dataset, matrix }), out_dir)
        }
    };
    let (report, code) = cli::execute(&cmd, &out_dir);
    match &report.error {
        Some(e) => eprintln!("dlglab {}: {e}", report.command),
        None if !report.passed => eprintln!("dlglab {}: checks failed", report.command),
        None => {}
    }
    println!("{}", out_dir.join("report.json").display());
    ExitCode::from(code as u8)
}
