//! antispoof — coded light-field anti-spoofing experiments.
//!
//! Subcommands mirror the experiment pipeline: `gen` synthesizes a labeled
//! dataset, `score` runs the reconstruction-free flatness test over it,
//! `calibrate` picks the EER threshold, `evaluate` produces the
//! ROC/ACER report, and `report` pretty-prints one.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.

mod commands;
mod config;
mod error;
mod scores;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use commands::SplitMode;
use config::RunConfig;
use error::{CliError, CliResult};

#[derive(Parser)]
#[command(name = "antispoof", version, about = "Coded light-field anti-spoofing pipeline")]
struct Cli {
    /// JSON run configuration; flags override its fields.
    #[arg(long, global = true, value_name = "JSON")]
    config: Option<PathBuf>,

    /// Master seed for generation, splits, and calibration.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads (0 = all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Output directory (or file, for calibrate).
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a labeled synthetic dataset.
    Gen(GenArgs),
    /// Score captures with the flatness test.
    Score(ScoreArgs),
    /// Pick the EER threshold from genuine and spoof score lists.
    Calibrate(CalibrateArgs),
    /// Evaluate scores: report.json, roc.csv, hist.csv.
    Evaluate(EvaluateArgs),
    /// Pretty-print a report.json.
    Report(ReportArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Number of genuine 3D captures.
    #[arg(long)]
    genuine: Option<usize>,
    /// Number of flat spoof captures.
    #[arg(long)]
    flat: Option<usize>,
    /// Number of curved spoof captures.
    #[arg(long)]
    curved: Option<usize>,
    /// Capture width in pixels.
    #[arg(long)]
    width: Option<usize>,
    /// Capture height in pixels.
    #[arg(long)]
    height: Option<usize>,
}

#[derive(Args)]
struct ScoreArgs {
    /// Dataset directory to score in batch.
    #[arg(long, value_name = "DIR", conflicts_with_all = ["coded", "mask"])]
    dataset: Option<PathBuf>,
    /// Single capture: coded PGM image.
    #[arg(long, value_name = "PGM", requires = "mask")]
    coded: Option<PathBuf>,
    /// Single capture: directory with the mask planes and sidecar.
    #[arg(long, value_name = "DIR", requires = "coded")]
    mask: Option<PathBuf>,
}

#[derive(Args)]
struct CalibrateArgs {
    /// CSV of genuine scores (scores.csv or a bare column).
    #[arg(long, value_name = "CSV")]
    genuine: PathBuf,
    /// CSV of spoof scores.
    #[arg(long, value_name = "CSV")]
    spoof: PathBuf,
}

#[derive(Args)]
struct EvaluateArgs {
    /// scores.csv produced by `score`.
    #[arg(long, value_name = "CSV")]
    scores: PathBuf,
    /// `holdout` repeats random train/test splits; `all` evaluates once on
    /// the full set.
    #[arg(long, default_value = "holdout")]
    split: String,
    /// Test fraction per class for holdout splits.
    #[arg(long)]
    test_fraction: Option<f64>,
    /// Number of holdout repeats.
    #[arg(long)]
    repeats: Option<usize>,
}

#[derive(Args)]
struct ReportArgs {
    /// report.json produced by `evaluate`.
    #[arg(long, value_name = "JSON")]
    report: PathBuf,
}

fn load_config(cli: &Cli) -> CliResult<RunConfig> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(jobs) = cli.jobs {
        config.jobs = jobs;
    }
    Ok(config)
}

fn run(cli: Cli) -> CliResult<()> {
    let mut config = load_config(&cli)?;
    match &cli.command {
        Command::Gen(args) => {
            if let Some(n) = args.genuine {
                config.genuine = n;
            }
            if let Some(n) = args.flat {
                config.flat = n;
            }
            if let Some(n) = args.curved {
                config.curved = n;
            }
            if let Some(w) = args.width {
                config.width = w;
            }
            if let Some(h) = args.height {
                config.height = h;
            }
            let out = cli
                .out
                .as_deref()
                .ok_or_else(|| CliError::Usage("gen requires --out <DIR>".into()))?;
            commands::cmd_gen(&config, out)
        }
        Command::Score(args) => match (&args.dataset, &args.coded, &args.mask) {
            (Some(dataset), None, None) => {
                let out = commands::score_out_dir(dataset, cli.out.as_deref());
                commands::cmd_score_dataset(&config, dataset, &out)
            }
            (None, Some(coded), Some(mask)) => commands::cmd_score_single(&config, coded, mask),
            _ => Err(CliError::Usage(
                "score needs either --dataset <DIR> or --coded <PGM> --mask <DIR>".into(),
            )),
        },
        Command::Calibrate(args) => {
            commands::cmd_calibrate(&args.genuine, &args.spoof, cli.out.as_deref())
        }
        Command::Evaluate(args) => {
            if let Some(f) = args.test_fraction {
                config.test_fraction = f;
            }
            if let Some(r) = args.repeats {
                config.repeats = r;
            }
            let split = match args.split.as_str() {
                "holdout" => SplitMode::Holdout,
                "all" => SplitMode::All,
                other => {
                    return Err(CliError::Usage(format!(
                        "unknown split mode {other:?}; use holdout or all"
                    )))
                }
            };
            let out = cli
                .out
                .as_deref()
                .ok_or_else(|| CliError::Usage("evaluate requires --out <DIR>".into()))?;
            commands::cmd_evaluate(&config, &args.scores, split, out)
        }
        Command::Report(args) => commands::cmd_report(&args.report),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err)
            if matches!(
                err.kind(),
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion
            ) =>
        {
            print!("{err}");
            return ExitCode::SUCCESS;
        }
        Err(err) => {
            eprint!("{err}");
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
