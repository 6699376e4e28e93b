//! Command implementations: gen, score, calibrate, evaluate, report.

use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use lfpad::dataset::{self, LoadedCapture};
use lfpad::io;
use lfpad::metrics::{self, EvalReport, HoldoutParams, HoldoutReport};
use lfpad::spoof::{flatness_score, AntiSpoofConfig};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::scores::{
    read_score_column, read_score_rows, split_by_class, write_rows, FailureRow, ScoreRow,
    FAILURE_HEADERS, SCORE_HEADERS,
};

/// Scalar used by the pipeline binaries.
type Pixel = f64;

pub const REPORT_FILE: &str = "report.json";
pub const SCORES_FILE: &str = "scores.csv";
pub const FAILURES_FILE: &str = "failures.csv";
pub const ROC_FILE: &str = "roc.csv";
pub const HIST_FILE: &str = "hist.csv";

/// The report.json payload: headline metrics, plus the holdout protocol
/// block when a split evaluation ran.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportJson {
    pub eer: f64,
    pub threshold: f64,
    pub acer: f64,
    pub auc: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub holdout: Option<HoldoutReport>,
}

/// Runs `body` on a rayon pool sized by the configured job count.
fn with_pool<R: Send>(jobs: usize, body: impl FnOnce() -> R + Send) -> CliResult<R> {
    if jobs == 0 {
        return Ok(body());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Internal(format!("thread pool: {e}")))?;
    Ok(pool.install(body))
}

pub fn cmd_gen(config: &RunConfig, out: &Path) -> CliResult<()> {
    let params = config.dataset_params();
    if params.total() == 0 {
        return Err(CliError::Usage(
            "nothing to generate: set --genuine/--flat/--curved (or counts in --config)".into(),
        ));
    }
    let entries = with_pool(config.jobs, || {
        dataset::generate_to_dir::<Pixel>(out, &params)
    })??;
    println!(
        "wrote {} captures ({} genuine, {} flat, {} curved) to {}",
        entries.len(),
        params.n_genuine,
        params.n_flat,
        params.n_curved,
        out.display()
    );
    Ok(())
}

fn score_one(
    capture: &LoadedCapture<Pixel>,
    cfg: &AntiSpoofConfig,
) -> Result<ScoreRow, FailureRow> {
    match flatness_score(&capture.coded, &capture.mask, cfg) {
        Ok(result) => Ok(ScoreRow {
            capture_id: capture.id.clone(),
            label: capture.label.as_str().to_string(),
            score: result.score,
            covered_fraction: result.covered_fraction,
            probe_d1: result.probes[0].disparity,
            probe_d2: result.probes[1].disparity,
            probe_d3: result.probes[2].disparity,
        }),
        Err(err) => Err(FailureRow {
            capture_id: capture.id.clone(),
            label: capture.label.as_str().to_string(),
            error: err.to_string(),
        }),
    }
}

pub fn cmd_score_dataset(config: &RunConfig, dataset_dir: &Path, out: &Path) -> CliResult<()> {
    let manifest = dataset::read_manifest(dataset_dir)?;
    let results: Vec<Result<ScoreRow, FailureRow>> = with_pool(config.jobs, || {
        manifest
            .par_iter()
            .map(|entry| match dataset::read_capture::<Pixel>(dataset_dir, &entry.id) {
                Ok(capture) => score_one(&capture, &config.antispoof),
                Err(err) => Err(FailureRow {
                    capture_id: entry.id.clone(),
                    label: entry.label.clone(),
                    error: err.to_string(),
                }),
            })
            .collect()
    })?;

    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for result in results {
        match result {
            Ok(row) => rows.push(row),
            Err(failure) => failures.push(failure),
        }
    }
    rows.sort_by(|a, b| a.capture_id.cmp(&b.capture_id));
    failures.sort_by(|a, b| a.capture_id.cmp(&b.capture_id));

    std::fs::create_dir_all(out)?;
    write_rows(&out.join(SCORES_FILE), &rows, &SCORE_HEADERS)?;
    write_rows(&out.join(FAILURES_FILE), &failures, &FAILURE_HEADERS)?;
    println!(
        "scored {} captures ({} failures) into {}",
        rows.len(),
        failures.len(),
        out.display()
    );
    Ok(())
}

pub fn cmd_score_single(config: &RunConfig, coded: &Path, mask_dir: &Path) -> CliResult<()> {
    let mask = io::read_mask(mask_dir)?;
    let image: lfpad::GrayImage<Pixel> = io::read_pgm(coded)?;
    let coded_image = lfpad::coding::CodedImage {
        image,
        mask_id: mask.id(),
    };
    // A capture directory may carry its label in meta.json.
    let label = io::read_json::<dataset::CaptureMeta>(&mask_dir.join(dataset::META_FILE))
        .map(|meta| meta.label.as_str().to_string())
        .unwrap_or_else(|_| "unknown".to_string());
    let id = coded
        .parent()
        .and_then(|p| p.file_name())
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "capture".to_string());

    let result = flatness_score(&coded_image, &mask, &config.antispoof)?;
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    writeln!(out, "{}", SCORE_HEADERS.join(","))?;
    writeln!(
        out,
        "{},{},{},{},{},{},{}",
        id,
        label,
        result.score,
        result.covered_fraction,
        result.probes[0].disparity,
        result.probes[1].disparity,
        result.probes[2].disparity
    )?;
    Ok(())
}

/// The calibrate output document.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationResult {
    pub threshold: f64,
    pub eer: f64,
}

pub fn cmd_calibrate(
    genuine_path: &Path,
    spoof_path: &Path,
    out: Option<&Path>,
) -> CliResult<()> {
    let genuine = read_score_column(genuine_path)?;
    let spoof = read_score_column(spoof_path)?;
    let (threshold, eer) = metrics::calibrate_threshold(&genuine, &spoof)?;
    let result = CalibrationResult { threshold, eer };
    let text = serde_json::to_string_pretty(&result)
        .map_err(|e| CliError::Internal(format!("encode calibration: {e}")))?;
    match out {
        Some(path) => std::fs::write(path, text + "\n")?,
        None => println!("{text}"),
    }
    Ok(())
}

/// Which evaluation protocol to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SplitMode {
    /// Metrics on the full score set only.
    All,
    /// Repeated random train/test splits; reports mean test ACER.
    Holdout,
}

pub fn cmd_evaluate(
    config: &RunConfig,
    scores_path: &Path,
    split: SplitMode,
    out: &Path,
) -> CliResult<()> {
    let rows = read_score_rows(scores_path)?;
    let (genuine, flat, curved) = split_by_class(&rows)?;
    let spoof: Vec<f64> = flat.iter().chain(curved.iter()).copied().collect();
    if genuine.is_empty() || spoof.is_empty() {
        return Err(CliError::Data(format!(
            "evaluation needs both classes, found {} genuine and {} spoof scores",
            genuine.len(),
            spoof.len()
        )));
    }

    let report = metrics::evaluate(&genuine, &spoof)?;
    let holdout = match split {
        SplitMode::All => None,
        SplitMode::Holdout => Some(metrics::holdout_acer(
            &genuine,
            &spoof,
            &HoldoutParams {
                test_fraction: config.test_fraction,
                repeats: config.repeats,
                seed: config.seed,
            },
        )?),
    };

    std::fs::create_dir_all(out)?;
    write_roc_csv(&out.join(ROC_FILE), &report)?;
    write_hist_csv(&out.join(HIST_FILE), &report)?;
    let payload = ReportJson {
        eer: report.eer,
        threshold: report.threshold,
        acer: report.acer,
        auc: report.auc,
        holdout,
    };
    io::write_json(&out.join(REPORT_FILE), &payload)
        .map_err(|e| CliError::Data(e.to_string()))?;

    match &payload.holdout {
        Some(h) => println!(
            "eer {:.4} acer {:.4} auc {:.4} | holdout mean acer {:.4} over {} splits",
            payload.eer, payload.acer, payload.auc, h.mean_acer, h.repeats
        ),
        None => println!(
            "eer {:.4} acer {:.4} auc {:.4}",
            payload.eer, payload.acer, payload.auc
        ),
    }
    Ok(())
}

fn write_roc_csv(path: &Path, report: &EvalReport) -> CliResult<()> {
    let mut out = String::from("threshold,apcer,one_minus_bpcer\n");
    for point in &report.roc {
        out.push_str(&format!(
            "{},{},{}\n",
            point.threshold, point.apcer, point.one_minus_bpcer
        ));
    }
    std::fs::write(path, out)?;
    Ok(())
}

fn write_hist_csv(path: &Path, report: &EvalReport) -> CliResult<()> {
    let hist = &report.histogram;
    let mut out = String::from("bin_lo,bin_hi,genuine_count,spoof_count\n");
    for (i, pair) in hist.bin_edges.windows(2).enumerate() {
        out.push_str(&format!(
            "{},{},{},{}\n",
            pair[0], pair[1], hist.genuine[i], hist.spoof[i]
        ));
    }
    std::fs::write(path, out)?;
    Ok(())
}

pub fn cmd_report(report_path: &Path) -> CliResult<()> {
    let text = std::fs::read_to_string(report_path)
        .map_err(|e| CliError::Data(format!("{}: {e}", report_path.display())))?;
    let report: ReportJson = serde_json::from_str(&text)
        .map_err(|e| CliError::Data(format!("{}: {e}", report_path.display())))?;
    println!("EER       {:.4} (threshold {:.6})", report.eer, report.threshold);
    println!("ACER      {:.4}", report.acer);
    println!("AUC       {:.4}", report.auc);
    if let Some(h) = &report.holdout {
        println!(
            "holdout   mean ACER {:.4} over {} random splits ({:.0}% test, seed {})",
            h.mean_acer,
            h.repeats,
            h.test_fraction * 100.0,
            h.seed
        );
    }
    Ok(())
}

/// Resolves the dataset/output directory for batch scoring.
pub fn score_out_dir(dataset_dir: &Path, out: Option<&Path>) -> PathBuf {
    out.map(Path::to_path_buf)
        .unwrap_or_else(|| dataset_dir.to_path_buf())
}
