//! Presentation-attack-detection metrics.
//!
//! Scores follow the flatness convention: spoofs score LOW, so a capture is
//! called a spoof when `score <= threshold`. Under that rule
//! `APCER(t)` is the fraction of spoofs scoring above `t` (attacks accepted)
//! and `BPCER(t)` the fraction of genuine captures scoring at or below `t`
//! (bona fide rejected). ACER is their average; EER is the operating point
//! where they meet.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;
use crate::Scalar;

/// One operating point of the ROC sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub threshold: f64,
    pub apcer: f64,
    pub one_minus_bpcer: f64,
}

/// Per-class score histograms over a common binning.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoreHistogram {
    /// `bins + 1` edges spanning the pooled score range.
    pub bin_edges: Vec<f64>,
    pub genuine: Vec<usize>,
    pub spoof: Vec<usize>,
}

/// Full evaluation artifact: headline numbers, ROC sweep, histograms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub eer: f64,
    pub threshold: f64,
    pub acer: f64,
    pub auc: f64,
    pub roc: Vec<RocPoint>,
    pub histogram: ScoreHistogram,
}

/// The headline numbers alone (the report.json payload).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportSummary {
    pub eer: f64,
    pub threshold: f64,
    pub acer: f64,
    pub auc: f64,
}

impl EvalReport {
    pub fn summary(&self) -> ReportSummary {
        ReportSummary {
            eer: self.eer,
            threshold: self.threshold,
            acer: self.acer,
            auc: self.auc,
        }
    }
}

const HISTOGRAM_BINS: usize = 50;

fn check_scores<T: Scalar>(name: &str, scores: &[T]) -> Result<()> {
    if scores.is_empty() {
        return Err(Error::invalid(format!("{name} score list is empty")));
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::invalid(format!("{name} scores must be finite")));
    }
    Ok(())
}

fn sorted<T: Scalar>(scores: &[T]) -> Vec<T> {
    let mut out = scores.to_vec();
    out.sort_by(|a, b| a.partial_cmp(b).expect("finite scores"));
    out
}

/// Count of entries `<= t` in an ascending slice.
fn count_le<T: Scalar>(ascending: &[T], t: T) -> usize {
    ascending.partition_point(|&s| s <= t)
}

/// Fraction of spoofs accepted as genuine at threshold `t`.
fn apcer_at<T: Scalar>(spoof_sorted: &[T], t: T) -> f64 {
    let above = spoof_sorted.len() - count_le(spoof_sorted, t);
    above as f64 / spoof_sorted.len() as f64
}

/// Fraction of genuine captures rejected as spoofs at threshold `t`.
fn bpcer_at<T: Scalar>(genuine_sorted: &[T], t: T) -> f64 {
    count_le(genuine_sorted, t) as f64 / genuine_sorted.len() as f64
}

/// ACER of the given score lists at a fixed threshold.
pub fn acer_at<T: Scalar>(genuine: &[T], spoof: &[T], threshold: T) -> Result<f64> {
    check_scores("genuine", genuine)?;
    check_scores("spoof", spoof)?;
    let g = sorted(genuine);
    let s = sorted(spoof);
    Ok((apcer_at(&s, threshold) + bpcer_at(&g, threshold)) / 2.0)
}

/// Candidate thresholds: midpoints between consecutive distinct scores of
/// the merged set (the single distinct score itself in the degenerate case).
fn threshold_candidates<T: Scalar>(genuine_sorted: &[T], spoof_sorted: &[T]) -> Vec<T> {
    let mut merged: Vec<T> = genuine_sorted
        .iter()
        .chain(spoof_sorted.iter())
        .copied()
        .collect();
    merged.sort_by(|a, b| a.partial_cmp(b).expect("finite scores"));
    merged.dedup();
    if merged.len() == 1 {
        return merged;
    }
    merged
        .windows(2)
        .map(|w| (w[0] + w[1]) / T::of(2.0))
        .collect()
}

/// Finds the threshold where the two error rates meet.
///
/// Scans the candidate thresholds in ascending order for the smallest
/// |APCER - BPCER| and returns that threshold with the EER, the mean of the
/// two rates there. Ties break toward the smaller threshold.
pub fn calibrate_threshold<T: Scalar>(genuine: &[T], spoof: &[T]) -> Result<(T, f64)> {
    check_scores("genuine", genuine)?;
    check_scores("spoof", spoof)?;
    let g = sorted(genuine);
    let s = sorted(spoof);

    let mut best_t = T::zero();
    let mut best_gap = f64::INFINITY;
    let mut best_eer = 0.5;
    for t in threshold_candidates(&g, &s) {
        let apcer = apcer_at(&s, t);
        let bpcer = bpcer_at(&g, t);
        let gap = (apcer - bpcer).abs();
        if gap < best_gap {
            best_gap = gap;
            best_t = t;
            best_eer = (apcer + bpcer) / 2.0;
        }
    }
    Ok((best_t, best_eer))
}

/// Full evaluation: EER threshold, ACER at that threshold, the ROC sweep
/// with trapezoidal AUC, and fixed-bin score histograms.
pub fn evaluate<T: Scalar>(genuine: &[T], spoof: &[T]) -> Result<EvalReport> {
    let (threshold, eer) = calibrate_threshold(genuine, spoof)?;
    let g = sorted(genuine);
    let s = sorted(spoof);
    let acer = (apcer_at(&s, threshold) + bpcer_at(&g, threshold)) / 2.0;

    // ROC at every distinct score, plus the accept-everything sentinel.
    let mut merged: Vec<T> = g.iter().chain(s.iter()).copied().collect();
    merged.sort_by(|a, b| a.partial_cmp(b).expect("finite scores"));
    merged.dedup();
    let mut roc = Vec::with_capacity(merged.len() + 1);
    roc.push(RocPoint {
        threshold: f64::NEG_INFINITY,
        apcer: 1.0,
        one_minus_bpcer: 1.0,
    });
    for &t in &merged {
        roc.push(RocPoint {
            threshold: t.as_f64(),
            apcer: apcer_at(&s, t),
            one_minus_bpcer: 1.0 - bpcer_at(&g, t),
        });
    }

    // Trapezoid over x = APCER; the sweep above runs from (1,1) down to (0,0).
    // Clamped: summation rounding must not push the probability past 1.
    let mut auc = 0.0;
    for pair in roc.windows(2) {
        let (hi, lo) = (pair[0], pair[1]);
        auc += (hi.apcer - lo.apcer) * (hi.one_minus_bpcer + lo.one_minus_bpcer) / 2.0;
    }
    let auc = auc.clamp(0.0, 1.0);

    let histogram = build_histogram(&g, &s);

    Ok(EvalReport {
        eer,
        threshold: threshold.as_f64(),
        acer,
        auc,
        roc,
        histogram,
    })
}

fn build_histogram<T: Scalar>(genuine_sorted: &[T], spoof_sorted: &[T]) -> ScoreHistogram {
    let lo = genuine_sorted[0].min(spoof_sorted[0]).as_f64();
    let hi = genuine_sorted[genuine_sorted.len() - 1]
        .max(spoof_sorted[spoof_sorted.len() - 1])
        .as_f64();
    let width = if hi > lo {
        (hi - lo) / HISTOGRAM_BINS as f64
    } else {
        1.0
    };
    let bin_edges: Vec<f64> = (0..=HISTOGRAM_BINS)
        .map(|i| lo + width * i as f64)
        .collect();
    let bin_of = |score: f64| -> usize {
        (((score - lo) / width) as usize).min(HISTOGRAM_BINS - 1)
    };
    let mut genuine = vec![0usize; HISTOGRAM_BINS];
    for &x in genuine_sorted {
        genuine[bin_of(x.as_f64())] += 1;
    }
    let mut spoof = vec![0usize; HISTOGRAM_BINS];
    for &x in spoof_sorted {
        spoof[bin_of(x.as_f64())] += 1;
    }
    ScoreHistogram {
        bin_edges,
        genuine,
        spoof,
    }
}

/// Parameters of the repeated random-split protocol.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HoldoutParams {
    /// Fraction of each class held out for testing.
    pub test_fraction: f64,
    pub repeats: usize,
    pub seed: u64,
}

impl Default for HoldoutParams {
    fn default() -> Self {
        Self {
            test_fraction: 0.25,
            repeats: 50,
            seed: 0,
        }
    }
}

/// Outcome of the repeated-holdout protocol.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HoldoutReport {
    pub repeats: usize,
    pub test_fraction: f64,
    pub seed: u64,
    pub mean_acer: f64,
    /// Per-repeat test ACER, in repeat order.
    pub acers: Vec<f64>,
}

/// Repeats: shuffle each class, hold out a stratified test fraction,
/// calibrate the threshold at EER on the train part, and measure ACER on the
/// held-out part. Reports the mean over all repeats.
pub fn holdout_acer<T: Scalar>(
    genuine: &[T],
    spoof: &[T],
    params: &HoldoutParams,
) -> Result<HoldoutReport> {
    check_scores("genuine", genuine)?;
    check_scores("spoof", spoof)?;
    if !(params.test_fraction > 0.0 && params.test_fraction < 1.0) {
        return Err(Error::invalid("test fraction must lie in (0, 1)"));
    }
    if params.repeats == 0 {
        return Err(Error::invalid("at least one repeat is required"));
    }
    let split_at = |n: usize| -> Result<usize> {
        let test = ((n as f64 * params.test_fraction).round() as usize).clamp(1, n - 1);
        if n < 2 {
            return Err(Error::InsufficientData(
                "each class needs at least 2 scores to split".into(),
            ));
        }
        Ok(n - test)
    };
    let g_train_len = split_at(genuine.len())?;
    let s_train_len = split_at(spoof.len())?;

    let mut acers = Vec::with_capacity(params.repeats);
    let mut genuine_pool = genuine.to_vec();
    let mut spoof_pool = spoof.to_vec();
    for repeat in 0..params.repeats {
        let mut rng = rng::seeded(rng::derive_seed(params.seed, repeat as u64));
        rng::shuffle(&mut rng, &mut genuine_pool);
        rng::shuffle(&mut rng, &mut spoof_pool);
        let (g_train, g_test) = genuine_pool.split_at(g_train_len);
        let (s_train, s_test) = spoof_pool.split_at(s_train_len);
        let (threshold, _) = calibrate_threshold(g_train, s_train)?;
        acers.push(acer_at(g_test, s_test, threshold)?);
    }
    let mean_acer = acers.iter().sum::<f64>() / acers.len() as f64;

    Ok(HoldoutReport {
        repeats: params.repeats,
        test_fraction: params.test_fraction,
        seed: params.seed,
        mean_acer,
        acers,
    })
}
