//! Acceptance suite.
//!
//! Each test checks one release criterion end to end at its stated tolerance
//! and prints a `criterion N ... PASS` line (visible with `--nocapture`).
//! Run with: `cargo test -p lfpad-cli --test acceptance -- --nocapture`

use std::fs;
use std::process::Command;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use lfpad::coding::{encode, generate_mask, sparse_masks, MaskMode, SparseView};
use lfpad::interp::densify;
use lfpad::metrics::{self, HoldoutParams};
use lfpad::rng;
use lfpad::scene::{generate_capture, CaptureLabel, DatasetParams, LabeledCapture};
use lfpad::spoof::{flatness_score, AntiSpoofConfig};
use lfpad::stereo::{
    fit_affine_from_probes, plane_to_affine, AffineDisparity, Calibration, DisparityProbe,
    Plane3D, SearchRange,
};
use lfpad::texture::fbm_texture;
use lfpad::{BitRaster, GrayImage};

/// Frozen regression bound for the 25%-density sinusoid oracle (measured
/// 5.47e-3 on the reference seed).
const SINUSOID_MAE_BOUND_25: f64 = 6.0e-3;

fn assert_budget(name: &str, elapsed: Duration, budget: Duration) {
    assert!(
        elapsed <= budget,
        "{name} took {elapsed:?}, over the {budget:?} budget"
    );
}

fn spoof_config() -> AntiSpoofConfig {
    AntiSpoofConfig {
        search: SearchRange::new(-2, 30),
        ..AntiSpoofConfig::default()
    }
}

/// Noise image on the 8-bit grid, mimicking sensor output.
fn noise_view(width: usize, height: usize, seed: u64) -> GrayImage<f64> {
    GrayImage::from_fn(width, height, |u, v| {
        let h = rng::splitmix64(seed ^ ((u as u64) << 32 | v as u64));
        (h % 256) as f64 / 255.0
    })
}

#[test]
fn criterion_1_equation_exactness() {
    let start = Instant::now();

    // Coding round trip: every single-view pixel recovers its view sample
    // bit-exactly, on 20 random 256x256 view pairs.
    let mut checked = 0usize;
    for trial in 0..20u64 {
        let view0 = noise_view(256, 256, rng::derive_seed(90, trial));
        let view1 = noise_view(256, 256, rng::derive_seed(91, trial));
        let mask = generate_mask(256, 256, 0.5, MaskMode::Independent, 0, trial).unwrap();
        let coded = encode(&view0, &view1, &mask).unwrap();
        let sm = sparse_masks(&mask);
        for (i, view) in [&view0, &view1].into_iter().enumerate() {
            let sparse = lfpad::coding::extract_sparse_view(&coded, &sm.exclusive[i]).unwrap();
            for (u, v, value) in sparse.values.pixels() {
                if sm.exclusive[i].get(u, v) {
                    assert_eq!(value, view.get(u, v), "trial {trial} view {i} at ({u},{v})");
                    checked += 1;
                }
            }
        }
    }

    // Plane-induced disparity maps are affine: second differences vanish.
    // Dyadic-rational planes keep all float products exact, so the check is
    // bitwise zero; arbitrary planes stay within accumulated rounding.
    let calib = Calibration {
        baseline_m: 1.0,
        focal_px: 1024.0,
        principal_u: 512.0,
        principal_v: 256.0,
    };
    for (a, b, c) in [
        (0.5, -0.25, 2.0),
        (0.0, 0.0, 4.0),
        (-0.125, 0.5, 8.0),
        (0.75, 0.125, 2.0),
    ] {
        let map = plane_to_affine(
            &Plane3D {
                slope_x: a,
                slope_y: b,
                depth_m: c,
            },
            &calib,
        )
        .unwrap();
        for v in 1..127usize {
            for u in 1..127usize {
                let ddu = map.eval_px(u + 1, v) - 2.0 * map.eval_px(u, v) + map.eval_px(u - 1, v);
                let ddv = map.eval_px(u, v + 1) - 2.0 * map.eval_px(u, v) + map.eval_px(u, v - 1);
                assert_eq!(ddu, 0.0, "du at ({u},{v}) for plane ({a},{b},{c})");
                assert_eq!(ddv, 0.0, "dv at ({u},{v}) for plane ({a},{b},{c})");
            }
        }
    }
    let mut r = rng::seeded(92);
    for _ in 0..20 {
        let plane = Plane3D {
            slope_x: rng::next_range_f64(&mut r, -0.2, 0.2),
            slope_y: rng::next_range_f64(&mut r, -0.2, 0.2),
            depth_m: rng::next_range_f64(&mut r, 0.3, 3.0),
        };
        let map = plane_to_affine(&plane, &calib).unwrap();
        for v in 1..63usize {
            for u in 1..63usize {
                let ddu = map.eval_px(u + 1, v) - 2.0 * map.eval_px(u, v) + map.eval_px(u - 1, v);
                assert!(ddu.abs() < 1e-12, "{ddu} at ({u},{v})");
            }
        }
    }

    // Three-probe fit reproduces planted affine coefficients to 1e-9.
    for _ in 0..20 {
        let truth = AffineDisparity::new(
            rng::next_range_f64(&mut r, -0.05, 0.05),
            rng::next_range_f64(&mut r, -0.05, 0.05),
            rng::next_range_f64(&mut r, -25.0, 25.0),
        );
        let probes = [(150usize, 150usize), (360, 160), (250, 380)].map(|(u, v)| DisparityProbe {
            u,
            v,
            disparity: truth.eval_px(u, v),
            cost: 0.0,
        });
        let fit = fit_affine_from_probes(&probes).unwrap();
        assert!((fit.u_slope - truth.u_slope).abs() < 1e-9);
        assert!((fit.v_slope - truth.v_slope).abs() < 1e-9);
        assert!((fit.offset - truth.offset).abs() < 1e-9);
    }

    let elapsed = start.elapsed();
    assert_budget("criterion 1", elapsed, Duration::from_secs(10));
    println!(
        "criterion 1 (equation exactness): PASS — {checked} single-view pixels recovered \
         bit-exactly, affine maps exact, probe fits within 1e-9 ({elapsed:?})"
    );
}

#[test]
fn criterion_2_density_statistics() {
    let start = Instant::now();
    let mask = generate_mask(1080, 1400, 0.5, MaskMode::Independent, 0, 20240811).unwrap();
    let sm = sparse_masks(&mask);
    let expected = 540.0 * 700.0;
    let mut counts = [0usize; 2];
    for view in 0..2 {
        let count = sm.exclusive[view].count_ones();
        counts[view] = count;
        assert!(
            (count as f64 - expected).abs() < expected * 0.01,
            "view {view}: {count} single-view pixels vs expected {expected} +/- 1%"
        );
    }
    let elapsed = start.elapsed();
    assert_budget("criterion 2", elapsed, Duration::from_secs(5));
    println!(
        "criterion 2 (sparse density): PASS — per-view counts {counts:?} within 1% of 378000 \
         ({elapsed:?})"
    );
}

#[test]
fn criterion_3_flat_vs_genuine_separation() {
    let start = Instant::now();
    let master_seed = 30;
    let mut genuine_params = DatasetParams::new(512, 512, master_seed).with_counts(100, 0, 0);
    // Bump fields only, with at least 6 px of disparity contrast.
    genuine_params.distributions.face_contrast_px = [6.0, 12.0];
    genuine_params.distributions.layered_every = 0;
    let flat_params = DatasetParams::new(512, 512, master_seed).with_counts(0, 100, 0);

    // Same master seed and index give each pair identical texture and mask.
    let pairs: Vec<(f64, f64)> = (0..100usize)
        .into_par_iter()
        .map(|index| {
            let genuine: LabeledCapture<f64> = generate_capture(&genuine_params, index).unwrap();
            let flat: LabeledCapture<f64> = generate_capture(&flat_params, index).unwrap();
            let g = flatness_score(&genuine.coded, &genuine.mask, &spoof_config()).unwrap();
            let f = flatness_score(&flat.coded, &flat.mask, &spoof_config()).unwrap();
            (g.score, f.score)
        })
        .collect();

    let ordered = pairs.iter().filter(|(g, f)| f < g).count();
    assert!(
        ordered >= 95,
        "flat < genuine in only {ordered}/100 matched pairs"
    );

    let mut genuine: Vec<f64> = pairs.iter().map(|(g, _)| *g).collect();
    let mut flat: Vec<f64> = pairs.iter().map(|(_, f)| *f).collect();
    genuine.sort_by(|a, b| a.partial_cmp(b).unwrap());
    flat.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median_gap = genuine[50] - flat[50];
    let flat_iqr = flat[75] - flat[25];
    assert!(
        median_gap >= 3.0 * flat_iqr,
        "median gap {median_gap} under 3x the flat IQR {flat_iqr}"
    );

    let elapsed = start.elapsed();
    assert_budget("criterion 3", elapsed, Duration::from_secs(300));
    println!(
        "criterion 3 (separation): PASS — {ordered}/100 pairs ordered, median gap {median_gap:.4} \
         = {:.1}x flat IQR ({elapsed:?})",
        median_gap / flat_iqr
    );
}

#[test]
fn criterion_4_acer_protocol() {
    let start = Instant::now();
    let params = DatasetParams::new(512, 512, 20240404).with_counts(200, 100, 100);

    let scored: Vec<(CaptureLabel, f64)> = (0..params.total())
        .into_par_iter()
        .map(|index| {
            let capture: LabeledCapture<f64> = generate_capture(&params, index).unwrap();
            let score = flatness_score(&capture.coded, &capture.mask, &spoof_config()).unwrap();
            (capture.label, score.score)
        })
        .collect();

    let class = |label: CaptureLabel| -> Vec<f64> {
        scored
            .iter()
            .filter(|(l, _)| *l == label)
            .map(|(_, s)| *s)
            .collect()
    };
    let genuine = class(CaptureLabel::Genuine3d);
    let flat = class(CaptureLabel::SpoofFlat);
    let curved = class(CaptureLabel::SpoofCurved);
    let pooled: Vec<f64> = flat.iter().chain(curved.iter()).copied().collect();

    let protocol = HoldoutParams {
        test_fraction: 0.25,
        repeats: 50,
        seed: 51,
    };
    let report = metrics::holdout_acer(&genuine, &pooled, &protocol).unwrap();
    assert!(
        report.mean_acer <= 0.05,
        "pooled mean ACER {} over 0.05",
        report.mean_acer
    );
    let curved_report = metrics::holdout_acer(&genuine, &curved, &protocol).unwrap();
    assert!(
        curved_report.mean_acer <= 0.15,
        "curved-only mean ACER {} over 0.15",
        curved_report.mean_acer
    );

    let elapsed = start.elapsed();
    assert_budget("criterion 4", elapsed, Duration::from_secs(600));
    println!(
        "criterion 4 (ACER protocol): PASS — mean ACER {:.4} (<= 0.05) pooled, {:.4} (<= 0.15) \
         curved-only, 50 random 75/25 splits ({elapsed:?})",
        report.mean_acer, curved_report.mean_acer
    );
}

#[test]
fn criterion_5_metric_layer_oracle() {
    let start = Instant::now();
    // Box-Muller Gaussians: genuine N(0.5, 0.1), spoof N(0.3, 0.1).
    let normal = |n: usize, mean: f64, sd: f64, seed: u64| -> Vec<f64> {
        let mut r = rng::seeded(seed);
        (0..n)
            .map(|_| {
                let u1 = 1.0 - rng::next_unit_f64(&mut r);
                let u2 = rng::next_unit_f64(&mut r);
                mean + sd * (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
            })
            .collect()
    };
    let genuine = normal(400, 0.5, 0.1, 55);
    let spoof = normal(400, 0.3, 0.1, 56);

    // Closed forms for equal-variance Gaussians one sigma either side of the
    // crossing: EER = Phi(-1), AUC = Phi(sqrt 2).
    let (_, eer) = metrics::calibrate_threshold(&genuine, &spoof).unwrap();
    assert!((eer - 0.1587).abs() <= 0.03, "eer {eer} vs analytic 0.1587");
    let report = metrics::evaluate(&genuine, &spoof).unwrap();
    assert!(
        (report.auc - 0.92135).abs() <= 0.03,
        "auc {} vs analytic 0.92135",
        report.auc
    );

    let elapsed = start.elapsed();
    assert_budget("criterion 5", elapsed, Duration::from_secs(1));
    println!(
        "criterion 5 (metric oracle): PASS — eer {eer:.4} vs 0.1587, auc {:.4} vs 0.9214 \
         ({elapsed:?})",
        report.auc
    );
}

#[test]
fn criterion_6_parallel_determinism() {
    let start = Instant::now();
    let tmp = tempfile::tempdir().unwrap();
    let mut reports = Vec::new();
    let mut scores = Vec::new();
    for jobs in ["1", "8"] {
        let root = tmp.path().join(format!("jobs{jobs}"));
        let ds = root.join("ds");
        let run = |args: &[&str]| {
            let out = Command::new(env!("CARGO_BIN_EXE_antispoof"))
                .args(args)
                .output()
                .expect("run antispoof");
            assert!(
                out.status.success(),
                "antispoof {args:?}: {}",
                String::from_utf8_lossy(&out.stderr)
            );
        };
        run(&[
            "gen",
            "--out",
            ds.to_str().unwrap(),
            "--genuine",
            "12",
            "--flat",
            "6",
            "--curved",
            "6",
            "--width",
            "256",
            "--height",
            "256",
            "--seed",
            "606",
            "--jobs",
            jobs,
        ]);
        run(&[
            "score",
            "--dataset",
            ds.to_str().unwrap(),
            "--jobs",
            jobs,
        ]);
        run(&[
            "evaluate",
            "--scores",
            ds.join("scores.csv").to_str().unwrap(),
            "--out",
            root.join("eval").to_str().unwrap(),
            "--seed",
            "606",
            "--jobs",
            jobs,
        ]);
        reports.push(fs::read(root.join("eval").join("report.json")).unwrap());
        scores.push(fs::read(ds.join("scores.csv")).unwrap());
    }
    assert_eq!(scores[0], scores[1], "scores.csv differs between job counts");
    assert_eq!(
        reports[0], reports[1],
        "report.json differs between job counts"
    );

    let elapsed = start.elapsed();
    println!(
        "criterion 6 (determinism): PASS — report.json byte-identical for --jobs 1 and --jobs 8 \
         ({elapsed:?})"
    );
}

#[test]
fn criterion_7_interpolation_contract() {
    let start = Instant::now();

    let sample = |density: f64, seed: u64, f: &dyn Fn(usize, usize) -> f64| -> SparseView<f64> {
        let mut r = rng::seeded(seed);
        let valid = BitRaster::from_fn(512, 512, |_, _| rng::next_bernoulli(&mut r, density));
        let values = GrayImage::from_fn(512, 512, |u, v| if valid.get(u, v) { f(u, v) } else { 0.0 });
        SparseView { values, valid }
    };

    // Constants reproduce exactly.
    let constant = sample(0.25, 70, &|_, _| 0.6);
    let dense = densify(&constant).unwrap();
    assert!(dense.image.data().iter().all(|&x| x == 0.6));

    // Per-row linear ramps reproduce to 1e-9 inside coverage.
    let ramp = |u: usize, _: usize| u as f64 / 511.0;
    let dense = densify(&sample(0.25, 71, &ramp)).unwrap();
    for (u, v, value) in dense.image.pixels() {
        if dense.coverage.get(u, v) {
            assert!(
                (value - ramp(u, v)).abs() < 1e-9,
                "ramp off by {} at ({u},{v})",
                (value - ramp(u, v)).abs()
            );
        }
    }

    // Sinusoid oracle at 25% density: the truth is the analytic surface, and
    // the measured error must not regress past the frozen bound.
    let sinusoid = |u: usize, v: usize| {
        let x = u as f64 * (std::f64::consts::TAU / 64.0);
        let y = v as f64 * (std::f64::consts::TAU / 96.0);
        0.5 + 0.35 * x.sin() * y.cos()
    };
    let dense = densify(&sample(0.25, 901, &sinusoid)).unwrap();
    let mut sum = 0.0;
    let mut count = 0usize;
    for (u, v, value) in dense.image.pixels() {
        if dense.coverage.get(u, v) {
            sum += (value - sinusoid(u, v)).abs();
            count += 1;
        }
    }
    let mae = sum / count as f64;
    assert!(
        mae <= SINUSOID_MAE_BOUND_25,
        "sinusoid oracle MAE {mae} regressed past {SINUSOID_MAE_BOUND_25}"
    );

    let elapsed = start.elapsed();
    println!(
        "criterion 7 (interpolation contract): PASS — constants exact, ramps < 1e-9, sinusoid \
         MAE {mae:.3e} <= {SINUSOID_MAE_BOUND_25:.1e} ({elapsed:?})"
    );
}

#[test]
fn criterion_8_out_of_scope_statement() {
    // Face-verification network accuracies are intentionally not reproduced
    // anywhere in this artifact: the evaluation surface carries only the
    // anti-spoofing metrics.
    let report = metrics::evaluate(&[0.5f64, 0.6], &[0.1f64, 0.2]).unwrap();
    let value = serde_json::to_value(report.summary()).unwrap();
    let mut keys: Vec<&str> = value.as_object().unwrap().keys().map(String::as_str).collect();
    keys.sort_unstable();
    assert_eq!(keys, ["acer", "auc", "eer", "threshold"]);
    println!(
        "criterion 8 (out of scope): PASS — reports carry only anti-spoofing metrics; \
         no verification accuracies are claimed or reproduced"
    );
}
