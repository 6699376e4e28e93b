//! Reconstruction-free flatness test.
//!
//! A flat presentation (printed photo, screen) induces an affine disparity
//! map between the two coded views. The score therefore: extracts both free
//! sparse views from the coded image, densifies them, measures disparity at
//! three probe points, fits the affine map those probes imply, projects the
//! left view through it, and takes the mean absolute difference against the
//! densified right view. Flat scenes fit their plane well and score LOW;
//! genuine 3D scenes leave residual structure the plane cannot explain.

use serde::{Deserialize, Serialize};

use crate::coding::{sparse_masks, CodedImage, CodingMask};
use crate::error::{Error, Result};
use crate::interp::{densify, DenseView};
use crate::stereo::{
    fit_affine_from_probes, local_disparity, warp_left_to_right, AffineDisparity, DisparityProbe,
    SearchRange,
};
use crate::Scalar;

/// How the pixelwise differences are aggregated into one score.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScoreNormalization {
    /// Mean absolute difference over the pixels covered by both views.
    #[default]
    MeanOverCovered,
}

/// Free parameters of the flatness test.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AntiSpoofConfig {
    /// Probe positions as (x, y) fractions of (width, height).
    pub probe_points: [[f64; 2]; 3],
    /// Odd SAD window side length in pixels.
    pub window: usize,
    /// Integer disparity search interval.
    pub search: SearchRange,
    /// Decision threshold in score units; set by calibration.
    pub threshold: Option<f64>,
    pub score_normalization: ScoreNormalization,
}

impl Default for AntiSpoofConfig {
    fn default() -> Self {
        Self {
            // A well-spread triangle over the face region.
            probe_points: [[0.3, 0.3], [0.7, 0.3], [0.5, 0.75]],
            window: 17,
            search: SearchRange::default(),
            threshold: None,
            score_normalization: ScoreNormalization::MeanOverCovered,
        }
    }
}

impl AntiSpoofConfig {
    pub fn validate(&self) -> Result<()> {
        let [p0, p1, p2] = self.probe_points;
        let area2 = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p1[1] - p0[1]) * (p2[0] - p0[0]);
        if area2.abs() < 1e-6 {
            return Err(Error::invalid("probe points must not be collinear"));
        }
        if self.window < 5 || self.window % 2 == 0 {
            return Err(Error::invalid("window must be odd and at least 5"));
        }
        if let Some(t) = self.threshold {
            if t.is_nan() || t < 0.0 {
                return Err(Error::invalid("threshold must be non-negative"));
            }
        }
        Ok(())
    }

    /// Probe pixel positions for a given image size.
    pub fn probe_pixels(&self, width: usize, height: usize) -> [(usize, usize); 3] {
        self.probe_points.map(|[rx, ry]| {
            let u = (rx * (width - 1) as f64).round() as usize;
            let v = (ry * (height - 1) as f64).round() as usize;
            (u, v)
        })
    }
}

/// Flatness score with its supporting measurements.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlatnessScore<T> {
    /// Mean absolute intensity difference over mutually covered pixels.
    pub score: T,
    /// Fraction of all pixels that entered the mean.
    pub covered_fraction: f64,
    pub probes: [DisparityProbe<T>; 3],
}

/// Classification outcome.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "genuine_3d")]
    Genuine3d,
    #[serde(rename = "spoof_flat")]
    SpoofFlat,
}

/// Decision record: verdict plus the evidence it was made on.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Decision<T> {
    pub verdict: Verdict,
    pub score: FlatnessScore<T>,
    pub threshold_used: T,
}

/// Mean absolute difference between the warped left view and the right view.
///
/// Only pixels covered by both the warp output and the right view enter the
/// mean. Returns the score and the covered fraction.
pub fn score_against_plane<T: Scalar>(
    dense_left: &DenseView<T>,
    dense_right: &DenseView<T>,
    disparity: &AffineDisparity<T>,
) -> Result<(T, f64)> {
    if !dense_left.image.same_dims(&dense_right.image) {
        return Err(Error::DimensionMismatch(
            "left/right dense views differ in size".into(),
        ));
    }
    let warped = warp_left_to_right(dense_left, disparity);
    let mut sum = T::zero();
    let mut count = 0usize;
    for v in 0..warped.image.height() {
        for u in 0..warped.image.width() {
            if warped.coverage.get(u, v) && dense_right.coverage.get(u, v) {
                sum += (warped.image.get(u, v) - dense_right.image.get(u, v)).abs();
                count += 1;
            }
        }
    }
    if count == 0 {
        return Err(Error::InsufficientData(
            "no pixel is covered by both views after warping".into(),
        ));
    }
    let total = warped.image.len();
    Ok((sum / T::of_usize(count), count as f64 / total as f64))
}

/// Runs the full flatness test on a coded capture.
///
/// Probe failures (flat texture, degenerate geometry) surface as errors so
/// callers can report "cannot score" instead of forcing a class.
pub fn flatness_score<T: Scalar>(
    coded: &CodedImage<T>,
    mask: &CodingMask,
    config: &AntiSpoofConfig,
) -> Result<FlatnessScore<T>> {
    config.validate()?;
    if coded.mask_id != mask.id() {
        return Err(Error::invalid(
            "coded image was captured through a different mask",
        ));
    }
    if coded.image.width() != mask.width() || coded.image.height() != mask.height() {
        return Err(Error::DimensionMismatch(
            "coded image and mask differ in size".into(),
        ));
    }

    let sparse = sparse_masks(mask);
    let left_sparse = crate::coding::extract_sparse_view(coded, &sparse.exclusive[0])?;
    let right_sparse = crate::coding::extract_sparse_view(coded, &sparse.exclusive[1])?;
    let dense_left = densify(&left_sparse)?;
    let dense_right = densify(&right_sparse)?;

    let pixels = config.probe_pixels(mask.width(), mask.height());
    let mut probes = [DisparityProbe {
        u: 0,
        v: 0,
        disparity: T::zero(),
        cost: T::zero(),
    }; 3];
    for (slot, (u, v)) in probes.iter_mut().zip(pixels) {
        *slot = local_disparity(
            &dense_left,
            &dense_right,
            u,
            v,
            config.window,
            config.search,
        )?;
    }

    let plane = fit_affine_from_probes(&probes)?;
    let (score, covered_fraction) = score_against_plane(&dense_left, &dense_right, &plane)?;

    Ok(FlatnessScore {
        score,
        covered_fraction,
        probes,
    })
}

/// Thresholds a score into a verdict. Ties reject: a score exactly at the
/// threshold is called a spoof, the safer outcome for an authenticator.
pub fn classify<T: Scalar>(score: &FlatnessScore<T>, threshold: T) -> Result<Decision<T>> {
    if !(threshold >= T::zero()) {
        return Err(Error::invalid("threshold must be non-negative"));
    }
    let verdict = if score.score <= threshold {
        Verdict::SpoofFlat
    } else {
        Verdict::Genuine3d
    };
    Ok(Decision {
        verdict,
        score: *score,
        threshold_used: threshold,
    })
}
