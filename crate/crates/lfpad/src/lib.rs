//! lfpad — coded light-field capture simulation and reconstruction-free
//! presentation attack detection.
//!
//! The library models a single grayscale sensor that captures two views at
//! once through a binary coding mask, recovers the "free" sparse per-view
//! samples, and decides whether a capture shows a genuine 3D scene or a flat
//! reproduction. The decision never reconstructs the light field: it fits an
//! affine disparity plane from three probed points and measures how well that
//! plane explains the second view.
//!
//! Pipeline stages, each in its own module:
//!
//! 1. [`coding`] — mask generation, two-view encoding, sparse-view extraction.
//! 2. [`interp`] — densification of sparse views by row-wise cubic interpolation.
//! 3. [`stereo`] — plane/disparity geometry, block matching, affine fit, warping.
//! 4. [`spoof`] — the flatness score and the genuine/spoof decision.
//! 5. [`metrics`] — EER calibration, ROC/AUC/ACER evaluation.
//! 6. [`scene`] — synthetic labeled captures (textured depth surfaces).
//! 7. [`dataset`] — on-disk dataset layout (PGM/PBM/JSON/CSV).
//!
//! All numeric code is generic over the scalar type (`f32` or `f64`) through
//! the [`Scalar`] trait; concrete aliases for the common types live at the
//! crate root.

use std::fmt;

use num_traits::{Float, FromPrimitive, NumAssignOps, ToPrimitive};

pub mod coding;
pub mod dataset;
pub mod error;
pub mod interp;
pub mod io;
pub mod metrics;
pub mod rng;
pub mod scene;
pub mod spoof;
pub mod stereo;
pub mod texture;

mod raster;

pub use error::{Error, Result};
pub use raster::{BitRaster, GrayImage, Raster};

/// Floating-point scalar for image intensities and geometry: f32 or f64.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + NumAssignOps + Send + Sync + fmt::Debug + fmt::Display + 'static
{
    /// Converts from f64 (exact for literals representable in the target type).
    #[inline]
    fn of(value: f64) -> Self {
        Self::from_f64(value).expect("f64 -> scalar")
    }

    #[inline]
    fn of_usize(value: usize) -> Self {
        Self::from_usize(value).expect("usize -> scalar")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar -> f64")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Single-precision aliases.
pub type GrayImage32 = GrayImage<f32>;
pub type DenseView32 = interp::DenseView<f32>;
pub type AffineDisparity32 = stereo::AffineDisparity<f32>;

/// Double-precision aliases.
pub type GrayImage64 = GrayImage<f64>;
pub type DenseView64 = interp::DenseView<f64>;
pub type AffineDisparity64 = stereo::AffineDisparity<f64>;
