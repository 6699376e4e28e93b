//! Rectified two-view geometry.
//!
//! A planar 3D surface induces a disparity map that is affine in the image
//! coordinates, so three local disparity measurements pin down the whole map.
//! This module holds that derivation, the SAD block matcher used for the
//! local measurements, the three-point affine fit, and the disparity-driven
//! horizontal warp that projects the left view onto the right.
//!
//! Sign convention: disparity is added to the left-view column to land on
//! right-view content, i.e. `right(u, v) = left(u + d(u, v), v)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interp::DenseView;
use crate::raster::{BitRaster, GrayImage, Raster};
use crate::Scalar;

/// Rectified stereo calibration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Calibration<T> {
    /// Camera baseline in meters.
    pub baseline_m: T,
    /// Pixel focal length.
    pub focal_px: T,
    /// Principal point column.
    pub principal_u: T,
    /// Principal point row.
    pub principal_v: T,
}

impl<T: Scalar> Calibration<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.baseline_m > T::zero()) || !(self.focal_px > T::zero()) {
            return Err(Error::invalid(
                "baseline and focal length must be positive",
            ));
        }
        Ok(())
    }

    pub fn cast<U: Scalar>(&self) -> Calibration<U> {
        Calibration {
            baseline_m: U::of(self.baseline_m.as_f64()),
            focal_px: U::of(self.focal_px.as_f64()),
            principal_u: U::of(self.principal_u.as_f64()),
            principal_v: U::of(self.principal_v.as_f64()),
        }
    }
}

/// Plane `c = a x + b y + z` in camera space: two dimensionless slopes and
/// the depth intercept in meters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Plane3D<T> {
    pub slope_x: T,
    pub slope_y: T,
    pub depth_m: T,
}

/// Affine disparity map `d(u, v) = u_slope * u + v_slope * v + offset`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineDisparity<T> {
    pub u_slope: T,
    pub v_slope: T,
    pub offset: T,
}

impl<T: Scalar> AffineDisparity<T> {
    pub fn new(u_slope: T, v_slope: T, offset: T) -> Self {
        Self {
            u_slope,
            v_slope,
            offset,
        }
    }

    pub fn constant(offset: T) -> Self {
        Self::new(T::zero(), T::zero(), offset)
    }

    #[inline]
    pub fn eval(&self, u: T, v: T) -> T {
        self.u_slope * u + self.v_slope * v + self.offset
    }

    #[inline]
    pub fn eval_px(&self, u: usize, v: usize) -> T {
        self.eval(T::of_usize(u), T::of_usize(v))
    }
}

/// One local disparity measurement.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DisparityProbe<T> {
    pub u: usize,
    pub v: usize,
    /// Horizontal displacement at the SAD optimum, subpixel refined.
    pub disparity: T,
    /// Optimal SAD per window pixel.
    pub cost: T,
}

/// Inclusive integer disparity search interval.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchRange {
    pub min_px: i32,
    pub max_px: i32,
}

impl SearchRange {
    pub fn new(min_px: i32, max_px: i32) -> Self {
        Self { min_px, max_px }
    }

    pub fn symmetric(radius_px: i32) -> Self {
        Self::new(-radius_px, radius_px)
    }
}

impl Default for SearchRange {
    fn default() -> Self {
        Self::symmetric(32)
    }
}

/// Disparity map of a 3D plane under rectified stereo.
///
/// With the plane `c = a x + b y + z` and the standard pinhole relations the
/// disparity at pixel `(u, v)` is
/// `(a B / c) u + (b B / c) v + (B / c)(f_u - a u0 - b v0)`.
pub fn plane_to_affine<T: Scalar>(
    plane: &Plane3D<T>,
    calib: &Calibration<T>,
) -> Result<AffineDisparity<T>> {
    if plane.depth_m == T::zero() {
        return Err(Error::DegeneratePlane);
    }
    let ratio = calib.baseline_m / plane.depth_m;
    Ok(AffineDisparity {
        u_slope: plane.slope_x * ratio,
        v_slope: plane.slope_y * ratio,
        offset: ratio
            * (calib.focal_px
                - plane.slope_x * calib.principal_u
                - plane.slope_y * calib.principal_v),
    })
}

/// Measures the horizontal displacement at `(u, v)` by SAD block matching.
///
/// The right-view window at `(u, v)` is the reference; the left view is
/// sampled at `(u + d, v)` for integer `d` across the search range, and the
/// integer optimum is refined by a parabola through its two neighbors.
pub fn local_disparity<T: Scalar>(
    left: &DenseView<T>,
    right: &DenseView<T>,
    u: usize,
    v: usize,
    window: usize,
    search: SearchRange,
) -> Result<DisparityProbe<T>> {
    if !left.image.same_dims(&right.image) {
        return Err(Error::DimensionMismatch(
            "left/right view dimensions differ".into(),
        ));
    }
    if window < 5 || window % 2 == 0 {
        return Err(Error::invalid(format!(
            "matching window must be odd and at least 5, got {window}"
        )));
    }
    if search.min_px > search.max_px {
        return Err(Error::invalid("empty disparity search range"));
    }

    let (width, height) = left.image.dims();
    let half = (window / 2) as i64;
    let (ui, vi) = (u as i64, v as i64);
    let in_height = vi - half >= 0 && vi + half < height as i64;
    let right_ok = ui - half >= 0 && ui + half < width as i64;
    let left_lo = ui + search.min_px as i64 - half;
    let left_hi = ui + search.max_px as i64 + half;
    let left_ok = left_lo >= 0 && left_hi < width as i64;
    if !(in_height && right_ok && left_ok) {
        return Err(Error::OutOfBounds(format!(
            "window {window} at ({u},{v}) with search {}..{} leaves the {width}x{height} image",
            search.min_px, search.max_px
        )));
    }

    let n_offsets = (search.max_px - search.min_px + 1) as usize;
    let mut costs = Vec::with_capacity(n_offsets);
    for step in 0..n_offsets {
        let d = search.min_px as i64 + step as i64;
        let mut sad = T::zero();
        for dv in -half..=half {
            let row_r = right.image.row((vi + dv) as usize);
            let row_l = left.image.row((vi + dv) as usize);
            for du in -half..=half {
                let r = row_r[(ui + du) as usize];
                let l = row_l[(ui + d + du) as usize];
                sad += (r - l).abs();
            }
        }
        costs.push(sad);
    }

    let mut best = 0usize;
    for (i, &c) in costs.iter().enumerate() {
        if c < costs[best] {
            best = i;
        }
    }
    if costs.iter().all(|&c| c == costs[0]) {
        return Err(Error::AmbiguousMatch(format!(
            "flat cost curve at ({u},{v}); the neighborhood has no texture"
        )));
    }

    // Parabola through the costs around the integer optimum.
    let mut disparity = T::of((search.min_px + best as i32) as f64);
    if best > 0 && best + 1 < costs.len() {
        let (lo, mid, hi) = (costs[best - 1], costs[best], costs[best + 1]);
        let denom = lo - T::of(2.0) * mid + hi;
        if denom > T::zero() {
            let half_unit = T::of(0.5);
            let shift = (half_unit * (lo - hi) / denom)
                .max(-half_unit)
                .min(half_unit);
            disparity = disparity + shift;
        }
    }

    let area = T::of_usize(window * window);
    Ok(DisparityProbe {
        u,
        v,
        disparity,
        cost: costs[best] / area,
    })
}

/// Solves the 3x3 system mapping three probe positions to their disparities.
pub fn fit_affine_from_probes<T: Scalar>(
    probes: &[DisparityProbe<T>; 3],
) -> Result<AffineDisparity<T>> {
    let u: Vec<T> = probes.iter().map(|p| T::of_usize(p.u)).collect();
    let v: Vec<T> = probes.iter().map(|p| T::of_usize(p.v)).collect();
    let d: Vec<T> = probes.iter().map(|p| p.disparity).collect();

    let det = u[0] * (v[1] - v[2]) - v[0] * (u[1] - u[2]) + (u[1] * v[2] - u[2] * v[1]);
    let span = u
        .iter()
        .chain(v.iter())
        .fold(T::one(), |m, &x| m.max(x.abs()));
    if det.abs() < T::of(1e-9) * span * span {
        return Err(Error::DegenerateProbes(format!(
            "probe positions ({},{}), ({},{}), ({},{}) are collinear",
            probes[0].u, probes[0].v, probes[1].u, probes[1].v, probes[2].u, probes[2].v
        )));
    }

    let u_slope =
        (d[0] * (v[1] - v[2]) - v[0] * (d[1] - d[2]) + (d[1] * v[2] - d[2] * v[1])) / det;
    let v_slope =
        (u[0] * (d[1] - d[2]) - d[0] * (u[1] - u[2]) + (u[1] * d[2] - u[2] * d[1])) / det;
    let offset = (u[0] * (v[1] * d[2] - v[2] * d[1]) - v[0] * (u[1] * d[2] - u[2] * d[1])
        + d[0] * (u[1] * v[2] - u[2] * v[1]))
        / det;

    Ok(AffineDisparity {
        u_slope,
        v_slope,
        offset,
    })
}

/// Projects the left view onto the right-view grid through a disparity map.
///
/// Output pixel `(u, v)` samples the left view at `(u + d(u, v), v)` with
/// linear interpolation along the row. Pixels whose source leaves the image,
/// or touches uncovered left pixels, are left uncovered.
pub fn warp_left_to_right<T: Scalar>(
    left: &DenseView<T>,
    disparity: &AffineDisparity<T>,
) -> DenseView<T> {
    let (width, height) = left.image.dims();
    let mut image = GrayImage::filled(width, height, T::zero());
    let mut coverage = BitRaster::zeros(width, height);
    let max_x = T::of_usize(width - 1);

    for v in 0..height {
        for u in 0..width {
            let x = T::of_usize(u) + disparity.eval_px(u, v);
            if !(x >= T::zero() && x <= max_x) {
                continue;
            }
            let x0 = x.floor();
            let frac = x - x0;
            let i0 = x0.as_f64() as usize;
            if frac == T::zero() {
                image.set(u, v, left.image.get(i0, v));
                coverage.set(u, v, left.coverage.get(i0, v));
            } else {
                let i1 = i0 + 1;
                let a = left.image.get(i0, v);
                let b = left.image.get(i1, v);
                image.set(u, v, a + (b - a) * frac);
                coverage.set(u, v, left.coverage.get(i0, v) && left.coverage.get(i1, v));
            }
        }
    }

    DenseView { image, coverage }
}

/// Wraps a fully-known image as a dense view with full coverage.
pub fn full_view<T: Scalar>(image: GrayImage<T>) -> DenseView<T> {
    let coverage = BitRaster::from_fn(image.width(), image.height(), |_, _| true);
    DenseView { image, coverage }
}

/// Resamples an image through a per-pixel horizontal displacement field:
/// `out(u, v) = source(u + field(u, v), v)` with linear interpolation.
///
/// Sources falling outside the row are clamped to the nearest edge pixel and
/// flagged false in the returned validity raster. Used to render synthetic
/// stereo pairs from ground-truth disparity.
pub fn resample_columns<T: Scalar>(
    source: &GrayImage<T>,
    field: &Raster<T>,
) -> (GrayImage<T>, BitRaster) {
    assert!(source.same_dims(field), "image/field dims differ");
    let (width, height) = source.dims();
    let mut image = GrayImage::filled(width, height, T::zero());
    let mut valid = BitRaster::zeros(width, height);
    let max_x = T::of_usize(width - 1);

    for v in 0..height {
        for u in 0..width {
            let x = T::of_usize(u) + field.get(u, v);
            let in_bounds = x >= T::zero() && x <= max_x;
            let x = x.max(T::zero()).min(max_x);
            let x0 = x.floor();
            let frac = x - x0;
            let i0 = x0.as_f64() as usize;
            let value = if frac == T::zero() {
                source.get(i0, v)
            } else {
                let a = source.get(i0, v);
                let b = source.get(i0 + 1, v);
                a + (b - a) * frac
            };
            image.set(u, v, value);
            valid.set(u, v, in_bounds);
        }
    }

    (image, valid)
}
