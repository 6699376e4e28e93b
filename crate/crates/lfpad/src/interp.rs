//! Densification of sparse views.
//!
//! Two deterministic passes: rows with at least four known samples are filled
//! by piecewise-cubic interpolation through their knots (Catmull-Rom style
//! tangents, nearest-knot extension outside the outermost knots); the
//! remaining rows are filled by vertical linear interpolation between the
//! nearest cubic-filled rows. Knot values are preserved exactly and the
//! coverage raster marks pixels inside the interpolated support, so callers
//! can keep extrapolated border fill out of any error statistics.

use crate::coding::SparseView;
use crate::error::{Error, Result};
use crate::raster::{BitRaster, GrayImage};
use crate::Scalar;

/// Minimum knots per row for the cubic pass.
const MIN_ROW_KNOTS: usize = 4;

/// Fully filled view plus the raster of pixels inside interpolation support.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseView<T> {
    pub image: GrayImage<T>,
    pub coverage: BitRaster,
}

/// Fills a sparse view into a dense raster.
///
/// Fails with `InsufficientData` unless at least one row carries four or
/// more known samples.
pub fn densify<T: Scalar>(sparse: &SparseView<T>) -> Result<DenseView<T>> {
    let (width, height) = sparse.values.dims();
    let mut image = GrayImage::filled(width, height, T::zero());
    let mut coverage = BitRaster::zeros(width, height);
    let mut row_filled = vec![false; height];

    // Pass 1: per-row cubic interpolation where there are enough knots.
    let mut knots_u: Vec<usize> = Vec::with_capacity(width);
    let mut knots_y: Vec<T> = Vec::with_capacity(width);
    for v in 0..height {
        knots_u.clear();
        knots_y.clear();
        for u in 0..width {
            if sparse.valid.get(u, v) {
                knots_u.push(u);
                knots_y.push(sparse.values.get(u, v));
            }
        }
        if knots_u.len() < MIN_ROW_KNOTS {
            continue;
        }
        fill_row_cubic(&knots_u, &knots_y, image.row_mut(v));
        let (first, last) = (knots_u[0], *knots_u.last().unwrap());
        for u in first..=last {
            coverage.set(u, v, true);
        }
        row_filled[v] = true;
    }

    if !row_filled.iter().any(|&f| f) {
        return Err(Error::InsufficientData(format!(
            "no row has {MIN_ROW_KNOTS} or more valid samples"
        )));
    }

    // Pass 2: vertical linear interpolation for the sparse rows.
    let filled_rows: Vec<usize> = (0..height).filter(|&v| row_filled[v]).collect();
    for v in 0..height {
        if row_filled[v] {
            continue;
        }
        let above = filled_rows.iter().rev().find(|&&r| r < v).copied();
        let below = filled_rows.iter().find(|&&r| r > v).copied();
        match (above, below) {
            (Some(a), Some(b)) => {
                let w = T::of_usize(v - a) / T::of_usize(b - a);
                for u in 0..width {
                    let ya = image.get(u, a);
                    let yb = image.get(u, b);
                    image.set(u, v, ya + (yb - ya) * w);
                    coverage.set(u, v, coverage.get(u, a) && coverage.get(u, b));
                }
            }
            (Some(r), None) | (None, Some(r)) => {
                // One-sided copy counts as extrapolation: left uncovered.
                for u in 0..width {
                    let y = image.get(u, r);
                    image.set(u, v, y);
                }
            }
            (None, None) => unreachable!("at least one filled row exists"),
        }
        // The row's own knots stay exact and covered.
        for u in 0..width {
            if sparse.valid.get(u, v) {
                image.set(u, v, sparse.values.get(u, v));
                coverage.set(u, v, true);
            }
        }
    }

    // Intensities are physical; cubic overshoot is clipped.
    let zero = T::zero();
    let one = T::one();
    for v in 0..height {
        for pixel in image.row_mut(v) {
            if *pixel < zero {
                *pixel = zero;
            } else if *pixel > one {
                *pixel = one;
            }
        }
    }

    Ok(DenseView { image, coverage })
}

/// Piecewise-cubic Hermite fill of one row through its knots.
///
/// Tangents are centered finite differences (one-sided at the ends), which
/// reproduces constant and linear data exactly; pixels outside the outermost
/// knots take the nearest knot value.
fn fill_row_cubic<T: Scalar>(knots_u: &[usize], knots_y: &[T], row: &mut [T]) {
    let n = knots_u.len();
    debug_assert!(n >= 2);

    let x = |i: usize| T::of_usize(knots_u[i]);
    let tangent = |i: usize| -> T {
        if i == 0 {
            (knots_y[1] - knots_y[0]) / (x(1) - x(0))
        } else if i == n - 1 {
            (knots_y[n - 1] - knots_y[n - 2]) / (x(n - 1) - x(n - 2))
        } else {
            (knots_y[i + 1] - knots_y[i - 1]) / (x(i + 1) - x(i - 1))
        }
    };

    for u in 0..knots_u[0] {
        row[u] = knots_y[0];
    }
    for u in knots_u[n - 1] + 1..row.len() {
        row[u] = knots_y[n - 1];
    }

    for i in 0..n - 1 {
        let (u0, u1) = (knots_u[i], knots_u[i + 1]);
        let (y0, y1) = (knots_y[i], knots_y[i + 1]);
        let h = x(i + 1) - x(i);
        let (m0, m1) = (tangent(i), tangent(i + 1));
        let delta = y1 - y0;
        // value(t) = y0 + c1 t + c2 t^2 + c3 t^3 over the segment; this form
        // keeps constants bit-exact because every term vanishes with delta.
        let c1 = h * m0;
        let c2 = T::of(3.0) * delta - h * (T::of(2.0) * m0 + m1);
        let c3 = T::of(-2.0) * delta + h * (m0 + m1);
        row[u0] = y0;
        for u in u0 + 1..u1 {
            let t = T::of_usize(u - u0) / h;
            row[u] = y0 + t * (c1 + t * (c2 + t * c3));
        }
        row[u1] = y1;
    }
}
