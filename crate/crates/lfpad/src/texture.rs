//! Deterministic procedural textures.
//!
//! Band-limited value noise gives the synthetic scenes enough local contrast
//! for block matching while staying smooth enough for sparse interpolation.
//! Everything is hash-based, so a (seed, coordinates) pair always produces
//! the same sample on every platform.

use crate::raster::GrayImage;
use crate::rng::splitmix64;
use crate::Scalar;

/// Lattice value in [0, 1) for integer coordinates.
#[inline]
fn lattice(seed: u64, xi: i64, yi: i64) -> f64 {
    let h = splitmix64(
        seed ^ (xi as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)
            ^ (yi as u64).wrapping_mul(0xc2b2_ae3d_27d4_eb4f),
    );
    (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Quintic fade; C2-continuous across lattice cells.
#[inline]
fn fade(t: f64) -> f64 {
    t * t * t * (t * (t * 6.0 - 15.0) + 10.0)
}

/// Smoothly interpolated value noise in [0, 1].
pub fn value_noise(x: f64, y: f64, seed: u64) -> f64 {
    let xi = x.floor();
    let yi = y.floor();
    let (x0, y0) = (xi as i64, yi as i64);
    let tx = fade(x - xi);
    let ty = fade(y - yi);

    let v00 = lattice(seed, x0, y0);
    let v10 = lattice(seed, x0 + 1, y0);
    let v01 = lattice(seed, x0, y0 + 1);
    let v11 = lattice(seed, x0 + 1, y0 + 1);

    let top = v00 + (v10 - v00) * tx;
    let bottom = v01 + (v11 - v01) * tx;
    top + (bottom - top) * ty
}

/// Octave sum of value noise, normalized to [0, 1].
pub fn fbm(x: f64, y: f64, seed: u64, octaves: u32, lacunarity: f64, gain: f64) -> f64 {
    let mut amplitude = 1.0;
    let mut frequency = 1.0;
    let mut sum = 0.0;
    let mut norm = 0.0;
    for octave in 0..octaves {
        let octave_seed = splitmix64(seed ^ octave as u64);
        sum += amplitude * value_noise(x * frequency, y * frequency, octave_seed);
        norm += amplitude;
        frequency *= lacunarity;
        amplitude *= gain;
    }
    sum / norm
}

/// Band-limited noise image with the coarsest feature `base_wavelength_px`.
///
/// Values are mapped into [0.08, 0.92], leaving headroom before the unit
/// bounds so interpolation overshoot is not clipped away.
pub fn fbm_texture<T: Scalar>(
    width: usize,
    height: usize,
    seed: u64,
    base_wavelength_px: f64,
) -> GrayImage<T> {
    let inv = 1.0 / base_wavelength_px;
    GrayImage::from_fn(width, height, |u, v| {
        let n = fbm(u as f64 * inv, v as f64 * inv, seed, 3, 2.0, 0.6);
        T::of(0.08 + 0.84 * n)
    })
}
