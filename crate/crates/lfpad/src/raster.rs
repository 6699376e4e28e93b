//! Row-major raster containers: scalar-valued images and binary masks.

use crate::error::{Error, Result};
use crate::Scalar;

/// Row-major raster of scalar samples.
///
/// Used both for grayscale images (unit-interval intensities) and for
/// disparity maps (pixel offsets). Range constraints are enforced by the
/// operations that care about them, not by the container.
#[derive(Clone, Debug, PartialEq)]
pub struct Raster<T> {
    width: usize,
    height: usize,
    data: Vec<T>,
}

/// Grayscale image: a raster of unit-interval intensities.
pub type GrayImage<T> = Raster<T>;

impl<T> Raster<T> {
    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn same_dims<U>(&self, other: &Raster<U>) -> bool {
        self.width == other.width && self.height == other.height
    }
}

impl<T: Copy> Raster<T> {
    /// Raster filled with a constant value.
    pub fn filled(width: usize, height: usize, value: T) -> Self {
        Self {
            width,
            height,
            data: vec![value; width * height],
        }
    }

    /// Wraps existing row-major data. Fails unless `data.len() == width * height`.
    pub fn from_vec(width: usize, height: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::DimensionMismatch(format!(
                "raster data length {} does not match {}x{}",
                data.len(),
                width,
                height
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// Builds a raster by evaluating `f(u, v)` at every pixel.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for v in 0..height {
            for u in 0..width {
                data.push(f(u, v));
            }
        }
        Self {
            width,
            height,
            data,
        }
    }

    #[inline]
    pub fn get(&self, u: usize, v: usize) -> T {
        debug_assert!(u < self.width && v < self.height);
        self.data[v * self.width + u]
    }

    #[inline]
    pub fn set(&mut self, u: usize, v: usize, value: T) {
        debug_assert!(u < self.width && v < self.height);
        self.data[v * self.width + u] = value;
    }

    pub fn row(&self, v: usize) -> &[T] {
        &self.data[v * self.width..(v + 1) * self.width]
    }

    pub fn row_mut(&mut self, v: usize) -> &mut [T] {
        &mut self.data[v * self.width..(v + 1) * self.width]
    }

    /// Pixels in row-major order with their coordinates.
    pub fn pixels(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        let width = self.width;
        self.data
            .iter()
            .enumerate()
            .map(move |(i, &value)| (i % width, i / width, value))
    }
}

impl<T: Scalar> Raster<T> {
    /// Converts every sample to another scalar type through f64.
    pub fn cast<U: Scalar>(&self) -> Raster<U> {
        Raster {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|x| U::of(x.as_f64())).collect(),
        }
    }
}

/// Binary raster (one byte per pixel, values 0 or 1).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitRaster {
    width: usize,
    height: usize,
    bits: Vec<u8>,
}

impl BitRaster {
    pub fn zeros(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            bits: vec![0u8; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut bits = Vec::with_capacity(width * height);
        for v in 0..height {
            for u in 0..width {
                bits.push(f(u, v) as u8);
            }
        }
        Self {
            width,
            height,
            bits,
        }
    }

    pub fn from_vec(width: usize, height: usize, bits: Vec<u8>) -> Result<Self> {
        if bits.len() != width * height {
            return Err(Error::DimensionMismatch(format!(
                "bit raster length {} does not match {}x{}",
                bits.len(),
                width,
                height
            )));
        }
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::invalid("bit raster entries must be 0 or 1"));
        }
        Ok(Self {
            width,
            height,
            bits,
        })
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn get(&self, u: usize, v: usize) -> bool {
        debug_assert!(u < self.width && v < self.height);
        self.bits[v * self.width + u] == 1
    }

    #[inline]
    pub fn set(&mut self, u: usize, v: usize, value: bool) {
        debug_assert!(u < self.width && v < self.height);
        self.bits[v * self.width + u] = value as u8;
    }

    pub fn row(&self, v: usize) -> &[u8] {
        &self.bits[v * self.width..(v + 1) * self.width]
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    /// Number of set pixels.
    pub fn count_ones(&self) -> usize {
        self.bits.iter().map(|&b| b as usize).sum()
    }

    /// Fraction of set pixels.
    pub fn density(&self) -> f64 {
        if self.bits.is_empty() {
            0.0
        } else {
            self.count_ones() as f64 / self.bits.len() as f64
        }
    }

    pub fn same_dims(&self, other: &BitRaster) -> bool {
        self.width == other.width && self.height == other.height
    }

    pub fn same_dims_as<T>(&self, raster: &Raster<T>) -> bool {
        self.width == raster.width() && self.height == raster.height()
    }

    /// Pixelwise AND of two rasters. Panics if dimensions differ.
    pub fn and(&self, other: &BitRaster) -> BitRaster {
        assert!(self.same_dims(other), "bit raster dims differ");
        BitRaster {
            width: self.width,
            height: self.height,
            bits: self
                .bits
                .iter()
                .zip(&other.bits)
                .map(|(&a, &b)| a & b)
                .collect(),
        }
    }
}
