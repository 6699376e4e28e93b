//! Coded two-view acquisition on a single grayscale sensor.
//!
//! The sensor sees both views at once, each modulated by its own binary
//! coding plane: `coded(u,v) = view0(u,v)*plane0(u,v) + view1(u,v)*plane1(u,v)`.
//! Pixels covered by exactly one plane carry a clean sample of that view, so
//! masking the coded image with those "sparse masks" recovers scattered view
//! samples with no reconstruction work at all.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{BitRaster, GrayImage};
use crate::rng;
use crate::Scalar;

/// How the two coding planes derive from the physical mask.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaskMode {
    /// Two independent random draws.
    Independent,
    /// One physical mask; plane 1 is plane 0 shifted right by `shift_px`
    /// columns, with the vacated columns opaque.
    Shifted,
}

/// Binary transmittance plane pair for the two coded views.
#[derive(Clone, Debug, PartialEq)]
pub struct CodingMask {
    planes: [BitRaster; 2],
    mode: MaskMode,
    shift_px: usize,
    transmittance: f64,
    seed: u64,
}

/// Identity of the mask a coded image was captured through.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaskId {
    pub width: usize,
    pub height: usize,
    pub mode: MaskMode,
    pub shift_px: usize,
    pub transmittance: f64,
    pub seed: u64,
}

impl CodingMask {
    /// Rebuilds a mask from stored planes and parameters (dataset loading).
    pub fn from_parts(
        planes: [BitRaster; 2],
        mode: MaskMode,
        shift_px: usize,
        transmittance: f64,
        seed: u64,
    ) -> Result<Self> {
        if !planes[0].same_dims(&planes[1]) {
            return Err(Error::DimensionMismatch(
                "coding planes differ in size".into(),
            ));
        }
        Ok(Self {
            planes,
            mode,
            shift_px,
            transmittance,
            seed,
        })
    }

    pub fn plane(&self, view: usize) -> &BitRaster {
        &self.planes[view]
    }

    pub fn width(&self) -> usize {
        self.planes[0].width()
    }

    pub fn height(&self) -> usize {
        self.planes[0].height()
    }

    pub fn mode(&self) -> MaskMode {
        self.mode
    }

    pub fn shift_px(&self) -> usize {
        self.shift_px
    }

    pub fn transmittance(&self) -> f64 {
        self.transmittance
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn id(&self) -> MaskId {
        MaskId {
            width: self.width(),
            height: self.height(),
            mode: self.mode,
            shift_px: self.shift_px,
            transmittance: self.transmittance,
            seed: self.seed,
        }
    }
}

/// Single-sensor capture of two masked views.
#[derive(Clone, Debug, PartialEq)]
pub struct CodedImage<T> {
    pub image: GrayImage<T>,
    pub mask_id: MaskId,
}

/// Per-view masks of the pixels that carry exactly one view.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMaskPair {
    /// `exclusive[i]` marks pixels where only view `i` reaches the sensor.
    pub exclusive: [BitRaster; 2],
}

/// View samples known only at the pixels marked valid; zero elsewhere.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseView<T> {
    pub values: GrayImage<T>,
    pub valid: BitRaster,
}

/// Generates a coding mask with per-pixel Bernoulli(`transmittance`) draws.
///
/// `independent` draws the two planes separately; `shifted` draws one
/// physical mask and takes plane 1 as its right-shifted copy. The same
/// (dims, transmittance, mode, seed) always yields bit-identical planes.
pub fn generate_mask(
    width: usize,
    height: usize,
    transmittance: f64,
    mode: MaskMode,
    shift_px: usize,
    seed: u64,
) -> Result<CodingMask> {
    if width == 0 || height == 0 {
        return Err(Error::invalid("mask dimensions must be at least 1x1"));
    }
    if !(transmittance > 0.0 && transmittance < 1.0) {
        return Err(Error::invalid(format!(
            "transmittance must lie strictly inside (0, 1), got {transmittance}"
        )));
    }
    if mode == MaskMode::Shifted && shift_px >= width {
        return Err(Error::invalid(format!(
            "shift of {shift_px} px must be smaller than the {width} px sensor width"
        )));
    }

    let mut rng = rng::seeded(seed);
    let draw_plane = |rng: &mut rand_chacha::ChaCha8Rng| {
        BitRaster::from_fn(width, height, |_, _| {
            rng::next_bernoulli(rng, transmittance)
        })
    };

    let planes = match mode {
        MaskMode::Independent => {
            let plane0 = draw_plane(&mut rng);
            let plane1 = draw_plane(&mut rng);
            [plane0, plane1]
        }
        MaskMode::Shifted => {
            let physical = draw_plane(&mut rng);
            let shifted = BitRaster::from_fn(width, height, |u, v| {
                u >= shift_px && physical.get(u - shift_px, v)
            });
            [physical, shifted]
        }
    };

    CodingMask::from_parts(
        planes,
        mode,
        if mode == MaskMode::Shifted { shift_px } else { 0 },
        transmittance,
        seed,
    )
}

/// Sums the two masked views into the single-sensor coded image.
///
/// Values can reach 2.0 where both planes are open; they are stored as-is.
pub fn encode<T: Scalar>(
    view0: &GrayImage<T>,
    view1: &GrayImage<T>,
    mask: &CodingMask,
) -> Result<CodedImage<T>> {
    if !view0.same_dims(view1)
        || view0.width() != mask.width()
        || view0.height() != mask.height()
    {
        return Err(Error::DimensionMismatch(format!(
            "views {:?}/{:?} and mask {}x{} must share dimensions",
            view0.dims(),
            view1.dims(),
            mask.width(),
            mask.height()
        )));
    }
    for (name, view) in [("view0", view0), ("view1", view1)] {
        if view
            .data()
            .iter()
            .any(|&x| !(x >= T::zero() && x <= T::one()))
        {
            return Err(Error::invalid(format!(
                "{name} intensities must lie in [0, 1]"
            )));
        }
    }

    let (width, height) = view0.dims();
    let image = GrayImage::from_fn(width, height, |u, v| {
        let mut sum = T::zero();
        if mask.plane(0).get(u, v) {
            sum = sum + view0.get(u, v);
        }
        if mask.plane(1).get(u, v) {
            sum = sum + view1.get(u, v);
        }
        sum
    });

    Ok(CodedImage {
        image,
        mask_id: mask.id(),
    })
}

/// Marks, per view, the pixels where only that view is coded.
pub fn sparse_masks(mask: &CodingMask) -> SparseMaskPair {
    let (width, height) = (mask.width(), mask.height());
    let only = |a: &BitRaster, b: &BitRaster| {
        BitRaster::from_fn(width, height, |u, v| a.get(u, v) && !b.get(u, v))
    };
    SparseMaskPair {
        exclusive: [
            only(mask.plane(0), mask.plane(1)),
            only(mask.plane(1), mask.plane(0)),
        ],
    }
}

/// Masks the coded image down to the pixels that carry a single view.
///
/// At every valid pixel the output equals the original view exactly; this is
/// the zero-cost "free" reconstruction the binary mask makes possible.
pub fn extract_sparse_view<T: Scalar>(
    coded: &CodedImage<T>,
    sparse_mask: &BitRaster,
) -> Result<SparseView<T>> {
    if !sparse_mask.same_dims_as(&coded.image) {
        return Err(Error::DimensionMismatch(format!(
            "sparse mask {:?} does not match coded image {:?}",
            sparse_mask.dims(),
            coded.image.dims()
        )));
    }
    let (width, height) = coded.image.dims();
    let values = GrayImage::from_fn(width, height, |u, v| {
        if sparse_mask.get(u, v) {
            coded.image.get(u, v)
        } else {
            T::zero()
        }
    });
    Ok(SparseView {
        values,
        valid: sparse_mask.clone(),
    })
}
