//! File formats: binary netpbm images, raw float rasters, JSON sidecars.
//!
//! - Grayscale images: binary PGM (`P5`, maxval 255); intensities map through
//!   `value = byte / 255` on read and `byte = round(clamp(value) * 255)` on
//!   write.
//! - Binary rasters (coding planes): binary PBM (`P4`), MSB-first packed rows.
//! - Disparity rasters: raw little-endian f32 samples plus a small JSON
//!   header carrying the dimensions and the sign convention.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::coding::{CodingMask, MaskMode};
use crate::error::{Error, Result};
use crate::raster::{BitRaster, GrayImage, Raster};
use crate::Scalar;

/// Mask sidecar document stored next to the plane bitmaps.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaskSidecar {
    pub mode: MaskMode,
    pub shift_px: usize,
    pub transmittance: f64,
    pub seed: u64,
}

/// Header stored next to an `.f32` raster.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct F32RasterHeader {
    pub width: usize,
    pub height: usize,
    /// Human-readable note on what the samples mean.
    pub convention: String,
}

// ---------------------------------------------------------------------------
// netpbm header scanning
// ---------------------------------------------------------------------------

struct TokenReader<R: Read> {
    inner: R,
    peeked: Option<u8>,
}

impl<R: Read> TokenReader<R> {
    fn new(inner: R) -> Self {
        Self {
            inner,
            peeked: None,
        }
    }

    fn next_byte(&mut self) -> Result<Option<u8>> {
        if let Some(b) = self.peeked.take() {
            return Ok(Some(b));
        }
        let mut buf = [0u8; 1];
        match self.inner.read(&mut buf)? {
            0 => Ok(None),
            _ => Ok(Some(buf[0])),
        }
    }

    /// Next whitespace-delimited token, skipping `#` comments.
    fn token(&mut self) -> Result<String> {
        let mut tok = Vec::new();
        loop {
            let Some(b) = self.next_byte()? else {
                break;
            };
            if b == b'#' {
                // Comment runs to end of line.
                while let Some(c) = self.next_byte()? {
                    if c == b'\n' {
                        break;
                    }
                }
                continue;
            }
            if b.is_ascii_whitespace() {
                if tok.is_empty() {
                    continue;
                }
                break;
            }
            tok.push(b);
        }
        if tok.is_empty() {
            return Err(Error::format("unexpected end of netpbm header"));
        }
        String::from_utf8(tok).map_err(|_| Error::format("non-ascii netpbm header token"))
    }

    fn number(&mut self) -> Result<usize> {
        let tok = self.token()?;
        tok.parse::<usize>()
            .map_err(|_| Error::format(format!("bad netpbm header number {tok:?}")))
    }

    fn into_inner(self) -> R {
        self.inner
    }
}

// ---------------------------------------------------------------------------
// PGM
// ---------------------------------------------------------------------------

/// Writes a grayscale image as binary PGM, quantizing to 8 bits.
pub fn write_pgm<T: Scalar>(path: &Path, image: &GrayImage<T>) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write!(out, "P5\n{} {}\n255\n", image.width(), image.height())?;
    let mut row_bytes = Vec::with_capacity(image.width());
    for v in 0..image.height() {
        row_bytes.clear();
        for &value in image.row(v) {
            let clamped = value.as_f64().clamp(0.0, 1.0);
            row_bytes.push((clamped * 255.0).round() as u8);
        }
        out.write_all(&row_bytes)?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a binary PGM (maxval 255) as unit-interval intensities.
pub fn read_pgm<T: Scalar>(path: &Path) -> Result<GrayImage<T>> {
    let mut reader = TokenReader::new(BufReader::new(File::open(path)?));
    let magic = reader.token()?;
    if magic != "P5" {
        return Err(Error::format(format!(
            "{}: expected P5 magic, found {magic:?}",
            path.display()
        )));
    }
    let width = reader.number()?;
    let height = reader.number()?;
    let maxval = reader.number()?;
    if maxval != 255 {
        return Err(Error::format(format!(
            "{}: only maxval 255 is supported, found {maxval}",
            path.display()
        )));
    }
    let mut inner = reader.into_inner();
    let mut bytes = vec![0u8; width * height];
    inner.read_exact(&mut bytes).map_err(|_| {
        Error::format(format!(
            "{}: truncated pixel payload ({}x{})",
            path.display(),
            width,
            height
        ))
    })?;
    let scale = T::of(1.0 / 255.0);
    let data = bytes
        .into_iter()
        .map(|b| T::of_usize(b as usize) * scale)
        .collect();
    GrayImage::from_vec(width, height, data)
}

// ---------------------------------------------------------------------------
// PBM
// ---------------------------------------------------------------------------

/// Writes a binary raster as PBM P4 (set pixel = 1 bit).
pub fn write_pbm(path: &Path, raster: &BitRaster) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write!(out, "P4\n{} {}\n", raster.width(), raster.height())?;
    let row_bytes = raster.width().div_ceil(8);
    let mut packed = vec![0u8; row_bytes];
    for v in 0..raster.height() {
        packed.iter_mut().for_each(|b| *b = 0);
        for (u, &bit) in raster.row(v).iter().enumerate() {
            if bit == 1 {
                packed[u / 8] |= 0x80 >> (u % 8);
            }
        }
        out.write_all(&packed)?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a binary PBM P4 raster.
pub fn read_pbm(path: &Path) -> Result<BitRaster> {
    let mut reader = TokenReader::new(BufReader::new(File::open(path)?));
    let magic = reader.token()?;
    if magic != "P4" {
        return Err(Error::format(format!(
            "{}: expected P4 magic, found {magic:?}",
            path.display()
        )));
    }
    let width = reader.number()?;
    let height = reader.number()?;
    let mut inner = reader.into_inner();
    let row_bytes = width.div_ceil(8);
    let mut payload = vec![0u8; row_bytes * height];
    inner.read_exact(&mut payload).map_err(|_| {
        Error::format(format!(
            "{}: truncated bit payload ({}x{})",
            path.display(),
            width,
            height
        ))
    })?;
    let mut bits = Vec::with_capacity(width * height);
    for v in 0..height {
        let row = &payload[v * row_bytes..(v + 1) * row_bytes];
        for u in 0..width {
            bits.push((row[u / 8] >> (7 - u % 8)) & 1);
        }
    }
    BitRaster::from_vec(width, height, bits)
}

// ---------------------------------------------------------------------------
// f32 rasters
// ---------------------------------------------------------------------------

fn header_path(raster_path: &Path) -> PathBuf {
    raster_path.with_extension("json")
}

/// Writes a raster as raw little-endian f32 plus a JSON header sidecar.
pub fn write_f32_raster<T: Scalar>(
    path: &Path,
    raster: &Raster<T>,
    convention: &str,
) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    for &value in raster.data() {
        out.write_all(&(value.as_f64() as f32).to_le_bytes())?;
    }
    out.flush()?;
    let header = F32RasterHeader {
        width: raster.width(),
        height: raster.height(),
        convention: convention.to_string(),
    };
    write_json(&header_path(path), &header)
}

/// Reads a raw f32 raster together with its JSON header.
pub fn read_f32_raster<T: Scalar>(path: &Path) -> Result<(Raster<T>, F32RasterHeader)> {
    let header: F32RasterHeader = read_json(&header_path(path))?;
    let mut payload = Vec::new();
    File::open(path)?.read_to_end(&mut payload)?;
    let expected = header.width * header.height * 4;
    if payload.len() != expected {
        return Err(Error::format(format!(
            "{}: payload is {} bytes, header implies {expected}",
            path.display(),
            payload.len()
        )));
    }
    let data = payload
        .chunks_exact(4)
        .map(|chunk| T::of(f32::from_le_bytes([chunk[0], chunk[1], chunk[2], chunk[3]]) as f64))
        .collect();
    Ok((
        Raster::from_vec(header.width, header.height, data)?,
        header,
    ))
}

// ---------------------------------------------------------------------------
// JSON + mask directories
// ---------------------------------------------------------------------------

/// Writes a pretty-printed JSON document with a trailing newline.
pub fn write_json<S: Serialize>(path: &Path, value: &S) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::format(format!("json encode: {e}")))?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

pub fn read_json<D: for<'de> Deserialize<'de>>(path: &Path) -> Result<D> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text)
        .map_err(|e| Error::format(format!("{}: {e}", path.display())))
}

pub const MASK_PLANE0_FILE: &str = "mask_plane0.pbm";
pub const MASK_PLANE1_FILE: &str = "mask_plane1.pbm";
pub const MASK_SIDECAR_FILE: &str = "mask.json";

/// Writes both coding planes and the sidecar into `dir`.
pub fn write_mask(dir: &Path, mask: &CodingMask) -> Result<()> {
    write_pbm(&dir.join(MASK_PLANE0_FILE), mask.plane(0))?;
    write_pbm(&dir.join(MASK_PLANE1_FILE), mask.plane(1))?;
    write_json(
        &dir.join(MASK_SIDECAR_FILE),
        &MaskSidecar {
            mode: mask.mode(),
            shift_px: mask.shift_px(),
            transmittance: mask.transmittance(),
            seed: mask.seed(),
        },
    )
}

/// Reads a mask written by [`write_mask`].
pub fn read_mask(dir: &Path) -> Result<CodingMask> {
    let plane0 = read_pbm(&dir.join(MASK_PLANE0_FILE))?;
    let plane1 = read_pbm(&dir.join(MASK_PLANE1_FILE))?;
    let sidecar: MaskSidecar = read_json(&dir.join(MASK_SIDECAR_FILE))?;
    CodingMask::from_parts(
        [plane0, plane1],
        sidecar.mode,
        sidecar.shift_px,
        sidecar.transmittance,
        sidecar.seed,
    )
}
