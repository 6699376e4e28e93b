//! On-disk dataset layout.
//!
//! ```text
//! <root>/
//!   manifest.csv                      id,label,kind,width,height,render_seed,mask_seed
//!   captures/<id>/coded.pgm           the only "captured" signal
//!   captures/<id>/mask_plane0.pbm     coding plane of view 0
//!   captures/<id>/mask_plane1.pbm     coding plane of view 1
//!   captures/<id>/mask.json           mode / shift / transmittance / seed
//!   captures/<id>/meta.json           label + provenance
//!   diagnostics/<id>/gt_disparity.f32 ground truth, never read by scoring
//!   diagnostics/<id>/gt_disparity.json
//! ```
//!
//! Ground truth lives under `diagnostics/` so nothing in `captures/` can leak
//! the label into the scoring pipeline.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coding::{CodedImage, CodingMask};
use crate::error::{Error, Result};
use crate::io;
use crate::scene::{generate_capture, CaptureLabel, DatasetParams, LabeledCapture, Provenance};
use crate::Scalar;

pub const MANIFEST_FILE: &str = "manifest.csv";
pub const CAPTURES_DIR: &str = "captures";
pub const DIAGNOSTICS_DIR: &str = "diagnostics";
pub const CODED_FILE: &str = "coded.pgm";
pub const META_FILE: &str = "meta.json";
pub const GT_DISPARITY_FILE: &str = "gt_disparity.f32";

const GT_CONVENTION: &str =
    "right-grid horizontal disparity: right(u,v) = left(u + d(u,v), v)";

/// One manifest row.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub label: String,
    pub kind: String,
    pub width: usize,
    pub height: usize,
    pub render_seed: u64,
    pub mask_seed: u64,
}

/// Per-capture metadata document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaptureMeta {
    pub id: String,
    pub label: CaptureLabel,
    pub provenance: Provenance,
}

/// Capture as the scoring pipeline sees it.
#[derive(Clone, Debug, PartialEq)]
pub struct LoadedCapture<T> {
    pub id: String,
    pub label: CaptureLabel,
    pub coded: CodedImage<T>,
    pub mask: CodingMask,
}

pub fn capture_dir(root: &Path, id: &str) -> PathBuf {
    root.join(CAPTURES_DIR).join(id)
}

pub fn diagnostics_dir(root: &Path, id: &str) -> PathBuf {
    root.join(DIAGNOSTICS_DIR).join(id)
}

/// Writes one capture (and its diagnostics) under the dataset root.
pub fn write_capture<T: Scalar>(root: &Path, capture: &LabeledCapture<T>) -> Result<()> {
    let dir = capture_dir(root, &capture.id);
    fs::create_dir_all(&dir)?;
    io::write_pgm(&dir.join(CODED_FILE), &capture.coded.image)?;
    io::write_mask(&dir, &capture.mask)?;
    io::write_json(
        &dir.join(META_FILE),
        &CaptureMeta {
            id: capture.id.clone(),
            label: capture.label,
            provenance: capture.provenance.clone(),
        },
    )?;

    let diag = diagnostics_dir(root, &capture.id);
    fs::create_dir_all(&diag)?;
    io::write_f32_raster(
        &diag.join(GT_DISPARITY_FILE),
        &capture.gt_disparity,
        GT_CONVENTION,
    )?;
    Ok(())
}

/// Loads the scoring-side view of a capture: coded image, mask, label.
pub fn read_capture<T: Scalar>(root: &Path, id: &str) -> Result<LoadedCapture<T>> {
    let dir = capture_dir(root, id);
    let mask = io::read_mask(&dir)?;
    let image = io::read_pgm(&dir.join(CODED_FILE))?;
    if image.dims() != (mask.width(), mask.height()) {
        return Err(Error::DimensionMismatch(format!(
            "{id}: coded image {:?} does not match mask {}x{}",
            image.dims(),
            mask.width(),
            mask.height()
        )));
    }
    let meta: CaptureMeta = io::read_json(&dir.join(META_FILE))?;
    Ok(LoadedCapture {
        id: id.to_string(),
        label: meta.label,
        coded: CodedImage {
            image,
            mask_id: mask.id(),
        },
        mask,
    })
}

pub fn write_manifest(root: &Path, entries: &[ManifestEntry]) -> Result<()> {
    let mut writer = csv::Writer::from_path(root.join(MANIFEST_FILE))
        .map_err(|e| Error::format(format!("manifest: {e}")))?;
    for entry in entries {
        writer
            .serialize(entry)
            .map_err(|e| Error::format(format!("manifest: {e}")))?;
    }
    writer
        .flush()
        .map_err(|e| Error::format(format!("manifest: {e}")))?;
    Ok(())
}

pub fn read_manifest(root: &Path) -> Result<Vec<ManifestEntry>> {
    let path = root.join(MANIFEST_FILE);
    let mut reader =
        csv::Reader::from_path(&path).map_err(|e| Error::format(format!("{}: {e}", path.display())))?;
    let mut entries = Vec::new();
    for record in reader.deserialize() {
        entries.push(record.map_err(|e| Error::format(format!("{}: {e}", path.display())))?);
    }
    Ok(entries)
}

/// Generates the dataset straight to disk without holding it in memory.
///
/// Captures are produced in parallel but derive only from (seed, index), so
/// the files and the manifest are identical for any thread count.
pub fn generate_to_dir<T: Scalar>(
    root: &Path,
    params: &DatasetParams,
) -> Result<Vec<ManifestEntry>> {
    if params.total() == 0 {
        return Err(Error::invalid("dataset needs at least one capture"));
    }
    fs::create_dir_all(root)?;
    let entries: Vec<ManifestEntry> = (0..params.total())
        .into_par_iter()
        .map(|index| {
            let capture: LabeledCapture<T> = generate_capture(params, index)?;
            write_capture(root, &capture)?;
            Ok(ManifestEntry {
                id: capture.id.clone(),
                label: capture.label.as_str().to_string(),
                kind: capture.provenance.scene.kind.name().to_string(),
                width: params.width,
                height: params.height,
                render_seed: capture.provenance.render_seed,
                mask_seed: capture.provenance.mask_seed,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    write_manifest(root, &entries)?;
    Ok(entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::make_dataset;

    fn small_params(seed: u64) -> DatasetParams {
        DatasetParams::new(96, 72, seed).with_counts(2, 1, 1)
    }

    #[test]
    fn capture_roundtrip_preserves_the_scoring_inputs() {
        let dir = tempfile::tempdir().unwrap();
        let captures: Vec<LabeledCapture<f64>> = make_dataset(&small_params(5)).unwrap();
        for capture in &captures {
            write_capture(dir.path(), capture).unwrap();
            let loaded: LoadedCapture<f64> = read_capture(dir.path(), &capture.id).unwrap();
            assert_eq!(loaded.label, capture.label);
            assert_eq!(loaded.mask, capture.mask);
            // PGM quantizes to 8 bits.
            for (a, b) in loaded
                .coded
                .image
                .data()
                .iter()
                .zip(capture.coded.image.data())
            {
                assert!((a - b.clamp(0.0, 1.0)).abs() <= 0.5 / 255.0 + 1e-12);
            }
        }
    }

    #[test]
    fn ground_truth_stays_out_of_the_captures_tree() {
        let dir = tempfile::tempdir().unwrap();
        let captures: Vec<LabeledCapture<f64>> = make_dataset(&small_params(6)).unwrap();
        write_capture(dir.path(), &captures[0]).unwrap();
        let capture_files: Vec<String> = fs::read_dir(capture_dir(dir.path(), &captures[0].id))
            .unwrap()
            .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
            .collect();
        assert!(capture_files.iter().all(|f| !f.contains("gt_")));
        assert!(diagnostics_dir(dir.path(), &captures[0].id)
            .join(GT_DISPARITY_FILE)
            .exists());
    }

    #[test]
    fn generate_to_dir_matches_in_memory_generation_and_is_stable() {
        let dir_a = tempfile::tempdir().unwrap();
        let dir_b = tempfile::tempdir().unwrap();
        let params = small_params(7);
        let entries_a = generate_to_dir::<f64>(dir_a.path(), &params).unwrap();
        let entries_b = generate_to_dir::<f64>(dir_b.path(), &params).unwrap();
        assert_eq!(entries_a, entries_b);
        let manifest_a = fs::read(dir_a.path().join(MANIFEST_FILE)).unwrap();
        let manifest_b = fs::read(dir_b.path().join(MANIFEST_FILE)).unwrap();
        assert_eq!(manifest_a, manifest_b);
        let coded_a = fs::read(capture_dir(dir_a.path(), &entries_a[0].id).join(CODED_FILE)).unwrap();
        let coded_b = fs::read(capture_dir(dir_b.path(), &entries_b[0].id).join(CODED_FILE)).unwrap();
        assert_eq!(coded_a, coded_b);
    }

    #[test]
    fn manifest_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let params = small_params(8);
        let entries = generate_to_dir::<f64>(dir.path(), &params).unwrap();
        let back = read_manifest(dir.path()).unwrap();
        assert_eq!(back, entries);
        assert_eq!(back.len(), 4);
    }
}
