//! Run configuration: one JSON document covering generation, scoring, and
//! evaluation. Command-line flags override individual fields.

use std::path::Path;

use serde::{Deserialize, Serialize};

use lfpad::coding::MaskMode;
use lfpad::scene::{DatasetParams, SceneDistributions};
use lfpad::spoof::AntiSpoofConfig;
use lfpad::stereo::Calibration;

use crate::error::{CliError, CliResult};

/// Mask generation settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MaskConfig {
    pub mode: MaskMode,
    pub shift_px: usize,
    pub transmittance: f64,
}

impl Default for MaskConfig {
    fn default() -> Self {
        Self {
            mode: MaskMode::Independent,
            shift_px: 0,
            transmittance: 0.5,
        }
    }
}

/// Complete run configuration with defaults for every field.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub width: usize,
    pub height: usize,
    pub genuine: usize,
    pub flat: usize,
    pub curved: usize,
    /// Defaults to a centered principal point with a 10 mm baseline and a
    /// 1000 px focal length when absent.
    pub calibration: Option<Calibration<f64>>,
    pub mask: MaskConfig,
    pub max_disparity_px: f64,
    pub distributions: SceneDistributions,
    pub antispoof: AntiSpoofConfig,
    pub seed: u64,
    /// Worker threads; 0 uses all cores.
    pub jobs: usize,
    pub test_fraction: f64,
    pub repeats: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            width: 512,
            height: 512,
            genuine: 0,
            flat: 0,
            curved: 0,
            calibration: None,
            mask: MaskConfig::default(),
            max_disparity_px: 32.0,
            distributions: SceneDistributions::default(),
            antispoof: AntiSpoofConfig::default(),
            seed: 0,
            jobs: 0,
            test_fraction: 0.25,
            repeats: 50,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
    }

    pub fn calibration(&self) -> Calibration<f64> {
        self.calibration.unwrap_or(Calibration {
            baseline_m: 0.01,
            focal_px: 1000.0,
            principal_u: (self.width - 1) as f64 / 2.0,
            principal_v: (self.height - 1) as f64 / 2.0,
        })
    }

    pub fn dataset_params(&self) -> DatasetParams {
        DatasetParams {
            n_genuine: self.genuine,
            n_flat: self.flat,
            n_curved: self.curved,
            width: self.width,
            height: self.height,
            calib: self.calibration(),
            mask_mode: self.mask.mode,
            mask_shift_px: self.mask.shift_px,
            mask_transmittance: self.mask.transmittance,
            max_disparity_px: self.max_disparity_px,
            distributions: self.distributions.clone(),
            master_seed: self.seed,
        }
    }
}
