//! Synthetic labeled captures.
//!
//! Scenes are textured depth surfaces rendered into rectified stereo pairs:
//! flat spoofs are randomized disparity planes, curved spoofs are partial
//! cylinders, and genuine scenes are smooth bump fields or depth layers that
//! no single plane can explain. Each capture is then coded through a fresh
//! mask, carrying its ground-truth disparity separately for diagnostics only.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coding::{encode, generate_mask, CodedImage, CodingMask, MaskMode};
use crate::error::{Error, Result};
use crate::io;
use crate::raster::{BitRaster, GrayImage, Raster};
use crate::rng::{self, derive_seed};
use crate::stereo::{plane_to_affine, resample_columns, Calibration, Plane3D};
use crate::texture;
use crate::Scalar;

/// Ground-truth class of a capture.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaptureLabel {
    #[serde(rename = "genuine_3d")]
    Genuine3d,
    #[serde(rename = "spoof_flat")]
    SpoofFlat,
    #[serde(rename = "spoof_curved")]
    SpoofCurved,
}

impl CaptureLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            CaptureLabel::Genuine3d => "genuine_3d",
            CaptureLabel::SpoofFlat => "spoof_flat",
            CaptureLabel::SpoofCurved => "spoof_curved",
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "genuine_3d" => Ok(CaptureLabel::Genuine3d),
            "spoof_flat" => Ok(CaptureLabel::SpoofFlat),
            "spoof_curved" => Ok(CaptureLabel::SpoofCurved),
            other => Err(Error::invalid(format!("unknown capture label {other:?}"))),
        }
    }

    pub fn is_spoof(&self) -> bool {
        !matches!(self, CaptureLabel::Genuine3d)
    }

    fn id_tag(&self) -> &'static str {
        match self {
            CaptureLabel::Genuine3d => "genuine",
            CaptureLabel::SpoofFlat => "flat",
            CaptureLabel::SpoofCurved => "curved",
        }
    }
}

/// One smooth disparity bump of a genuine-scene proxy.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    /// Center as fractions of (width, height).
    pub center: [f64; 2],
    /// Radius as a fraction of the width.
    pub sigma: f64,
    /// Signed raw amplitude; the whole field is rescaled to the requested
    /// disparity contrast.
    pub amplitude: f64,
}

/// Depth surface of a scene, with its kind-specific parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SurfaceKind {
    /// Flat surface: disparity is exactly the plane-induced affine map.
    Plane { plane: Plane3D<f64> },
    /// Partial cylinder bulging toward the camera, axis vertical through the
    /// principal column; flat wings where the cylinder ends.
    Cylinder { axis_depth_m: f64, radius_m: f64 },
    /// Base plane plus smooth disparity bumps scaled to `contrast_px`.
    FaceProxy {
        base: Plane3D<f64>,
        bumps: Vec<Bump>,
        contrast_px: f64,
    },
    /// Nested fronto-parallel depth layers; `depths_m[0]` is the background,
    /// each following depth fills a smaller centered rectangle.
    Layered { depths_m: Vec<f64> },
}

impl SurfaceKind {
    pub fn name(&self) -> &'static str {
        match self {
            SurfaceKind::Plane { .. } => "plane",
            SurfaceKind::Cylinder { .. } => "cylinder",
            SurfaceKind::FaceProxy { .. } => "face_proxy",
            SurfaceKind::Layered { .. } => "layered",
        }
    }
}

/// Where the left-view texture comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum TextureSource {
    /// Band-limited value noise seeded by the render seed.
    Procedural,
    /// Grayscale PGM on disk.
    FromFile { path: String },
}

/// Complete description of one synthetic scene.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SceneSpec {
    #[serde(flatten)]
    pub kind: SurfaceKind,
    pub texture: TextureSource,
    pub calib: Calibration<f64>,
    pub width: usize,
    pub height: usize,
    /// Declared disparity cap; rendering fails if the surface exceeds it.
    pub max_disparity_px: f64,
}

/// Rendered stereo pair with ground truth.
#[derive(Clone, Debug, PartialEq)]
pub struct RenderedStereo<T> {
    pub left: GrayImage<T>,
    pub right: GrayImage<T>,
    /// Disparity on the right-view grid: `right(u,v) = left(u + d(u,v), v)`.
    pub gt_disparity: Raster<T>,
    /// False where the right view had to clamp to the row edge.
    pub right_valid: BitRaster,
}

/// Renders the scene: texture as the left view, ground-truth disparity from
/// the surface, right view by sampling the left through that disparity.
pub fn render_stereo<T: Scalar>(spec: &SceneSpec, seed: u64) -> Result<RenderedStereo<T>> {
    spec.calib.validate()?;
    if spec.width < 2 || spec.height < 2 {
        return Err(Error::invalid("scene must be at least 2x2 pixels"));
    }
    if spec.calib.principal_u < 0.0
        || spec.calib.principal_u > (spec.width - 1) as f64
        || spec.calib.principal_v < 0.0
        || spec.calib.principal_v > (spec.height - 1) as f64
    {
        return Err(Error::invalid("principal point outside the image"));
    }

    let gt64 = surface_disparity(spec)?;
    for &d in gt64.data() {
        if !d.is_finite() || d <= 0.0 {
            return Err(Error::InvalidScene(
                "surface produces non-positive disparity (behind the camera)".into(),
            ));
        }
        if d > spec.max_disparity_px {
            return Err(Error::InvalidScene(format!(
                "disparity {d:.2} px exceeds the declared cap {}",
                spec.max_disparity_px
            )));
        }
    }

    let left: GrayImage<T> = match &spec.texture {
        TextureSource::Procedural => {
            texture::fbm_texture(spec.width, spec.height, seed, spec.width as f64 / 2.5)
        }
        TextureSource::FromFile { path } => {
            let img: GrayImage<T> = io::read_pgm(std::path::Path::new(path))?;
            if img.dims() != (spec.width, spec.height) {
                return Err(Error::DimensionMismatch(format!(
                    "texture file is {:?}, scene wants {}x{}",
                    img.dims(),
                    spec.width,
                    spec.height
                )));
            }
            img
        }
    };

    let gt_disparity: Raster<T> = gt64.cast();
    let (right, right_valid) = resample_columns(&left, &gt_disparity);

    Ok(RenderedStereo {
        left,
        right,
        gt_disparity,
        right_valid,
    })
}

/// Ground-truth disparity of the surface on the image grid.
fn surface_disparity(spec: &SceneSpec) -> Result<Raster<f64>> {
    let cal = &spec.calib;
    let bf = cal.baseline_m * cal.focal_px;
    let (width, height) = (spec.width, spec.height);

    let raster = match &spec.kind {
        SurfaceKind::Plane { plane } => {
            let affine = plane_to_affine(plane, cal)?;
            Raster::from_fn(width, height, |u, v| affine.eval_px(u, v))
        }
        SurfaceKind::Cylinder {
            axis_depth_m,
            radius_m,
        } => {
            // Lateral offset measured at the axis depth. The arc is anchored
            // at the frame edges: where the cylinder spans the frame the bend
            // runs edge to edge; a smaller radius leaves flat wings at the
            // axis depth.
            let px_to_m = axis_depth_m / cal.focal_px;
            let half_width_m = cal.principal_u.max((width - 1) as f64 - cal.principal_u) * px_to_m;
            let edge = (radius_m * radius_m - half_width_m * half_width_m)
                .max(0.0)
                .sqrt();
            let depth_profile = |u: usize| {
                let x_m = (u as f64 - cal.principal_u) * px_to_m;
                let bulge = (radius_m * radius_m - x_m * x_m).max(0.0).sqrt() - edge;
                axis_depth_m - bulge.max(0.0)
            };
            if *radius_m <= 0.0 || (0..width).any(|u| depth_profile(u) <= 0.0) {
                return Err(Error::InvalidScene(
                    "cylinder bulge reaches the camera".into(),
                ));
            }
            Raster::from_fn(width, height, |u, _| bf / depth_profile(u))
        }
        SurfaceKind::FaceProxy {
            base,
            bumps,
            contrast_px,
        } => {
            let affine = plane_to_affine(base, cal)?;
            let raw = Raster::from_fn(width, height, |u, v| {
                let xu = u as f64 / (width - 1) as f64;
                let xv = v as f64 / (height - 1) as f64;
                bumps
                    .iter()
                    .map(|b| {
                        let du = xu - b.center[0];
                        let dv = xv - b.center[1];
                        b.amplitude * (-(du * du + dv * dv) / (2.0 * b.sigma * b.sigma)).exp()
                    })
                    .sum::<f64>()
            });
            let (lo, hi) = raw
                .data()
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
                    (lo.min(x), hi.max(x))
                });
            let scale = if hi - lo > 1e-12 {
                contrast_px / (hi - lo)
            } else {
                0.0
            };
            let mid = (hi + lo) / 2.0;
            Raster::from_fn(width, height, |u, v| {
                affine.eval_px(u, v) + (raw.get(u, v) - mid) * scale
            })
        }
        SurfaceKind::Layered { depths_m } => {
            if depths_m.len() < 2 {
                return Err(Error::InvalidScene(
                    "layered surface needs at least two depths".into(),
                ));
            }
            if depths_m.iter().any(|&c| c <= 0.0) {
                return Err(Error::InvalidScene("layer depths must be positive".into()));
            }
            let n = depths_m.len();
            let disparities: Vec<f64> = depths_m.iter().map(|&c| bf / c).collect();
            Raster::from_fn(width, height, |u, v| {
                // Innermost nested rectangle containing the pixel wins.
                let mut level = 0usize;
                for k in 1..n {
                    let margin = k as f64 / (2.0 * n as f64);
                    let mu = (margin * width as f64) as usize;
                    let mv = (margin * height as f64) as usize;
                    if (mu..width - mu).contains(&u) && (mv..height - mv).contains(&v) {
                        level = k;
                    }
                }
                disparities[level]
            })
        }
    };
    Ok(raster)
}

/// Randomized parameter ranges for dataset scenes. Every bound is a plain
/// configuration value, not a measured constant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SceneDistributions {
    /// Plane slopes for flat spoofs and genuine base planes.
    pub plane_slope: [f64; 2],
    /// Plane depth range in meters for flat spoofs.
    pub plane_depth_m: [f64; 2],
    /// Disparity contrast of genuine bump fields, pixels.
    pub face_contrast_px: [f64; 2],
    /// Base depth range for genuine scenes, meters.
    pub face_depth_m: [f64; 2],
    /// Disparity step between genuine depth layers, pixels.
    pub layer_step_px: [f64; 2],
    /// Deviation of curved spoofs from their best-fit plane, pixels.
    pub cylinder_deviation_px: [f64; 2],
    /// Axis depth range for curved spoofs, meters.
    pub cylinder_depth_m: [f64; 2],
    /// Every n-th genuine scene is layered instead of a bump field.
    pub layered_every: usize,
}

impl Default for SceneDistributions {
    fn default() -> Self {
        Self {
            plane_slope: [-0.15, 0.15],
            plane_depth_m: [0.4, 1.0],
            face_contrast_px: [4.0, 12.0],
            face_depth_m: [0.5, 0.9],
            layer_step_px: [4.0, 10.0],
            cylinder_deviation_px: [2.0, 4.0],
            cylinder_depth_m: [0.5, 1.0],
            layered_every: 3,
        }
    }
}

/// Everything needed to generate a reproducible labeled dataset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetParams {
    pub n_genuine: usize,
    pub n_flat: usize,
    pub n_curved: usize,
    pub width: usize,
    pub height: usize,
    pub calib: Calibration<f64>,
    pub mask_mode: MaskMode,
    pub mask_shift_px: usize,
    pub mask_transmittance: f64,
    pub max_disparity_px: f64,
    pub distributions: SceneDistributions,
    pub master_seed: u64,
}

impl DatasetParams {
    /// Defaults for the given size and seed: centered principal point,
    /// 10 mm baseline, 1000 px focal length, independent 50% masks.
    pub fn new(width: usize, height: usize, master_seed: u64) -> Self {
        Self {
            n_genuine: 0,
            n_flat: 0,
            n_curved: 0,
            width,
            height,
            calib: Calibration {
                baseline_m: 0.01,
                focal_px: 1000.0,
                principal_u: (width - 1) as f64 / 2.0,
                principal_v: (height - 1) as f64 / 2.0,
            },
            mask_mode: MaskMode::Independent,
            mask_shift_px: 0,
            mask_transmittance: 0.5,
            max_disparity_px: 32.0,
            distributions: SceneDistributions::default(),
            master_seed,
        }
    }

    pub fn with_counts(mut self, genuine: usize, flat: usize, curved: usize) -> Self {
        self.n_genuine = genuine;
        self.n_flat = flat;
        self.n_curved = curved;
        self
    }

    pub fn total(&self) -> usize {
        self.n_genuine + self.n_flat + self.n_curved
    }

    fn label_of(&self, index: usize) -> CaptureLabel {
        if index < self.n_genuine {
            CaptureLabel::Genuine3d
        } else if index < self.n_genuine + self.n_flat {
            CaptureLabel::SpoofFlat
        } else {
            CaptureLabel::SpoofCurved
        }
    }
}

/// Reproducibility record stored with every capture.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub master_seed: u64,
    pub index: usize,
    pub render_seed: u64,
    pub mask_seed: u64,
    pub scene: SceneSpec,
}

/// A coded capture with its label and diagnostics.
///
/// The ground-truth disparity is for diagnostics only; the scoring pipeline
/// never reads it.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledCapture<T> {
    pub id: String,
    pub coded: CodedImage<T>,
    pub mask: CodingMask,
    pub label: CaptureLabel,
    pub gt_disparity: Raster<T>,
    pub provenance: Provenance,
}

/// Draws the scene description for one capture index.
pub fn scene_for_index(params: &DatasetParams, index: usize) -> SceneSpec {
    let label = params.label_of(index);
    let dist = &params.distributions;
    let mut rng = rng::seeded(derive_seed(derive_seed(params.master_seed, index as u64), 3));
    let mut uniform = |range: [f64; 2]| rng::next_range_f64(&mut rng, range[0], range[1]);

    let kind = match label {
        CaptureLabel::SpoofFlat => SurfaceKind::Plane {
            plane: Plane3D {
                slope_x: uniform(dist.plane_slope),
                slope_y: uniform(dist.plane_slope),
                depth_m: uniform(dist.plane_depth_m),
            },
        },
        CaptureLabel::SpoofCurved => {
            let axis_depth_m = uniform(dist.cylinder_depth_m);
            let deviation = uniform(dist.cylinder_deviation_px);
            // Bend spanning the whole frame, edges at the axis depth. The
            // crest-to-edge disparity variation equals `deviation`; solving
            // the sagitta relation for the radius keeps the arc that wide.
            let bf = params.calib.baseline_m * params.calib.focal_px;
            let sagitta_m =
                deviation * axis_depth_m * axis_depth_m / (bf + deviation * axis_depth_m);
            let half_width_m = (params.width - 1) as f64 / 2.0 * axis_depth_m
                / params.calib.focal_px;
            let radius_m = (half_width_m * half_width_m + sagitta_m * sagitta_m)
                / (2.0 * sagitta_m);
            SurfaceKind::Cylinder {
                axis_depth_m,
                radius_m,
            }
        }
        CaptureLabel::Genuine3d => {
            let genuine_index = index;
            if dist.layered_every > 0 && (genuine_index + 1) % dist.layered_every == 0 {
                let bf = params.calib.baseline_m * params.calib.focal_px;
                let background_m = uniform([dist.face_depth_m[0].max(0.55), dist.face_depth_m[1]]);
                let step_px = uniform(dist.layer_step_px);
                let foreground_m = bf / (bf / background_m + step_px);
                SurfaceKind::Layered {
                    depths_m: vec![background_m, foreground_m],
                }
            } else {
                let base = Plane3D {
                    slope_x: uniform(dist.plane_slope),
                    slope_y: uniform(dist.plane_slope),
                    depth_m: uniform(dist.face_depth_m),
                };
                let contrast_px = uniform(dist.face_contrast_px);
                // Bumps on a jittered 3x3 grid with alternating signs: relief
                // covers the whole frame the way a face does (brow, nose,
                // cheeks), instead of leaving planar gaps between features.
                let mut bumps = Vec::with_capacity(9);
                for gy in 0..3 {
                    for gx in 0..3 {
                        let jitter = 0.08;
                        let cx = (gx as f64 + 0.5) / 3.0
                            + rng::next_range_f64(&mut rng, -jitter, jitter);
                        let cy = (gy as f64 + 0.5) / 3.0
                            + rng::next_range_f64(&mut rng, -jitter, jitter);
                        let sign = if (gx + gy) % 2 == 0 { 1.0 } else { -1.0 };
                        bumps.push(Bump {
                            center: [cx, cy],
                            sigma: rng::next_range_f64(&mut rng, 0.14, 0.22),
                            amplitude: sign,
                        });
                    }
                }
                SurfaceKind::FaceProxy {
                    base,
                    bumps,
                    contrast_px,
                }
            }
        }
    };

    SceneSpec {
        kind,
        texture: TextureSource::Procedural,
        calib: params.calib,
        width: params.width,
        height: params.height,
        max_disparity_px: params.max_disparity_px,
    }
}

/// Generates one capture, fully determined by (params, index).
pub fn generate_capture<T: Scalar>(
    params: &DatasetParams,
    index: usize,
) -> Result<LabeledCapture<T>> {
    let label = params.label_of(index);
    let capture_seed = derive_seed(params.master_seed, index as u64);
    let render_seed = derive_seed(capture_seed, 1);
    let mask_seed = derive_seed(capture_seed, 2);

    let scene = scene_for_index(params, index);
    let rendered: RenderedStereo<T> = render_stereo(&scene, render_seed)?;
    let mask = generate_mask(
        params.width,
        params.height,
        params.mask_transmittance,
        params.mask_mode,
        params.mask_shift_px,
        mask_seed,
    )?;
    let coded = encode(&rendered.left, &rendered.right, &mask)?;

    Ok(LabeledCapture {
        id: format!("{index:05}_{}", label.id_tag()),
        coded,
        mask,
        label,
        gt_disparity: rendered.gt_disparity,
        provenance: Provenance {
            master_seed: params.master_seed,
            index,
            render_seed,
            mask_seed,
            scene,
        },
    })
}

/// Generates the whole dataset in memory, in index order.
///
/// Capture generation is parallel but keyed by index, so the result does not
/// depend on the thread count.
pub fn make_dataset<T: Scalar>(params: &DatasetParams) -> Result<Vec<LabeledCapture<T>>> {
    if params.total() == 0 {
        return Err(Error::invalid("dataset needs at least one capture"));
    }
    (0..params.total())
        .into_par_iter()
        .map(|index| generate_capture(params, index))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_params() -> DatasetParams {
        DatasetParams::new(128, 96, 42)
    }

    fn plane_spec(slope_x: f64, slope_y: f64, depth_m: f64) -> SceneSpec {
        let params = base_params();
        SceneSpec {
            kind: SurfaceKind::Plane {
                plane: Plane3D {
                    slope_x,
                    slope_y,
                    depth_m,
                },
            },
            texture: TextureSource::Procedural,
            calib: params.calib,
            width: params.width,
            height: params.height,
            max_disparity_px: params.max_disparity_px,
        }
    }

    #[test]
    fn fronto_parallel_plane_renders_constant_disparity() {
        let spec = plane_spec(0.0, 0.0, 0.5);
        let rendered: RenderedStereo<f64> = render_stereo(&spec, 1).unwrap();
        let expected = 0.01 * 1000.0 / 0.5;
        assert!(rendered
            .gt_disparity
            .data()
            .iter()
            .all(|&d| d == expected));
    }

    #[test]
    fn layered_scene_has_the_exact_disparity_step() {
        let params = base_params();
        let (c_bg, c_fg) = (0.8, 0.5);
        let spec = SceneSpec {
            kind: SurfaceKind::Layered {
                depths_m: vec![c_bg, c_fg],
            },
            texture: TextureSource::Procedural,
            calib: params.calib,
            width: params.width,
            height: params.height,
            max_disparity_px: params.max_disparity_px,
        };
        let rendered: RenderedStereo<f64> = render_stereo(&spec, 2).unwrap();
        let bf = 0.01 * 1000.0;
        let expected_step = bf * (1.0 / c_fg - 1.0 / c_bg);
        let d_bg = rendered.gt_disparity.get(0, 0);
        let d_fg = rendered.gt_disparity.get(64, 48);
        assert!((d_bg - bf / c_bg).abs() < 1e-12);
        assert!((d_fg - d_bg - expected_step).abs() < 1e-12);
        let mut distinct: Vec<u64> = rendered
            .gt_disparity
            .data()
            .iter()
            .map(|d| d.to_bits())
            .collect();
        distinct.sort_unstable();
        distinct.dedup();
        assert_eq!(distinct.len(), 2, "piecewise-constant with two levels");
    }

    #[test]
    fn cylinder_disparity_is_not_affine() {
        let params = base_params();
        let spec = SceneSpec {
            kind: SurfaceKind::Cylinder {
                axis_depth_m: 0.7,
                radius_m: 0.2,
            },
            texture: TextureSource::Procedural,
            calib: params.calib,
            width: params.width,
            height: params.height,
            max_disparity_px: params.max_disparity_px,
        };
        let rendered: RenderedStereo<f64> = render_stereo(&spec, 3).unwrap();
        let gt = &rendered.gt_disparity;
        let mut max_second_diff = 0.0f64;
        let v = 10;
        for u in 1..params.width - 1 {
            let dd = gt.get(u + 1, v) - 2.0 * gt.get(u, v) + gt.get(u - 1, v);
            max_second_diff = max_second_diff.max(dd.abs());
        }
        assert!(
            max_second_diff > 1e-6,
            "cylinder should bend the disparity profile"
        );
    }

    #[test]
    fn scenes_behind_the_camera_or_out_of_range_fail() {
        // 4 mm depth puts the disparity far beyond the cap.
        let too_close = plane_spec(0.0, 0.0, 0.004);
        assert!(matches!(
            render_stereo::<f64>(&too_close, 4),
            Err(Error::InvalidScene(_))
        ));
    }

    #[test]
    fn rendering_is_deterministic() {
        let spec = plane_spec(0.05, -0.02, 0.6);
        let a: RenderedStereo<f64> = render_stereo(&spec, 9).unwrap();
        let b: RenderedStereo<f64> = render_stereo(&spec, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn right_view_is_the_left_sampled_through_the_disparity() {
        let spec = plane_spec(0.0, 0.0, 0.5);
        let rendered: RenderedStereo<f64> = render_stereo(&spec, 10).unwrap();
        // Constant disparity 20 px: integer shift, so the copy is exact.
        for v in 0..rendered.left.height() {
            for u in 0..rendered.left.width() - 20 {
                assert_eq!(rendered.right.get(u, v), rendered.left.get(u + 20, v));
                assert!(rendered.right_valid.get(u, v));
            }
            assert!(!rendered.right_valid.get(rendered.left.width() - 10, v));
        }
    }

    #[test]
    fn dataset_counts_labels_and_ids_line_up() {
        let params = base_params().with_counts(5, 3, 2);
        let captures: Vec<LabeledCapture<f64>> = make_dataset(&params).unwrap();
        assert_eq!(captures.len(), 10);
        let count = |label: CaptureLabel| captures.iter().filter(|c| c.label == label).count();
        assert_eq!(count(CaptureLabel::Genuine3d), 5);
        assert_eq!(count(CaptureLabel::SpoofFlat), 3);
        assert_eq!(count(CaptureLabel::SpoofCurved), 2);
        assert_eq!(captures[0].id, "00000_genuine");
        assert_eq!(captures[5].id, "00005_flat");
        assert_eq!(captures[9].id, "00009_curved");
    }

    #[test]
    fn dataset_generation_is_reproducible() {
        let params = base_params().with_counts(1, 1, 0);
        let a: Vec<LabeledCapture<f64>> = make_dataset(&params).unwrap();
        let b: Vec<LabeledCapture<f64>> = make_dataset(&params).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn empty_dataset_is_rejected() {
        let params = base_params();
        assert!(matches!(
            make_dataset::<f64>(&params),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn genuine_mix_includes_layered_scenes() {
        let params = base_params().with_counts(8, 0, 0);
        let kinds: Vec<&'static str> = (0..8)
            .map(|i| scene_for_index(&params, i).kind.name())
            .collect();
        assert!(kinds.contains(&"face_proxy"));
        assert!(kinds.contains(&"layered"));
    }

    #[test]
    fn face_proxy_contrast_matches_the_request() {
        let params = base_params().with_counts(3, 0, 0);
        for index in 0..3 {
            let spec = scene_for_index(&params, index);
            if let SurfaceKind::FaceProxy { contrast_px, .. } = spec.kind {
                let rendered: RenderedStereo<f64> = render_stereo(&spec, 77).unwrap();
                // Bump contribution is exact; the tilted base adds on top.
                let (lo, hi) = rendered
                    .gt_disparity
                    .data()
                    .iter()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
                        (lo.min(x), hi.max(x))
                    });
                assert!(
                    hi - lo >= contrast_px * 0.8,
                    "contrast {} for requested {contrast_px}",
                    hi - lo
                );
            }
        }
    }

    #[test]
    fn scene_provenance_round_trips_through_json() {
        let params = base_params().with_counts(2, 1, 1);
        for index in [0, 2, 3] {
            let spec = scene_for_index(&params, index);
            let text = serde_json::to_string(&spec).unwrap();
            let back: SceneSpec = serde_json::from_str(&text).unwrap();
            assert_eq!(back, spec);
        }
    }
}
