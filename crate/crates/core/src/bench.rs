//! Timing harness for the VSS stages over camera presets and contour strides.
//!
//! Vessel rasterization happens once per preset and is not timed; each timed
//! run starts from the stored depth buffer and covers linearization through
//! compositing.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::contour::{build_void_space_map, region_stats, VoidSpaceMap};
use crate::error::{Error, Result};
use crate::pipeline::{render_scene, FrameParams, PipelineError, SceneInput};
use crate::scene::{self, Camera, DepthImage, Mesh};
use crate::synthesis::{interpolate_void_depth, IdwParams, Source};

/// Relative spread (IQR / median) above which a cell is flagged as noisy.
pub const SPREAD_LIMIT: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    Far,
    Medium,
    Close,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::Far, Preset::Medium, Preset::Close];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Far => "far",
            Preset::Medium => "medium",
            Preset::Close => "close",
        }
    }

    /// Camera distance as a fraction of the distance that fits the whole
    /// bounding sphere in view.
    fn distance_factor(self) -> f64 {
        match self {
            Preset::Far => 1.0,
            Preset::Medium => 0.5,
            Preset::Close => 0.3,
        }
    }
}

/// Camera for a preset, looking at the mesh's bounding-box center from the
/// +z side with the world y axis up.
pub fn preset_camera(mesh: &Mesh, preset: Preset, width: usize, height: usize) -> Result<Camera> {
    let (lo, hi) = mesh.bounds().ok_or(Error::EmptyScene)?;
    let center = [0, 1, 2].map(|k| 0.5 * (lo[k] + hi[k]));
    let radius = 0.5
        * (0..3)
            .map(|k| (hi[k] - lo[k]).powi(2))
            .sum::<f64>()
            .sqrt()
            .max(1e-6);
    let vfov_deg: f64 = 45.0;
    let half = (0.5 * vfov_deg).to_radians();
    let fit = radius / half.sin();
    let dist = fit * preset.distance_factor();
    Ok(Camera {
        position: [center[0], center[1], center[2] + dist],
        target: center,
        up: [0.0, 1.0, 0.0],
        vfov_deg,
        near: (dist - 1.5 * radius).max(0.01 * dist),
        far: dist + 1.5 * radius,
        width,
        height,
    })
}

/// Number of separate foreground runs along the image border, i.e. how often
/// the silhouette crosses the frame edge.
pub fn border_crossings(depth: &DepthImage) -> usize {
    let (w, h) = (depth.width, depth.height);
    if w == 0 || h == 0 {
        return 0;
    }
    let mut ring: Vec<(usize, usize)> = (0..w).map(|x| (x, 0)).collect();
    ring.extend((1..h).map(|y| (w - 1, y)));
    if h > 1 {
        ring.extend((0..w - 1).rev().map(|x| (x, h - 1)));
    }
    if w > 1 {
        ring.extend((1..h - 1).rev().map(|y| (0, y)));
    }
    let fg: Vec<bool> = ring
        .iter()
        .map(|&(x, y)| !depth.background[depth.index(x, y)])
        .collect();
    if fg.iter().all(|&f| f) {
        return 1;
    }
    (0..fg.len())
        .filter(|&i| fg[i] && !fg[(i + fg.len() - 1) % fg.len()])
        .count()
}

fn check_silhouette(preset: Preset, crossings: usize, medium: Option<usize>) -> Option<String> {
    let ok = match preset {
        Preset::Far => crossings == 0,
        Preset::Medium => crossings >= 1,
        Preset::Close => crossings >= 2 && medium.is_none_or(|m| crossings > m),
    };
    (!ok).then(|| {
        format!(
            "{} preset: silhouette crosses the frame border {crossings} time(s)",
            preset.name()
        )
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub width: usize,
    pub height: usize,
    pub steps: Vec<usize>,
    pub repeats: usize,
    pub presets: Vec<Preset>,
    /// Everything but the camera and the stride.
    pub base: BaseParams,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BaseParams {
    pub p: f64,
    pub cues: crate::cues::CueConfig,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            width: 1280,
            height: 720,
            steps: vec![1, 3, 5],
            repeats: 5,
            presets: Preset::ALL.to_vec(),
            base: BaseParams {
                p: 2.0,
                ..BaseParams::default()
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    /// Linearize through composite.
    pub median_ms: f64,
    pub iqr_ms: f64,
    pub spread: f64,
    pub noisy: bool,
    pub interpolation_median_ms: f64,
    pub interpolation_iqr_ms: f64,
    pub runs_ms: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PresetReport {
    pub regions: usize,
    pub max_samples: usize,
    pub border_crossings: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
    pub camera: Camera,
    pub steps: BTreeMap<usize, CellReport>,
}

/// `{preset: {regions, max_samples, steps: {step: {median_ms, iqr_ms, ...}}}}`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BenchReport(pub BTreeMap<String, PresetReport>);

/// Median and interquartile range, quartiles by linear interpolation.
pub fn median_iqr(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let q = |f: f64| {
        let pos = f * (v.len() - 1) as f64;
        let (i, t) = (pos.floor() as usize, pos.fract());
        let j = (i + 1).min(v.len() - 1);
        v[i] + t * (v[j] - v[i])
    };
    (q(0.5), q(0.75) - q(0.25))
}

/// The rasterized frame stored as depth-buffer values, as a GPU would hand it over.
pub fn depth_buffer_input(mesh: &Mesh, camera: &Camera) -> Result<SceneInput> {
    let mut image = scene::rasterize(mesh, camera)?;
    for (d, &bg) in image.depth.iter_mut().zip(&image.background) {
        if !bg {
            *d = scene::depth_to_ndc(*d, camera.near, camera.far).clamp(0.0, 1.0);
        }
    }
    Ok(SceneInput::NdcDepth {
        image,
        near: camera.near,
        far: camera.far,
    })
}

fn stage_err(e: PipelineError) -> Error {
    log::error!("benchmark frame failed in {}", e.stage);
    e.source
}

/// Times every (preset, step) cell sequentially.
pub fn run_benchmark(mesh: &Mesh, cfg: &BenchConfig) -> Result<BenchReport> {
    if cfg.repeats == 0 {
        return Err(Error::invalid("repeats", "must be >= 1"));
    }
    for &step in &cfg.steps {
        IdwParams {
            p: cfg.base.p,
            step,
        }
        .validate()?;
    }
    let mut report = BenchReport::default();
    let mut medium_crossings = None;
    for &preset in &cfg.presets {
        let camera = preset_camera(mesh, preset, cfg.width, cfg.height)?;
        let input = depth_buffer_input(mesh, &camera)?;
        let SceneInput::NdcDepth { image, .. } = &input else {
            unreachable!()
        };
        let crossings = border_crossings(image);
        if preset == Preset::Medium {
            medium_crossings = Some(crossings);
        }
        let warning = check_silhouette(preset, crossings, medium_crossings);
        if let Some(w) = &warning {
            log::warn!("{w}");
        }

        let mut steps = BTreeMap::new();
        let mut stats = None;
        for &step in &cfg.steps {
            let params = FrameParams {
                camera: camera.clone(),
                idw: IdwParams {
                    p: cfg.base.p,
                    step,
                },
                cues: cfg.base.cues.clone(),
                relief_scale: None,
            };
            let mut total = Vec::with_capacity(cfg.repeats);
            let mut interp = Vec::with_capacity(cfg.repeats);
            for _ in 0..cfg.repeats {
                let start = Instant::now();
                let frame = render_scene(&input, &params).map_err(stage_err)?;
                total.push(start.elapsed().as_secs_f64() * 1e3);
                interp.push(frame.stats.stage_ms("interpolation").unwrap_or(0.0));
                stats.get_or_insert((frame.stats.region_count, frame.stats.max_samples));
            }
            let (median_ms, iqr_ms) = median_iqr(&total);
            let (interpolation_median_ms, interpolation_iqr_ms) = median_iqr(&interp);
            let spread = if median_ms > 0.0 {
                iqr_ms / median_ms
            } else {
                0.0
            };
            let noisy = cfg.repeats >= 5 && spread > SPREAD_LIMIT;
            if noisy {
                log::warn!(
                    "{} step {step}: spread {:.0}% exceeds {:.0}%",
                    preset.name(),
                    spread * 100.0,
                    SPREAD_LIMIT * 100.0
                );
            }
            steps.insert(
                step,
                CellReport {
                    median_ms,
                    iqr_ms,
                    spread,
                    noisy,
                    interpolation_median_ms,
                    interpolation_iqr_ms,
                    runs_ms: total,
                },
            );
        }
        let (regions, max_samples) = match stats {
            Some(s) => s,
            None => {
                let depth = scene::normalize_depth(&scene::linearize_image(
                    image,
                    camera.near,
                    camera.far,
                )?)?;
                let rs = region_stats(&build_void_space_map(&depth));
                (rs.region_count, rs.max_samples)
            }
        };
        report.0.insert(
            preset.name().to_string(),
            PresetReport {
                regions,
                max_samples,
                border_crossings: crossings,
                warning,
                camera,
                steps,
            },
        );
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepDeviation {
    pub step: usize,
    /// Mean and max of |z'(step) - z'(1)| over VSS pixels.
    pub mean_abs: f64,
    pub max_abs: f64,
}

/// Normalized depth and void map of a depth input, shared by every stride.
pub fn prepare_void_map(input: &SceneInput, camera: &Camera) -> Result<(DepthImage, VoidSpaceMap)> {
    let linear = match input {
        SceneInput::Mesh(mesh) => scene::rasterize(mesh, camera)?,
        SceneInput::NdcDepth { image, near, far } => scene::linearize_image(image, *near, *far)?,
        SceneInput::LinearDepth(image) => image.clone(),
    };
    let depth = scene::normalize_depth(&linear)?;
    let map = build_void_space_map(&depth);
    Ok((depth, map))
}

/// Height-field deviation of each stride from the full contour.
pub fn compare_step_artifacts(
    depth: &DepthImage,
    map: &VoidSpaceMap,
    p: f64,
    steps: &[usize],
) -> Result<Vec<StepDeviation>> {
    let reference = interpolate_void_depth(depth, map, &IdwParams { p, step: 1 })?;
    steps
        .iter()
        .map(|&step| {
            let field = if step == 1 {
                reference.clone()
            } else {
                interpolate_void_depth(depth, map, &IdwParams { p, step })?
            };
            let (mut sum, mut max, mut n) = (0.0, 0.0f64, 0usize);
            for i in 0..field.z.len() {
                if reference.source[i] == Source::Vss {
                    let d = (field.z[i] - reference.z[i]).abs();
                    sum += d;
                    max = max.max(d);
                    n += 1;
                }
            }
            Ok(StepDeviation {
                step,
                mean_abs: if n > 0 { sum / n as f64 } else { 0.0 },
                max_abs: max,
            })
        })
        .collect()
}
