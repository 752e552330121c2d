//! Frame orchestration: ingest, depth preparation, void-space synthesis and
//! depth cues, with per-stage timing.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::config::{InputConfig, RenderConfig, SyntheticScene};
use crate::contour::{label_void_spaces, region_stats, trace_contours, VoidSpaceMap};
use crate::cues::{
    ambient_occlusion, base_colors, composite, draw_isolines, shading_normals, CueConfig, Layers,
};
use crate::error::{Error, Result};
use crate::imageio::{self, RgbaImage};
use crate::scene::{self, Camera, DepthImage, Mesh};
use crate::synthesis::{default_relief_scale, interpolate_void_depth, HeightField, IdwParams};
use crate::synthetic;

/// Stage names in execution order.
pub const STAGES: [&str; 10] = [
    "ingest",
    "rasterize",
    "linearize",
    "normalize",
    "contours",
    "labeling",
    "interpolation",
    "normals",
    "cues",
    "composite",
];

/// A stage failure, tagged with the stage that raised it.
#[derive(Debug, thiserror::Error)]
#[error("{stage}: {source}")]
pub struct PipelineError {
    pub stage: &'static str,
    #[source]
    pub source: Error,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageTime {
    pub stage: &'static str,
    pub ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunStats {
    pub width: usize,
    pub height: usize,
    pub region_count: usize,
    pub max_samples: usize,
    /// Stages that ran, in order.
    pub stages: Vec<StageTime>,
    pub total_ms: f64,
}

impl RunStats {
    pub fn stage_ms(&self, stage: &str) -> Option<f64> {
        self.stages.iter().find(|s| s.stage == stage).map(|s| s.ms)
    }
}

/// Geometry for one frame.
#[derive(Debug, Clone)]
pub enum SceneInput {
    Mesh(Mesh),
    /// Depth-buffer values in `[0,1]` with the planes that produced them.
    NdcDepth {
        image: DepthImage,
        near: f64,
        far: f64,
    },
    /// View-axis distances.
    LinearDepth(DepthImage),
}

/// Per-frame parameters; `camera` is ignored for depth-map inputs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FrameParams {
    pub camera: Camera,
    pub idw: IdwParams,
    pub cues: CueConfig,
    pub relief_scale: Option<f64>,
}

impl From<&RenderConfig> for FrameParams {
    fn from(cfg: &RenderConfig) -> Self {
        FrameParams {
            camera: cfg.camera.clone(),
            idw: cfg.idw,
            cues: cfg.cues.clone(),
            relief_scale: cfg.relief_scale,
        }
    }
}

/// A rendered frame together with its intermediate products.
#[derive(Debug, Clone)]
pub struct Frame {
    pub image: RgbaImage,
    pub stats: RunStats,
    /// Normalized depth.
    pub depth: DepthImage,
    pub map: VoidSpaceMap,
    pub field: HeightField,
    pub layers: Layers,
}

struct Timer {
    stages: Vec<StageTime>,
}

impl Timer {
    fn run<T>(
        &mut self,
        stage: &'static str,
        f: impl FnOnce() -> Result<T>,
    ) -> std::result::Result<T, PipelineError> {
        let start = Instant::now();
        let out = f().map_err(|source| PipelineError { stage, source })?;
        self.stages.push(StageTime {
            stage,
            ms: start.elapsed().as_secs_f64() * 1e3,
        });
        Ok(out)
    }
}

pub fn synthetic_mesh(kind: SyntheticScene) -> Mesh {
    match kind {
        SyntheticScene::TwoTubes => synthetic::two_tube_scene(),
        SyntheticScene::VesselTree => synthetic::reference_vessel_tree(),
    }
}

/// Loads the configured input without rendering it.
pub fn load_input(input: &InputConfig) -> Result<SceneInput> {
    if let Some(kind) = input.synthetic {
        return Ok(SceneInput::Mesh(synthetic_mesh(kind)));
    }
    if let Some(path) = &input.mesh {
        return Ok(SceneInput::Mesh(scene::load_mesh(
            path,
            input.scalars.as_deref(),
        )?));
    }
    let path = input
        .depth_map
        .as_deref()
        .ok_or_else(|| Error::invalid("input", "no input configured"))?;
    load_depth_input(path, input.near, input.far)
}

fn load_depth_input(path: &Path, near: Option<f64>, far: Option<f64>) -> Result<SceneInput> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase);
    match ext.as_deref() {
        Some("pfm") => Ok(SceneInput::LinearDepth(scene::read_depth_pfm(path)?)),
        Some("png") => {
            let (near, far) = near.zip(far).ok_or(Error::MissingPlanes)?;
            Ok(SceneInput::NdcDepth {
                image: scene::read_depth_png_ndc(path)?,
                near,
                far,
            })
        }
        // Defer to the loader's own error.
        _ => scene::load_depth_map(path, near, far).map(SceneInput::LinearDepth),
    }
}

/// Renders one frame from already loaded geometry.
pub fn render_scene(
    input: &SceneInput,
    params: &FrameParams,
) -> std::result::Result<Frame, PipelineError> {
    render_with(input, params, Timer { stages: Vec::new() })
}

/// Loads the configured input and renders it.
pub fn render_frame(cfg: &RenderConfig) -> std::result::Result<Frame, PipelineError> {
    let mut timer = Timer { stages: Vec::new() };
    let input = timer.run("ingest", || {
        cfg.validate()?;
        load_input(&cfg.input)
    })?;
    render_with(&input, &FrameParams::from(cfg), timer)
}

fn render_with(
    input: &SceneInput,
    params: &FrameParams,
    mut timer: Timer,
) -> std::result::Result<Frame, PipelineError> {
    let start = Instant::now();
    let linear = match input {
        SceneInput::Mesh(mesh) => {
            timer.run("rasterize", || scene::rasterize(mesh, &params.camera))?
        }
        SceneInput::NdcDepth { image, near, far } => {
            timer.run("linearize", || scene::linearize_image(image, *near, *far))?
        }
        SceneInput::LinearDepth(image) => image.clone(),
    };
    let depth = timer.run("normalize", || scene::normalize_depth(&linear))?;
    let (w, h) = (depth.width, depth.height);
    let contours = timer.run("contours", || {
        Ok(trace_contours(&depth.foreground_mask(), w, h))
    })?;
    let map = timer.run("labeling", || Ok(label_void_spaces(&depth, &contours)))?;
    let field = timer.run("interpolation", || {
        interpolate_void_depth(&depth, &map, &params.idw)
    })?;
    let relief = params
        .relief_scale
        .unwrap_or_else(|| default_relief_scale(w, h));
    let normal = timer.run("normals", || shading_normals(&depth, &field, relief))?;
    let cues = &params.cues;
    let layers = timer.run("cues", || {
        cues.validate()?;
        Ok(Layers {
            base: base_colors(&depth, &field, cues)?,
            normal,
            ao: ambient_occlusion(&field, relief, cues),
            iso: draw_isolines(&field, cues.iso_count, cues.iso_width),
        })
    })?;
    let image = timer.run("composite", || composite(&depth, &field, &layers, cues))?;

    let rs = region_stats(&map);
    let ingest_ms = timer
        .stages
        .first()
        .filter(|s| s.stage == "ingest")
        .map_or(0.0, |s| s.ms);
    let stats = RunStats {
        width: w,
        height: h,
        region_count: rs.region_count,
        max_samples: rs.max_samples,
        stages: timer.stages,
        total_ms: ingest_ms + start.elapsed().as_secs_f64() * 1e3,
    };
    Ok(Frame {
        image,
        stats,
        depth,
        map,
        field,
        layers,
    })
}

impl Frame {
    /// Writes the debug layers into `dir`, file names prefixed by `stem`:
    /// height field (PFM), region ids (indexed PNG), contours (JSON), AO and
    /// iso-line coverage (grayscale PNG).
    pub fn dump_layers(&self, dir: &Path, stem: &str) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let path = |suffix: &str| dir.join(format!("{stem}_{suffix}"));
        let (w, h) = (self.field.width, self.field.height);
        let out = vec![
            path("heightfield.pfm"),
            path("regions.png"),
            path("contours.json"),
            path("ao.png"),
            path("iso.png"),
        ];
        self.field.write_pfm(&out[0])?;
        crate::contour::write_region_png(&self.map, &out[1])?;
        crate::contour::write_contours_json(&self.map.contours, &out[2])?;
        imageio::write_gray_png(&out[3], w, h, &self.layers.ao)?;
        imageio::write_gray_png(&out[4], w, h, &self.layers.iso)?;
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(cfg: &mut RenderConfig) {
        cfg.camera.width = 96;
        cfg.camera.height = 72;
    }

    #[test]
    fn stages_run_in_order() {
        let mut cfg = RenderConfig::default();
        cfg.input.synthetic = Some(SyntheticScene::TwoTubes);
        small(&mut cfg);
        let frame = render_frame(&cfg).unwrap();
        let names: Vec<&str> = frame.stats.stages.iter().map(|s| s.stage).collect();
        let expected: Vec<&str> = STAGES
            .iter()
            .copied()
            .filter(|s| *s != "linearize")
            .collect();
        assert_eq!(names, expected);
        assert_eq!(frame.image.width, 96);
        assert!(frame.stats.region_count >= 2);
    }

    #[test]
    fn all_background_fails_in_normalize() {
        let input = SceneInput::Mesh(Mesh::default());
        let err = render_scene(&input, &FrameParams::default()).unwrap_err();
        assert_eq!(err.stage, "normalize");
        assert!(matches!(err.source, Error::EmptyScene));
    }

    #[test]
    fn bad_params_fail_in_their_stage() {
        let img = DepthImage::from_depths(3, 1, &[Some(1.0), None, Some(2.0)]);
        let input = SceneInput::LinearDepth(img);
        let params = FrameParams {
            idw: IdwParams { p: 0.0, step: 1 },
            ..FrameParams::default()
        };
        assert_eq!(
            render_scene(&input, &params).unwrap_err().stage,
            "interpolation"
        );
    }

    #[test]
    fn ndc_input_is_linearized() {
        let near = 1.0;
        let far = 10.0;
        let zs = [Some(2.0), None, Some(4.0), Some(6.0)];
        let ndc: Vec<Option<f64>> = zs
            .iter()
            .map(|z| z.map(|z| scene::depth_to_ndc(z, near, far)))
            .collect();
        let input = SceneInput::NdcDepth {
            image: DepthImage::from_depths(4, 1, &ndc),
            near,
            far,
        };
        let frame = render_scene(&input, &FrameParams::default()).unwrap();
        assert!(frame.stats.stage_ms("linearize").is_some());
        assert!((frame.depth.depth[2] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn layer_dump_writes_every_file() {
        let mut cfg = RenderConfig::default();
        small(&mut cfg);
        let frame = render_frame(&cfg).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let files = frame.dump_layers(dir.path(), "frame").unwrap();
        assert_eq!(files.len(), 5);
        for f in files {
            assert!(std::fs::metadata(&f).unwrap().len() > 0, "{}", f.display());
        }
    }
}
