//! Declarative render configuration loaded from JSON.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::cues::CueConfig;
use crate::error::{Error, Result};
use crate::scene::Camera;
use crate::synthesis::IdwParams;

/// Built-in procedural scenes, usable in place of a mesh file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SyntheticScene {
    TwoTubes,
    VesselTree,
}

/// Where the frame's geometry comes from. Exactly one of `mesh`,
/// `depth_map` and `synthetic` must be set.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InputConfig {
    pub mesh: Option<PathBuf>,
    /// Per-vertex scalar sidecar for `mesh`.
    pub scalars: Option<PathBuf>,
    pub depth_map: Option<PathBuf>,
    /// Planes for linearizing PNG depth maps.
    pub near: Option<f64>,
    pub far: Option<f64>,
    pub synthetic: Option<SyntheticScene>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RenderConfig {
    pub input: InputConfig,
    pub output: PathBuf,
    pub camera: Camera,
    pub idw: IdwParams,
    pub cues: CueConfig,
    /// Depth-to-pixel scale for normals and AO; `0.5 * max(width, height)`
    /// when unset.
    pub relief_scale: Option<f64>,
    pub dump_layers: bool,
    /// Directory for layer dumps; next to `output` when unset.
    pub layer_dir: Option<PathBuf>,
}

impl Default for RenderConfig {
    fn default() -> Self {
        RenderConfig {
            input: InputConfig {
                synthetic: Some(SyntheticScene::VesselTree),
                ..InputConfig::default()
            },
            output: PathBuf::from("vss.png"),
            camera: Camera::default(),
            idw: IdwParams::default(),
            cues: CueConfig::default(),
            relief_scale: None,
            dump_layers: false,
            layer_dir: None,
        }
    }
}

impl RenderConfig {
    pub fn validate(&self) -> Result<()> {
        self.idw.validate()?;
        self.cues.validate()?;
        self.camera.validate()?;
        let i = &self.input;
        let sources = [
            i.mesh.is_some(),
            i.depth_map.is_some(),
            i.synthetic.is_some(),
        ];
        if sources.iter().filter(|&&s| s).count() != 1 {
            return Err(Error::invalid(
                "input",
                "set exactly one of mesh, depth_map, synthetic",
            ));
        }
        if i.scalars.is_some() && i.mesh.is_none() {
            return Err(Error::invalid("input.scalars", "requires input.mesh"));
        }
        if let Some(k) = self.relief_scale {
            if !(k.is_finite() && k > 0.0) {
                return Err(Error::invalid("relief_scale", "must be > 0"));
            }
        }
        Ok(())
    }

    /// Resolves relative paths against `base`.
    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        for p in [
            self.input.mesh.as_mut(),
            self.input.scalars.as_mut(),
            self.input.depth_map.as_mut(),
            self.layer_dir.as_mut(),
            Some(&mut self.output),
        ]
        .into_iter()
        .flatten()
        {
            fix(p);
        }
    }

    pub fn layer_dir(&self) -> PathBuf {
        self.layer_dir.clone().unwrap_or_else(|| {
            self.output
                .parent()
                .map(Path::to_path_buf)
                .unwrap_or_default()
        })
    }
}

/// Parses a config from JSON text. Unknown keys and type mismatches fail
/// with the JSON path of the offending value.
pub fn parse_config_str(text: &str, origin: &Path) -> Result<RenderConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let cfg: RenderConfig = serde_path_to_error::deserialize(de).map_err(|e| Error::Config {
        path: origin.to_path_buf(),
        json_path: e.path().to_string(),
        message: e.inner().to_string(),
    })?;
    cfg.validate()?;
    Ok(cfg)
}

/// Loads a config file; relative paths inside it are taken relative to the
/// file's directory.
pub fn parse_config(path: &Path) -> Result<RenderConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut cfg = parse_config_str(&text, path)?;
    cfg.resolve_paths(path.parent().unwrap_or(Path::new(".")));
    Ok(cfg)
}
