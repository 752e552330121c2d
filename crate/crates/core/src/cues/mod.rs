//! Depth cues painted onto the height field: colormaps, iso-lines, shading,
//! ambient occlusion, and the final composite with the vessel layer.

mod ao;
mod composite;
mod iso;

pub use ao::{ambient_occlusion, ao_kernel};
pub use composite::{base_colors, composite, compute_layers, shading_normals, Layers};
pub use iso::draw_isolines;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rgb = [f64; 3];

/// Depth colormap applied to the VSS only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColorMapKind {
    /// Hue sweep red (near) through green to blue (far).
    #[serde(alias = "cd")]
    Chromadepth,
    /// Linear blend red (near) to blue (far).
    #[serde(alias = "pcd", alias = "pseudo-chromadepth")]
    PseudoChromadepth,
    /// White (near) to black (far).
    #[serde(alias = "dmd", alias = "dark_means_deep", alias = "monochrome")]
    Mono,
    /// Neutral gray, depth carried by shading alone.
    None,
}

impl ColorMapKind {
    pub fn parse(s: &str) -> Option<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_string())).ok()
    }
}

/// Colormap for the vessel-surface functional parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamMap {
    /// Five discrete steps from dark green to yellow.
    GreenYellow5,
    /// Continuous dark green to yellow.
    GreenYellow,
    /// Ignore the attribute and use the neutral vessel color.
    Neutral,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CueConfig {
    pub colormap: ColorMapKind,
    pub iso_count: usize,
    /// Line width in pixels.
    pub iso_width: f64,
    /// Direction towards the light, view space (x right, y down, z away).
    pub light_dir: [f64; 3],
    pub ambient: f64,
    pub diffuse: f64,
    pub specular: f64,
    pub shininess: f64,
    pub ao_enabled: bool,
    /// Sampling radius in pixels.
    pub ao_radius: f64,
    pub ao_samples: usize,
    pub ao_strength: f64,
    /// Minimum occluder height in pixels.
    pub ao_bias: f64,
    pub param_map: ParamMap,
    /// Linear RGB colors.
    pub vessel_color: Rgb,
    pub background_color: Rgb,
    pub line_color: Rgb,
}

impl Default for CueConfig {
    fn default() -> Self {
        CueConfig {
            colormap: ColorMapKind::PseudoChromadepth,
            iso_count: 12,
            iso_width: 1.5,
            light_dir: [-0.35, -0.45, -1.0],
            ambient: 0.2,
            diffuse: 0.75,
            specular: 0.2,
            shininess: 32.0,
            ao_enabled: true,
            ao_radius: 10.0,
            ao_samples: 16,
            ao_strength: 0.8,
            ao_bias: 0.5,
            param_map: ParamMap::GreenYellow5,
            vessel_color: [0.6, 0.6, 0.6],
            background_color: [0.02, 0.02, 0.02],
            line_color: [0.2, 0.2, 0.2],
        }
    }
}

impl CueConfig {
    pub fn validate(&self) -> Result<()> {
        let check = |ok: bool, name: &str, reason: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::invalid(format!("cues.{name}"), reason))
            }
        };
        check(
            self.iso_width > 0.0 && self.iso_width.is_finite(),
            "iso_width",
            "must be > 0",
        )?;
        check(
            Vector3::from(self.light_dir).norm() > 0.0
                && self.light_dir.iter().all(|v| v.is_finite()),
            "light_dir",
            "must be a finite non-zero vector",
        )?;
        for (name, v) in [
            ("ambient", self.ambient),
            ("diffuse", self.diffuse),
            ("specular", self.specular),
        ] {
            check(v >= 0.0 && v.is_finite(), name, "must be >= 0")?;
        }
        check(self.shininess > 0.0, "shininess", "must be > 0")?;
        check(
            (0.0..=1.0).contains(&self.ao_strength),
            "ao_strength",
            "must lie in [0, 1]",
        )?;
        if self.ao_enabled {
            check(
                self.ao_samples >= 1,
                "ao_samples",
                "must be >= 1 when AO is enabled",
            )?;
            check(
                self.ao_radius >= 1.0 && self.ao_radius.is_finite(),
                "ao_radius",
                "must be >= 1 pixel",
            )?;
        }
        check(self.ao_bias >= 0.0, "ao_bias", "must be >= 0")?;
        for (name, c) in [
            ("vessel_color", self.vessel_color),
            ("background_color", self.background_color),
            ("line_color", self.line_color),
        ] {
            check(
                c.iter().all(|v| (0.0..=1.0).contains(v)),
                name,
                "components must lie in [0, 1]",
            )?;
        }
        Ok(())
    }

    pub fn light(&self) -> Vector3<f64> {
        Vector3::from(self.light_dir).normalize()
    }
}

/// HSV to RGB, hue in degrees.
pub fn hsv_to_rgb(hue: f64, s: f64, v: f64) -> Rgb {
    let c = v * s;
    let h = hue.rem_euclid(360.0) / 60.0;
    let x = c * (1.0 - (h % 2.0 - 1.0).abs());
    let m = v - c;
    let (r, g, b) = match h as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    [r + m, g + m, b + m]
}

const NEUTRAL_GRAY: Rgb = [0.7, 0.7, 0.7];

/// Maps normalized depth to a linear-RGB color. Inputs outside `[0,1]` are
/// clamped.
pub fn apply_colormap(z: f64, kind: ColorMapKind) -> Rgb {
    let z = if z.is_nan() { 1.0 } else { z.clamp(0.0, 1.0) };
    match kind {
        ColorMapKind::Chromadepth => hsv_to_rgb(240.0 * z, 1.0, 1.0),
        ColorMapKind::PseudoChromadepth => [1.0 - z, 0.0, z],
        ColorMapKind::Mono => [1.0 - z; 3],
        ColorMapKind::None => NEUTRAL_GRAY,
    }
}

const DARK_GREEN: Rgb = [0.05, 0.35, 0.08];
const YELLOW: Rgb = [0.95, 0.85, 0.05];

fn lerp(a: Rgb, b: Rgb, t: f64) -> Rgb {
    [
        a[0] + (b[0] - a[0]) * t,
        a[1] + (b[1] - a[1]) * t,
        a[2] + (b[2] - a[2]) * t,
    ]
}

/// Vessel-surface color for a functional parameter value in `[0,1]`.
pub fn param_color(value: f64, map: ParamMap, neutral: Rgb) -> Rgb {
    let v = value.clamp(0.0, 1.0);
    match map {
        ParamMap::GreenYellow5 => {
            let step = (v * 5.0).floor().min(4.0);
            lerp(DARK_GREEN, YELLOW, step / 4.0)
        }
        ParamMap::GreenYellow => lerp(DARK_GREEN, YELLOW, v),
        ParamMap::Neutral => neutral,
    }
}

/// Blinn-Phong shading with a white light from `cfg.light_dir` and the
/// viewer along `-z`.
pub fn shade(base: Rgb, normal: &Vector3<f64>, cfg: &CueConfig) -> Rgb {
    let l = cfg.light();
    let n_dot_l = normal.dot(&l);
    let lambert = n_dot_l.max(0.0);
    let spec = if n_dot_l > 0.0 && cfg.specular > 0.0 {
        let h = (l + Vector3::new(0.0, 0.0, -1.0)).normalize();
        cfg.specular * normal.dot(&h).max(0.0).powf(cfg.shininess)
    } else {
        0.0
    };
    let k = cfg.ambient + cfg.diffuse * lambert;
    base.map(|c| c * k + spec)
}

/// Linear to sRGB-encoded 8-bit.
pub fn to_srgb8(c: f64) -> u8 {
    let c = c.clamp(0.0, 1.0);
    let s = if c <= 0.003_130_8 {
        12.92 * c
    } else {
        1.055 * c.powf(1.0 / 2.4) - 0.055
    };
    (s * 255.0).round() as u8
}
