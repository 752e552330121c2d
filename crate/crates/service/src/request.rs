use serde::Serialize;
use vss_core::bench::{preset_camera, Preset};
use vss_core::cues::{ColorMapKind, CueConfig};
use vss_core::pipeline::FrameParams;
use vss_core::scene::{Camera, Mesh};
use vss_core::synthesis::IdwParams;

/// Largest accepted frame edge in pixels.
pub const MAX_EDGE: usize = 4096;

/// A rejected query parameter.
#[derive(Debug, Clone, PartialEq, thiserror::Error, Serialize)]
#[error("parameter `{param}`: {reason}")]
pub struct ParamError {
    pub param: String,
    pub reason: String,
}

fn param_err(param: &str, reason: impl Into<String>) -> ParamError {
    ParamError {
        param: param.to_string(),
        reason: reason.into(),
    }
}

/// One frame's camera and parameters, keyed exactly like the `/render` query.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrameRequest {
    pub px: f64,
    pub py: f64,
    pub pz: f64,
    pub tx: f64,
    pub ty: f64,
    pub tz: f64,
    pub ux: f64,
    pub uy: f64,
    pub uz: f64,
    pub fov: f64,
    pub p: f64,
    pub step: usize,
    pub cmap: ColorMapKind,
    pub iso: usize,
    pub ao: bool,
    pub w: usize,
    pub h: usize,
}

/// Axis-aligned scene bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bounds {
    pub min: [f64; 3],
    pub max: [f64; 3],
}

impl Bounds {
    fn center(&self) -> [f64; 3] {
        [0, 1, 2].map(|k| 0.5 * (self.min[k] + self.max[k]))
    }

    fn radius(&self) -> f64 {
        0.5 * (0..3)
            .map(|k| (self.max[k] - self.min[k]).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Near and far planes enclosing the bounding sphere as seen from `eye`.
    pub fn planes(&self, eye: [f64; 3]) -> (f64, f64) {
        let c = self.center();
        let d = (0..3).map(|k| (eye[k] - c[k]).powi(2)).sum::<f64>().sqrt();
        let r = self.radius().max(1e-6);
        let far = d + 1.5 * r;
        let near = (d - 1.5 * r).max(1e-3 * far);
        (near, far)
    }
}

impl FrameRequest {
    /// Far-preset view of `mesh` at 640×480 with default parameters.
    pub fn defaults_for(mesh: &Mesh) -> Self {
        let cam = preset_camera(mesh, Preset::Far, 640, 480).unwrap_or_default();
        let idw = IdwParams::default();
        let cues = CueConfig::default();
        FrameRequest {
            px: cam.position[0],
            py: cam.position[1],
            pz: cam.position[2],
            tx: cam.target[0],
            ty: cam.target[1],
            tz: cam.target[2],
            ux: cam.up[0],
            uy: cam.up[1],
            uz: cam.up[2],
            fov: cam.vfov_deg,
            p: idw.p,
            step: idw.step,
            cmap: cues.colormap,
            iso: cues.iso_count,
            ao: cues.ao_enabled,
            w: cam.width,
            h: cam.height,
        }
    }

    /// Overrides `defaults` with query pairs. Unknown, repeated or malformed
    /// parameters are errors naming the parameter.
    pub fn from_query(
        pairs: &[(String, String)],
        defaults: &FrameRequest,
    ) -> Result<Self, ParamError> {
        let mut req = defaults.clone();
        let mut seen: Vec<&str> = Vec::new();
        for (key, value) in pairs {
            if seen.contains(&key.as_str()) {
                return Err(param_err(key, "given more than once"));
            }
            seen.push(key);
            let real = |name: &str| -> Result<f64, ParamError> {
                value
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| param_err(name, format!("`{value}` is not a finite number")))
            };
            let count = |name: &str| -> Result<usize, ParamError> {
                value.parse::<usize>().map_err(|_| {
                    param_err(name, format!("`{value}` is not a non-negative integer"))
                })
            };
            match key.as_str() {
                "px" => req.px = real(key)?,
                "py" => req.py = real(key)?,
                "pz" => req.pz = real(key)?,
                "tx" => req.tx = real(key)?,
                "ty" => req.ty = real(key)?,
                "tz" => req.tz = real(key)?,
                "ux" => req.ux = real(key)?,
                "uy" => req.uy = real(key)?,
                "uz" => req.uz = real(key)?,
                "fov" => req.fov = real(key)?,
                "p" => req.p = real(key)?,
                "step" => req.step = count(key)?,
                "iso" => req.iso = count(key)?,
                "w" => req.w = count(key)?,
                "h" => req.h = count(key)?,
                "cmap" => {
                    req.cmap = ColorMapKind::parse(value)
                        .ok_or_else(|| param_err(key, format!("unknown colormap `{value}`")))?
                }
                "ao" => {
                    req.ao = match value.as_str() {
                        "1" | "true" => true,
                        "0" | "false" => false,
                        _ => return Err(param_err(key, "expected 0, 1, true or false")),
                    }
                }
                _ => return Err(param_err(key, "unknown parameter")),
            }
        }
        req.validate()?;
        Ok(req)
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        if self.p.is_nan() || self.p <= 0.0 {
            return Err(param_err("p", "must be > 0"));
        }
        if self.step < 1 {
            return Err(param_err("step", "must be >= 1"));
        }
        if !(self.fov > 0.0 && self.fov < 180.0) {
            return Err(param_err("fov", "must lie in (0, 180)"));
        }
        for (name, v) in [("w", self.w), ("h", self.h)] {
            if !(1..=MAX_EDGE).contains(&v) {
                return Err(param_err(name, format!("must lie in [1, {MAX_EDGE}]")));
            }
        }
        if self.iso > 1000 {
            return Err(param_err("iso", "must be <= 1000"));
        }
        let (p, t) = ([self.px, self.py, self.pz], [self.tx, self.ty, self.tz]);
        if p == t {
            return Err(param_err("tx", "target coincides with the camera position"));
        }
        let view = [0, 1, 2].map(|k| t[k] - p[k]);
        let up = [self.ux, self.uy, self.uz];
        let cross = [
            view[1] * up[2] - view[2] * up[1],
            view[2] * up[0] - view[0] * up[2],
            view[0] * up[1] - view[1] * up[0],
        ];
        let scale = view.iter().map(|v| v * v).sum::<f64>().sqrt()
            * up.iter().map(|v| v * v).sum::<f64>().sqrt();
        if cross.iter().map(|v| v * v).sum::<f64>().sqrt() <= 1e-9 * scale {
            return Err(param_err(
                "ux",
                "up vector is zero or parallel to the view direction",
            ));
        }
        Ok(())
    }

    pub fn camera(&self, bounds: &Bounds) -> Camera {
        let position = [self.px, self.py, self.pz];
        let (near, far) = bounds.planes(position);
        Camera {
            position,
            target: [self.tx, self.ty, self.tz],
            up: [self.ux, self.uy, self.uz],
            vfov_deg: self.fov,
            near,
            far,
            width: self.w,
            height: self.h,
        }
    }

    pub fn frame_params(&self, bounds: &Bounds) -> FrameParams {
        FrameParams {
            camera: self.camera(bounds),
            idw: IdwParams {
                p: self.p,
                step: self.step,
            },
            cues: CueConfig {
                colormap: self.cmap,
                iso_count: self.iso,
                ao_enabled: self.ao,
                ..CueConfig::default()
            },
            relief_scale: None,
        }
    }

    /// The `/render` query string for this request.
    pub fn to_query(&self) -> String {
        let value = serde_json::to_value(self).expect("request serializes");
        let obj = value.as_object().expect("request is an object");
        obj.iter()
            .map(|(k, v)| match v {
                serde_json::Value::String(s) => format!("{k}={s}"),
                serde_json::Value::Bool(b) => format!("{k}={}", u8::from(*b)),
                other => format!("{k}={other}"),
            })
            .collect::<Vec<_>>()
            .join("&")
    }
}
