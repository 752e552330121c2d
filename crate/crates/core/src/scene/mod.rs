//! Scene ingest: meshes, cameras, rasterization and depth-map loading.

mod depth;
mod obj;
mod raster;

pub use depth::{
    depth_to_ndc, linearize_depth, linearize_image, load_depth_map, normalize_depth,
    read_depth_pfm, read_depth_png_ndc,
};
pub use obj::{
    load_mesh, load_mesh_with, parse_obj, parse_scalars, to_obj, write_mesh, FacePolicy,
};
pub use raster::rasterize;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Depth stored in background pixels. The background mask is authoritative;
/// this value only keeps stray reads from looking like geometry.
pub const BACKGROUND_DEPTH: f64 = f64::INFINITY;

/// A pinhole camera with its image size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Camera {
    pub position: [f64; 3],
    pub target: [f64; 3],
    pub up: [f64; 3],
    pub vfov_deg: f64,
    pub near: f64,
    pub far: f64,
    pub width: usize,
    pub height: usize,
}

impl Default for Camera {
    fn default() -> Self {
        Camera {
            position: [0.0, 0.0, 5.0],
            target: [0.0, 0.0, 0.0],
            up: [0.0, 1.0, 0.0],
            vfov_deg: 45.0,
            near: 0.1,
            far: 100.0,
            width: 640,
            height: 480,
        }
    }
}

/// Orthonormal camera frame: `right`, `down` and `forward` span view space,
/// with view-space z growing away from the eye.
#[derive(Debug, Clone, Copy)]
pub struct ViewBasis {
    pub eye: Vector3<f64>,
    pub right: Vector3<f64>,
    pub down: Vector3<f64>,
    pub forward: Vector3<f64>,
    /// Focal length in pixels.
    pub focal: f64,
}

impl ViewBasis {
    pub fn to_view(&self, p: &Vector3<f64>) -> Vector3<f64> {
        let d = p - self.eye;
        Vector3::new(d.dot(&self.right), d.dot(&self.down), d.dot(&self.forward))
    }

    pub fn dir_to_view(&self, v: &Vector3<f64>) -> Vector3<f64> {
        Vector3::new(v.dot(&self.right), v.dot(&self.down), v.dot(&self.forward))
    }
}

impl Camera {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidCamera(msg.to_string()));
        let finite = self
            .position
            .iter()
            .chain(&self.target)
            .chain(&self.up)
            .chain([&self.vfov_deg, &self.near, &self.far])
            .all(|v| v.is_finite());
        if !finite {
            return bad("non-finite value");
        }
        if !(self.vfov_deg > 0.0 && self.vfov_deg < 180.0) {
            return bad("vfov_deg must lie in (0, 180)");
        }
        if self.near <= 0.0 {
            return bad("near must be positive");
        }
        if self.far <= self.near {
            return bad("far must exceed near");
        }
        if self.width == 0 || self.height == 0 {
            return bad("width and height must be at least 1");
        }
        let forward = Vector3::from(self.target) - Vector3::from(self.position);
        if forward.norm() == 0.0 {
            return bad("position and target coincide");
        }
        let up = Vector3::from(self.up);
        if up.norm() == 0.0 || forward.normalize().cross(&up.normalize()).norm() < 1e-9 {
            return bad("up is parallel to the view direction");
        }
        Ok(())
    }

    pub fn basis(&self) -> Result<ViewBasis> {
        self.validate()?;
        let eye = Vector3::from(self.position);
        let forward = (Vector3::from(self.target) - eye).normalize();
        let right = forward.cross(&Vector3::from(self.up)).normalize();
        let down = forward.cross(&right);
        let focal = 0.5 * self.height as f64 / (0.5 * self.vfov_deg.to_radians()).tan();
        Ok(ViewBasis {
            eye,
            right,
            down,
            forward,
            focal,
        })
    }
}

/// Triangle mesh with an optional per-vertex scalar in `[0,1]`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<[f64; 3]>,
    pub triangles: Vec<[usize; 3]>,
    pub attribute: Option<Vec<f64>>,
}

impl Mesh {
    pub fn validate(&self) -> Result<()> {
        for (face, tri) in self.triangles.iter().enumerate() {
            if let Some(&index) = tri.iter().find(|&&i| i >= self.vertices.len()) {
                return Err(Error::IndexOutOfRange {
                    face,
                    index: index as i64,
                    count: self.vertices.len(),
                });
            }
        }
        if let Some(attr) = &self.attribute {
            if attr.len() != self.vertices.len() {
                return Err(Error::AttributeLength {
                    expected: self.vertices.len(),
                    got: attr.len(),
                });
            }
        }
        Ok(())
    }

    /// Axis-aligned bounds `(min, max)`, or `None` for an empty mesh.
    pub fn bounds(&self) -> Option<([f64; 3], [f64; 3])> {
        let first = *self.vertices.first()?;
        Some(self.vertices.iter().fold((first, first), |(lo, hi), v| {
            (
                [lo[0].min(v[0]), lo[1].min(v[1]), lo[2].min(v[2])],
                [hi[0].max(v[0]), hi[1].max(v[1]), hi[2].max(v[2])],
            )
        }))
    }

    /// Appends another mesh, offsetting its indices.
    pub fn append(&mut self, other: &Mesh) {
        let base = self.vertices.len();
        self.attribute = match (self.attribute.take(), &other.attribute) {
            (None, None) => None,
            (mine, theirs) => {
                let mut attr = mine.unwrap_or_else(|| vec![0.0; base]);
                match theirs {
                    Some(b) => attr.extend_from_slice(b),
                    None => attr.resize(base + other.vertices.len(), 0.0),
                }
                Some(attr)
            }
        };
        self.vertices.extend_from_slice(&other.vertices);
        self.triangles.extend(
            other
                .triangles
                .iter()
                .map(|t| [t[0] + base, t[1] + base, t[2] + base]),
        );
    }
}

/// Per-pixel linear depth with background mask and optional vessel layers.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthImage {
    pub width: usize,
    pub height: usize,
    pub depth: Vec<f64>,
    pub background: Vec<bool>,
    pub attribute: Option<Vec<f64>>,
    /// View-space unit normals of the vessel surface, facing the camera.
    pub normal: Option<Vec<Vector3<f64>>>,
}

impl DepthImage {
    pub fn all_background(width: usize, height: usize) -> Self {
        DepthImage {
            width,
            height,
            depth: vec![BACKGROUND_DEPTH; width * height],
            background: vec![true; width * height],
            attribute: None,
            normal: None,
        }
    }

    /// Builds an image from per-pixel depths; `None` marks background.
    pub fn from_depths(width: usize, height: usize, depths: &[Option<f64>]) -> Self {
        assert_eq!(depths.len(), width * height);
        DepthImage {
            width,
            height,
            depth: depths
                .iter()
                .map(|d| d.unwrap_or(BACKGROUND_DEPTH))
                .collect(),
            background: depths.iter().map(Option::is_none).collect(),
            attribute: None,
            normal: None,
        }
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize) -> usize {
        y * self.width + x
    }

    pub fn foreground_mask(&self) -> Vec<bool> {
        self.background.iter().map(|b| !b).collect()
    }

    pub fn foreground_count(&self) -> usize {
        self.background.iter().filter(|b| !**b).count()
    }

    /// Mirrors the image left to right, including normals.
    pub fn mirrored_x(&self) -> Self {
        let flip = |v: &Vec<f64>| mirror_rows(v, self.width);
        DepthImage {
            width: self.width,
            height: self.height,
            depth: flip(&self.depth),
            background: mirror_rows(&self.background, self.width),
            attribute: self.attribute.as_ref().map(flip),
            normal: self.normal.as_ref().map(|n| {
                mirror_rows(n, self.width)
                    .into_iter()
                    .map(|v| Vector3::new(-v.x, v.y, v.z))
                    .collect()
            }),
        }
    }
}

/// Reverses every row of a row-major buffer.
pub fn mirror_rows<T: Clone>(data: &[T], width: usize) -> Vec<T> {
    data.chunks(width)
        .flat_map(|row| row.iter().rev().cloned())
        .collect()
}
