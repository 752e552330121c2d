//! Scanline-band z-buffer rasterizer producing linear view-axis depth.

use nalgebra::Vector3;
use rayon::prelude::*;

use super::{Camera, DepthImage, Mesh, ViewBasis, BACKGROUND_DEPTH};
use crate::error::Result;

const BAND_ROWS: usize = 16;

#[derive(Debug, Clone, Copy)]
struct ClipVertex {
    view: Vector3<f64>,
    attr: f64,
    normal: Vector3<f64>,
}

impl ClipVertex {
    fn lerp(&self, other: &ClipVertex, t: f64) -> ClipVertex {
        ClipVertex {
            view: self.view + (other.view - self.view) * t,
            attr: self.attr + (other.attr - self.attr) * t,
            normal: self.normal + (other.normal - self.normal) * t,
        }
    }
}

/// A triangle in screen space, carrying `1/z` and `attr/z`, `normal/z` for
/// perspective-correct interpolation.
#[derive(Debug, Clone, Copy)]
struct ScreenTriangle {
    xy: [[f64; 2]; 3],
    inv_z: [f64; 3],
    attr_over_z: [f64; 3],
    normal_over_z: [Vector3<f64>; 3],
    face_normal: Vector3<f64>,
    area: f64,
    y_min: usize,
    y_max: usize,
}

struct Band {
    depth: Vec<f64>,
    attr: Vec<f64>,
    normal: Vec<Vector3<f64>>,
}

/// Renders the mesh into a linear-depth image. Back faces are not culled, so
/// open tubes keep a closed silhouette.
pub fn rasterize(mesh: &Mesh, camera: &Camera) -> Result<DepthImage> {
    mesh.validate()?;
    let basis = camera.basis()?;
    let (w, h) = (camera.width, camera.height);

    let vertex_normals = vertex_normals(mesh);
    let view_vertices: Vec<ClipVertex> = mesh
        .vertices
        .iter()
        .enumerate()
        .map(|(i, v)| ClipVertex {
            view: basis.to_view(&Vector3::from(*v)),
            attr: mesh.attribute.as_ref().map_or(0.0, |a| a[i]),
            normal: basis.dir_to_view(&vertex_normals[i]),
        })
        .collect();

    let triangles: Vec<ScreenTriangle> = mesh
        .triangles
        .iter()
        .flat_map(|t| {
            let corners = [
                view_vertices[t[0]],
                view_vertices[t[1]],
                view_vertices[t[2]],
            ];
            project_clipped(&corners, camera.near, &basis, w, h)
        })
        .collect();

    let bands: Vec<Band> = (0..h.div_ceil(BAND_ROWS))
        .into_par_iter()
        .map(|b| {
            let y0 = b * BAND_ROWS;
            let y1 = (y0 + BAND_ROWS).min(h);
            rasterize_band(&triangles, &basis, camera, y0, y1)
        })
        .collect();

    let mut img = DepthImage::all_background(w, h);
    let mut attr = Vec::with_capacity(w * h);
    let mut normal = Vec::with_capacity(w * h);
    let mut offset = 0;
    for band in bands {
        for (i, &d) in band.depth.iter().enumerate() {
            if d.is_finite() {
                img.depth[offset + i] = d;
                img.background[offset + i] = false;
            }
        }
        offset += band.depth.len();
        attr.extend(band.attr);
        normal.extend(band.normal);
    }
    if mesh.attribute.is_some() {
        img.attribute = Some(attr);
    }
    img.normal = Some(normal);
    Ok(img)
}

fn vertex_normals(mesh: &Mesh) -> Vec<Vector3<f64>> {
    let mut acc = vec![Vector3::zeros(); mesh.vertices.len()];
    for t in &mesh.triangles {
        let [a, b, c] = t.map(|i| Vector3::from(mesh.vertices[i]));
        // Unnormalized cross product weights by area.
        let n = (b - a).cross(&(c - a));
        for &i in t {
            acc[i] += n;
        }
    }
    acc.into_iter()
        .map(|n| {
            let len = n.norm();
            if len > 0.0 {
                n / len
            } else {
                n
            }
        })
        .collect()
}

/// Clips a view-space triangle against the near plane and projects the
/// resulting fan to screen space.
fn project_clipped(
    corners: &[ClipVertex; 3],
    near: f64,
    basis: &ViewBasis,
    width: usize,
    height: usize,
) -> Vec<ScreenTriangle> {
    let mut poly: Vec<ClipVertex> = Vec::with_capacity(4);
    for i in 0..3 {
        let a = &corners[i];
        let b = &corners[(i + 1) % 3];
        let a_in = a.view.z >= near;
        let b_in = b.view.z >= near;
        if a_in {
            poly.push(*a);
        }
        if a_in != b_in {
            let t = (near - a.view.z) / (b.view.z - a.view.z);
            poly.push(a.lerp(b, t));
        }
    }
    if poly.len() < 3 {
        return Vec::new();
    }

    let face_normal = {
        let n = (corners[1].view - corners[0].view).cross(&(corners[2].view - corners[0].view));
        let len = n.norm();
        if len > 0.0 {
            n / len
        } else {
            Vector3::new(0.0, 0.0, -1.0)
        }
    };
    let (cx, cy) = (0.5 * width as f64, 0.5 * height as f64);
    let project = |v: &ClipVertex| {
        let inv_z = 1.0 / v.view.z;
        (
            [
                cx + basis.focal * v.view.x * inv_z,
                cy + basis.focal * v.view.y * inv_z,
            ],
            inv_z,
        )
    };

    let mut out = Vec::with_capacity(poly.len() - 2);
    for k in 1..poly.len() - 1 {
        let tri = [poly[0], poly[k], poly[k + 1]];
        let projected = tri.map(|v| project(&v));
        let xy = projected.map(|p| p.0);
        let inv_z = projected.map(|p| p.1);
        let area = edge(xy[0], xy[1], xy[2]);
        if area == 0.0 || !area.is_finite() {
            continue;
        }
        let y_lo = xy.iter().map(|p| p[1]).fold(f64::INFINITY, f64::min);
        let y_hi = xy.iter().map(|p| p[1]).fold(f64::NEG_INFINITY, f64::max);
        if y_hi < 0.5 || y_lo > height as f64 - 0.5 {
            continue;
        }
        let x_lo = xy.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
        let x_hi = xy.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
        if x_hi < 0.5 || x_lo > width as f64 - 0.5 {
            continue;
        }
        out.push(ScreenTriangle {
            xy,
            inv_z,
            attr_over_z: [0, 1, 2].map(|i| tri[i].attr * inv_z[i]),
            normal_over_z: [0, 1, 2].map(|i| tri[i].normal * inv_z[i]),
            face_normal,
            area,
            y_min: (y_lo - 0.5).ceil().max(0.0) as usize,
            y_max: ((y_hi - 0.5).floor() as usize).min(height - 1),
        });
    }
    out
}

#[inline]
fn edge(a: [f64; 2], b: [f64; 2], p: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])
}

fn rasterize_band(
    triangles: &[ScreenTriangle],
    basis: &ViewBasis,
    camera: &Camera,
    y0: usize,
    y1: usize,
) -> Band {
    let w = camera.width;
    let rows = y1 - y0;
    let mut depth = vec![BACKGROUND_DEPTH; w * rows];
    let mut attr = vec![0.0; w * rows];
    let mut normal = vec![Vector3::zeros(); w * rows];
    let (cx, cy) = (0.5 * w as f64, 0.5 * camera.height as f64);

    for tri in triangles {
        if tri.y_max < y0 || tri.y_min >= y1 {
            continue;
        }
        let x_lo = tri.xy.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
        let x_hi = tri
            .xy
            .iter()
            .map(|p| p[0])
            .fold(f64::NEG_INFINITY, f64::max);
        let px0 = (x_lo - 0.5).ceil().max(0.0) as usize;
        let px1 = ((x_hi - 0.5).floor().max(0.0) as usize).min(w - 1);
        let [a, b, c] = tri.xy;
        for y in tri.y_min.max(y0)..=tri.y_max.min(y1 - 1) {
            let py = y as f64 + 0.5;
            for x in px0..=px1 {
                let p = [x as f64 + 0.5, py];
                let l0 = edge(b, c, p) / tri.area;
                let l1 = edge(c, a, p) / tri.area;
                let l2 = edge(a, b, p) / tri.area;
                if l0 < 0.0 || l1 < 0.0 || l2 < 0.0 {
                    continue;
                }
                let inv_z = l0 * tri.inv_z[0] + l1 * tri.inv_z[1] + l2 * tri.inv_z[2];
                let z = 1.0 / inv_z;
                if z > camera.far {
                    continue;
                }
                let i = (y - y0) * w + x;
                if z >= depth[i] {
                    continue;
                }
                depth[i] = z;
                attr[i] =
                    (l0 * tri.attr_over_z[0] + l1 * tri.attr_over_z[1] + l2 * tri.attr_over_z[2])
                        * z;
                let mut n = (tri.normal_over_z[0] * l0
                    + tri.normal_over_z[1] * l1
                    + tri.normal_over_z[2] * l2)
                    * z;
                n = if n.norm() > 1e-12 {
                    n.normalize()
                } else {
                    tri.face_normal
                };
                let ray = Vector3::new((p[0] - cx) / basis.focal, (p[1] - cy) / basis.focal, 1.0);
                if n.dot(&ray) > 0.0 {
                    n = -n;
                }
                normal[i] = n;
            }
        }
    }
    Band {
        depth,
        attr,
        normal,
    }
}
