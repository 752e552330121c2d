//! Procedural scenes: tube meshes, the reference vessel tree, and small
//! depth images and height fields used by tests and benchmarks.

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::scene::{DepthImage, Mesh};
use crate::synthesis::{HeightField, Source};

/// An open cylinder from `a` to `b` whose attribute runs linearly from
/// `attr_a` to `attr_b`.
pub fn tube(
    a: [f64; 3],
    b: [f64; 3],
    radius: f64,
    segments: usize,
    attr_a: f64,
    attr_b: f64,
) -> Mesh {
    let a = Vector3::from(a);
    let b = Vector3::from(b);
    let axis = (b - a).normalize();
    let helper = if axis.x.abs() < 0.9 {
        Vector3::x()
    } else {
        Vector3::y()
    };
    let u = axis.cross(&helper).normalize();
    let v = axis.cross(&u);

    let mut mesh = Mesh {
        attribute: Some(Vec::new()),
        ..Mesh::default()
    };
    for (center, attr) in [(a, attr_a), (b, attr_b)] {
        for k in 0..segments {
            let t = std::f64::consts::TAU * k as f64 / segments as f64;
            let p = center + (u * t.cos() + v * t.sin()) * radius;
            mesh.vertices.push([p.x, p.y, p.z]);
            mesh.attribute.as_mut().unwrap().push(attr);
        }
    }
    for k in 0..segments {
        let k1 = (k + 1) % segments;
        let (i0, i1, j0, j1) = (k, k1, segments + k, segments + k1);
        mesh.triangles.push([i0, i1, j1]);
        mesh.triangles.push([i0, j1, j0]);
    }
    mesh
}

/// A UV sphere with constant attribute.
pub fn sphere(center: [f64; 3], radius: f64, rings: usize, segments: usize, attr: f64) -> Mesh {
    let mut vertices = vec![[center[0], center[1] + radius, center[2]]];
    for r in 1..rings {
        let phi = std::f64::consts::PI * r as f64 / rings as f64;
        for s in 0..segments {
            let theta = std::f64::consts::TAU * s as f64 / segments as f64;
            vertices.push([
                center[0] + radius * phi.sin() * theta.cos(),
                center[1] + radius * phi.cos(),
                center[2] + radius * phi.sin() * theta.sin(),
            ]);
        }
    }
    vertices.push([center[0], center[1] - radius, center[2]]);
    let bottom = vertices.len() - 1;
    let ring = |r: usize, s: usize| 1 + (r - 1) * segments + s % segments;

    let mut triangles = Vec::new();
    for s in 0..segments {
        triangles.push([0, ring(1, s + 1), ring(1, s)]);
        triangles.push([bottom, ring(rings - 1, s), ring(rings - 1, s + 1)]);
    }
    for r in 1..rings - 1 {
        for s in 0..segments {
            triangles.push([ring(r, s), ring(r, s + 1), ring(r + 1, s + 1)]);
            triangles.push([ring(r, s), ring(r + 1, s + 1), ring(r + 1, s)]);
        }
    }
    let attribute = Some(vec![attr; vertices.len()]);
    Mesh {
        vertices,
        triangles,
        attribute,
    }
}

/// Two tubes crossing in an X that reaches past the default camera's frame,
/// so the background splits into four void regions.
pub fn two_tube_scene() -> Mesh {
    let mut mesh = tube([-4.0, -3.0, 0.4], [4.0, 3.0, -0.4], 0.25, 16, 0.0, 1.0);
    mesh.append(&tube(
        [-4.0, 3.0, -0.4],
        [4.0, -3.0, 0.4],
        0.25,
        16,
        1.0,
        0.0,
    ));
    mesh
}

/// A deterministic branching vessel tree, roughly centered on the origin and
/// spanning about 3.4 × 3.4 × 1.2 units.
pub fn reference_vessel_tree() -> Mesh {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7655_0001);
    let mut mesh = Mesh {
        attribute: Some(Vec::new()),
        ..Mesh::default()
    };
    let root = Vector3::new(0.0, -1.7, 0.0);
    mesh.append(&sphere([root.x, root.y, root.z], 0.16, 8, 16, 0.0));
    grow(
        &mut mesh,
        &mut rng,
        root,
        Vector3::new(0.0, 1.0, 0.0),
        1.0,
        0.16,
        0.0,
        0,
    );
    mesh
}

#[allow(clippy::too_many_arguments)]
fn grow(
    mesh: &mut Mesh,
    rng: &mut ChaCha8Rng,
    start: Vector3<f64>,
    dir: Vector3<f64>,
    length: f64,
    radius: f64,
    attr: f64,
    level: usize,
) {
    const LEVELS: usize = 5;
    let end = start + dir * length;
    let attr_end = (attr + 0.2).min(1.0);
    mesh.append(&tube(
        [start.x, start.y, start.z],
        [end.x, end.y, end.z],
        radius,
        16,
        attr,
        attr_end,
    ));
    mesh.append(&sphere([end.x, end.y, end.z], radius, 8, 16, attr_end));
    if level + 1 == LEVELS {
        return;
    }
    for side in [-1.0, 1.0] {
        let spread = side * rng.gen_range(0.45..0.75);
        let tilt = rng.gen_range(-0.5..0.5);
        let (s, c) = f64::sin_cos(spread);
        let d = Vector3::new(dir.x * c - dir.y * s, dir.x * s + dir.y * c, dir.z + tilt);
        let child_length = length * rng.gen_range(0.62..0.78);
        grow(
            mesh,
            rng,
            end,
            d.normalize(),
            child_length,
            radius * 0.72,
            attr_end,
            level + 1,
        );
    }
}

/// Random foreground mask built from a few random rectangles and discs.
pub fn random_mask(width: usize, height: usize, seed: u64) -> Vec<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mask = vec![false; width * height];
    let shapes = rng.gen_range(2..10);
    for _ in 0..shapes {
        let cx = rng.gen_range(0..width) as f64;
        let cy = rng.gen_range(0..height) as f64;
        if rng.gen_bool(0.5) {
            let r = rng.gen_range(1.0..1.5f64.max(width as f64 / 3.0));
            let hole = rng.gen_bool(0.3).then(|| r * rng.gen_range(0.3..0.7));
            for y in 0..height {
                for x in 0..width {
                    let d = ((x as f64 - cx).powi(2) + (y as f64 - cy).powi(2)).sqrt();
                    if d <= r && hole.is_none_or(|h| d > h) {
                        mask[y * width + x] = true;
                    }
                }
            }
        } else {
            let hw = rng.gen_range(0.0..1.0f64.max(width as f64 / 2.0));
            let hh = rng.gen_range(0.0..1.5f64.max(height as f64 / 8.0));
            let (hw, hh) = if rng.gen_bool(0.5) {
                (hw, hh)
            } else {
                (hh, hw)
            };
            for y in 0..height {
                for x in 0..width {
                    if (x as f64 - cx).abs() <= hw && (y as f64 - cy).abs() <= hh {
                        mask[y * width + x] = true;
                    }
                }
            }
        }
    }
    // Salt noise exercises single-pixel and diagonal-only contacts.
    for _ in 0..(width * height / 40) {
        let i = rng.gen_range(0..width * height);
        mask[i] = !mask[i];
    }
    mask
}

/// Random normalized depth image over [`random_mask`]: a tilted plane plus
/// ripples, rescaled to `[0,1]`. Guaranteed to have foreground.
pub fn random_scene(width: usize, height: usize, seed: u64) -> DepthImage {
    let mut mask = random_mask(width, height, seed);
    if !mask.iter().any(|&m| m) {
        mask[0] = true;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9);
    let (a, b, c) = (
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(0.05..0.4),
    );
    let depths: Vec<Option<f64>> = mask
        .iter()
        .enumerate()
        .map(|(i, &m)| {
            let (x, y) = ((i % width) as f64, (i / width) as f64);
            m.then(|| {
                2.0 + a * x / width as f64
                    + b * y / height as f64
                    + (c * x).sin() * 0.3
                    + (c * y * 1.7).cos() * 0.2
            })
        })
        .collect();
    crate::scene::normalize_depth(&DepthImage::from_depths(width, height, &depths))
        .expect("mask has foreground")
}

/// Column span (inclusive) and depth of each wall in [`two_wall_scene`].
pub const TWO_WALLS: [(usize, usize, f64); 2] = [(16, 23, 0.2), (34, 41, 0.8)];

/// 64×64 scene with two full-height vertical vessel walls at depths 0.2 and
/// 0.8 and a 10-pixel void gap between them.
pub fn two_wall_scene() -> DepthImage {
    let (w, h) = (64, 64);
    let depths: Vec<Option<f64>> = (0..w * h)
        .map(|i| {
            let x = i % w;
            TWO_WALLS
                .iter()
                .find(|(lo, hi, _)| (*lo..=*hi).contains(&x))
                .map(|w| w.2)
        })
        .collect();
    DepthImage::from_depths(w, h, &depths)
}

/// Columns covered by the ridge in [`ridge_field`].
pub const RIDGE_COLUMNS: (usize, usize) = (28, 35);

/// Flat VSS at depth 0.6 with one vertical vessel ridge raised towards the
/// camera (half-cylinder profile, crest depth 0.45).
pub fn ridge_field(width: usize, height: usize) -> HeightField {
    let (lo, hi) = RIDGE_COLUMNS;
    let center = 0.5 * (lo + hi) as f64;
    let half = 0.5 * (hi - lo + 1) as f64;
    let mut z = vec![0.6; width * height];
    let mut source = vec![Source::Vss; width * height];
    for y in 0..height {
        for x in lo..=hi {
            let t = (x as f64 - center) / half;
            z[y * width + x] = 0.6 - 0.15 * (1.0 - t * t).max(0.0).sqrt();
            source[y * width + x] = Source::Vessel;
        }
    }
    HeightField {
        width,
        height,
        z,
        source,
    }
}
