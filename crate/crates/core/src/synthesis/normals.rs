use nalgebra::Vector3;
use rayon::prelude::*;

use super::HeightField;

/// Default depth-to-pixel scale for shading: half the larger image side.
pub fn default_relief_scale(width: usize, height: usize) -> f64 {
    0.5 * width.max(height) as f64
}

/// Screen-space depth gradient `(dz/dx, dz/dy)` at a pixel. Central
/// differences where both neighbors share the pixel's source flag, one-sided
/// where only one does, zero where neither does.
#[inline]
pub fn gradient(field: &HeightField, x: usize, y: usize) -> (f64, f64) {
    let i = field.index(x, y);
    let src = field.source[i];
    let zc = field.z[i];
    let same = |j: usize| field.source[j] == src;

    let left = (x > 0 && same(i - 1)).then(|| field.z[i - 1]);
    let right = (x + 1 < field.width && same(i + 1)).then(|| field.z[i + 1]);
    let up = (y > 0 && same(i - field.width)).then(|| field.z[i - field.width]);
    let down = (y + 1 < field.height && same(i + field.width)).then(|| field.z[i + field.width]);

    (diff(left, zc, right), diff(up, zc, down))
}

#[inline]
fn diff(before: Option<f64>, center: f64, after: Option<f64>) -> f64 {
    match (before, after) {
        (Some(b), Some(a)) => (a - b) / 2.0,
        (None, Some(a)) => a - center,
        (Some(b), None) => center - b,
        (None, None) => 0.0,
    }
}

/// View-space unit normals of the surface `(x, y, relief·z)`, oriented
/// towards the camera (negative z). A flat patch yields `(0, 0, -1)`.
pub fn reconstruct_normals(field: &HeightField, relief: f64) -> Vec<Vector3<f64>> {
    let w = field.width;
    let mut out = vec![Vector3::zeros(); w * field.height];
    out.par_chunks_mut(w).enumerate().for_each(|(y, row)| {
        for (x, n) in row.iter_mut().enumerate() {
            let (gx, gy) = gradient(field, x, y);
            *n = Vector3::new(relief * gx, relief * gy, -1.0).normalize();
        }
    });
    out
}
