//! Screen-space ambient occlusion on the height field.
//!
//! Each pixel compares its neighbors against its own tangent plane: a
//! neighbor that sits closer to the camera than the plane predicts occludes
//! it. Flat and uniformly tilted surfaces therefore stay unoccluded, while the
//! VSS right next to a raised vessel picks up a contact shadow.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::CueConfig;
use crate::synthesis::{gradient, HeightField, Source};

const KERNEL_SEED: u64 = 0x55A0_2009;

/// Steepest tangent-plane slope used for extrapolation, in depth pixels per
/// screen pixel. Keeps silhouette pixels from predicting a near-vertical wall.
const MAX_SLOPE: f64 = 1.0;

/// Deterministic Poisson-disk offsets inside a disc of `radius` pixels.
/// Every offset is at least one pixel from the center.
pub fn ao_kernel(radius: f64, samples: usize) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(KERNEL_SEED);
    let area = std::f64::consts::PI * radius * radius;
    let mut min_dist = (0.7 * area / samples.max(1) as f64).sqrt();
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(samples);
    let mut attempts = 0;
    while out.len() < samples {
        attempts += 1;
        if attempts % 500 == 0 {
            min_dist *= 0.9;
        }
        let r = radius * rng.gen::<f64>().sqrt();
        let t = std::f64::consts::TAU * rng.gen::<f64>();
        let (x, y) = (r * t.cos(), r * t.sin());
        if x.hypot(y) < 1.0 {
            continue;
        }
        if out
            .iter()
            .all(|&(ox, oy)| (ox - x).hypot(oy - y) >= min_dist)
        {
            out.push((x, y));
        }
    }
    out
}

/// Per-pixel AO factor in `[0,1]` (1 = unoccluded). `relief` converts
/// normalized depth into pixels.
pub fn ambient_occlusion(field: &HeightField, relief: f64, cfg: &CueConfig) -> Vec<f64> {
    let w = field.width;
    let h = field.height;
    let mut out = vec![1.0; w * h];
    if !cfg.ao_enabled || cfg.ao_strength == 0.0 || cfg.ao_samples == 0 {
        return out;
    }
    let radius = cfg.ao_radius;
    let taps: Vec<(isize, isize, f64, f64, f64)> = ao_kernel(radius, cfg.ao_samples)
        .into_iter()
        .map(|(x, y)| {
            let (ix, iy) = (x.round(), y.round());
            let falloff = 1.0 - ix.hypot(iy) / (radius + 1.0);
            (ix as isize, iy as isize, ix, iy, falloff.max(0.0))
        })
        .filter(|t| (t.0, t.1) != (0, 0))
        .collect();

    out.par_chunks_mut(w).enumerate().for_each(|(y, row)| {
        for (x, factor) in row.iter_mut().enumerate() {
            let i = field.index(x, y);
            if field.source[i] == Source::Empty {
                continue;
            }
            let zc = field.z[i];
            let (mut gx, mut gy) = gradient(field, x, y);
            let slope = relief * gx.hypot(gy);
            if slope > MAX_SLOPE {
                gx *= MAX_SLOPE / slope;
                gy *= MAX_SLOPE / slope;
            }
            let mut total = 0.0;
            let mut occluded = 0.0;
            for &(dx, dy, fx, fy, falloff) in &taps {
                let (sx, sy) = (x as isize + dx, y as isize + dy);
                if sx < 0 || sy < 0 || sx >= w as isize || sy >= h as isize {
                    continue;
                }
                let j = field.index(sx as usize, sy as usize);
                if field.source[j] == Source::Empty {
                    continue;
                }
                total += falloff;
                let plane = zc + gx * fx + gy * fy;
                let rise = (plane - field.z[j]) * relief;
                if rise > cfg.ao_bias {
                    // Occluders far above the receiver count less.
                    let range = (radius / rise).min(1.0);
                    occluded += falloff * range;
                }
            }
            if total > 0.0 {
                *factor = 1.0 - cfg.ao_strength * (occluded / total);
            }
        }
    });
    out
}
