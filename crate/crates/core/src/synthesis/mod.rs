//! Void space surface synthesis: inverse-distance-weighted depth over each
//! void region, interpolated from that region's contour samples.

mod normals;

pub use normals::{default_relief_scale, gradient, reconstruct_normals};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::contour::{VoidSpaceMap, FOREGROUND};
use crate::error::{Error, Result};
use crate::scene::DepthImage;

/// Depth given to pixels of regions that have no samples.
pub const EMPTY_DEPTH: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Vessel,
    Vss,
    Empty,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeightField {
    pub width: usize,
    pub height: usize,
    pub z: Vec<f64>,
    pub source: Vec<Source>,
}

impl HeightField {
    #[inline]
    pub fn index(&self, x: usize, y: usize) -> usize {
        y * self.width + x
    }

    pub fn mirrored_x(&self) -> Self {
        HeightField {
            width: self.width,
            height: self.height,
            z: crate::scene::mirror_rows(&self.z, self.width),
            source: crate::scene::mirror_rows(&self.source, self.width),
        }
    }

    pub fn write_pfm(&self, path: &std::path::Path) -> Result<()> {
        let values: Vec<f32> = self.z.iter().map(|&z| z as f32).collect();
        crate::imageio::write_pfm(path, self.width, self.height, &values)
    }
}

/// Power parameter and contour stride.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IdwParams {
    pub p: f64,
    pub step: usize,
}

impl Default for IdwParams {
    fn default() -> Self {
        IdwParams { p: 2.0, step: 1 }
    }
}

impl IdwParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.p.is_finite() && self.p > 0.0) {
            return Err(Error::invalid("idw.p", "must be a finite number > 0"));
        }
        if self.step < 1 {
            return Err(Error::invalid("idw.step", "must be >= 1"));
        }
        Ok(())
    }
}

/// Region samples laid out for the inner loop, already strided.
struct Samples {
    x: Vec<f64>,
    y: Vec<f64>,
    z: Vec<f64>,
}

#[derive(Clone, Copy)]
enum Kernel {
    InverseSquare,
    /// `1 / (d^2)^n` for even integer powers.
    IntegerPower(i32),
    General(f64),
}

impl Kernel {
    fn new(p: f64) -> Self {
        if p == 2.0 {
            Kernel::InverseSquare
        } else if p.fract() == 0.0 && (p as i64) % 2 == 0 && p <= 256.0 {
            Kernel::IntegerPower((p / 2.0) as i32)
        } else {
            Kernel::General(p)
        }
    }

    #[inline(always)]
    fn weight(self, d2: f64) -> f64 {
        match self {
            Kernel::InverseSquare => 1.0 / d2,
            Kernel::IntegerPower(n) => 1.0 / d2.powi(n),
            Kernel::General(p) => d2.powf(-0.5 * p),
        }
    }
}

/// Fills every void pixel with `Σ w_i z_i / Σ w_i`, `w_i = d_i^-p`, over its
/// region's samples taken at indices `0, step, 2·step, ...`. Vessel pixels keep
/// their depth; pixels of sample-less regions are marked [`Source::Empty`].
pub fn interpolate_void_depth(
    depth: &DepthImage,
    map: &VoidSpaceMap,
    params: &IdwParams,
) -> Result<HeightField> {
    params.validate()?;
    if depth.width != map.width || depth.height != map.height {
        return Err(Error::DimensionMismatch(format!(
            "depth {}x{} vs void map {}x{}",
            depth.width, depth.height, map.width, map.height
        )));
    }
    let w = depth.width;
    let kernel = Kernel::new(params.p);
    let strided: Vec<Samples> = map
        .regions
        .iter()
        .map(|r| {
            let picked = r.samples.iter().step_by(params.step);
            Samples {
                x: picked.clone().map(|s| s.x as f64).collect(),
                y: picked.clone().map(|s| s.y as f64).collect(),
                z: picked.map(|s| s.z).collect(),
            }
        })
        .collect();

    let mut z = vec![0.0; w * depth.height];
    let mut source = vec![Source::Vessel; w * depth.height];
    z.par_chunks_mut(w)
        .zip(source.par_chunks_mut(w))
        .enumerate()
        .for_each(|(y, (z_row, src_row))| {
            for x in 0..w {
                let i = y * w + x;
                let region = map.region_id[i];
                if region == FOREGROUND {
                    z_row[x] = depth.depth[i];
                    src_row[x] = Source::Vessel;
                    continue;
                }
                let samples = &strided[region as usize];
                if samples.z.is_empty() {
                    z_row[x] = EMPTY_DEPTH;
                    src_row[x] = Source::Empty;
                } else {
                    z_row[x] = idw_at(x as f64, y as f64, samples, kernel, params.p);
                    src_row[x] = Source::Vss;
                }
            }
        });

    Ok(HeightField {
        width: w,
        height: depth.height,
        z,
        source,
    })
}

#[inline]
fn idw_at(px: f64, py: f64, s: &Samples, kernel: Kernel, p: f64) -> f64 {
    if let [z] = s.z[..] {
        return z;
    }
    // Independent per-lane sums let the loop vectorize; the summation order
    // is fixed, so results stay bit-identical across runs and thread counts.
    const LANES: usize = 8;
    let mut num = [0.0; LANES];
    let mut den = [0.0; LANES];
    let xs = s.x.chunks_exact(LANES);
    let ys = s.y.chunks_exact(LANES);
    let zs = s.z.chunks_exact(LANES);
    let (xr, yr, zr) = (xs.remainder(), ys.remainder(), zs.remainder());
    for ((cx, cy), cz) in xs.zip(ys).zip(zs) {
        for l in 0..LANES {
            let dx = cx[l] - px;
            let dy = cy[l] - py;
            let wgt = kernel.weight(dx * dx + dy * dy);
            num[l] += wgt * cz[l];
            den[l] += wgt;
        }
    }
    for l in 0..xr.len() {
        let dx = xr[l] - px;
        let dy = yr[l] - py;
        let wgt = kernel.weight(dx * dx + dy * dy);
        num[l] += wgt * zr[l];
        den[l] += wgt;
    }
    let num: f64 = num.iter().sum();
    let den: f64 = den.iter().sum();
    let v = num / den;
    if v.is_finite() && den > 0.0 && den.is_finite() {
        v
    } else {
        idw_rescaled(px, py, s, p)
    }
}

/// Slow path for coincident samples or weights that over/underflow: weights
/// are taken relative to the nearest sample, `(d_min / d_i)^p`.
#[cold]
fn idw_rescaled(px: f64, py: f64, s: &Samples, p: f64) -> f64 {
    let d2: Vec<f64> =
        s.x.iter()
            .zip(&s.y)
            .map(|(&sx, &sy)| (sx - px).powi(2) + (sy - py).powi(2))
            .collect();
    let (nearest, &d2_min) = d2
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty samples");
    if d2_min == 0.0 {
        return s.z[nearest];
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for (&d2, &z) in d2.iter().zip(&s.z) {
        let wgt = (d2_min / d2).powf(0.5 * p);
        num += wgt * z;
        den += wgt;
    }
    num / den
}
