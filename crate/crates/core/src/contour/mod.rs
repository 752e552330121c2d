//! Silhouette contours and void-space regions.
//!
//! Foreground is 8-connected and background 4-connected. Every background
//! pixel belongs to exactly one void region; a region's samples are the
//! contour pixels that touch it, with their normalized vessel depth.

mod trace;

pub use trace::{trace_contours, Contour, ContourKind};

use std::collections::{HashSet, VecDeque};
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::imageio;
use crate::scene::DepthImage;

/// Region id stored for foreground pixels.
pub const FOREGROUND: i32 = -1;

/// A contour pixel with its vessel depth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sample {
    pub x: u32,
    pub y: u32,
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VoidRegion {
    pub id: usize,
    /// Contours with at least one pixel on this region's boundary.
    pub contour_ids: Vec<usize>,
    /// Boundary samples in contour discovery order, then tracing order;
    /// each pixel appears once.
    pub samples: Vec<Sample>,
    pub pixel_count: usize,
    pub touches_edge: bool,
}

impl VoidRegion {
    /// A region with nothing to interpolate from (e.g. an all-background frame).
    pub fn is_sampleless(&self) -> bool {
        self.samples.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VoidSpaceMap {
    pub width: usize,
    pub height: usize,
    /// Per-pixel region id, [`FOREGROUND`] for vessel pixels.
    pub region_id: Vec<i32>,
    pub regions: Vec<VoidRegion>,
    pub contours: Vec<Contour>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RegionStats {
    pub region_count: usize,
    pub max_samples: usize,
}

/// Labels the 4-connected background components of `depth` in raster order
/// and collects each one's boundary samples from `contours`.
pub fn label_void_spaces(depth: &DepthImage, contours: &[Contour]) -> VoidSpaceMap {
    let (w, h) = (depth.width, depth.height);
    let mut region_id = vec![FOREGROUND; w * h];
    let mut regions: Vec<VoidRegion> = Vec::new();
    let mut queue = VecDeque::new();

    for start in 0..w * h {
        if !depth.background[start] || region_id[start] != FOREGROUND {
            continue;
        }
        let id = regions.len();
        let mut count = 0;
        let mut touches_edge = false;
        region_id[start] = id as i32;
        queue.push_back(start);
        while let Some(i) = queue.pop_front() {
            count += 1;
            let (x, y) = (i % w, i / w);
            touches_edge |= x == 0 || y == 0 || x == w - 1 || y == h - 1;
            let mut visit = |j: usize| {
                if depth.background[j] && region_id[j] == FOREGROUND {
                    region_id[j] = id as i32;
                    queue.push_back(j);
                }
            };
            if x > 0 {
                visit(i - 1);
            }
            if x + 1 < w {
                visit(i + 1);
            }
            if y > 0 {
                visit(i - w);
            }
            if y + 1 < h {
                visit(i + w);
            }
        }
        regions.push(VoidRegion {
            id,
            contour_ids: Vec::new(),
            samples: Vec::new(),
            pixel_count: count,
            touches_edge,
        });
    }

    let mut seen: Vec<HashSet<usize>> = vec![HashSet::new(); regions.len()];
    let mut adjacent = Vec::with_capacity(8);
    for contour in contours {
        for &(x, y) in &contour.pixels {
            let i = y * w + x;
            adjacent.clear();
            for dy in -1isize..=1 {
                for dx in -1isize..=1 {
                    let (nx, ny) = (x as isize + dx, y as isize + dy);
                    if (dx, dy) == (0, 0)
                        || nx < 0
                        || ny < 0
                        || nx >= w as isize
                        || ny >= h as isize
                    {
                        continue;
                    }
                    let r = region_id[ny as usize * w + nx as usize];
                    if r != FOREGROUND && !adjacent.contains(&r) {
                        adjacent.push(r);
                    }
                }
            }
            for &r in &adjacent {
                let region = &mut regions[r as usize];
                if !region.contour_ids.contains(&contour.id) {
                    region.contour_ids.push(contour.id);
                }
                if seen[r as usize].insert(i) {
                    region.samples.push(Sample {
                        x: x as u32,
                        y: y as u32,
                        z: depth.depth[i],
                    });
                }
            }
        }
    }

    VoidSpaceMap {
        width: w,
        height: h,
        region_id,
        regions,
        contours: contours.to_vec(),
    }
}

/// Traces contours and labels void spaces in one go.
pub fn build_void_space_map(depth: &DepthImage) -> VoidSpaceMap {
    let contours = trace_contours(&depth.foreground_mask(), depth.width, depth.height);
    label_void_spaces(depth, &contours)
}

pub fn region_stats(map: &VoidSpaceMap) -> RegionStats {
    RegionStats {
        region_count: map.regions.len(),
        max_samples: map
            .regions
            .iter()
            .map(|r| r.samples.len())
            .max()
            .unwrap_or(0),
    }
}

#[derive(Serialize)]
struct ContourRecord {
    id: usize,
    kind: ContourKind,
    parent: Option<usize>,
    pixels: Vec<[usize; 2]>,
}

/// Contour list as JSON: `[{id, kind, parent, pixels: [[x, y], ...]}, ...]`.
pub fn contours_to_json(contours: &[Contour]) -> String {
    let records: Vec<ContourRecord> = contours
        .iter()
        .map(|c| ContourRecord {
            id: c.id,
            kind: c.kind,
            parent: c.parent,
            pixels: c.pixels.iter().map(|&(x, y)| [x, y]).collect(),
        })
        .collect();
    serde_json::to_string_pretty(&records).expect("contours serialize")
}

/// Writes the region-id image as an indexed PNG. Index 0 is foreground; region
/// `r` uses index `1 + r % 255`.
pub fn write_region_png(map: &VoidSpaceMap, path: &Path) -> Result<()> {
    let indices: Vec<u8> = map
        .region_id
        .iter()
        .map(|&r| if r < 0 { 0 } else { 1 + (r % 255) as u8 })
        .collect();
    let mut palette = vec![[0u8, 0, 0]];
    // Golden-angle hue walk keeps neighboring ids distinguishable.
    for k in 0..255u32 {
        let hue = (k as f64 * 137.507_764) % 360.0;
        let [r, g, b] = crate::cues::hsv_to_rgb(hue, 0.65, 0.95);
        palette.push([r, g, b].map(|c| (c * 255.0).round() as u8));
    }
    imageio::write_indexed_png(path, map.width, map.height, &indices, &palette)
}

pub fn write_contours_json(contours: &[Contour], path: &Path) -> Result<()> {
    std::fs::write(path, contours_to_json(contours)).map_err(|e| Error::io(path, e))
}
