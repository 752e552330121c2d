//! Topological border following over an 8-connected foreground.
//!
//! The mask is padded with a one-pixel background frame so borders touching
//! the image edge close up. Each border gets a sequence number (starting at 2;
//! 1 is the frame) that is written into the working grid, which is how later
//! scans find the border enclosing a newly discovered one.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ContourKind {
    /// Separates a foreground component from the background around it.
    Outer,
    /// Separates a foreground component from a background hole inside it.
    Hole,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Contour {
    pub id: usize,
    pub kind: ContourKind,
    pub parent: Option<usize>,
    /// Border pixels `(x, y)` in tracing order.
    pub pixels: Vec<(usize, usize)>,
}

// Clockwise on screen (y down), starting east.
const DIRS: [(isize, isize); 8] = [
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
    (-1, 0),
    (-1, -1),
    (0, -1),
    (1, -1),
];

fn dir_index(dx: isize, dy: isize) -> usize {
    DIRS.iter()
        .position(|&d| d == (dx, dy))
        .expect("neighbor offset")
}

struct Grid {
    w: usize,
    cells: Vec<i32>,
}

impl Grid {
    #[inline]
    fn at(&self, x: usize, y: usize) -> i32 {
        self.cells[y * self.w + x]
    }

    #[inline]
    fn set(&mut self, x: usize, y: usize, v: i32) {
        self.cells[y * self.w + x] = v;
    }

    #[inline]
    fn step(x: usize, y: usize, d: usize) -> (usize, usize) {
        let (dx, dy) = DIRS[d];
        ((x as isize + dx) as usize, (y as isize + dy) as usize)
    }
}

/// Finds all outer and hole borders of the foreground (`true` pixels) in
/// raster-scan discovery order, with parent links.
pub fn trace_contours(mask: &[bool], width: usize, height: usize) -> Vec<Contour> {
    assert_eq!(mask.len(), width * height);
    let pw = width + 2;
    let ph = height + 2;
    let mut g = Grid {
        w: pw,
        cells: vec![0; pw * ph],
    };
    for y in 0..height {
        for x in 0..width {
            if mask[y * width + x] {
                g.set(x + 1, y + 1, 1);
            }
        }
    }

    let mut contours: Vec<Contour> = Vec::new();
    // Indexed by sequence number - 2.
    let mut nbd: i32 = 1;

    for y in 1..ph - 1 {
        let mut lnbd: i32 = 1;
        for x in 1..pw - 1 {
            let v = g.at(x, y);
            if v == 0 {
                continue;
            }
            let start = if v == 1 && g.at(x - 1, y) == 0 {
                Some((ContourKind::Outer, x - 1))
            } else if v >= 1 && g.at(x + 1, y) == 0 {
                if v > 1 {
                    lnbd = v;
                }
                Some((ContourKind::Hole, x + 1))
            } else {
                None
            };

            if let Some((kind, from_x)) = start {
                nbd += 1;
                let parent = parent_of(kind, lnbd, &contours);
                let pixels = follow(&mut g, (x, y), (from_x, y), nbd);
                contours.push(Contour {
                    id: contours.len(),
                    kind,
                    parent,
                    pixels: pixels
                        .into_iter()
                        .map(|(px, py)| (px - 1, py - 1))
                        .collect(),
                });
            }

            let v = g.at(x, y);
            if v != 1 {
                lnbd = v.abs();
            }
        }
    }
    contours
}

/// Parent of a new border given the last border met on this row.
fn parent_of(kind: ContourKind, lnbd: i32, contours: &[Contour]) -> Option<usize> {
    // Sequence number 1 is the padding frame, which acts as a hole border
    // with no parent.
    let (last_kind, last_parent, last_id) = if lnbd <= 1 {
        (ContourKind::Hole, None, None)
    } else {
        let c = &contours[(lnbd - 2) as usize];
        (c.kind, c.parent, Some(c.id))
    };
    if kind == last_kind {
        last_parent
    } else {
        last_id
    }
}

/// Follows one border starting at `start`, entered from the background pixel
/// `from`. Marks visited pixels with `±nbd` and returns them in order.
fn follow(
    g: &mut Grid,
    start: (usize, usize),
    from: (usize, usize),
    nbd: i32,
) -> Vec<(usize, usize)> {
    let (sx, sy) = start;
    let from_dir = dir_index(from.0 as isize - sx as isize, from.1 as isize - sy as isize);

    // Clockwise search for the first foreground neighbor.
    let first = (0..8).map(|k| (from_dir + k) % 8).find(|&d| {
        let (nx, ny) = Grid::step(sx, sy, d);
        g.at(nx, ny) != 0
    });
    let Some(first_dir) = first else {
        // Isolated pixel.
        g.set(sx, sy, -nbd);
        return vec![start];
    };

    let p1 = Grid::step(sx, sy, first_dir);
    let mut prev = p1;
    let mut cur = start;
    let mut pixels = Vec::new();
    loop {
        pixels.push(cur);
        let (cx, cy) = cur;
        let prev_dir = dir_index(prev.0 as isize - cx as isize, prev.1 as isize - cy as isize);
        // Counter-clockwise search starting just after `prev`.
        let mut east_was_zero = false;
        let mut next = None;
        for k in 1..=8 {
            let d = (prev_dir + 8 - k) % 8;
            let (nx, ny) = Grid::step(cx, cy, d);
            if g.at(nx, ny) != 0 {
                next = Some((nx, ny));
                break;
            }
            if d == 0 {
                east_was_zero = true;
            }
        }
        let next = next.expect("traced pixel has a foreground neighbor");

        if east_was_zero {
            g.set(cx, cy, -nbd);
        } else if g.at(cx, cy) == 1 {
            g.set(cx, cy, nbd);
        }

        if next == start && cur == p1 {
            break;
        }
        prev = cur;
        cur = next;
    }
    pixels
}
