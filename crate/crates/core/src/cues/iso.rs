use rayon::prelude::*;

use crate::synthesis::{gradient, HeightField, Source};

/// Anti-aliased iso-line coverage on VSS pixels. Levels sit at
/// `(k + 0.5) / iso_count`; a pixel's distance to its nearest level is taken
/// in screen space by dividing the depth gap by the local gradient magnitude.
pub fn draw_isolines(field: &HeightField, iso_count: usize, iso_width: f64) -> Vec<f64> {
    let w = field.width;
    let mut out = vec![0.0; w * field.height];
    if iso_count == 0 {
        return out;
    }
    let n = iso_count as f64;
    out.par_chunks_mut(w).enumerate().for_each(|(y, row)| {
        for (x, cov) in row.iter_mut().enumerate() {
            let i = field.index(x, y);
            if field.source[i] != Source::Vss {
                continue;
            }
            let z = field.z[i];
            let k = (z * n - 0.5).round().clamp(0.0, n - 1.0);
            let dz = (z - (k + 0.5) / n).abs();
            let (gx, gy) = gradient(field, x, y);
            let g = gx.hypot(gy);
            *cov = if g > 0.0 {
                (0.5 * iso_width + 0.5 - dz / g).clamp(0.0, 1.0)
            } else if dz == 0.0 {
                1.0
            } else {
                0.0
            };
        }
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp(w: usize, h: usize) -> HeightField {
        HeightField {
            width: w,
            height: h,
            z: (0..w * h)
                .map(|i| ((i % w) as f64 + 0.5) / w as f64)
                .collect(),
            source: vec![Source::Vss; w * h],
        }
    }

    fn bands(row: &[f64]) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        let mut start = None;
        for (x, &c) in row.iter().enumerate() {
            match (c > 0.0, start) {
                (true, None) => start = Some(x),
                (false, Some(s)) => {
                    out.push((s, x - 1));
                    start = None;
                }
                _ => {}
            }
        }
        if let Some(s) = start {
            out.push((s, row.len() - 1));
        }
        out
    }

    #[test]
    fn zero_count_draws_nothing() {
        assert!(draw_isolines(&ramp(20, 4), 0, 2.0)
            .iter()
            .all(|&c| c == 0.0));
    }

    #[test]
    fn single_level_is_centered() {
        let f = ramp(100, 3);
        let cov = draw_isolines(&f, 1, 1.5);
        for y in 0..3 {
            let b = bands(&cov[y * 100..(y + 1) * 100]);
            assert_eq!(b.len(), 1);
            // z = 0.5 falls between pixels 49 and 50.
            assert_eq!(b[0].0 + b[0].1, 99);
        }
    }

    #[test]
    fn lines_skip_vessel_and_empty_pixels() {
        let mut f = ramp(40, 1);
        for s in &mut f.source[18..22] {
            *s = Source::Vessel;
        }
        let cov = draw_isolines(&f, 1, 3.0);
        assert!(cov[18..22].iter().all(|&c| c == 0.0));
    }

    #[test]
    fn flat_field_on_a_level_is_covered() {
        let f = HeightField {
            width: 3,
            height: 1,
            z: vec![0.5; 3],
            source: vec![Source::Vss; 3],
        };
        assert_eq!(draw_isolines(&f, 1, 1.0), vec![1.0; 3]);
        assert_eq!(draw_isolines(&f, 2, 1.0), vec![0.0; 3]);
    }
}
