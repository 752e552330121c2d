use nalgebra::Vector3;
use rayon::prelude::*;

use super::{
    ambient_occlusion, apply_colormap, draw_isolines, param_color, shade, to_srgb8, CueConfig, Rgb,
};
use crate::error::{Error, Result};
use crate::imageio::RgbaImage;
use crate::scene::DepthImage;
use crate::synthesis::{reconstruct_normals, HeightField, Source};

/// Intermediate per-pixel layers feeding the composite.
#[derive(Debug, Clone)]
pub struct Layers {
    /// Unshaded, un-occluded base color of every pixel.
    pub base: Vec<Rgb>,
    /// Shading normal: rasterized vessel normal where available, otherwise
    /// reconstructed from the height field.
    pub normal: Vec<Vector3<f64>>,
    pub ao: Vec<f64>,
    pub iso: Vec<f64>,
}

fn check_dims(depth: &DepthImage, field: &HeightField) -> Result<()> {
    if depth.width != field.width || depth.height != field.height {
        return Err(Error::DimensionMismatch(format!(
            "depth image {}x{} vs height field {}x{}",
            depth.width, depth.height, field.width, field.height
        )));
    }
    let n = depth.width * depth.height;
    let lens = [
        Some(depth.depth.len()),
        Some(depth.background.len()),
        depth.attribute.as_ref().map(Vec::len),
        depth.normal.as_ref().map(Vec::len),
        Some(field.z.len()),
        Some(field.source.len()),
    ];
    if lens.iter().flatten().any(|&l| l != n) {
        return Err(Error::DimensionMismatch(
            "layer length differs from width*height".into(),
        ));
    }
    Ok(())
}

/// Base colors before shading and AO: the functional-parameter map (or the
/// neutral vessel color) on vessels, the depth colormap on the VSS.
pub fn base_colors(depth: &DepthImage, field: &HeightField, cfg: &CueConfig) -> Result<Vec<Rgb>> {
    check_dims(depth, field)?;
    Ok((0..field.z.len())
        .map(|i| match field.source[i] {
            Source::Vessel => match &depth.attribute {
                Some(attr) => param_color(attr[i], cfg.param_map, cfg.vessel_color),
                None => cfg.vessel_color,
            },
            Source::Vss => apply_colormap(field.z[i], cfg.colormap),
            Source::Empty => cfg.background_color,
        })
        .collect())
}

/// Normals used for shading: the rasterized surface normal on vessel pixels
/// when the depth image carries one, the height-field normal elsewhere.
pub fn shading_normals(
    depth: &DepthImage,
    field: &HeightField,
    relief: f64,
) -> Result<Vec<Vector3<f64>>> {
    check_dims(depth, field)?;
    let mut normal = reconstruct_normals(field, relief);
    if let Some(vessel_normals) = &depth.normal {
        for ((n, v), s) in normal.iter_mut().zip(vessel_normals).zip(&field.source) {
            if *s == Source::Vessel && v.norm() > 0.0 {
                *n = *v;
            }
        }
    }
    Ok(normal)
}

pub fn compute_layers(
    depth: &DepthImage,
    field: &HeightField,
    cfg: &CueConfig,
    relief: f64,
) -> Result<Layers> {
    cfg.validate()?;
    let base = base_colors(depth, field, cfg)?;
    let normal = shading_normals(depth, field, relief)?;
    let ao = ambient_occlusion(field, relief, cfg);
    let iso = draw_isolines(field, cfg.iso_count, cfg.iso_width);
    Ok(Layers {
        base,
        normal,
        ao,
        iso,
    })
}

/// Shades, occludes and blends iso-lines, then encodes to 8-bit sRGB.
pub fn composite(
    depth: &DepthImage,
    field: &HeightField,
    layers: &Layers,
    cfg: &CueConfig,
) -> Result<RgbaImage> {
    check_dims(depth, field)?;
    let n = field.z.len();
    if [
        layers.base.len(),
        layers.normal.len(),
        layers.ao.len(),
        layers.iso.len(),
    ]
    .iter()
    .any(|&l| l != n)
    {
        return Err(Error::DimensionMismatch(
            "cue layers differ from frame size".into(),
        ));
    }
    let mut img = RgbaImage::new(field.width, field.height);
    img.data.par_chunks_mut(4).enumerate().for_each(|(i, px)| {
        let color = match field.source[i] {
            Source::Empty => cfg.background_color,
            src => {
                let lit = shade(layers.base[i], &layers.normal[i], cfg).map(|c| c * layers.ao[i]);
                if src == Source::Vss && layers.iso[i] > 0.0 {
                    let t = layers.iso[i];
                    [0, 1, 2].map(|k| lit[k] * (1.0 - t) + cfg.line_color[k] * t)
                } else {
                    lit
                }
            }
        };
        px[0] = to_srgb8(color[0]);
        px[1] = to_srgb8(color[1]);
        px[2] = to_srgb8(color[2]);
        px[3] = 255;
    });
    Ok(img)
}

#[cfg(test)]
mod tests {
    use super::super::ColorMapKind;
    use super::*;

    fn scene() -> (DepthImage, HeightField) {
        let depth = DepthImage::from_depths(4, 1, &[Some(0.0), None, None, Some(1.0)]);
        let field = HeightField {
            width: 4,
            height: 1,
            z: vec![0.0, 0.0, 0.5, 1.0],
            source: vec![Source::Vessel, Source::Vss, Source::Vss, Source::Vessel],
        };
        (depth, field)
    }

    #[test]
    fn near_vss_pixel_is_red() {
        let (depth, field) = scene();
        let cfg = CueConfig {
            iso_count: 0,
            ao_enabled: false,
            light_dir: [0.0, 0.0, -1.0],
            specular: 0.0,
            ..CueConfig::default()
        };
        let layers = compute_layers(&depth, &field, &cfg, 2.0).unwrap();
        let img = composite(&depth, &field, &layers, &cfg).unwrap();
        let [r, g, b, a] = img.pixel(1, 0);
        assert!(r > 200 && g < 80 && b < 80, "{r} {g} {b}");
        assert_eq!(a, 255);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let (depth, mut field) = scene();
        field.width = 2;
        field.height = 2;
        let cfg = CueConfig::default();
        assert!(matches!(
            base_colors(&depth, &field, &cfg),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn colormap_never_touches_vessels() {
        let (mut depth, field) = scene();
        depth.attribute = Some(vec![0.1, 0.0, 0.0, 0.9]);
        let kinds = [
            ColorMapKind::Chromadepth,
            ColorMapKind::PseudoChromadepth,
            ColorMapKind::Mono,
            ColorMapKind::None,
        ];
        let bases: Vec<_> = kinds
            .iter()
            .map(|&colormap| {
                base_colors(
                    &depth,
                    &field,
                    &CueConfig {
                        colormap,
                        ..CueConfig::default()
                    },
                )
                .unwrap()
            })
            .collect();
        for b in &bases[1..] {
            assert_eq!(b[0], bases[0][0]);
            assert_eq!(b[3], bases[0][3]);
        }
        assert_ne!(bases[0][2], bases[1][2]);
    }
}
