use std::path::Path;

use super::DepthImage;
use crate::error::{Error, Result};
use crate::imageio;

/// Maps a perspective depth-buffer value in `[0,1]` back to view-axis
/// distance: `near` at 0, `far` at 1.
#[inline]
pub fn linearize_depth(d_ndc: f64, near: f64, far: f64) -> f64 {
    near * far / (far - d_ndc * (far - near))
}

/// Inverse of [`linearize_depth`]: the depth-buffer value a view-axis
/// distance would be stored as.
#[inline]
pub fn depth_to_ndc(z: f64, near: f64, far: f64) -> f64 {
    far * (z - near) / (z * (far - near))
}

/// Linearizes every foreground pixel of a depth-buffer image.
pub fn linearize_image(img: &DepthImage, near: f64, far: f64) -> Result<DepthImage> {
    if !(near > 0.0 && far > near) {
        return Err(Error::invalid("near/far", "require 0 < near < far"));
    }
    let mut out = img.clone();
    for (d, &bg) in out.depth.iter_mut().zip(&img.background) {
        if !bg {
            *d = linearize_depth(d.clamp(0.0, 1.0), near, far);
        }
    }
    Ok(out)
}

/// Affinely maps foreground depths onto `[0,1]`. A constant-depth scene maps
/// to 0 everywhere. Background pixels are left untouched.
pub fn normalize_depth(img: &DepthImage) -> Result<DepthImage> {
    let (lo, hi) = img
        .depth
        .iter()
        .zip(&img.background)
        .filter(|(_, &bg)| !bg)
        .fold(None, |acc: Option<(f64, f64)>, (&d, _)| match acc {
            None => Some((d, d)),
            Some((lo, hi)) => Some((lo.min(d), hi.max(d))),
        })
        .ok_or(Error::EmptyScene)?;
    let range = hi - lo;
    let mut out = img.clone();
    for (d, &bg) in out.depth.iter_mut().zip(&img.background) {
        if !bg {
            *d = if range > 0.0 { (*d - lo) / range } else { 0.0 };
        }
    }
    Ok(out)
}

/// Reads a 16-bit grayscale depth buffer as raw `[0,1]` values; 65535 marks
/// background.
pub fn read_depth_png_ndc(path: &Path) -> Result<DepthImage> {
    let (w, h, values) = imageio::read_gray16_png(path)?;
    let depths: Vec<Option<f64>> = values
        .iter()
        .map(|&v| (v != u16::MAX).then(|| v as f64 / u16::MAX as f64))
        .collect();
    Ok(DepthImage::from_depths(w, h, &depths))
}

/// Reads a linear-depth PFM; `+inf`, NaN and non-positive values are background.
pub fn read_depth_pfm(path: &Path) -> Result<DepthImage> {
    let (w, h, values) = imageio::read_pfm(path)?;
    let depths: Vec<Option<f64>> = values
        .iter()
        .map(|&v| (v.is_finite() && v > 0.0).then_some(v as f64))
        .collect();
    Ok(DepthImage::from_depths(w, h, &depths))
}

/// Loads a depth map by extension. PNG depth buffers are linearized with the
/// given planes; PFM is taken as already linear.
pub fn load_depth_map(path: &Path, near: Option<f64>, far: Option<f64>) -> Result<DepthImage> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase);
    match ext.as_deref() {
        Some("pfm") => read_depth_pfm(path),
        Some("png") => {
            let (near, far) = near.zip(far).ok_or(Error::MissingPlanes)?;
            linearize_image(&read_depth_png_ndc(path)?, near, far)
        }
        _ => Err(Error::UnsupportedFormat(format!(
            "{}: expected .pfm or .png depth map",
            path.display()
        ))),
    }
}
