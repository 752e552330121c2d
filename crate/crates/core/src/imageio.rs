//! Raw image file formats: PFM float maps and PNG (16-bit depth input, 8-bit
//! color, grayscale and indexed output).

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// An 8-bit sRGB RGBA image, row-major, top row first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbaImage {
    pub width: usize,
    pub height: usize,
    pub data: Vec<u8>,
}

impl RgbaImage {
    pub fn new(width: usize, height: usize) -> Self {
        RgbaImage {
            width,
            height,
            data: vec![0; width * height * 4],
        }
    }

    pub fn pixel(&self, x: usize, y: usize) -> [u8; 4] {
        let i = (y * self.width + x) * 4;
        [
            self.data[i],
            self.data[i + 1],
            self.data[i + 2],
            self.data[i + 3],
        ]
    }

    pub fn set_pixel(&mut self, x: usize, y: usize, rgba: [u8; 4]) {
        let i = (y * self.width + x) * 4;
        self.data[i..i + 4].copy_from_slice(&rgba);
    }

    /// Encodes as PNG. Encoder settings are fixed so identical pixels give
    /// identical bytes.
    pub fn encode_png(&self) -> Result<Vec<u8>> {
        encode_png(
            self.width,
            self.height,
            png::ColorType::Rgba,
            png::BitDepth::Eight,
            None,
            &self.data,
        )
    }

    pub fn write_png(&self, path: &Path) -> Result<()> {
        let bytes = self.encode_png()?;
        std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
    }
}

fn encode_png(
    width: usize,
    height: usize,
    color: png::ColorType,
    depth: png::BitDepth,
    palette: Option<Vec<u8>>,
    data: &[u8],
) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    {
        let mut encoder = png::Encoder::new(&mut out, width as u32, height as u32);
        encoder.set_color(color);
        encoder.set_depth(depth);
        encoder.set_compression(png::Compression::Default);
        encoder.set_filter(png::FilterType::Sub);
        encoder.set_adaptive_filter(png::AdaptiveFilterType::NonAdaptive);
        if let Some(palette) = palette {
            encoder.set_palette(palette);
        }
        let mut writer = encoder.write_header()?;
        writer.write_image_data(data)?;
        writer.finish()?;
    }
    Ok(out)
}

/// Writes values in `[0,1]` as an 8-bit grayscale PNG.
pub fn write_gray_png(path: &Path, width: usize, height: usize, values: &[f64]) -> Result<()> {
    let data: Vec<u8> = values
        .iter()
        .map(|v| (v.clamp(0.0, 1.0) * 255.0).round() as u8)
        .collect();
    let bytes = encode_png(
        width,
        height,
        png::ColorType::Grayscale,
        png::BitDepth::Eight,
        None,
        &data,
    )?;
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Writes palette indices as an indexed PNG with the given RGB palette
/// (at most 256 entries).
pub fn write_indexed_png(
    path: &Path,
    width: usize,
    height: usize,
    indices: &[u8],
    palette: &[[u8; 3]],
) -> Result<()> {
    let flat: Vec<u8> = palette.iter().flatten().copied().collect();
    let bytes = encode_png(
        width,
        height,
        png::ColorType::Indexed,
        png::BitDepth::Eight,
        Some(flat),
        indices,
    )?;
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Writes a 16-bit grayscale PNG.
pub fn write_gray16_png(path: &Path, width: usize, height: usize, values: &[u16]) -> Result<()> {
    let data: Vec<u8> = values.iter().flat_map(|v| v.to_be_bytes()).collect();
    let bytes = encode_png(
        width,
        height,
        png::ColorType::Grayscale,
        png::BitDepth::Sixteen,
        None,
        &data,
    )?;
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Reads a single-channel 16-bit PNG. Returns `(width, height, values)`.
pub fn read_gray16_png(path: &Path) -> Result<(usize, usize, Vec<u16>)> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let decoder = png::Decoder::new(BufReader::new(file));
    let mut reader = decoder.read_info()?;
    let info = reader.info();
    if info.color_type != png::ColorType::Grayscale || info.bit_depth != png::BitDepth::Sixteen {
        return Err(Error::UnsupportedFormat(format!(
            "{}: expected 16-bit grayscale PNG, found {:?} {:?}",
            path.display(),
            info.color_type,
            info.bit_depth
        )));
    }
    let mut buf = vec![0; reader.output_buffer_size()];
    let frame = reader.next_frame(&mut buf)?;
    let (w, h) = (frame.width as usize, frame.height as usize);
    let values = buf[..frame.buffer_size()]
        .chunks_exact(2)
        .map(|c| u16::from_be_bytes([c[0], c[1]]))
        .collect();
    Ok((w, h, values))
}

/// Reads a grayscale PFM (`Pf`). Rows are returned top row first.
pub fn read_pfm(path: &Path) -> Result<(usize, usize, Vec<f32>)> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = BufReader::new(file);
    let parse_err = |line: usize, message: &str| Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.to_string(),
    };

    let mut tokens: Vec<String> = Vec::new();
    let mut line_no = 0;
    while tokens.len() < 4 {
        let mut line = String::new();
        let n = reader
            .read_line(&mut line)
            .map_err(|e| Error::io(path, e))?;
        line_no += 1;
        if n == 0 {
            return Err(parse_err(line_no, "truncated PFM header"));
        }
        tokens.extend(line.split_whitespace().map(str::to_string));
    }
    match tokens[0].as_str() {
        "Pf" => {}
        "PF" => {
            return Err(Error::UnsupportedFormat(
                "color PFM (PF); only grayscale Pf is supported".into(),
            ))
        }
        _ => return Err(parse_err(1, "missing Pf magic")),
    }
    let width: usize = tokens[1]
        .parse()
        .map_err(|_| parse_err(2, "bad PFM width"))?;
    let height: usize = tokens[2]
        .parse()
        .map_err(|_| parse_err(2, "bad PFM height"))?;
    let scale: f32 = tokens[3]
        .parse()
        .map_err(|_| parse_err(3, "bad PFM scale"))?;
    let little_endian = scale < 0.0;

    let mut raw = vec![0u8; width * height * 4];
    reader
        .read_exact(&mut raw)
        .map_err(|_| parse_err(line_no, "truncated PFM pixel data"))?;
    let mut values = vec![0f32; width * height];
    for (row_from_bottom, chunk) in raw.chunks_exact(width * 4).enumerate() {
        let y = height - 1 - row_from_bottom;
        for (x, b) in chunk.chunks_exact(4).enumerate() {
            let b = [b[0], b[1], b[2], b[3]];
            values[y * width + x] = if little_endian {
                f32::from_le_bytes(b)
            } else {
                f32::from_be_bytes(b)
            };
        }
    }
    Ok((width, height, values))
}

/// Writes a little-endian grayscale PFM; `values` are top row first.
pub fn write_pfm(path: &Path, width: usize, height: usize, values: &[f32]) -> Result<()> {
    let mut out = Vec::with_capacity(values.len() * 4 + 32);
    write!(out, "Pf\n{width} {height}\n-1.0\n").expect("write to vec");
    for y in (0..height).rev() {
        for v in &values[y * width..(y + 1) * width] {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}
