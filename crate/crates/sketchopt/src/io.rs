//! Raster file formats: PNG (8/16-bit gray or RGB), PGM (P2/P5) and PFM.

use std::io::Cursor;
use std::path::Path;

use image::{DynamicImage, ImageFormat};
use sketchopt_core::raster::RasterImage;

use crate::error::{Error, Result};

const LUMA: [f32; 3] = [0.2126, 0.7152, 0.0722];

fn format_err(msg: impl Into<String>) -> Error {
    Error::Format(msg.into())
}

pub fn load_raster(path: impl AsRef<Path>) -> Result<RasterImage> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_raster(&bytes)
}

/// Decodes a raster by sniffing its magic bytes.
pub fn decode_raster(bytes: &[u8]) -> Result<RasterImage> {
    match bytes {
        [0x89, b'P', b'N', b'G', ..] => decode_png(bytes),
        [b'P', b'2', ..] => decode_pgm(bytes, false),
        [b'P', b'5', ..] => decode_pgm(bytes, true),
        [b'P', b'f', ..] => decode_pfm(bytes, false),
        [b'P', b'F', ..] => decode_pfm(bytes, true),
        _ => Err(format_err("unsupported image format (expected PNG, PGM or PFM)")),
    }
}

fn luminosity(rgb: [f32; 3]) -> f32 {
    (LUMA[0] * rgb[0] + LUMA[1] * rgb[1] + LUMA[2] * rgb[2]).clamp(0.0, 1.0)
}

/// Alpha channels are ignored.
fn decode_png(bytes: &[u8]) -> Result<RasterImage> {
    let img = image::load_from_memory_with_format(bytes, ImageFormat::Png)
        .map_err(|e| format_err(format!("PNG: {e}")))?;
    let (w, h) = (img.width() as usize, img.height() as usize);
    let (data, depth): (Vec<f32>, u8) = match &img {
        DynamicImage::ImageLuma8(b) => (b.pixels().map(|p| p.0[0] as f32 / 255.0).collect(), 8),
        DynamicImage::ImageLumaA8(b) => (b.pixels().map(|p| p.0[0] as f32 / 255.0).collect(), 8),
        DynamicImage::ImageLuma16(b) => (b.pixels().map(|p| p.0[0] as f32 / 65535.0).collect(), 16),
        DynamicImage::ImageLumaA16(b) => (b.pixels().map(|p| p.0[0] as f32 / 65535.0).collect(), 16),
        DynamicImage::ImageRgb8(_) | DynamicImage::ImageRgba8(_) => {
            let rgb = img.to_rgb8();
            (rgb.pixels().map(|p| luminosity(p.0.map(|c| c as f32 / 255.0))).collect(), 8)
        }
        DynamicImage::ImageRgb16(_) | DynamicImage::ImageRgba16(_) => {
            let rgb = img.to_rgb16();
            (rgb.pixels().map(|p| luminosity(p.0.map(|c| c as f32 / 65535.0))).collect(), 16)
        }
        other => return Err(format_err(format!("unsupported PNG color type {:?}", other.color()))),
    };
    Ok(RasterImage::new(w, h, data, depth)?)
}

/// Netpbm header tokens with `#` comments skipped. Returns the tokens and
/// the offset just past the single whitespace byte that ends the header.
fn header_tokens(bytes: &[u8], count: usize) -> Result<(Vec<String>, usize)> {
    let mut tokens = Vec::new();
    let mut i = 2;
    while tokens.len() < count {
        match bytes.get(i) {
            None => return Err(format_err("truncated header")),
            Some(b'#') => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            }
            Some(c) if c.is_ascii_whitespace() => i += 1,
            Some(_) => {
                let start = i;
                while i < bytes.len() && !bytes[i].is_ascii_whitespace() {
                    i += 1;
                }
                tokens.push(String::from_utf8_lossy(&bytes[start..i]).into_owned());
            }
        }
    }
    if i >= bytes.len() && count > 0 {
        return Err(format_err("truncated header"));
    }
    Ok((tokens, i + 1))
}

fn parse_dim(s: &str) -> Result<usize> {
    s.parse().map_err(|_| format_err(format!("bad dimension '{s}'")))
}

fn decode_pgm(bytes: &[u8], binary: bool) -> Result<RasterImage> {
    let (tok, offset) = header_tokens(bytes, 3)?;
    let (w, h) = (parse_dim(&tok[0])?, parse_dim(&tok[1])?);
    let maxval: u32 = tok[2].parse().map_err(|_| format_err(format!("bad maxval '{}'", tok[2])))?;
    if maxval == 0 || maxval > 65535 {
        return Err(format_err(format!("maxval {maxval} outside 1..=65535")));
    }
    if w == 0 || h == 0 {
        return Err(format_err(format!("zero-dimension image {w}x{h}")));
    }
    let n = w.checked_mul(h).ok_or_else(|| format_err("image too large"))?;
    let samples: Vec<u32> = if binary {
        let wide = maxval > 255;
        let body = &bytes[offset.min(bytes.len())..];
        let need = if wide { 2 * n } else { n };
        if body.len() < need {
            return Err(format_err(format!("expected {need} data bytes, found {}", body.len())));
        }
        if wide {
            body[..need].chunks_exact(2).map(|c| u16::from_be_bytes([c[0], c[1]]) as u32).collect()
        } else {
            body[..n].iter().map(|&b| b as u32).collect()
        }
    } else {
        let text = std::str::from_utf8(&bytes[offset.min(bytes.len())..])
            .map_err(|_| format_err("P2 body is not ASCII"))?;
        let v: Vec<u32> = text
            .split_ascii_whitespace()
            .take(n)
            .map(|t| t.parse().map_err(|_| format_err(format!("bad sample '{t}'"))))
            .collect::<Result<_>>()?;
        if v.len() < n {
            return Err(format_err(format!("expected {n} samples, found {}", v.len())));
        }
        v
    };
    if let Some(bad) = samples.iter().find(|&&s| s > maxval) {
        return Err(format_err(format!("sample {bad} exceeds maxval {maxval}")));
    }
    let depth = if maxval > 255 { 16 } else { 8 };
    let data = samples.into_iter().map(|s| s as f32 / maxval as f32).collect();
    Ok(RasterImage::new(w, h, data, depth)?)
}

/// PFM rows are stored bottom to top; a negative scale means little-endian.
/// Samples must already lie in `[0, 1]`.
fn decode_pfm(bytes: &[u8], color: bool) -> Result<RasterImage> {
    let (tok, offset) = header_tokens(bytes, 3)?;
    let (w, h) = (parse_dim(&tok[0])?, parse_dim(&tok[1])?);
    let scale: f32 = tok[2].parse().map_err(|_| format_err(format!("bad scale '{}'", tok[2])))?;
    if scale == 0.0 || !scale.is_finite() {
        return Err(format_err("PFM scale must be finite and nonzero"));
    }
    if w == 0 || h == 0 {
        return Err(format_err(format!("zero-dimension image {w}x{h}")));
    }
    let channels = if color { 3 } else { 1 };
    let n = w.checked_mul(h).ok_or_else(|| format_err("image too large"))?;
    let body = &bytes[offset.min(bytes.len())..];
    if body.len() < 4 * channels * n {
        return Err(format_err(format!("expected {} data bytes, found {}", 4 * channels * n, body.len())));
    }
    let read = |k: usize| {
        let b = [body[4 * k], body[4 * k + 1], body[4 * k + 2], body[4 * k + 3]];
        if scale < 0.0 {
            f32::from_le_bytes(b)
        } else {
            f32::from_be_bytes(b)
        }
    };
    let mut data = vec![0.0f32; n];
    for row in 0..h {
        let y = h - 1 - row;
        for x in 0..w {
            let k = (row * w + x) * channels;
            let v = if color { luminosity([read(k), read(k + 1), read(k + 2)]) } else { read(k) };
            if !v.is_finite() {
                return Err(format_err("non-finite PFM sample"));
            }
            data[y * w + x] = v;
        }
    }
    Ok(RasterImage::new(w, h, data, 32)?)
}

/// Binary PGM with 16-bit big-endian samples.
pub fn encode_pgm16(img: &RasterImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n65535\n", img.width(), img.height()).into_bytes();
    for &v in img.intensity() {
        out.extend_from_slice(&quantize16(v).to_be_bytes());
    }
    out
}

/// Little-endian grayscale PFM.
pub fn encode_pfm(img: &RasterImage) -> Vec<u8> {
    let (w, h) = (img.width(), img.height());
    let mut out = format!("Pf\n{w} {h}\n-1.0\n").into_bytes();
    for row in (0..h).rev() {
        for x in 0..w {
            out.extend_from_slice(&img.get(x, row).to_le_bytes());
        }
    }
    out
}

/// 16-bit grayscale PNG.
pub fn encode_png16(img: &RasterImage) -> Result<Vec<u8>> {
    let data: Vec<u16> = img.intensity().iter().map(|&v| quantize16(v)).collect();
    let buf = image::ImageBuffer::<image::Luma<u16>, _>::from_raw(img.width() as u32, img.height() as u32, data)
        .ok_or_else(|| format_err("image too large for PNG"))?;
    let mut out = Cursor::new(Vec::new());
    buf.write_to(&mut out, ImageFormat::Png).map_err(|e| format_err(format!("PNG: {e}")))?;
    Ok(out.into_inner())
}

fn quantize16(v: f32) -> u16 {
    (v.clamp(0.0, 1.0) * 65535.0).round() as u16
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ascii_pgm_endpoints() {
        let img = decode_raster(b"P2\n# two pixels\n2 1\n255\n0 255\n").unwrap();
        assert_eq!(img.intensity(), &[0.0, 1.0]);
        assert_eq!(img.source_depth(), 8);
    }

    #[test]
    fn wide_binary_pgm_mid_gray() {
        let mut bytes = b"P5 3 2 65535\n".to_vec();
        for _ in 0..6 {
            bytes.extend_from_slice(&32768u16.to_be_bytes());
        }
        let img = decode_raster(&bytes).unwrap();
        assert_eq!(img.source_depth(), 16);
        for &v in img.intensity() {
            assert!((v as f64 - 32768.0 / 65535.0).abs() < 1e-7);
        }
    }

    #[test]
    fn red_png_pixel_is_luma_weight() {
        let buf = image::RgbImage::from_pixel(1, 1, image::Rgb([255, 0, 0]));
        let mut png = Cursor::new(Vec::new());
        buf.write_to(&mut png, ImageFormat::Png).unwrap();
        let img = decode_raster(png.get_ref()).unwrap();
        assert!((img.get(0, 0) - 0.2126).abs() < 1e-6);
    }

    #[test]
    fn pgm16_and_pfm_round_trip() {
        let img = RasterImage::from_fn(5, 3, |x, y| (x * 3 + y) as f32 / 20.0).unwrap();
        let back = decode_raster(&encode_pgm16(&img)).unwrap();
        for (a, b) in img.intensity().iter().zip(back.intensity()) {
            assert!((a - b).abs() <= 0.5 / 65535.0 + 1e-7);
        }
        assert_eq!(decode_raster(&encode_pfm(&img)).unwrap().intensity(), img.intensity());
        let png = decode_raster(&encode_png16(&img).unwrap()).unwrap();
        assert_eq!(png.intensity(), back.intensity());
    }

    #[test]
    fn rejects_bad_inputs() {
        assert_eq!(decode_raster(b"GIF89a").unwrap_err().kind(), "FormatError");
        assert_eq!(decode_raster(b"P2\n0 4\n255\n").unwrap_err().kind(), "FormatError");
        assert_eq!(decode_raster(b"P5\n2 2\n255\n\x01").unwrap_err().kind(), "FormatError");
        assert_eq!(decode_raster(b"P2\n1 1\n10\n11\n").unwrap_err().kind(), "FormatError");
        assert_eq!(load_raster("/nonexistent/sketch.png").unwrap_err().kind(), "IoError");
    }
}
