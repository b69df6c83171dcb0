//! Image files: binary PPM (P6) and PGM (P5), and 8-bit PNG.
//!
//! PPM/PGM round trips are bit-exact. Only `maxval = 255` is accepted.

use std::fs;
use std::io::BufWriter;
use std::path::Path;

use leukocov_core::preprocess::BinaryMask;
use leukocov_core::RasterImage;

use crate::error::{AppError, Result};

const PNG_SIGNATURE: &[u8] = b"\x89PNG\r\n\x1a\n";

/// Reads a PPM/PGM or PNG file, chosen by content rather than extension.
pub fn read_image(path: &Path) -> Result<RasterImage> {
    let bytes = fs::read(path).map_err(|e| AppError::io(path, e))?;
    if bytes.starts_with(PNG_SIGNATURE) {
        decode_png(&bytes).map_err(|m| AppError::decode(path, m))
    } else if bytes.starts_with(b"P6") || bytes.starts_with(b"P5") {
        decode_pnm(&bytes).map_err(|m| AppError::decode(path, m))
    } else {
        Err(AppError::decode(
            path,
            "unrecognized image format (expected PPM, PGM or PNG)",
        ))
    }
}

/// Writes RGB pixels; `.png` selects PNG, anything else binary PPM.
pub fn write_image(path: &Path, img: &RasterImage) -> Result<()> {
    let bytes = if has_png_extension(path) {
        encode_png(img.width(), img.height(), png::ColorType::Rgb, &img.to_interleaved())
    } else {
        encode_pnm(b"P6", img.width(), img.height(), &img.to_interleaved())
    };
    fs::write(path, bytes).map_err(|e| AppError::io(path, e))
}

/// Writes a mask as 0/255 gray; `.png` selects PNG, `.ppm` an RGB PPM,
/// anything else binary PGM.
pub fn write_mask(path: &Path, mask: &BinaryMask) -> Result<()> {
    let gray: Vec<u8> = mask.bits().iter().map(|&b| if b { 255 } else { 0 }).collect();
    let (w, h) = (mask.width(), mask.height());
    let ext = path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase);
    let bytes = match ext.as_deref() {
        Some("png") => encode_png(w, h, png::ColorType::Grayscale, &gray),
        Some("ppm") => {
            let rgb: Vec<u8> = gray.iter().flat_map(|&v| [v, v, v]).collect();
            encode_pnm(b"P6", w, h, &rgb)
        }
        _ => encode_pnm(b"P5", w, h, &gray),
    };
    fs::write(path, bytes).map_err(|e| AppError::io(path, e))
}

/// Reads a mask written by [`write_mask`] (or any image): nonzero is set.
pub fn read_mask(path: &Path) -> Result<BinaryMask> {
    let img = read_image(path)?;
    let bits = img.pixels().iter().map(|p| p.iter().any(|&c| c != 0)).collect();
    BinaryMask::new(img.width(), img.height(), bits).map_err(|e| AppError::decode(path, e.to_string()))
}

fn has_png_extension(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("png"))
}

pub fn encode_pnm(magic: &[u8; 2], width: usize, height: usize, data: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(data.len() + 32);
    out.extend_from_slice(magic);
    out.extend_from_slice(format!("\n{width} {height}\n255\n").as_bytes());
    out.extend_from_slice(data);
    out
}

/// Decodes binary P6 (RGB) or P5 (gray, replicated to RGB).
pub fn decode_pnm(bytes: &[u8]) -> std::result::Result<RasterImage, String> {
    let channels = match &bytes[..2.min(bytes.len())] {
        b"P6" => 3,
        b"P5" => 1,
        _ => return Err("not a binary PPM/PGM".into()),
    };
    let mut pos = 2;
    let mut fields = [0usize; 3];
    for field in &mut fields {
        *field = next_header_number(bytes, &mut pos)?;
    }
    let [width, height, maxval] = fields;
    if maxval != 255 {
        return Err(format!("unsupported maxval {maxval} (only 255)"));
    }
    // exactly one whitespace byte separates the header from the raster
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err("truncated header".into());
    }
    pos += 1;
    let expected = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(channels))
        .ok_or("image dimensions overflow")?;
    let raster = &bytes[pos..];
    if raster.len() < expected {
        return Err(format!("raster has {} bytes, expected {expected}", raster.len()));
    }
    let raster = &raster[..expected];
    let rgb: Vec<u8> = if channels == 3 {
        raster.to_vec()
    } else {
        raster.iter().flat_map(|&v| [v, v, v]).collect()
    };
    RasterImage::from_interleaved(width, height, &rgb).map_err(|e| e.to_string())
}

fn next_header_number(bytes: &[u8], pos: &mut usize) -> std::result::Result<usize, String> {
    loop {
        match bytes.get(*pos) {
            None => return Err("truncated header".into()),
            Some(b'#') => {
                while bytes.get(*pos).is_some_and(|&b| b != b'\n') {
                    *pos += 1;
                }
            }
            Some(b) if b.is_ascii_whitespace() => *pos += 1,
            Some(_) => break,
        }
    }
    let start = *pos;
    while bytes.get(*pos).is_some_and(u8::is_ascii_digit) {
        *pos += 1;
    }
    std::str::from_utf8(&bytes[start..*pos])
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| "malformed header".into())
}

fn encode_png(width: usize, height: usize, color: png::ColorType, data: &[u8]) -> Vec<u8> {
    let mut out = Vec::new();
    {
        let mut encoder = png::Encoder::new(BufWriter::new(&mut out), width as u32, height as u32);
        encoder.set_color(color);
        encoder.set_depth(png::BitDepth::Eight);
        let mut writer = encoder.write_header().expect("in-memory PNG header");
        writer.write_image_data(data).expect("in-memory PNG data");
        writer.finish().expect("in-memory PNG finish");
    }
    out
}

fn decode_png(bytes: &[u8]) -> std::result::Result<RasterImage, String> {
    let mut decoder = png::Decoder::new(std::io::Cursor::new(bytes));
    decoder.set_transformations(png::Transformations::EXPAND | png::Transformations::STRIP_16);
    let mut reader = decoder.read_info().map_err(|e| e.to_string())?;
    let size = reader.output_buffer_size().ok_or("PNG too large")?;
    let mut buf = vec![0; size];
    let info = reader.next_frame(&mut buf).map_err(|e| e.to_string())?;
    let data = &buf[..info.buffer_size()];
    let (w, h) = (info.width as usize, info.height as usize);
    let rgb: Vec<u8> = match info.color_type {
        png::ColorType::Rgb => data.to_vec(),
        png::ColorType::Rgba => data.chunks_exact(4).flat_map(|p| [p[0], p[1], p[2]]).collect(),
        png::ColorType::Grayscale => data.iter().flat_map(|&v| [v, v, v]).collect(),
        png::ColorType::GrayscaleAlpha => data.chunks_exact(2).flat_map(|p| [p[0], p[0], p[0]]).collect(),
        png::ColorType::Indexed => return Err("indexed PNG was not expanded".into()),
    };
    RasterImage::from_interleaved(w, h, &rgb).map_err(|e| e.to_string())
}

/// In-memory write used by tests and callers that need bytes.
pub fn ppm_bytes(img: &RasterImage) -> Vec<u8> {
    encode_pnm(b"P6", img.width(), img.height(), &img.to_interleaved())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn header_comments_and_whitespace() {
        let mut bytes = b"P6 # comment\n 2\t1 # another\n255\n".to_vec();
        bytes.extend_from_slice(&[1, 2, 3, 4, 5, 6]);
        let img = decode_pnm(&bytes).unwrap();
        assert_eq!((img.width(), img.height()), (2, 1));
        assert_eq!(img.pixels(), [[1, 2, 3], [4, 5, 6]]);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(decode_pnm(b"P6\n2 2\n65535\n").is_err());
        assert!(decode_pnm(b"P6\n2 2\n255\n\x00\x01").is_err());
        assert!(decode_pnm(b"P3\n1 1\n255\n0 0 0").is_err());
        assert!(decode_pnm(b"P6\n2").is_err());
    }

    #[test]
    fn gray_pnm_replicates() {
        let img = decode_pnm(&encode_pnm(b"P5", 2, 1, &[7, 200])).unwrap();
        assert_eq!(img.pixels(), [[7, 7, 7], [200, 200, 200]]);
    }

    proptest! {
        #[test]
        fn ppm_roundtrip_is_exact(w in 1usize..9, h in 1usize..9, seed in any::<u64>()) {
            let px: Vec<[u8; 3]> = (0..w * h)
                .map(|i| {
                    let v = seed.wrapping_mul(6364136223846793005).wrapping_add((i as u64).wrapping_mul(1442695040888963407));
                    [(v >> 8) as u8, (v >> 24) as u8, (v >> 40) as u8]
                })
                .collect();
            let img = RasterImage::new(w, h, px).unwrap();
            prop_assert_eq!(decode_pnm(&ppm_bytes(&img)).unwrap(), img.clone());
            let png = encode_png(w, h, png::ColorType::Rgb, &img.to_interleaved());
            prop_assert_eq!(decode_png(&png).unwrap(), img);
        }
    }
}
