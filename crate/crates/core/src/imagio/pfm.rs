//! Portable float map (`PF`) reader and writer. Rows are stored bottom to
//! top; a negative scale marks little-endian samples.

use super::{decode_unchecked, normalize_sample, HdrImage, MAX_DIMENSION};
use crate::error::{Error, Result};

pub fn parse_pfm(bytes: &[u8]) -> Result<HdrImage> {
    let mut pos = 0;
    let magic = next_token(bytes, &mut pos)?;
    match magic {
        b"PF" => {}
        b"Pf" => return Err(Error::parse(0, "greyscale PFM is not supported")),
        _ => return Err(Error::parse(0, "missing PF signature")),
    }
    let width = parse_dim(bytes, &mut pos)?;
    let height = parse_dim(bytes, &mut pos)?;
    let scale_at = pos;
    let scale: f64 = std::str::from_utf8(next_token(bytes, &mut pos)?)
        .ok()
        .and_then(|s| s.parse().ok())
        .filter(|s: &f64| s.is_finite() && *s != 0.0)
        .ok_or_else(|| Error::parse(scale_at, "bad scale"))?;
    // exactly one whitespace byte separates the header from the raster
    match bytes.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos += 1,
        _ => return Err(Error::parse(pos, "header not terminated")),
    }
    let little = scale < 0.0;

    let need = width * height * 12;
    let data = bytes
        .get(pos..pos + need)
        .ok_or_else(|| Error::parse(pos, format!("raster needs {need} bytes")))?;
    let n = width * height;
    let mut planes: [Vec<u16>; 3] = [vec![0; n], vec![0; n], vec![0; n]];
    for (i, chunk) in data.chunks_exact(4).enumerate() {
        let raw = [chunk[0], chunk[1], chunk[2], chunk[3]];
        let v = if little {
            f32::from_le_bytes(raw)
        } else {
            f32::from_be_bytes(raw)
        };
        let px = i / 3;
        let row_from_bottom = px / width;
        let dst = (height - 1 - row_from_bottom) * width + px % width;
        planes[i % 3][dst] =
            normalize_sample(v as f64).map_err(|e| Error::parse(pos + i * 4, e.to_string()))?;
    }
    HdrImage::new(width, height, planes)
}

/// Writes a little-endian colour PFM.
pub fn write_pfm(image: &HdrImage) -> Vec<u8> {
    let (w, h) = (image.width(), image.height());
    let mut out = format!("PF\n{w} {h}\n-1.0\n").into_bytes();
    out.reserve(w * h * 12);
    for y in (0..h).rev() {
        for x in 0..w {
            for c in 0..3 {
                let v = decode_unchecked(image.plane(c)[y * w + x]) as f32;
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
    }
    out
}

pub(super) fn next_token<'a>(bytes: &'a [u8], pos: &mut usize) -> Result<&'a [u8]> {
    while *pos < bytes.len() {
        if bytes[*pos] == b'#' {
            while *pos < bytes.len() && bytes[*pos] != b'\n' {
                *pos += 1;
            }
        } else if bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        } else {
            break;
        }
    }
    let start = *pos;
    while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    if start == *pos {
        return Err(Error::parse(start, "truncated header"));
    }
    Ok(&bytes[start..*pos])
}

pub(super) fn parse_dim(bytes: &[u8], pos: &mut usize) -> Result<usize> {
    let at = *pos;
    let tok = next_token(bytes, pos)?;
    let v: usize = std::str::from_utf8(tok)
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::parse(at, "bad dimension"))?;
    if v == 0 || v > MAX_DIMENSION {
        return Err(Error::parse(at, format!("dimension {v} out of range")));
    }
    Ok(v)
}
