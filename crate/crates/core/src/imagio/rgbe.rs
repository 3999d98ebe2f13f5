//! Radiance RGBE (`.hdr`) reader.
//!
//! Pixel `(r, g, b, e)` with `e > 0` decodes to `m * 2^(e - 136)` per
//! component; `e == 0` is black. Flat scanlines and new-style run-length
//! scanlines are both accepted. Only the standard `-Y h +X w` orientation
//! is supported.

use super::{half_encode, HdrImage, MAX_DIMENSION};
use crate::error::{Error, Result};

/// Decodes one RGBE quadruple to linear RGB.
pub fn rgbe_to_linear(px: [u8; 4]) -> [f64; 3] {
    if px[3] == 0 {
        return [0.0; 3];
    }
    let scale = 2f64.powi(px[3] as i32 - 136);
    [
        px[0] as f64 * scale,
        px[1] as f64 * scale,
        px[2] as f64 * scale,
    ]
}

pub fn parse_rgbe(bytes: &[u8]) -> Result<HdrImage> {
    let mut pos = 0;
    let first = read_line(bytes, &mut pos)?;
    if !(first.starts_with(b"#?RADIANCE") || first.starts_with(b"#?RGBE")) {
        return Err(Error::parse(0, "missing #?RADIANCE / #?RGBE signature"));
    }
    loop {
        let line_start = pos;
        let line = read_line(bytes, &mut pos)?;
        if line.is_empty() {
            break;
        }
        if let Some(fmt) = line.strip_prefix(b"FORMAT=") {
            if fmt.trim_ascii() != b"32-bit_rle_rgbe" {
                return Err(Error::parse(
                    line_start,
                    format!("unsupported format {}", String::from_utf8_lossy(fmt)),
                ));
            }
        }
    }

    let res_start = pos;
    let res = read_line(bytes, &mut pos)?;
    let (width, height) = parse_resolution(res).ok_or_else(|| {
        Error::parse(
            res_start,
            format!(
                "unsupported resolution/orientation line {:?}",
                String::from_utf8_lossy(res)
            ),
        )
    })?;
    if width == 0 || height == 0 || width > MAX_DIMENSION || height > MAX_DIMENSION {
        return Err(Error::parse(
            res_start,
            format!("bad dimensions {width}x{height}"),
        ));
    }

    let n = width * height;
    let mut planes: [Vec<u16>; 3] = [vec![0; n], vec![0; n], vec![0; n]];
    let mut scan = vec![[0u8; 4]; width];
    for y in 0..height {
        read_scanline(bytes, &mut pos, &mut scan)?;
        for (x, px) in scan.iter().enumerate() {
            let rgb = rgbe_to_linear(*px);
            for c in 0..3 {
                planes[c][y * width + x] = half_encode(rgb[c])?;
            }
        }
    }
    HdrImage::new(width, height, planes)
}

fn read_line<'a>(bytes: &'a [u8], pos: &mut usize) -> Result<&'a [u8]> {
    let start = *pos;
    let rest = &bytes[start..];
    let len = rest
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| Error::parse(start, "unterminated header line"))?;
    *pos = start + len + 1;
    Ok(&rest[..len])
}

fn parse_resolution(line: &[u8]) -> Option<(usize, usize)> {
    let text = std::str::from_utf8(line).ok()?;
    let mut it = text.split_ascii_whitespace();
    if it.next()? != "-Y" {
        return None;
    }
    let h: usize = it.next()?.parse().ok()?;
    if it.next()? != "+X" {
        return None;
    }
    let w: usize = it.next()?.parse().ok()?;
    if it.next().is_some() {
        return None;
    }
    Some((w, h))
}

fn read_scanline(bytes: &[u8], pos: &mut usize, scan: &mut [[u8; 4]]) -> Result<()> {
    let width = scan.len();
    let start = *pos;
    let head = bytes.get(start..start + 4);
    let is_rle = match head {
        Some(&[2, 2, hi, lo]) => {
            width < 0x8000 && hi & 0x80 == 0 && usize::from(hi) << 8 | usize::from(lo) == width
        }
        _ => false,
    };
    if !is_rle {
        let need = width * 4;
        let data = bytes
            .get(start..start + need)
            .ok_or_else(|| Error::parse(start, "truncated flat scanline"))?;
        for (px, chunk) in scan.iter_mut().zip(data.chunks_exact(4)) {
            px.copy_from_slice(chunk);
        }
        *pos = start + need;
        return Ok(());
    }

    let mut p = start + 4;
    let byte_at = |p: usize| {
        bytes
            .get(p)
            .copied()
            .ok_or_else(|| Error::parse(p, "truncated RLE scanline"))
    };
    for comp in 0..4 {
        let mut x = 0;
        while x < width {
            let count = byte_at(p)? as usize;
            p += 1;
            if count > 128 {
                let run = count - 128;
                if x + run > width {
                    return Err(Error::parse(p - 1, "RLE run overruns scanline"));
                }
                let v = byte_at(p)?;
                p += 1;
                for px in &mut scan[x..x + run] {
                    px[comp] = v;
                }
                x += run;
            } else {
                if count == 0 || x + count > width {
                    return Err(Error::parse(p - 1, "bad RLE literal count"));
                }
                for px in &mut scan[x..x + count] {
                    px[comp] = byte_at(p)?;
                    p += 1;
                }
                x += count;
            }
        }
    }
    *pos = p;
    Ok(())
}
