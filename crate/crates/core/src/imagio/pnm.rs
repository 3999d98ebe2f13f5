//! Binary PPM (`P6`). Samples above 8 bits are written big-endian in two
//! bytes with `maxval = 2^bit_depth - 1`.

use super::pfm::{next_token, parse_dim};
use super::{max_sample, LdrImage};
use crate::error::{Error, Result};

pub fn write_ppm(image: &LdrImage) -> Vec<u8> {
    let (w, h) = (image.width(), image.height());
    let maxval = max_sample(image.bit_depth());
    let mut out = format!("P6\n{w} {h}\n{maxval}\n").into_bytes();
    let wide = image.bit_depth() > 8;
    for i in 0..w * h {
        for c in 0..3 {
            let s = image.plane(c)[i];
            if wide {
                out.extend_from_slice(&s.to_be_bytes());
            } else {
                out.push(s as u8);
            }
        }
    }
    out
}

/// Reads a `P6` file whose maxval is `2^b - 1` for some `b` in 8..=16.
pub fn parse_ppm(bytes: &[u8]) -> Result<LdrImage> {
    let mut pos = 0;
    if next_token(bytes, &mut pos)? != b"P6" {
        return Err(Error::parse(0, "missing P6 signature"));
    }
    let width = parse_dim(bytes, &mut pos)?;
    let height = parse_dim(bytes, &mut pos)?;
    let max_at = pos;
    let maxval: u32 = std::str::from_utf8(next_token(bytes, &mut pos)?)
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::parse(max_at, "bad maxval"))?;
    let bit_depth = (8..=16u8)
        .find(|&b| (1u32 << b) - 1 == maxval)
        .ok_or_else(|| Error::parse(max_at, format!("unsupported maxval {maxval}")))?;
    pos += 1;
    let bps = if bit_depth > 8 { 2 } else { 1 };
    let n = width * height;
    let data = bytes
        .get(pos..pos + n * 3 * bps)
        .ok_or_else(|| Error::parse(pos, "truncated raster"))?;
    let mut planes: [Vec<u16>; 3] = [vec![0; n], vec![0; n], vec![0; n]];
    for (i, s) in data.chunks_exact(bps).enumerate() {
        let v = if bps == 2 {
            u16::from_be_bytes([s[0], s[1]])
        } else {
            s[0] as u16
        };
        planes[i % 3][i / 3] = v;
    }
    LdrImage::new(width, height, bit_depth, planes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_image_layout() {
        let img = LdrImage::new(2, 2, 8, [vec![0; 4], vec![0; 4], vec![0; 4]]).unwrap();
        let bytes = write_ppm(&img);
        let mut expected = b"P6\n2 2\n255\n".to_vec();
        expected.extend_from_slice(&[0; 12]);
        assert_eq!(bytes, expected);
    }

    #[test]
    fn round_trip_8_and_12_bit() {
        let img = LdrImage::new(3, 1, 8, [vec![1, 2, 3], vec![4, 5, 6], vec![255, 0, 9]]).unwrap();
        assert_eq!(parse_ppm(&write_ppm(&img)).unwrap(), img);
        let img = LdrImage::new(1, 2, 12, [vec![4095, 0], vec![17, 300], vec![2048, 1]]).unwrap();
        assert_eq!(parse_ppm(&write_ppm(&img)).unwrap(), img);
    }
}
