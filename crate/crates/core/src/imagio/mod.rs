//! Image containers and file I/O: Radiance RGBE, PFM and PPM.
//!
//! HDR samples are held as binary16 bit codes. Every code in an [`HdrImage`]
//! is a non-negative finite half; out-of-domain input is normalized or
//! rejected on the way in so the codec never sees it.

mod half;
mod pfm;
mod pnm;
mod rgbe;

pub(crate) use self::half::decode_unchecked;
pub use self::half::{
    half_decode, half_encode, is_valid_code, normalize_sample, HALF_MAX_CODE, VALID_CODE_COUNT,
};
pub use self::pfm::{parse_pfm, write_pfm};
pub use self::pnm::{parse_ppm, write_ppm};
pub use self::rgbe::parse_rgbe;

use crate::error::{Error, Result};

/// Largest accepted width or height for parsed files.
pub const MAX_DIMENSION: usize = 1 << 16;

/// BT.709 luminance weights.
pub const LUMA_WEIGHTS: [f64; 3] = [0.2126, 0.7152, 0.0722];

/// Linear-light RGB image stored as half-float codes, one plane per channel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HdrImage {
    width: usize,
    height: usize,
    planes: [Vec<u16>; 3],
}

impl HdrImage {
    pub fn new(width: usize, height: usize, planes: [Vec<u16>; 3]) -> Result<Self> {
        check_dims(width, height)?;
        let n = width * height;
        for (c, plane) in planes.iter().enumerate() {
            if plane.len() != n {
                return Err(Error::Param(format!(
                    "channel {c} has {} samples, expected {n}",
                    plane.len()
                )));
            }
            if let Some(bad) = plane.iter().find(|&&code| !is_valid_code(code)) {
                return Err(Error::Domain(format!(
                    "channel {c} holds invalid half code 0x{bad:04X}"
                )));
            }
        }
        Ok(Self {
            width,
            height,
            planes,
        })
    }

    /// Builds an image from interleaved linear RGB values, applying ingestion
    /// normalization to each sample.
    pub fn from_linear(width: usize, height: usize, rgb: &[f64]) -> Result<Self> {
        check_dims(width, height)?;
        if rgb.len() != width * height * 3 {
            return Err(Error::Param(format!(
                "expected {} interleaved samples, got {}",
                width * height * 3,
                rgb.len()
            )));
        }
        let mut planes: [Vec<u16>; 3] = Default::default();
        for p in planes.iter_mut() {
            p.reserve(width * height);
        }
        for px in rgb.chunks_exact(3) {
            for c in 0..3 {
                planes[c].push(normalize_sample(px[c])?);
            }
        }
        Ok(Self {
            width,
            height,
            planes,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }

    pub fn plane(&self, channel: usize) -> &[u16] {
        &self.planes[channel]
    }

    pub fn planes(&self) -> &[Vec<u16>; 3] {
        &self.planes
    }

    pub fn into_planes(self) -> [Vec<u16>; 3] {
        self.planes
    }

    /// Linear RGB value of pixel `index` (row-major).
    pub fn linear(&self, index: usize) -> [f64; 3] {
        [0, 1, 2].map(|c| decode_unchecked(self.planes[c][index]))
    }

    /// Interleaved linear RGB samples.
    pub fn to_linear(&self) -> Vec<f64> {
        (0..self.pixel_count())
            .flat_map(|i| self.linear(i))
            .collect()
    }
}

/// Tone-mapped integer RGB image of 8 to 16 bits per sample.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LdrImage {
    width: usize,
    height: usize,
    bit_depth: u8,
    planes: [Vec<u16>; 3],
}

impl LdrImage {
    pub fn new(width: usize, height: usize, bit_depth: u8, planes: [Vec<u16>; 3]) -> Result<Self> {
        check_dims(width, height)?;
        if !(8..=16).contains(&bit_depth) {
            return Err(Error::Param(format!("bit depth {bit_depth} not in 8..=16")));
        }
        let max = max_sample(bit_depth);
        let n = width * height;
        for (c, plane) in planes.iter().enumerate() {
            if plane.len() != n {
                return Err(Error::Param(format!(
                    "channel {c} has {} samples, expected {n}",
                    plane.len()
                )));
            }
            if plane.iter().any(|&s| s > max) {
                return Err(Error::Param(format!(
                    "channel {c} has samples above {max} for {bit_depth}-bit image"
                )));
            }
        }
        Ok(Self {
            width,
            height,
            bit_depth,
            planes,
        })
    }

    /// Builds an 8-bit image without re-validating samples.
    pub(crate) fn from_u8_planes(width: usize, height: usize, planes: [Vec<u16>; 3]) -> Self {
        debug_assert!(planes.iter().all(|p| p.len() == width * height));
        Self {
            width,
            height,
            bit_depth: 8,
            planes,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bit_depth(&self) -> u8 {
        self.bit_depth
    }

    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }

    pub fn plane(&self, channel: usize) -> &[u16] {
        &self.planes[channel]
    }

    pub fn planes(&self) -> &[Vec<u16>; 3] {
        &self.planes
    }

    pub fn into_planes(self) -> [Vec<u16>; 3] {
        self.planes
    }
}

#[inline]
pub(crate) fn max_sample(bit_depth: u8) -> u16 {
    ((1u32 << bit_depth) - 1) as u16
}

fn check_dims(width: usize, height: usize) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::Param(format!("empty image {width}x{height}")));
    }
    if width > MAX_DIMENSION || height > MAX_DIMENSION {
        return Err(Error::Param(format!(
            "image {width}x{height} exceeds {MAX_DIMENSION} per side"
        )));
    }
    Ok(())
}

/// Per-pixel BT.709 luminance of the decoded linear values.
pub fn luminance(image: &HdrImage) -> Vec<f64> {
    (0..image.pixel_count())
        .map(|i| luma(image.linear(i)))
        .collect()
}

#[inline]
pub(crate) fn luma(rgb: [f64; 3]) -> f64 {
    LUMA_WEIGHTS[0] * rgb[0] + LUMA_WEIGHTS[1] * rgb[1] + LUMA_WEIGHTS[2] * rgb[2]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform(w: usize, h: usize, rgb: [f64; 3]) -> HdrImage {
        let data: Vec<f64> = (0..w * h).flat_map(|_| rgb).collect();
        HdrImage::from_linear(w, h, &data).unwrap()
    }

    #[test]
    fn luminance_examples() {
        assert_eq!(luminance(&uniform(1, 1, [1.0, 1.0, 1.0])), vec![1.0]);
        assert_eq!(luminance(&uniform(1, 1, [1.0, 0.0, 0.0])), vec![0.2126]);
        let oracle: f64 = 0.2126 * 0.25 + 0.7152 * 0.5 + 0.0722 * 0.75;
        assert!((oracle - 0.4649).abs() < 1e-12);
        for l in luminance(&uniform(3, 2, [0.25, 0.5, 0.75])) {
            assert!((l - 0.4649).abs() < 1e-12);
        }
    }

    #[test]
    fn luminance_is_linear_in_scale() {
        let img = uniform(2, 2, [0.125, 2.0, 7.5]);
        let doubled = uniform(2, 2, [0.25, 4.0, 15.0]);
        for (a, b) in luminance(&img).iter().zip(luminance(&doubled)) {
            assert!((2.0 * a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn constructor_checks() {
        assert!(HdrImage::new(2, 1, [vec![0; 2], vec![0; 2], vec![0; 1]]).is_err());
        assert!(HdrImage::new(1, 1, [vec![0x7C00], vec![0], vec![0]]).is_err());
        assert!(HdrImage::new(0, 1, Default::default()).is_err());
        assert!(LdrImage::new(1, 1, 8, [vec![256], vec![0], vec![0]]).is_err());
        assert!(LdrImage::new(1, 1, 12, [vec![4095], vec![0], vec![0]]).is_ok());
        assert!(LdrImage::new(1, 1, 7, [vec![0], vec![0], vec![0]]).is_err());
    }
}
