//! Refinement plane: the low `R` bits of a `8 + R` bit tone-mapped image,
//! carried beside the JPEG base layer and Rice coded per channel.

use crate::bitio::{BitReader, BitWriter};
use crate::error::{Error, Result};
use crate::imagio::LdrImage;
use crate::rice::AdaptiveRice;

/// Refinement bit counts the codec accepts.
pub const REFINE_BITS: [u8; 2] = [0, 4];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefinementPlane {
    bits: u8,
    lsbs: [Vec<u16>; 3],
}

fn check_bits(bits: u8) -> Result<()> {
    if REFINE_BITS.contains(&bits) {
        Ok(())
    } else {
        Err(Error::Param(format!(
            "refinement bits must be 0 or 4, got {bits}"
        )))
    }
}

impl RefinementPlane {
    pub fn empty() -> Self {
        Self {
            bits: 0,
            lsbs: Default::default(),
        }
    }

    pub fn bits(&self) -> u8 {
        self.bits
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn lsbs(&self, channel: usize) -> &[u16] {
        &self.lsbs[channel]
    }

    /// Per channel: payload length (u32 LE) then the Rice payload.
    /// An empty plane serializes to no bytes.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        if self.is_empty() {
            return out;
        }
        for plane in &self.lsbs {
            let mut w = BitWriter::new();
            let mut model = AdaptiveRice::new();
            for &v in plane {
                model.encode(&mut w, v);
            }
            let payload = w.finish();
            out.extend_from_slice(&(payload.len() as u32).to_le_bytes());
            out.extend_from_slice(&payload);
        }
        out
    }

    pub fn from_bytes(bytes: &[u8], bits: u8, pixels: usize) -> Result<Self> {
        check_bits(bits)?;
        if bits == 0 {
            if !bytes.is_empty() {
                return Err(Error::Corrupt(
                    "refinement payload present with R = 0".into(),
                ));
            }
            return Ok(Self::empty());
        }
        let mut pos = 0;
        let mut lsbs: [Vec<u16>; 3] = Default::default();
        let limit = 1u16 << bits;
        for plane in lsbs.iter_mut() {
            let len = bytes
                .get(pos..pos + 4)
                .map(|b| u32::from_le_bytes([b[0], b[1], b[2], b[3]]) as usize)
                .ok_or_else(|| Error::Corrupt("truncated refinement header".into()))?;
            pos += 4;
            let payload = bytes
                .get(pos..pos + len)
                .ok_or_else(|| Error::Corrupt("truncated refinement payload".into()))?;
            pos += len;
            let mut r = BitReader::new(payload);
            let mut model = AdaptiveRice::new();
            plane.reserve(pixels);
            for _ in 0..pixels {
                let v = model.decode(&mut r)?;
                if v >= limit {
                    return Err(Error::Corrupt(format!(
                        "refinement value {v} exceeds {bits} bits"
                    )));
                }
                plane.push(v);
            }
        }
        if pos != bytes.len() {
            return Err(Error::Corrupt("trailing refinement bytes".into()));
        }
        Ok(Self { bits, lsbs })
    }
}

/// Splits a `8 + R` bit image into its top 8 bits and the `R` low bits.
pub fn split_refinement(image: &LdrImage) -> Result<(LdrImage, RefinementPlane)> {
    let bits = image.bit_depth() - 8;
    check_bits(bits)?;
    if bits == 0 {
        return Ok((image.clone(), RefinementPlane::empty()));
    }
    let mask = (1u16 << bits) - 1;
    let top = image
        .planes()
        .clone()
        .map(|p| p.iter().map(|&s| s >> bits).collect());
    let lsbs = image
        .planes()
        .clone()
        .map(|p| p.iter().map(|&s| s & mask).collect());
    Ok((
        LdrImage::from_u8_planes(image.width(), image.height(), top),
        RefinementPlane { bits, lsbs },
    ))
}

/// `(base << R) | lsbs`; identity when the plane is empty.
pub fn merge_refinement(base: &LdrImage, plane: &RefinementPlane) -> Result<LdrImage> {
    if base.bit_depth() != 8 {
        return Err(Error::Param("refinement merges onto an 8-bit base".into()));
    }
    if plane.is_empty() {
        return Ok(base.clone());
    }
    if plane.lsbs.iter().any(|p| p.len() != base.pixel_count()) {
        return Err(Error::Integrity(
            "refinement plane size differs from base".into(),
        ));
    }
    let bits = plane.bits;
    let mut planes: [Vec<u16>; 3] = Default::default();
    for c in 0..3 {
        planes[c] = base
            .plane(c)
            .iter()
            .zip(&plane.lsbs[c])
            .map(|(&b, &l)| b << bits | l)
            .collect();
    }
    LdrImage::new(base.width(), base.height(), 8 + bits, planes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn bit_split_example() {
        let img = LdrImage::new(1, 1, 12, [vec![0x0FF3], vec![0], vec![0x0FFF]]).unwrap();
        let (top, plane) = split_refinement(&img).unwrap();
        assert_eq!(top.plane(0), &[0xFF]);
        assert_eq!(plane.lsbs(0), &[0x3]);
        assert_eq!(merge_refinement(&top, &plane).unwrap(), img);
    }

    #[test]
    fn zero_bits_is_identity() {
        let img = LdrImage::new(2, 1, 8, [vec![1, 2], vec![3, 4], vec![5, 6]]).unwrap();
        let (top, plane) = split_refinement(&img).unwrap();
        assert!(plane.is_empty());
        assert!(plane.to_bytes().is_empty());
        assert_eq!(top, img);
        assert_eq!(merge_refinement(&top, &plane).unwrap(), img);
    }

    #[test]
    fn rejects_unsupported_depths() {
        let img = LdrImage::new(1, 1, 10, [vec![0], vec![0], vec![0]]).unwrap();
        assert!(matches!(split_refinement(&img), Err(Error::Param(_))));
        assert!(RefinementPlane::from_bytes(&[], 2, 1).is_err());
    }

    proptest! {
        #[test]
        fn split_merge_and_serialization(samples in proptest::collection::vec(0u16..4096, 16 * 16 * 3)) {
            let planes = [samples[..256].to_vec(), samples[256..512].to_vec(), samples[512..].to_vec()];
            let img = LdrImage::new(16, 16, 12, planes).unwrap();
            let (top, plane) = split_refinement(&img).unwrap();
            prop_assert_eq!(&merge_refinement(&top, &plane).unwrap(), &img);
            let parsed = RefinementPlane::from_bytes(&plane.to_bytes(), 4, 256).unwrap();
            prop_assert_eq!(parsed, plane);
        }
    }
}
