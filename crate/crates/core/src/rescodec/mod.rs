//! Residual layer: modular subtraction of the prediction, reversible colour
//! transform, optional histogram packing and lossless plane coding.
//!
//! Each plane is stored as `K` (u32 LE, 0 when unpacked), payload length
//! (u32 LE), the serialized pack table when `K > 0`, and the Rice payload.
//! The three planes follow each other in Y, Cb, Cr order.

mod plane;
mod rct;

pub use self::plane::{code_plane, decode_plane, fold, med, unfold};
pub use self::rct::{color_transform_fwd, color_transform_inv, forward_pixel, inverse_pixel};

use crate::error::{Error, Result, StageExt};
use crate::hpack::{build_table, pack, parse_table_prefix, serialize_table, unpack, PackTable};
use crate::imagio::HdrImage;

/// Moves zero to the middle of the code range so small negative residuals
/// sit next to small positive ones, for the predictor and for pack order.
const SIGN_FLIP: u16 = 0x8000;

/// `(hdr - prediction) mod 2^16` per sample.
pub fn compute_residual(hdr: &HdrImage, prediction: &HdrImage) -> Result<[Vec<u16>; 3]> {
    if hdr.width() != prediction.width() || hdr.height() != prediction.height() {
        return Err(Error::Param(format!(
            "residual of {}x{} image against {}x{} prediction",
            hdr.width(),
            hdr.height(),
            prediction.width(),
            prediction.height()
        )));
    }
    Ok([0, 1, 2].map(|c| {
        hdr.plane(c)
            .iter()
            .zip(prediction.plane(c))
            .map(|(&h, &p)| h.wrapping_sub(p))
            .collect()
    }))
}

/// `(prediction + residual) mod 2^16`; fails if a sample leaves the valid
/// half-float domain, which only happens for a mismatched prediction.
pub fn apply_residual(prediction: &HdrImage, residual: &[Vec<u16>; 3]) -> Result<HdrImage> {
    if residual.iter().any(|p| p.len() != prediction.pixel_count()) {
        return Err(Error::Param("residual size differs from prediction".into()));
    }
    let planes = [0, 1, 2].map(|c| {
        prediction
            .plane(c)
            .iter()
            .zip(&residual[c])
            .map(|(&p, &r)| p.wrapping_add(r))
            .collect()
    });
    HdrImage::new(prediction.width(), prediction.height(), planes)
        .map_err(|e| Error::Integrity(format!("reconstructed image invalid: {e}")))
}

/// Colour-transformed residual planes ready for entropy coding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidualPlanes {
    pub width: usize,
    pub height: usize,
    /// Transformed planes; packed indices where a table is present.
    pub planes: [Vec<u16>; 3],
    pub tables: [Option<PackTable>; 3],
}

impl ResidualPlanes {
    pub fn from_raw(
        raw: &[Vec<u16>; 3],
        width: usize,
        height: usize,
        use_packing: bool,
    ) -> Result<Self> {
        if raw.iter().any(|p| p.len() != width * height) {
            return Err(Error::Param("residual plane size mismatch".into()));
        }
        let mut planes = color_transform_fwd(raw);
        for p in planes.iter_mut() {
            p.iter_mut().for_each(|v| *v ^= SIGN_FLIP);
        }
        let mut tables: [Option<PackTable>; 3] = Default::default();
        if use_packing {
            for c in 0..3 {
                let table = build_table(&planes[c])?;
                planes[c] = pack(&planes[c], &table)?;
                tables[c] = Some(table);
            }
        }
        Ok(Self {
            width,
            height,
            planes,
            tables,
        })
    }

    pub fn is_packed(&self) -> bool {
        self.tables.iter().any(Option::is_some)
    }

    pub fn into_raw(self) -> Result<[Vec<u16>; 3]> {
        let mut planes = self.planes;
        for (plane, table) in planes.iter_mut().zip(&self.tables) {
            if let Some(t) = table {
                *plane = unpack(plane, t)?;
            }
            plane.iter_mut().for_each(|v| *v ^= SIGN_FLIP);
        }
        Ok(color_transform_inv(&planes))
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        for (plane, table) in self.planes.iter().zip(&self.tables) {
            let payload = code_plane(plane, self.width);
            let k = table.as_ref().map_or(0, |t| t.len() as u32);
            out.extend_from_slice(&k.to_le_bytes());
            out.extend_from_slice(&(payload.len() as u32).to_le_bytes());
            if let Some(t) = table {
                out.extend_from_slice(&serialize_table(t));
            }
            out.extend_from_slice(&payload);
        }
        out
    }

    pub fn from_bytes(bytes: &[u8], width: usize, height: usize) -> Result<Self> {
        let mut pos = 0;
        let mut planes: [Vec<u16>; 3] = Default::default();
        let mut tables: [Option<PackTable>; 3] = Default::default();
        for c in 0..3 {
            let (k, len) = plane_header(bytes, pos)?;
            pos += 8;
            if k > 0 {
                let (table, used) = parse_table_prefix(&bytes[pos..])
                    .map_err(|e| Error::Corrupt(format!("plane {c} table: {e}")))?;
                if table.len() != k {
                    return Err(Error::Corrupt(format!(
                        "plane {c} header says K = {k}, table holds {}",
                        table.len()
                    )));
                }
                tables[c] = Some(table);
                pos += used;
            }
            let payload = bytes
                .get(pos..pos + len)
                .ok_or_else(|| Error::Corrupt(format!("plane {c} payload truncated")))?;
            pos += len;
            planes[c] = decode_plane(payload, width, height)?;
            if k > 0 && planes[c].iter().any(|&v| v as usize >= k) {
                return Err(Error::Corrupt(format!(
                    "plane {c} has indices outside [0, {k})"
                )));
            }
        }
        if pos != bytes.len() {
            return Err(Error::Corrupt(
                "trailing bytes after residual planes".into(),
            ));
        }
        Ok(Self {
            width,
            height,
            planes,
            tables,
        })
    }
}

fn plane_header(bytes: &[u8], pos: usize) -> Result<(usize, usize)> {
    let h = bytes
        .get(pos..pos + 8)
        .ok_or_else(|| Error::Corrupt("truncated plane header".into()))?;
    let k = u32::from_le_bytes([h[0], h[1], h[2], h[3]]) as usize;
    let len = u32::from_le_bytes([h[4], h[5], h[6], h[7]]) as usize;
    if k > 1 << 16 {
        return Err(Error::Corrupt(format!("plane header K = {k}")));
    }
    Ok((k, len))
}

pub fn encode_residual(
    raw: &[Vec<u16>; 3],
    width: usize,
    height: usize,
    use_packing: bool,
) -> Result<Vec<u8>> {
    let planes =
        ResidualPlanes::from_raw(raw, width, height, use_packing).stage("residual transform")?;
    Ok(planes.to_bytes())
}

pub fn decode_residual(bytes: &[u8], width: usize, height: usize) -> Result<[Vec<u16>; 3]> {
    ResidualPlanes::from_bytes(bytes, width, height)
        .stage("residual planes")?
        .into_raw()
        .stage("residual transform")
}

/// Byte accounting of a residual block.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ResidualSizes {
    pub headers: usize,
    pub tables: usize,
    pub payload: usize,
}

pub fn residual_sizes(bytes: &[u8]) -> Result<ResidualSizes> {
    let mut sizes = ResidualSizes::default();
    let mut pos = 0;
    for _ in 0..3 {
        let (k, len) = plane_header(bytes, pos)?;
        pos += 8;
        sizes.headers += 8;
        if k > 0 {
            let (_, used) = parse_table_prefix(&bytes[pos..])?;
            sizes.tables += used;
            pos += used;
        }
        sizes.payload += len;
        pos += len;
    }
    if pos != bytes.len() {
        return Err(Error::Corrupt("residual block size mismatch".into()));
    }
    Ok(sizes)
}
