//! The `H2L1` two-layer file format and the top-level lossless codec.
//!
//! Layout, all integers little-endian:
//!
//! | field            | size              |
//! |------------------|-------------------|
//! | magic `H2L1`     | 4                 |
//! | version (1)      | 1                 |
//! | width, height    | 4 + 4             |
//! | mode, q, R, rR   | 1 + 1 + 1 + 1     |
//! | TMO parameters   | 73                |
//! | base length      | 4, then the JPEG  |
//! | refinement length| 4, then payload   |
//! | residual length  | 4, then payload   |
//! | CRC-32           | 4                 |
//!
//! The CRC covers every preceding byte.

use crate::basejpeg::{
    decode_base, encode_base, merge_refinement, split_refinement, RefinementPlane, REFINE_BITS,
};
use crate::error::{Error, Result, StageExt};
use crate::imagio::{HdrImage, LdrImage};
use crate::rescodec::{
    apply_residual, compute_residual, decode_residual, encode_residual, residual_sizes,
};
use crate::tmo::{predict_hdr, tonemap, TmoKind, TmoParams, PARAMS_LEN};
use serde::{Deserialize, Serialize};

pub const MAGIC: &[u8; 4] = b"H2L1";
pub const VERSION: u8 = 1;
const FIXED_HEADER: usize = 4 + 1 + 8 + 4 + PARAMS_LEN;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Histogram-packed residual, no refinement plane.
    Hp,
    /// Unpacked residual, optional refinement plane.
    Xt,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Hp => "hp",
            Mode::Xt => "xt",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "hp" => Some(Mode::Hp),
            "xt" => Some(Mode::Xt),
            _ => None,
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CodecParams {
    pub mode: Mode,
    pub tmo: TmoParams,
    pub q: u8,
    pub refine_bits: u8,
    /// Residual refinement bits; always 0.
    pub residual_refine_bits: u8,
}

impl CodecParams {
    pub fn new(mode: Mode, kind: TmoKind, q: u8, refine_bits: u8) -> Result<Self> {
        let p = Self {
            mode,
            tmo: TmoParams::new(kind),
            q,
            refine_bits,
            residual_refine_bits: 0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=100).contains(&self.q) {
            return Err(Error::Param(format!("quality {} not in 1..=100", self.q)));
        }
        if !REFINE_BITS.contains(&self.refine_bits) {
            return Err(Error::Param(format!(
                "R must be 0 or 4, got {}",
                self.refine_bits
            )));
        }
        if self.mode == Mode::Hp && self.refine_bits != 0 {
            return Err(Error::Param(
                "HP mode carries no refinement scan (R must be 0)".into(),
            ));
        }
        if self.residual_refine_bits != 0 {
            return Err(Error::Param("residual refinement (rR) must be 0".into()));
        }
        self.tmo.validate()
    }
}

/// Parsed view of an `H2L1` stream.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoLayerStream {
    pub width: usize,
    pub height: usize,
    /// Parameters with the TMO statistics of the encoded image.
    pub params: CodecParams,
    pub base: Vec<u8>,
    pub refinement: Vec<u8>,
    pub residual: Vec<u8>,
}

impl TwoLayerStream {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(
            FIXED_HEADER + 16 + self.base.len() + self.refinement.len() + self.residual.len(),
        );
        out.extend_from_slice(MAGIC);
        out.push(VERSION);
        out.extend_from_slice(&(self.width as u32).to_le_bytes());
        out.extend_from_slice(&(self.height as u32).to_le_bytes());
        out.extend_from_slice(&[
            self.params.mode as u8,
            self.params.q,
            self.params.refine_bits,
            self.params.residual_refine_bits,
        ]);
        out.extend_from_slice(&self.params.tmo.to_bytes());
        for section in [&self.base, &self.refinement, &self.residual] {
            out.extend_from_slice(&(section.len() as u32).to_le_bytes());
            out.extend_from_slice(section);
        }
        let crc = crc32fast::hash(&out);
        out.extend_from_slice(&crc.to_le_bytes());
        out
    }

    pub fn parse(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < FIXED_HEADER + 16 {
            return Err(Error::Format(format!(
                "stream too short ({} bytes)",
                bytes.len()
            )));
        }
        if &bytes[..4] != MAGIC {
            return Err(Error::Format("bad magic".into()));
        }
        if bytes[4] != VERSION {
            return Err(Error::Format(format!("unsupported version {}", bytes[4])));
        }
        let (body, tail) = bytes.split_at(bytes.len() - 4);
        let stored = u32::from_le_bytes([tail[0], tail[1], tail[2], tail[3]]);
        let actual = crc32fast::hash(body);
        if stored != actual {
            return Err(Error::Format(format!(
                "CRC mismatch (stored {stored:08x}, computed {actual:08x})"
            )));
        }

        let u32_at = |p: usize| {
            u32::from_le_bytes([body[p], body[p + 1], body[p + 2], body[p + 3]]) as usize
        };
        let width = u32_at(5);
        let height = u32_at(9);
        let mode = match body[13] {
            0 => Mode::Hp,
            1 => Mode::Xt,
            m => return Err(Error::Format(format!("unknown mode {m}"))),
        };
        let tmo = TmoParams::from_bytes(&body[17..17 + PARAMS_LEN])
            .map_err(|e| Error::Format(format!("TMO parameters: {e}")))?;
        let params = CodecParams {
            mode,
            tmo,
            q: body[14],
            refine_bits: body[15],
            residual_refine_bits: body[16],
        };
        params
            .validate()
            .map_err(|e| Error::Format(e.to_string()))?;
        if width == 0 || height == 0 || width > 65535 || height > 65535 {
            return Err(Error::Format(format!("bad dimensions {width}x{height}")));
        }

        let mut pos = FIXED_HEADER;
        let mut sections: [Vec<u8>; 3] = Default::default();
        for section in sections.iter_mut() {
            if pos + 4 > body.len() {
                return Err(Error::Format("truncated section header".into()));
            }
            let len = u32_at(pos);
            pos += 4;
            let data = body
                .get(pos..pos + len)
                .ok_or_else(|| Error::Format("section overruns stream".into()))?;
            *section = data.to_vec();
            pos += len;
        }
        if pos != body.len() {
            return Err(Error::Format("trailing bytes before CRC".into()));
        }
        let [base, refinement, residual] = sections;
        Ok(Self {
            width,
            height,
            params,
            base,
            refinement,
            residual,
        })
    }
}

/// Encoder output with the intermediate LDR images kept for evaluation.
#[derive(Debug, Clone)]
pub struct Encoded {
    pub bytes: Vec<u8>,
    /// Top 8 bits of the tone-mapped image, as handed to the JPEG encoder.
    pub ldr: LdrImage,
    /// The base layer as any decoder reconstructs it.
    pub decoded_base: LdrImage,
}

pub fn encode(hdr: &HdrImage, params: &CodecParams) -> Result<Vec<u8>> {
    Ok(encode_detailed(hdr, params)?.bytes)
}

pub fn encode_detailed(hdr: &HdrImage, params: &CodecParams) -> Result<Encoded> {
    params.validate()?;
    if hdr.width() > 65535 || hdr.height() > 65535 {
        return Err(Error::Param("image exceeds 65535 pixels per side".into()));
    }
    let mut params = *params;
    params.tmo = params.tmo.with_image_stats(hdr);

    let deep = tonemap(hdr, &params.tmo, params.refine_bits).stage("tone mapping")?;
    let (ldr, plane) = split_refinement(&deep).stage("refinement split")?;
    let base = encode_base(&ldr, params.q).stage("base encode")?;
    let decoded_base = decode_base(&base).stage("base decode")?;
    let merged = merge_refinement(&decoded_base, &plane).stage("refinement merge")?;
    let prediction = predict_hdr(&merged, &params.tmo);
    let raw = compute_residual(hdr, &prediction).stage("residual")?;
    let residual = encode_residual(&raw, hdr.width(), hdr.height(), params.mode == Mode::Hp)
        .stage("residual encode")?;

    let stream = TwoLayerStream {
        width: hdr.width(),
        height: hdr.height(),
        params,
        base,
        refinement: plane.to_bytes(),
        residual,
    };
    Ok(Encoded {
        bytes: stream.to_bytes(),
        ldr,
        decoded_base,
    })
}

pub fn decode(stream: &[u8]) -> Result<HdrImage> {
    let s = TwoLayerStream::parse(stream)?;
    let decoded_base = decode_base(&s.base).stage("base decode")?;
    if decoded_base.width() != s.width || decoded_base.height() != s.height {
        return Err(Error::Integrity(
            "base layer dimensions differ from header".into(),
        ));
    }
    let plane =
        RefinementPlane::from_bytes(&s.refinement, s.params.refine_bits, s.width * s.height)
            .stage("refinement decode")?;
    let merged = merge_refinement(&decoded_base, &plane).stage("refinement merge")?;
    let prediction = predict_hdr(&merged, &s.params.tmo);
    let raw = decode_residual(&s.residual, s.width, s.height).stage("residual decode")?;
    apply_residual(&prediction, &raw).stage("reconstruction")
}

/// The embedded base layer, a standalone baseline JPEG.
pub fn extract_ldr(stream: &[u8]) -> Result<Vec<u8>> {
    Ok(TwoLayerStream::parse(stream)?.base)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SizeReport {
    pub total_bytes: usize,
    pub pixels: usize,
    pub bpp: f64,
    pub base: usize,
    pub refinement: usize,
    pub tables: usize,
    pub residual_payload: usize,
    /// Container header, section lengths, plane headers and CRC.
    pub overhead: usize,
}

pub fn measure(stream: &[u8]) -> Result<SizeReport> {
    let s = TwoLayerStream::parse(stream)?;
    let res = residual_sizes(&s.residual)?;
    let pixels = s.width * s.height;
    let total = stream.len();
    let accounted = s.base.len() + s.refinement.len() + res.tables + res.payload;
    Ok(SizeReport {
        total_bytes: total,
        pixels,
        bpp: bits_per_pixel(total, pixels),
        base: s.base.len(),
        refinement: s.refinement.len(),
        tables: res.tables,
        residual_payload: res.payload,
        overhead: total - accounted,
    })
}

pub fn bits_per_pixel(bytes: usize, pixels: usize) -> f64 {
    (bytes * 8) as f64 / pixels as f64
}
