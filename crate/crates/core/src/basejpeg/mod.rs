//! JPEG-compatible base layer and the refinement plane.
//!
//! The base layer is a baseline sequential JFIF stream: full-range BT.601
//! YCbCr, 4:4:4, orthonormal 8x8 DCT, IJG-scaled Annex K quantization and
//! the Annex K Huffman tables. Any baseline decoder can display it; the
//! in-crate decoder reproduces the encoder's reconstruction exactly, which
//! is what the HDR prediction is computed from.

mod dct;
mod decoder;
mod encoder;
mod huffman;
mod quant;
mod refine;

pub use self::dct::{fdct, idct};
pub use self::decoder::{read_jpeg, reconstruct};
pub use self::encoder::{forward, write_jpeg};
pub use self::quant::{quality_to_tables, QuantTables, BASE_CHROMA, BASE_LUMA, ZIGZAG};
pub use self::refine::{merge_refinement, split_refinement, RefinementPlane, REFINE_BITS};

use crate::error::Result;
use crate::imagio::LdrImage;

/// Quantized DCT coefficients of a three-component image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coefficients {
    pub width: usize,
    pub height: usize,
    pub tables: QuantTables,
    /// Per component, blocks in raster order, coefficients in natural order.
    pub blocks: [Vec<[i16; 64]>; 3],
}

pub fn encode_base(image: &LdrImage, q: u8) -> Result<Vec<u8>> {
    Ok(write_jpeg(&forward(image, q)?))
}

pub fn decode_base(stream: &[u8]) -> Result<LdrImage> {
    Ok(reconstruct(&read_jpeg(stream)?))
}
