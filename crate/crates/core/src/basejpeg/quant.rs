use crate::error::{Error, Result};

/// Natural (row-major) index of the k-th coefficient in zig-zag order.
pub const ZIGZAG: [usize; 64] = [
    0, 1, 8, 16, 9, 2, 3, 10, 17, 24, 32, 25, 18, 11, 4, 5, 12, 19, 26, 33, 40, 48, 41, 34, 27, 20,
    13, 6, 7, 14, 21, 28, 35, 42, 49, 56, 57, 50, 43, 36, 29, 22, 15, 23, 30, 37, 44, 51, 58, 59,
    52, 45, 38, 31, 39, 46, 53, 60, 61, 54, 47, 55, 62, 63,
];

/// Annex K luminance table, natural order.
pub const BASE_LUMA: [u16; 64] = [
    16, 11, 10, 16, 24, 40, 51, 61, //
    12, 12, 14, 19, 26, 58, 60, 55, //
    14, 13, 16, 24, 40, 57, 69, 56, //
    14, 17, 22, 29, 51, 87, 80, 62, //
    18, 22, 37, 56, 68, 109, 103, 77, //
    24, 35, 55, 64, 81, 104, 113, 92, //
    49, 64, 78, 87, 103, 121, 120, 101, //
    72, 92, 95, 98, 112, 100, 103, 99,
];

/// Annex K chrominance table, natural order.
pub const BASE_CHROMA: [u16; 64] = [
    17, 18, 24, 47, 99, 99, 99, 99, //
    18, 21, 26, 66, 99, 99, 99, 99, //
    24, 26, 56, 99, 99, 99, 99, 99, //
    47, 66, 99, 99, 99, 99, 99, 99, //
    99, 99, 99, 99, 99, 99, 99, 99, //
    99, 99, 99, 99, 99, 99, 99, 99, //
    99, 99, 99, 99, 99, 99, 99, 99, //
    99, 99, 99, 99, 99, 99, 99, 99,
];

/// Quantization tables in zig-zag order, as written to DQT.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuantTables {
    pub luma: [u16; 64],
    pub chroma: [u16; 64],
}

impl QuantTables {
    /// Table for component `c` (0 = Y) in natural order.
    pub fn natural(&self, component: usize) -> [u16; 64] {
        let zz = if component == 0 {
            &self.luma
        } else {
            &self.chroma
        };
        let mut out = [0u16; 64];
        for (k, &v) in zz.iter().enumerate() {
            out[ZIGZAG[k]] = v;
        }
        out
    }
}

pub fn to_zigzag(natural: &[u16; 64]) -> [u16; 64] {
    ZIGZAG.map(|i| natural[i])
}

/// IJG quality scaling of the Annex K tables.
pub fn quality_to_tables(q: u8) -> Result<QuantTables> {
    if !(1..=100).contains(&q) {
        return Err(Error::Param(format!("quality {q} not in 1..=100")));
    }
    let q = q as u32;
    let scale = if q < 50 { 5000 / q } else { 200 - 2 * q };
    let scaled = |t: u16| ((t as u32 * scale + 50) / 100).clamp(1, 255) as u16;
    Ok(QuantTables {
        luma: to_zigzag(&BASE_LUMA.map(scaled)),
        chroma: to_zigzag(&BASE_CHROMA.map(scaled)),
    })
}
