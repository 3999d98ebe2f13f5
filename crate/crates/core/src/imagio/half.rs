//! Binary16 code conversion for the non-negative finite half-float domain.

use half::f16;

use crate::error::{Error, Result};

/// Largest finite binary16 value, 65504.
pub const HALF_MAX_CODE: u16 = 0x7BFF;

/// Number of non-negative finite binary16 codes (0x0000..=0x7BFF).
pub const VALID_CODE_COUNT: usize = 0x7C00;

/// Encodes a non-negative finite value as the nearest binary16 code
/// (round to nearest, ties to even). Values above 65504 saturate.
pub fn half_encode(value: f64) -> Result<u16> {
    if !value.is_finite() || value < 0.0 {
        return Err(Error::Domain(format!(
            "half_encode expects a finite non-negative value, got {value}"
        )));
    }
    if value == 0.0 {
        // also catches -0.0, which would otherwise keep its sign bit
        return Ok(0);
    }
    let h = f16::from_f64(value);
    if h.is_infinite() {
        Ok(HALF_MAX_CODE)
    } else {
        Ok(h.to_bits())
    }
}

pub fn half_decode(code: u16) -> Result<f64> {
    if !is_valid_code(code) {
        return Err(Error::Domain(format!(
            "0x{code:04X} is not a non-negative finite half code"
        )));
    }
    Ok(decode_unchecked(code))
}

#[inline]
pub fn is_valid_code(code: u16) -> bool {
    (code as usize) < VALID_CODE_COUNT
}

/// Decodes without the domain check. Invalid codes still produce a value
/// (negative, infinite or NaN); callers must hold a validated code.
#[inline]
pub(crate) fn decode_unchecked(code: u16) -> f64 {
    f16::from_bits(code).to_f64()
}

/// Ingestion normalization: negatives clamp to zero, +inf saturates,
/// NaN is rejected.
pub fn normalize_sample(value: f64) -> Result<u16> {
    if value.is_nan() {
        return Err(Error::Domain("NaN sample".into()));
    }
    if value == f64::INFINITY {
        return Ok(HALF_MAX_CODE);
    }
    half_encode(value.max(0.0))
}
