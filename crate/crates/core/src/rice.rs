//! Adaptive Golomb-Rice coding of 16-bit unsigned symbols.
//!
//! `k` is the smallest value with `N * 2^k >= A`, where `A` accumulates
//! symbol magnitudes and `N` counts symbols; both start at (4, 1) and are
//! halved when `N` reaches 64. A symbol is written as its quotient in unary
//! (ones, zero terminated) followed by `k` low bits. Quotients of 24 or more
//! escape: 24 ones followed by the raw 16-bit symbol.

use crate::bitio::{BitReader, BitWriter};
use crate::error::{Error, Result};

pub const ESCAPE_QUOTIENT: u32 = 24;
const RESET: u32 = 64;
const MAX_K: u32 = 16;

#[derive(Debug, Clone, Copy)]
pub struct AdaptiveRice {
    a: u32,
    n: u32,
}

impl Default for AdaptiveRice {
    fn default() -> Self {
        Self::new()
    }
}

impl AdaptiveRice {
    pub fn new() -> Self {
        Self { a: 4, n: 1 }
    }

    pub fn k(&self) -> u32 {
        let mut k = 0;
        while k < MAX_K && (self.n << k) < self.a {
            k += 1;
        }
        k
    }

    fn update(&mut self, u: u16) {
        self.a += u as u32;
        self.n += 1;
        if self.n == RESET {
            self.a >>= 1;
            self.n >>= 1;
        }
    }

    pub fn encode(&mut self, w: &mut BitWriter, u: u16) {
        let k = self.k();
        let q = (u as u32) >> k;
        if q >= ESCAPE_QUOTIENT {
            w.put_ones(ESCAPE_QUOTIENT);
            w.put(16, u as u32);
        } else {
            w.put_ones(q);
            w.put(1, 0);
            w.put(k, u as u32);
        }
        self.update(u);
    }

    pub fn decode(&mut self, r: &mut BitReader) -> Result<u16> {
        let k = self.k();
        let q = r.unary_ones(ESCAPE_QUOTIENT)?;
        let u = if q == ESCAPE_QUOTIENT {
            r.bits(16)?
        } else {
            let v = (q << k) | r.bits(k)?;
            if v > u16::MAX as u32 {
                return Err(Error::Corrupt(format!("Rice symbol {v} overflows 16 bits")));
            }
            v
        };
        let u = u as u16;
        self.update(u);
        Ok(u)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_symbols_shrink_k() {
        let mut m = AdaptiveRice::new();
        assert_eq!(m.k(), 2);
        let mut w = BitWriter::new();
        let mut ks = Vec::new();
        for _ in 0..64 {
            ks.push(m.k());
            m.encode(&mut w, 0);
        }
        assert_eq!(&ks[..4], &[2, 1, 1, 0]);
        // one terminator bit per symbol plus k bits
        let expected: u32 = ks.iter().map(|k| 1 + k).sum();
        assert_eq!(w.bit_len(), expected as usize);
    }

    #[test]
    fn escape_and_extremes_round_trip() {
        let symbols = [0u16, 65535, 1, 40000, 0, 0, 3, 65534, 7, 255, 256, 0];
        let mut m = AdaptiveRice::new();
        let mut w = BitWriter::new();
        for &s in &symbols {
            m.encode(&mut w, s);
        }
        let bytes = w.finish();
        let mut m = AdaptiveRice::new();
        let mut r = BitReader::new(&bytes);
        for &s in &symbols {
            assert_eq!(m.decode(&mut r).unwrap(), s);
        }
    }

    #[test]
    fn overflowing_symbol_is_rejected() {
        // k = 16 state, quotient 1 would decode to >= 65536
        let mut m = AdaptiveRice { a: 1 << 20, n: 1 };
        assert_eq!(m.k(), 16);
        let mut w = BitWriter::new();
        w.put(2, 0b10);
        w.put(16, 0);
        let bytes = w.finish();
        assert!(matches!(
            m.decode(&mut BitReader::new(&bytes)),
            Err(Error::Corrupt(_))
        ));
    }
}
