//! MSB-first bit writer and reader for the residual and refinement payloads.

use crate::error::{Error, Result};

#[derive(Debug, Default)]
pub struct BitWriter {
    out: Vec<u8>,
    acc: u64,
    nbits: u32,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends the low `n` bits of `value`, `n <= 32`.
    pub fn put(&mut self, n: u32, value: u32) {
        debug_assert!(n <= 32);
        if n == 0 {
            return;
        }
        self.acc = (self.acc << n) | (value as u64 & ((1u64 << n) - 1));
        self.nbits += n;
        while self.nbits >= 8 {
            self.nbits -= 8;
            self.out.push((self.acc >> self.nbits) as u8);
        }
        self.acc &= (1u64 << self.nbits) - 1;
    }

    pub fn put_ones(&mut self, mut n: u32) {
        while n > 0 {
            let k = n.min(32);
            self.put(k, u32::MAX);
            n -= k;
        }
    }

    pub fn bit_len(&self) -> usize {
        self.out.len() * 8 + self.nbits as usize
    }

    /// Flushes with zero padding to a byte boundary.
    pub fn finish(mut self) -> Vec<u8> {
        if self.nbits > 0 {
            self.out.push((self.acc << (8 - self.nbits)) as u8);
        }
        self.out
    }
}

#[derive(Debug)]
pub struct BitReader<'a> {
    data: &'a [u8],
    pos: usize,
    bit: u32,
}

impl<'a> BitReader<'a> {
    pub fn new(data: &'a [u8]) -> Self {
        Self {
            data,
            pos: 0,
            bit: 0,
        }
    }

    pub fn bit(&mut self) -> Result<u32> {
        let byte = *self
            .data
            .get(self.pos)
            .ok_or_else(|| Error::Corrupt("bitstream truncated".into()))?;
        let v = (byte >> (7 - self.bit)) & 1;
        self.bit += 1;
        if self.bit == 8 {
            self.bit = 0;
            self.pos += 1;
        }
        Ok(v as u32)
    }

    pub fn bits(&mut self, n: u32) -> Result<u32> {
        let mut v = 0;
        for _ in 0..n {
            v = (v << 1) | self.bit()?;
        }
        Ok(v)
    }

    /// Whole bytes touched so far, counting a partially read byte.
    pub fn bytes_consumed(&self) -> usize {
        self.pos + usize::from(self.bit > 0)
    }

    /// Counts one bits up to a terminating zero or `limit` ones.
    pub fn unary_ones(&mut self, limit: u32) -> Result<u32> {
        let mut q = 0;
        while q < limit {
            if self.bit()? == 0 {
                return Ok(q);
            }
            q += 1;
        }
        Ok(q)
    }
}
