//! Annex K standard Huffman tables and the byte-stuffed entropy bit I/O.

use crate::error::{Error, Result};

pub struct TableSpec {
    pub bits: [u8; 16],
    pub vals: &'static [u8],
}

pub const DC_LUMA: TableSpec = TableSpec {
    bits: [0, 1, 5, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0],
    vals: &[0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11],
};

pub const DC_CHROMA: TableSpec = TableSpec {
    bits: [0, 3, 1, 1, 1, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0],
    vals: &[0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11],
};

pub const AC_LUMA: TableSpec = TableSpec {
    bits: [0, 2, 1, 3, 3, 2, 4, 3, 5, 5, 4, 4, 0, 0, 1, 0x7d],
    vals: &[
        0x01, 0x02, 0x03, 0x00, 0x04, 0x11, 0x05, 0x12, 0x21, 0x31, 0x41, 0x06, 0x13, 0x51, 0x61,
        0x07, 0x22, 0x71, 0x14, 0x32, 0x81, 0x91, 0xA1, 0x08, 0x23, 0x42, 0xB1, 0xC1, 0x15, 0x52,
        0xD1, 0xF0, 0x24, 0x33, 0x62, 0x72, 0x82, 0x09, 0x0A, 0x16, 0x17, 0x18, 0x19, 0x1A, 0x25,
        0x26, 0x27, 0x28, 0x29, 0x2A, 0x34, 0x35, 0x36, 0x37, 0x38, 0x39, 0x3A, 0x43, 0x44, 0x45,
        0x46, 0x47, 0x48, 0x49, 0x4A, 0x53, 0x54, 0x55, 0x56, 0x57, 0x58, 0x59, 0x5A, 0x63, 0x64,
        0x65, 0x66, 0x67, 0x68, 0x69, 0x6A, 0x73, 0x74, 0x75, 0x76, 0x77, 0x78, 0x79, 0x7A, 0x83,
        0x84, 0x85, 0x86, 0x87, 0x88, 0x89, 0x8A, 0x92, 0x93, 0x94, 0x95, 0x96, 0x97, 0x98, 0x99,
        0x9A, 0xA2, 0xA3, 0xA4, 0xA5, 0xA6, 0xA7, 0xA8, 0xA9, 0xAA, 0xB2, 0xB3, 0xB4, 0xB5, 0xB6,
        0xB7, 0xB8, 0xB9, 0xBA, 0xC2, 0xC3, 0xC4, 0xC5, 0xC6, 0xC7, 0xC8, 0xC9, 0xCA, 0xD2, 0xD3,
        0xD4, 0xD5, 0xD6, 0xD7, 0xD8, 0xD9, 0xDA, 0xE1, 0xE2, 0xE3, 0xE4, 0xE5, 0xE6, 0xE7, 0xE8,
        0xE9, 0xEA, 0xF1, 0xF2, 0xF3, 0xF4, 0xF5, 0xF6, 0xF7, 0xF8, 0xF9, 0xFA,
    ],
};

pub const AC_CHROMA: TableSpec = TableSpec {
    bits: [0, 2, 1, 2, 4, 4, 3, 4, 7, 5, 4, 4, 0, 1, 2, 0x77],
    vals: &[
        0x00, 0x01, 0x02, 0x03, 0x11, 0x04, 0x05, 0x21, 0x31, 0x06, 0x12, 0x41, 0x51, 0x07, 0x61,
        0x71, 0x13, 0x22, 0x32, 0x81, 0x08, 0x14, 0x42, 0x91, 0xA1, 0xB1, 0xC1, 0x09, 0x23, 0x33,
        0x52, 0xF0, 0x15, 0x62, 0x72, 0xD1, 0x0A, 0x16, 0x24, 0x34, 0xE1, 0x25, 0xF1, 0x17, 0x18,
        0x19, 0x1A, 0x26, 0x27, 0x28, 0x29, 0x2A, 0x35, 0x36, 0x37, 0x38, 0x39, 0x3A, 0x43, 0x44,
        0x45, 0x46, 0x47, 0x48, 0x49, 0x4A, 0x53, 0x54, 0x55, 0x56, 0x57, 0x58, 0x59, 0x5A, 0x63,
        0x64, 0x65, 0x66, 0x67, 0x68, 0x69, 0x6A, 0x73, 0x74, 0x75, 0x76, 0x77, 0x78, 0x79, 0x7A,
        0x82, 0x83, 0x84, 0x85, 0x86, 0x87, 0x88, 0x89, 0x8A, 0x92, 0x93, 0x94, 0x95, 0x96, 0x97,
        0x98, 0x99, 0x9A, 0xA2, 0xA3, 0xA4, 0xA5, 0xA6, 0xA7, 0xA8, 0xA9, 0xAA, 0xB2, 0xB3, 0xB4,
        0xB5, 0xB6, 0xB7, 0xB8, 0xB9, 0xBA, 0xC2, 0xC3, 0xC4, 0xC5, 0xC6, 0xC7, 0xC8, 0xC9, 0xCA,
        0xD2, 0xD3, 0xD4, 0xD5, 0xD6, 0xD7, 0xD8, 0xD9, 0xDA, 0xE2, 0xE3, 0xE4, 0xE5, 0xE6, 0xE7,
        0xE8, 0xE9, 0xEA, 0xF2, 0xF3, 0xF4, 0xF5, 0xF6, 0xF7, 0xF8, 0xF9, 0xFA,
    ],
};

/// Canonical code assignment: `(symbol, length, code)` in table order.
fn canonical(bits: &[u8; 16], vals: &[u8]) -> Vec<(u8, u8, u16)> {
    let mut out = Vec::with_capacity(vals.len());
    let mut code = 0u16;
    let mut k = 0;
    for (len_idx, &count) in bits.iter().enumerate() {
        for _ in 0..count {
            out.push((vals[k], len_idx as u8 + 1, code));
            code += 1;
            k += 1;
        }
        code <<= 1;
    }
    out
}

pub struct EncodeTable {
    /// `(length, code)` per symbol; length 0 marks an absent symbol.
    codes: [(u8, u16); 256],
}

impl EncodeTable {
    pub fn new(spec: &TableSpec) -> Self {
        let mut codes = [(0u8, 0u16); 256];
        for (sym, len, code) in canonical(&spec.bits, spec.vals) {
            codes[sym as usize] = (len, code);
        }
        Self { codes }
    }

    pub fn get(&self, symbol: u8) -> (u8, u16) {
        self.codes[symbol as usize]
    }
}

#[derive(Debug, Clone)]
pub struct DecodeTable {
    /// Largest code of each length, or -1 when none.
    max_code: [i32; 17],
    /// Index into `vals` of the first code of each length, minus that code.
    offset: [i32; 17],
    vals: Vec<u8>,
}

impl DecodeTable {
    pub fn new(bits: &[u8; 16], vals: &[u8]) -> Result<Self> {
        let total: usize = bits.iter().map(|&b| b as usize).sum();
        if total != vals.len() || total > 256 {
            return Err(Error::Corrupt("Huffman table size mismatch".into()));
        }
        let mut max_code = [-1i32; 17];
        let mut offset = [0i32; 17];
        let mut code = 0i32;
        let mut k = 0i32;
        for len in 1..=16 {
            let count = bits[len - 1] as i32;
            if count > 0 {
                offset[len] = k - code;
                code += count;
                k += count;
                max_code[len] = code - 1;
                if code > (1 << len) {
                    return Err(Error::Corrupt("over-subscribed Huffman table".into()));
                }
            }
            code <<= 1;
        }
        Ok(Self {
            max_code,
            offset,
            vals: vals.to_vec(),
        })
    }

    pub fn decode(&self, reader: &mut EntropyReader) -> Result<u8> {
        let mut code = 0i32;
        for len in 1..=16 {
            code = (code << 1) | reader.bit()? as i32;
            if code <= self.max_code[len] {
                return Ok(self.vals[(self.offset[len] + code) as usize]);
            }
        }
        Err(Error::parse(reader.position(), "invalid Huffman code"))
    }
}

/// MSB-first writer that stuffs a zero after every 0xFF byte.
pub struct EntropyWriter<'a> {
    out: &'a mut Vec<u8>,
    acc: u32,
    nbits: u32,
}

impl<'a> EntropyWriter<'a> {
    pub fn new(out: &'a mut Vec<u8>) -> Self {
        Self {
            out,
            acc: 0,
            nbits: 0,
        }
    }

    pub fn put(&mut self, len: u8, bits: u16) {
        debug_assert!(len <= 16);
        if len == 0 {
            return;
        }
        self.acc = (self.acc << len) | (bits as u32 & ((1 << len) - 1));
        self.nbits += len as u32;
        while self.nbits >= 8 {
            let byte = (self.acc >> (self.nbits - 8)) as u8;
            self.out.push(byte);
            if byte == 0xFF {
                self.out.push(0);
            }
            self.nbits -= 8;
        }
        self.acc &= (1 << self.nbits) - 1;
    }

    /// Pads the final byte with one bits.
    pub fn finish(mut self) {
        if self.nbits > 0 {
            let pad = 8 - self.nbits as u8;
            self.put(pad, (1 << pad) - 1);
        }
    }
}

/// Reader over entropy-coded bytes; stops at the first marker.
pub struct EntropyReader<'a> {
    data: &'a [u8],
    pos: usize,
    acc: u32,
    nbits: u32,
    /// Base offset of `data` inside the whole stream, for error messages.
    base: usize,
}

impl<'a> EntropyReader<'a> {
    pub fn new(data: &'a [u8], base: usize) -> Self {
        Self {
            data,
            pos: 0,
            acc: 0,
            nbits: 0,
            base,
        }
    }

    pub fn position(&self) -> usize {
        self.base + self.pos
    }

    /// Bytes consumed so far, including stuffing.
    pub fn consumed(&self) -> usize {
        self.pos
    }

    fn fill(&mut self) -> Result<()> {
        let byte = *self
            .data
            .get(self.pos)
            .ok_or_else(|| Error::parse(self.position(), "entropy data underrun"))?;
        if byte == 0xFF {
            match self.data.get(self.pos + 1) {
                Some(0) => self.pos += 2,
                _ => return Err(Error::parse(self.position(), "marker inside entropy data")),
            }
        } else {
            self.pos += 1;
        }
        self.acc = (self.acc << 8) | byte as u32;
        self.nbits += 8;
        Ok(())
    }

    pub fn bit(&mut self) -> Result<u32> {
        if self.nbits == 0 {
            self.fill()?;
        }
        self.nbits -= 1;
        Ok((self.acc >> self.nbits) & 1)
    }

    pub fn bits(&mut self, n: u8) -> Result<u32> {
        let mut v = 0;
        for _ in 0..n {
            v = (v << 1) | self.bit()?;
        }
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_sizes() {
        for spec in [&DC_LUMA, &DC_CHROMA, &AC_LUMA, &AC_CHROMA] {
            let n: usize = spec.bits.iter().map(|&b| b as usize).sum();
            assert_eq!(n, spec.vals.len());
        }
        assert_eq!(AC_LUMA.vals.len(), 162);
    }

    #[test]
    fn canonical_codes_are_prefix_free() {
        for spec in [&DC_LUMA, &DC_CHROMA, &AC_LUMA, &AC_CHROMA] {
            let codes = canonical(&spec.bits, spec.vals);
            for (i, a) in codes.iter().enumerate() {
                for b in &codes[i + 1..] {
                    let (short, long) = if a.1 <= b.1 { (a, b) } else { (b, a) };
                    assert_ne!(long.2 >> (long.1 - short.1), short.2);
                }
            }
        }
    }

    #[test]
    fn encode_decode_symbols() {
        let enc = EncodeTable::new(&AC_LUMA);
        let dec = DecodeTable::new(&AC_LUMA.bits, AC_LUMA.vals).unwrap();
        let mut out = Vec::new();
        let mut w = EntropyWriter::new(&mut out);
        for &s in AC_LUMA.vals {
            let (len, code) = enc.get(s);
            w.put(len, code);
        }
        w.finish();
        let mut r = EntropyReader::new(&out, 0);
        for &s in AC_LUMA.vals {
            assert_eq!(dec.decode(&mut r).unwrap(), s);
        }
    }

    #[test]
    fn stuffing() {
        let mut out = Vec::new();
        let mut w = EntropyWriter::new(&mut out);
        w.put(16, 0xFFFF);
        w.put(4, 0x1);
        w.finish();
        assert_eq!(out, vec![0xFF, 0x00, 0xFF, 0x00, 0x1F]);
        let mut r = EntropyReader::new(&out, 0);
        assert_eq!(r.bits(16).unwrap(), 0xFFFF);
        assert_eq!(r.bits(4).unwrap(), 1);
        let marker = [0xFFu8, 0xD9];
        assert!(EntropyReader::new(&marker, 0).bit().is_err());
    }
}
