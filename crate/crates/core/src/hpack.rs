//! Histogram packing.
//!
//! A component whose histogram is sparse (only a few of the 65536 possible
//! values occur) is remapped onto the dense alphabet `[0, K)` by replacing
//! each sample with the rank of its value among the values that occur. The
//! remap is strictly monotone, so order and histogram counts are preserved;
//! the gain comes from the entropy coder seeing small prediction errors where
//! it used to see gaps.
//!
//! Serialized table: `K` as u32 LE, then for each symbol the gap to its
//! predecessor minus one as an unsigned LEB128 varint (the first symbol is
//! written as-is).

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PackTable {
    symbols: Vec<u16>,
}

impl PackTable {
    pub fn symbols(&self) -> &[u16] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Builds a table from a strictly increasing symbol list.
    pub fn from_symbols(symbols: Vec<u16>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::Param("pack table needs at least one symbol".into()));
        }
        if symbols.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Param(
                "pack table symbols must strictly increase".into(),
            ));
        }
        Ok(Self { symbols })
    }
}

/// Sorted distinct values of `component`.
pub fn build_table(component: &[u16]) -> Result<PackTable> {
    if component.is_empty() {
        return Err(Error::Param(
            "cannot build a pack table from no samples".into(),
        ));
    }
    let mut seen = vec![false; 1 << 16];
    for &v in component {
        seen[v as usize] = true;
    }
    let symbols = (0..=u16::MAX).filter(|&v| seen[v as usize]).collect();
    Ok(PackTable { symbols })
}

pub fn pack(component: &[u16], table: &PackTable) -> Result<Vec<u16>> {
    let mut index = vec![u32::MAX; 1 << 16];
    for (i, &s) in table.symbols.iter().enumerate() {
        index[s as usize] = i as u32;
    }
    component
        .iter()
        .enumerate()
        .map(|(pos, &v)| match index[v as usize] {
            u32::MAX => Err(Error::Integrity(format!(
                "sample {v} at position {pos} is not in the pack table"
            ))),
            // K <= 65536, so indices fit in u16
            i => Ok(i as u16),
        })
        .collect()
}

pub fn unpack(packed: &[u16], table: &PackTable) -> Result<Vec<u16>> {
    packed
        .iter()
        .map(|&i| {
            table.symbols.get(i as usize).copied().ok_or_else(|| {
                Error::Corrupt(format!("packed index {i} outside table of {}", table.len()))
            })
        })
        .collect()
}

pub fn serialize_table(table: &PackTable) -> Vec<u8> {
    let mut out = Vec::with_capacity(4 + table.len());
    out.extend_from_slice(&(table.len() as u32).to_le_bytes());
    let mut prev: Option<u16> = None;
    for &s in &table.symbols {
        let gap = match prev {
            None => s as u32,
            Some(p) => (s - p) as u32 - 1,
        };
        write_varint(&mut out, gap);
        prev = Some(s);
    }
    out
}

/// Parses a table occupying exactly `bytes`.
pub fn parse_table(bytes: &[u8]) -> Result<PackTable> {
    let (table, used) = parse_table_prefix(bytes)?;
    if used != bytes.len() {
        return Err(Error::parse(used, "trailing bytes after pack table"));
    }
    Ok(table)
}

/// Parses a table at the start of `bytes`, returning it and its byte length.
pub fn parse_table_prefix(bytes: &[u8]) -> Result<(PackTable, usize)> {
    let k = bytes
        .get(..4)
        .map(|b| u32::from_le_bytes([b[0], b[1], b[2], b[3]]) as usize)
        .ok_or_else(|| Error::parse(0, "truncated pack table header"))?;
    if k == 0 || k > 1 << 16 {
        return Err(Error::parse(0, format!("pack table size {k} out of range")));
    }
    let mut pos = 4;
    let mut symbols = Vec::with_capacity(k);
    let mut next: u32 = 0;
    for _ in 0..k {
        let at = pos;
        let gap = read_varint(bytes, &mut pos)?;
        let value = next as u64 + gap as u64;
        if value > u16::MAX as u64 {
            return Err(Error::parse(at, "pack table symbol exceeds 16 bits"));
        }
        symbols.push(value as u16);
        next = value as u32 + 1;
    }
    Ok((PackTable { symbols }, pos))
}

fn write_varint(out: &mut Vec<u8>, mut v: u32) {
    loop {
        let byte = (v & 0x7F) as u8;
        v >>= 7;
        if v == 0 {
            out.push(byte);
            return;
        }
        out.push(byte | 0x80);
    }
}

fn read_varint(bytes: &[u8], pos: &mut usize) -> Result<u32> {
    let start = *pos;
    let mut v: u64 = 0;
    for shift in (0..35).step_by(7) {
        let b = *bytes
            .get(*pos)
            .ok_or_else(|| Error::parse(*pos, "truncated varint"))?;
        *pos += 1;
        v |= ((b & 0x7F) as u64) << shift;
        if b & 0x80 == 0 {
            return u32::try_from(v).map_err(|_| Error::parse(start, "varint overflow"));
        }
    }
    Err(Error::parse(start, "varint too long"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn build_examples() {
        assert_eq!(
            build_table(&[0, 5, 5, 1000]).unwrap().symbols(),
            &[0, 5, 1000]
        );
        assert_eq!(build_table(&[7, 7, 7]).unwrap().symbols(), &[7]);
        let all: Vec<u16> = (0..=u16::MAX).rev().collect();
        let t = build_table(&all).unwrap();
        assert_eq!(t.len(), 65536);
        assert_eq!(pack(&all, &t).unwrap(), all);
        assert!(build_table(&[]).is_err());
    }

    #[test]
    fn pack_unpack_examples() {
        let t = build_table(&[0, 5, 5, 1000]).unwrap();
        assert_eq!(pack(&[0, 5, 5, 1000], &t).unwrap(), vec![0, 1, 1, 2]);
        assert_eq!(unpack(&[0, 1, 1, 2], &t).unwrap(), vec![0, 5, 5, 1000]);
        assert!(matches!(pack(&[6], &t), Err(Error::Integrity(_))));
        assert!(matches!(unpack(&[3], &t), Err(Error::Corrupt(_))));
        let single = build_table(&[42]).unwrap();
        assert_eq!(unpack(&[0; 5], &single).unwrap(), vec![42; 5]);
    }

    #[test]
    fn serialization_layout() {
        let t = build_table(&[0, 5, 1000]).unwrap();
        let bytes = serialize_table(&t);
        // K = 3, gaps-minus-one 0, 4, 994 (994 = 0xE2 0x07 in LEB128)
        assert_eq!(bytes, vec![3, 0, 0, 0, 0, 4, 0xE2, 0x07]);
        let full = PackTable::from_symbols((0..=u16::MAX).collect()).unwrap();
        let bytes = serialize_table(&full);
        assert_eq!(bytes.len(), 4 + 65536);
        assert!(bytes[4..].iter().all(|&b| b == 0));
        assert_eq!(parse_table(&bytes).unwrap(), full);
    }

    #[test]
    fn parse_errors() {
        assert!(parse_table(&[0, 0, 0, 0]).is_err());
        assert!(parse_table(&[2, 0, 0, 0, 1]).is_err());
        let mut extra = serialize_table(&build_table(&[1, 2]).unwrap());
        extra.push(0);
        assert!(parse_table(&extra).is_err());
        // gap pushes past 65535
        assert!(parse_table(&[2, 0, 0, 0, 0xFF, 0xFF, 0x03, 0x01]).is_err());
        assert!(PackTable::from_symbols(vec![3, 3]).is_err());
    }

    proptest! {
        #[test]
        fn round_trips(values in proptest::collection::vec(any::<u16>(), 1..400)) {
            let t = build_table(&values).unwrap();
            let packed = pack(&values, &t).unwrap();
            prop_assert!(packed.iter().all(|&p| (p as usize) < t.len()));
            prop_assert_eq!(&unpack(&packed, &t).unwrap(), &values);
            prop_assert_eq!(parse_table(&serialize_table(&t)).unwrap(), t.clone());
            // strictly monotone remap
            for (a, pa) in values.iter().zip(&packed) {
                for (b, pb) in values.iter().zip(&packed) {
                    prop_assert_eq!(a < b, pa < pb);
                }
            }
            // every packed index occurs and counts are preserved
            let mut counts_in = std::collections::BTreeMap::new();
            for v in &values { *counts_in.entry(*v).or_insert(0) += 1; }
            let mut counts_out = vec![0; t.len()];
            for p in &packed { counts_out[*p as usize] += 1; }
            prop_assert!(counts_out.iter().all(|&c| c > 0));
            prop_assert_eq!(counts_in.values().copied().collect::<Vec<_>>(), counts_out);
        }
    }
}
