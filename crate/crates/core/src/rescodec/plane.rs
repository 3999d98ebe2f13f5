//! Lossless plane coder: median edge detection prediction with adaptive
//! Golomb-Rice coding of the folded prediction error.

use crate::bitio::{BitReader, BitWriter};
use crate::error::{Error, Result};
use crate::rice::AdaptiveRice;

/// Median edge detector over left `a`, above `b` and above-left `c`.
#[inline]
pub fn med(a: u16, b: u16, c: u16) -> u16 {
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    if c >= hi {
        lo
    } else if c <= lo {
        hi
    } else {
        // c strictly between a and b, so the result lies in [lo, hi]
        (a as i32 + b as i32 - c as i32) as u16
    }
}

/// Maps a mod-2^16 error to an unsigned code: 0, -1, 1, -2, ... -> 0, 1, 2, 3, ...
#[inline]
pub fn fold(e: u16) -> u16 {
    if e < 0x8000 {
        e << 1
    } else {
        ((0x1_0000 - e as u32) * 2 - 1) as u16
    }
}

#[inline]
pub fn unfold(u: u16) -> u16 {
    if u & 1 == 0 {
        u >> 1
    } else {
        (0x1_0000 - ((u as u32 + 1) >> 1)) as u16
    }
}

#[inline]
fn neighbours(plane: &[u16], width: usize, i: usize) -> (u16, u16, u16) {
    let (x, y) = (i % width, i / width);
    let a = if x > 0 { plane[i - 1] } else { 0 };
    let b = if y > 0 { plane[i - width] } else { 0 };
    let c = if x > 0 && y > 0 {
        plane[i - width - 1]
    } else {
        0
    };
    (a, b, c)
}

pub fn code_plane(plane: &[u16], width: usize) -> Vec<u8> {
    let mut w = BitWriter::new();
    let mut model = AdaptiveRice::new();
    for (i, &x) in plane.iter().enumerate() {
        let (a, b, c) = neighbours(plane, width, i);
        let e = x.wrapping_sub(med(a, b, c));
        model.encode(&mut w, fold(e));
    }
    w.finish()
}

pub fn decode_plane(bytes: &[u8], width: usize, height: usize) -> Result<Vec<u16>> {
    let n = width * height;
    let mut plane = vec![0u16; n];
    let mut r = BitReader::new(bytes);
    let mut model = AdaptiveRice::new();
    for i in 0..n {
        let (a, b, c) = neighbours(&plane, width, i);
        let e = unfold(model.decode(&mut r)?);
        plane[i] = med(a, b, c).wrapping_add(e);
    }
    if r.bytes_consumed() != bytes.len() {
        return Err(Error::Corrupt(format!(
            "plane payload has {} unused bytes",
            bytes.len() - r.bytes_consumed()
        )));
    }
    Ok(plane)
}
