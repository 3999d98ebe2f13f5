//! Decoder for the streams produced by [`super::encode_base`]: baseline,
//! 8-bit, three components at 1x1 sampling. Other JPEG flavours are refused.

use super::dct::idct;
use super::huffman::{DecodeTable, EntropyReader};
use super::quant::{QuantTables, ZIGZAG};
use super::Coefficients;
use crate::error::{Error, Result};
use crate::imagio::LdrImage;

struct Frame {
    width: usize,
    height: usize,
    /// Quantization table id per component.
    tq: [u8; 3],
}

pub fn read_jpeg(bytes: &[u8]) -> Result<Coefficients> {
    if bytes.get(..2) != Some(&[0xFF, 0xD8]) {
        return Err(Error::parse(0, "missing SOI"));
    }
    let mut pos = 2;
    let mut qt: [Option<[u16; 64]>; 4] = [None; 4];
    let mut dc: [Option<DecodeTable>; 4] = Default::default();
    let mut ac: [Option<DecodeTable>; 4] = Default::default();
    let mut frame: Option<Frame> = None;

    loop {
        let at = pos;
        let marker = match bytes.get(pos..pos + 2) {
            Some(&[0xFF, m]) => m,
            _ => return Err(Error::parse(at, "expected marker")),
        };
        pos += 2;
        if marker == 0xD9 {
            return Err(Error::parse(at, "EOI before scan"));
        }
        let len = bytes
            .get(pos..pos + 2)
            .map(|b| u16::from_be_bytes([b[0], b[1]]) as usize)
            .ok_or_else(|| Error::parse(pos, "truncated segment length"))?;
        if len < 2 {
            return Err(Error::parse(pos, "bad segment length"));
        }
        let body = bytes
            .get(pos + 2..pos + len)
            .ok_or_else(|| Error::parse(pos, "truncated segment"))?;
        let body_at = pos + 2;
        pos += len;
        match marker {
            0xDB => {
                let mut p = 0;
                while p < body.len() {
                    let (precision, id) = (body[p] >> 4, (body[p] & 0x0F) as usize);
                    if precision != 0 || id > 3 || p + 65 > body.len() {
                        return Err(Error::parse(body_at + p, "unsupported DQT"));
                    }
                    let mut t = [0u16; 64];
                    for k in 0..64 {
                        t[k] = body[p + 1 + k] as u16;
                    }
                    if t.contains(&0) {
                        return Err(Error::parse(body_at + p, "zero quantizer"));
                    }
                    qt[id] = Some(t);
                    p += 65;
                }
            }
            0xC4 => {
                let mut p = 0;
                while p < body.len() {
                    let (class, id) = (body[p] >> 4, (body[p] & 0x0F) as usize);
                    if class > 1 || id > 3 || p + 17 > body.len() {
                        return Err(Error::parse(body_at + p, "bad DHT header"));
                    }
                    let mut bits = [0u8; 16];
                    bits.copy_from_slice(&body[p + 1..p + 17]);
                    let n: usize = bits.iter().map(|&b| b as usize).sum();
                    let vals = body
                        .get(p + 17..p + 17 + n)
                        .ok_or_else(|| Error::parse(body_at + p, "truncated DHT"))?;
                    let table = DecodeTable::new(&bits, vals)
                        .map_err(|e| Error::parse(body_at + p, e.to_string()))?;
                    if class == 0 {
                        dc[id] = Some(table);
                    } else {
                        ac[id] = Some(table);
                    }
                    p += 17 + n;
                }
            }
            0xC0 => {
                if body.len() != 15 || body[0] != 8 || body[5] != 3 {
                    return Err(Error::parse(body_at, "only 8-bit three-component frames"));
                }
                let height = u16::from_be_bytes([body[1], body[2]]) as usize;
                let width = u16::from_be_bytes([body[3], body[4]]) as usize;
                if width == 0 || height == 0 {
                    return Err(Error::parse(body_at, "zero dimension"));
                }
                let mut tq = [0u8; 3];
                for c in 0..3 {
                    let comp = &body[6 + c * 3..9 + c * 3];
                    if comp[0] != c as u8 + 1 || comp[1] != 0x11 || comp[2] > 3 {
                        return Err(Error::parse(
                            body_at + 6 + c * 3,
                            "unsupported component layout",
                        ));
                    }
                    tq[c] = comp[2];
                }
                frame = Some(Frame { width, height, tq });
            }
            0xC1..=0xCF if marker != 0xC4 && marker != 0xC8 && marker != 0xCC => {
                return Err(Error::parse(
                    at,
                    "only baseline sequential JPEG is supported",
                ));
            }
            0xDA => {
                let frame = frame.ok_or_else(|| Error::parse(at, "SOS before SOF"))?;
                if body.len() != 10 || body[0] != 3 || body[7] != 0 || body[8] != 63 || body[9] != 0
                {
                    return Err(Error::parse(body_at, "unsupported scan header"));
                }
                let mut sel = [(0usize, 0usize); 3];
                for c in 0..3 {
                    if body[1 + c * 2] != c as u8 + 1 {
                        return Err(Error::parse(body_at, "scan component order"));
                    }
                    let t = body[2 + c * 2];
                    sel[c] = ((t >> 4) as usize, (t & 0x0F) as usize);
                }
                let mut tables = [[0u16; 64]; 3];
                for c in 0..3 {
                    tables[c] = qt[frame.tq[c] as usize]
                        .ok_or_else(|| Error::parse(at, "missing quantization table"))?;
                }
                return decode_scan(bytes, pos, &frame, &sel, &dc, &ac, tables);
            }
            _ => {} // APPn, COM and friends
        }
    }
}

fn decode_scan(
    bytes: &[u8],
    start: usize,
    frame: &Frame,
    sel: &[(usize, usize); 3],
    dc: &[Option<DecodeTable>; 4],
    ac: &[Option<DecodeTable>; 4],
    tables: [[u16; 64]; 3],
) -> Result<Coefficients> {
    let lookup = |set: &[Option<DecodeTable>; 4], id: usize| {
        set.get(id)
            .and_then(|t| t.as_ref())
            .cloned()
            .ok_or_else(|| Error::parse(start, "scan references a missing Huffman table"))
    };
    let dct: Vec<DecodeTable> = sel.iter().map(|s| lookup(dc, s.0)).collect::<Result<_>>()?;
    let act: Vec<DecodeTable> = sel.iter().map(|s| lookup(ac, s.1)).collect::<Result<_>>()?;

    let nblocks = frame.width.div_ceil(8) * frame.height.div_ceil(8);
    let mut blocks: [Vec<[i16; 64]>; 3] = Default::default();
    let mut reader = EntropyReader::new(&bytes[start..], start);
    let mut pred = [0i32; 3];
    for _ in 0..nblocks {
        for c in 0..3 {
            let mut block = [0i16; 64];
            let cat = dct[c].decode(&mut reader)?;
            if cat > 11 {
                return Err(Error::parse(reader.position(), "DC category out of range"));
            }
            pred[c] += extend(reader.bits(cat)?, cat);
            block[0] = pred[c] as i16;
            let mut k = 1;
            while k < 64 {
                let rs = act[c].decode(&mut reader)?;
                let (run, cat) = ((rs >> 4) as usize, rs & 0x0F);
                if cat == 0 {
                    if run == 15 {
                        k += 16;
                        continue;
                    }
                    break;
                }
                k += run;
                if k > 63 {
                    return Err(Error::parse(reader.position(), "AC run past end of block"));
                }
                block[ZIGZAG[k]] = extend(reader.bits(cat)?, cat) as i16;
                k += 1;
            }
            if k > 64 {
                return Err(Error::parse(reader.position(), "AC run past end of block"));
            }
            blocks[c].push(block);
        }
    }
    // the entropy segment must be followed by EOI
    let tail = start + reader.consumed();
    if bytes.get(tail..tail + 2) != Some(&[0xFF, 0xD9]) {
        return Err(Error::parse(tail, "missing EOI after scan"));
    }

    if tables[1] != tables[2] {
        return Err(Error::parse(
            start,
            "chroma components must share a quantization table",
        ));
    }
    Ok(Coefficients {
        width: frame.width,
        height: frame.height,
        tables: QuantTables {
            luma: tables[0],
            chroma: tables[1],
        },
        blocks,
    })
}

fn extend(v: u32, cat: u8) -> i32 {
    if cat == 0 {
        return 0;
    }
    let v = v as i32;
    if v < 1 << (cat - 1) {
        v - (1 << cat) + 1
    } else {
        v
    }
}

/// Full-range BT.601 YCbCr to RGB, rounded.
pub(crate) fn ycbcr_to_rgb(y: f64, cb: f64, cr: f64) -> [u16; 3] {
    let (cb, cr) = (cb - 128.0, cr - 128.0);
    let r = y + 1.402 * cr;
    let g = y - 0.344_136 * cb - 0.714_136 * cr;
    let b = y + 1.772 * cb;
    [r, g, b].map(|v| v.round().clamp(0.0, 255.0) as u16)
}

/// Dequantization, inverse DCT, level shift and colour conversion.
pub fn reconstruct(coeffs: &Coefficients) -> LdrImage {
    let (w, h) = (coeffs.width, coeffs.height);
    let bw = w.div_ceil(8);
    let n = w * h;
    let mut ycc: [Vec<f64>; 3] = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    for c in 0..3 {
        let qt = coeffs.tables.natural(c);
        for (b, block) in coeffs.blocks[c].iter().enumerate() {
            let (bx, by) = (b % bw, b / bw);
            let mut deq = [0.0; 64];
            for k in 0..64 {
                deq[k] = block[k] as f64 * qt[k] as f64;
            }
            let spatial = idct(&deq);
            for y in 0..8 {
                let py = by * 8 + y;
                if py >= h {
                    break;
                }
                for x in 0..8 {
                    let px = bx * 8 + x;
                    if px >= w {
                        break;
                    }
                    ycc[c][py * w + px] = (spatial[y * 8 + x] + 128.0).round().clamp(0.0, 255.0);
                }
            }
        }
    }
    let mut planes: [Vec<u16>; 3] = [vec![0; n], vec![0; n], vec![0; n]];
    for i in 0..n {
        let rgb = ycbcr_to_rgb(ycc[0][i], ycc[1][i], ycc[2][i]);
        for c in 0..3 {
            planes[c][i] = rgb[c];
        }
    }
    LdrImage::from_u8_planes(w, h, planes)
}
