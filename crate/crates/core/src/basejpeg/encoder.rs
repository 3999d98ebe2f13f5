use super::dct::fdct;
use super::huffman::{
    EncodeTable, EntropyWriter, TableSpec, AC_CHROMA, AC_LUMA, DC_CHROMA, DC_LUMA,
};
use super::quant::{quality_to_tables, ZIGZAG};
use super::Coefficients;
use crate::error::{Error, Result};
use crate::imagio::LdrImage;

/// Full-range BT.601 RGB to YCbCr, rounded.
pub(crate) fn rgb_to_ycbcr(r: f64, g: f64, b: f64) -> [u8; 3] {
    let y = 0.299 * r + 0.587 * g + 0.114 * b;
    let cb = -0.168_736 * r - 0.331_264 * g + 0.5 * b + 128.0;
    let cr = 0.5 * r - 0.418_688 * g - 0.081_312 * b + 128.0;
    [y, cb, cr].map(|v| v.round().clamp(0.0, 255.0) as u8)
}

/// Colour conversion, edge-replicated padding, DCT and quantization.
pub fn forward(image: &LdrImage, q: u8) -> Result<Coefficients> {
    if image.bit_depth() != 8 {
        return Err(Error::Param(format!(
            "base layer needs an 8-bit image, got {} bits",
            image.bit_depth()
        )));
    }
    let (w, h) = (image.width(), image.height());
    if w > 65535 || h > 65535 {
        return Err(Error::Param(format!("{w}x{h} exceeds JPEG limits")));
    }
    let tables = quality_to_tables(q)?;
    let n = w * h;
    let mut ycc: [Vec<u8>; 3] = [vec![0; n], vec![0; n], vec![0; n]];
    for i in 0..n {
        let px = [0, 1, 2].map(|c| image.plane(c)[i] as f64);
        let v = rgb_to_ycbcr(px[0], px[1], px[2]);
        for c in 0..3 {
            ycc[c][i] = v[c];
        }
    }

    let (bw, bh) = (w.div_ceil(8), h.div_ceil(8));
    let mut blocks: [Vec<[i16; 64]>; 3] = Default::default();
    for c in 0..3 {
        let qt = tables.natural(c);
        let plane = &ycc[c];
        blocks[c].reserve(bw * bh);
        for by in 0..bh {
            for bx in 0..bw {
                let mut block = [0.0; 64];
                for y in 0..8 {
                    let sy = (by * 8 + y).min(h - 1);
                    for x in 0..8 {
                        let sx = (bx * 8 + x).min(w - 1);
                        block[y * 8 + x] = plane[sy * w + sx] as f64 - 128.0;
                    }
                }
                let coeffs = fdct(&block);
                let mut quant = [0i16; 64];
                for k in 0..64 {
                    quant[k] = (coeffs[k] / qt[k] as f64).round() as i16;
                }
                blocks[c].push(quant);
            }
        }
    }
    Ok(Coefficients {
        width: w,
        height: h,
        tables,
        blocks,
    })
}

fn category(v: i32) -> u8 {
    (32 - v.unsigned_abs().leading_zeros()) as u8
}

fn magnitude_bits(v: i32, cat: u8) -> u16 {
    if v >= 0 {
        v as u16
    } else {
        ((v - 1) & ((1 << cat) - 1)) as u16
    }
}

fn segment(out: &mut Vec<u8>, marker: u8, body: &[u8]) {
    out.extend_from_slice(&[0xFF, marker]);
    out.extend_from_slice(&((body.len() + 2) as u16).to_be_bytes());
    out.extend_from_slice(body);
}

fn dht_body(class: u8, id: u8, spec: &TableSpec) -> Vec<u8> {
    let mut body = vec![class << 4 | id];
    body.extend_from_slice(&spec.bits);
    body.extend_from_slice(spec.vals);
    body
}

/// Serializes quantized coefficients as a baseline sequential JFIF stream.
pub fn write_jpeg(coeffs: &Coefficients) -> Vec<u8> {
    let mut out = vec![0xFF, 0xD8];
    segment(&mut out, 0xE0, b"JFIF\0\x01\x01\0\0\x01\0\x01\0\0");
    for (id, table) in [&coeffs.tables.luma, &coeffs.tables.chroma]
        .into_iter()
        .enumerate()
    {
        let mut body = vec![id as u8];
        body.extend(table.iter().map(|&v| v as u8));
        segment(&mut out, 0xDB, &body);
    }
    let mut sof = vec![8];
    sof.extend_from_slice(&(coeffs.height as u16).to_be_bytes());
    sof.extend_from_slice(&(coeffs.width as u16).to_be_bytes());
    sof.push(3);
    for c in 0..3u8 {
        sof.extend_from_slice(&[c + 1, 0x11, u8::from(c > 0)]);
    }
    segment(&mut out, 0xC0, &sof);
    segment(&mut out, 0xC4, &dht_body(0, 0, &DC_LUMA));
    segment(&mut out, 0xC4, &dht_body(1, 0, &AC_LUMA));
    segment(&mut out, 0xC4, &dht_body(0, 1, &DC_CHROMA));
    segment(&mut out, 0xC4, &dht_body(1, 1, &AC_CHROMA));
    segment(&mut out, 0xDA, &[3, 1, 0x00, 2, 0x11, 3, 0x11, 0, 63, 0]);

    let dc = [EncodeTable::new(&DC_LUMA), EncodeTable::new(&DC_CHROMA)];
    let ac = [EncodeTable::new(&AC_LUMA), EncodeTable::new(&AC_CHROMA)];
    let mut writer = EntropyWriter::new(&mut out);
    let mut pred = [0i32; 3];
    for b in 0..coeffs.blocks[0].len() {
        for c in 0..3 {
            let t = usize::from(c > 0);
            let block = &coeffs.blocks[c][b];
            let diff = block[0] as i32 - pred[c];
            pred[c] = block[0] as i32;
            let cat = category(diff);
            let (len, code) = dc[t].get(cat);
            writer.put(len, code);
            writer.put(cat, magnitude_bits(diff, cat));

            let mut run = 0u8;
            for &idx in &ZIGZAG[1..] {
                let v = block[idx] as i32;
                if v == 0 {
                    run += 1;
                    continue;
                }
                while run >= 16 {
                    let (len, code) = ac[t].get(0xF0);
                    writer.put(len, code);
                    run -= 16;
                }
                let cat = category(v);
                let (len, code) = ac[t].get(run << 4 | cat);
                writer.put(len, code);
                writer.put(cat, magnitude_bits(v, cat));
                run = 0;
            }
            if run > 0 {
                let (len, code) = ac[t].get(0x00);
                writer.put(len, code);
            }
        }
    }
    writer.finish();
    out.extend_from_slice(&[0xFF, 0xD9]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn categories() {
        assert_eq!(category(0), 0);
        assert_eq!(category(1), 1);
        assert_eq!(category(-1), 1);
        assert_eq!(category(-3), 2);
        assert_eq!(category(255), 8);
        assert_eq!(category(-2047), 11);
        assert_eq!(magnitude_bits(-1, 1), 0);
        assert_eq!(magnitude_bits(-3, 2), 0);
        assert_eq!(magnitude_bits(-2, 2), 1);
        assert_eq!(magnitude_bits(3, 2), 3);
    }

    #[test]
    fn uniform_block_has_single_dc() {
        let img = LdrImage::new(8, 8, 8, [vec![90; 64], vec![90; 64], vec![90; 64]]).unwrap();
        let c = forward(&img, 80).unwrap();
        let y = &c.blocks[0][0];
        assert_ne!(y[0], 0);
        assert!(y[1..].iter().all(|&v| v == 0));
        // neutral grey has zero chroma
        assert!(c.blocks[1][0].iter().all(|&v| v == 0));
    }

    #[test]
    fn rejects_deep_input() {
        let img = LdrImage::new(1, 1, 12, [vec![0], vec![0], vec![0]]).unwrap();
        assert!(forward(&img, 80).is_err());
    }
}
