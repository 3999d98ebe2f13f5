//! Reversible colour transform on 16-bit residual planes, exact modulo 2^16.
//!
//! `Cb = B - G` and `Cr = R - G` wrap modulo 2^16. The luma term adds
//! `floor((Cb + Cr) / 4)` to `G`, with `Cb` and `Cr` read as signed 16-bit
//! values; that is `floor((R + 2G + B) / 4)` whenever the channel differences
//! fit in 15 bits, and the inverse subtracts the same quantity.

#[inline]
fn offset(cb: u16, cr: u16) -> u16 {
    ((cb as i16 as i32 + cr as i16 as i32) >> 2) as u16
}

#[inline]
pub fn forward_pixel(r: u16, g: u16, b: u16) -> [u16; 3] {
    let cb = b.wrapping_sub(g);
    let cr = r.wrapping_sub(g);
    [g.wrapping_add(offset(cb, cr)), cb, cr]
}

#[inline]
pub fn inverse_pixel(y: u16, cb: u16, cr: u16) -> [u16; 3] {
    let g = y.wrapping_sub(offset(cb, cr));
    [cr.wrapping_add(g), g, cb.wrapping_add(g)]
}

pub fn color_transform_fwd(planes: &[Vec<u16>; 3]) -> [Vec<u16>; 3] {
    let n = planes[0].len();
    let mut out: [Vec<u16>; 3] = [vec![0; n], vec![0; n], vec![0; n]];
    for i in 0..n {
        let v = forward_pixel(planes[0][i], planes[1][i], planes[2][i]);
        for c in 0..3 {
            out[c][i] = v[c];
        }
    }
    out
}

pub fn color_transform_inv(planes: &[Vec<u16>; 3]) -> [Vec<u16>; 3] {
    let n = planes[0].len();
    let mut out: [Vec<u16>; 3] = [vec![0; n], vec![0; n], vec![0; n]];
    for i in 0..n {
        let v = inverse_pixel(planes[0][i], planes[1][i], planes[2][i]);
        for c in 0..3 {
            out[c][i] = v[c];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn examples() {
        assert_eq!(forward_pixel(1, 1, 1), [1, 0, 0]);
        assert_eq!(forward_pixel(0, 0, 0), [0, 0, 0]);
        // agrees with floor((r + 2g + b) / 4) for close channels
        assert_eq!(forward_pixel(10, 20, 33)[0], (10 + 40 + 33) / 4);
        assert_eq!(forward_pixel(65535, 0, 1), [0, 1, 65535]);
    }

    #[test]
    fn inverse_on_wrap_heavy_values() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let edges = [0u16, 1, 2, 3, 32767, 32768, 32769, 65533, 65534, 65535];
        for &r in &edges {
            for &g in &edges {
                for &b in &edges {
                    let t = forward_pixel(r, g, b);
                    assert_eq!(inverse_pixel(t[0], t[1], t[2]), [r, g, b]);
                }
            }
        }
        for _ in 0..100_000 {
            let (r, g, b) = (rng.gen(), rng.gen(), rng.gen());
            let t = forward_pixel(r, g, b);
            assert_eq!(inverse_pixel(t[0], t[1], t[2]), [r, g, b]);
        }
    }
}
