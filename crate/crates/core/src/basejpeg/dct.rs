//! Orthonormal 8x8 type-II DCT and its inverse.
//!
//! The basis is assembled from hard-coded cosine values, so the transform
//! involves only IEEE additions and multiplications and reconstructs
//! identically on every platform.

/// cos(k * pi / 16) for k = 0..=8.
const COS_16: [f64; 9] = [
    1.0,
    0.980_785_280_403_230_4,
    0.923_879_532_511_286_7,
    0.831_469_612_302_545_2,
    std::f64::consts::FRAC_1_SQRT_2,
    0.555_570_233_019_602_3,
    0.382_683_432_365_089_84,
    0.195_090_322_016_128_33,
    0.0,
];

use std::f64::consts::FRAC_1_SQRT_2;

fn cos_pi_16(m: usize) -> f64 {
    let m = m % 32;
    let m = if m > 16 { 32 - m } else { m };
    if m > 8 {
        -COS_16[16 - m]
    } else {
        COS_16[m]
    }
}

/// `basis[u][x] = C(u) / 2 * cos((2x + 1) u pi / 16)`.
fn basis() -> &'static [[f64; 8]; 8] {
    static BASIS: std::sync::OnceLock<[[f64; 8]; 8]> = std::sync::OnceLock::new();
    BASIS.get_or_init(|| {
        let mut b = [[0.0; 8]; 8];
        for (u, row) in b.iter_mut().enumerate() {
            let cu = if u == 0 { FRAC_1_SQRT_2 } else { 1.0 };
            for (x, v) in row.iter_mut().enumerate() {
                *v = 0.5 * cu * cos_pi_16((2 * x + 1) * u);
            }
        }
        b
    })
}

/// Forward DCT of a row-major block.
pub fn fdct(block: &[f64; 64]) -> [f64; 64] {
    let b = basis();
    let mut tmp = [0.0; 64];
    // rows: tmp[y][u] = sum_x b[u][x] f[y][x]
    for y in 0..8 {
        for u in 0..8 {
            let mut acc = 0.0;
            for x in 0..8 {
                acc += b[u][x] * block[y * 8 + x];
            }
            tmp[y * 8 + u] = acc;
        }
    }
    let mut out = [0.0; 64];
    for v in 0..8 {
        for u in 0..8 {
            let mut acc = 0.0;
            for y in 0..8 {
                acc += b[v][y] * tmp[y * 8 + u];
            }
            out[v * 8 + u] = acc;
        }
    }
    out
}

pub fn idct(coeffs: &[f64; 64]) -> [f64; 64] {
    let b = basis();
    let mut tmp = [0.0; 64];
    for v in 0..8 {
        for x in 0..8 {
            let mut acc = 0.0;
            for u in 0..8 {
                acc += b[u][x] * coeffs[v * 8 + u];
            }
            tmp[v * 8 + x] = acc;
        }
    }
    let mut out = [0.0; 64];
    for y in 0..8 {
        for x in 0..8 {
            let mut acc = 0.0;
            for v in 0..8 {
                acc += b[v][y] * tmp[v * 8 + x];
            }
            out[y * 8 + x] = acc;
        }
    }
    out
}

#[cfg(test)]
pub(crate) mod oracle {
    /// Direct 64x64 matrix DCT built from `std` cosines.
    pub fn matrix_dct(block: &[f64; 64]) -> [f64; 64] {
        let c = |k: usize| if k == 0 { 1.0 / 2f64.sqrt() } else { 1.0 };
        let pi = std::f64::consts::PI;
        let mut out = [0.0; 64];
        for v in 0..8 {
            for u in 0..8 {
                let mut acc = 0.0;
                for y in 0..8 {
                    for x in 0..8 {
                        acc += block[y * 8 + x]
                            * ((2 * x + 1) as f64 * u as f64 * pi / 16.0).cos()
                            * ((2 * y + 1) as f64 * v as f64 * pi / 16.0).cos();
                    }
                }
                out[v * 8 + u] = 0.25 * c(u) * c(v) * acc;
            }
        }
        out
    }
}
