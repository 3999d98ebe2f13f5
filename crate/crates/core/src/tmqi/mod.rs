//! Tone Mapped Image Quality Index (Yeganeh and Wang, IEEE TIP 2013).
//!
//! `Q = a·S^α + (1 − a)·N^β` where `S` is a five-scale structural fidelity
//! between the HDR and LDR luminance and `N` the statistical naturalness of
//! the LDR luminance.
//!
//! HDR luminance (BT.709) is mapped through `ln(L + 1e-6)` and range-normalized
//! to `[0, 255]`. LDR luminance is `0.2989 R + 0.5870 G + 0.1140 B` on the
//! 8-bit samples.
//!
//! Per scale, local statistics come from an 11×11 Gaussian window (σ = 1.5)
//! applied in "valid" mode. A scale smaller than the window uses the largest
//! odd window that fits. Local standard deviations pass through the
//! psychometric mapping `Φ((σ − μ_f) / (μ_f / 3))` with
//! `μ_f = 128 / (1.4 · CSF(f))`, and the fidelity map is
//!
//! ```text
//! (2 Φ1 Φ2 + C1) / (Φ1² + Φ2² + C1) · (σ12 + C2) / (σ1 σ2 + C2)
//! ```
//!
//! Scales are separated by a 2×2 mean and decimation by two; spatial
//! frequency starts at 16 cycles/degree and halves per scale.
//!
//! Naturalness is the product of a Gaussian density on the global mean and a
//! Beta density on the mean 11×11 block standard deviation (divided by 64.29),
//! each divided by its value at the mode.

mod boxstats;

pub use boxstats::{boxstats, BoxStats};

use crate::error::{Error, Result};
use crate::imagio::{luminance, HdrImage, LdrImage};

pub mod constants {
    pub const A: f64 = 0.8012;
    pub const ALPHA: f64 = 0.3046;
    pub const BETA: f64 = 0.7088;
    pub const SCALE_WEIGHTS: [f64; 5] = [0.0448, 0.2856, 0.3001, 0.2363, 0.1333];
    pub const FIRST_FREQUENCY: f64 = 16.0;
    pub const C1: f64 = 0.01;
    pub const C2: f64 = 10.0;
    pub const WINDOW: usize = 11;
    pub const WINDOW_SIGMA: f64 = 1.5;
    pub const MEAN_MU: f64 = 115.94;
    pub const MEAN_SIGMA: f64 = 27.99;
    pub const STD_BETA_A: f64 = 4.4;
    pub const STD_BETA_B: f64 = 10.1;
    pub const STD_SCALE: f64 = 64.29;
    pub const NAT_BLOCK: usize = 11;
    pub const LOG_DELTA: f64 = 1e-6;
    pub const LDR_GRAY: [f64; 3] = [0.2989, 0.5870, 0.1140];
}

use constants::*;

#[derive(Debug, Clone, PartialEq)]
pub struct TmqiScore {
    pub q_overall: f64,
    pub s_structural: f64,
    pub n_naturalness: f64,
    pub per_scale_s: Vec<f64>,
}

/// Combined score from structural fidelity and naturalness.
pub fn combine(s: f64, n: f64) -> f64 {
    A * s.powf(ALPHA) + (1.0 - A) * n.powf(BETA)
}

pub fn tmqi(hdr: &HdrImage, ldr: &LdrImage) -> Result<TmqiScore> {
    if hdr.width() != ldr.width() || hdr.height() != ldr.height() {
        return Err(Error::Param(format!(
            "dimension mismatch: HDR {}x{}, LDR {}x{}",
            hdr.width(),
            hdr.height(),
            ldr.width(),
            ldr.height()
        )));
    }
    if ldr.bit_depth() != 8 {
        return Err(Error::Param("TMQI expects an 8-bit LDR image".into()));
    }
    let h = normalized_hdr_luminance(hdr)?;
    let l = ldr_gray(ldr);
    tmqi_luma(&h, &l, hdr.width(), hdr.height())
}

/// Score on luminance planes already on the 8-bit scale.
pub fn tmqi_luma(hdr_norm: &[f64], ldr: &[f64], width: usize, height: usize) -> Result<TmqiScore> {
    let n_px = width * height;
    if n_px == 0 || hdr_norm.len() != n_px || ldr.len() != n_px {
        return Err(Error::Param(
            "luminance planes must match the given dimensions".into(),
        ));
    }
    let per_scale_s = scale_fidelities(hdr_norm, ldr, width, height);
    let s = per_scale_s
        .iter()
        .zip(SCALE_WEIGHTS)
        .map(|(s, w)| s.powf(w))
        .product::<f64>()
        .clamp(0.0, 1.0);
    let n = naturalness(ldr, width, height);
    Ok(TmqiScore {
        q_overall: combine(s, n),
        s_structural: s,
        n_naturalness: n,
        per_scale_s,
    })
}

pub fn normalized_hdr_luminance(hdr: &HdrImage) -> Result<Vec<f64>> {
    let logs: Vec<f64> = luminance(hdr)
        .iter()
        .map(|&l| (l + LOG_DELTA).ln())
        .collect();
    let (lo, hi) = logs
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    if hi <= lo {
        return Err(Error::Domain("HDR luminance is constant".into()));
    }
    let scale = 255.0 / (hi - lo);
    Ok(logs.iter().map(|&v| (v - lo) * scale).collect())
}

pub fn ldr_gray(ldr: &LdrImage) -> Vec<f64> {
    let [r, g, b] = ldr.planes();
    let unit = 255.0 / crate::imagio::max_sample(ldr.bit_depth()) as f64;
    (0..ldr.pixel_count())
        .map(|i| {
            unit * (LDR_GRAY[0] * r[i] as f64
                + LDR_GRAY[1] * g[i] as f64
                + LDR_GRAY[2] * b[i] as f64)
        })
        .collect()
}

/// Per-scale fidelity values, clamped to `[0, 1]`.
pub fn scale_fidelities(hdr_norm: &[f64], ldr: &[f64], width: usize, height: usize) -> Vec<f64> {
    let mut x = hdr_norm.to_vec();
    let mut y = ldr.to_vec();
    let (mut w, mut h) = (width, height);
    let mut f = FIRST_FREQUENCY;
    let mut out = Vec::with_capacity(SCALE_WEIGHTS.len());
    for level in 0..SCALE_WEIGHTS.len() {
        out.push(local_fidelity(&x, &y, w, h, f).clamp(0.0, 1.0));
        if level + 1 < SCALE_WEIGHTS.len() {
            let (nw, nh) = (w.div_ceil(2), h.div_ceil(2));
            x = downsample(&x, w, h);
            y = downsample(&y, w, h);
            w = nw;
            h = nh;
            f /= 2.0;
        }
    }
    out
}

fn csf(f: f64) -> f64 {
    100.0 * 2.6 * (0.0192 + 0.114 * f) * (-(0.114 * f).powf(1.1)).exp()
}

fn normcdf(x: f64, mu: f64, sigma: f64) -> f64 {
    0.5 * libm::erfc(-(x - mu) / (sigma * std::f64::consts::SQRT_2))
}

fn local_fidelity(x: &[f64], y: &[f64], w: usize, h: usize, f: f64) -> f64 {
    let mu_f = 128.0 / (1.4 * csf(f));
    let sig_f = mu_f / 3.0;
    let size = window_size(w, h);
    let kernel = gaussian_kernel(size);

    let xx: Vec<f64> = x.iter().map(|v| v * v).collect();
    let yy: Vec<f64> = y.iter().map(|v| v * v).collect();
    let xy: Vec<f64> = x.iter().zip(y).map(|(a, b)| a * b).collect();
    let mx = filter_valid(x, w, h, &kernel);
    let my = filter_valid(y, w, h, &kernel);
    let mxx = filter_valid(&xx, w, h, &kernel);
    let myy = filter_valid(&yy, w, h, &kernel);
    let mxy = filter_valid(&xy, w, h, &kernel);

    let total: f64 = (0..mx.len())
        .map(|i| {
            let s1 = (mxx[i] - mx[i] * mx[i]).max(0.0).sqrt();
            let s2 = (myy[i] - my[i] * my[i]).max(0.0).sqrt();
            let s12 = mxy[i] - mx[i] * my[i];
            let p1 = normcdf(s1, mu_f, sig_f);
            let p2 = normcdf(s2, mu_f, sig_f);
            (2.0 * p1 * p2 + C1) / (p1 * p1 + p2 * p2 + C1) * (s12 + C2) / (s1 * s2 + C2)
        })
        .sum();
    total / mx.len() as f64
}

fn window_size(w: usize, h: usize) -> usize {
    let m = WINDOW.min(w).min(h);
    if m.is_multiple_of(2) {
        m - 1
    } else {
        m
    }
}

fn gaussian_kernel(size: usize) -> Vec<f64> {
    let c = (size / 2) as f64;
    let k: Vec<f64> = (0..size)
        .map(|i| {
            let d = i as f64 - c;
            (-d * d / (2.0 * WINDOW_SIGMA * WINDOW_SIGMA)).exp()
        })
        .collect();
    let s: f64 = k.iter().sum();
    k.into_iter().map(|v| v / s).collect()
}

/// Separable correlation keeping only fully covered positions.
fn filter_valid(src: &[f64], w: usize, h: usize, k: &[f64]) -> Vec<f64> {
    let n = k.len();
    let ow = w + 1 - n;
    let oh = h + 1 - n;
    let mut rows = vec![0.0; ow * h];
    for y in 0..h {
        let line = &src[y * w..(y + 1) * w];
        for x in 0..ow {
            rows[y * ow + x] = k.iter().zip(&line[x..x + n]).map(|(a, b)| a * b).sum();
        }
    }
    let mut out = vec![0.0; ow * oh];
    for y in 0..oh {
        for x in 0..ow {
            out[y * ow + x] = (0..n).map(|j| k[j] * rows[(y + j) * ow + x]).sum();
        }
    }
    out
}

/// 2×2 mean with edge replication, then keep every second sample.
fn downsample(src: &[f64], w: usize, h: usize) -> Vec<f64> {
    let (nw, nh) = (w.div_ceil(2), h.div_ceil(2));
    let at = |x: usize, y: usize| src[y.min(h - 1) * w + x.min(w - 1)];
    let mut out = Vec::with_capacity(nw * nh);
    for y in 0..nh {
        for x in 0..nw {
            let (x0, y0) = (2 * x, 2 * y);
            out.push((at(x0, y0) + at(x0 + 1, y0) + at(x0, y0 + 1) + at(x0 + 1, y0 + 1)) / 4.0);
        }
    }
    out
}

/// Statistical naturalness of an 8-bit-scale luminance plane.
pub fn naturalness(ldr: &[f64], width: usize, height: usize) -> f64 {
    let mean = ldr.iter().sum::<f64>() / ldr.len() as f64;
    let sig = mean_block_std(ldr, width, height);
    naturalness_from_stats(mean, sig)
}

/// Naturalness from the global mean and mean block standard deviation.
pub fn naturalness_from_stats(mean: f64, block_std: f64) -> f64 {
    let pb = (-(mean - MEAN_MU).powi(2) / (2.0 * MEAN_SIGMA * MEAN_SIGMA)).exp();
    let pc = beta_relative(block_std / STD_SCALE, STD_BETA_A, STD_BETA_B);
    (pb * pc).clamp(0.0, 1.0)
}

/// Beta density divided by its value at the mode.
fn beta_relative(x: f64, a: f64, b: f64) -> f64 {
    if !(x > 0.0 && x < 1.0) {
        return 0.0;
    }
    let mode = (a - 1.0) / (a + b - 2.0);
    (x / mode).powf(a - 1.0) * ((1.0 - x) / (1.0 - mode)).powf(b - 1.0)
}

fn mean_block_std(p: &[f64], w: usize, h: usize) -> f64 {
    let (bw, bh) = (NAT_BLOCK.min(w), NAT_BLOCK.min(h));
    let (nx, ny) = (w / bw, h / bh);
    let n = (bw * bh) as f64;
    let mut total = 0.0;
    for by in 0..ny {
        for bx in 0..nx {
            let vals = (0..bh).flat_map(|y| {
                let row = (by * bh + y) * w + bx * bw;
                p[row..row + bw].iter().copied()
            });
            let mean = vals.clone().sum::<f64>() / n;
            let ss: f64 = vals.map(|v| (v - mean) * (v - mean)).sum();
            total += if n > 1.0 {
                (ss / (n - 1.0)).sqrt()
            } else {
                0.0
            };
        }
    }
    total / (nx * ny) as f64
}
