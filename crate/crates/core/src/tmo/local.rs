//! Scale selection for the local photographic operator.
//!
//! Centre Gaussians have standard deviation `1.6^i` for `i` in
//! `0..local_scales`; the surround of scale `i` is the centre of scale `i + 1`.
//! A pixel adapts to the largest scale whose normalized centre-surround
//! difference stays below the threshold.

use super::TmoParams;

const PHI: f64 = 8.0;
const SCALE_RATIO: f64 = 1.6;

pub(super) fn adaptation_luminance(
    scaled: &[f64],
    width: usize,
    height: usize,
    params: &TmoParams,
) -> Vec<f64> {
    let scales = params.local_scales as usize;
    let blurred: Vec<Vec<f64>> = (0..=scales)
        .map(|i| gaussian_blur(scaled, width, height, SCALE_RATIO.powi(i as i32)))
        .collect();
    let key = params.effective_key();
    let mut out = blurred[0].clone();
    let mut settled = vec![false; scaled.len()];
    for i in 0..scales {
        let s = SCALE_RATIO.powi(i as i32);
        let norm = 2f64.powf(PHI) * key / (s * s);
        let (center, surround) = (&blurred[i], &blurred[i + 1]);
        for p in 0..scaled.len() {
            if settled[p] {
                continue;
            }
            let activity = (center[p] - surround[p]) / (norm + center[p]);
            if activity.abs() < params.local_threshold {
                out[p] = center[p];
            } else {
                settled[p] = true;
            }
        }
    }
    out
}

/// Separable Gaussian blur, kernel truncated at three sigma, edges replicated.
pub(super) fn gaussian_blur(src: &[f64], width: usize, height: usize, sigma: f64) -> Vec<f64> {
    let radius = (3.0 * sigma).ceil() as isize;
    let kernel: Vec<f64> = {
        let k: Vec<f64> = (-radius..=radius)
            .map(|x| (-(x * x) as f64 / (2.0 * sigma * sigma)).exp())
            .collect();
        let sum: f64 = k.iter().sum();
        k.into_iter().map(|v| v / sum).collect()
    };
    let clamp = |v: isize, n: usize| v.clamp(0, n as isize - 1) as usize;

    let mut tmp = vec![0.0; src.len()];
    for y in 0..height {
        let row = &src[y * width..(y + 1) * width];
        for x in 0..width {
            let mut acc = 0.0;
            for (k, &w) in kernel.iter().enumerate() {
                acc += w * row[clamp(x as isize + k as isize - radius, width)];
            }
            tmp[y * width + x] = acc;
        }
    }
    let mut out = vec![0.0; src.len()];
    for y in 0..height {
        for x in 0..width {
            let mut acc = 0.0;
            for (k, &w) in kernel.iter().enumerate() {
                acc += w * tmp[clamp(y as isize + k as isize - radius, height) * width + x];
            }
            out[y * width + x] = acc;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tmo::TmoKind;

    #[test]
    fn blur_preserves_constants_and_mass() {
        let flat = vec![3.5; 12 * 7];
        for v in gaussian_blur(&flat, 12, 7, 2.3) {
            assert!((v - 3.5).abs() < 1e-12);
        }
        let mut spike = vec![0.0; 41 * 41];
        spike[20 * 41 + 20] = 1.0;
        let out = gaussian_blur(&spike, 41, 41, 1.6);
        let total: f64 = out.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(out[20 * 41 + 20] > out[20 * 41 + 21]);
    }

    #[test]
    fn uniform_field_adapts_to_itself() {
        let p = TmoParams::new(TmoKind::ReinhardLocal);
        let v = adaptation_luminance(&[0.4; 100], 10, 10, &p);
        assert!(v.iter().all(|&x| (x - 0.4).abs() < 1e-12));
    }

    #[test]
    fn edges_stop_scale_growth() {
        // bright square on dark background: pixels near the edge settle early
        let (w, h) = (32, 32);
        let ls: Vec<f64> = (0..w * h)
            .map(|i| if (i % w) < 16 { 0.01 } else { 20.0 })
            .collect();
        let p = TmoParams::new(TmoKind::ReinhardLocal);
        let v = adaptation_luminance(&ls, w, h, &p);
        // far from the edge the adaptation level stays close to the local value
        assert!((v[16 * w + 31] - 20.0).abs() / 20.0 < 0.2);
        assert!(v.iter().all(|x| x.is_finite() && *x >= 0.0));
    }
}
