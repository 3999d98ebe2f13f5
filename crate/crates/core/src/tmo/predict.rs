//! HDR prediction from the decoded base layer.
//!
//! Encoder and decoder both call [`predict_hdr`] on identical inputs, so the
//! function only has to be deterministic; its accuracy affects the residual
//! bitrate, never losslessness. Transcendental functions come from `libm`
//! so the result does not depend on the platform's math library.

use super::{drago, TmoKind, TmoParams};
use crate::imagio::{half_encode, luma, max_sample, HdrImage, LdrImage};

/// Upper clamp on display luminance before inverting `Ls / (1 + Ls)`.
const LD_CEILING: f64 = 1.0 - 1.0 / 1024.0;

const BISECTION_STEPS: usize = 64;

pub fn predict_hdr(base: &LdrImage, params: &TmoParams) -> HdrImage {
    let max_code = max_sample(base.bit_depth()) as f64;
    let n = base.pixel_count();
    let mut planes: [Vec<u16>; 3] = [vec![0; n], vec![0; n], vec![0; n]];
    let mut cache: Option<([u16; 3], [u16; 3])> = None;
    for i in 0..n {
        let codes = [0, 1, 2].map(|ch| base.plane(ch)[i]);
        let out = match cache {
            Some((k, v)) if k == codes => v,
            _ => {
                let v = predict_pixel(codes, max_code, params);
                cache = Some((codes, v));
                v
            }
        };
        for ch in 0..3 {
            planes[ch][i] = out[ch];
        }
    }
    HdrImage::new(base.width(), base.height(), planes).expect("prediction yields valid half codes")
}

fn predict_pixel(codes: [u16; 3], max_code: f64, params: &TmoParams) -> [u16; 3] {
    let c = codes.map(|s| libm::pow(s as f64 / max_code, params.gamma));
    let ld = luma(c);
    if ld <= 0.0 {
        return [0; 3];
    }
    let l = inverse_luminance(ld, params);
    if !(l.is_finite() && l > 0.0) {
        return [0; 3];
    }
    c.map(|ch| half_encode(ch / ld * l).unwrap_or(0))
}

/// World luminance whose global tone curve output is `ld`.
pub(crate) fn inverse_luminance(ld: f64, params: &TmoParams) -> f64 {
    match params.kind {
        TmoKind::Drago => inverse_drago(ld, params),
        kind => {
            let ld = ld.min(LD_CEILING);
            let ls = if kind == TmoKind::ReinhardGlobal && params.l_white.is_finite() {
                // root of Ls^2 / Lw^2 + (1 - Ld) Ls - Ld = 0
                let w2 = params.l_white * params.l_white;
                let b = 1.0 - ld;
                (libm::sqrt(b * b + 4.0 * ld / w2) - b) * w2 / 2.0
            } else {
                ld / (1.0 - ld)
            };
            ls * params.log_avg / params.effective_key()
        }
    }
}

/// The logarithmic curve has no closed-form inverse; bisection over
/// `[0, l_max]` with a fixed step count keeps it deterministic.
fn inverse_drago(ld: f64, params: &TmoParams) -> f64 {
    let (mut lo, mut hi) = (0.0, params.l_max);
    if ld >= drago(hi, params) {
        return hi;
    }
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if drago(mid, params) < ld {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
