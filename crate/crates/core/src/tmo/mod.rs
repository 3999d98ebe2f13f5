//! Tone-mapping operators and the inverse map used for HDR prediction.
//!
//! Four operators are provided: the global photographic operator with a fixed
//! key of 0.18 (`Default`), the same operator with configurable key and
//! white point (`ReinhardGlobal`), its local dodging-and-burning variant
//! (`ReinhardLocal`) and adaptive logarithmic mapping (`Drago`).
//!
//! All image statistics an operator depends on (log-average and maximum
//! luminance) are stored in [`TmoParams`] so the decoder can evaluate the
//! inverse map from the serialized parameters alone.

mod local;
mod predict;

pub use self::predict::predict_hdr;

use crate::error::{Error, Result};
use crate::imagio::{luminance, max_sample, HdrImage, LdrImage};
use serde::{Deserialize, Serialize};

/// Offset inside the logarithm of the log-average luminance.
pub const LOG_AVG_DELTA: f64 = 1e-6;

/// Size of [`TmoParams::to_bytes`].
pub const PARAMS_LEN: usize = 1 + 9 * 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
#[repr(u8)]
pub enum TmoKind {
    Default = 0,
    ReinhardGlobal = 1,
    ReinhardLocal = 2,
    Drago = 3,
}

impl TmoKind {
    pub const ALL: [TmoKind; 4] = [
        TmoKind::Default,
        TmoKind::ReinhardGlobal,
        TmoKind::ReinhardLocal,
        TmoKind::Drago,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TmoKind::Default => "default",
            TmoKind::ReinhardGlobal => "reinhard-global",
            TmoKind::ReinhardLocal => "reinhard-local",
            TmoKind::Drago => "drago",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }

    fn from_u8(v: u8) -> Option<Self> {
        Self::ALL.get(v as usize).copied()
    }
}

impl std::fmt::Display for TmoKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TmoParams {
    pub kind: TmoKind,
    /// Photographic key; `Default` always uses 0.18.
    pub key_a: f64,
    /// Burn-out luminance; infinite disables it.
    pub l_white: f64,
    pub bias: f64,
    pub ldmax: f64,
    pub local_scales: u32,
    pub local_threshold: f64,
    pub log_avg: f64,
    pub gamma: f64,
    /// Maximum source luminance, needed by the logarithmic operator.
    pub l_max: f64,
}

impl TmoParams {
    /// Parameters with default constants and neutral image statistics.
    pub fn new(kind: TmoKind) -> Self {
        Self {
            kind,
            key_a: 0.18,
            l_white: f64::INFINITY,
            bias: 0.85,
            ldmax: 100.0,
            local_scales: 8,
            local_threshold: 0.05,
            log_avg: 1.0,
            gamma: 2.2,
            l_max: 1.0,
        }
    }

    /// Default parameters with statistics measured on `image`.
    pub fn fitted(kind: TmoKind, image: &HdrImage) -> Self {
        Self::new(kind).with_image_stats(image)
    }

    pub fn with_image_stats(mut self, image: &HdrImage) -> Self {
        let lum = luminance(image);
        self.log_avg = log_average_luminance(&lum);
        let max = lum.iter().copied().fold(0.0, f64::max);
        self.l_max = if max > 0.0 { max } else { 1.0 };
        self
    }

    pub(crate) fn effective_key(&self) -> f64 {
        match self.kind {
            TmoKind::Default => 0.18,
            _ => self.key_a,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let checks = [
            (
                self.key_a > 0.0 && self.key_a.is_finite(),
                "key_a must be positive",
            ),
            (self.l_white > 0.0, "l_white must be positive"),
            (
                self.bias > 0.0 && self.bias <= 1.0,
                "bias must be in (0, 1]",
            ),
            (
                self.ldmax > 0.0 && self.ldmax.is_finite(),
                "ldmax must be positive",
            ),
            (
                self.local_scales >= 1 && self.local_scales <= 16,
                "local_scales must be 1..=16",
            ),
            (
                self.local_threshold > 0.0,
                "local_threshold must be positive",
            ),
            (
                self.log_avg > 0.0 && self.log_avg.is_finite(),
                "log_avg must be positive",
            ),
            (
                self.gamma > 0.0 && self.gamma.is_finite(),
                "gamma must be positive",
            ),
            (
                self.l_max > 0.0 && self.l_max.is_finite(),
                "l_max must be positive",
            ),
        ];
        match checks.iter().find(|(ok, _)| !ok) {
            Some((_, msg)) => Err(Error::Param((*msg).into())),
            None => Ok(()),
        }
    }

    /// Kind byte followed by nine little-endian `f64` bit patterns.
    pub fn to_bytes(&self) -> [u8; PARAMS_LEN] {
        let mut out = [0u8; PARAMS_LEN];
        out[0] = self.kind as u8;
        for (i, v) in self.fields().iter().enumerate() {
            out[1 + i * 8..9 + i * 8].copy_from_slice(&v.to_bits().to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() != PARAMS_LEN {
            return Err(Error::parse(
                0,
                format!("TMO block must be {PARAMS_LEN} bytes"),
            ));
        }
        let kind = TmoKind::from_u8(bytes[0])
            .ok_or_else(|| Error::parse(0, format!("unknown TMO kind {}", bytes[0])))?;
        let f = |i: usize| {
            let mut raw = [0u8; 8];
            raw.copy_from_slice(&bytes[1 + i * 8..9 + i * 8]);
            f64::from_bits(u64::from_le_bytes(raw))
        };
        let scales = f(4);
        if scales.fract() != 0.0 || !(0.0..=u32::MAX as f64).contains(&scales) {
            return Err(Error::parse(33, "local_scales is not an integer"));
        }
        let params = Self {
            kind,
            key_a: f(0),
            l_white: f(1),
            bias: f(2),
            ldmax: f(3),
            local_scales: scales as u32,
            local_threshold: f(5),
            log_avg: f(6),
            gamma: f(7),
            l_max: f(8),
        };
        params.validate()?;
        Ok(params)
    }

    fn fields(&self) -> [f64; 9] {
        [
            self.key_a,
            self.l_white,
            self.bias,
            self.ldmax,
            self.local_scales as f64,
            self.local_threshold,
            self.log_avg,
            self.gamma,
            self.l_max,
        ]
    }
}

/// Geometric mean of `delta + L` over the map.
pub fn log_average_luminance(lum: &[f64]) -> f64 {
    if lum.is_empty() {
        return 1.0;
    }
    let sum: f64 = lum.iter().map(|&l| (LOG_AVG_DELTA + l).ln()).sum();
    (sum / lum.len() as f64).exp()
}

/// Photographic curve `Ls (1 + Ls / Lw^2) / (1 + Ls)`.
#[inline]
pub(crate) fn photographic(ls: f64, l_white: f64) -> f64 {
    if l_white.is_finite() {
        ls * (1.0 + ls / (l_white * l_white)) / (1.0 + ls)
    } else {
        ls / (1.0 + ls)
    }
}

/// Adaptive logarithmic curve. Evaluated with `libm` so the encoder and any
/// decoder agree bit for bit.
#[inline]
pub(crate) fn drago(l: f64, params: &TmoParams) -> f64 {
    let exponent = libm::log(params.bias) / libm::log(0.5);
    let denom = libm::log(2.0 + 8.0 * libm::pow(l / params.l_max, exponent));
    (params.ldmax / 100.0) * libm::log1p(l) / libm::log10(1.0 + params.l_max) / denom
}

/// Tone maps to a `8 + refine_bits` bit image.
pub fn tonemap(image: &HdrImage, params: &TmoParams, refine_bits: u8) -> Result<LdrImage> {
    params.validate()?;
    if refine_bits > 8 {
        return Err(Error::Param(format!("refinement bits {refine_bits} > 8")));
    }
    let bit_depth = 8 + refine_bits;
    let max_code = max_sample(bit_depth) as f64;
    let key = params.effective_key();
    let lum = luminance(image);
    let scaled: Vec<f64> = lum.iter().map(|&l| key * l / params.log_avg).collect();

    let display: Vec<f64> = match params.kind {
        TmoKind::Default => scaled
            .iter()
            .map(|&ls| photographic(ls, f64::INFINITY))
            .collect(),
        TmoKind::ReinhardGlobal => scaled
            .iter()
            .map(|&ls| photographic(ls, params.l_white))
            .collect(),
        TmoKind::ReinhardLocal => {
            let adapt = local::adaptation_luminance(&scaled, image.width(), image.height(), params);
            scaled
                .iter()
                .zip(&adapt)
                .map(|(&ls, &v)| ls / (1.0 + v))
                .collect()
        }
        TmoKind::Drago => lum.iter().map(|&l| drago(l, params)).collect(),
    };

    let inv_gamma = 1.0 / params.gamma;
    let n = image.pixel_count();
    let mut planes: [Vec<u16>; 3] = [vec![0; n], vec![0; n], vec![0; n]];
    for i in 0..n {
        let l = lum[i];
        if l <= 0.0 {
            continue;
        }
        let ld = display[i];
        if !ld.is_finite() {
            return Err(Error::Internal(format!(
                "non-finite display luminance at pixel {i}"
            )));
        }
        let rgb = image.linear(i);
        for c in 0..3 {
            let v = (rgb[c] / l * ld).powf(inv_gamma) * max_code;
            if v.is_nan() {
                return Err(Error::Internal(format!("NaN output at pixel {i}")));
            }
            planes[c][i] = v.round().clamp(0.0, max_code) as u16;
        }
    }
    LdrImage::new(image.width(), image.height(), bit_depth, planes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gray(w: usize, h: usize, v: f64) -> HdrImage {
        HdrImage::from_linear(w, h, &vec![v; w * h * 3]).unwrap()
    }

    #[test]
    fn log_average_examples() {
        assert!((log_average_luminance(&[1.0; 16]) - 1.000001).abs() < 1e-9);
        let v = 0.37;
        assert!((log_average_luminance(&[v; 9]) - (v + LOG_AVG_DELTA)).abs() < 1e-9);
        // geometric mean of 1 and e^2 is e (delta shifts it by ~1e-6)
        let e = std::f64::consts::E;
        assert!((log_average_luminance(&[1.0, e * e]) - e).abs() < 1e-5);
    }

    #[test]
    fn photographic_examples() {
        assert_eq!(photographic(1.0, f64::INFINITY), 0.5);
        // burn-out at Ls == Lw maps to exactly 1
        assert!((photographic(3.0, 3.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn drago_zero_and_max() {
        let p = TmoParams {
            l_max: 50.0,
            ..TmoParams::new(TmoKind::Drago)
        };
        assert_eq!(drago(0.0, &p), 0.0);
        assert!((drago(50.0, &p) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn default_uniform_gray_oracle() {
        let img = gray(4, 4, 2.0);
        let p = TmoParams::fitted(TmoKind::Default, &img);
        let out = tonemap(&img, &p, 0).unwrap();
        // scalar pipeline: Ls = 0.18 * L / (L + delta), Ld = Ls / (1 + Ls)
        let l = 0.2126 * 2.0 + 0.7152 * 2.0 + 0.0722 * 2.0;
        let ls = 0.18 * l / (l + LOG_AVG_DELTA);
        let ld = ls / (1.0 + ls);
        assert!((ld - 0.15254).abs() < 1e-5);
        let expected = ((ld).powf(1.0 / 2.2) * 255.0).round() as u16;
        for c in 0..3 {
            assert!(out.plane(c).iter().all(|&s| s == expected));
        }
        // key_a is ignored by Default
        let p2 = TmoParams { key_a: 0.5, ..p };
        assert_eq!(tonemap(&img, &p2, 0).unwrap(), out);
    }

    #[test]
    fn reinhard_global_unit_scaled_luminance() {
        // log_avg chosen so that Ls == 1 at L == 1
        let img = gray(1, 1, 1.0);
        let p = TmoParams {
            log_avg: 0.18,
            ..TmoParams::new(TmoKind::ReinhardGlobal)
        };
        let out = tonemap(&img, &p, 4).unwrap();
        let expected = (0.5f64.powf(1.0 / 2.2) * 4095.0).round() as u16;
        assert_eq!(out.plane(1), &[expected]);
        assert_eq!(out.bit_depth(), 12);
    }

    #[test]
    fn black_pixels_map_to_zero() {
        for kind in TmoKind::ALL {
            let mut data = vec![0.0; 4 * 3];
            data[0..3].copy_from_slice(&[5.0, 1.0, 0.5]);
            let img = HdrImage::from_linear(2, 2, &data).unwrap();
            let p = TmoParams::fitted(kind, &img);
            let out = tonemap(&img, &p, 0).unwrap();
            for c in 0..3 {
                assert_eq!(&out.plane(c)[1..], &[0, 0, 0], "{kind}");
            }
        }
    }

    #[test]
    fn global_operators_monotone_on_gray_ramp() {
        let values: Vec<f64> = (0..200).map(|i| 1e-3 * 1.07f64.powi(i)).collect();
        let data: Vec<f64> = values.iter().flat_map(|&v| [v, v, v]).collect();
        let img = HdrImage::from_linear(values.len(), 1, &data).unwrap();
        for kind in [TmoKind::Default, TmoKind::ReinhardGlobal, TmoKind::Drago] {
            for bits in [0, 4] {
                let out = tonemap(&img, &TmoParams::fitted(kind, &img), bits).unwrap();
                let g = out.plane(1);
                assert!(g.windows(2).all(|w| w[0] <= w[1]), "{kind} R={bits}");
                assert!(g.iter().all(|&s| s <= max_sample(8 + bits)));
            }
        }
    }

    #[test]
    fn params_serialization() {
        let img = gray(3, 3, 0.7);
        for kind in TmoKind::ALL {
            let p = TmoParams::fitted(kind, &img);
            let bytes = p.to_bytes();
            assert_eq!(bytes[0], kind as u8);
            assert_eq!(TmoParams::from_bytes(&bytes).unwrap(), p);
        }
        let mut bad = TmoParams::new(TmoKind::Drago).to_bytes();
        bad[0] = 9;
        assert!(TmoParams::from_bytes(&bad).is_err());
        assert!(TmoParams::from_bytes(&bad[..10]).is_err());
        let zero_key = TmoParams {
            key_a: 0.0,
            ..TmoParams::new(TmoKind::ReinhardGlobal)
        };
        assert!(TmoParams::from_bytes(&zero_key.to_bytes()).is_err());
    }

    #[test]
    fn kind_names() {
        for k in TmoKind::ALL {
            assert_eq!(TmoKind::from_name(k.name()), Some(k));
        }
        assert_eq!(TmoKind::from_name("icam"), None);
    }
}
