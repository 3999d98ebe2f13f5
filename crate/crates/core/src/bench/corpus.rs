//! Deterministic synthetic HDR scenes.

use crate::imagio::{decode_unchecked, half_encode, HdrImage, HALF_MAX_CODE};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const SEED_ENV: &str = "HDR2L_SEED";
pub const DEFAULT_SEED: u64 = 0x4844_5232;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SceneKind {
    /// Smooth exponential ramps over several decades.
    Gradient,
    /// Piecewise regions dithered between a few widely spaced exponents.
    Sparse,
    /// Log-normal texture.
    Noise,
}

impl SceneKind {
    pub const ALL: [SceneKind; 3] = [SceneKind::Gradient, SceneKind::Sparse, SceneKind::Noise];

    pub fn name(self) -> &'static str {
        match self {
            SceneKind::Gradient => "gradient",
            SceneKind::Sparse => "sparse",
            SceneKind::Noise => "noise",
        }
    }
}

/// Seed from `HDR2L_SEED`, falling back to a fixed default.
pub fn corpus_seed() -> u64 {
    std::env::var(SEED_ENV)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_SEED)
}

fn scene_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

pub fn generate(kind: SceneKind, width: usize, height: usize, seed: u64, index: usize) -> HdrImage {
    let mut rng = scene_rng(seed, index);
    let rgb = match kind {
        SceneKind::Gradient => gradient(&mut rng, width, height),
        SceneKind::Sparse => sparse(&mut rng, width, height),
        SceneKind::Noise => noise(&mut rng, width, height),
    };
    HdrImage::from_linear(width, height, &rgb)
        .expect("synthetic samples are finite and non-negative")
}

/// Mixed corpus cycling through every scene kind.
pub fn synthetic_corpus(count: usize, size: usize, seed: u64) -> Vec<(String, HdrImage)> {
    (0..count)
        .map(|i| {
            let kind = SceneKind::ALL[i % SceneKind::ALL.len()];
            (
                format!("synth-{i:03}-{}", kind.name()),
                generate(kind, size, size, seed, i),
            )
        })
        .collect()
}

/// Corpus of sparse-histogram scenes only.
pub fn sparse_corpus(count: usize, size: usize, seed: u64) -> Vec<(String, HdrImage)> {
    (0..count)
        .map(|i| {
            (
                format!("sparse-{i:03}"),
                generate(SceneKind::Sparse, size, size, seed, i),
            )
        })
        .collect()
}

fn tint<R: Rng>(rng: &mut R) -> [f64; 3] {
    [
        rng.gen_range(0.4..1.6),
        rng.gen_range(0.6..1.4),
        rng.gen_range(0.4..1.6),
    ]
}

fn gradient<R: Rng>(rng: &mut R, w: usize, h: usize) -> Vec<f64> {
    let base = rng.gen_range(-3.0..0.0);
    let (dx, dy) = (rng.gen_range(1.0..4.0), rng.gen_range(-1.5..1.5));
    let t = tint(rng);
    let mut out = Vec::with_capacity(w * h * 3);
    for y in 0..h {
        for x in 0..w {
            let e = base + dx * x as f64 / w as f64 + dy * y as f64 / h as f64;
            let l = 10f64.powf(e);
            out.extend(t.iter().map(|c| c * l));
        }
    }
    out
}

/// Deep-shadow floor dithered among a few tiny exponents, overlaid with
/// bright rectangles dithered by small steps in half-code space.
fn sparse<R: Rng>(rng: &mut R, w: usize, h: usize) -> Vec<f64> {
    let floor: Vec<[f64; 3]> = (0..4)
        .map(|_| {
            let l = 2f64.powi(rng.gen_range(-24..-16));
            let t = tint(rng);
            [t[0] * l, t[1] * l, t[2] * l]
        })
        .collect();
    let patches: Vec<Patch> = (0..rng.gen_range(3..7))
        .map(|_| Patch::random(rng, w, h))
        .collect();
    let mut out = Vec::with_capacity(w * h * 3);
    for y in 0..h {
        for x in 0..w {
            match patches.iter().rev().find(|p| p.contains(x, y)) {
                Some(p) => {
                    let k = rng.gen_range(0..p.levels);
                    out.extend(
                        p.codes
                            .iter()
                            .map(|&c| decode_unchecked((c + k * PATCH_STEP).min(HALF_MAX_CODE))),
                    );
                }
                None => out.extend_from_slice(&floor[rng.gen_range(0..floor.len())]),
            }
        }
    }
    out
}

const PATCH_STEP: u16 = 4;

struct Patch {
    x: usize,
    y: usize,
    w: usize,
    h: usize,
    codes: [u16; 3],
    levels: u16,
}

impl Patch {
    fn random<R: Rng>(rng: &mut R, w: usize, h: usize) -> Self {
        let pw = rng.gen_range((w / 6).max(1)..(w / 2).max(2));
        let ph = rng.gen_range((h / 6).max(1)..(h / 2).max(2));
        let l = 2f64.powf(rng.gen_range(-2.0..8.0));
        let t = tint(rng);
        Patch {
            x: rng.gen_range(0..=w.saturating_sub(pw)),
            y: rng.gen_range(0..=h.saturating_sub(ph)),
            w: pw,
            h: ph,
            codes: t.map(|c| half_encode(c * l).expect("finite")),
            levels: rng.gen_range(2..5),
        }
    }

    fn contains(&self, x: usize, y: usize) -> bool {
        x >= self.x && x < self.x + self.w && y >= self.y && y < self.y + self.h
    }
}

fn noise<R: Rng>(rng: &mut R, w: usize, h: usize) -> Vec<f64> {
    let base = rng.gen_range(-2.0f64..1.0);
    let spread = rng.gen_range(0.5..2.0);
    let t = tint(rng);
    let mut out = Vec::with_capacity(w * h * 3);
    for _ in 0..w * h {
        let g: f64 = (0..4).map(|_| rng.gen_range(-1.0..1.0)).sum::<f64>() / 2.0;
        let l = 10f64.powf(base + spread * g);
        out.extend(t.iter().map(|c| c * l));
    }
    out
}
