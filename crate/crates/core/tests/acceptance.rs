//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.
//!
//! Set `HDR2L_REAL_DIR` to a directory of .hdr/.pfm files to add the
//! real-image bitrate comparison.

#![allow(clippy::needless_range_loop)]

use std::process::ExitCode;

use hdr2l_core::basejpeg::{decode_base, fdct, idct, read_jpeg};
use hdr2l_core::bench::{self, corpus, GridConfig, GridReport};
use hdr2l_core::bitio::{BitReader, BitWriter};
use hdr2l_core::container::{self, CodecParams, Mode};
use hdr2l_core::hpack::{build_table, pack, serialize_table};
use hdr2l_core::imagio::{half_decode, half_encode, HdrImage, VALID_CODE_COUNT};
use hdr2l_core::rescodec::{
    code_plane, color_transform_fwd, color_transform_inv, decode_plane, forward_pixel,
    inverse_pixel,
};
use hdr2l_core::rice::AdaptiveRice;
use hdr2l_core::tmo::{tonemap, TmoKind, TmoParams};
use hdr2l_core::tmqi::{boxstats, combine, normalized_hdr_luminance, tmqi, tmqi_luma};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    id: &'static str,
    name: &'static str,
    pass: bool,
    detail: String,
}

fn outcome(id: &'static str, name: &'static str, pass: bool, detail: String) -> Outcome {
    Outcome {
        id,
        name,
        pass,
        detail,
    }
}

const QUALITIES: [u8; 2] = [80, 90];
const CODERS: [(Mode, u8); 3] = [(Mode::Hp, 0), (Mode::Xt, 0), (Mode::Xt, 4)];

fn lossless_grid() -> Outcome {
    let seed = corpus::corpus_seed();
    let mut images = corpus::synthetic_corpus(20, 64, seed);
    for (i, kind) in corpus::SceneKind::ALL.into_iter().enumerate() {
        images.push((
            format!("odd-{i}"),
            corpus::generate(kind, 67, 45, seed, 100 + i),
        ));
    }
    let mut cells = 0;
    let mut failures = Vec::new();
    for (id, img) in &images {
        for kind in TmoKind::ALL {
            for q in QUALITIES {
                for (mode, r) in CODERS {
                    cells += 1;
                    let params = CodecParams::new(mode, kind, q, r).expect("valid grid parameters");
                    let ok = container::encode(img, &params)
                        .and_then(|s| container::decode(&s))
                        .is_ok_and(|d| &d == img);
                    if !ok {
                        failures.push(format!("{id}/{kind}/q{q}/{mode}/R{r}"));
                    }
                }
            }
        }
    }
    outcome(
        "1",
        "losslessness",
        failures.is_empty(),
        format!(
            "{} images, {}/{} cells bit-exact{}",
            images.len(),
            cells - failures.len(),
            cells,
            if failures.is_empty() {
                String::new()
            } else {
                format!("; failed: {}", failures.join(", "))
            }
        ),
    )
}

fn hp_beats_xt(report: &GridReport) -> (bool, Vec<String>) {
    let mut ok = true;
    let mut rows = Vec::new();
    for kind in TmoKind::ALL {
        for q in QUALITIES {
            let hp = report.mean_bpp(kind, Mode::Hp, q, 0).unwrap_or(f64::NAN);
            let x0 = report.mean_bpp(kind, Mode::Xt, q, 0).unwrap_or(f64::NAN);
            let x4 = report.mean_bpp(kind, Mode::Xt, q, 4).unwrap_or(f64::NAN);
            let cell = hp < x0 && hp < x4;
            ok &= cell;
            rows.push(format!(
                "{kind}/q{q}: hp {hp:.3} xt0 {x0:.3} xt4 {x4:.3}{}",
                if cell { "" } else { " <-- violated" }
            ));
        }
    }
    (ok, rows)
}

fn bitrate_direction(report: &GridReport) -> Vec<Outcome> {
    let mut out = Vec::new();
    let (ok, rows) = hp_beats_xt(report);
    out.push(outcome(
        "2",
        "HP below XT(R=0) and XT(R=4) per TMO and q, sparse corpus",
        ok && report.all_lossless(),
        rows.join("; "),
    ));

    if let Ok(dir) = std::env::var("HDR2L_REAL_DIR") {
        let real = GridConfig {
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            ..GridConfig::default()
        };
        match bench::run_grid_dir(std::path::Path::new(&dir), &real) {
            Ok(r) => {
                let (ok, rows) = hp_beats_xt(&r);
                out.push(outcome(
                    "2",
                    "HP below XT per TMO and q, real set",
                    ok,
                    rows.join("; "),
                ));
            }
            Err(e) => out.push(outcome("2", "HP below XT, real set", false, e.to_string())),
        }
    } else {
        println!("[INFO] 2  real HDR set not supplied (HDR2L_REAL_DIR unset)");
    }

    let hp = report.spread(Mode::Hp, 0, None).map_or(f64::NAN, |s| s.cv);
    let xt = report.spread(Mode::Xt, 0, None).map_or(f64::NAN, |s| s.cv);
    out.push(outcome(
        "3",
        "cross-TMO CV of mean bpp smaller for HP than XT(R=0)",
        hp < xt,
        format!("cv hp {hp:.5}, cv xt0 {xt:.5}"),
    ));
    out
}

fn packing_mechanism() -> Outcome {
    let (w, h) = (128usize, 128usize);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let sparse: Vec<u16> = (0..w * h)
        .map(|i| {
            let (x, y) = (i % w, i / w);
            let idx = (2 * x + y + rng.gen_range(0..4)) % 256;
            (idx * 256) as u16
        })
        .collect();
    let mut walk = 30000i32;
    let dense: Vec<u16> = (0..w * h)
        .map(|_| {
            walk = (walk + rng.gen_range(-40..=40)).clamp(0, 65535);
            walk as u16
        })
        .collect();

    let measure = |plane: &[u16]| {
        let table = build_table(plane).unwrap();
        let packed = pack(plane, &table).unwrap();
        let packed_payload = code_plane(&packed, w).len();
        let raw_payload = code_plane(plane, w).len();
        (
            packed_payload,
            raw_payload,
            serialize_table(&table).len(),
            table.len(),
        )
    };
    let (sp, su, _, sk) = measure(&sparse);
    let (dp, du, dt, dk) = measure(&dense);
    let dense_bound = du as f64 + dt as f64 + 0.01 * du as f64;
    outcome(
        "4",
        "packing shrinks sparse planes and is bounded on dense planes",
        sp < su && (dp as f64) <= dense_bound,
        format!(
            "sparse (K={sk}): packed {sp} B < unpacked {su} B; dense (K={dk}): packed {dp} B <= unpacked {du} B + table {dt} B + 1%"
        ),
    )
}

fn dct_matrix_oracle(block: &[f64; 64]) -> [f64; 64] {
    let mut m = [[0.0f64; 8]; 8];
    for (u, row) in m.iter_mut().enumerate() {
        let scale = if u == 0 {
            (1.0f64 / 8.0).sqrt()
        } else {
            (2.0f64 / 8.0).sqrt()
        };
        for (i, v) in row.iter_mut().enumerate() {
            *v = scale * (((2 * i + 1) * u) as f64 * std::f64::consts::PI / 16.0).cos();
        }
    }
    // M · X · Mᵀ
    let mut tmp = [[0.0f64; 8]; 8];
    for u in 0..8 {
        for j in 0..8 {
            tmp[u][j] = (0..8).map(|i| m[u][i] * block[i * 8 + j]).sum();
        }
    }
    let mut out = [0.0f64; 64];
    for u in 0..8 {
        for v in 0..8 {
            out[u * 8 + v] = (0..8).map(|j| tmp[u][j] * m[v][j]).sum();
        }
    }
    out
}

fn half_field_oracle(code: u16) -> f64 {
    let exp = (code >> 10) as i32;
    let mant = (code & 0x3FF) as f64;
    if exp == 0 {
        mant * 2f64.powi(-24)
    } else {
        (1.0 + mant / 1024.0) * 2f64.powi(exp - 15)
    }
}

fn oracles() -> Vec<Outcome> {
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(5);

    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let mut block = [0.0f64; 64];
        for v in block.iter_mut() {
            *v = rng.gen_range(-128.0..128.0);
        }
        let a = fdct(&block);
        let b = dct_matrix_oracle(&block);
        for k in 0..64 {
            worst = worst.max((a[k] - b[k]).abs());
        }
    }
    out.push(outcome(
        "5a",
        "forward DCT vs matrix oracle, 1000 blocks",
        worst <= 1e-9,
        format!("max |diff| {worst:.3e} (tol 1e-9)"),
    ));

    let mut bad = 0usize;
    for code in 0..VALID_CODE_COUNT as u16 {
        let v = half_field_oracle(code);
        let dec_ok = half_decode(code).is_ok_and(|d| d == v);
        let enc_ok = half_encode(v).is_ok_and(|c| c == code);
        if !(dec_ok && enc_ok) {
            bad += 1;
        }
    }
    out.push(outcome(
        "5b",
        "half round trip over every valid code",
        bad == 0,
        format!("{} codes, {bad} mismatches", VALID_CODE_COUNT),
    ));

    let mut bad = 0usize;
    let n = 1_000_000usize;
    for _ in 0..n {
        let (r, g, b) = (rng.gen::<u16>(), rng.gen::<u16>(), rng.gen::<u16>());
        let [y, cb, cr] = forward_pixel(r, g, b);
        if inverse_pixel(y, cb, cr) != [r, g, b] {
            bad += 1;
        }
    }
    let planes = [0, 1, 2].map(|_| (0..4096).map(|_| rng.gen::<u16>()).collect::<Vec<u16>>());
    let plane_ok = color_transform_inv(&color_transform_fwd(&planes)) == planes;
    out.push(outcome(
        "5c",
        "RCT inverse identity, 10^6 random triples",
        bad == 0 && plane_ok,
        format!("{n} triples, {bad} mismatches; plane round trip {plane_ok}"),
    ));

    out.push(rice_round_trips(&mut rng));
    out
}

fn rice_round_trips(rng: &mut ChaCha8Rng) -> Outcome {
    let mut cases: Vec<(String, usize, Vec<u16>)> = Vec::new();
    for i in 0..20 {
        let w = rng.gen_range(1..80);
        let h = rng.gen_range(1..80);
        let spread: u16 = [1, 16, 300, 65535][i % 4];
        let plane = (0..w * h).map(|_| rng.gen_range(0..=spread)).collect();
        cases.push((format!("random{i}"), w, plane));
    }
    let (w, h) = (64usize, 48usize);
    cases.push(("all-max".into(), w, vec![u16::MAX; w * h]));
    cases.push(("all-zero".into(), w, vec![0; w * h]));
    cases.push((
        "checker-0-ffff".into(),
        w,
        (0..w * h)
            .map(|i| if (i % w + i / w) % 2 == 0 { 0 } else { 0xFFFF })
            .collect(),
    ));
    cases.push((
        "alternating-0x8000".into(),
        w,
        (0..w * h)
            .map(|i| if i % 2 == 0 { 0x8000 } else { 0x7FFF })
            .collect(),
    ));
    cases.push((
        "spikes".into(),
        w,
        (0..w * h)
            .map(|i| if i % 97 == 0 { 0xFFFF } else { 1 })
            .collect(),
    ));
    cases.push(("single-pixel".into(), 1, vec![0xBEEF]));
    cases.push((
        "row".into(),
        500,
        (0..500).map(|i| (i * 131) as u16).collect(),
    ));
    cases.push((
        "column".into(),
        1,
        (0..500).map(|i| (i * 257) as u16).collect(),
    ));

    let mut failures = Vec::new();
    for (name, width, plane) in &cases {
        let height = plane.len() / width;
        let ok =
            decode_plane(&code_plane(plane, *width), *width, height).is_ok_and(|d| &d == plane);
        if !ok {
            failures.push(name.clone());
        }
    }

    // the bare adaptive coder, including escape-sized values after a run of zeros
    let mut seq: Vec<u16> = (0..5000).map(|_| rng.gen()).collect();
    seq.extend(std::iter::repeat_n(0, 300));
    seq.extend([u16::MAX, 0, u16::MAX, 1, 0xFFFE]);
    let mut w = BitWriter::new();
    let mut enc = AdaptiveRice::new();
    for &v in &seq {
        enc.encode(&mut w, v);
    }
    let bytes = w.finish();
    let mut r = BitReader::new(&bytes);
    let mut dec = AdaptiveRice::new();
    let seq_ok = seq
        .iter()
        .all(|&v| dec.decode(&mut r).is_ok_and(|d| d == v));
    if !seq_ok {
        failures.push("raw-sequence".into());
    }

    outcome(
        "5d",
        "Rice coder round trip, randomized and adversarial",
        failures.is_empty(),
        format!(
            "{} planes + 1 raw sequence; failures: {:?}",
            cases.len(),
            failures
        ),
    )
}

fn boxstats_examples() -> Outcome {
    let a = boxstats(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
    let first = a.median == 3.0
        && a.q1 == 1.5
        && a.q3 == 4.5
        && a.whisker_lo == 1.0
        && a.whisker_hi == 5.0
        && a.outliers.is_empty();
    let b = boxstats(&[1.0, 2.0, 3.0, 4.0, 100.0]).unwrap();
    let second = b.outliers == vec![100.0];
    outcome(
        "5e",
        "boxstats worked examples",
        first && second,
        format!(
            "[1..5]: q1 {} median {} q3 {} whiskers {}..{} outliers {:?} ({}); [1,2,3,4,100]: q1 {} q3 {} upper fence {} outliers {:?} (expected [100])",
            a.q1,
            a.median,
            a.q3,
            a.whisker_lo,
            a.whisker_hi,
            a.outliers,
            if first { "ok" } else { "mismatch" },
            b.q1,
            b.q3,
            b.q3 + 1.5 * (b.q3 - b.q1),
            b.outliers
        ),
    )
}

fn tmqi_sanity(images: &[(String, HdrImage)]) -> Outcome {
    let mut min_identity = f64::INFINITY;
    let mut in_range = true;
    let mut scored = 0;
    for (_, img) in images {
        if let Ok(norm) = normalized_hdr_luminance(img) {
            let s = tmqi_luma(&norm, &norm, img.width(), img.height()).unwrap();
            min_identity = min_identity.min(s.s_structural);
        }
        for kind in TmoKind::ALL {
            let ldr = tonemap(img, &TmoParams::fitted(kind, img), 0).unwrap();
            if let Ok(s) = tmqi(img, &ldr) {
                scored += 1;
                let all = [s.q_overall, s.s_structural, s.n_naturalness]
                    .into_iter()
                    .chain(s.per_scale_s.iter().copied());
                in_range &= all.clone().all(|v| (0.0..=1.0).contains(&v));
            }
        }
    }

    let grid: Vec<f64> = (0..10).map(|i| i as f64 / 9.0).collect();
    let mut monotone = true;
    for &s in &grid {
        for w in grid.windows(2) {
            monotone &= combine(s, w[1]) >= combine(s, w[0]);
            monotone &= combine(w[1], s) >= combine(w[0], s);
        }
    }
    outcome(
        "6",
        "TMQI identity, monotonicity and range",
        min_identity >= 0.999 && monotone && in_range && scored > 0,
        format!("min identity S {min_identity:.9}; monotone on 10x10 grid {monotone}; {scored} scores all in [0,1] {in_range}"),
    )
}

/// Largest difference between our level-shifted IDCT output and the
/// independent decoder's untransformed component samples.
fn component_delta(jpeg: &[u8]) -> Option<u16> {
    let coeffs = read_jpeg(jpeg).ok()?;
    let mut dec = jpeg_decoder::Decoder::new(jpeg);
    dec.set_color_transform(jpeg_decoder::ColorTransform::None);
    let theirs = dec.decode().ok()?;
    let (w, h) = (coeffs.width, coeffs.height);
    let bw = w.div_ceil(8);
    let mut worst = 0u16;
    for c in 0..3 {
        let qt = coeffs.tables.natural(c);
        for (b, block) in coeffs.blocks[c].iter().enumerate() {
            let mut deq = [0.0; 64];
            for k in 0..64 {
                deq[k] = block[k] as f64 * qt[k] as f64;
            }
            let spatial = idct(&deq);
            for y in 0..8 {
                for x in 0..8 {
                    let (px, py) = ((b % bw) * 8 + x, (b / bw) * 8 + y);
                    if px < w && py < h {
                        let ours = (spatial[y * 8 + x] + 128.0).round().clamp(0.0, 255.0) as u16;
                        // untransformed output is planar per row
                        worst = worst.max(ours.abs_diff(theirs[py * w * 3 + c * w + px] as u16));
                    }
                }
            }
        }
    }
    Some(worst)
}

fn backward_compat() -> Outcome {
    let seed = corpus::corpus_seed();
    let images = corpus::synthetic_corpus(10, 48, seed);
    let mut worst = 0u16;
    let mut worst_component = 0u16;
    let mut over_one = 0usize;
    let mut samples = 0usize;
    let mut failures = Vec::new();
    for (i, (id, img)) in images.iter().enumerate() {
        let kind = TmoKind::ALL[i % 4];
        let (mode, r) = CODERS[i % 3];
        let params = CodecParams::new(mode, kind, QUALITIES[i % 2], r).unwrap();
        let stream = container::encode(img, &params).unwrap();
        let jpeg = container::extract_ldr(&stream).unwrap();
        let ours = decode_base(&jpeg).unwrap();
        let mut dec = jpeg_decoder::Decoder::new(&jpeg[..]);
        match dec.decode() {
            Ok(pixels) => {
                let info = dec.info().unwrap();
                if info.width as usize != img.width() || pixels.len() != img.pixel_count() * 3 {
                    failures.push(format!("{id}: unexpected geometry"));
                    continue;
                }
                for (p, px) in pixels.chunks_exact(3).enumerate() {
                    for c in 0..3 {
                        let d = ours.plane(c)[p].abs_diff(px[c] as u16);
                        worst = worst.max(d);
                        over_one += usize::from(d > 1);
                        samples += 1;
                    }
                }
                match component_delta(&jpeg) {
                    Some(d) => worst_component = worst_component.max(d),
                    None => failures.push(format!("{id}: component decode failed")),
                }
            }
            Err(e) => failures.push(format!("{id}: {e}")),
        }
    }
    outcome(
        "7",
        "base layer decodes in an independent JPEG decoder",
        failures.is_empty() && worst <= 1,
        format!(
            "10 streams; max RGB delta {worst} (tol 1), {over_one}/{samples} samples above 1; \
             max YCbCr component delta {worst_component}; failures: {failures:?}"
        ),
    )
}

fn main() -> ExitCode {
    let started = std::time::Instant::now();
    let mut results = vec![lossless_grid()];

    let sparse = corpus::sparse_corpus(10, 64, corpus::corpus_seed());
    let config = GridConfig {
        workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
        ..GridConfig::default()
    };
    let report = bench::run_grid(&sparse, &config).expect("sparse grid runs");
    results.extend(bitrate_direction(&report));
    results.push(packing_mechanism());
    results.extend(oracles());
    results.push(boxstats_examples());
    results.push(tmqi_sanity(&corpus::synthetic_corpus(
        6,
        64,
        corpus::corpus_seed(),
    )));
    results.push(backward_compat());

    for r in &results {
        println!(
            "[{}] {:<3} {}: {}",
            if r.pass { "PASS" } else { "FAIL" },
            r.id,
            r.name,
            r.detail
        );
    }
    let failed = results.iter().filter(|r| !r.pass).count();
    println!(
        "acceptance: {} passed, {} failed ({:.1}s)",
        results.len() - failed,
        failed,
        started.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
