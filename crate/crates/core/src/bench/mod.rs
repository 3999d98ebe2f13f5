//! Benchmark harness: sweeps the codec grid over a corpus, checks
//! losslessness, and summarizes bitrates and TMQI.

pub mod corpus;
mod svg;

pub use self::svg::emit_boxplot_svg;
pub use crate::tmqi::{boxstats, BoxStats};

use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::container::{bits_per_pixel, decode, encode_detailed, CodecParams, Mode};
use crate::error::{Error, Result};
use crate::imagio::{parse_pfm, parse_rgbe, HdrImage};
use crate::tmo::TmoKind;
use crate::tmqi::tmqi;

/// Quartile method reported alongside every summary.
pub const QUARTILE_METHOD: &str =
    "quartiles are medians of the lower and upper halves, median excluded for odd counts";

/// An image with its identifier.
pub type NamedImage = (String, HdrImage);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub image_id: String,
    pub tmo: TmoKind,
    pub mode: Mode,
    pub q: u8,
    pub r: u8,
    pub bpp: Option<f64>,
    pub tmqi_pre: Option<f64>,
    pub tmqi_decoded: Option<f64>,
    pub lossless_ok: bool,
    pub encode_seconds: f64,
    pub decode_seconds: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Arm {
    pub tmo: TmoKind,
    pub mode: Mode,
    pub q: u8,
    pub r: u8,
}

impl Arm {
    pub fn label(&self) -> String {
        format!("{}/{}/q{}/R{}", self.tmo, self.mode, self.q, self.r)
    }

    pub fn coder(&self) -> (Mode, u8) {
        (self.mode, self.r)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridConfig {
    pub tmos: Vec<TmoKind>,
    pub qualities: Vec<u8>,
    /// Coders as `(mode, R)` pairs.
    pub coders: Vec<(Mode, u8)>,
    pub workers: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            tmos: TmoKind::ALL.to_vec(),
            qualities: vec![80, 90],
            coders: vec![(Mode::Hp, 0), (Mode::Xt, 0), (Mode::Xt, 4)],
            workers: 1,
        }
    }
}

impl GridConfig {
    pub fn arms(&self) -> Vec<Arm> {
        let mut arms = Vec::new();
        for &tmo in &self.tmos {
            for &q in &self.qualities {
                for &(mode, r) in &self.coders {
                    arms.push(Arm { tmo, mode, q, r });
                }
            }
        }
        arms
    }

    pub fn validate(&self) -> Result<()> {
        if self.workers == 0 {
            return Err(Error::Param("workers must be at least 1".into()));
        }
        let arms = self.arms();
        if arms.is_empty() {
            return Err(Error::Param("empty grid".into()));
        }
        for a in arms {
            CodecParams::new(a.mode, a.tmo, a.q, a.r)?;
        }
        Ok(())
    }
}

/// Runs every arm on one image.
pub fn run_image(id: &str, image: &HdrImage, arms: &[Arm]) -> Vec<RunRecord> {
    arms.iter().map(|arm| run_arm(id, image, arm)).collect()
}

fn run_arm(id: &str, image: &HdrImage, arm: &Arm) -> RunRecord {
    let mut rec = RunRecord {
        image_id: id.to_string(),
        tmo: arm.tmo,
        mode: arm.mode,
        q: arm.q,
        r: arm.r,
        bpp: None,
        tmqi_pre: None,
        tmqi_decoded: None,
        lossless_ok: false,
        encode_seconds: 0.0,
        decode_seconds: 0.0,
    };
    let params = match CodecParams::new(arm.mode, arm.tmo, arm.q, arm.r) {
        Ok(p) => p,
        Err(_) => return rec,
    };
    let t0 = Instant::now();
    let encoded = match encode_detailed(image, &params) {
        Ok(e) => e,
        Err(e) => {
            log::warn!("{id} {}: encode failed: {e}", arm.label());
            return rec;
        }
    };
    rec.encode_seconds = t0.elapsed().as_secs_f64();
    let t1 = Instant::now();
    let decoded = decode(&encoded.bytes);
    rec.decode_seconds = t1.elapsed().as_secs_f64();
    rec.lossless_ok = matches!(&decoded, Ok(d) if d == image);
    if rec.lossless_ok {
        rec.bpp = Some(bits_per_pixel(encoded.bytes.len(), image.pixel_count()));
    }
    rec.tmqi_pre = tmqi(image, &encoded.ldr).ok().map(|s| s.q_overall);
    rec.tmqi_decoded = tmqi(image, &encoded.decoded_base).ok().map(|s| s.q_overall);
    rec
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArmSummary {
    pub arm: Arm,
    pub count: usize,
    pub mean_bpp: f64,
    pub bpp: BoxStats,
    pub tmqi_pre: Option<BoxStats>,
    pub tmqi_decoded: Option<BoxStats>,
}

/// Cross-TMO spread of one coder at one quality, or pooled over qualities.
#[derive(Debug, Clone, PartialEq)]
pub struct CoderSpread {
    pub mode: Mode,
    pub r: u8,
    /// `None` for the pooled row.
    pub q: Option<u8>,
    /// Mean bpp per TMO, in configured TMO order.
    pub mean_bpp: Vec<(TmoKind, f64)>,
    pub cv: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridReport {
    pub records: Vec<RunRecord>,
    pub skipped: Vec<(String, String)>,
    pub arms: Vec<ArmSummary>,
    pub spreads: Vec<CoderSpread>,
}

impl GridReport {
    pub fn all_lossless(&self) -> bool {
        self.records.iter().all(|r| r.lossless_ok)
    }

    pub fn spread(&self, mode: Mode, r: u8, q: Option<u8>) -> Option<&CoderSpread> {
        self.spreads
            .iter()
            .find(|s| s.mode == mode && s.r == r && s.q == q)
    }

    /// Mean bpp over images for one arm.
    pub fn mean_bpp(&self, tmo: TmoKind, mode: Mode, q: u8, r: u8) -> Option<f64> {
        let arm = Arm { tmo, mode, q, r };
        self.arms.iter().find(|a| a.arm == arm).map(|a| a.mean_bpp)
    }

    pub fn summary_text(&self) -> String {
        let mut s = String::new();
        let images: std::collections::BTreeSet<_> =
            self.records.iter().map(|r| &r.image_id).collect();
        s.push_str(&format!(
            "images: {}  records: {}  lossless: {}\n",
            images.len(),
            self.records.len(),
            if self.all_lossless() { "all" } else { "FAILED" }
        ));
        for (file, why) in &self.skipped {
            s.push_str(&format!("skipped {file}: {why}\n"));
        }
        s.push_str(&format!(
            "boxplot statistics: {QUARTILE_METHOD}; whiskers at 1.5 IQR\n"
        ));
        s.push_str("arm                              n   mean_bpp  median    q1      q3    tmqi_pre tmqi_dec\n");
        for a in &self.arms {
            let med = |b: &Option<BoxStats>| {
                b.as_ref()
                    .map_or("-".to_string(), |b| format!("{:.4}", b.median))
            };
            s.push_str(&format!(
                "{:<32} {:>3} {:>8.4} {:>8.4} {:>8.4} {:>8.4} {:>8} {:>8}\n",
                a.arm.label(),
                a.count,
                a.mean_bpp,
                a.bpp.median,
                a.bpp.q1,
                a.bpp.q3,
                med(&a.tmqi_pre),
                med(&a.tmqi_decoded),
            ));
        }
        s.push_str("cross-TMO coefficient of variation of mean bpp\n");
        for sp in &self.spreads {
            let q = sp.q.map_or("all".to_string(), |q| format!("q{q}"));
            s.push_str(&format!(
                "  {}/R{} {:<4} cv={:.5}\n",
                sp.mode, sp.r, q, sp.cv
            ));
        }
        s
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Population coefficient of variation.
pub fn coefficient_of_variation(v: &[f64]) -> f64 {
    let m = mean(v);
    let var = v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / v.len() as f64;
    var.sqrt() / m
}

/// Runs the grid over in-memory images, `workers` images at a time.
pub fn run_grid(images: &[(String, HdrImage)], config: &GridConfig) -> Result<GridReport> {
    config.validate()?;
    if images.is_empty() {
        return Err(Error::Param("no images to benchmark".into()));
    }
    let arms = config.arms();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
    let mut records: Vec<RunRecord> = pool.install(|| {
        images
            .par_iter()
            .flat_map_iter(|(id, img)| run_image(id, img, &arms))
            .collect()
    });
    records.sort_by(|a, b| {
        (&a.image_id, a.tmo, a.mode, a.q, a.r).cmp(&(&b.image_id, b.tmo, b.mode, b.q, b.r))
    });
    summarize(records, Vec::new(), config)
}

/// Builds the per-arm and per-coder summaries from sorted records.
pub fn summarize(
    records: Vec<RunRecord>,
    skipped: Vec<(String, String)>,
    config: &GridConfig,
) -> Result<GridReport> {
    let mut arms = Vec::new();
    for arm in config.arms() {
        let rows: Vec<&RunRecord> = records
            .iter()
            .filter(|r| r.tmo == arm.tmo && r.mode == arm.mode && r.q == arm.q && r.r == arm.r)
            .collect();
        let bpps: Vec<f64> = rows.iter().filter_map(|r| r.bpp).collect();
        if bpps.is_empty() {
            continue;
        }
        let stats = |f: fn(&RunRecord) -> Option<f64>| {
            let v: Vec<f64> = rows.iter().filter_map(|r| f(r)).collect();
            boxstats(&v).ok()
        };
        arms.push(ArmSummary {
            arm,
            count: rows.len(),
            mean_bpp: mean(&bpps),
            bpp: boxstats(&bpps)?,
            tmqi_pre: stats(|r| r.tmqi_pre),
            tmqi_decoded: stats(|r| r.tmqi_decoded),
        });
    }

    let mut spreads = Vec::new();
    for &(mode, r) in &config.coders {
        let qsets: Vec<Option<u8>> = config
            .qualities
            .iter()
            .map(|&q| Some(q))
            .chain([None])
            .collect();
        for q in qsets {
            let mut per_tmo = Vec::new();
            for &tmo in &config.tmos {
                let v: Vec<f64> = records
                    .iter()
                    .filter(|x| {
                        x.tmo == tmo && x.mode == mode && x.r == r && q.is_none_or(|q| x.q == q)
                    })
                    .filter_map(|x| x.bpp)
                    .collect();
                if !v.is_empty() {
                    per_tmo.push((tmo, mean(&v)));
                }
            }
            if per_tmo.is_empty() {
                continue;
            }
            let means: Vec<f64> = per_tmo.iter().map(|p| p.1).collect();
            spreads.push(CoderSpread {
                mode,
                r,
                q,
                cv: coefficient_of_variation(&means),
                mean_bpp: per_tmo,
            });
        }
    }

    Ok(GridReport {
        records,
        skipped,
        arms,
        spreads,
    })
}

/// Parses one `.hdr` or `.pfm` file.
pub fn load_image(path: &Path) -> Result<HdrImage> {
    let bytes = std::fs::read(path)?;
    match path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase)
        .as_deref()
    {
        Some("hdr") | Some("pic") => parse_rgbe(&bytes),
        Some("pfm") => parse_pfm(&bytes),
        _ => Err(Error::Format(format!(
            "unsupported extension: {}",
            path.display()
        ))),
    }
}

/// Images read from a directory, plus `(file, reason)` for each skipped file.
#[derive(Debug, Clone)]
pub struct LoadedDir {
    pub images: Vec<NamedImage>,
    pub skipped: Vec<(String, String)>,
}

/// Loads every `.hdr`/`.pfm` file in a directory, sorted by name.
pub fn load_dir(dir: &Path) -> Result<LoadedDir> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            matches!(
                p.extension()
                    .and_then(|e| e.to_str())
                    .map(str::to_ascii_lowercase)
                    .as_deref(),
                Some("hdr") | Some("pic") | Some("pfm")
            )
        })
        .collect();
    paths.sort();
    let mut images = Vec::new();
    let mut skipped = Vec::new();
    for p in paths {
        let name = p
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        match load_image(&p) {
            Ok(img) => images.push((name, img)),
            Err(e) => {
                log::warn!("skipping {name}: {e}");
                skipped.push((name, e.to_string()));
            }
        }
    }
    if images.is_empty() {
        return Err(Error::Param(format!(
            "no usable HDR images in {}",
            dir.display()
        )));
    }
    Ok(LoadedDir { images, skipped })
}

/// Loads a directory and runs the grid; skipped files appear in the report.
pub fn run_grid_dir(dir: &Path, config: &GridConfig) -> Result<GridReport> {
    let loaded = load_dir(dir)?;
    let mut report = run_grid(&loaded.images, config)?;
    report.skipped = loaded.skipped;
    Ok(report)
}

pub fn write_csv<W: Write>(records: &[RunRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<RunRecord>> {
    csv::Reader::from_reader(input)
        .deserialize()
        .map(|r| r.map_err(csv_error))
        .collect()
}

fn csv_error(e: csv::Error) -> Error {
    Error::Format(format!("csv: {e}"))
}

/// Per-arm bitrate boxes in grid order, for plotting.
pub fn bpp_boxes(report: &GridReport) -> Vec<(String, BoxStats)> {
    report
        .arms
        .iter()
        .map(|a| (a.arm.label(), a.bpp.clone()))
        .collect()
}
