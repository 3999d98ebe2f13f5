use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use hdr2l_core::basejpeg::decode_base;
use hdr2l_core::bench::{self, corpus, GridConfig};
use hdr2l_core::container::{self, CodecParams, Mode};
use hdr2l_core::imagio::{parse_ppm, write_pfm, LdrImage};
use hdr2l_core::tmo::TmoKind;
use hdr2l_core::tmqi::tmqi;
use hdr2l_core::Result;

#[derive(Parser)]
#[command(
    name = "hdr2l",
    version,
    about = "Two-layer lossless HDR codec with a JPEG-compatible base layer"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum TmoArg {
    Default,
    ReinhardGlobal,
    ReinhardLocal,
    Drago,
}

impl From<TmoArg> for TmoKind {
    fn from(t: TmoArg) -> Self {
        match t {
            TmoArg::Default => TmoKind::Default,
            TmoArg::ReinhardGlobal => TmoKind::ReinhardGlobal,
            TmoArg::ReinhardLocal => TmoKind::ReinhardLocal,
            TmoArg::Drago => TmoKind::Drago,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Hp,
    Xt,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Hp => Mode::Hp,
            ModeArg::Xt => Mode::Xt,
        }
    }
}

#[derive(Args)]
struct CodecArgs {
    #[arg(long, value_enum, default_value = "default")]
    tmo: TmoArg,
    #[arg(long, default_value_t = 90, value_parser = clap::value_parser!(u8).range(1..=100))]
    q: u8,
    #[arg(long, value_enum, default_value = "hp")]
    mode: ModeArg,
    #[arg(long, default_value_t = 0, value_parser = parse_refine)]
    refine: u8,
}

#[derive(Subcommand)]
enum Command {
    /// Encode a Radiance .hdr or .pfm image into an H2L1 stream.
    Encode {
        input: PathBuf,
        #[command(flatten)]
        codec: CodecArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Decode an H2L1 stream to a PFM image.
    Decode {
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the embedded base layer as a standalone JPEG.
    ExtractLdr {
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score an LDR image (.ppm or .jpg) against an HDR image.
    Tmqi { hdr: PathBuf, ldr: PathBuf },
    /// Run the codec grid over a directory or a synthetic corpus.
    Bench {
        /// Directory of .hdr/.pfm images; omit to use the synthetic corpus.
        dir: Option<PathBuf>,
        /// Number of synthetic images when no directory is given.
        #[arg(long, default_value_t = 12)]
        synthetic: usize,
        /// Side length of synthetic images.
        #[arg(long, default_value_t = 64)]
        size: usize,
        /// Use only sparse-histogram synthetic scenes.
        #[arg(long)]
        sparse: bool,
        /// Restrict the grid to one operator.
        #[arg(long, value_enum)]
        tmo: Option<TmoArg>,
        /// Restrict the grid to one quality.
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=100))]
        q: Option<u8>,
        /// Restrict the grid to one mode.
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        /// Restrict the grid to one refinement depth.
        #[arg(long, value_parser = parse_refine)]
        refine: Option<u8>,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Write the text summary here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_refine(s: &str) -> std::result::Result<u8, String> {
    match s {
        "0" => Ok(0),
        "4" => Ok(4),
        _ => Err("refinement bits must be 0 or 4".into()),
    }
}

fn read_ldr(path: &Path) -> Result<LdrImage> {
    let bytes = std::fs::read(path)?;
    if bytes.starts_with(&[0xFF, 0xD8]) {
        decode_base(&bytes)
    } else {
        parse_ppm(&bytes)
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Encode { input, codec, out } => {
            let image = bench::load_image(&input)?;
            let params =
                CodecParams::new(codec.mode.into(), codec.tmo.into(), codec.q, codec.refine)?;
            let stream = container::encode(&image, &params)?;
            std::fs::write(&out, &stream)?;
            let m = container::measure(&stream)?;
            println!(
                "{}x{} -> {} bytes ({:.4} bpp): base {} refinement {} tables {} residual {} overhead {}",
                image.width(),
                image.height(),
                m.total_bytes,
                m.bpp,
                m.base,
                m.refinement,
                m.tables,
                m.residual_payload,
                m.overhead
            );
        }
        Command::Decode { input, out } => {
            let image = container::decode(&std::fs::read(&input)?)?;
            std::fs::write(&out, write_pfm(&image))?;
        }
        Command::ExtractLdr { input, out } => {
            std::fs::write(&out, container::extract_ldr(&std::fs::read(&input)?)?)?;
        }
        Command::Tmqi { hdr, ldr } => {
            let h = bench::load_image(&hdr)?;
            let l = read_ldr(&ldr)?;
            let s = tmqi(&h, &l)?;
            println!("Q {:.6}", s.q_overall);
            println!("S {:.6}", s.s_structural);
            println!("N {:.6}", s.n_naturalness);
            let scales: Vec<String> = s.per_scale_s.iter().map(|v| format!("{v:.6}")).collect();
            println!("per-scale S {}", scales.join(" "));
        }
        Command::Bench {
            dir,
            synthetic,
            size,
            sparse,
            tmo,
            q,
            mode,
            refine,
            workers,
            csv,
            svg,
            out,
        } => {
            let mut config = GridConfig {
                workers,
                ..GridConfig::default()
            };
            if let Some(t) = tmo {
                config.tmos = vec![t.into()];
            }
            if let Some(q) = q {
                config.qualities = vec![q];
            }
            if let Some(m) = mode {
                let m: Mode = m.into();
                config.coders.retain(|c| c.0 == m);
            }
            if let Some(r) = refine {
                config.coders.retain(|c| c.1 == r);
            }
            let report = match dir {
                Some(d) => bench::run_grid_dir(&d, &config)?,
                None => {
                    let seed = corpus::corpus_seed();
                    let images = if sparse {
                        corpus::sparse_corpus(synthetic, size, seed)
                    } else {
                        corpus::synthetic_corpus(synthetic, size, seed)
                    };
                    bench::run_grid(&images, &config)?
                }
            };
            if let Some(path) = csv {
                bench::write_csv(&report.records, std::fs::File::create(path)?)?;
            }
            if let Some(path) = svg {
                let svg = bench::emit_boxplot_svg(&bench::bpp_boxes(&report), "bits per pixel")?;
                std::fs::write(path, svg)?;
            }
            let text = report.summary_text();
            match out {
                Some(path) => std::fs::write(path, text)?,
                None => print!("{text}"),
            }
            if !report.all_lossless() {
                eprintln!("error: at least one stream failed the lossless check");
                return Ok(ExitCode::from(2));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
