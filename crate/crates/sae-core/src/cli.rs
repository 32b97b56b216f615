//! Command-line frontend: one binary, one subcommand per capability.
//!
//! Exit codes: 0 success, 1 usage error, 2 data/computation error.
//! Machine-readable payloads go to stdout or `--out-dir` files; human
//! diagnostics go to stderr. Every run is reproducible from its flags
//! (seeds are explicit and recorded in reports).

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::apps::testimage;
use crate::apps::{
    convolve_scored, dct_pipeline, edge_detect, sharpen, GrayImage, Kernel3, PostProcess,
};
use crate::cells::{self, CellKind};
use crate::error::Result;
use crate::io::{read_csv_matrix_file, read_pgm_file, write_csv_matrix, write_pgm};
use crate::metrics::{self, InputProtocol};
use crate::pe::{build_pe, eval_pe_exact_oracle, PeConfig, Signedness};
use crate::systolic::{cycle_trace, simulate, ArrayConfig};

#[derive(Parser)]
#[command(
    name = "sae",
    version,
    about = "Exact/approximate systolic-array MAC emulator and error-analysis toolkit"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum CellArg {
    ExactPpc,
    ExactNppc,
    ApproxPpc,
    ApproxNppc,
}

impl From<CellArg> for CellKind {
    fn from(c: CellArg) -> CellKind {
        match c {
            CellArg::ExactPpc => CellKind::ExactPpc,
            CellArg::ExactNppc => CellKind::ExactNppc,
            CellArg::ApproxPpc => CellKind::ApproxPpc,
            CellArg::ApproxNppc => CellKind::ApproxNppc,
        }
    }
}

#[derive(Clone, Copy, ValueEnum, Default, PartialEq)]
enum TextFormat {
    #[default]
    Text,
    Csv,
}

#[derive(Clone, Copy, ValueEnum, Default, PartialEq)]
enum ReportFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Print the 16-row truth table of a partial-product cell
    TruthTable {
        /// Cell kind to enumerate
        #[arg(long, value_enum)]
        cell: CellArg,
        #[arg(long, value_enum, default_value_t)]
        format: TextFormat,
    },
    /// Evaluate one fused MAC a*b+c through a PE and compare to the oracle
    EvalPe {
        /// Operand bit width N (2..=16)
        #[arg(long)]
        width: u32,
        /// Two's complement operands
        #[arg(long)]
        signed: bool,
        /// Approximate the k least-significant columns
        #[arg(long, default_value_t = 0)]
        k: u32,
        /// Accumulator width (default 2N+8)
        #[arg(long)]
        acc_width: Option<u32>,
        #[arg(long, allow_hyphen_values = true)]
        a: i64,
        #[arg(long, allow_hyphen_values = true)]
        b: i64,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        c: i64,
        /// Print per-column cell activity
        #[arg(long)]
        trace: bool,
    },
    /// Multiply two CSV matrices on the cycle-accurate array
    Simulate {
        /// Require a square size-N problem (checked against the files)
        #[arg(long)]
        size: Option<usize>,
        #[arg(long)]
        width: u32,
        #[arg(long)]
        signed: bool,
        #[arg(long, default_value_t = 0)]
        k: u32,
        /// Left operand (R x K integers)
        #[arg(long)]
        a_file: PathBuf,
        /// Right operand (K x C integers)
        #[arg(long)]
        b_file: PathBuf,
        /// Write one JSON state snapshot per cycle to this file
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Error metrics of one PE configuration against the exact oracle
    Analyze {
        #[arg(long)]
        width: u32,
        #[arg(long)]
        signed: bool,
        #[arg(long, default_value_t = 0)]
        k: u32,
        /// Enumerate all (a,b) pairs with c=0 (default; widths up to 8)
        #[arg(long)]
        exhaustive: bool,
        /// Sample this many random (a,b,c) triples instead
        #[arg(long, conflicts_with = "exhaustive")]
        samples: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t)]
        format: ReportFormat,
    },
    /// Error-metric sweep over several approximation levels
    Sweep {
        #[arg(long)]
        width: u32,
        #[arg(long)]
        signed: bool,
        /// Comma-separated k values, e.g. 2,4,5,6,8
        #[arg(long, value_delimiter = ',', required = true)]
        ks: Vec<u32>,
        #[arg(long)]
        exhaustive: bool,
        #[arg(long, conflicts_with = "exhaustive")]
        samples: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t)]
        format: ReportFormat,
    },
    /// DCT round trip: coefficients, reconstruction, and quality score
    Dct {
        /// Input PGM (defaults to the vendored test image)
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        k: u32,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Laplacian edge detection scored against the exact-PE edge map
    Edge {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        k: u32,
        #[arg(long)]
        out_dir: PathBuf,
        /// Override kernel: nine comma-separated taps, row-major
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        kernel: Option<Vec<i64>>,
    },
    /// Sharpening scored against the exact-PE sharpened output
    Sharpen {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        k: u32,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        kernel: Option<Vec<i64>>,
    },
    /// Full reproduction run: metric sweeps plus all three pipelines
    Repro {
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Override the vendored input image
        #[arg(long)]
        image: Option<PathBuf>,
    },
}

/// Parses arguments and runs. Returns the process exit code.
pub fn dispatch<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match run(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn signedness(signed: bool) -> Signedness {
    if signed {
        Signedness::Signed
    } else {
        Signedness::Unsigned
    }
}

fn protocol(exhaustive: bool, samples: Option<u64>, seed: u64) -> InputProtocol {
    match samples {
        Some(count) if !exhaustive => InputProtocol::RandomAbc { seed, count },
        _ => InputProtocol::ExhaustiveAbZeroC,
    }
}

fn load_image(input: Option<&Path>) -> Result<GrayImage> {
    match input {
        Some(path) => read_pgm_file(path),
        None => Ok(testimage::vendored()),
    }
}

fn kernel_from_flags(default: Kernel3, taps: Option<Vec<i64>>) -> Result<Kernel3> {
    match taps {
        Some(t) if t.len() == 9 => Ok(Kernel3::custom(
            "custom",
            [[t[0], t[1], t[2]], [t[3], t[4], t[5]], [t[6], t[7], t[8]]],
        )),
        Some(t) => Err(crate::Error::InvalidConfig(format!(
            "--kernel needs 9 taps, got {}",
            t.len()
        ))),
        None => Ok(default),
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::TruthTable { cell, format } => {
            let kind: CellKind = cell.into();
            let rows = cells::truth_table(kind)?;
            if format == TextFormat::Csv {
                println!("a,b,c_in,s_in,s,c,ed");
                for (inp, out) in rows {
                    println!(
                        "{},{},{},{},{},{},{}",
                        inp.a as u8,
                        inp.b as u8,
                        inp.c_in as u8,
                        inp.s_in as u8,
                        out.s as u8,
                        out.c as u8,
                        cells::error_distance(kind, inp)
                    );
                }
            } else {
                println!(" a  b  Cin Sin |  S  C | ED");
                for (inp, out) in rows {
                    println!(
                        " {}  {}   {}   {}  |  {}  {} | {:+}",
                        inp.a as u8,
                        inp.b as u8,
                        inp.c_in as u8,
                        inp.s_in as u8,
                        out.s as u8,
                        out.c as u8,
                        cells::error_distance(kind, inp)
                    );
                }
            }
            Ok(())
        }
        Command::EvalPe {
            width,
            signed,
            k,
            acc_width,
            a,
            b,
            c,
            trace,
        } => {
            let cfg = match acc_width {
                Some(w) => PeConfig::with_acc_width(width, signedness(signed), k, w)?,
                None => PeConfig::new(width, signedness(signed), k)?,
            };
            let desc = build_pe(cfg)?;
            let exact = eval_pe_exact_oracle(&cfg, a, b, c)?;
            if trace {
                let (value, columns) = desc.eval_traced(a, b, c)?;
                for col in &columns {
                    let cells: Vec<String> = col
                        .cells
                        .iter()
                        .map(|t| {
                            format!(
                                "{:?}(a={} b={} cin={} sin={} -> s={} c={})",
                                t.kind,
                                t.a as u8,
                                t.b as u8,
                                t.c_in as u8,
                                t.s_in as u8,
                                t.s as u8,
                                t.c as u8
                            )
                        })
                        .collect();
                    println!(
                        "column {:>2}: bit={} {}",
                        col.column,
                        col.sum_bit as u8,
                        cells.join(" ")
                    );
                }
                println!("result={value} exact={exact} ed={}", value - exact);
            } else {
                let value = desc.eval(a, b, c)?;
                println!("result={value} exact={exact} ed={}", value - exact);
            }
            Ok(())
        }
        Command::Simulate {
            size,
            width,
            signed,
            k,
            a_file,
            b_file,
            trace,
        } => {
            let a = read_csv_matrix_file(&a_file)?;
            let b = read_csv_matrix_file(&b_file)?;
            let pe = PeConfig::new(width, signedness(signed), k)?;
            let cfg = ArrayConfig {
                rows: a.rows(),
                cols: b.cols(),
                inner: a.cols(),
                pe,
            };
            if let Some(n) = size {
                if cfg.rows != n || cfg.cols != n || cfg.inner != n {
                    return Err(crate::Error::DimensionMismatch(format!(
                        "--size {n} but operands give {}x{}x{}",
                        cfg.rows, cfg.inner, cfg.cols
                    )));
                }
            }
            let (product, cycles) = if let Some(trace_path) = trace {
                let snapshots = cycle_trace(cfg, &a, &b)?;
                let mut lines = String::new();
                for s in &snapshots {
                    lines.push_str(&serde_json::to_string(s)?);
                    lines.push('\n');
                }
                fs::write(trace_path, lines)?;
                let last = snapshots.into_iter().last().expect("nonempty trace");
                (last.accumulators, last.cycle)
            } else {
                simulate(cfg, &a, &b)?
            };
            print!("{}", write_csv_matrix(&product));
            println!("cycles={cycles}");
            Ok(())
        }
        Command::Analyze {
            width,
            signed,
            k,
            exhaustive,
            samples,
            seed,
            format,
        } => {
            let cfg = PeConfig::new(width, signedness(signed), k)?;
            let report = metrics::analyze(cfg, &protocol(exhaustive, samples, seed))?;
            match format {
                ReportFormat::Csv => print!("{}", metrics::to_csv(&[report])),
                ReportFormat::Json => println!("{}", metrics::to_json(&[report])?),
            }
            Ok(())
        }
        Command::Sweep {
            width,
            signed,
            ks,
            exhaustive,
            samples,
            seed,
            format,
        } => {
            let reports = metrics::sweep_k(
                width,
                signedness(signed),
                &ks,
                &protocol(exhaustive, samples, seed),
            )?;
            match format {
                ReportFormat::Csv => print!("{}", metrics::to_csv(&reports)),
                ReportFormat::Json => println!("{}", metrics::to_json(&reports)?),
            }
            Ok(())
        }
        Command::Dct { input, k, out_dir } => {
            let img = load_image(input.as_deref())?;
            let pe = PeConfig::new(8, Signedness::Signed, k)?;
            let out = dct_pipeline(&img, pe)?;
            fs::create_dir_all(&out_dir)?;
            fs::write(
                out_dir.join("coefficients.pgm"),
                write_pgm(&out.coefficients),
            )?;
            fs::write(
                out_dir.join("reconstructed.pgm"),
                write_pgm(&out.reconstructed),
            )?;
            write_json(
                &out_dir.join("score.json"),
                &ScoreRecord::new(k, out.score.psnr_db, out.score.ssim),
            )?;
            eprintln!(
                "dct k={k}: psnr={:.2} dB ssim={:.4}",
                out.score.psnr_db, out.score.ssim
            );
            Ok(())
        }
        Command::Edge {
            input,
            k,
            out_dir,
            kernel,
        } => run_convolution_app(
            input.as_deref(),
            k,
            &out_dir,
            kernel_from_flags(Kernel3::laplacian(), kernel)?,
            PostProcess::Normalize,
            "edges.pgm",
        ),
        Command::Sharpen {
            input,
            k,
            out_dir,
            kernel,
        } => run_convolution_app(
            input.as_deref(),
            k,
            &out_dir,
            kernel_from_flags(Kernel3::sharpen(), kernel)?,
            PostProcess::Clamp,
            "sharpened.pgm",
        ),
        Command::Repro {
            out_dir,
            seed,
            image,
        } => {
            let img = load_image(image.as_deref())?;
            run_repro(&out_dir, seed, &img)
        }
    }
}

fn run_convolution_app(
    input: Option<&Path>,
    k: u32,
    out_dir: &Path,
    kernel: Kernel3,
    post: PostProcess,
    file_name: &str,
) -> Result<()> {
    let img = load_image(input)?;
    let pe = PeConfig::new(8, Signedness::Signed, k)?;
    let (out, score) = convolve_scored(&img, &kernel, pe, post)?;
    fs::create_dir_all(out_dir)?;
    fs::write(out_dir.join(file_name), write_pgm(&out))?;
    write_json(
        &out_dir.join("score.json"),
        &ScoreRecord::new(k, score.psnr_db, score.ssim),
    )?;
    eprintln!(
        "{} k={k}: psnr={:.2} dB ssim={:.4} (vs exact output)",
        kernel.name, score.psnr_db, score.ssim
    );
    Ok(())
}

/// One quality record; infinite PSNR serializes as null.
#[derive(Serialize)]
struct ScoreRecord {
    k: u32,
    psnr_db: Option<f64>,
    ssim: f64,
}

impl ScoreRecord {
    fn new(k: u32, psnr_db: f64, ssim: f64) -> ScoreRecord {
        ScoreRecord {
            k,
            psnr_db: psnr_db.is_finite().then_some(psnr_db),
            ssim,
        }
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(fs::write(path, text)?)
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf29ce484222325u64;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

#[derive(Serialize)]
struct Manifest {
    seed: u64,
    image_width: usize,
    image_height: usize,
    image_fnv1a64: String,
    files: Vec<String>,
}

/// The reproduction run behind `sae repro`: Table-style metric sweeps plus
/// the three application pipelines on one image, all written into a single
/// directory. Byte-identical for identical (seed, image) inputs.
pub fn run_repro(out_dir: &Path, seed: u64, img: &GrayImage) -> Result<()> {
    fs::create_dir_all(out_dir)?;
    let mut files: Vec<String> = Vec::new();

    // Exhaustive NMED/MRED sweeps, 4-bit and 8-bit, both signednesses.
    let exhaustive = InputProtocol::ExhaustiveAbZeroC;
    for (name, width, ks) in [
        ("sweep_w4.csv", 4u32, vec![0u32, 2, 3, 4]),
        ("sweep_w8.csv", 8, vec![0, 2, 4, 5, 6, 8]),
    ] {
        let mut reports = metrics::sweep_k(width, Signedness::Unsigned, &ks, &exhaustive)?;
        reports.extend(metrics::sweep_k(
            width,
            Signedness::Signed,
            &ks,
            &exhaustive,
        )?);
        fs::write(out_dir.join(name), metrics::to_csv(&reports))?;
        files.push(name.to_string());
    }
    // Seeded random-protocol verification sweep (exercises the c input).
    {
        let random = InputProtocol::RandomAbc { seed, count: 65536 };
        let mut reports = metrics::sweep_k(8, Signedness::Unsigned, &[0, 4, 8], &random)?;
        reports.extend(metrics::sweep_k(
            8,
            Signedness::Signed,
            &[0, 4, 8],
            &random,
        )?);
        fs::write(
            out_dir.join("sweep_w8_random.csv"),
            metrics::to_csv(&reports),
        )?;
        files.push("sweep_w8_random.csv".to_string());
    }

    // DCT round trips.
    let mut dct_scores = Vec::new();
    for k in [0u32, 3, 4, 7] {
        let pe = PeConfig::new(8, Signedness::Signed, k)?;
        let out = dct_pipeline(img, pe)?;
        let name = format!("dct_recon_k{k}.pgm");
        fs::write(out_dir.join(&name), write_pgm(&out.reconstructed))?;
        files.push(name);
        if k == 0 {
            fs::write(
                out_dir.join("dct_coefficients.pgm"),
                write_pgm(&out.coefficients),
            )?;
            files.push("dct_coefficients.pgm".to_string());
        }
        dct_scores.push(ScoreRecord::new(k, out.score.psnr_db, out.score.ssim));
    }
    write_json(&out_dir.join("dct.json"), &dct_scores)?;
    files.push("dct.json".to_string());

    // Edge detection and sharpening, scored against exact output.
    let mut edge_scores = Vec::new();
    for k in [0u32, 2, 3, 4, 5, 6] {
        let pe = PeConfig::new(8, Signedness::Signed, k)?;
        let (edges, score) = edge_detect(img, pe)?;
        let name = format!("edges_k{k}.pgm");
        fs::write(out_dir.join(&name), write_pgm(&edges))?;
        files.push(name);
        edge_scores.push(ScoreRecord::new(k, score.psnr_db, score.ssim));
    }
    write_json(&out_dir.join("edge.json"), &edge_scores)?;
    files.push("edge.json".to_string());

    let mut sharpen_scores = Vec::new();
    for k in [0u32, 3, 4] {
        let pe = PeConfig::new(8, Signedness::Signed, k)?;
        let (out, score) = sharpen(img, pe)?;
        let name = format!("sharpened_k{k}.pgm");
        fs::write(out_dir.join(&name), write_pgm(&out))?;
        files.push(name);
        sharpen_scores.push(ScoreRecord::new(k, score.psnr_db, score.ssim));
    }
    write_json(&out_dir.join("sharpen.json"), &sharpen_scores)?;
    files.push("sharpen.json".to_string());

    files.push("manifest.json".to_string());
    files.sort();
    write_json(
        &out_dir.join("manifest.json"),
        &Manifest {
            seed,
            image_width: img.width(),
            image_height: img.height(),
            image_fnv1a64: format!("{:016x}", fnv1a64(img.pixels())),
            files,
        },
    )?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> i32 {
        dispatch(std::iter::once("sae").chain(args.iter().copied()))
    }

    #[test]
    fn unknown_subcommand_is_usage_error() {
        assert_eq!(run_args(&["frobnicate"]), 1);
    }

    #[test]
    fn unknown_flag_is_usage_error() {
        assert_eq!(run_args(&["truth-table", "--no-such-flag"]), 1);
    }

    #[test]
    fn truth_table_runs() {
        assert_eq!(run_args(&["truth-table", "--cell", "approx-ppc"]), 0);
        assert_eq!(
            run_args(&["truth-table", "--cell", "exact-nppc", "--format", "csv"]),
            0
        );
    }

    #[test]
    fn eval_pe_runs() {
        assert_eq!(
            run_args(&[
                "eval-pe", "--width", "8", "--signed", "--k", "3", "--a", "-55", "--b", "91",
                "--c", "7", "--trace"
            ]),
            0
        );
    }

    #[test]
    fn analyze_bad_width_is_data_error() {
        assert_eq!(run_args(&["analyze", "--width", "40"]), 2);
    }
}
