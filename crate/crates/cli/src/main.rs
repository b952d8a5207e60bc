use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use lzlfs::baseline::{compress_baseline, gen_counterexample, parse_rational, Skipped};
use lzlfs::codec::{decode_container, decompress, encode_container, MAGIC};
use lzlfs::trace::to_json_lines;
use lzlfs::verify::{self, VerifyConfig};
use lzlfs::{compress, compress_simplified, CodecError, Encoding, Mode, Rational, StepRecord, TieBreak};

mod bench;

#[derive(Parser)]
#[command(name = "lzlfs", version, about = "Longest-first substitution compressor")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compress a file into an .lzlfs container.
    Compress(CompressArgs),
    /// Restore the original bytes from a container.
    Decompress {
        /// Container to read; standard input when omitted or "-".
        input: Option<PathBuf>,
        /// Output path; defaults to the input without ".lzlfs", else stdout.
        #[arg(short)]
        o: Option<PathBuf>,
    },
    /// Print compression statistics as JSON. Containers are decoded; any
    /// other input is compressed first.
    Stats(StatsArgs),
    /// Write the aXab_0 ... aXab_s family string.
    GenCounterexample {
        #[arg(long)]
        s: usize,
        #[arg(long)]
        r: usize,
        #[arg(short)]
        o: Option<PathBuf>,
    },
    /// Run the randomized cross-check suites.
    Verify(VerifyArgs),
    /// Time the compressors over sizes swept by powers of two; CSV output.
    Bench(bench::BenchArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
pub enum ModeArg {
    Full,
    Simplified,
    Baseline,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Full => Mode::Full,
            ModeArg::Simplified => Mode::Simplified,
            ModeArg::Baseline => Mode::Baseline,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
pub enum TieBreakArg {
    Leftmost,
    BucketOrder,
}

#[derive(Args)]
pub struct CompressOpts {
    #[arg(long, value_enum, default_value = "full")]
    pub mode: ModeArg,
    /// Gate parameter alpha (baseline only): integer, decimal or a/b.
    #[arg(long)]
    pub alpha: Option<String>,
    /// Gate parameter beta (baseline only): integer, decimal or a/b.
    #[arg(long)]
    pub beta: Option<String>,
    /// Choice among equally long repeats (full and simplified).
    #[arg(long, value_enum, default_value = "leftmost")]
    pub tiebreak: TieBreakArg,
}

#[derive(Args)]
struct CompressArgs {
    /// File to compress; standard input when omitted or "-".
    input: Option<PathBuf>,
    /// Output path; defaults to the input with ".lzlfs" appended, else stdout.
    #[arg(short)]
    o: Option<PathBuf>,
    /// Write the step trace as JSON lines.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[command(flatten)]
    opts: CompressOpts,
}

#[derive(Args)]
struct StatsArgs {
    input: Option<PathBuf>,
    #[command(flatten)]
    opts: CompressOpts,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, env = "LZLFS_SEED", default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 200)]
    cases: usize,
    #[arg(long, default_value_t = 500, value_parser = clap::value_parser!(u64).range(0..=verify::MAX_LEN_CAP as u64))]
    max_len: u64,
    /// Swap in a classifier that drops Type 2, to check the suites notice.
    #[arg(long, hide = true)]
    inject_fault: bool,
}

/// Result of one compression run.
pub struct Run {
    pub mode: Mode,
    pub encoding: Encoding,
    pub trace: Vec<StepRecord>,
    pub skipped: Vec<Skipped>,
}

fn gate_param(v: &Option<String>, name: &str, default: u32) -> Result<Rational> {
    match v {
        None => Ok(Rational::from_integer(default.into())),
        Some(s) => parse_rational(s).with_context(|| format!("--{name} {s:?} is not a non-negative number or fraction")),
    }
}

impl CompressOpts {
    pub fn run(&self, input: &[u8]) -> Result<Run> {
        let mode = Mode::from(self.mode);
        if mode != Mode::Baseline && (self.alpha.is_some() || self.beta.is_some()) {
            bail!("--alpha and --beta only apply to --mode baseline");
        }
        let tiebreak = match self.tiebreak {
            TieBreakArg::Leftmost => TieBreak::Leftmost,
            TieBreakArg::BucketOrder => TieBreak::BucketOrder,
        };
        let (encoding, trace, skipped) = match mode {
            Mode::Full => {
                let (e, t) = compress(input, tiebreak);
                (e, t, Vec::new())
            }
            Mode::Simplified => {
                let (e, t) = compress_simplified(input, tiebreak);
                (e, t, Vec::new())
            }
            Mode::Baseline => {
                let alpha = gate_param(&self.alpha, "alpha", 30)?;
                let beta = gate_param(&self.beta, "beta", 80)?;
                let out = compress_baseline(input, &alpha, &beta);
                (out.encoding, out.trace, out.skipped)
            }
        };
        Ok(Run { mode, encoding, trace, skipped })
    }
}

fn read_input(path: &Option<PathBuf>) -> Result<Vec<u8>> {
    match path {
        Some(p) if p != Path::new("-") => fs::read(p).with_context(|| format!("reading {}", p.display())),
        _ => {
            let mut buf = Vec::new();
            io::stdin().read_to_end(&mut buf).context("reading standard input")?;
            Ok(buf)
        }
    }
}

fn write_output(path: Option<&Path>, data: &[u8]) -> Result<()> {
    match path.filter(|p| *p != Path::new("-")) {
        Some(p) => fs::write(p, data).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(data).and_then(|_| out.flush()).context("writing standard output")
        }
    }
}

fn named_input(path: &Option<PathBuf>) -> Option<&Path> {
    path.as_deref().filter(|p| *p != Path::new("-"))
}

fn cmd_compress(a: &CompressArgs) -> Result<()> {
    let input = read_input(&a.input)?;
    let run = a.opts.run(&input)?;
    if let Some(t) = &a.trace {
        fs::write(t, to_json_lines(&run.trace, run.mode)).with_context(|| format!("writing {}", t.display()))?;
    }
    let out = a.o.clone().or_else(|| {
        named_input(&a.input).map(|p| {
            let mut s = p.as_os_str().to_owned();
            s.push(".lzlfs");
            PathBuf::from(s)
        })
    });
    write_output(out.as_deref(), &encode_container(&run.encoding, run.mode))
}

/// Exit status for each decoding failure, so scripts can tell them apart.
fn codec_exit(e: &CodecError) -> u8 {
    match e {
        CodecError::BadMagic => 10,
        CodecError::BadVersion(_) => 11,
        CodecError::BadMode(_) => 12,
        CodecError::Truncated => 13,
        CodecError::VarintOverflow => 14,
        CodecError::TrailingBytes(_) => 15,
        CodecError::Invariant(_) => 16,
        CodecError::Corrupt(_) => 17,
    }
}

fn cmd_decompress(input: &Option<PathBuf>, o: &Option<PathBuf>) -> Result<()> {
    let data = read_input(input)?;
    let (enc, _) = decode_container(&data)?;
    let bytes = decompress(&enc)?;
    let out = o.clone().or_else(|| {
        named_input(input).map(|p| match p.to_str().and_then(|s| s.strip_suffix(".lzlfs")) {
            Some(stem) if !stem.is_empty() => PathBuf::from(stem),
            _ => {
                let mut s = p.as_os_str().to_owned();
                s.push(".out");
                PathBuf::from(s)
            }
        })
    });
    write_output(out.as_deref(), &bytes)
}

#[derive(Serialize)]
struct Histogram {
    #[serde(rename = "T1")]
    t1: usize,
    #[serde(rename = "T2")]
    t2: usize,
    #[serde(rename = "T3")]
    t3: usize,
}

#[derive(Serialize)]
struct Stats<'a> {
    input_len: usize,
    output_len: usize,
    ratio: f64,
    /// Unknown when reading a container.
    steps: Option<usize>,
    factors: usize,
    f_histogram: Histogram,
    mode: &'a str,
    wall_time_ms: f64,
    /// Literal bytes, hash tokens and the sentinel left at the end.
    live_symbols: usize,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    skipped: Vec<Skipped>,
}

fn cmd_stats(a: &StatsArgs) -> Result<()> {
    let data = read_input(&a.input)?;
    let start = Instant::now();
    let (run, steps) = if data.starts_with(MAGIC) {
        let (encoding, mode) = decode_container(&data)?;
        (Run { mode, encoding, trace: Vec::new(), skipped: Vec::new() }, None)
    } else {
        let run = a.opts.run(&data)?;
        let steps = run.trace.len();
        (run, Some(steps))
    };
    let wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    let e = &run.encoding;
    let output_len = encode_container(e, run.mode).len();
    let [t1, t2, t3] = e.histogram();
    let stats = Stats {
        input_len: e.original_len,
        output_len,
        ratio: output_len as f64 / e.original_len.max(1) as f64,
        steps,
        factors: e.factors.len(),
        f_histogram: Histogram { t1, t2, t3 },
        mode: run.mode.name(),
        wall_time_ms,
        live_symbols: e.literals.iter().map(Vec::len).sum::<usize>() + e.q() + 1,
        skipped: run.skipped,
    };
    println!("{}", serde_json::to_string(&stats)?);
    Ok(())
}

fn cmd_verify(a: &VerifyArgs) -> Result<bool> {
    let cfg = VerifyConfig { seed: a.seed, cases: a.cases, max_len: a.max_len as usize, fault: a.inject_fault };
    eprintln!("seed {} cases {} max-len {}", cfg.seed, cfg.cases, cfg.max_len);
    let results = verify::run(&cfg);
    for r in &results {
        let tag = if r.ok() { "PASS" } else { "FAIL" };
        println!("{tag} {:<20} {}/{}", r.name, r.passed, r.passed + r.failed);
        if let Some(f) = &r.first_failure {
            eprintln!("  first failure: {f}");
        }
    }
    Ok(results.iter().all(|r| r.ok()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.cmd {
        Cmd::Compress(a) => cmd_compress(a).map(|_| true),
        Cmd::Decompress { input, o } => cmd_decompress(input, o).map(|_| true),
        Cmd::Stats(a) => cmd_stats(a).map(|_| true),
        Cmd::GenCounterexample { s, r, o } => gen_counterexample(*s, *r)
            .map_err(anyhow::Error::from)
            .and_then(|w| write_output(o.as_deref(), &w))
            .map(|_| true),
        Cmd::Verify(a) => cmd_verify(a),
        Cmd::Bench(a) => bench::run(a).map(|_| true),
    };
    match res {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("lzlfs: {e:#}");
            match e.downcast_ref::<CodecError>() {
                Some(c) => ExitCode::from(codec_exit(c)),
                None => ExitCode::FAILURE,
            }
        }
    }
}
