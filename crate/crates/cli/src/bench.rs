use std::fs;
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::Args;

use lzlfs::codec::encode_container;
use lzlfs::corpus::Generator;
use lzlfs::Mode;

use crate::{CompressOpts, ModeArg};

#[derive(Args)]
pub struct BenchArgs {
    /// Modes to time; all three when omitted.
    #[arg(long = "mode", value_enum)]
    modes: Vec<ModeArg>,
    /// Built-in generators: periodic, fibonacci, random, counterexample.
    #[arg(long = "generator")]
    generators: Vec<String>,
    /// Use every file in this directory instead of the generators; each
    /// file is cut to prefixes of the swept sizes.
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    min_exp: u32,
    #[arg(long, default_value_t = 16)]
    max_exp: u32,
    /// Baseline mode is quadratic; its sweep stops here.
    #[arg(long, default_value_t = 13)]
    baseline_max_exp: u32,
    /// Timed runs per cell; the median is reported.
    #[arg(long, default_value_t = 1)]
    runs: usize,
    #[arg(long, env = "LZLFS_SEED", default_value_t = 1)]
    seed: u64,
    /// Cells timed concurrently; defaults to the available parallelism.
    #[arg(long)]
    jobs: Option<usize>,
}

struct Cell {
    mode: ModeArg,
    source: String,
    input: Vec<u8>,
}

fn sources(a: &BenchArgs, n: usize) -> Result<Vec<(String, Vec<u8>)>> {
    if let Some(dir) = &a.corpus {
        let mut files: Vec<PathBuf> = fs::read_dir(dir)
            .with_context(|| format!("reading {}", dir.display()))?
            .map(|e| e.map(|e| e.path()))
            .collect::<Result<_, _>>()?;
        files.sort();
        let mut out = Vec::new();
        for f in files.into_iter().filter(|f| f.is_file()) {
            let data = fs::read(&f).with_context(|| format!("reading {}", f.display()))?;
            if data.len() >= n {
                let name = f.file_name().map_or_else(String::new, |s| s.to_string_lossy().into_owned());
                out.push((name, data[..n].to_vec()));
            }
        }
        return Ok(out);
    }
    let gens = if a.generators.is_empty() {
        Generator::ALL.to_vec()
    } else {
        a.generators
            .iter()
            .map(|g| Generator::from_name(g).with_context(|| format!("unknown generator {g:?}")))
            .collect::<Result<_>>()?
    };
    Ok(gens.into_iter().filter_map(|g| Some((g.name().to_string(), g.generate(n, a.seed)?))).collect())
}

fn time_cell(c: &Cell, runs: usize) -> Result<String> {
    let opts = CompressOpts { mode: c.mode, alpha: None, beta: None, tiebreak: crate::TieBreakArg::Leftmost };
    let mut times = Vec::with_capacity(runs);
    let mut last = None;
    for _ in 0..runs.max(1) {
        let start = Instant::now();
        let run = opts.run(&c.input)?;
        times.push(start.elapsed().as_secs_f64() * 1e3);
        last = Some(run);
    }
    times.sort_by(f64::total_cmp);
    let run = last.expect("at least one run");
    let n = c.input.len();
    let ratio = encode_container(&run.encoding, run.mode).len() as f64 / n.max(1) as f64;
    Ok(format!("{},{},{n},{:.3},{},{ratio:.4}", Mode::from(c.mode).name(), c.source, times[times.len() / 2], run.trace.len()))
}

pub fn run(a: &BenchArgs) -> Result<()> {
    if a.min_exp > a.max_exp || a.max_exp > 30 {
        bail!("need --min-exp <= --max-exp <= 30");
    }
    let modes = if a.modes.is_empty() { vec![ModeArg::Full, ModeArg::Simplified, ModeArg::Baseline] } else { a.modes.clone() };
    let mut cells = Vec::new();
    for exp in a.min_exp..=a.max_exp {
        let inputs = sources(a, 1 << exp)?;
        for &mode in &modes {
            if mode == ModeArg::Baseline && exp > a.baseline_max_exp {
                continue;
            }
            for (source, input) in &inputs {
                cells.push(Cell { mode, source: source.clone(), input: input.clone() });
            }
        }
    }

    let jobs = a.jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())).max(1);
    let next = AtomicUsize::new(0);
    let rows: Mutex<Vec<Option<Result<String>>>> = Mutex::new((0..cells.len()).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..jobs.min(cells.len()) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(cell) = cells.get(i) else { break };
                let row = time_cell(cell, a.runs);
                rows.lock().unwrap()[i] = Some(row);
            });
        }
    });

    println!("mode,generator,n,wall_time_ms,peak_steps,ratio");
    for row in rows.into_inner().unwrap() {
        println!("{}", row.expect("every cell ran")?);
    }
    Ok(())
}
