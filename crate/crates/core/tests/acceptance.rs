//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if a hard criterion fails.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lzlfs::baseline::{compress_baseline, gen_counterexample};
use lzlfs::codec::{decode_container, decompress, encode_container};
use lzlfs::corpus::periodic;
use lzlfs::engine::OccurrenceSelector;
use lzlfs::simplified::Maximal;
use lzlfs::suffix_tree::SuffixTree;
use lzlfs::verify::{
    check_maximal_intervals, check_oracle, check_sa_lcp, check_simplified_maximality, check_trace, check_tree_updates,
    random_bytes, ALPHABETS,
};
use lzlfs::workstr::{render, Symbol, WorkingString};
use lzlfs::{compress, compress_simplified, Compressor, Encoding, Mode, Rational, TieBreak};

const SEED: u64 = 0x1f5_2024;
/// Live symbols left by the full compressor on the (30, 78) family string,
/// sentinel included. Measured once and frozen.
const COUNTEREXAMPLE_LIVE: usize = 142;

/// Round-trip corpus: lengths are log-uniform over `0..=MAX_LEN`, so every
/// order of magnitude is covered equally. Baseline mode is quadratic and
/// sees each input cut to `BASELINE_CAP` bytes.
const ROUND_TRIP_CASES: usize = 10_000;
const MAX_LEN: usize = 100_000;
const BASELINE_CAP: usize = 1024;

type Outcome = Result<String, String>;

fn rng(salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(SEED ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

fn log_uniform_len(r: &mut ChaCha8Rng, max: usize) -> usize {
    let x: f64 = r.gen_range(0.0..=((max + 1) as f64).ln());
    (x.exp() as usize).saturating_sub(1).min(max)
}

/// Small cases drawn over every alphabet, uniform lengths up to `max`.
fn small_cases(salt: u64, count: usize, max: usize) -> Vec<Vec<u8>> {
    let mut r = rng(salt);
    (0..count)
        .map(|i| {
            let n = r.gen_range(0..=max);
            random_bytes(&mut r, n, ALPHABETS[i % ALPHABETS.len()])
        })
        .collect()
}

fn all_pass(cases: &[Vec<u8>], check: impl Fn(&[u8]) -> Result<(), String>) -> Outcome {
    for (i, x) in cases.iter().enumerate() {
        check(x).map_err(|e| format!("case {i} (length {}): {e}", x.len()))?;
    }
    Ok(format!("{} inputs", cases.len()))
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let (enc, _) = compress(b"abcabcaabcdabcacabc", TieBreak::Leftmost);
    let took = start.elapsed();
    let want = Encoding {
        original_len: 19,
        literals: vec![b"abc".to_vec(), vec![], b"d".to_vec(), b"c".to_vec(), vec![]],
        factors: vec![(3, 4), (1, 3), (1, 4)],
        f_array: vec![1, 3, 2, 3],
    };
    if enc != want {
        return Err(format!("got {enc:?}"));
    }
    if took >= Duration::from_secs(1) {
        return Err(format!("took {took:?}"));
    }
    Ok(format!("w' = {}, {took:?}", enc.w_prime()))
}

fn criterion_2() -> Outcome {
    let mut c = Compressor::new(b"abbaaccabccbaabcb", TieBreak::Leftmost);
    let expect = [("baa", 12, "abbaaccabcc#1bcb$"), ("ab", 8, "abbaacc#2cc#1bcb$"), ("cc", 10, "abbaacc#2#3#1bcb$")];
    for (lr, pos, w) in expect {
        let st = c.step().map_err(|e| e.to_string())?.ok_or("ran out of steps")?;
        let got = (render(&st.lr), st.replaced.iter().map(|r| r.0).collect::<Vec<_>>());
        if got != (lr.to_string(), vec![pos]) {
            return Err(format!("expected {lr} at {pos}, got {got:?}"));
        }
        let view = c.working().shrunk();
        if view.render() != w {
            return Err(format!("expected {w}, got {}", view.render()));
        }
        let fresh = SuffixTree::build(&WorkingString::from_symbols(&view.symbols));
        let canon = c.tree().canonicalize(c.working(), None);
        if canon != fresh.canonicalize(&WorkingString::from_symbols(&view.symbols), Some(&view.pos_map)) {
            return Err(format!("tree after {lr} differs from the rebuilt tree"));
        }
    }
    if c.step().map_err(|e| e.to_string())?.is_some() {
        return Err("more than three steps".into());
    }
    Ok("w2, w3, w4 and trees match".into())
}

#[derive(Default)]
struct CorpusTally {
    cases: usize,
    bytes: usize,
    round_trip: Option<String>,
    invariants: Option<String>,
    invariant_checks: usize,
}

fn first_err(slot: &mut Option<String>, e: String) {
    slot.get_or_insert(e);
}

fn round_trip(enc: &Encoding, mode: Mode, x: &[u8]) -> Result<(), String> {
    let bytes = encode_container(enc, mode);
    let (back, m) = decode_container(&bytes).map_err(|e| e.to_string())?;
    if m != mode || back != *enc {
        return Err("container changed the encoding".into());
    }
    let out = decompress(&back).map_err(|e| e.to_string())?;
    (out == x).then_some(()).ok_or_else(|| "decoded bytes differ".into())
}

/// Runs one compressor to the end, checking the structural invariants on
/// the way, and returns its encoding.
fn run_checked<S: OccurrenceSelector>(x: &[u8], mut c: Compressor<S>, t: &mut CorpusTally) -> Result<Encoding, String> {
    c.run().map_err(|e| e.to_string())?;
    let check = || -> Result<(), String> {
        check_trace(x.len(), c.trace(), &c.working().shrunk().symbols)?;
        let (walked, len) = c.zone_walk_peak();
        if walked > 2 * len {
            return Err(format!("zone walk of {walked} edges for length {len}"));
        }
        if !c.hashed_deep_nodes().is_empty() {
            return Err("a deep node spells a hash".into());
        }
        if !c.buckets().is_empty() {
            return Err("depth buckets not empty at the end".into());
        }
        if c.mode() == Mode::Simplified {
            check_simplified_maximality(c.trace())?;
        }
        Ok(())
    };
    if let Err(e) = check() {
        first_err(&mut t.invariants, format!("{e} on length {}", x.len()));
    }
    t.invariant_checks += 1;
    Ok(c.finish().map_err(|e| e.to_string())?.0)
}

fn corpus() -> (CorpusTally, Duration) {
    let start = Instant::now();
    let mut r = rng(3);
    let mut t = CorpusTally::default();
    let zero = Rational::from_integer(0.into());
    let (alpha, beta) = (Rational::from_integer(30.into()), Rational::from_integer(80.into()));
    for i in 0..ROUND_TRIP_CASES {
        // Every alphabet reaches the full length at least once.
        let n = if i < ALPHABETS.len() { MAX_LEN } else { log_uniform_len(&mut r, MAX_LEN) };
        let x = random_bytes(&mut r, n, ALPHABETS[i % ALPHABETS.len()]);
        t.cases += 1;
        t.bytes += x.len();
        let full = run_checked(&x, Compressor::new(&x, TieBreak::Leftmost), &mut t)
            .and_then(|e| round_trip(&e, Mode::Full, &x));
        let simplified = run_checked(&x, Compressor::with_selector(&x, Maximal, TieBreak::Leftmost), &mut t)
            .and_then(|e| round_trip(&e, Mode::Simplified, &x));
        let cut = &x[..x.len().min(BASELINE_CAP)];
        let (a, b) = if i % 2 == 0 { (&zero, &zero) } else { (&alpha, &beta) };
        let base = round_trip(&compress_baseline(cut, a, b).encoding, Mode::Baseline, cut);
        for (mode, res) in [("full", full), ("simplified", simplified), ("baseline", base)] {
            if let Err(e) = res {
                first_err(&mut t.round_trip, format!("{mode}, case {i} (length {n}): {e}"));
            }
        }
    }
    (t, start.elapsed())
}

fn criterion_4() -> Outcome {
    all_pass(&small_cases(4, 2000, 300), |x| check_oracle(x, false))
}

fn criterion_5() -> Outcome {
    let cases = small_cases(5, 500, 2000);
    let mut steps = 0;
    for (i, x) in cases.iter().enumerate() {
        steps += check_tree_updates(Compressor::new(x, TieBreak::Leftmost))
            .map_err(|e| format!("case {i} (length {}): {e}", x.len()))?;
    }
    Ok(format!("{} inputs, {steps} steps compared", cases.len()))
}

fn criterion_6() -> Outcome {
    let x = gen_counterexample(30, 78).map_err(|e| e.to_string())?;
    let out = compress_baseline(&x, &Rational::from_integer(30.into()), &Rational::from_integer(80.into()));
    if !out.encoding.factors.is_empty() {
        return Err(format!("baseline emitted {} factors", out.encoding.factors.len()));
    }
    let axa: Vec<u8> = [&[b'a'], &x[1..79], &[b'a']].concat();
    let hit = out.skipped.iter().any(|s| s.len == 80 && s.s == 30 && s.lr.iter().copied().eq(axa.iter().map(|&b| Symbol::Byte(b))));
    if !hit {
        return Err(format!("skip list {:?} lacks (aXa, 80, 30)", out.skipped.iter().map(|s| (s.len, s.s)).collect::<Vec<_>>()));
    }
    let mut c = Compressor::new(&x, TieBreak::Leftmost);
    c.run().map_err(|e| e.to_string())?;
    let live = c.working().live_len();
    if x.len() + 1 != 2512 || live != COUNTEREXAMPLE_LIVE {
        return Err(format!("{} symbols shrank to {live}", x.len() + 1));
    }
    Ok(format!("baseline skips (aXa, 80, 30); full leaves {live} of 2512 symbols"))
}

fn criterion_8() -> Outcome {
    all_pass(&small_cases(8, 1000, 1000), |x| {
        check_sa_lcp(x)?;
        check_maximal_intervals(x)
    })
}

/// Every simplified step: the reported occurrences are exactly those found
/// by scanning the string, and the Type-3 choice is maximal.
fn simplified_by_brute_force(x: &[u8]) -> Result<(), String> {
    let mut c = Compressor::with_selector(x, Maximal, TieBreak::Leftmost);
    loop {
        let before = c.working().shrunk();
        let Some(st) = c.step().map_err(|e| e.to_string())? else { break };
        let (lr, r) = (st.lr.clone(), st.report.clone());
        let found: BTreeSet<usize> = before
            .symbols
            .windows(lr.len())
            .enumerate()
            .filter(|(_, w)| *w == lr.as_slice())
            .map(|(q, _)| before.pos_map[q])
            .collect();
        let reported: BTreeSet<usize> =
            [r.leftmost].into_iter().chain(r.type1).chain(r.type2).chain(r.type3.iter().copied()).chain(r.type4.iter().copied()).collect();
        if found != reported {
            return Err(format!("step {}: scan finds {found:?}, report lists {reported:?}", st.k));
        }
    }
    check_simplified_maximality(c.trace())
}

fn criterion_9() -> Outcome {
    all_pass(&small_cases(9, 1000, 1000), simplified_by_brute_force)
}

fn median_ms(f: impl Fn()) -> f64 {
    let mut t: Vec<f64> = (0..5)
        .map(|_| {
            let s = Instant::now();
            f();
            s.elapsed().as_secs_f64() * 1e3
        })
        .collect();
    t.sort_by(f64::total_cmp);
    t[2]
}

fn ratios(exps: std::ops::RangeInclusive<u32>, run: impl Fn(&[u8])) -> Vec<f64> {
    let times: Vec<f64> = exps
        .map(|e| {
            let x = periodic(1 << e);
            median_ms(|| run(&x))
        })
        .collect();
    times.windows(2).map(|w| w[1] / w[0]).collect()
}

fn fmt(v: &[f64]) -> String {
    v.iter().map(|r| format!("{r:.2}")).collect::<Vec<_>>().join(" ")
}

/// Soft: wall-clock ratios depend on the machine.
fn criterion_10() -> Outcome {
    let full = ratios(16..=20, |x| drop(compress(x, TieBreak::Leftmost)));
    let simp = ratios(16..=20, |x| drop(compress_simplified(x, TieBreak::Leftmost)));
    let zero = Rational::from_integer(0.into());
    let base = ratios(10..=14, |x| drop(compress_baseline(x, &zero, &zero)));
    let msg = format!("full [{}] simplified [{}] baseline 2^10..2^14 [{}]", fmt(&full), fmt(&simp), fmt(&base));
    let ok = full.iter().all(|&r| r <= 2.6) && simp.iter().all(|&r| r <= 2.2) && base.last().is_some_and(|&r| r >= 3.0);
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn main() {
    // The harness passes filters and flags; this target runs everything.
    let mut failed = Vec::new();
    let mut report = |id: u32, soft: bool, res: Outcome| {
        match &res {
            Ok(d) => println!("criterion {id:>2}: PASS  {d}"),
            Err(d) => println!("criterion {id:>2}: FAIL{}  {d}", if soft { " (soft)" } else { "" }),
        }
        if res.is_err() && !soft {
            failed.push(id);
        }
    };

    report(1, false, criterion_1());
    report(2, false, criterion_2());
    let (tally, took) = corpus();
    let budget = Duration::from_secs(300);
    let res3 = match tally.round_trip {
        Some(e) => Err(e),
        None if took >= budget => Err(format!("{} cases took {took:.1?}", tally.cases)),
        None => Ok(format!("{} cases, {} bytes, 3 modes, {took:.1?}", tally.cases, tally.bytes)),
    };
    report(3, false, res3);
    report(4, false, criterion_4());
    report(5, false, criterion_5());
    report(6, false, criterion_6());
    let res7 = match tally.invariants {
        Some(e) => Err(e),
        None => Ok(format!("{} runs of the criterion-3 corpus", tally.invariant_checks)),
    };
    report(7, false, res7);
    report(8, false, criterion_8());
    report(9, false, criterion_9());
    report(10, true, criterion_10());

    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
