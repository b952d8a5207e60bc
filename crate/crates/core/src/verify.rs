//! Randomized cross-checks between the compressors, the decoder and the
//! reference implementations. Used by the `verify` command and the tests.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::baseline::{build_lcp, build_sa, compress_baseline, maximal_intervals};
use crate::codec::{decode_container, decompress, encode_container};
use crate::engine::{classify, Compressor, OccurrenceReport, OccurrenceSelector, StepRecord};
use crate::error::ContractError;
use crate::oracle::{maximal_repeats, naive_compress, naive_sa_lcp, no_repeat_check};
use crate::simplified::{compress_simplified, Maximal};
use crate::suffix_tree::SuffixTree;
use crate::workstr::{Symbol, WorkingString};
use crate::{compress, Mode, Rational, TieBreak};

/// Alphabet sizes random inputs are drawn over.
pub const ALPHABETS: [usize; 5] = [1, 2, 4, 16, 256];

/// Random bytes over a random alphabet from [`ALPHABETS`], length uniform in
/// `0..=max_len`.
pub fn random_input<R: Rng>(rng: &mut R, max_len: usize) -> Vec<u8> {
    let sigma = ALPHABETS[rng.gen_range(0..ALPHABETS.len())];
    let n = rng.gen_range(0..=max_len);
    random_bytes(rng, n, sigma)
}

pub fn random_bytes<R: Rng>(rng: &mut R, n: usize, sigma: usize) -> Vec<u8> {
    // Small alphabets use letters so failures print readably.
    let base = if sigma <= 26 { b'a' } else { 0 };
    (0..n).map(|_| base.wrapping_add(rng.gen_range(0..sigma) as u8)).collect()
}

/// Classifies like the full method but silently drops Type 2. Used to show
/// that the oracle comparison catches a broken classifier.
#[derive(Debug, Clone, Copy, Default)]
pub struct DropType2;

impl OccurrenceSelector for DropType2 {
    fn classify(&self, occ: &[usize], len: usize) -> Result<OccurrenceReport, ContractError> {
        let mut r = classify(occ, len)?;
        if let Some(p) = r.type2.take() {
            r.type4.push(p);
        }
        Ok(r)
    }

    fn mode(&self) -> Mode {
        Mode::Full
    }
}

fn text(input: &[u8]) -> String {
    let s = String::from_utf8_lossy(input);
    if s.len() > 80 {
        format!("{}... ({} bytes)", &s[..s.char_indices().nth(80).map_or(s.len(), |c| c.0)], input.len())
    } else {
        format!("{s:?}")
    }
}

/// Compress, serialize, parse and decompress in every mode.
pub fn check_round_trip(input: &[u8]) -> Result<(), String> {
    let zero = Rational::from_integer(0.into());
    let alpha = Rational::from_integer(30.into());
    let beta = Rational::from_integer(80.into());
    let runs = [
        (Mode::Full, compress(input, TieBreak::Leftmost).0),
        (Mode::Simplified, compress_simplified(input, TieBreak::Leftmost).0),
        (Mode::Baseline, compress_baseline(input, &zero, &zero).encoding),
        (Mode::Baseline, compress_baseline(input, &alpha, &beta).encoding),
    ];
    for (mode, enc) in runs {
        let bytes = encode_container(&enc, mode);
        let (back, m) = decode_container(&bytes).map_err(|e| format!("{}: {e} on {}", mode.name(), text(input)))?;
        if back != enc || m != mode {
            return Err(format!("{}: container changed the encoding of {}", mode.name(), text(input)));
        }
        let out = decompress(&back).map_err(|e| format!("{}: {e} on {}", mode.name(), text(input)))?;
        if out != input {
            return Err(format!("{}: decoded bytes differ for {}", mode.name(), text(input)));
        }
    }
    Ok(())
}

/// Steps the compressor and compares the updated tree with a fresh build
/// of the shrunk string after every step. Also checks that no internal node
/// of depth ≥ 2 spells a hash and that the depth buckets are in sync.
pub fn check_tree_updates<S: OccurrenceSelector>(mut c: Compressor<S>) -> Result<usize, String> {
    let mut steps = 0;
    loop {
        let done = c.step().map_err(|e| format!("step {}: {e}", steps + 1))?.is_none();
        let w = c.working();
        let diag = c.tree().validate(w);
        if !diag.is_empty() {
            return Err(format!("after step {steps}: {}", diag.join("; ")));
        }
        let view = w.shrunk();
        let fresh = SuffixTree::build(&WorkingString::from_symbols(&view.symbols));
        c.tree().same_shape(&fresh, &view.pos_map).map_err(|e| format!("after step {steps}: {e}"))?;
        if !c.hashed_deep_nodes().is_empty() {
            return Err(format!("after step {steps}: a deep node spells a hash"));
        }
        if !c.buckets_consistent(None) {
            return Err(format!("after step {steps}: depth buckets out of sync"));
        }
        let (walked, len) = c.zone_walk_peak();
        if walked > 2 * len {
            return Err(format!("zone walk of {walked} edges for an LR of length {len}"));
        }
        if done {
            return Ok(steps);
        }
        steps += 1;
    }
}

/// The full compressor (or the faulty one) against the naive reference.
pub fn check_oracle(input: &[u8], fault: bool) -> Result<(), String> {
    let (got, trace) = if fault {
        Compressor::with_selector(input, DropType2, TieBreak::Leftmost).finish().map_err(|e| e.to_string())?
    } else {
        compress(input, TieBreak::Leftmost)
    };
    let (want, want_trace) = naive_compress(input);
    if got != want {
        return Err(format!("encodings differ on {}: {got:?} vs {want:?}", text(input)));
    }
    if trace != want_trace {
        return Err(format!("traces differ on {}", text(input)));
    }
    Ok(())
}

fn symbols(input: &[u8]) -> Vec<Symbol> {
    WorkingString::from_bytes(input).shrunk().symbols
}

pub fn check_sa_lcp(input: &[u8]) -> Result<(), String> {
    let s = symbols(input);
    let sa = build_sa(&s);
    let lcp = build_lcp(&s, &sa);
    if (sa.clone(), lcp) != naive_sa_lcp(&s) {
        return Err(format!("SA/LCP mismatch on {}", text(input)));
    }
    Ok(())
}

pub fn check_maximal_intervals(input: &[u8]) -> Result<(), String> {
    let s = symbols(input);
    let sa = build_sa(&s);
    let lcp = build_lcp(&s, &sa);
    let got: BTreeSet<Vec<Symbol>> = maximal_intervals(&s, &sa, &lcp).iter().map(|iv| iv.prefix(&s).to_vec()).collect();
    let want = maximal_repeats(&s);
    if got != want {
        return Err(format!("maximal repeats differ on {}: {} vs {}", text(input), got.len(), want.len()));
    }
    Ok(())
}

/// Checks a finished trace: lengths never grow, at most `n / 2` steps, at
/// most one Type 1 and one Type 2, never Type 2 together with Type 3,
/// disjoint replaced intervals, and no repeat left in `final_symbols`.
pub fn check_trace(input_len: usize, trace: &[StepRecord], final_symbols: &[Symbol]) -> Result<(), String> {
    let n = input_len + 1;
    if trace.len() > n / 2 {
        return Err(format!("{} steps for n = {n}", trace.len()));
    }
    let mut covered: Vec<(usize, usize)> = Vec::new();
    for (i, st) in trace.iter().enumerate() {
        if st.len < 2 || (i > 0 && st.len > trace[i - 1].len) {
            return Err(format!("step {} has length {} after {}", st.k, st.len, if i > 0 { trace[i - 1].len } else { 0 }));
        }
        let r = &st.report;
        if r.type2.is_some() && !r.type3.is_empty() {
            return Err(format!("step {} has Type 2 and Type 3", st.k));
        }
        let t1 = st.replaced.iter().filter(|x| x.1 == crate::OccType::T1).count();
        let t2 = st.replaced.iter().filter(|x| x.1 == crate::OccType::T2).count();
        if t1 > 1 || t2 > 1 {
            return Err(format!("step {} has {t1} Type-1 and {t2} Type-2 occurrences", st.k));
        }
        covered.extend(st.replaced.iter().map(|&(p, _)| (p, p + st.len - 1)));
    }
    covered.sort_unstable();
    if let Some(w) = covered.windows(2).find(|w| w[1].0 <= w[0].1) {
        return Err(format!("replaced intervals {:?} and {:?} overlap", w[0], w[1]));
    }
    if !no_repeat_check(final_symbols) {
        return Err("a repeat of length ≥ 2 is left".into());
    }
    Ok(())
}

/// For every simplified step: the Type-3 set is pairwise disjoint,
/// maximal among the occurrences after `e`, and at least half the size of
/// the left-greedy set.
pub fn check_simplified_maximality(trace: &[StepRecord]) -> Result<(), String> {
    for st in trace {
        let r = &st.report;
        let len = st.len;
        let mut after: Vec<usize> = r.type4.iter().chain(&r.type3).chain(&r.type2).copied().filter(|&p| p > r.e).collect();
        after.sort_unstable();
        let overlaps = |a: usize, b: usize| a.abs_diff(b) < len;
        if let Some(t2) = r.type2 {
            if after.iter().any(|&p| !overlaps(p, t2)) {
                return Err(format!("step {}: Type 2 at {t2} with a disjoint occurrence after it", st.k));
            }
            continue;
        }
        let t3 = &r.type3;
        for (i, &a) in t3.iter().enumerate() {
            if t3[i + 1..].iter().any(|&b| overlaps(a, b)) {
                return Err(format!("step {}: Type-3 occurrences overlap", st.k));
            }
        }
        if let Some(&p) = after.iter().find(|&&p| !t3.iter().any(|&t| overlaps(p, t))) {
            return Err(format!("step {}: occurrence {p} could be added", st.k));
        }
        let mut lg = 0usize;
        let mut end = r.e;
        for &p in &after {
            if p > end {
                lg += 1;
                end = p + len - 1;
            }
        }
        if lg >= 2 && t3.len() < lg.div_ceil(2) {
            return Err(format!("step {}: {} Type-3 picks, left-greedy has {lg}", st.k, t3.len()));
        }
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub seed: u64,
    pub cases: usize,
    pub max_len: usize,
    /// Swap in the [`DropType2`] classifier.
    pub fault: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: usize,
    pub failed: usize,
    pub first_failure: Option<String>,
}

impl SuiteResult {
    pub fn ok(&self) -> bool {
        self.failed == 0
    }
}

/// Largest input the suites accept; beyond this the references get slow.
pub const MAX_LEN_CAP: usize = 2000;
/// Largest input for the cubic reference compressor.
pub const ORACLE_LEN_CAP: usize = 300;

/// Runs every suite on `cases` seeded random inputs.
pub fn run(cfg: &VerifyConfig) -> Vec<SuiteResult> {
    let max_len = cfg.max_len.min(MAX_LEN_CAP);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let inputs: Vec<Vec<u8>> = (0..cfg.cases).map(|_| random_input(&mut rng, max_len)).collect();
    type Check<'a> = Box<dyn Fn(&[u8]) -> Result<(), String> + 'a>;
    let fault = cfg.fault;
    let suites: Vec<(&'static str, Check)> = vec![
        ("round-trip", Box::new(check_round_trip)),
        (
            "tree-updates",
            Box::new(|x: &[u8]| {
                check_tree_updates(Compressor::new(x, TieBreak::Leftmost))?;
                check_tree_updates(Compressor::with_selector(x, Maximal, TieBreak::Leftmost)).map(|_| ())
            }),
        ),
        ("oracle-equivalence", Box::new(move |x: &[u8]| check_oracle(&x[..x.len().min(ORACLE_LEN_CAP)], fault))),
        ("sa-lcp", Box::new(check_sa_lcp)),
        ("maximal-intervals", Box::new(|x: &[u8]| check_maximal_intervals(&x[..x.len().min(1000)]))),
        (
            "invariants",
            Box::new(|x: &[u8]| {
                let mut c = Compressor::new(x, TieBreak::Leftmost);
                c.run().map_err(|e| e.to_string())?;
                check_trace(x.len(), c.trace(), &c.working().shrunk().symbols)?;
                let mut c = Compressor::with_selector(x, Maximal, TieBreak::Leftmost);
                c.run().map_err(|e| e.to_string())?;
                check_trace(x.len(), c.trace(), &c.working().shrunk().symbols)?;
                check_simplified_maximality(c.trace())
            }),
        ),
    ];
    suites
        .into_iter()
        .map(|(name, check)| {
            let mut res = SuiteResult { name, passed: 0, failed: 0, first_failure: None };
            for x in &inputs {
                match check(x) {
                    Ok(()) => res.passed += 1,
                    Err(e) => {
                        res.failed += 1;
                        res.first_failure.get_or_insert(e);
                    }
                }
            }
            res
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run_passes() {
        let res = run(&VerifyConfig { seed: 3, cases: 20, max_len: 60, fault: false });
        assert!(res.iter().all(SuiteResult::ok), "{res:?}");
    }

    #[test]
    fn fault_is_caught() {
        let res = run(&VerifyConfig { seed: 3, cases: 40, max_len: 60, fault: true });
        let oracle = res.iter().find(|r| r.name == "oracle-equivalence").unwrap();
        assert!(oracle.failed > 0);
        assert!(res.iter().filter(|r| r.name != "oracle-equivalence").all(SuiteResult::ok));
    }

    #[test]
    fn seeded_inputs_repeat() {
        let a: Vec<_> = (0..5).map(|_| ()).scan(ChaCha8Rng::seed_from_u64(9), |r, _| Some(random_input(r, 50))).collect();
        let b: Vec<_> = (0..5).map(|_| ()).scan(ChaCha8Rng::seed_from_u64(9), |r, _| Some(random_input(r, 50))).collect();
        assert_eq!(a, b);
    }
}
