//! Suffix-array baseline: every step rebuilds SA and LCP of the current
//! string, takes the longest maximal repeat as candidate, and replaces it
//! only if `len >= alpha / s + beta`.

use std::collections::HashSet;

use num_traits::{FromPrimitive, Num, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::encoding::{assemble, Encoding};
use crate::engine::{classify, StepRecord};
use crate::error::ContractError;
use crate::workstr::{Symbol, WorkingString};
use crate::Rational;

/// Suffix array by prefix doubling with counting sorts; entries are
/// 1-based start positions.
pub fn build_sa(s: &[Symbol]) -> Vec<usize> {
    let n = s.len();
    let key: Vec<u64> = s.iter().map(|&c| order_key(c)).collect();
    let mut sa: Vec<usize> = (0..n).collect();
    sa.sort_unstable_by_key(|&i| key[i]);
    let mut rank = vec![0usize; n];
    let mut classes = 0;
    for w in 0..n {
        if w > 0 && key[sa[w]] != key[sa[w - 1]] {
            classes += 1;
        }
        rank[sa[w]] = classes;
    }
    classes += usize::from(n > 0);
    let (mut by_second, mut next) = (vec![0usize; n], vec![0usize; n]);
    let mut count = Vec::new();
    let mut k = 1;
    while classes < n {
        // Order by the rank `k` positions on; suffixes shorter than that
        // come first.
        let mut j = 0;
        for i in n.saturating_sub(k)..n {
            by_second[j] = i;
            j += 1;
        }
        for &p in &sa {
            if p >= k {
                by_second[j] = p - k;
                j += 1;
            }
        }
        // Stable counting sort by the current rank.
        count.clear();
        count.resize(classes + 1, 0);
        for &i in &by_second {
            count[rank[i] + 1] += 1;
        }
        for c in 1..=classes {
            count[c] += count[c - 1];
        }
        for &i in &by_second {
            sa[count[rank[i]]] = i;
            count[rank[i]] += 1;
        }
        let second = |i: usize| if i + k < n { rank[i + k] + 1 } else { 0 };
        next[sa[0]] = 0;
        classes = 1;
        for w in 1..n {
            let (a, b) = (sa[w - 1], sa[w]);
            if rank[a] != rank[b] || second(a) != second(b) {
                classes += 1;
            }
            next[b] = classes - 1;
        }
        std::mem::swap(&mut rank, &mut next);
        k *= 2;
    }
    sa.into_iter().map(|i| i + 1).collect()
}

/// Integer key with the same order as `Symbol`.
fn order_key(c: Symbol) -> u64 {
    match c {
        Symbol::Sentinel => 0,
        Symbol::Byte(b) => 1 + b as u64,
        Symbol::Hash(h) => 257 + h as u64,
        Symbol::Pad => u64::MAX,
    }
}

/// LCP array (Kasai et al.), `lcp[0] = 0`; `lcp[k]` pairs `sa[k - 1]` with
/// `sa[k]`.
pub fn build_lcp(s: &[Symbol], sa: &[usize]) -> Vec<usize> {
    let n = s.len();
    let mut inv = vec![0usize; n];
    for (k, &p) in sa.iter().enumerate() {
        inv[p - 1] = k;
    }
    let mut lcp = vec![0usize; n];
    let mut h = 0usize;
    for i in 0..n {
        if inv[i] > 0 {
            let j = sa[inv[i] - 1] - 1;
            while i + h < n && j + h < n && s[i + h] == s[j + h] {
                h += 1;
            }
            lcp[inv[i]] = h;
            h = h.saturating_sub(1);
        } else {
            h = 0;
        }
    }
    lcp
}

/// An LCP interval. `lo..=hi` are 1-based LCP indices; the suffixes sharing
/// the length-`p` prefix are `sa[lo - 1]` through `sa[hi]` (1-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepeatInterval {
    pub lo: usize,
    pub hi: usize,
    pub p: usize,
    /// Start positions of the suffixes in the interval, in SA order.
    pub suffix_group: Vec<usize>,
    pub is_maximal: bool,
}

impl RepeatInterval {
    pub fn leftmost(&self) -> usize {
        *self.suffix_group.iter().min().unwrap()
    }

    /// The shared prefix.
    pub fn prefix<'a>(&self, s: &'a [Symbol]) -> &'a [Symbol] {
        let start = self.suffix_group[0] - 1;
        &s[start..start + self.p]
    }
}

/// Checks the four p-interval conditions on 1-based LCP indices. Condition
/// (1) is waived for `i = 1`, which has no left neighbour.
pub fn is_p_interval(lcp: &[usize], i: usize, j: usize, p: usize) -> bool {
    let n = lcp.len();
    let at = |k: usize| lcp[k - 1];
    p >= 1
        && 1 <= i
        && i <= j
        && j <= n
        && (i == 1 || at(i - 1) < p)
        && (i..=j).all(|k| at(k) >= p)
        && (i..=j).any(|k| at(k) == p)
        && (j == n || at(j + 1) < p)
}

/// Calls `f(p, l, r)` for every p-interval with `p >= 1`, children before
/// parents; the suffixes are `sa[l..r]`.
fn walk_intervals(sa: &[usize], lcp: &[usize], mut f: impl FnMut(usize, usize, usize)) {
    let n = sa.len();
    // (lcp value, left SA index), 0-based.
    let mut stack: Vec<(usize, usize)> = vec![(0, 0)];
    for i in 1..=n {
        let cur = if i < n { lcp[i] } else { 0 };
        let mut lb = i - 1;
        while cur < stack.last().unwrap().0 {
            let (p, l) = stack.pop().unwrap();
            lb = l;
            f(p, l, i);
        }
        if cur > stack.last().unwrap().0 {
            stack.push((cur, lb));
        }
    }
}

/// Whether the suffixes starting at `group` differ in their preceding symbol
/// (or one of them has none).
fn left_maximal(s: &[Symbol], group: &[usize]) -> bool {
    let mut before = group.iter().map(|&q| (q > 1).then(|| s[q - 2]));
    let first = before.next().unwrap();
    first.is_none() || before.any(|b| b != first)
}

/// Every p-interval with `p >= 1`, child intervals before their parents.
pub fn lcp_intervals(s: &[Symbol], sa: &[usize], lcp: &[usize]) -> Vec<RepeatInterval> {
    let mut out = Vec::new();
    walk_intervals(sa, lcp, |p, l, i| {
        let group = &sa[l..i];
        out.push(RepeatInterval { lo: l + 2, hi: i, p, suffix_group: group.to_vec(), is_maximal: left_maximal(s, group) });
    });
    out
}

/// The intervals whose shared prefix is a maximal repeat.
pub fn maximal_intervals(s: &[Symbol], sa: &[usize], lcp: &[usize]) -> Vec<RepeatInterval> {
    lcp_intervals(s, sa, lcp).into_iter().filter(|iv| iv.is_maximal).collect()
}

/// `len >= alpha / s + beta`, evaluated as `len * s >= alpha + beta * s` so
/// that exact scalar types stay exact.
pub fn gate<T>(len: usize, s: usize, alpha: &T, beta: &T) -> Result<bool, ContractError>
where
    T: Num + PartialOrd + Clone + FromPrimitive,
{
    if s == 0 {
        return Err(ContractError::ZeroOccurrenceCount);
    }
    let (len, s) = (T::from_usize(len).unwrap(), T::from_usize(s).unwrap());
    Ok(len * s.clone() >= alpha.clone() + beta.clone() * s)
}

/// Parses a non-negative gate parameter written as an integer, an exact
/// decimal (`2.5`) or a fraction (`5/2`).
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    let digits = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());
    let big = |t: &str| t.parse::<num_bigint::BigInt>().ok();
    if let Some((n, d)) = s.split_once('/') {
        let (n, d) = (big(n).filter(|_| digits(n))?, big(d).filter(|_| digits(d))?);
        return (!d.is_zero()).then(|| Rational::new(n, d));
    }
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    if !(digits(int) || (int.is_empty() && digits(frac))) || (!frac.is_empty() && !digits(frac)) {
        return None;
    }
    let n = big(&format!("{int}{frac}"))?;
    Some(Rational::new(n, num_bigint::BigInt::from(10u32).pow(frac.len() as u32)))
}

/// A candidate the gate rejected.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Skipped {
    #[serde(serialize_with = "crate::trace::serialize_symbols")]
    pub lr: Vec<Symbol>,
    pub len: usize,
    pub s: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaselineOutput {
    pub encoding: Encoding,
    pub skipped: Vec<Skipped>,
    pub trace: Vec<StepRecord>,
}

/// Longest-first over maximal repeats with the replacement gate. A rejected
/// candidate is remembered and never reconsidered.
pub fn compress_baseline(input: &[u8], alpha: &Rational, beta: &Rational) -> BaselineOutput {
    let mut w = WorkingString::from_bytes(input);
    let mut marks = vec![None; w.len() + 1];
    let mut skipped = Vec::new();
    let mut rejected: HashSet<Vec<Symbol>> = HashSet::new();
    let mut trace: Vec<StepRecord> = Vec::new();

    'outer: loop {
        let view = w.shrunk();
        let s = &view.symbols;
        let sa = build_sa(s);
        let lcp = build_lcp(s, &sa);
        // bytes[j]: length of the hash-free run starting at 0-based j.
        let mut bytes = vec![0usize; s.len() + 1];
        for j in (0..s.len()).rev() {
            bytes[j] = if s[j].is_byte() { bytes[j + 1] + 1 } else { 0 };
        }
        let mut cands: Vec<(usize, usize, usize, usize)> = Vec::new();
        walk_intervals(&sa, &lcp, |p, l, i| {
            let group = &sa[l..i];
            if p >= 2 && bytes[group[0] - 1] >= p && left_maximal(s, group) {
                cands.push((p, *group.iter().min().unwrap(), l, i));
            }
        });
        cands.sort_unstable_by_key(|&(p, leftmost, _, _)| (std::cmp::Reverse(p), leftmost));
        for (len, leftmost, l, i) in cands {
            let x = s[leftmost - 1..leftmost - 1 + len].to_vec();
            if rejected.contains(&x) {
                continue;
            }
            let occ: Vec<usize> = sa[l..i].iter().map(|&q| view.pos_map[q - 1]).collect();
            let report = classify(&occ, len).expect("an interval has two suffixes");
            let count = report.s();
            let pass = if count == 0 {
                // Only a Type-1 occurrence: alpha / 0 is unbounded unless
                // alpha is zero.
                alpha.is_zero() && Rational::from_usize(len).unwrap() >= *beta
            } else {
                gate(len, count, alpha, beta).unwrap()
            };
            if !pass {
                skipped.push(Skipped { lr: x.clone(), len, s: count });
                rejected.insert(x);
                continue;
            }
            let k = trace.len() as u32 + 1;
            let order = report.replaced();
            for &(p, kind) in &order {
                w.replace_occurrence(p, len, k).expect("candidate occurrences are hash-free");
                marks[p] = Some(report.mark(p, kind, k));
            }
            let mut replaced = order;
            replaced.sort_unstable();
            trace.push(StepRecord { k, lr: x, len, replaced, report });
            continue 'outer;
        }
        break;
    }
    BaselineOutput { encoding: assemble(&w, &marks, input.len()), skipped, trace }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("s and r must be at least 1")]
    Empty,
    #[error("alphabet exhausted: s + r + 2 = {0} exceeds 256 byte values")]
    AlphabetExhausted(usize),
}

/// The string `aXab_0 aXab_1 ... aXab_s` with `|X| = r`. The `b_i` come
/// from `b-z`, `0-9`, `A-Z`, then the other byte values; `X` takes distinct
/// symbols from `A-Z`, `0-9`, `b-z`, then the rest, skipping those in use.
pub fn gen_counterexample(s: usize, r: usize) -> Result<Vec<u8>, GenError> {
    if s == 0 || r == 0 {
        return Err(GenError::Empty);
    }
    if s + r + 2 > 256 {
        return Err(GenError::AlphabetExhausted(s + r + 2));
    }
    let order = |head: Vec<u8>| -> Vec<u8> {
        let listed: HashSet<u8> = head.iter().copied().collect();
        let mut v = head;
        v.extend((0..=255u8).filter(|b| *b != b'a' && !listed.contains(b)));
        v
    };
    let bs: Vec<u8> = order((b'b'..=b'z').chain(b'0'..=b'9').chain(b'A'..=b'Z').collect())[..=s].to_vec();
    let used: HashSet<u8> = bs.iter().copied().collect();
    let x: Vec<u8> = order((b'A'..=b'Z').chain(b'0'..=b'9').chain(b'b'..=b'z').collect())
        .into_iter()
        .filter(|c| !used.contains(c))
        .take(r)
        .collect();
    let mut out = Vec::with_capacity((s + 1) * (r + 3));
    for &b in &bs {
        out.push(b'a');
        out.extend_from_slice(&x);
        out.push(b'a');
        out.push(b);
    }
    Ok(out)
}
