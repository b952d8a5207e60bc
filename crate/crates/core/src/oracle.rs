//! Slow, direct reference implementations. They share no code with the
//! compressors beyond the symbol and encoding types, and exist to be compared
//! against them.

use std::collections::{BTreeSet, HashMap, HashSet};

use crate::encoding::{Encoding, OccType};
use crate::engine::{OccurrenceReport, StepRecord};
use crate::workstr::Symbol;

/// Longest common prefix of the suffixes at `i` and `j` for all `i < j`,
/// fed row by row to `visit(i, j, lcp)`, rows in decreasing `i`. Only
/// symbols accepted by `ok` may take part in a match.
fn pairwise_lcp(s: &[Symbol], ok: impl Fn(Symbol) -> bool, mut visit: impl FnMut(usize, usize, usize)) {
    let m = s.len();
    let mut next = vec![0usize; m + 1];
    let mut cur = vec![0usize; m + 1];
    for i in (0..m).rev() {
        for j in (i + 1..m).rev() {
            cur[j] = if s[i] == s[j] && ok(s[i]) { 1 + next[j + 1] } else { 0 };
            visit(i, j, cur[j]);
        }
        std::mem::swap(&mut cur, &mut next);
    }
}

/// Length of the longest repeats and the repeats themselves, sorted. Length
/// 0 and no repeats when nothing of length ≥ 2 occurs twice.
pub fn longest_repeats(s: &[Symbol]) -> (usize, Vec<Vec<Symbol>>) {
    let mut best = 0;
    let mut starts = Vec::new();
    pairwise_lcp(s, |_| true, |i, _, l| {
        if l > best {
            best = l;
            starts.clear();
        }
        if l == best && l > 0 {
            starts.push(i);
        }
    });
    if best < 2 {
        return (0, Vec::new());
    }
    let set: BTreeSet<Vec<Symbol>> = starts.iter().map(|&i| s[i..i + best].to_vec()).collect();
    (best, set.into_iter().collect())
}

/// Every maximal repeat: occurs twice, and neither all its occurrences share
/// the preceding symbol nor all share the following one. The string
/// boundaries count as distinct neighbours.
pub fn maximal_repeats(s: &[Symbol]) -> BTreeSet<Vec<Symbol>> {
    let n = s.len();
    let mut out = BTreeSet::new();
    let mut groups: Vec<Vec<usize>> = {
        let mut by: HashMap<Symbol, Vec<usize>> = HashMap::new();
        for (i, &c) in s.iter().enumerate() {
            by.entry(c).or_default().push(i);
        }
        by.into_values().filter(|g| g.len() >= 2).collect()
    };
    let mut len = 1;
    while !groups.is_empty() {
        let mut refined = Vec::new();
        for g in groups {
            let before: HashSet<Option<Symbol>> = g.iter().map(|&i| i.checked_sub(1).map(|p| s[p])).collect();
            let after: HashSet<Option<Symbol>> = g.iter().map(|&i| s.get(i + len).copied()).collect();
            let left = before.len() >= 2 || before.contains(&None);
            let right = after.len() >= 2 || after.contains(&None);
            if left && right {
                out.insert(s[g[0]..g[0] + len].to_vec());
            }
            let mut by: HashMap<Symbol, Vec<usize>> = HashMap::new();
            for &i in &g {
                if i + len < n {
                    by.entry(s[i + len]).or_default().push(i);
                }
            }
            refined.extend(by.into_values().filter(|g| g.len() >= 2));
        }
        groups = refined;
        len += 1;
    }
    out
}

/// True iff no string of two or more original bytes occurs twice. Any such
/// repeat contains a repeated pair of adjacent bytes, so pairs suffice.
pub fn no_repeat_check(s: &[Symbol]) -> bool {
    let mut seen = HashSet::new();
    s.windows(2).all(|p| match (p[0], p[1]) {
        (Symbol::Byte(a), Symbol::Byte(b)) => seen.insert((a, b)),
        _ => true,
    })
}

/// Suffix array (1-based positions) and LCP array by direct sorting.
pub fn naive_sa_lcp(s: &[Symbol]) -> (Vec<usize>, Vec<usize>) {
    let mut idx: Vec<usize> = (0..s.len()).collect();
    idx.sort_by(|&a, &b| s[a..].cmp(&s[b..]));
    let mut lcp = vec![0; s.len()];
    for k in 1..idx.len() {
        let (a, b) = (&s[idx[k - 1]..], &s[idx[k]..]);
        lcp[k] = a.iter().zip(b).take_while(|(x, y)| x == y).count();
    }
    (idx.into_iter().map(|i| i + 1).collect(), lcp)
}

/// Longest-first substitution applied literally to the shrunk string, with
/// the leftmost tie-break. Reports positions in input coordinates.
pub fn naive_compress(input: &[u8]) -> (Encoding, Vec<StepRecord>) {
    let mut s: Vec<Symbol> = input.iter().map(|&b| Symbol::Byte(b)).collect();
    s.push(Symbol::Sentinel);
    let mut pos: Vec<usize> = (1..=s.len()).collect();
    // Input position of each hash -> (type, value, len, step).
    let mut marks: HashMap<usize, (OccType, usize, usize, u32)> = HashMap::new();
    let mut trace = Vec::new();

    for k in 1u32.. {
        let mut best = 0;
        let mut first = usize::MAX;
        pairwise_lcp(&s, |c| c.is_byte(), |i, _, l| {
            if l > best || (l == best && l > 0) {
                best = l;
                first = i;
            }
        });
        if best < 2 {
            break;
        }
        let len = best;
        let x = s[first..first + len].to_vec();
        let occ: Vec<usize> = (0..=s.len() - len).filter(|&q| s[q..q + len] == x[..]).collect();

        // Classification in shrunk coordinates.
        let l = occ[0];
        let t1 = occ.get(1).copied().filter(|&q| q < l + len);
        let e = t1.unwrap_or(l) + len - 1;
        let mut picked = Vec::new();
        let mut type4 = Vec::new();
        let mut last_end = e;
        for &q in &occ[1 + t1.is_some() as usize..] {
            if q > last_end {
                picked.push(q);
                last_end = q + len - 1;
            } else {
                type4.push(q);
            }
        }
        let kind = if picked.len() == 1 { OccType::T2 } else { OccType::T3 };
        let mut replaced: Vec<(usize, OccType)> = t1.map(|q| (q, OccType::T1)).into_iter().collect();
        replaced.extend(picked.iter().map(|&q| (q, kind)));

        for &(q, t) in &replaced {
            let value = if t == OccType::T1 { pos[q] - pos[l] } else { pos[l] };
            marks.insert(pos[q], (t, value, len, k));
        }
        let to_input = |v: &[usize]| v.iter().map(|&q| pos[q]).collect::<Vec<_>>();
        let report = OccurrenceReport {
            lr_length: len,
            leftmost: pos[l],
            type1: t1.map(|q| pos[q]),
            e: pos[t1.unwrap_or(l)] + len - 1,
            type2: (kind == OccType::T2).then(|| pos[picked[0]]),
            type3: if kind == OccType::T3 { to_input(&picked) } else { Vec::new() },
            type4: to_input(&type4),
        };
        let record = StepRecord {
            k,
            lr: x,
            len,
            replaced: replaced.iter().map(|&(q, t)| (pos[q], t)).collect(),
            report,
        };

        // Rewrite the shrunk string.
        let starts: HashSet<usize> = replaced.iter().map(|r| r.0).collect();
        let (mut ns, mut np) = (Vec::with_capacity(s.len()), Vec::with_capacity(s.len()));
        let mut q = 0;
        while q < s.len() {
            if starts.contains(&q) {
                ns.push(Symbol::Hash(k));
                np.push(pos[q]);
                q += len;
            } else {
                ns.push(s[q]);
                np.push(pos[q]);
                q += 1;
            }
        }
        s = ns;
        pos = np;
        trace.push(record);
    }

    let mut enc = Encoding { original_len: input.len(), literals: vec![Vec::new()], ..Default::default() };
    let mut group_of: HashMap<u32, usize> = HashMap::new();
    for (q, &c) in s.iter().enumerate() {
        match c {
            Symbol::Byte(b) => enc.literals.last_mut().unwrap().push(b),
            Symbol::Hash(_) => {
                let (t, value, len, step) = marks[&pos[q]];
                let code = match t {
                    OccType::T1 => 1,
                    OccType::T2 => 2,
                    OccType::T3 => {
                        let next = group_of.len() + 1;
                        let j = *group_of.entry(step).or_insert(next);
                        if j < next {
                            enc.f_array.push(2 + j);
                            enc.literals.push(Vec::new());
                            continue;
                        }
                        2 + j
                    }
                };
                enc.factors.push((value, len));
                enc.f_array.push(code);
                enc.literals.push(Vec::new());
            }
            _ => {}
        }
    }
    (enc, trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::workstr::render;

    fn sym(s: &str) -> Vec<Symbol> {
        let mut v: Vec<Symbol> = s.bytes().map(Symbol::Byte).collect();
        v.push(Symbol::Sentinel);
        v
    }

    fn strings(v: &[Vec<Symbol>]) -> Vec<String> {
        v.iter().map(|x| render(x)).collect()
    }

    #[test]
    fn longest_repeat_examples() {
        let (l, r) = longest_repeats(&sym("abcabcaabcdabcacabc"));
        assert_eq!((l, strings(&r)), (4, vec!["abca".to_string(), "cabc".to_string()]));
        let (l, r) = longest_repeats(&sym("abbaaccabccbaabcb"));
        assert_eq!((l, strings(&r)), (3, vec!["abc".to_string(), "baa".to_string()]));
        assert_eq!(longest_repeats(&sym("xyz")), (0, vec![]));
    }

    #[test]
    fn maximal_repeat_examples() {
        let m: Vec<String> = maximal_repeats(&sym("abab")).iter().map(|x| render(x)).collect();
        assert_eq!(m, vec!["ab"]);
        let m: BTreeSet<String> = maximal_repeats(&sym("aaaa")).iter().map(|x| render(x)).collect();
        assert_eq!(m, ["a", "aa", "aaa"].iter().map(|s| s.to_string()).collect());
        let w = sym("aXYa0aXYa1aXYa2");
        let m: BTreeSet<String> = maximal_repeats(&w).iter().map(|x| render(x)).collect();
        assert!(m.contains("aXYa"));
        for absent in ["aXY", "XYa", "XY"] {
            assert!(!m.contains(absent), "{absent}");
        }
    }

    #[test]
    fn no_repeat_examples() {
        let mut s: Vec<Symbol> = sym("abc");
        s.splice(3..3, [Symbol::Hash(1), Symbol::Hash(2)]);
        assert!(no_repeat_check(&s));
        assert!(!no_repeat_check(&sym("abab")));
        assert!(no_repeat_check(&[]));
        assert!(!no_repeat_check(&sym("aaa")));
    }

    #[test]
    fn naive_sa_examples() {
        assert_eq!(naive_sa_lcp(&sym("abab")), (vec![5, 3, 1, 4, 2], vec![0, 0, 2, 0, 1]));
        assert_eq!(naive_sa_lcp(&sym("a")), (vec![2, 1], vec![0, 0]));
        assert_eq!(naive_sa_lcp(&sym("aaa")), (vec![4, 3, 2, 1], vec![0, 0, 1, 2]));
    }

    #[test]
    fn naive_compress_goldens() {
        let (enc, _) = naive_compress(b"abcabcaabcdabcacabc");
        assert_eq!(enc.w_prime(), "abc##d#c#");
        assert_eq!(enc.factors, vec![(3, 4), (1, 3), (1, 4)]);
        assert_eq!(enc.f_array, vec![1, 3, 2, 3]);
        let (enc, trace) = naive_compress(b"abbaaccabccbaabcb");
        assert_eq!(enc.w_prime(), "abbaacc###bcb");
        assert_eq!(enc.factors, vec![(1, 2), (6, 2), (3, 3)]);
        assert_eq!(enc.f_array, vec![2, 2, 2]);
        assert_eq!(trace.len(), 3);
    }
}
