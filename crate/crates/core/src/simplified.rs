//! Linear-time variant: any maximal set of non-overlapping occurrences after
//! `e` may serve as Type 3, so no occurrence list is ever sorted.

use std::collections::HashMap;

use crate::encoding::Encoding;
use crate::engine::{head_of, Compressor, OccurrenceReport, OccurrenceSelector, StepRecord};
use crate::error::ContractError;
use crate::{Mode, TieBreak};

/// Takes each occurrence, in the given order, unless it overlaps one already
/// taken. Overlap is tested in O(1) by bucketing starts into blocks of
/// `len` positions: taken starts are `len` apart, so a block holds at most
/// one and only the neighbouring blocks can conflict.
pub fn select_type3_simplified(occ: &[usize], len: usize) -> Vec<usize> {
    let mut taken: HashMap<usize, usize> = HashMap::with_capacity(occ.len());
    let mut out = Vec::new();
    for &p in occ {
        let b = p / len;
        let clash = [b.wrapping_sub(1), b, b + 1]
            .iter()
            .filter_map(|blk| taken.get(blk))
            .any(|&q| p.abs_diff(q) < len);
        if !clash {
            taken.insert(b, p);
            out.push(p);
        }
    }
    out
}

/// Classification by linear scans only. The smallest and largest
/// occurrences after `e` are offered first, which guarantees at least two
/// Type-3 occurrences whenever Type 2 does not apply; the rest follow in
/// child order.
pub fn classify_simplified(occ: &[usize], len: usize) -> Result<OccurrenceReport, ContractError> {
    let (leftmost, type1, e) = head_of(occ, len)?;
    let mut report = OccurrenceReport { lr_length: len, leftmost, type1, e, ..Default::default() };
    let after = || occ.iter().copied().filter(|&p| p > e);
    let (Some(lo), Some(hi)) = (after().min(), after().max()) else {
        report.type4 = occ.iter().copied().filter(|&p| p != leftmost && Some(p) != type1).collect();
        return Ok(report);
    };
    let rest = || occ.iter().copied().filter(|&p| p != leftmost && Some(p) != type1);
    if hi <= lo + len - 1 {
        report.type2 = Some(lo);
        report.type4 = rest().filter(|&p| p != lo).collect();
        return Ok(report);
    }
    let order: Vec<usize> = [lo, hi].into_iter().chain(after().filter(|&p| p != lo && p != hi)).collect();
    report.type3 = select_type3_simplified(&order, len);
    let chosen: std::collections::HashSet<usize> = report.type3.iter().copied().collect();
    report.type4 = rest().filter(|p| !chosen.contains(p)).collect();
    Ok(report)
}

/// Selector for the linear-time variant.
#[derive(Debug, Clone, Copy, Default)]
pub struct Maximal;

impl OccurrenceSelector for Maximal {
    fn classify(&self, occ: &[usize], len: usize) -> Result<OccurrenceReport, ContractError> {
        classify_simplified(occ, len)
    }

    fn mode(&self) -> Mode {
        Mode::Simplified
    }
}

pub fn compress_simplified(input: &[u8], tiebreak: TieBreak) -> (Encoding, Vec<StepRecord>) {
    Compressor::with_selector(input, Maximal, tiebreak).finish().expect("compressor invariant violated")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selection_examples() {
        assert_eq!(select_type3_simplified(&[8, 17], 3), vec![8, 17]);
        assert_eq!(select_type3_simplified(&[5, 6, 7, 20], 3), vec![5, 20]);
        assert_eq!(select_type3_simplified(&[9], 4), vec![9]);
        // Scan order matters; the result is maximal either way.
        assert_eq!(select_type3_simplified(&[3, 1, 5], 3), vec![3]);
    }

    #[test]
    fn seeding_guarantees_two() {
        let r = classify_simplified(&[100, 3, 1, 5], 3).unwrap();
        // e = 3 with no Type 1 overlap from 3 (3 <= 1 + 2 makes it Type 1).
        assert_eq!(r.type1, Some(3));
        let r = classify_simplified(&[20, 12, 14, 16, 1], 3).unwrap();
        assert_eq!(r.e, 3);
        assert!(r.type3.len() >= 2);
        assert_eq!(r.type3[..2], [12, 20]);
    }

    #[test]
    fn type2_when_everything_overlaps_the_first() {
        let r = classify_simplified(&[1, 9, 10], 3).unwrap();
        assert_eq!(r.type2, Some(9));
        assert_eq!(r.type4, vec![10]);
        assert!(r.type3.is_empty());
    }

    #[test]
    fn xyz_has_nothing_to_do() {
        let (enc, trace) = compress_simplified(b"xyz", TieBreak::Leftmost);
        assert!(trace.is_empty());
        assert_eq!(enc.w_prime(), "xyz");
    }
}
