//! The compressed representation `(w', Factors, F)` and its assembly from
//! per-position replacement marks.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::workstr::{Symbol, WorkingString};

/// How a replaced occurrence refers back to its source.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum OccType {
    T1,
    T2,
    T3,
}

/// What a replaced position records until the final sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Mark {
    pub kind: OccType,
    /// Back distance for Type 1, leftmost position for Types 2 and 3.
    pub value: usize,
    pub len: usize,
    pub step: u32,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Encoding {
    /// Input length in bytes (the sentinel is not counted).
    pub original_len: usize,
    /// The `q + 1` literal runs of `w'`, split at its hash tokens.
    pub literals: Vec<Vec<u8>>,
    /// `(value, length)` pairs in order of first use.
    pub factors: Vec<(usize, usize)>,
    /// One code per hash token: 1, 2, or `2 + j` for Type-3 group `j`.
    pub f_array: Vec<usize>,
}

impl Encoding {
    /// An encoding with no replacements.
    pub fn literal(input: &[u8]) -> Self {
        Encoding { original_len: input.len(), literals: vec![input.to_vec()], factors: Vec::new(), f_array: Vec::new() }
    }

    /// Number of hash tokens in `w'`.
    pub fn q(&self) -> usize {
        self.f_array.len()
    }

    /// `w'` rendered with `#` for each hash token. Bytes are shown raw, so
    /// this is only unambiguous for inputs without `#`.
    pub fn w_prime(&self) -> String {
        let mut out = String::new();
        for (h, run) in self.literals.iter().enumerate() {
            if h > 0 {
                out.push('#');
            }
            out.push_str(&String::from_utf8_lossy(run));
        }
        out
    }

    /// Symbols left in `w'`: literal bytes plus hash tokens.
    pub fn token_count(&self) -> usize {
        self.literals.iter().map(Vec::len).sum::<usize>() + self.q()
    }

    /// Counts of F codes by type: `[T1, T2, T3]`.
    pub fn histogram(&self) -> [usize; 3] {
        let mut h = [0; 3];
        for &c in &self.f_array {
            h[c.min(3) - 1] += 1;
        }
        h
    }
}

/// Sweeps the final working string left to right, turning marks into factors
/// and F codes. `marks[p]` is the mark left at position `p`, if any.
pub fn assemble(w: &WorkingString, marks: &[Option<Mark>], original_len: usize) -> Encoding {
    let mut literals = vec![Vec::new()];
    let mut factors = Vec::new();
    let mut f_array = Vec::new();
    // Type-3 group numbers by step, assigned on first appearance.
    let mut groups: HashMap<u32, usize> = HashMap::new();
    for p in 1..=w.len() {
        match w.get(p) {
            Symbol::Byte(b) => literals.last_mut().unwrap().push(b),
            Symbol::Hash(_) => {
                let m = marks[p].expect("every hash position carries a mark");
                let code = match m.kind {
                    OccType::T1 => {
                        factors.push((m.value, m.len));
                        1
                    }
                    OccType::T2 => {
                        factors.push((m.value, m.len));
                        2
                    }
                    OccType::T3 => match groups.get(&m.step) {
                        Some(&j) => 2 + j,
                        None => {
                            let j = groups.len() + 1;
                            groups.insert(m.step, j);
                            factors.push((m.value, m.len));
                            2 + j
                        }
                    },
                };
                f_array.push(code);
                literals.push(Vec::new());
            }
            Symbol::Sentinel | Symbol::Pad => {}
        }
    }
    Encoding { original_len, literals, factors, f_array }
}
