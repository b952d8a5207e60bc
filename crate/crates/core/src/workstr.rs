//! Symbols and the padded working string.
//!
//! Every replacement happens in original-string coordinates: a replaced
//! occurrence of length `len` becomes one hash symbol followed by `len - 1`
//! pad cells, so the string never changes length and positions stay valid
//! across steps. The shrunk view drops the pads.

use std::fmt;

use crate::error::ContractError;

/// One cell of a working string.
///
/// The derived order puts the sentinel below every byte, bytes below every
/// hash, and hashes in step order. Pads sort last and never take part in
/// comparisons of live text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    Sentinel,
    Byte(u8),
    /// Marker left by the replacement performed at the given step (1-based).
    Hash(u32),
    Pad,
}

impl Symbol {
    pub fn is_byte(self) -> bool {
        matches!(self, Symbol::Byte(_))
    }

    pub fn is_hash(self) -> bool {
        matches!(self, Symbol::Hash(_))
    }

    pub fn is_live(self) -> bool {
        self != Symbol::Pad
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Symbol::Sentinel => f.write_str("$"),
            Symbol::Hash(k) => write!(f, "#{k}"),
            Symbol::Pad => f.write_str("."),
            Symbol::Byte(b) => {
                if b.is_ascii_graphic() && !matches!(b, b'#' | b'$' | b'\\' | b'.') || b == b' ' {
                    write!(f, "{}", b as char)
                } else {
                    write!(f, "\\x{b:02x}")
                }
            }
        }
    }
}

/// Renders a run of symbols with the escaping used by dumps and traces.
pub fn render(symbols: &[Symbol]) -> String {
    symbols.iter().map(|s| s.to_string()).collect()
}

/// Padded working string with 1-based positions `1..=len()`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorkingString {
    // cells[0] is an unused slot so that positions index directly.
    cells: Vec<Symbol>,
    live: usize,
}

impl WorkingString {
    /// Ingests raw bytes and appends the sentinel.
    pub fn from_bytes(input: &[u8]) -> Self {
        let mut cells = Vec::with_capacity(input.len() + 2);
        cells.push(Symbol::Pad);
        cells.extend(input.iter().map(|&b| Symbol::Byte(b)));
        cells.push(Symbol::Sentinel);
        let live = cells.len() - 1;
        WorkingString { cells, live }
    }

    /// Builds an all-live string from symbols that must already end with the
    /// sentinel. Used to rebuild trees over shrunk strings.
    pub fn from_symbols(symbols: &[Symbol]) -> Self {
        assert_eq!(symbols.last(), Some(&Symbol::Sentinel), "string must end with the sentinel");
        assert!(symbols.iter().all(|s| s.is_live()), "pads are not allowed in a fresh string");
        assert_eq!(
            symbols.iter().filter(|&&s| s == Symbol::Sentinel).count(),
            1,
            "exactly one sentinel"
        );
        let mut cells = Vec::with_capacity(symbols.len() + 1);
        cells.push(Symbol::Pad);
        cells.extend_from_slice(symbols);
        WorkingString { cells, live: symbols.len() }
    }

    /// Number of positions, including pads and the sentinel.
    pub fn len(&self) -> usize {
        self.cells.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of non-pad cells.
    pub fn live_len(&self) -> usize {
        self.live
    }

    #[inline]
    pub fn get(&self, p: usize) -> Symbol {
        self.cells[p]
    }

    #[inline]
    pub fn is_live(&self, p: usize) -> bool {
        p >= 1 && p <= self.len() && self.cells[p].is_live()
    }

    /// Cells `from..=to` as a slice (1-based, inclusive).
    #[inline]
    pub fn slice(&self, from: usize, to: usize) -> &[Symbol] {
        &self.cells[from..=to]
    }

    /// The whole padded string, `cells()[p - 1]` being position `p`.
    pub fn cells(&self) -> &[Symbol] {
        &self.cells[1..]
    }

    /// First live position strictly after `p`, or `len() + 1` past the end.
    pub fn next_live(&self, p: usize) -> usize {
        let mut q = p + 1;
        while q <= self.len() && self.cells[q] == Symbol::Pad {
            q += 1;
        }
        q
    }

    /// Last live position strictly before `p`, or 0.
    pub fn prev_live(&self, p: usize) -> usize {
        let mut q = p - 1;
        while q >= 1 && self.cells[q] == Symbol::Pad {
            q -= 1;
        }
        q
    }

    /// Position of the symbol `offset` live symbols after `start`
    /// (`offset = 0` is `start` itself).
    pub fn advance(&self, start: usize, offset: usize) -> usize {
        let mut p = start;
        for _ in 0..offset {
            p = self.next_live(p);
        }
        p
    }

    /// Iterates the live symbols of the suffix beginning at `p`.
    pub fn suffix(&self, p: usize) -> impl Iterator<Item = Symbol> + '_ {
        self.cells[p..].iter().copied().filter(|s| s.is_live())
    }

    /// Number of live symbols in the suffix beginning at `p`.
    pub fn suffix_len(&self, p: usize) -> usize {
        self.suffix(p).count()
    }

    /// Writes `Hash(step)` at `i` and pads `i+1..i+len-1`.
    pub fn replace_occurrence(&mut self, i: usize, len: usize, step: u32) -> Result<(), ContractError> {
        if len < 2 || step == 0 || i == 0 || i + len - 1 > self.len() {
            return Err(ContractError::InvalidReplacement { position: i, len });
        }
        if !self.cells[i..i + len].iter().all(|s| s.is_byte()) {
            return Err(ContractError::InvalidReplacement { position: i, len });
        }
        self.cells[i] = Symbol::Hash(step);
        for c in &mut self.cells[i + 1..i + len] {
            *c = Symbol::Pad;
        }
        self.live -= len - 1;
        Ok(())
    }

    pub fn shrunk(&self) -> ShrunkView {
        let mut symbols = Vec::with_capacity(self.live);
        let mut pos_map = Vec::with_capacity(self.live);
        for (p, &s) in self.cells.iter().enumerate().skip(1) {
            if s.is_live() {
                symbols.push(s);
                pos_map.push(p);
            }
        }
        ShrunkView { symbols, pos_map }
    }
}

/// The live symbols of a working string with their original positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShrunkView {
    pub symbols: Vec<Symbol>,
    /// `pos_map[j]` is the original 1-based position of `symbols[j]`.
    pub pos_map: Vec<usize>,
}

impl ShrunkView {
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn render(&self) -> String {
        render(&self.symbols)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_input_is_just_the_sentinel() {
        let w = WorkingString::from_bytes(b"");
        assert_eq!(w.len(), 1);
        assert_eq!(w.get(1), Symbol::Sentinel);
        let v = w.shrunk();
        assert_eq!(v.symbols, vec![Symbol::Sentinel]);
        assert_eq!(v.pos_map, vec![1]);
    }

    #[test]
    fn ingest_appends_sentinel() {
        let w = WorkingString::from_bytes(b"abcabcaabcdabcacabc");
        assert_eq!(w.len(), 20);
        assert_eq!(w.get(20), Symbol::Sentinel);
        assert_eq!(w.shrunk().render(), "abcabcaabcdabcacabc$");
        let w = WorkingString::from_bytes(b"abbaaccabccbaabcb");
        assert_eq!(w.len(), 18);
        assert_eq!(w.get(18), Symbol::Sentinel);
    }

    #[test]
    fn replacement_examples() {
        let mut w = WorkingString::from_bytes(b"abbaaccabccbaabcb");
        w.replace_occurrence(12, 3, 1).unwrap();
        assert_eq!(w.shrunk().render(), "abbaaccabcc#1bcb$");

        let mut w = WorkingString::from_bytes(b"abcabcaabcdabcacabc");
        w.replace_occurrence(4, 4, 1).unwrap();
        w.replace_occurrence(12, 4, 1).unwrap();
        let v = w.shrunk();
        assert_eq!(v.render(), "abc#1abcd#1cabc$");
        assert_eq!(v.pos_map, vec![1, 2, 3, 4, 8, 9, 10, 11, 12, 16, 17, 18, 19, 20]);

        let mut w = WorkingString::from_bytes(b"aaaa");
        w.replace_occurrence(2, 3, 1).unwrap();
        assert_eq!(w.shrunk().render(), "a#1$");
    }

    #[test]
    fn replacement_rejects_hash_sentinel_and_pad() {
        let mut w = WorkingString::from_bytes(b"abcabc");
        assert!(w.replace_occurrence(6, 2, 1).is_err());
        w.replace_occurrence(1, 3, 1).unwrap();
        assert!(w.replace_occurrence(1, 2, 2).is_err());
        assert!(w.replace_occurrence(2, 2, 2).is_err());
        assert!(w.replace_occurrence(4, 1, 2).is_err());
        assert_eq!(w.shrunk().render(), "#1abc$");
    }

    #[test]
    fn live_navigation_skips_pads() {
        let mut w = WorkingString::from_bytes(b"xabcdy");
        w.replace_occurrence(2, 4, 1).unwrap();
        assert_eq!(w.next_live(2), 6);
        assert_eq!(w.prev_live(6), 2);
        assert_eq!(w.advance(1, 2), 6);
        assert_eq!(w.suffix_len(2), 3);
        assert_eq!(w.live_len(), 4);
    }
}
