//! Container format and decompression.
//!
//! Layout: `"LZLF"`, version byte 1, mode byte, then unsigned LEB128
//! varints: original length, `q`, `q + 1` literal runs as (length, raw
//! bytes), factor count, `(value, length)` per factor, and the `q` F codes.
//! Hash tokens are implied between literal runs, so literal bytes need no
//! escaping.

use crate::encoding::Encoding;
use crate::error::CodecError;
use crate::Mode;

pub const MAGIC: &[u8; 4] = b"LZLF";
pub const VERSION: u8 = 1;

fn put(out: &mut Vec<u8>, v: usize) {
    leb128::write::unsigned(out, v as u64).expect("writing to a Vec cannot fail");
}

pub fn encode_container(e: &Encoding, mode: Mode) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + e.original_len / 2);
    out.extend_from_slice(MAGIC);
    out.push(VERSION);
    out.push(mode.byte());
    put(&mut out, e.original_len);
    put(&mut out, e.q());
    for run in &e.literals {
        put(&mut out, run.len());
        out.extend_from_slice(run);
    }
    put(&mut out, e.factors.len());
    for &(value, len) in &e.factors {
        put(&mut out, value);
        put(&mut out, len);
    }
    for &c in &e.f_array {
        put(&mut out, c);
    }
    out
}

struct Reader<'a> {
    rest: &'a [u8],
}

impl<'a> Reader<'a> {
    fn varint(&mut self) -> Result<usize, CodecError> {
        match leb128::read::unsigned(&mut self.rest) {
            Ok(v) => usize::try_from(v).map_err(|_| CodecError::VarintOverflow),
            Err(leb128::read::Error::Overflow) => Err(CodecError::VarintOverflow),
            Err(leb128::read::Error::IoError(_)) => Err(CodecError::Truncated),
        }
    }

    fn bytes(&mut self, n: usize) -> Result<&'a [u8], CodecError> {
        if self.rest.len() < n {
            return Err(CodecError::Truncated);
        }
        let (head, tail) = self.rest.split_at(n);
        self.rest = tail;
        Ok(head)
    }

    /// A count of items that each take at least one more byte.
    fn count(&mut self) -> Result<usize, CodecError> {
        let n = self.varint()?;
        if n > self.rest.len() {
            return Err(CodecError::Truncated);
        }
        Ok(n)
    }
}

pub fn decode_container(b: &[u8]) -> Result<(Encoding, Mode), CodecError> {
    if b.len() < 4 || &b[..4] != MAGIC {
        return Err(CodecError::BadMagic);
    }
    let mut r = Reader { rest: &b[4..] };
    let version = r.bytes(1)?[0];
    if version != VERSION {
        return Err(CodecError::BadVersion(version));
    }
    let mode_byte = r.bytes(1)?[0];
    let mode = Mode::from_byte(mode_byte).ok_or(CodecError::BadMode(mode_byte))?;
    let original_len = r.varint()?;
    let q = r.count()?;
    let mut literals = Vec::with_capacity(q + 1);
    for _ in 0..=q {
        let n = r.varint()?;
        literals.push(r.bytes(n)?.to_vec());
    }
    let nf = r.count()?;
    let mut factors = Vec::with_capacity(nf);
    for _ in 0..nf {
        factors.push((r.varint()?, r.varint()?));
    }
    let mut f_array = Vec::with_capacity(q);
    for _ in 0..q {
        f_array.push(r.varint()?);
    }
    if !r.rest.is_empty() {
        return Err(CodecError::TrailingBytes(r.rest.len()));
    }
    let e = Encoding { original_len, literals, factors, f_array };
    check_encoding(&e)?;
    Ok((e, mode))
}

/// Structural invariants every valid encoding satisfies.
pub fn check_encoding(e: &Encoding) -> Result<(), CodecError> {
    let bad = |m: String| Err(CodecError::Invariant(m));
    if e.literals.len() != e.q() + 1 {
        return bad(format!("{} literal runs for {} hash tokens", e.literals.len(), e.q()));
    }
    let mut groups = 0usize;
    let mut expected = 0usize;
    let mut total = e.literals.iter().map(Vec::len).sum::<usize>();
    let mut group_len: Vec<usize> = Vec::new();
    for (h, &c) in e.f_array.iter().enumerate() {
        let len = match c {
            0 => return bad(format!("F code 0 at token {h}")),
            1 | 2 => {
                expected += 1;
                e.factors.get(expected - 1).map(|f| f.1)
            }
            _ => {
                let j = c - 2;
                if j == groups + 1 {
                    groups += 1;
                    expected += 1;
                    let l = e.factors.get(expected - 1).map(|f| f.1);
                    group_len.push(l.unwrap_or(0));
                    l
                } else if j <= groups {
                    Some(group_len[j - 1])
                } else {
                    return bad(format!("Type-3 group {j} appears before group {}", groups + 1));
                }
            }
        };
        match len {
            Some(l) => total += l,
            None => return bad(format!("F code at token {h} has no factor left")),
        }
    }
    if expected != e.factors.len() {
        return bad(format!("{} factors listed, F codes use {expected}", e.factors.len()));
    }
    if let Some(f) = e.factors.iter().find(|f| f.0 == 0 || f.1 < 2) {
        return bad(format!("factor {f:?} out of range"));
    }
    if total != e.original_len {
        return bad(format!("tokens cover {total} bytes, header says {}", e.original_len));
    }
    Ok(())
}

/// Rebuilds the input. Every copied position reads from strictly earlier
/// output, so one left-to-right pass suffices.
pub fn decompress(e: &Encoding) -> Result<Vec<u8>, CodecError> {
    let corrupt = |m: String| Err(CodecError::Corrupt(m));
    if e.literals.len() != e.q() + 1 {
        return corrupt(format!("{} literal runs for {} hash tokens", e.literals.len(), e.q()));
    }
    let n = e.original_len;
    let mut out: Vec<u8> = Vec::with_capacity(n);
    let mut next = 0usize;
    let mut groups: Vec<(usize, usize)> = Vec::new();
    for (h, run) in e.literals.iter().enumerate() {
        if out.len() + run.len() > n {
            return corrupt(format!("literal run {h} runs past the end"));
        }
        out.extend_from_slice(run);
        let Some(&code) = e.f_array.get(h) else { break };
        let mut take = || {
            let f = e.factors.get(next).copied();
            next += 1;
            f
        };
        let factor = match code {
            1 | 2 => take(),
            c if c >= 3 => {
                let j = c - 3;
                if j == groups.len() {
                    let f = take();
                    groups.extend(f);
                    f
                } else {
                    groups.get(j).copied()
                }
            }
            _ => None,
        };
        let Some((value, len)) = factor else {
            return corrupt(format!("hash token {h} has no factor"));
        };
        // 1-based start of the fill interval.
        let start = out.len() + 1;
        if start + len - 1 > n || len == 0 {
            return corrupt(format!("hash token {h} overflows the output"));
        }
        for p in start..start + len {
            let src = if code == 1 { p.wrapping_sub(value) } else { value + (p - start) };
            if src < 1 || src >= p {
                return corrupt(format!("position {p} copies from {src}"));
            }
            out.push(out[src - 1]);
        }
    }
    if out.len() != n {
        return corrupt(format!("decoded {} bytes, expected {n}", out.len()));
    }
    if next != e.factors.len() {
        return corrupt(format!("{} factors unused", e.factors.len() - next));
    }
    Ok(out)
}
