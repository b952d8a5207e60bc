use thiserror::Error;

/// A broken precondition. These indicate a bug in the caller, never bad input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ContractError {
    #[error("cannot replace {len} cells at position {position}")]
    InvalidReplacement { position: usize, len: usize },
    #[error("no leaf with id {0}")]
    UnknownLeaf(usize),
    #[error("node {node} already has a child starting with {symbol}")]
    DuplicateChild { node: u32, symbol: String },
    #[error("target locus is not above the leaf")]
    BadRedirect,
    #[error("suffix link descent left the tree")]
    SuffixAbsent,
    #[error("node {0} has no suffix link")]
    NoSuffixLink(u32),
    #[error("node {0} below a longest-repeat node is not a leaf")]
    InternalChild(u32),
    #[error("need at least two occurrences, got {0}")]
    TooFewOccurrences(usize),
    #[error("replacement gate needs at least one replaceable occurrence")]
    ZeroOccurrenceCount,
}

/// Failures while reading a container or reconstructing its contents.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodecError {
    #[error("bad magic: expected \"LZLF\"")]
    BadMagic,
    #[error("unsupported container version {0}")]
    BadVersion(u8),
    #[error("unknown mode byte {0}")]
    BadMode(u8),
    #[error("container truncated")]
    Truncated,
    #[error("varint overflows 64 bits")]
    VarintOverflow,
    #[error("{0} trailing bytes after container")]
    TrailingBytes(usize),
    #[error("inconsistent encoding: {0}")]
    Invariant(String),
    #[error("corrupt encoding: {0}")]
    Corrupt(String),
}
