//! Longest-first substitution compression.
//!
//! The compressor repeatedly picks a longest repeat of the working string,
//! replaces selected occurrences with a fresh hash symbol, and stops once no
//! repeat of length two or more is left. Three flavours are provided:
//!
//! * [`engine`]: a suffix tree updated in place after every replacement,
//!   `O(n log n)` overall;
//! * [`simplified`]: the same loop with a cheaper Type-3 rule, `O(n)`;
//! * [`baseline`]: rebuilds a suffix array each step and only replaces a
//!   candidate that passes the `len >= alpha / s + beta` gate.
//!
//! [`codec`] turns an [`Encoding`] into bytes and back, and decompresses it.
//! [`oracle`] holds slow reference implementations used by the tests.

pub mod baseline;
pub mod codec;
pub mod corpus;
pub mod encoding;
pub mod engine;
pub mod error;
pub mod oracle;
pub mod simplified;
pub mod suffix_tree;
pub mod trace;
pub mod verify;
pub mod workstr;

pub use encoding::{Encoding, OccType};
pub use engine::{compress, Compressor, StepRecord};
pub use error::{CodecError, ContractError};
pub use simplified::compress_simplified;

/// Exact rational used for the baseline gate parameters.
pub type Rational = num_rational::BigRational;

/// Which compressor produced a container.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Full,
    Simplified,
    Baseline,
}

impl Mode {
    pub fn byte(self) -> u8 {
        match self {
            Mode::Full => 0,
            Mode::Simplified => 1,
            Mode::Baseline => 2,
        }
    }

    pub fn from_byte(b: u8) -> Option<Self> {
        match b {
            0 => Some(Mode::Full),
            1 => Some(Mode::Simplified),
            2 => Some(Mode::Baseline),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Mode::Full => "full",
            Mode::Simplified => "simplified",
            Mode::Baseline => "baseline",
        }
    }
}

/// How to choose among several longest repeats of equal length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    /// The repeat with the smallest leftmost occurrence. Deterministic
    /// across implementations; may rescan a bucket per step.
    #[default]
    Leftmost,
    /// The first node in the depth bucket.
    BucketOrder,
}
