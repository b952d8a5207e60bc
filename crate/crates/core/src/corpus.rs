//! Synthetic inputs for benchmarks and scaling checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::baseline::gen_counterexample;

/// Log-like records whose id field cycles through 1000 values, so the
/// input becomes periodic after about 27 KB but stays repetitive at every
/// scale below that.
pub fn periodic(n: usize) -> Vec<u8> {
    let mut v = Vec::with_capacity(n + 32);
    let mut i = 0u32;
    while v.len() < n {
        v.extend_from_slice(format!("<rec id={:04}>payload</rec>\n", i % 1000).as_bytes());
        i += 1;
    }
    v.truncate(n);
    v
}

/// Prefix of the infinite Fibonacci word over `{a, b}`.
pub fn fibonacci(n: usize) -> Vec<u8> {
    let (mut a, mut b) = (b"a".to_vec(), b"ab".to_vec());
    while b.len() < n {
        let next = [b.as_slice(), a.as_slice()].concat();
        a = std::mem::replace(&mut b, next);
    }
    b.truncate(n);
    b
}

pub fn random(n: usize, seed: u64) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen()).collect()
}

/// A member of the `aXab_0 ... aXab_s` family of length at most `n`, with
/// about `sqrt(n)` blocks. `None` when `n` is too small or the alphabet
/// cannot reach it (the family tops out near 16 KB).
pub fn counterexample(n: usize) -> Option<Vec<u8>> {
    let blocks = n.isqrt().clamp(2, 127);
    let r = (n / blocks).checked_sub(3)?.min(255 - blocks);
    if r == 0 || blocks * (r + 3) * 2 < n {
        return None;
    }
    gen_counterexample(blocks - 1, r).ok()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    Periodic,
    Fibonacci,
    Random,
    Counterexample,
}

impl Generator {
    pub const ALL: [Generator; 4] = [Generator::Periodic, Generator::Fibonacci, Generator::Random, Generator::Counterexample];

    pub fn name(self) -> &'static str {
        match self {
            Generator::Periodic => "periodic",
            Generator::Fibonacci => "fibonacci",
            Generator::Random => "random",
            Generator::Counterexample => "counterexample",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|g| g.name() == s)
    }

    pub fn generate(self, n: usize, seed: u64) -> Option<Vec<u8>> {
        match self {
            Generator::Periodic => Some(periodic(n)),
            Generator::Fibonacci => Some(fibonacci(n)),
            Generator::Random => Some(random(n, seed)),
            Generator::Counterexample => counterexample(n),
        }
    }
}
