use lzlfs::engine::Compressor;
use lzlfs::oracle::naive_compress;
use lzlfs::simplified::Maximal;
use lzlfs::suffix_tree::SuffixTree;
use lzlfs::workstr::WorkingString;
use lzlfs::{compress, TieBreak};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_input(rng: &mut ChaCha8Rng, max_len: usize) -> Vec<u8> {
    let sigma = [1u8, 2, 3, 4, 16][rng.gen_range(0..5)];
    let n = rng.gen_range(0..=max_len);
    (0..n).map(|_| b'a' + rng.gen_range(0..sigma)).collect()
}

/// After every step the updated tree must match a fresh build of the shrunk
/// string, node for node.
fn check_every_step(input: &[u8], simplified: bool) -> Result<usize, String> {
    fn run<S: lzlfs::engine::OccurrenceSelector>(mut c: Compressor<S>) -> Result<usize, String> {
        let mut steps = 0;
        loop {
            let done = c.step().map_err(|e| e.to_string())?.is_none();
            let w = c.working();
            let diag = c.tree().validate(w);
            if !diag.is_empty() {
                return Err(format!("step {steps}: {diag:?}"));
            }
            let view = w.shrunk();
            let fresh_w = WorkingString::from_symbols(&view.symbols);
            let fresh = SuffixTree::build(&fresh_w);
            c.tree().same_shape(&fresh, &view.pos_map).map_err(|e| format!("step {steps}: {e}"))?;
            if !c.buckets_consistent(None) {
                return Err(format!("step {steps}: buckets out of sync"));
            }
            if done {
                return Ok(steps);
            }
            steps += 1;
        }
    }
    if simplified {
        run(Compressor::with_selector(input, Maximal, TieBreak::Leftmost))
    } else {
        run(Compressor::new(input, TieBreak::Leftmost))
    }
}

#[test]
fn updated_tree_matches_rebuild_on_random_inputs() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for case in 0..300 {
        let input = random_input(&mut rng, 200);
        for simplified in [false, true] {
            if let Err(e) = check_every_step(&input, simplified) {
                panic!("case {case} {:?} simplified={simplified}: {e}", String::from_utf8_lossy(&input));
            }
        }
    }
}

#[test]
fn engine_matches_oracle_on_random_inputs() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for case in 0..300 {
        let input = random_input(&mut rng, 120);
        let (a, ta) = compress(&input, TieBreak::Leftmost);
        let (b, tb) = naive_compress(&input);
        assert_eq!(a, b, "case {case} {:?}", String::from_utf8_lossy(&input));
        assert_eq!(ta, tb, "case {case}");
    }
}

#[test]
fn periodic_and_counterexample_inputs() {
    let mut inputs: Vec<Vec<u8>> = vec![b"aaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaa".to_vec(), b"abababababababababababab".to_vec()];
    inputs.push(lzlfs::baseline::gen_counterexample(4, 5).unwrap());
    inputs.push(b"aabaabaabaabaab".repeat(3));
    for input in inputs {
        check_every_step(&input, false).unwrap();
        check_every_step(&input, true).unwrap();
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]
    #[test]
    fn tree_stays_sound(input in proptest::collection::vec(b'a'..=b'c', 0..150)) {
        prop_assert!(check_every_step(&input, false).is_ok(), "{:?}", check_every_step(&input, false));
    }
}
