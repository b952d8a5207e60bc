use lzlfs::baseline::compress_baseline;
use lzlfs::codec::{decode_container, decompress, encode_container};
use lzlfs::{compress, compress_simplified, Encoding, Mode, Rational, TieBreak};
use proptest::prelude::*;

fn through_container(e: &Encoding, mode: Mode) -> Vec<u8> {
    let (back, m) = decode_container(&encode_container(e, mode)).unwrap();
    assert_eq!(m, mode);
    assert_eq!(&back, e);
    decompress(&back).unwrap()
}

fn bytes() -> impl Strategy<Value = Vec<u8>> {
    prop_oneof![
        proptest::collection::vec(b'a'..=b'b', 0..300),
        proptest::collection::vec(b'a'..=b'e', 0..300),
        proptest::collection::vec(any::<u8>(), 0..300),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn every_mode_round_trips(input in bytes()) {
        for tb in [TieBreak::Leftmost, TieBreak::BucketOrder] {
            let (e, _) = compress(&input, tb);
            prop_assert_eq!(through_container(&e, Mode::Full), input.clone());
            let (e, _) = compress_simplified(&input, tb);
            prop_assert_eq!(through_container(&e, Mode::Simplified), input.clone());
        }
        let zero = Rational::from_integer(0.into());
        let out = compress_baseline(&input, &zero, &zero);
        prop_assert_eq!(through_container(&out.encoding, Mode::Baseline), input.clone());
    }

    #[test]
    fn gate_only_removes_replacements(input in bytes(), alpha in 0u32..60, beta in 0u32..10) {
        let (a, b) = (Rational::from_integer(alpha.into()), Rational::from_integer(beta.into()));
        let out = compress_baseline(&input, &a, &b);
        prop_assert_eq!(decompress(&out.encoding).unwrap(), input);
        for step in &out.trace {
            let s = step.report.s();
            prop_assert!(s > 0 || alpha == 0);
            prop_assert!(s == 0 || step.len * s >= alpha as usize + beta as usize * s);
        }
    }
}
