use pathpower::error::Error;
use pathpower::tournament::{
    gen_implicit, read_tournament, splitmix_pair, write_tournament, write_trn, Rule, Tournament,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Reference values computed outside this crate, one per line:
/// `seed u v mixed_hex lowbit`.
#[test]
fn splitmix_reference_vectors() {
    let data = include_str!("data/splitmix_vectors.txt");
    let mut seen = 0;
    for line in data.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty()) {
        let f: Vec<&str> = line.split_whitespace().collect();
        let seed: u64 = f[0].parse().unwrap();
        let u: usize = f[1].parse().unwrap();
        let v: usize = f[2].parse().unwrap();
        let mixed = u64::from_str_radix(f[3], 16).unwrap();
        let low: u8 = f[4].parse().unwrap();
        assert_eq!(splitmix_pair(seed, u, v), mixed, "{line}");
        let t = Tournament::implicit(v + 1, Rule::SplitMix64 { seed });
        assert_eq!(t.beats(u, v), low == 1, "{line}");
        seen += 1;
    }
    assert!(seen >= 40);
}

#[test]
fn antisymmetry_on_both_backings() {
    let implicit = gen_implicit(1000, 5);
    let explicit = implicit.materialize();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..100_000 {
        let u = rng.gen_range(0..1000);
        let v = rng.gen_range(0..1000);
        if u == v {
            continue;
        }
        for t in [&implicit, &explicit] {
            assert_ne!(t.beats(u, v), t.beats(v, u));
            let arc = t.orient(u, v).unwrap();
            assert!(t.beats(arc.from, arc.to));
        }
    }
    assert!(implicit.orient(3, 3).is_err());
}

#[test]
fn explicit_and_implicit_agree() {
    for n in [1, 2, 17, 64, 65, 200] {
        for seed in [0, 1, 77] {
            let t = gen_implicit(n, seed);
            let m = t.materialize();
            assert!(m.is_explicit());
            assert!(t.same_orientation(&m));
            for v in 0..n {
                assert_eq!(t.out_degree(v), m.out_degree(v));
            }
        }
    }
}

#[test]
fn descriptor_round_trip_and_files() {
    let dir = tempfile::tempdir().unwrap();
    let t = gen_implicit(300, 12);
    let back = Tournament::from_descriptor(&t.descriptor()).unwrap();
    assert!(t.same_orientation(&back));

    let path = dir.path().join("t.trn");
    write_trn(&t, &path).unwrap();
    assert!(t.same_orientation(&read_tournament(&path).unwrap()));

    let path = dir.path().join("t.desc");
    write_tournament(&t, &path).unwrap();
    let reread = read_tournament(&path).unwrap();
    assert_eq!(reread.rule(), t.rule());
}

#[test]
fn truncated_file_reports_position() {
    let text = gen_implicit(10, 3).to_trn();
    let cut: Vec<&str> = text.lines().collect();
    let truncated = cut[..cut.len() - 2].join("\n");
    match Tournament::parse(&truncated) {
        Err(Error::Parse { line, .. }) => assert!(line >= 1),
        other => panic!("expected a parse error, got {other:?}"),
    }
    let short_row = text.replacen("\n0", "\n", 1);
    if short_row != text {
        assert!(matches!(Tournament::parse(&short_row), Err(Error::Parse { .. })));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn trn_round_trip(n in 1usize..=100, bits in any::<u64>()) {
        let t = Tournament::from_fn(n, |lo, hi| (splitmix_pair(bits, lo, hi) >> 7) & 1 == 1);
        let back = Tournament::parse(&t.to_trn()).unwrap();
        prop_assert!(t.same_orientation(&back));
        prop_assert_eq!(back.to_trn(), t.to_trn());
    }
}
