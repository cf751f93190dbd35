use num_bigint::BigUint;
use proptest::prelude::*;
use slowent_core::models::{
    block_complexity, distinct_windows, sample_orbit, Exactness, ProcessGenerator, SturmianRotation, Substitution,
};

/// Golden rotation coding from a 200-bit fixed-point value of `(√5 − 1)/2`.
fn golden_bits(len: usize) -> Vec<bool> {
    let scale_bits = 201u64;
    let one = BigUint::from(1u8) << scale_bits;
    let root5 = (BigUint::from(5u8) << 400u32).sqrt();
    let alpha = root5 - (BigUint::from(1u8) << 200u32);
    let threshold = &one - &alpha;
    let mut x = BigUint::from(0u8);
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(x >= threshold);
        x += &alpha;
        if x >= one {
            x -= &one;
        }
    }
    out
}

#[test]
fn golden_orbit_matches_bigint_rotation() {
    let len = 100_000;
    let orbit = sample_orbit(&ProcessGenerator::golden(), len, 0).unwrap();
    let oracle = golden_bits(len);
    let first_diff = (0..len).find(|&i| orbit.symbols.get(i) != oracle[i]);
    assert_eq!(first_diff, None);
}

#[test]
fn golden_complexity_is_n_plus_one() {
    let g = ProcessGenerator::golden();
    let orbit = sample_orbit(&g, 64 << 16, 0).unwrap();
    for n in 1..=64 {
        assert_eq!(distinct_windows(&orbit.symbols, n), n + 1, "n={n}");
    }
    let c = block_complexity(&g, 64, 64 << 16, 0).unwrap();
    assert_eq!(c.exactness, Exactness::Exact);
}

#[test]
fn zero_entropy_counts_grow_slowly() {
    let gens = [
        ProcessGenerator::golden(),
        ProcessGenerator::Sturmian(SturmianRotation::silver()),
        ProcessGenerator::Substitution(Substitution::fibonacci()),
        ProcessGenerator::Substitution(Substitution::thue_morse()),
    ];
    for g in &gens {
        let orbit = sample_orbit(g, 1 << 20, 3).unwrap();
        for n in 8..=64 {
            let a = distinct_windows(&orbit.symbols, n);
            let b = distinct_windows(&orbit.symbols, 2 * n);
            assert!(b <= 4 * a, "{} n={n}: {a} → {b}", g.kind_name());
        }
    }
}

#[test]
fn bernoulli_counts_double_until_saturation() {
    let g = ProcessGenerator::bernoulli(0.5).unwrap();
    let orbit = sample_orbit(&g, 1 << 20, 5).unwrap();
    for n in 1..=12 {
        assert_eq!(distinct_windows(&orbit.symbols, n), 1 << n, "n={n}");
    }
    let big = distinct_windows(&orbit.symbols, 40);
    assert!(big > (1 << 20) - 1000);
}

#[test]
fn dropping_the_first_symbol_keeps_exact_counts() {
    let g = ProcessGenerator::golden();
    let orbit = sample_orbit(&g, 20 << 16, 0).unwrap();
    let shifted = orbit.symbols.slice(1, orbit.len() - 1);
    for n in [1, 5, 13, 20] {
        assert_eq!(distinct_windows(&orbit.symbols, n), distinct_windows(&shifted, n));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn orbits_are_deterministic(seed in any::<u64>(), len in 1usize..5000, p in 0.05f64..0.95) {
        for g in [ProcessGenerator::bernoulli(p).unwrap(), ProcessGenerator::golden()] {
            let a = sample_orbit(&g, len, seed).unwrap();
            let b = sample_orbit(&g, len, seed).unwrap();
            prop_assert_eq!(a.symbols.limbs(), b.symbols.limbs());
        }
    }
}
