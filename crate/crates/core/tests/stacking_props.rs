use proptest::prelude::*;
use rand::Rng;
use slowent_core::covering::{greedy_cover, packing_lower_bound, CoverParams, WeightedSample};
use slowent_core::models::{sample_orbit, ProcessGenerator};
use slowent_core::rng::rng_for;
use slowent_core::stacking::{
    ball_bound_report, build_tower, build_tower_shuffled, independent_stack_names, skew_names, sparse_interval_lemma,
    sparse_interval_sweep, stacked_ball_bound, uniform_block_ball_mass, BallBoundReport, BlockLaw, DyadicCocycle,
    Placement, StackedNames,
};
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn chi_square_p(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    let expected = total as f64 / counts.len() as f64;
    let stat: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    1.0 - ChiSquared::new((counts.len() - 1) as f64).unwrap().cdf(stat)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn towers_tile_the_orbit(h in 1usize..300, extra in 0usize..100_000, seed in any::<u64>()) {
        let len = h * (h + 1) + extra;
        let t = build_tower(len, h).unwrap();
        t.validate().unwrap();
        let mut at = 0;
        for (b, height) in t.columns() {
            prop_assert_eq!(b, at);
            prop_assert!(height == h || height == h + 1);
            at += height;
        }
        prop_assert_eq!(at, len);
        build_tower_shuffled(len, h, seed).unwrap().validate().unwrap();
    }
}

#[test]
fn random_cocycle_preserves_the_uniform_cell_distribution() {
    let d = 8;
    let c = DyadicCocycle::random(d, 5).unwrap();
    let steps = 50;
    let mut counts = vec![0u64; 1 << d];
    let mut rng = rng_for(9, 0);
    for _ in 0..100_000 {
        let mut u: u32 = rng.gen_range(0..1 << d);
        for t in 0..steps {
            u = c.apply(t, false, u);
        }
        counts[u as usize] += 1;
    }
    assert!(chi_square_p(&counts) > 1e-3);
}

#[test]
fn identity_cocycle_needs_two_balls() {
    let base = sample_orbit(&ProcessGenerator::golden(), 10_000, 0).unwrap();
    let c = DyadicCocycle::identity(16).unwrap();
    let mut rng = rng_for(3, 0);
    let names = (0..500)
        .map(|_| skew_names(&base, &c, rng.gen_range(0..1 << 16), 200).unwrap())
        .collect::<Vec<_>>();
    assert!(names.iter().all(|w| w.count_ones() == 0 || w.count_ones() == 200));
    let s = WeightedSample::uniform(names).unwrap();
    for eps in [0.001, 0.1, 0.4] {
        let k = greedy_cover(&s, &CoverParams::new(eps, 0.0, 200).unwrap()).unwrap().k;
        assert_eq!(k, 2);
    }
}

#[test]
fn single_bit_blocks_are_fair_coins() {
    let t = build_tower(100_000, 40).unwrap();
    let sn = independent_stack_names(&t, 1, 3).unwrap();
    let names = sn.sample_names(400, 2_000, Placement::Anywhere, 1).unwrap();
    let ones: usize = names.iter().map(|w| w.count_ones()).sum();
    let f = ones as f64 / 800_000.0;
    assert!((f - 0.5).abs() < 3.0 * (0.25f64 / 800_000.0).sqrt());
}

#[test]
fn eight_bit_blocks_are_uniform_and_adjacent_blocks_independent() {
    let t = build_tower(1_000_000, 400).unwrap();
    let sn = independent_stack_names(&t, 8, 21).unwrap();
    let table = sn.block_table(100_000, 4);
    let mut marginal = vec![0u64; 256];
    for row in &table {
        marginal[row[7] as usize] += 1;
    }
    assert!(chi_square_p(&marginal) > 1e-3);

    // 16-way coarse pair cells keep ≥ 390 expected counts per cell
    let mut joint = vec![0u64; 256];
    for row in &table {
        joint[((row[7] >> 4) << 4 | row[8] >> 4) as usize] += 1;
    }
    assert!(chi_square_p(&joint) > 1e-3);
}

#[test]
fn block_ball_oracle_examples() {
    let p: f64 = uniform_block_ball_mass(10, 0.1).unwrap();
    assert!(p < 0.7);
    let b: f64 = stacked_ball_bound(40, 0.01).unwrap();
    assert!((b - 4.8e-5).abs() < 2e-6, "{b}");
}

#[test]
fn stacked_balls_respect_the_bounds() {
    let t = build_tower(1_000_000, 400).unwrap();
    let sn = independent_stack_names(&t, 10, 7).unwrap();
    let r: BallBoundReport = ball_bound_report(&sn, 0.01, 20_000, 11).unwrap();
    assert!(r.passed(), "{r:#?}");
    let base = r.checks.iter().find(|c| c.name == "base_center_ball").unwrap();
    assert!(base.estimate * 20_000.0 <= 5.0);
    assert!(r.covering_count_bound > 1e4);
}

#[test]
fn exploratory_radius_is_not_asserted() {
    let t = build_tower(200_000, 100).unwrap();
    let sn = independent_stack_names(&t, 10, 7).unwrap();
    let r: BallBoundReport = ball_bound_report(&sn, 0.3, 2_000, 11).unwrap();
    assert!(!r.asserted && !r.lemma_mode);
    assert!(r
        .checks
        .iter()
        .filter(|c| c.name.starts_with("base") || c.name.starts_with("mid"))
        .all(|c| !c.asserted));
}

#[test]
fn constant_block_names_satisfy_the_ball_bound() {
    let base = sample_orbit(&ProcessGenerator::golden(), 1_000_000, 0).unwrap();
    let t = build_tower(1_000_000, 400).unwrap();
    let c = DyadicCocycle::identity(16).unwrap();
    let sn = StackedNames::from_cocycle(&t, 10, 2, &base, &c).unwrap();
    assert!(matches!(sn.law(), BlockLaw::Cocycle { .. }));
    let r: BallBoundReport = ball_bound_report(&sn, 0.01, 20_000, 4).unwrap();
    assert!(r.passed(), "{r:#?}");
}

#[test]
fn packing_meets_the_counting_consequence() {
    let t = build_tower(1_000_000, 400).unwrap();
    let sn = independent_stack_names(&t, 10, 8).unwrap();
    let names = sn.sample_names(400, 2_000, Placement::Anywhere, 3).unwrap();
    let s = WeightedSample::uniform(names).unwrap();
    let lb = packing_lower_bound(&s, 0.01, 0.5).unwrap();
    // ½·2^{m(½−H(2ε))} ≈ 10^4 exceeds the sample, so every point is separated
    assert!(lb >= 999, "{lb}");
}

#[test]
fn sparse_interval_examples_and_random_sweep() {
    let s = sparse_interval_lemma(&[], 10, 10, 0.04).unwrap();
    assert_eq!(s.blocks.len(), 10);
    let s = sparse_interval_lemma(&[10, 11, 12, 13], 10, 10, 0.04).unwrap();
    assert_eq!(s.blocks, vec![0, 2, 3, 4, 5, 6, 7, 8, 9]);
    let sweep = sparse_interval_sweep(10_000, 1);
    assert_eq!(sweep.instances, 10_000);
    assert_eq!(sweep.strict_violations, 0);
}
