use proptest::prelude::*;
use rand::Rng;
use slowent_core::rng::rng_for;
use slowent_core::transport::{dbar_dist, NameDistribution};
use slowent_core::BinaryWord;

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for slot in 0..=p.len() {
            let mut q = p.clone();
            q.insert(slot, k - 1);
            out.push(q);
        }
    }
    out
}

fn distinct_words(rng: &mut impl Rng, n: usize, k: usize) -> Vec<BinaryWord> {
    let mut seen = std::collections::BTreeSet::new();
    while seen.len() < k {
        seen.insert(rng.gen_range(0..1u64 << n));
    }
    seen.into_iter().map(|v| BinaryWord::from_u64(v, n)).collect()
}

#[test]
fn equal_weight_supports_match_assignment_enumeration() {
    for i in 0..100 {
        let mut rng = rng_for(77, i);
        let k = rng.gen_range(1..=6);
        let n = rng.gen_range(3..=12);
        let a = distinct_words(&mut rng, n, k);
        let b = distinct_words(&mut rng, n, k);
        let brute = permutations(k)
            .iter()
            .map(|perm| {
                perm.iter()
                    .enumerate()
                    .map(|(x, &y)| a[x].mismatches_unchecked(&b[y]))
                    .sum::<usize>() as f64
                    / (k * n) as f64
            })
            .fold(f64::INFINITY, f64::min);
        let p = NameDistribution::uniform(a).unwrap();
        let q = NameDistribution::uniform(b).unwrap();
        let exact: f64 = dbar_dist(&p, &q).unwrap();
        assert!((exact - brute).abs() < 1e-9, "instance {i}: {exact} vs {brute}");
    }
}

fn distribution(n: usize) -> impl Strategy<Value = NameDistribution> {
    (
        prop::collection::btree_set(0..1u64 << n, 1..=8),
        prop::collection::vec(0.05f64..1.0, 8),
    )
        .prop_map(move |(words, raw)| {
            let k = words.len();
            let total: f64 = raw[..k].iter().sum();
            NameDistribution::new(
                words.into_iter().map(|v| BinaryWord::from_u64(v, n)).collect(),
                raw[..k].iter().map(|r| r / total).collect(),
            )
            .unwrap()
        })
}

fn triple() -> impl Strategy<Value = (NameDistribution, NameDistribution, NameDistribution)> {
    (2usize..=12).prop_flat_map(|n| (distribution(n), distribution(n), distribution(n)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn dbar_dist_is_a_metric((p, q, r) in triple()) {
        let pq: f64 = dbar_dist(&p, &q).unwrap();
        let qp: f64 = dbar_dist(&q, &p).unwrap();
        let qr: f64 = dbar_dist(&q, &r).unwrap();
        let pr: f64 = dbar_dist(&p, &r).unwrap();
        prop_assert!(pq >= -1e-12);
        prop_assert!((pq - qp).abs() < 1e-9);
        prop_assert!(dbar_dist(&p, &p).unwrap().abs() < 1e-12);
        prop_assert!(pr <= pq + qr + 1e-9);
    }

    #[test]
    fn dbar_dist_is_convex((p1, p2, q) in triple(), which in 0usize..3) {
        let lambda = [0.25, 0.5, 0.75][which];
        let mix = NameDistribution::mixture(lambda, &p1, &p2).unwrap();
        let lhs: f64 = dbar_dist(&mix, &q).unwrap();
        let rhs = lambda * dbar_dist(&p1, &q).unwrap() + (1.0 - lambda) * dbar_dist(&p2, &q).unwrap();
        prop_assert!(lhs <= rhs + 1e-9, "{} > {}", lhs, rhs);
    }
}
