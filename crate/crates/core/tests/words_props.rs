use proptest::prelude::*;
use slowent_core::{binary_entropy, dbar_words, partition_distance, BinaryWord, LabeledPartition};

fn words(n: usize, count: usize) -> impl Strategy<Value = Vec<BinaryWord>> {
    prop::collection::vec(prop::collection::vec(any::<bool>(), n), count)
        .prop_map(|ws| ws.into_iter().map(BinaryWord::from_bits).collect())
}

fn triple() -> impl Strategy<Value = Vec<BinaryWord>> {
    (1usize..=512).prop_flat_map(|n| words(n, 3))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn dbar_is_a_metric(ws in triple()) {
        let (a, b, c) = (&ws[0], &ws[1], &ws[2]);
        let ab = dbar_words(a, b).unwrap();
        let bc = dbar_words(b, c).unwrap();
        let ac = dbar_words(a, c).unwrap();
        prop_assert!(ab >= 0.0);
        prop_assert_eq!(ab, dbar_words(b, a).unwrap());
        prop_assert_eq!(ab == 0.0, a == b);
        prop_assert!(ac <= ab + bc + 1e-12);
    }

    #[test]
    fn complement_reflects_distance(ws in triple()) {
        let d = dbar_words(&ws[0], &ws[1]).unwrap();
        let e = dbar_words(&ws[0], &ws[1].complement()).unwrap();
        prop_assert!((d - (1.0 - e)).abs() < 1e-12);
    }

    #[test]
    fn partition_distance_triangle(
        labels in prop::collection::vec((1u32..5, 1u32..5, 1u32..5), 1..40),
        raw in prop::collection::vec(0.01f64..1.0, 40),
    ) {
        let k = labels.len();
        let total: f64 = raw[..k].iter().sum();
        let weights: Vec<f64> = raw[..k].iter().map(|w| w / total).collect();
        let part = |f: fn(&(u32, u32, u32)) -> u32| {
            LabeledPartition::new(labels.iter().map(f).collect(), weights.clone()).unwrap()
        };
        let p = part(|t| t.0);
        let q = part(|t| t.1);
        let r = part(|t| t.2);
        let pq = partition_distance(&p, &q).unwrap();
        let qr = partition_distance(&q, &r).unwrap();
        let pr = partition_distance(&p, &r).unwrap();
        prop_assert!(pq >= 0.0);
        prop_assert_eq!(partition_distance(&p, &p).unwrap(), 0.0);
        prop_assert!((pq - partition_distance(&q, &p).unwrap()).abs() < 1e-15);
        prop_assert!(pr <= pq + qr + 1e-12);
    }
}

#[test]
fn entropy_midpoint_concavity_grid() {
    let grid: Vec<f64> = (0..=1000).map(|i| i as f64 / 1000.0).collect();
    for (i, &p) in grid.iter().enumerate().step_by(7) {
        for &q in &grid[i..] {
            let mid = binary_entropy((p + q) / 2.0).unwrap();
            let avg = (binary_entropy(p).unwrap() + binary_entropy(q).unwrap()) / 2.0;
            assert!(mid >= avg - 1e-12, "p={p} q={q}");
        }
    }
}
