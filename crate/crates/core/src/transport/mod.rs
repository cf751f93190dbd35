//! d̄ between name distributions as an optimal transport problem, and the
//! finite relative very-weak-Bernoulli tester.

mod simplex;
mod vwb;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::scalar::Scalar;
use crate::words::BinaryWord;
use simplex::FlowNetwork;

pub use vwb::{vwb_test, Verdict, VwbParams, VwbReport, VwbVariant};

/// Largest combined support handled by the bipartite formulation.
pub const MAX_COMBINED_SUPPORT: usize = 512;
/// Largest word length for which the hypercube formulation is available.
pub const MAX_CUBE_BITS: usize = 10;

/// Probability distribution on binary words of one length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NameDistribution<T: Scalar = f64> {
    support: Vec<BinaryWord>,
    probs: Vec<T>,
}

impl<T: Scalar> NameDistribution<T> {
    pub fn new(support: Vec<BinaryWord>, probs: Vec<T>) -> Result<Self> {
        if support.is_empty() {
            return Err(domain("distribution", "empty support"));
        }
        if support.len() != probs.len() {
            return Err(Error::LengthMismatch {
                left: support.len(),
                right: probs.len(),
            });
        }
        let n = support[0].len();
        if let Some(w) = support.iter().find(|w| w.len() != n) {
            return Err(Error::LengthMismatch {
                left: n,
                right: w.len(),
            });
        }
        if probs.iter().any(|p| !(*p >= T::zero())) {
            return Err(domain("distribution", "probabilities must be non-negative"));
        }
        let total: T = probs.iter().copied().sum();
        let tol = T::of_f64(1e-10).max(T::mass_tolerance());
        if (total - T::one()).abs() > tol {
            return Err(domain("distribution", format!("probabilities sum to {total}")));
        }
        let mut seen = std::collections::HashSet::with_capacity(support.len());
        if !support.iter().all(|w| seen.insert(w)) {
            return Err(domain("distribution", "support words must be distinct"));
        }
        Ok(Self { support, probs })
    }

    pub fn point_mass(w: BinaryWord) -> Self {
        Self {
            support: vec![w],
            probs: vec![T::one()],
        }
    }

    /// Equal weights on distinct words.
    pub fn uniform(words: Vec<BinaryWord>) -> Result<Self> {
        let p = T::one() / T::of_usize(words.len().max(1));
        let probs = vec![p; words.len()];
        Self::new(words, probs)
    }

    /// Empirical distribution of a list of words (repeats allowed); the
    /// support is sorted.
    pub fn empirical(words: &[BinaryWord]) -> Result<Self> {
        let mut counts: BTreeMap<&BinaryWord, usize> = BTreeMap::new();
        for w in words {
            *counts.entry(w).or_default() += 1;
        }
        let total = T::of_usize(words.len());
        let (support, probs) = counts
            .into_iter()
            .map(|(w, c)| (w.clone(), T::of_usize(c) / total))
            .unzip();
        Self::new(support, probs)
    }

    /// `λ·a + (1 − λ)·b` on the union of the supports (sorted).
    pub fn mixture(lambda: T, a: &Self, b: &Self) -> Result<Self> {
        if a.word_len() != b.word_len() {
            return Err(Error::LengthMismatch {
                left: a.word_len(),
                right: b.word_len(),
            });
        }
        if !(lambda >= T::zero() && lambda <= T::one()) {
            return Err(domain("lambda", format!("{lambda} must lie in [0, 1]")));
        }
        let mut mass: BTreeMap<BinaryWord, T> = BTreeMap::new();
        for (w, &p) in a.support.iter().zip(&a.probs) {
            let e = mass.entry(w.clone()).or_insert(T::zero());
            *e = *e + lambda * p;
        }
        for (w, &p) in b.support.iter().zip(&b.probs) {
            let e = mass.entry(w.clone()).or_insert(T::zero());
            *e = *e + (T::one() - lambda) * p;
        }
        let (support, probs) = mass.into_iter().unzip();
        Self::new(support, probs)
    }

    pub fn support(&self) -> &[BinaryWord] {
        &self.support
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn word_len(&self) -> usize {
        self.support[0].len()
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    fn positive(&self) -> impl Iterator<Item = (&BinaryWord, T)> {
        self.support
            .iter()
            .zip(self.probs.iter().copied())
            .filter(|(_, p)| *p > T::zero())
    }
}

/// Formulation used by [`dbar_dist_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransportRoute {
    /// Transportation problem on the support-pair cost matrix.
    Bipartite,
    /// Flow on the Hamming cube `{0,1}^N` with unit edge costs.
    Hypercube,
}

fn check_lengths<T: Scalar>(p: &NameDistribution<T>, q: &NameDistribution<T>) -> Result<usize> {
    if p.word_len() != q.word_len() {
        return Err(Error::LengthMismatch {
            left: p.word_len(),
            right: q.word_len(),
        });
    }
    Ok(p.word_len())
}

/// Minimum expected d̄ over couplings of `p` and `q`.
///
/// Solved exactly by network simplex, on the bipartite support graph when the
/// combined support is at most [`MAX_COMBINED_SUPPORT`], or on the Hamming
/// cube when the words are at most [`MAX_CUBE_BITS`] long, whichever has
/// fewer arcs.
pub fn dbar_dist<T: Scalar>(p: &NameDistribution<T>, q: &NameDistribution<T>) -> Result<T> {
    let n = check_lengths(p, q)?;
    let combined = p.len() + q.len();
    let bipartite_arcs = p.len() * q.len();
    let cube_arcs = if n <= MAX_CUBE_BITS { n << n } else { usize::MAX };
    let route = if combined <= MAX_COMBINED_SUPPORT && bipartite_arcs <= cube_arcs {
        TransportRoute::Bipartite
    } else if n <= MAX_CUBE_BITS {
        TransportRoute::Hypercube
    } else {
        return Err(Error::Size {
            detail: format!(
                "combined support {combined} exceeds {MAX_COMBINED_SUPPORT} for words of length {n}; use dbar_dist_greedy"
            ),
        });
    };
    dbar_dist_with(p, q, route)
}

pub fn dbar_dist_with<T: Scalar>(p: &NameDistribution<T>, q: &NameDistribution<T>, route: TransportRoute) -> Result<T> {
    let n = check_lengths(p, q)?;
    match route {
        TransportRoute::Bipartite => bipartite(p, q, n),
        TransportRoute::Hypercube => {
            if n > MAX_CUBE_BITS {
                return Err(Error::Size {
                    detail: format!("hypercube route takes words of at most {MAX_CUBE_BITS} bits"),
                });
            }
            let mut diff = vec![T::zero(); 1 << n];
            for (w, m) in p.positive() {
                let i = w.bits_at(0, n) as usize;
                diff[i] = diff[i] + m;
            }
            for (w, m) in q.positive() {
                let i = w.bits_at(0, n) as usize;
                diff[i] = diff[i] - m;
            }
            cube_dbar(&diff, n)
        }
    }
}

fn bipartite<T: Scalar>(p: &NameDistribution<T>, q: &NameDistribution<T>, n: usize) -> Result<T> {
    let left: Vec<_> = p.positive().collect();
    let right: Vec<_> = q.positive().collect();
    if left.len() == 1 || right.len() == 1 {
        // a point mass admits only the product coupling
        let total: T = left
            .iter()
            .flat_map(|(u, a)| {
                right
                    .iter()
                    .map(move |(v, b)| *a * *b * T::of_usize(u.mismatches_unchecked(v)))
            })
            .sum();
        return Ok(total / T::of_usize(n));
    }
    let mut supply: Vec<T> = left.iter().map(|(_, m)| *m).collect();
    supply.extend(right.iter().map(|(_, m)| -*m));
    let mut net = FlowNetwork::new(supply);
    for (i, (u, _)) in left.iter().enumerate() {
        for (j, (v, _)) in right.iter().enumerate() {
            net.add_arc(i, left.len() + j, u.mismatches_unchecked(v) as i64);
        }
    }
    let (_, cost) = net.solve()?;
    Ok(cost / T::of_usize(n))
}

/// Earth mover's distance on the cube graph, divided by the word length.
/// `diff[x]` is the signed mass (`p − q`) of the word with bit pattern `x`.
pub(crate) fn cube_dbar<T: Scalar>(diff: &[T], n: usize) -> Result<T> {
    debug_assert_eq!(diff.len(), 1 << n);
    if diff.iter().all(|d| *d == T::zero()) {
        return Ok(T::zero());
    }
    let mut net = FlowNetwork::new(diff.to_vec());
    for x in 0..diff.len() {
        for b in 0..n {
            net.add_arc(x, x ^ (1 << b), 1);
        }
    }
    let (_, cost) = net.solve()?;
    Ok(cost / T::of_usize(n))
}

/// Upper bound on [`dbar_dist`] from a northwest-corner coupling of the
/// lexicographically sorted supports, improved by pairwise exchanges.
pub fn dbar_dist_greedy<T: Scalar>(p: &NameDistribution<T>, q: &NameDistribution<T>) -> Result<T> {
    let n = check_lengths(p, q)?;
    let mut left: Vec<_> = p.positive().collect();
    let mut right: Vec<_> = q.positive().collect();
    left.sort_by(|a, b| a.0.cmp(b.0));
    right.sort_by(|a, b| a.0.cmp(b.0));
    let cost = |i: usize, j: usize| left[i].0.mismatches_unchecked(right[j].0) as i64;

    let mut plan: BTreeMap<(usize, usize), T> = BTreeMap::new();
    let (mut i, mut j) = (0, 0);
    let mut a = left[0].1;
    let mut b = right[0].1;
    loop {
        let m = a.min(b);
        if m > T::zero() {
            plan.insert((i, j), m);
        }
        a = a - m;
        b = b - m;
        let last_i = i + 1 == left.len();
        let last_j = j + 1 == right.len();
        if last_i && last_j {
            break;
        }
        if (a <= b && !last_i) || last_j {
            i += 1;
            a = a + left[i].1;
        } else {
            j += 1;
            b = b + right[j].1;
        }
    }

    for _ in 0..1000 {
        let cells: Vec<((usize, usize), T)> = plan.iter().map(|(&c, &f)| (c, f)).collect();
        let mut improved = false;
        'scan: for x in 0..cells.len() {
            for y in x + 1..cells.len() {
                let ((i, j), _) = cells[x];
                let ((k, l), _) = cells[y];
                if i == k || j == l {
                    continue;
                }
                if cost(i, j) + cost(k, l) > cost(i, l) + cost(k, j) {
                    let fij = plan[&(i, j)];
                    let fkl = plan[&(k, l)];
                    let t = fij.min(fkl);
                    for (cell, delta) in [((i, j), -t), ((k, l), -t), ((i, l), t), ((k, j), t)] {
                        let e = plan.entry(cell).or_insert(T::zero());
                        *e = *e + delta;
                        if *e <= T::zero() {
                            plan.remove(&cell);
                        }
                    }
                    improved = true;
                    break 'scan;
                }
            }
        }
        if !improved {
            break;
        }
    }
    let total: T = plan
        .iter()
        .map(|(&(i, j), &f)| f * T::of_usize(cost(i, j) as usize))
        .sum();
    Ok(total / T::of_usize(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_for;
    use rand::Rng;

    fn w(s: &str) -> BinaryWord {
        s.parse().unwrap()
    }

    fn random_dist(rng: &mut impl Rng, n: usize, size: usize) -> NameDistribution {
        let mut words = std::collections::BTreeSet::new();
        while words.len() < size {
            words.insert(BinaryWord::from_u64(rng.gen::<u64>(), n));
        }
        let raw: Vec<f64> = (0..size).map(|_| rng.gen::<f64>() + 0.01).collect();
        let total: f64 = raw.iter().sum();
        NameDistribution::new(words.into_iter().collect(), raw.iter().map(|x| x / total).collect()).unwrap()
    }

    #[test]
    fn identical_distributions() {
        let p = NameDistribution::<f64>::uniform(vec![w("0011"), w("0101"), w("1110")]).unwrap();
        assert_eq!(dbar_dist(&p, &p).unwrap(), 0.0);
        assert_eq!(dbar_dist_greedy(&p, &p).unwrap(), 0.0);
    }

    #[test]
    fn point_masses() {
        let p = NameDistribution::<f64>::point_mass(w("0110"));
        let q = NameDistribution::<f64>::point_mass(w("1111"));
        assert_eq!(dbar_dist(&p, &q).unwrap(), 0.5);
        assert_eq!(dbar_dist_greedy(&p, &q).unwrap(), 0.5);
    }

    #[test]
    fn point_against_uniform() {
        let p = NameDistribution::<f64>::point_mass(w("00"));
        let q = NameDistribution::uniform(vec![w("00"), w("01"), w("10"), w("11")]).unwrap();
        assert_eq!(dbar_dist(&p, &q).unwrap(), 0.5);
        assert_eq!(dbar_dist_with(&p, &q, TransportRoute::Hypercube).unwrap(), 0.5);
    }

    #[test]
    fn routes_agree() {
        let mut rng = rng_for(3, 0);
        for _ in 0..50 {
            let n = rng.gen_range(2..=8);
            let cap = 1usize << n;
            let (sa, sb) = (rng.gen_range(1..=cap.min(30)), rng.gen_range(1..=cap.min(30)));
            let a = random_dist(&mut rng, n, sa);
            let b = random_dist(&mut rng, n, sb);
            let x = dbar_dist_with(&a, &b, TransportRoute::Bipartite).unwrap();
            let y = dbar_dist_with(&a, &b, TransportRoute::Hypercube).unwrap();
            assert!((x - y).abs() < 1e-12, "{x} vs {y}");
            assert!(dbar_dist_greedy(&a, &b).unwrap() >= x - 1e-12);
        }
    }

    #[test]
    fn large_support_falls_back_or_errors() {
        let mut rng = rng_for(4, 0);
        let a = random_dist(&mut rng, 10, 400);
        let b = random_dist(&mut rng, 10, 400);
        let exact = dbar_dist(&a, &b).unwrap();
        assert!(dbar_dist_greedy(&a, &b).unwrap() >= exact - 1e-12);
        let a = random_dist(&mut rng, 20, 300);
        let b = random_dist(&mut rng, 20, 300);
        assert!(matches!(dbar_dist(&a, &b), Err(Error::Size { .. })));
        assert!(dbar_dist_greedy(&a, &b).is_ok());
    }

    #[test]
    fn validation() {
        assert!(NameDistribution::<f64>::new(vec![w("01"), w("01")], vec![0.5, 0.5]).is_err());
        assert!(NameDistribution::<f64>::new(vec![w("01"), w("1")], vec![0.5, 0.5]).is_err());
        assert!(NameDistribution::<f64>::new(vec![w("01")], vec![0.9]).is_err());
        let p = NameDistribution::<f64>::point_mass(w("01"));
        let q = NameDistribution::<f64>::point_mass(w("011"));
        assert!(dbar_dist(&p, &q).is_err());
    }

    #[test]
    fn empirical_and_mixture() {
        let e = NameDistribution::<f64>::empirical(&[w("10"), w("01"), w("10"), w("10")]).unwrap();
        assert_eq!(e.support(), &[w("01"), w("10")]);
        assert_eq!(e.probs(), &[0.25, 0.75]);
        let m = NameDistribution::mixture(0.5, &e, &NameDistribution::point_mass(w("11"))).unwrap();
        assert_eq!(m.probs(), &[0.125, 0.375, 0.5]);
    }

    #[test]
    fn single_precision() {
        let p = NameDistribution::<f32>::point_mass(w("00"));
        let q = NameDistribution::<f32>::uniform(vec![w("00"), w("01"), w("10"), w("11")]).unwrap();
        assert!((dbar_dist(&p, &q).unwrap() - 0.5).abs() < 1e-6);
    }
}
