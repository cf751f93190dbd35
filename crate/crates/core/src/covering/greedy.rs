use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::covering::{CoverMethod, CoverParams, CoverResult, WeightedSample};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

struct Candidate<T> {
    gain: T,
    index: usize,
    round: usize,
}

impl<T: Scalar> PartialEq for Candidate<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<T: Scalar> Eq for Candidate<T> {}

impl<T: Scalar> PartialOrd for Candidate<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

// Max-heap on gain, then on lowest index.
impl<T: Scalar> Ord for Candidate<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.gain
            .partial_cmp(&other.gain)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.index.cmp(&self.index))
    }
}

/// Greedy set cover over balls centred at sample points.
///
/// Each step takes the centre whose ball adds the most uncovered weight,
/// lowest index first on ties, until the uncovered weight drops below `δ`.
/// Gains only shrink as coverage grows, so stale heap entries are upper
/// bounds and lazy re-evaluation selects exactly the eager greedy choice.
pub fn greedy_cover<T: Scalar>(s: &WeightedSample<T>, p: &CoverParams<T>) -> Result<CoverResult<T>> {
    p.check_sample(s)?;
    let balls = s.all_balls(p.radius());
    let weights = s.weights();
    let mut covered = vec![false; s.len()];
    let gain_of = |ball: &[u32], covered: &[bool]| -> T {
        ball.iter()
            .filter(|&&j| !covered[j as usize])
            .map(|&j| weights[j as usize])
            .sum()
    };

    let mut heap: BinaryHeap<Candidate<T>> = balls
        .iter()
        .enumerate()
        .map(|(index, ball)| Candidate {
            gain: gain_of(ball, &covered),
            index,
            round: 0,
        })
        .collect();

    let mut uncovered: T = weights.iter().copied().sum();
    let mut centers = Vec::new();
    let mut increments = Vec::new();
    let mut round = 0;
    while !p.is_covered(uncovered) {
        let Some(top) = heap.pop() else {
            return Err(Error::Precondition(
                "greedy cover exhausted every centre without reaching 1 − δ".into(),
            ));
        };
        if top.round != round {
            heap.push(Candidate {
                gain: gain_of(&balls[top.index], &covered),
                index: top.index,
                round,
            });
            continue;
        }
        if top.gain <= T::zero() {
            return Err(Error::Precondition(
                "greedy cover stalled with positive uncovered mass".into(),
            ));
        }
        for &j in &balls[top.index] {
            covered[j as usize] = true;
        }
        centers.push(top.index);
        increments.push(top.gain);
        uncovered = weights.iter().zip(&covered).filter(|(_, &c)| !c).map(|(&w, _)| w).sum();
        round += 1;
    }
    let covered_mass = weights.iter().zip(&covered).filter(|(_, &c)| c).map(|(&w, _)| w).sum();
    Ok(CoverResult {
        k: centers.len(),
        centers,
        covered_mass,
        increments,
        method: CoverMethod::Greedy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::BinaryWord;

    fn words(list: &[&str]) -> Vec<BinaryWord> {
        list.iter().map(|s| s.parse().unwrap()).collect()
    }

    #[test]
    fn singleton_balls_need_every_word() {
        let s = WeightedSample::<f64>::uniform(words(&["00000", "00111", "11100", "10101", "01010"])).unwrap();
        let p = CoverParams::new(0.1, 0.0, 5).unwrap();
        let r = greedy_cover(&s, &p).unwrap();
        assert_eq!(r.k, 5);
        assert_eq!(r.centers, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn repeated_word_needs_one_ball() {
        let s = WeightedSample::<f64>::uniform(words(&["0110"; 7])).unwrap();
        for (eps, delta) in [(0.01, 0.0), (0.5, 0.3), (0.9, 0.009)] {
            let r = greedy_cover(&s, &CoverParams::new(eps, delta, 4).unwrap()).unwrap();
            assert_eq!(r.k, 1);
        }
    }

    #[test]
    fn picks_heaviest_ball_first() {
        let s = WeightedSample::new(words(&["0000", "0001", "1111"]), vec![0.2, 0.2, 0.6]).unwrap();
        let r = greedy_cover(&s, &CoverParams::new(0.3, 0.5, 4).unwrap()).unwrap();
        assert_eq!(r.centers, vec![2]);
        let r = greedy_cover(&s, &CoverParams::new(0.3, 0.0, 4).unwrap()).unwrap();
        assert_eq!(r.centers, vec![2, 0]);
        assert_eq!(r.increments, vec![0.6, 0.4]);
    }

    #[test]
    fn rejects_wrong_length() {
        let s = WeightedSample::<f64>::uniform(words(&["01"])).unwrap();
        assert!(greedy_cover(&s, &CoverParams::new(0.3, 0.0, 3).unwrap()).is_err());
    }
}
