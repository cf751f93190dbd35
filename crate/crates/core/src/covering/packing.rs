use crate::covering::WeightedSample;
use crate::error::{domain, Result};
use crate::scalar::{strict_radius, Scalar};

/// Detailed outcome of [`packing_lower_bound`].
#[derive(Debug, Clone, PartialEq)]
pub struct Packing<T: Scalar = f64> {
    /// Indices of a family of sample points pairwise at distance `≥ 2ε`.
    pub family: Vec<usize>,
    /// How many family points a cover may leave out (their mass stays `< δ`).
    pub droppable: usize,
    /// `family.len() − droppable`.
    pub bound: usize,
    pub family_mass: T,
}

/// Lower bound on the number of open `ε`-balls (centred anywhere) whose union
/// carries more than `1 − δ` of the sample mass.
///
/// Points are scanned in index order and kept when they are at distance at
/// least `2ε` from every point kept so far. An open `ε`-ball holds at most one
/// point of such a family, and a cover can only skip family points whose
/// total weight stays below `δ`; the bound is the family size minus the
/// largest number of its lightest members with weight summing below `δ`.
pub fn packing<T: Scalar>(s: &WeightedSample<T>, epsilon: T, delta: T) -> Result<Packing<T>> {
    if !(epsilon > T::zero()) {
        return Err(domain("epsilon", format!("{epsilon} must be positive")));
    }
    let n = s.word_len();
    // Separated means d ≥ 2ε, i.e. not strictly inside the 2ε ball.
    let close = strict_radius(epsilon + epsilon, n);
    let words = s.words();
    let weights = s.weights();
    let mut family: Vec<usize> = Vec::new();
    for (i, w) in words.iter().enumerate() {
        if !(weights[i] > T::zero()) {
            continue;
        }
        let separated = match close {
            None => true,
            Some(r) => family.iter().all(|&f| words[f].mismatches_within(w, r).is_none()),
        };
        if separated {
            family.push(i);
        }
    }
    let mut masses: Vec<T> = family.iter().map(|&i| weights[i]).collect();
    masses.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut droppable = 0;
    let mut acc = T::zero();
    for &m in &masses {
        if acc + m < delta {
            acc = acc + m;
            droppable += 1;
        } else {
            break;
        }
    }
    Ok(Packing {
        bound: family.len() - droppable,
        droppable,
        family_mass: masses.iter().copied().sum(),
        family,
    })
}

pub fn packing_lower_bound<T: Scalar>(s: &WeightedSample<T>, epsilon: T, delta: T) -> Result<usize> {
    packing(s, epsilon, delta).map(|p| p.bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{sample_orbit, ProcessGenerator};
    use crate::words::BinaryWord;

    #[test]
    fn identical_words() {
        let s = WeightedSample::<f64>::uniform(vec![BinaryWord::ones(12); 9]).unwrap();
        assert_eq!(packing_lower_bound(&s, 0.1, 0.01).unwrap(), 1);
    }

    #[test]
    fn two_far_words() {
        let s = WeightedSample::<f64>::uniform(vec![BinaryWord::zeros(10), BinaryWord::ones(10)]).unwrap();
        assert_eq!(packing_lower_bound(&s, 0.2, 0.01).unwrap(), 2);
        // half the mass may be dropped only if strictly below δ
        assert_eq!(packing_lower_bound(&s, 0.2, 0.5).unwrap(), 2);
        assert_eq!(packing_lower_bound(&s, 0.2, 0.51).unwrap(), 1);
    }

    #[test]
    fn iid_sample_is_nearly_all_separated() {
        let g = ProcessGenerator::Bernoulli { p: 0.5 };
        let orbit = sample_orbit(&g, 1000 * 200, 17).unwrap();
        let words: Vec<BinaryWord> = (0..1000).map(|i| orbit.symbols.slice(i * 200, 200)).collect();
        let s = WeightedSample::<f64>::uniform(words).unwrap();
        let p = packing(&s, 0.05, 0.01).unwrap();
        assert_eq!(p.family.len(), 1000);
        assert!(p.bound >= 900, "bound {}", p.bound);
    }
}
