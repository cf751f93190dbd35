use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::models::Orbit;
use crate::rng::rng_for;
use crate::scalar::{strict_radius, Scalar};
use crate::words::BinaryWord;

/// Equal-length words with non-negative weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSample<T: Scalar = f64> {
    words: Vec<BinaryWord>,
    weights: Vec<T>,
    n: usize,
}

impl<T: Scalar> WeightedSample<T> {
    pub fn new(words: Vec<BinaryWord>, weights: Vec<T>) -> Result<Self> {
        if words.is_empty() {
            return Err(domain("sample", "no words"));
        }
        if words.len() != weights.len() {
            return Err(Error::LengthMismatch {
                left: words.len(),
                right: weights.len(),
            });
        }
        let n = words[0].len();
        if n == 0 {
            return Err(domain("sample", "words must be non-empty"));
        }
        if let Some(w) = words.iter().find(|w| w.len() != n) {
            return Err(Error::LengthMismatch {
                left: n,
                right: w.len(),
            });
        }
        if weights.iter().any(|w| !(*w >= T::zero())) {
            return Err(domain("sample weight", "weights must be non-negative"));
        }
        let total: T = weights.iter().copied().sum();
        let slack = T::mass_tolerance() * T::of_usize(weights.len().max(1)).sqrt();
        if (total - T::one()).abs() > slack.max(T::mass_tolerance()) {
            return Err(domain("sample weight", format!("weights sum to {total}")));
        }
        Ok(Self { words, weights, n })
    }

    pub fn uniform(words: Vec<BinaryWord>) -> Result<Self> {
        let w = T::one() / T::of_usize(words.len().max(1));
        let weights = vec![w; words.len()];
        Self::new(words, weights)
    }

    /// Names of length `n` read at `positions` of an orbit, equally weighted.
    pub fn from_orbit_windows(orbit: &Orbit, n: usize, positions: &[usize]) -> Result<Self> {
        let words = positions
            .iter()
            .map(|&p| crate::words::extract_name(&orbit.symbols, p, n))
            .collect::<Result<Vec<_>>>()?;
        Self::uniform(words)
    }

    /// `count` names of length `n` read at uniformly random orbit positions.
    pub fn sample_orbit_names(orbit: &Orbit, n: usize, count: usize, seed: u64) -> Result<Self> {
        if orbit.len() < n {
            return Err(Error::WindowOutOfRange {
                offset: 0,
                len: n,
                available: orbit.len(),
            });
        }
        let mut rng = rng_for(seed, 0x4e41_4d45);
        let span = orbit.len() - n + 1;
        let positions: Vec<usize> = (0..count).map(|_| rng.gen_range(0..span)).collect();
        Self::from_orbit_windows(orbit, n, &positions)
    }

    pub fn words(&self) -> &[BinaryWord] {
        &self.words
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn word_len(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Indices of sample words inside the open ball `B(center, radius)`.
    pub(crate) fn ball_members(&self, center: &BinaryWord, radius: Option<usize>) -> Vec<u32> {
        let Some(r) = radius else {
            return Vec::new();
        };
        self.words
            .iter()
            .enumerate()
            .filter(|(_, w)| w.mismatches_within(center, r).is_some())
            .map(|(i, _)| i as u32)
            .collect()
    }

    /// Membership lists of every sample point's ball, computed in parallel
    /// but returned in index order.
    pub(crate) fn all_balls(&self, radius: Option<usize>) -> Vec<Vec<u32>> {
        self.words.par_iter().map(|c| self.ball_members(c, radius)).collect()
    }
}

/// Parameters of a covering query.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverParams<T: Scalar = f64> {
    pub epsilon: T,
    pub delta: T,
    pub n: usize,
}

impl<T: Scalar> CoverParams<T> {
    /// Exploratory mode: `ε > 0`, `0 ≤ δ < 1`.
    pub fn new(epsilon: T, delta: T, n: usize) -> Result<Self> {
        if !(epsilon > T::zero()) {
            return Err(domain("epsilon", format!("{epsilon} must be positive")));
        }
        if !(delta >= T::zero() && delta < T::one()) {
            return Err(domain("delta", format!("{delta} must lie in [0, 1)")));
        }
        if n == 0 {
            return Err(domain("n", "name length must be positive"));
        }
        Ok(Self { epsilon, delta, n })
    }

    /// Lemma mode additionally requires `ε ≤ 1/100` and `δ ≤ 1/100`.
    pub fn lemma_mode(epsilon: T, delta: T, n: usize) -> Result<Self> {
        let p = Self::new(epsilon, delta, n)?;
        if !p.is_lemma_mode() {
            return Err(domain(
                "cover parameters",
                format!("lemma mode needs ε, δ ≤ 1/100, got ε={epsilon}, δ={delta}"),
            ));
        }
        Ok(p)
    }

    pub fn is_lemma_mode(&self) -> bool {
        let limit = T::of_f64(0.01);
        self.epsilon <= limit && self.delta <= limit
    }

    pub(crate) fn radius(&self) -> Option<usize> {
        strict_radius(self.epsilon, self.n)
    }

    pub(crate) fn check_sample(&self, s: &WeightedSample<T>) -> Result<()> {
        if s.word_len() != self.n {
            return Err(Error::LengthMismatch {
                left: self.n,
                right: s.word_len(),
            });
        }
        Ok(())
    }

    /// Coverage test for an uncovered mass: `covered > 1 − δ`, read as
    /// `uncovered < δ`, with full coverage always sufficient.
    pub(crate) fn is_covered(&self, uncovered: T) -> bool {
        uncovered < self.delta || uncovered <= T::zero()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverMethod {
    Greedy,
    Exact,
    BlockCoding,
}

impl CoverMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            CoverMethod::Greedy => "greedy",
            CoverMethod::Exact => "exact",
            CoverMethod::BlockCoding => "block_coding",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverResult<T: Scalar = f64> {
    /// Sample (or orbit-position) indices of the chosen centres.
    pub centers: Vec<usize>,
    pub k: usize,
    pub covered_mass: T,
    /// Mass newly covered by each centre, in selection order.
    pub increments: Vec<T>,
    pub method: CoverMethod,
}

/// One CSV row: `method,n,epsilon,delta,k,covered_mass,seed`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverRow {
    pub method: String,
    pub n: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub k: usize,
    pub covered_mass: f64,
    pub seed: u64,
}

impl<T: Scalar> CoverResult<T> {
    pub fn to_row(&self, p: &CoverParams<T>, seed: u64) -> CoverRow {
        CoverRow {
            method: self.method.as_str().to_string(),
            n: p.n,
            epsilon: p.epsilon.as_f64(),
            delta: p.delta.as_f64(),
            k: self.k,
            covered_mass: self.covered_mass.as_f64(),
            seed,
        }
    }
}

/// Writes rows with the `method,n,epsilon,delta,k,covered_mass,seed` header.
pub fn write_cover_csv<W: std::io::Write>(out: W, rows: &[CoverRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_cover_csv<R: std::io::Read>(input: R) -> Result<Vec<CoverRow>> {
    csv::Reader::from_reader(input)
        .deserialize()
        .map(|r| r.map_err(|e| Error::Format(e.to_string())))
        .collect()
}

/// Total weight of sample words strictly within `epsilon` of `center`.
pub fn ball_mass<T: Scalar>(s: &WeightedSample<T>, center: &BinaryWord, epsilon: T) -> Result<T> {
    if center.len() != s.word_len() {
        return Err(Error::LengthMismatch {
            left: s.word_len(),
            right: center.len(),
        });
    }
    if !(epsilon > T::zero()) {
        return Err(domain("epsilon", format!("{epsilon} must be positive")));
    }
    let radius = strict_radius(epsilon, s.word_len());
    Ok(s.ball_members(center, radius)
        .into_iter()
        .map(|i| s.weights()[i as usize])
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn all_words(n: usize) -> Vec<BinaryWord> {
        (0..1u64 << n).map(|v| BinaryWord::from_u64(v, n)).collect()
    }

    #[test]
    fn singleton_ball() {
        let words: Vec<BinaryWord> = ["0000", "0001", "1111"].iter().map(|s| s.parse().unwrap()).collect();
        let s = WeightedSample::new(words.clone(), vec![0.3, 0.5, 0.2]).unwrap();
        assert_abs_diff_eq!(ball_mass(&s, &words[0], 1.0 / 8.0).unwrap(), 0.3);
        assert_abs_diff_eq!(ball_mass(&s, &words[0], 1.5).unwrap(), 1.0);
    }

    #[test]
    fn uniform_cube_ball() {
        // Σ_{j ≤ 2} C(10, j) = 1 + 10 + 45
        let s = WeightedSample::<f64>::uniform(all_words(10)).unwrap();
        let center = BinaryWord::from_u64(0b1011001110, 10);
        assert_abs_diff_eq!(ball_mass(&s, &center, 0.25).unwrap(), 56.0 / 1024.0, epsilon = 1e-12);
    }

    #[test]
    fn ball_mass_errors() {
        let s = WeightedSample::<f64>::uniform(all_words(3)).unwrap();
        assert!(ball_mass(&s, &BinaryWord::zeros(4), 0.5).is_err());
        assert!(ball_mass(&s, &BinaryWord::zeros(3), 0.0).is_err());
    }

    #[test]
    fn sample_validation() {
        let w = |s: &str| s.parse::<BinaryWord>().unwrap();
        assert!(WeightedSample::<f64>::new(vec![], vec![]).is_err());
        assert!(WeightedSample::new(vec![w("01"), w("011")], vec![0.5, 0.5]).is_err());
        assert!(WeightedSample::new(vec![w("01"), w("11")], vec![0.5, 0.6]).is_err());
        assert!(WeightedSample::new(vec![w("01"), w("11")], vec![1.5, -0.5]).is_err());
    }

    #[test]
    fn cover_params_modes() {
        assert!(CoverParams::lemma_mode(0.005, 0.005, 10).is_ok());
        assert!(CoverParams::lemma_mode(0.3, 0.005, 10).is_err());
        assert!(CoverParams::new(0.3, 0.0, 10).is_ok());
        assert!(CoverParams::new(0.0, 0.1, 10).is_err());
        assert!(CoverParams::new(0.1, 1.0, 10).is_err());
    }

    #[test]
    fn csv_row_layout() {
        let rows = vec![CoverRow {
            method: "greedy".into(),
            n: 16,
            epsilon: 0.2,
            delta: 0.05,
            k: 7,
            covered_mass: 0.975,
            seed: 3,
        }];
        let mut buf = Vec::new();
        write_cover_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(
            text,
            "method,n,epsilon,delta,k,covered_mass,seed\ngreedy,16,0.2,0.05,7,0.975,3\n"
        );
        assert_eq!(read_cover_csv(buf.as_slice()).unwrap(), rows);
    }
}
