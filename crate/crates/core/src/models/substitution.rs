//! Binary substitutions `0 ↦ σ(0)`, `1 ↦ σ(1)`.

use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::complexity::WindowCounter;
use crate::words::BinaryWord;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Substitution {
    rules: [BinaryWord; 2],
}

impl Substitution {
    /// Checks primitivity and growth.
    pub fn new(zero: BinaryWord, one: BinaryWord) -> Result<Self> {
        let s = Self { rules: [zero, one] };
        s.validate()?;
        Ok(s)
    }

    /// `0 ↦ 01, 1 ↦ 0`; its fixed point is the Fibonacci word.
    pub fn fibonacci() -> Self {
        Self::new("01".parse().unwrap(), "0".parse().unwrap()).unwrap()
    }

    /// `0 ↦ 01, 1 ↦ 10`.
    pub fn thue_morse() -> Self {
        Self::new("01".parse().unwrap(), "10".parse().unwrap()).unwrap()
    }

    pub fn rule(&self, symbol: bool) -> &BinaryWord {
        &self.rules[symbol as usize]
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.rules.iter().any(|r| r.is_empty()) {
            return Err(Error::InvalidGenerator("substitution rules must be non-empty".into()));
        }
        if self.rules.iter().all(|r| r.len() == 1) {
            return Err(Error::InvalidGenerator("substitution is not length-growing".into()));
        }
        if !self.is_primitive() {
            return Err(Error::InvalidGenerator("substitution is not primitive".into()));
        }
        Ok(())
    }

    /// `M[a][b]` = occurrences of `b` in `σ(a)`.
    fn matrix(&self) -> [[u64; 2]; 2] {
        let row = |r: &BinaryWord| {
            let ones = r.count_ones() as u64;
            [r.len() as u64 - ones, ones]
        };
        [row(&self.rules[0]), row(&self.rules[1])]
    }

    /// For a 2×2 non-negative matrix, primitivity is decided by `M²`
    /// (Wielandt's bound `(n − 1)² + 1`).
    pub fn is_primitive(&self) -> bool {
        let m = self.matrix();
        let mut sq = [[0u64; 2]; 2];
        for (i, row) in sq.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = m[i][0] * m[0][j] + m[i][1] * m[1][j];
            }
        }
        sq.iter().flatten().all(|&x| x > 0)
    }

    pub fn apply(&self, w: &BinaryWord) -> BinaryWord {
        let mut out = BinaryWord::with_capacity(w.len() * 2);
        for b in w.iter() {
            out.extend_from(self.rule(b));
        }
        out
    }

    /// `σ^k(0)` for the least `k` reaching `length`, truncated to `length`.
    pub fn expand(&self, length: usize) -> BinaryWord {
        let mut w = BinaryWord::from_bits([false]);
        while w.len() < length {
            w = self.apply(&w);
        }
        w.slice(0, length)
    }

    /// Legal two-letter words of the substitution subshift, as `(a << 1) | b`.
    ///
    /// Closure of the 2-factors of `σ(0)`, `σ(1)` under "2-factors of `σ(uv)`".
    fn legal_pairs(&self) -> Vec<u8> {
        let pairs_in = |w: &BinaryWord, into: &mut FxHashSet<u8>| {
            for i in 0..w.len().saturating_sub(1) {
                into.insert(((w.get(i) as u8) << 1) | w.get(i + 1) as u8);
            }
        };
        let mut seen = FxHashSet::default();
        pairs_in(&self.rules[0], &mut seen);
        pairs_in(&self.rules[1], &mut seen);
        loop {
            let mut next = seen.clone();
            for &code in &seen {
                let uv = BinaryWord::from_bits([code & 2 != 0, code & 1 != 0]);
                pairs_in(&self.apply(&uv), &mut next);
            }
            if next.len() == seen.len() {
                let mut out: Vec<u8> = next.into_iter().collect();
                out.sort_unstable();
                return out;
            }
            seen = next;
        }
    }

    /// Exact number of length-`n` words in the language of the subshift.
    ///
    /// Once every `σ^j(a)` has length at least `n − 1`, any length-`n` factor
    /// of `σ^j(x)` straddles at most two image blocks, so it occurs in
    /// `σ^j(uv)` for a legal pair `uv`.
    pub fn language_count(&self, n: usize) -> usize {
        if n == 0 {
            return 1;
        }
        let mut images = [BinaryWord::from_bits([false]), BinaryWord::from_bits([true])];
        while images.iter().any(|w| w.len() + 1 < n) {
            images = [self.apply(&images[0]), self.apply(&images[1])];
        }
        let mut counter = WindowCounter::new(n);
        for code in self.legal_pairs() {
            let mut w = images[(code >> 1) as usize].clone();
            w.extend_from(&images[(code & 1) as usize]);
            counter.add_word(&w);
        }
        counter.count()
    }
}
