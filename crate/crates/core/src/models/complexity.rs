//! Distinct-window enumeration and the block counts `a_n`.

use rayon::prelude::*;
use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{sample_orbit, ProcessGenerator};
use crate::words::BinaryWord;

/// Sample length from which a Sturmian window count is declared exact:
/// `n · 2^16`. The `n + 1` cylinder arcs of a rotation coding have length at
/// least of order `1/n` for the rotation numbers used here, and a
/// bounded-type rotation visits every such arc within `O(n)` steps, so a
/// factor of `2^16` leaves a wide margin.
pub const STURMIAN_SYNC_FACTOR: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Exactness {
    Exact,
    LowerBound,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockComplexity {
    pub n: usize,
    pub count: usize,
    pub exactness: Exactness,
}

/// Set of distinct length-`n` windows fed from one or more words.
pub struct WindowCounter {
    n: usize,
    short: FxHashSet<u64>,
    long: FxHashSet<Box<[u64]>>,
}

impl WindowCounter {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "window length must be positive");
        Self {
            n,
            short: FxHashSet::default(),
            long: FxHashSet::default(),
        }
    }

    pub fn add_word(&mut self, w: &BinaryWord) {
        let n = self.n;
        if w.len() < n {
            return;
        }
        let last = w.len() - n;
        if n <= 64 {
            for i in 0..=last {
                self.short.insert(w.bits_at(i, n));
            }
            return;
        }
        // Rolling buffer: bit j of the window is symbol i + j.
        let mut buf: Vec<u64> = w.slice(0, n).limbs().to_vec();
        let top_limb = (n - 1) / 64;
        let top_bit = (n - 1) % 64;
        for i in 0..=last {
            if !self.long.contains(&buf[..]) {
                self.long.insert(buf.clone().into_boxed_slice());
            }
            if i == last {
                break;
            }
            shift_in(&mut buf, w.get(i + n), top_limb, top_bit);
        }
    }

    pub fn count(&self) -> usize {
        if self.n <= 64 {
            self.short.len()
        } else {
            self.long.len()
        }
    }
}

/// Labels every window start `i ∈ [0, len − n]` with the index of its
/// distinct length-`n` window, numbered in order of first occurrence.
pub fn window_classes(w: &BinaryWord, n: usize) -> Vec<u32> {
    assert!(n >= 1, "window length must be positive");
    if w.len() < n {
        return Vec::new();
    }
    let last = w.len() - n;
    let mut out = Vec::with_capacity(last + 1);
    if n <= 64 {
        let mut ids: rustc_hash::FxHashMap<u64, u32> = Default::default();
        for i in 0..=last {
            let next = ids.len() as u32;
            out.push(*ids.entry(w.bits_at(i, n)).or_insert(next));
        }
        return out;
    }
    let mut ids: rustc_hash::FxHashMap<Box<[u64]>, u32> = Default::default();
    let mut buf: Vec<u64> = w.slice(0, n).limbs().to_vec();
    let top_limb = (n - 1) / 64;
    let top_bit = (n - 1) % 64;
    for i in 0..=last {
        let id = match ids.get(&buf[..]) {
            Some(&id) => id,
            None => {
                let id = ids.len() as u32;
                ids.insert(buf.clone().into_boxed_slice(), id);
                id
            }
        };
        out.push(id);
        if i == last {
            break;
        }
        shift_in(&mut buf, w.get(i + n), top_limb, top_bit);
    }
    out
}

#[inline]
fn shift_in(buf: &mut [u64], bit: bool, top_limb: usize, top_bit: usize) {
    for k in 0..buf.len() {
        let carry = if k + 1 < buf.len() { buf[k + 1] << 63 } else { 0 };
        buf[k] = (buf[k] >> 1) | carry;
    }
    if bit {
        buf[top_limb] |= 1u64 << top_bit;
    }
}

/// Number of distinct length-`n` windows of `w`.
pub fn distinct_windows(w: &BinaryWord, n: usize) -> usize {
    let mut c = WindowCounter::new(n);
    c.add_word(w);
    c.count()
}

/// Counts the distinct `n`-blocks in a length-`sample_len` orbit and says
/// whether the count is certified for the generator's subshift.
pub fn block_complexity(g: &ProcessGenerator, n: usize, sample_len: usize, seed: u64) -> Result<BlockComplexity> {
    if n == 0 {
        return Err(Error::Precondition("block length must be positive".into()));
    }
    if sample_len < 4 * n {
        return Err(Error::Precondition(format!(
            "sample length {sample_len} is below 4·n = {}",
            4 * n
        )));
    }
    let orbit = sample_orbit(g, sample_len, seed)?;
    let count = distinct_windows(&orbit.symbols, n);
    Ok(BlockComplexity {
        n,
        count,
        exactness: exactness(g, n, sample_len, count),
    })
}

/// `a_1, …, a_max_n` from one length-`sample_len` orbit.
pub fn block_complexity_profile(
    g: &ProcessGenerator,
    max_n: usize,
    sample_len: usize,
    seed: u64,
) -> Result<Vec<BlockComplexity>> {
    if max_n == 0 {
        return Err(Error::Precondition("block length must be positive".into()));
    }
    if sample_len < 4 * max_n {
        return Err(Error::Precondition(format!(
            "sample length {sample_len} is below 4·n = {}",
            4 * max_n
        )));
    }
    let orbit = sample_orbit(g, sample_len, seed)?;
    Ok((1..=max_n)
        .into_par_iter()
        .map(|n| {
            let count = distinct_windows(&orbit.symbols, n);
            BlockComplexity {
                n,
                count,
                exactness: exactness(g, n, sample_len, count),
            }
        })
        .collect())
}

fn exactness(g: &ProcessGenerator, n: usize, sample_len: usize, count: usize) -> Exactness {
    match g {
        ProcessGenerator::Periodic { pattern } => {
            if sample_len >= pattern.len() + n - 1 {
                Exactness::Exact
            } else {
                Exactness::LowerBound
            }
        }
        ProcessGenerator::Sturmian(_) => {
            if sample_len >= n.saturating_mul(STURMIAN_SYNC_FACTOR) {
                Exactness::Exact
            } else {
                Exactness::LowerBound
            }
        }
        ProcessGenerator::Substitution(s) => {
            if count == s.language_count(n) {
                Exactness::Exact
            } else {
                Exactness::LowerBound
            }
        }
        ProcessGenerator::Bernoulli { .. } | ProcessGenerator::Product { .. } => Exactness::LowerBound,
    }
}
