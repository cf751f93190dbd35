//! Binary words and the normalized Hamming (d̄) metric.
//!
//! Words are packed least-significant-bit first into `u64` limbs: symbol `i`
//! lives in limb `i / 64` at bit `i % 64`. Bits past `len` are always zero,
//! which lets equality, hashing and mismatch counting work limb-wise.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use crate::error::{domain, Error, Result};
use crate::scalar::Scalar;

const LIMB: usize = 64;

#[inline]
fn limbs_for(len: usize) -> usize {
    len.div_ceil(LIMB)
}

#[inline]
fn tail_mask(len: usize) -> u64 {
    match len % LIMB {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

/// Fixed-length 0/1 word.
#[derive(Clone, Default)]
pub struct BinaryWord {
    limbs: Vec<u64>,
    len: usize,
}

impl BinaryWord {
    /// All-zero word of length `len`.
    pub fn zeros(len: usize) -> Self {
        Self {
            limbs: vec![0; limbs_for(len)],
            len,
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut w = Self {
            limbs: vec![u64::MAX; limbs_for(len)],
            len,
        };
        w.clear_tail();
        w
    }

    pub fn with_capacity(bits: usize) -> Self {
        Self {
            limbs: Vec::with_capacity(limbs_for(bits)),
            len: 0,
        }
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut w = Self::default();
        for b in bits {
            w.push(b);
        }
        w
    }

    /// Low `len` bits of `value`, bit 0 first.
    pub fn from_u64(value: u64, len: usize) -> Self {
        assert!(len <= LIMB, "from_u64 takes at most 64 bits");
        let mut w = Self {
            limbs: vec![value; limbs_for(len)],
            len,
        };
        w.clear_tail();
        w
    }

    /// Wraps raw limbs. Bits past `len` are cleared.
    pub fn from_limbs(mut limbs: Vec<u64>, len: usize) -> Result<Self> {
        if limbs.len() < limbs_for(len) {
            return Err(Error::Format(format!("{} limbs cannot hold {len} bits", limbs.len())));
        }
        limbs.truncate(limbs_for(len));
        let mut w = Self { limbs, len };
        w.clear_tail();
        Ok(w)
    }

    #[inline]
    fn clear_tail(&mut self) {
        if let Some(last) = self.limbs.last_mut() {
            *last &= tail_mask(self.len);
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn limbs(&self) -> &[u64] {
        &self.limbs
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.limbs[i / LIMB] >> (i % LIMB)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, bit: bool) {
        assert!(i < self.len, "index {i} out of range for length {}", self.len);
        let mask = 1u64 << (i % LIMB);
        if bit {
            self.limbs[i / LIMB] |= mask;
        } else {
            self.limbs[i / LIMB] &= !mask;
        }
    }

    #[inline]
    pub fn push(&mut self, bit: bool) {
        if self.len.is_multiple_of(LIMB) {
            self.limbs.push(0);
        }
        if bit {
            self.limbs[self.len / LIMB] |= 1u64 << (self.len % LIMB);
        }
        self.len += 1;
    }

    /// Appends the low `count` bits of `bits`.
    pub fn push_bits(&mut self, bits: u64, count: usize) {
        debug_assert!(count <= LIMB);
        if count == 0 {
            return;
        }
        let bits = if count == LIMB {
            bits
        } else {
            bits & ((1u64 << count) - 1)
        };
        let off = self.len % LIMB;
        if off == 0 {
            self.limbs.push(bits);
        } else {
            *self.limbs.last_mut().unwrap() |= bits << off;
            if off + count > LIMB {
                self.limbs.push(bits >> (LIMB - off));
            }
        }
        self.len += count;
    }

    pub fn extend_from(&mut self, other: &BinaryWord) {
        let full = other.len / LIMB;
        for &limb in &other.limbs[..full] {
            self.push_bits(limb, LIMB);
        }
        let rest = other.len % LIMB;
        if rest > 0 {
            self.push_bits(other.limbs[full], rest);
        }
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn count_ones(&self) -> usize {
        self.limbs.iter().map(|l| l.count_ones() as usize).sum()
    }

    pub fn complement(&self) -> Self {
        let mut w = Self {
            limbs: self.limbs.iter().map(|l| !l).collect(),
            len: self.len,
        };
        w.clear_tail();
        w
    }

    /// Up to 64 bits starting at `offset`, symbol `offset` in bit 0.
    #[inline]
    pub fn bits_at(&self, offset: usize, count: usize) -> u64 {
        debug_assert!(count <= LIMB && offset + count <= self.len);
        if count == 0 {
            return 0;
        }
        let limb = offset / LIMB;
        let shift = offset % LIMB;
        let mut v = self.limbs[limb] >> shift;
        if shift + count > LIMB {
            v |= self.limbs[limb + 1] << (LIMB - shift);
        }
        if count == LIMB {
            v
        } else {
            v & ((1u64 << count) - 1)
        }
    }

    /// Copies the window `[offset, offset + n)` without range checks beyond
    /// a debug assertion.
    pub fn slice(&self, offset: usize, n: usize) -> BinaryWord {
        debug_assert!(offset + n <= self.len);
        let mut out = BinaryWord::with_capacity(n);
        let mut pos = offset;
        let end = offset + n;
        while pos < end {
            let take = (end - pos).min(LIMB);
            out.push_bits(self.bits_at(pos, take), take);
            pos += take;
        }
        out
    }

    /// Number of positions where the words differ.
    pub fn mismatches(&self, other: &BinaryWord) -> Result<usize> {
        if self.len != other.len {
            return Err(Error::LengthMismatch {
                left: self.len,
                right: other.len,
            });
        }
        Ok(self.mismatches_unchecked(other))
    }

    #[inline]
    pub fn mismatches_unchecked(&self, other: &BinaryWord) -> usize {
        debug_assert_eq!(self.len, other.len);
        self.limbs
            .iter()
            .zip(&other.limbs)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    /// Mismatch count, or `None` as soon as it exceeds `limit`.
    #[inline]
    pub fn mismatches_within(&self, other: &BinaryWord, limit: usize) -> Option<usize> {
        let mut acc = 0usize;
        for (a, b) in self.limbs.iter().zip(&other.limbs) {
            acc += (a ^ b).count_ones() as usize;
            if acc > limit {
                return None;
            }
        }
        Some(acc)
    }

    /// Normalized Hamming distance as any [`Scalar`].
    pub fn dbar<T: Scalar>(&self, other: &BinaryWord) -> Result<T> {
        let m = self.mismatches(other)?;
        if self.len == 0 {
            return Err(domain("word length", "d̄ needs words of length ≥ 1"));
        }
        Ok(T::of_usize(m) / T::of_usize(self.len))
    }
}

impl PartialEq for BinaryWord {
    fn eq(&self, other: &Self) -> bool {
        self.len == other.len && self.limbs == other.limbs
    }
}

impl Eq for BinaryWord {}

impl Hash for BinaryWord {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.len.hash(state);
        self.limbs.hash(state);
    }
}

impl PartialOrd for BinaryWord {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Lexicographic on symbols, shorter words first on a common prefix.
impl Ord for BinaryWord {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.iter().cmp(other.iter())
    }
}

impl fmt::Display for BinaryWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BinaryWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len <= 128 {
            write!(f, "BinaryWord({self})")
        } else {
            write!(f, "BinaryWord(len={}, ones={})", self.len, self.count_ones())
        }
    }
}

impl FromStr for BinaryWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut w = BinaryWord::with_capacity(s.len());
        for (i, c) in s.trim().chars().enumerate() {
            match c {
                '0' => w.push(false),
                '1' => w.push(true),
                other => return Err(Error::Format(format!("symbol {other:?} at position {i} is not 0 or 1"))),
            }
        }
        Ok(w)
    }
}

/// Serialized as a `0`/`1` string.
impl serde::Serialize for BinaryWord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for BinaryWord {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// d̄ distance between two equal-length words.
pub fn dbar_words(w1: &BinaryWord, w2: &BinaryWord) -> Result<f64> {
    w1.dbar(w2)
}

/// Binary entropy in bits, with `0·log2(0) = 0`.
pub fn binary_entropy<T: Scalar>(p: T) -> Result<T> {
    if !(p >= T::zero() && p <= T::one()) {
        return Err(domain("probability", format!("{p} is outside [0, 1]")));
    }
    let term = |x: T| {
        if x == T::zero() {
            T::zero()
        } else {
            -x * x.log2()
        }
    };
    Ok(term(p) + term(T::one() - p))
}

/// The window `stream[offset .. offset + n)`.
pub fn extract_name(stream: &BinaryWord, offset: usize, n: usize) -> Result<BinaryWord> {
    if n == 0 || offset.checked_add(n).is_none_or(|end| end > stream.len()) {
        return Err(Error::WindowOutOfRange {
            offset,
            len: n,
            available: stream.len(),
        });
    }
    Ok(stream.slice(offset, n))
}

/// A finite partition of weighted sample atoms into classes `1..=r`.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledPartition<T: Scalar = f64> {
    labels: Vec<u32>,
    weights: Vec<T>,
}

impl<T: Scalar> LabeledPartition<T> {
    pub fn new(labels: Vec<u32>, weights: Vec<T>) -> Result<Self> {
        if labels.len() != weights.len() {
            return Err(Error::LengthMismatch {
                left: labels.len(),
                right: weights.len(),
            });
        }
        if labels.is_empty() {
            return Err(domain("partition", "no atoms"));
        }
        if let Some(i) = labels.iter().position(|&l| l == 0) {
            return Err(domain("partition label", format!("atom {i} has label 0")));
        }
        if weights.iter().any(|w| !(*w >= T::zero())) {
            return Err(domain("partition weight", "weights must be non-negative"));
        }
        let total: T = weights.iter().copied().sum();
        if (total - T::one()).abs() > T::mass_tolerance() {
            return Err(domain("partition weight", format!("weights sum to {total}")));
        }
        Ok(Self { labels, weights })
    }

    /// Equal weights on every atom.
    pub fn uniform(labels: Vec<u32>) -> Result<Self> {
        let w = T::one() / T::of_usize(labels.len().max(1));
        let weights = vec![w; labels.len()];
        Self::new(labels, weights)
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn class_count(&self) -> u32 {
        self.labels.iter().copied().max().unwrap_or(0)
    }
}

/// `½ Σ_i mass(A_i △ B_i)`.
///
/// An atom labelled differently in the two partitions lies in exactly two of
/// the symmetric differences, so the sum reduces to the mass of the atoms
/// whose labels disagree.
pub fn partition_distance<T: Scalar>(q: &LabeledPartition<T>, qhat: &LabeledPartition<T>) -> Result<T> {
    if q.labels.len() != qhat.labels.len() {
        return Err(Error::LengthMismatch {
            left: q.labels.len(),
            right: qhat.labels.len(),
        });
    }
    if let Some(index) = q.weights.iter().zip(&qhat.weights).position(|(a, b)| a != b) {
        return Err(Error::WeightMismatch { index });
    }
    Ok(q.labels
        .iter()
        .zip(&qhat.labels)
        .zip(&q.weights)
        .filter(|((a, b), _)| a != b)
        .map(|(_, &w)| w)
        .sum())
}
