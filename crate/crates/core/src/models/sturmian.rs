//! Irrational rotation coding in exact integer arithmetic.
//!
//! The rotation number is replaced by its first continued-fraction convergent
//! `p/q` with `q ≥ 2^40`; the orbit `phase + i·p/q mod 1` is then tracked as an
//! integer residue modulo `q`, so no floating-point drift accumulates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Minimum convergent denominator.
pub const MIN_DENOMINATOR: u64 = 1 << 40;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SturmianRotation {
    /// Convergent numerator `p`.
    pub numerator: u64,
    /// Convergent denominator `q`.
    pub denominator: u64,
    /// Phase as a residue modulo `q`; `None` means "derive from the seed".
    pub phase: Option<u64>,
    /// True when `p/q` stands in for an irrational rotation number.
    pub irrational: bool,
}

impl SturmianRotation {
    /// `(√5 − 1)/2 = [0; 1, 1, 1, …]`.
    pub fn golden() -> Self {
        Self::from_periodic_quotients(&[1]).expect("golden ratio convergents")
    }

    /// `√2 − 1 = [0; 2, 2, 2, …]`.
    pub fn silver() -> Self {
        Self::from_periodic_quotients(&[2]).expect("silver ratio convergents")
    }

    /// Rotation number `[0; a_1, a_2, …]` with the listed partial quotients
    /// repeated forever.
    pub fn from_periodic_quotients(period: &[u64]) -> Result<Self> {
        if period.is_empty() || period.contains(&0) {
            return Err(Error::InvalidGenerator("partial quotients must be positive".into()));
        }
        let (numerator, denominator) = convergent(period.iter().copied().cycle())
            .ok_or_else(|| Error::InvalidGenerator("convergent overflow".into()))?;
        Ok(Self {
            numerator,
            denominator,
            phase: Some(0),
            irrational: true,
        })
    }

    /// Convergent of the exact binary value of `alpha`.
    ///
    /// Fails when that value is a fraction whose denominator never reaches
    /// `2^40` (a rational rotation passed in by mistake).
    pub fn from_f64(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidGenerator(format!(
                "rotation number {alpha} is outside (0, 1)"
            )));
        }
        let quotients = f64_partial_quotients(alpha);
        let (numerator, denominator) = convergent(quotients.iter().copied())
            .filter(|&(_, q)| q >= MIN_DENOMINATOR)
            .ok_or_else(|| {
                Error::InvalidGenerator(format!(
                    "rotation number {alpha} is rational with denominator below 2^40"
                ))
            })?;
        Ok(Self {
            numerator,
            denominator,
            phase: Some(0),
            irrational: true,
        })
    }

    /// Rational rotation `p/q`, flagged as such.
    pub fn rational(p: u64, q: u64) -> Result<Self> {
        if q == 0 || p == 0 || p >= q {
            return Err(Error::InvalidGenerator(format!(
                "rational rotation {p}/{q} must lie in (0, 1)"
            )));
        }
        Ok(Self {
            numerator: p,
            denominator: q,
            phase: Some(0),
            irrational: false,
        })
    }

    pub fn with_phase(mut self, phase: Option<f64>) -> Result<Self> {
        self.phase = match phase {
            None => None,
            Some(x) if (0.0..1.0).contains(&x) => {
                Some(((x * self.denominator as f64).round() as u64) % self.denominator)
            }
            Some(x) => return Err(Error::InvalidGenerator(format!("phase {x} is outside [0, 1)"))),
        };
        Ok(self)
    }

    pub fn alpha(&self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.denominator == 0 || self.numerator == 0 || self.numerator >= self.denominator {
            return Err(Error::InvalidGenerator(format!(
                "rotation {}/{} must lie in (0, 1)",
                self.numerator, self.denominator
            )));
        }
        if self.irrational && self.denominator < MIN_DENOMINATOR {
            return Err(Error::InvalidGenerator(
                "irrational rotation needs a convergent denominator ≥ 2^40".into(),
            ));
        }
        if matches!(self.phase, Some(ph) if ph >= self.denominator) {
            return Err(Error::InvalidGenerator("phase residue out of range".into()));
        }
        Ok(())
    }

    /// Emits `ω_i = 1` iff `{phase + i·α} ∈ [1 − α, 1)`.
    pub(crate) fn emit(&self, phase: u64, length: usize, mut sink: impl FnMut(bool)) {
        let q = self.denominator;
        let p = self.numerator;
        let threshold = q - p;
        let mut x = phase % q;
        for _ in 0..length {
            sink(x >= threshold);
            x += p;
            if x >= q {
                x -= q;
            }
        }
    }
}

/// First convergent with denominator at least [`MIN_DENOMINATOR`] of
/// `[0; a_1, a_2, …]`; `None` on overflow or if the quotients run out first.
fn convergent(quotients: impl Iterator<Item = u64>) -> Option<(u64, u64)> {
    // p_{-1}/q_{-1} = 1/0, p_0/q_0 = 0/1
    let (mut p_prev, mut q_prev) = (1u128, 0u128);
    let (mut p, mut q) = (0u128, 1u128);
    for a in quotients.take(256) {
        let a = a as u128;
        let (pn, qn) = (a * p + p_prev, a * q + q_prev);
        p_prev = p;
        q_prev = q;
        p = pn;
        q = qn;
        if q >= MIN_DENOMINATOR as u128 {
            return (q <= u64::MAX as u128 / 4).then_some((p as u64, q as u64));
        }
    }
    None
}

/// Partial quotients `a_1, a_2, …` of `alpha ∈ (0, 1)` taken as the exact
/// dyadic rational it represents.
fn f64_partial_quotients(alpha: f64) -> Vec<u64> {
    // alpha = mantissa / 2^shift exactly
    let bits = alpha.to_bits();
    let exp = ((bits >> 52) & 0x7FF) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    let (mantissa, shift) = if exp == 0 {
        (frac as u128, 1074i64)
    } else {
        ((frac | (1u64 << 52)) as u128, 1075 - exp)
    };
    if !(0..=127).contains(&shift) {
        return Vec::new();
    }
    let (mut num, mut den) = (mantissa, 1u128 << shift);
    let mut out = Vec::new();
    // alpha < 1, so a_0 = 0 and the first step inverts.
    while num != 0 && out.len() < 128 {
        let a = den / num;
        out.push(a.min(u64::MAX as u128) as u64);
        let r = den % num;
        den = num;
        num = r;
    }
    out
}
