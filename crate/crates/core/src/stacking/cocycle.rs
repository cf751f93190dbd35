use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::models::Orbit;
use crate::rng::derive_path;
use crate::words::BinaryWord;

/// Largest fiber resolution; cells are `u32`.
pub const MAX_RESOLUTION: u32 = 31;
/// Largest resolution for which whole permutation tables are materialized.
pub const MAX_TABLE_RESOLUTION: u32 = 20;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CocycleKind {
    Identity,
    /// The same permutation at every step.
    Constant {
        perm: Vec<u32>,
    },
    /// `perms[t]` at step `t`.
    Explicit {
        perms: Vec<Vec<u32>>,
    },
    /// Permutation chosen by the base symbol at each step.
    BySymbol {
        on_zero: Vec<u32>,
        on_one: Vec<u32>,
    },
    /// Seeded bijection of the `d`-bit cells at each step.
    Random {
        seed: u64,
    },
}

/// Time-indexed permutations of the `2^d` dyadic fiber cells.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DyadicCocycle {
    d: u32,
    kind: CocycleKind,
}

/// `true` iff `perm` is a bijection of `0..perm.len()`.
pub fn is_bijection(perm: &[u32]) -> bool {
    let mut image = perm.to_vec();
    image.sort_unstable();
    image.iter().enumerate().all(|(i, &v)| v as usize == i)
}

impl DyadicCocycle {
    pub fn new(d: u32, kind: CocycleKind) -> Result<Self> {
        if d == 0 || d > MAX_RESOLUTION {
            return Err(domain("resolution", format!("{d} must lie in 1..={MAX_RESOLUTION}")));
        }
        let cells = 1usize << d;
        let check = |p: &Vec<u32>| -> Result<()> {
            if p.len() != cells {
                return Err(Error::LengthMismatch {
                    left: cells,
                    right: p.len(),
                });
            }
            if !is_bijection(p) {
                return Err(domain("permutation", "image is not a bijection of the cells"));
            }
            Ok(())
        };
        match &kind {
            CocycleKind::Identity | CocycleKind::Random { .. } => {}
            CocycleKind::Constant { perm } => check(perm)?,
            CocycleKind::Explicit { perms } => perms.iter().try_for_each(check)?,
            CocycleKind::BySymbol { on_zero, on_one } => {
                check(on_zero)?;
                check(on_one)?;
            }
        }
        Ok(Self { d, kind })
    }

    pub fn identity(d: u32) -> Result<Self> {
        Self::new(d, CocycleKind::Identity)
    }

    pub fn random(d: u32, seed: u64) -> Result<Self> {
        Self::new(d, CocycleKind::Random { seed })
    }

    pub fn resolution(&self) -> u32 {
        self.d
    }

    pub fn cells(&self) -> u64 {
        1u64 << self.d
    }

    pub fn kind(&self) -> &CocycleKind {
        &self.kind
    }

    /// Steps for which the cocycle is defined (`None`: every step).
    pub fn horizon(&self) -> Option<usize> {
        match &self.kind {
            CocycleKind::Explicit { perms } => Some(perms.len()),
            _ => None,
        }
    }

    /// Image of cell `u` at step `t` over base symbol `symbol`.
    pub fn apply(&self, t: usize, symbol: bool, u: u32) -> u32 {
        match &self.kind {
            CocycleKind::Identity => u,
            CocycleKind::Constant { perm } => perm[u as usize],
            CocycleKind::Explicit { perms } => perms[t][u as usize],
            CocycleKind::BySymbol { on_zero, on_one } => {
                if symbol {
                    on_one[u as usize]
                } else {
                    on_zero[u as usize]
                }
            }
            CocycleKind::Random { seed } => keyed_bijection(self.d, derive_path(*seed, &[t as u64]), u),
        }
    }

    /// Full table of the step-`t` permutation.
    pub fn permutation(&self, t: usize, symbol: bool) -> Result<Vec<u32>> {
        if self.d > MAX_TABLE_RESOLUTION {
            return Err(Error::Size {
                detail: format!("permutation tables stop at resolution {MAX_TABLE_RESOLUTION}"),
            });
        }
        if self.horizon().is_some_and(|h| t >= h) {
            return Err(domain("step", format!("{t} is beyond the cocycle's horizon")));
        }
        Ok((0..1u32 << self.d).map(|u| self.apply(t, symbol, u)).collect())
    }
}

/// Xor, odd multiply and xorshift on `d`-bit words: each step is invertible.
fn keyed_bijection(d: u32, key: u64, u: u32) -> u32 {
    let mask = if d == 32 { u64::MAX } else { (1u64 << d) - 1 };
    let mut x = u as u64;
    x ^= key & mask;
    x = x.wrapping_mul((key >> 32) | 1) & mask;
    x ^= x >> (d / 2 + 1);
    x as u32
}

/// Fiber-half names of the skew product started at orbit time 0.
pub fn skew_names(base: &Orbit, c: &DyadicCocycle, u0: u32, n: usize) -> Result<BinaryWord> {
    skew_names_from(base, c, 0, u0, n)
}

/// Emits `ω_t = 1` iff the cell at step `t` lies in the upper half, with
/// `u_{t+1} = perm_{start+t}(u_t)` and the permutation read over the base
/// symbol at `start + t`.
pub fn skew_names_from(base: &Orbit, c: &DyadicCocycle, start: usize, u0: u32, n: usize) -> Result<BinaryWord> {
    if start + n > base.len() {
        return Err(Error::WindowOutOfRange {
            offset: start,
            len: n,
            available: base.len(),
        });
    }
    if (u0 as u64) >= c.cells() {
        return Err(domain("fiber cell", format!("{u0} is not below 2^{}", c.d)));
    }
    if let Some(h) = c.horizon() {
        if start + n > h + 1 {
            return Err(domain(
                "cocycle",
                format!("defined for {h} steps, {} needed", start + n - 1),
            ));
        }
    }
    let half = 1u32 << (c.d - 1);
    let mut out = BinaryWord::with_capacity(n);
    let mut u = u0;
    for t in 0..n {
        out.push(u >= half);
        if t + 1 < n {
            u = c.apply(start + t, base.symbols.get(start + t), u);
        }
    }
    Ok(out)
}
