use serde::{Deserialize, Serialize};

use crate::covering::{CoverMethod, CoverParams, CoverResult};
use crate::error::{Error, Result};
use crate::models::{window_classes, window_code_partition, Orbit, WindowCode};
use crate::scalar::{strict_radius, Scalar};
use crate::words::BinaryWord;

/// Outcome of [`block_coding_cover`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockCover<T: Scalar = f64> {
    /// Centres are positions in the coded stream; the name of centre `c` is
    /// `target[c .. c + n]`.
    pub result: CoverResult<T>,
    /// Number of points (positions whose full atom window fits in the orbit).
    pub points: usize,
    /// Length of the atom windows, `n + 2·k0 + 1`.
    pub atom_len: usize,
    /// Mass of points whose target name is within `ε` of the coded name.
    pub agreeing_mass: T,
    /// Mass covered by the union of the `2ε`-balls around the centres.
    pub covered_mass_double: T,
    /// `true` when the `ε`-cover reaches `> 1 − δ`.
    pub covered: bool,
}

/// Constructive cover of the base names, one centre per atom of the coded
/// partition.
///
/// Target names are the coded stream itself, so every point lies at distance
/// zero from the centre of its own atom.
pub fn block_coding_cover<T: Scalar>(base: &Orbit, code: &WindowCode, p: &CoverParams<T>) -> Result<BlockCover<T>> {
    let coded = window_code_partition(base, code)?;
    block_coding_cover_for(base, &coded, code, p)
}

/// Cover of the names of `target` (aligned with the coded stream: entry `i`
/// belongs to orbit position `i + k0`) by centres chosen one per atom.
///
/// A point `i` is read through the orbit window `base[i .. i + n + 2·k0 + 1]`;
/// distinct windows are the atoms. A point agrees when its target name is
/// within `ε` of its coded name, and each atom meeting the agreeing set
/// contributes its first agreeing point as a centre. Coverage is measured
/// against the target names at radius `ε` and `2ε`. A shortfall is reported
/// through [`BlockCover::covered`], not as an error.
pub fn block_coding_cover_for<T: Scalar>(
    base: &Orbit,
    target: &BinaryWord,
    code: &WindowCode,
    p: &CoverParams<T>,
) -> Result<BlockCover<T>> {
    let k0 = code.half_width();
    let n = p.n;
    let atom_len = n + 2 * k0 + 1;
    if base.len() < atom_len {
        return Err(Error::WindowOutOfRange {
            offset: 0,
            len: atom_len,
            available: base.len(),
        });
    }
    let coded = window_code_partition(base, code)?;
    if target.len() != coded.len() {
        return Err(Error::LengthMismatch {
            left: coded.len(),
            right: target.len(),
        });
    }
    let points = base.len() - atom_len + 1;
    let atoms = window_classes(&base.symbols, atom_len);
    debug_assert_eq!(atoms.len(), points);
    let radius = strict_radius(p.epsilon, n);
    let double = strict_radius(p.epsilon + p.epsilon, n);
    let within =
        |a: &BinaryWord, b: &BinaryWord, r: Option<usize>| r.is_some_and(|r| a.mismatches_within(b, r).is_some());

    let atom_count = atoms.iter().map(|&a| a as usize + 1).max().unwrap_or(0);
    let mut center_of: Vec<Option<usize>> = vec![None; atom_count];
    let mut centers = Vec::new();
    let mut agreeing = 0usize;
    for (i, &a) in atoms.iter().enumerate() {
        let name = target.slice(i, n);
        if within(&name, &coded.slice(i, n), radius) {
            agreeing += 1;
            if center_of[a as usize].is_none() {
                center_of[a as usize] = Some(i);
                centers.push(i);
            }
        }
    }
    let center_names: Vec<BinaryWord> = centers.iter().map(|&c| target.slice(c, n)).collect();

    let mut hit = 0usize;
    let mut hit_double = 0usize;
    let mut fresh = vec![0usize; centers.len()];
    let slot: Vec<usize> = {
        let mut slot = vec![usize::MAX; atom_count];
        for (s, &c) in centers.iter().enumerate() {
            slot[atoms[c] as usize] = s;
        }
        slot
    };
    for (i, &a) in atoms.iter().enumerate() {
        let name = target.slice(i, n);
        let own = slot[a as usize];
        let first = |r: Option<usize>| -> Option<usize> {
            if own != usize::MAX && within(&name, &center_names[own], r) {
                return Some(own);
            }
            center_names.iter().position(|c| within(&name, c, r))
        };
        if let Some(s) = first(radius) {
            hit += 1;
            hit_double += 1;
            fresh[s] += 1;
        } else if first(double).is_some() {
            hit_double += 1;
        }
    }

    let total = T::of_usize(points);
    let unit = T::one() / total;
    let covered_mass = T::of_usize(hit) / total;
    let uncovered = T::of_usize(points - hit) / total;
    Ok(BlockCover {
        result: CoverResult {
            k: centers.len(),
            centers,
            covered_mass,
            increments: fresh.iter().map(|&f| T::of_usize(f) * unit).collect(),
            method: CoverMethod::BlockCoding,
        },
        points,
        atom_len,
        agreeing_mass: T::of_usize(agreeing) / total,
        covered_mass_double: T::of_usize(hit_double) / total,
        covered: p.is_covered(uncovered),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{distinct_windows, sample_orbit, ProcessGenerator};
    use crate::rng::rng_for;
    use rand::Rng;

    #[test]
    fn identity_code_covers_everything() {
        let g = ProcessGenerator::Bernoulli { p: 0.5 };
        let o = sample_orbit(&g, 3000, 2).unwrap();
        let p = CoverParams::new(0.05, 0.01, 8).unwrap();
        let c = block_coding_cover(&o, &WindowCode::identity(), &p).unwrap();
        assert!(c.covered);
        assert_eq!(c.result.covered_mass, 1.0);
        assert_eq!(c.result.k, distinct_windows(&o.symbols, 9));
    }

    #[test]
    fn periodic_base_has_two_atoms() {
        let g = ProcessGenerator::periodic("01".parse().unwrap()).unwrap();
        let o = sample_orbit(&g, 1000, 0).unwrap();
        for n in [2, 10, 40] {
            let p = CoverParams::new(0.01, 0.01, n).unwrap();
            let c = block_coding_cover(&o, &WindowCode::majority(2), &p).unwrap();
            assert!(c.result.k <= 2);
            assert!(c.covered);
        }
    }

    #[test]
    fn sturmian_majority_of_five() {
        let o = sample_orbit(&ProcessGenerator::golden(), 200_000, 0).unwrap();
        let p = CoverParams::lemma_mode(0.01, 0.01, 64).unwrap();
        let c = block_coding_cover(&o, &WindowCode::majority(2), &p).unwrap();
        assert!(c.covered);
        assert!(c.result.k <= 70, "k = {}", c.result.k);
        assert!(c.result.covered_mass > 0.99);
    }

    #[test]
    fn noisy_target_is_reported_not_fatal() {
        let o = sample_orbit(&ProcessGenerator::golden(), 4000, 0).unwrap();
        let code = WindowCode::center(1);
        let mut target = window_code_partition(&o, &code).unwrap();
        let mut rng = rng_for(9, 0);
        for i in 0..target.len() {
            if rng.gen_bool(0.3) {
                target.set(i, !target.get(i));
            }
        }
        let p = CoverParams::new(0.05, 0.01, 20).unwrap();
        let c = block_coding_cover_for(&o, &target, &code, &p).unwrap();
        assert!(!c.covered);
        assert!(c.covered_mass_double >= c.result.covered_mass);
        assert!(c.result.k <= distinct_windows(&o.symbols, 23));
    }

    #[test]
    fn short_orbit_rejected() {
        let o = sample_orbit(&ProcessGenerator::golden(), 10, 0).unwrap();
        let p = CoverParams::new(0.1, 0.1, 8).unwrap();
        assert!(block_coding_cover(&o, &WindowCode::majority(2), &p).is_err());
    }
}
