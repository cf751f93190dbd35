use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::scalar::Scalar;
use crate::transport::{dbar_dist, NameDistribution};
use crate::words::BinaryWord;

/// Longest past window: the context window `2k + 1` must fit in 64 bits.
pub const MAX_PAST: usize = 31;
/// Longest future window.
pub const MAX_FUTURE: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VwbVariant {
    /// Each `dist(future | A∩B)` against `dist(future | B)`.
    StarStar,
    /// Every pair `dist(future | A∩B)`, `dist(future | A'∩B)` sharing `B`.
    StarStarStar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VwbParams<T: Scalar = f64> {
    pub epsilon: T,
    /// Future window length.
    #[serde(rename = "N")]
    pub future: usize,
    /// Past window length; the context window is `2k + 1`.
    pub k: usize,
    /// Contexts lighter than this are dropped and charged as bad mass.
    pub min_atom_mass: T,
}

impl<T: Scalar> VwbParams<T> {
    pub fn new(epsilon: T, future: usize, k: usize, min_atom_mass: T) -> Result<Self> {
        if !(epsilon > T::zero() && epsilon < T::one()) {
            return Err(domain("epsilon", format!("{epsilon} must lie in (0, 1)")));
        }
        if future == 0 || future > MAX_FUTURE {
            return Err(domain("N", format!("{future} must lie in 1..={MAX_FUTURE}")));
        }
        if k == 0 || k > MAX_PAST {
            return Err(domain("k", format!("{k} must lie in 1..={MAX_PAST}")));
        }
        if !(min_atom_mass > T::zero() && min_atom_mass < T::of_f64(0.1)) {
            return Err(domain("min_atom_mass", format!("{min_atom_mass} must lie in (0, 0.1)")));
        }
        Ok(Self {
            epsilon,
            future,
            k,
            min_atom_mass,
        })
    }

    /// Uses [`default_floor`] for a stream of `stream_len` steps.
    pub fn with_default_floor(epsilon: T, future: usize, k: usize, stream_len: usize) -> Result<Self> {
        Self::new(epsilon, future, k, default_floor(future, stream_len))
    }
}

/// `10 · 2^N / stream_len`, clamped to `[1e-5, 0.01]`.
pub fn default_floor<T: Scalar>(future: usize, stream_len: usize) -> T {
    let raw = 10.0 * 2f64.powi(future.min(1000) as i32) / stream_len.max(1) as f64;
    T::of_f64(raw.clamp(1e-5, 0.01))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VwbReport<T: Scalar = f64> {
    pub variant: VwbVariant,
    pub epsilon: T,
    #[serde(rename = "N")]
    pub future: usize,
    pub k: usize,
    /// Mass of the retained contexts.
    pub good_mass: T,
    pub max_dbar: T,
    pub mean_dbar: T,
    pub retained_atoms: usize,
    pub excluded_mass: T,
    pub verdict: Verdict,
}

/// Retained context: past word `A` inside context class `B`.
struct Atom<T: Scalar> {
    count: u64,
    futures: Vec<(u64, u64)>,
    dist: NameDistribution<T>,
}

struct Group<T: Scalar> {
    atoms: Vec<Atom<T>>,
    pooled: NameDistribution<T>,
}

/// Finite-window relative very-weak-Bernoulli test of the `r` process over
/// the `r0` process.
///
/// At time `t` the past is `A = r[t−k .. t)`, the context is
/// `B = r0[t−k ..= t+k]` and the future is `r[t .. t+N)`. Conditional future
/// distributions are estimated per `(A, B)`; pairs lighter than the floor
/// are excluded. `dist(· | B)` is the count-weighted pool of the retained
/// `(A, B)` histograms, so the two variants bracket each other:
/// `max(**) ≤ max(***) ≤ 2·max(**)`.
pub fn vwb_test<T: Scalar>(
    r_names: &BinaryWord,
    r0_names: &BinaryWord,
    p: &VwbParams<T>,
    variant: VwbVariant,
) -> Result<VwbReport<T>> {
    let (groups, total, retained_count) = tabulate(r_names, r0_names, p)?;
    let total_f = T::of_usize(total as usize);
    let retained_mass = T::of_usize(retained_count as usize) / total_f;
    let retained_atoms = groups.iter().map(|g| g.atoms.len()).sum();

    // (weight, distance) per compared item, in a fixed order
    let per_group: Vec<Result<Vec<(T, T)>>> = groups
        .par_iter()
        .map(|g| -> Result<Vec<(T, T)>> {
            match variant {
                VwbVariant::StarStar => g
                    .atoms
                    .iter()
                    .map(|a| Ok((T::of_usize(a.count as usize), dbar_dist(&a.dist, &g.pooled)?)))
                    .collect(),
                VwbVariant::StarStarStar => {
                    let mut out = Vec::new();
                    for i in 0..g.atoms.len() {
                        for j in i + 1..g.atoms.len() {
                            let (a, b) = (&g.atoms[i], &g.atoms[j]);
                            let w = T::of_usize(a.count as usize) * T::of_usize(b.count as usize);
                            let d = if a.futures == b.futures {
                                T::zero()
                            } else {
                                dbar_dist(&a.dist, &b.dist)?
                            };
                            out.push((w, d));
                        }
                    }
                    Ok(out)
                }
            }
        })
        .collect();
    let mut max_dbar = T::zero();
    let mut weighted = T::zero();
    let mut weight = T::zero();
    for items in per_group {
        for (w, d) in items? {
            max_dbar = max_dbar.max(d);
            weighted = weighted + w * d;
            weight = weight + w;
        }
    }
    let mean_dbar = if weight > T::zero() {
        weighted / weight
    } else {
        T::zero()
    };
    let good_mass = retained_mass;
    let verdict = Verdict::from_bool(good_mass > T::one() - p.epsilon && max_dbar < p.epsilon);
    Ok(VwbReport {
        variant,
        epsilon: p.epsilon,
        future: p.future,
        k: p.k,
        good_mass,
        max_dbar,
        mean_dbar,
        retained_atoms,
        excluded_mass: T::one() - retained_mass,
        verdict,
    })
}

type Tabulated<T> = (Vec<Group<T>>, u64, u64);

fn tabulate<T: Scalar>(r: &BinaryWord, r0: &BinaryWord, p: &VwbParams<T>) -> Result<Tabulated<T>> {
    if r.len() != r0.len() {
        return Err(Error::LengthMismatch {
            left: r.len(),
            right: r0.len(),
        });
    }
    let (k, n) = (p.k, p.future);
    let need = 10 * (2 * k + n + 1);
    if r.len() < need {
        return Err(Error::WindowOutOfRange {
            offset: 0,
            len: need,
            available: r.len(),
        });
    }
    let first = k;
    let last = r.len() - n.max(k + 1);
    let width = 2 * k + 1;

    const CHUNK: usize = 1 << 18;
    let starts: Vec<usize> = (first..=last).step_by(CHUNK).collect();
    let partial: Vec<FxHashMap<(u64, u64, u64), u64>> = starts
        .par_iter()
        .map(|&s| {
            let mut m: FxHashMap<(u64, u64, u64), u64> = FxHashMap::default();
            for t in s..(s + CHUNK).min(last + 1) {
                let a = r.bits_at(t - k, k);
                let b = r0.bits_at(t - k, width);
                let f = r.bits_at(t, n);
                *m.entry((b, a, f)).or_default() += 1;
            }
            m
        })
        .collect();
    let mut counts: FxHashMap<(u64, u64, u64), u64> = FxHashMap::default();
    for m in partial {
        for (key, c) in m {
            *counts.entry(key).or_default() += c;
        }
    }
    let total = (last - first + 1) as u64;
    let mut keys: Vec<((u64, u64, u64), u64)> = counts.into_iter().collect();
    keys.sort_unstable();

    let floor = p.min_atom_mass;
    let total_f = T::of_usize(total as usize);
    let mut groups: Vec<Group<T>> = Vec::new();
    let mut retained = 0u64;
    let mut idx = 0;
    while idx < keys.len() {
        let b = keys[idx].0 .0;
        let mut atoms = Vec::new();
        while idx < keys.len() && keys[idx].0 .0 == b {
            let a = keys[idx].0 .1;
            let mut futures = Vec::new();
            while idx < keys.len() && keys[idx].0 .0 == b && keys[idx].0 .1 == a {
                futures.push((keys[idx].0 .2, keys[idx].1));
                idx += 1;
            }
            let count: u64 = futures.iter().map(|f| f.1).sum();
            if T::of_usize(count as usize) / total_f >= floor {
                atoms.push(Atom {
                    count,
                    dist: histogram(&futures, count, n)?,
                    futures,
                });
            }
        }
        if atoms.is_empty() {
            continue;
        }
        let mut pooled: std::collections::BTreeMap<u64, u64> = Default::default();
        let mut pooled_total = 0u64;
        for a in &atoms {
            pooled_total += a.count;
            for &(f, c) in &a.futures {
                *pooled.entry(f).or_default() += c;
            }
        }
        retained += pooled_total;
        let pooled: Vec<(u64, u64)> = pooled.into_iter().collect();
        groups.push(Group {
            pooled: histogram(&pooled, pooled_total, n)?,
            atoms,
        });
    }
    Ok((groups, total, retained))
}

fn histogram<T: Scalar>(futures: &[(u64, u64)], total: u64, n: usize) -> Result<NameDistribution<T>> {
    let t = T::of_usize(total as usize);
    NameDistribution::new(
        futures.iter().map(|&(f, _)| BinaryWord::from_u64(f, n)).collect(),
        futures.iter().map(|&(_, c)| T::of_usize(c as usize) / t).collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{sample_orbit, ProcessGenerator};

    fn both(r: &BinaryWord, r0: &BinaryWord, p: &VwbParams) -> (VwbReport, VwbReport) {
        (
            vwb_test(r, r0, p, VwbVariant::StarStar).unwrap(),
            vwb_test(r, r0, p, VwbVariant::StarStarStar).unwrap(),
        )
    }

    #[test]
    fn identical_streams_pass() {
        let o = sample_orbit(&ProcessGenerator::golden(), 100_000, 1).unwrap();
        let p = VwbParams::with_default_floor(0.05, 4, 3, o.len()).unwrap();
        let (ss, sss) = both(&o.symbols, &o.symbols, &p);
        assert_eq!(ss.max_dbar, 0.0);
        assert_eq!(sss.max_dbar, 0.0);
        assert!(ss.verdict.passed() && sss.verdict.passed());
    }

    #[test]
    fn deterministic_process_over_trivial_context_fails() {
        let o = sample_orbit(&ProcessGenerator::golden(), 200_000, 1).unwrap();
        let constant = BinaryWord::zeros(o.len());
        let p = VwbParams::with_default_floor(0.05, 6, 4, o.len()).unwrap();
        let (ss, sss) = both(&o.symbols, &constant, &p);
        assert_eq!(ss.verdict, Verdict::Fail);
        assert_eq!(sss.verdict, Verdict::Fail);
        assert!(ss.max_dbar <= sss.max_dbar + 1e-9);
        assert!(sss.max_dbar <= 2.0 * ss.max_dbar + 1e-9);
    }

    #[test]
    fn degenerate_stream() {
        let r = BinaryWord::ones(5000);
        let p = VwbParams::with_default_floor(0.05, 3, 2, r.len()).unwrap();
        let (ss, sss) = both(&r, &r, &p);
        assert!((ss.good_mass - 1.0).abs() < 1e-12);
        assert_eq!(ss.retained_atoms, 1);
        assert_eq!(sss.max_dbar, 0.0);
    }

    #[test]
    fn short_stream_rejected() {
        let r = BinaryWord::ones(50);
        let p = VwbParams::with_default_floor(0.05, 3, 2, r.len()).unwrap();
        assert!(vwb_test(&r, &r, &p, VwbVariant::StarStar).is_err());
        assert!(vwb_test(&r, &BinaryWord::ones(60), &p, VwbVariant::StarStar).is_err());
    }

    #[test]
    fn floor_defaults() {
        assert_eq!(default_floor::<f64>(6, 10_000_000), 6.4e-5);
        assert_eq!(default_floor::<f64>(6, 100), 0.01);
        assert_eq!(default_floor::<f64>(1, 1 << 40), 1e-5);
        assert!(VwbParams::new(0.05, 6, 4, 0.2).is_err());
        assert!(VwbParams::new(0.05, 0, 4, 0.01).is_err());
    }

    #[test]
    fn report_json_fields() {
        let r = BinaryWord::ones(5000);
        let p = VwbParams::with_default_floor(0.05, 3, 2, r.len()).unwrap();
        let rep = vwb_test(&r, &r, &p, VwbVariant::StarStarStar).unwrap();
        let v: serde_json::Value = serde_json::to_value(&rep).unwrap();
        let mut keys: Vec<&str> = v.as_object().unwrap().keys().map(|s| s.as_str()).collect();
        keys.sort();
        assert_eq!(
            keys,
            [
                "N",
                "epsilon",
                "excluded_mass",
                "good_mass",
                "k",
                "max_dbar",
                "mean_dbar",
                "retained_atoms",
                "variant",
                "verdict"
            ]
        );
        assert_eq!(v["variant"], "star_star_star");
        assert_eq!(v["verdict"], "pass");
    }
}
