use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::models::Orbit;
use crate::rng::{derive_path, rng_for};
use crate::scalar::{strict_radius, Scalar};
use crate::stacking::cocycle::DyadicCocycle;
use crate::stacking::names::{BlockLaw, Placement, StackedNames};
use crate::stacking::tower::RokhlinTower;
use crate::transport::Verdict;
use crate::words::{binary_entropy, BinaryWord};

/// Fewest Monte Carlo samples accepted by [`ball_bound_report`].
pub const MIN_SAMPLES: usize = 1_000;
/// Largest block length for the exact M-ball enumeration.
pub const MAX_EXACT_BLOCK: usize = 20;
/// Random M-word centres tested besides `0^M` and `1^M`.
const RANDOM_CENTERS: usize = 4;

/// One Monte Carlo check against a bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaCheck<T: Scalar = f64> {
    pub name: String,
    pub estimate: T,
    pub bound: T,
    pub sigma: T,
    /// `true`: pass iff `|estimate − bound| ≤ sigmas·σ`; `false`: pass iff
    /// `estimate ≤ bound + sigmas·σ`.
    pub two_sided: bool,
    pub sigmas: f64,
    pub verdict: Verdict,
    /// `false` for checks reported outside their parameter range.
    pub asserted: bool,
}

impl<T: Scalar> LemmaCheck<T> {
    fn at_most(name: &str, estimate: T, bound: T, sigma: T, asserted: bool) -> Self {
        let three = T::of_f64(3.0);
        Self {
            name: name.into(),
            estimate,
            bound,
            sigma,
            two_sided: false,
            sigmas: 3.0,
            verdict: Verdict::from_bool(estimate <= bound + three * sigma),
            asserted,
        }
    }

    fn near(name: &str, estimate: T, target: T, sigma: T, width: f64, asserted: bool) -> Self {
        Self {
            name: name.into(),
            estimate,
            bound: target,
            sigma,
            two_sided: true,
            sigmas: width,
            verdict: Verdict::from_bool((estimate - target).abs() <= T::of_f64(width) * sigma),
            asserted,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict.passed()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallBoundReport<T: Scalar = f64> {
    pub epsilon: T,
    pub blocks: usize,
    #[serde(rename = "M")]
    pub block_len: usize,
    pub sample_count: usize,
    /// `ε ≤ 1/100`.
    pub lemma_mode: bool,
    /// `ε < 1/4`; outside it the checks are reported but not asserted.
    pub asserted: bool,
    /// Fewest centres whose balls can hold mass ½, `½·2^{m(½ − H(2ε))}`.
    pub covering_count_bound: T,
    pub checks: Vec<LemmaCheck<T>>,
}

impl<T: Scalar> BallBoundReport<T> {
    /// All asserted checks pass.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| !c.asserted || c.passed())
    }
}

/// `2^{m(−½ + H(2ε))}`, capped at 1.
pub fn stacked_ball_bound<T: Scalar>(m: usize, epsilon: T) -> Result<T> {
    let two = T::of_f64(2.0);
    if two * epsilon >= T::half() {
        return Ok(T::one());
    }
    let h = binary_entropy(two * epsilon)?;
    Ok(two.powf(T::of_usize(m) * (h - T::half())).min(T::one()))
}

/// Exact mass of an open `ε`-ball in uniform `{0,1}^M`.
pub fn uniform_block_ball_mass<T: Scalar>(block_len: usize, epsilon: T) -> Result<T> {
    if block_len == 0 || block_len > MAX_EXACT_BLOCK {
        return Err(domain(
            "block length",
            format!("exact enumeration covers 1..={MAX_EXACT_BLOCK}"),
        ));
    }
    let Some(r) = strict_radius(epsilon, block_len) else {
        return Ok(T::zero());
    };
    let mut total = 0u64;
    for word in 0u64..1 << block_len {
        if (word.count_ones() as usize) <= r {
            total += 1;
        }
    }
    Ok(T::of_usize(total as usize) / T::of_usize(1 << block_len))
}

fn binomial_sigma<T: Scalar>(p: T, n: usize) -> T {
    let p = p.max(T::zero()).min(T::one());
    (p * (T::one() - p) / T::of_usize(n)).sqrt()
}

fn ball_mass<T: Scalar>(names: &[BinaryWord], center: &BinaryWord, epsilon: T) -> T {
    let hits = match strict_radius(epsilon, center.len()) {
        None => 0,
        Some(r) => names
            .iter()
            .filter(|w| center.mismatches_within(w, r).is_some())
            .count(),
    };
    T::of_usize(hits) / T::of_usize(names.len())
}

/// Monte Carlo checks of the stacked ball-mass bounds.
///
/// * `base_center_ball`: mass of the `mM`-ball around a base name, against
///   `2^{m(−½+H(2ε))}`.
/// * `mid_column_ball`: the same around a name starting at level `⌊m/2⌋M`,
///   against `2^{⌊m/2⌋(−½+H(4ε))}`.
/// * `m_block_ball`, `m_block_ball_per_level`: `M`-ball masses against
///   `½ + 2ε` for `0^M`, `1^M` and random centres, over all points and per
///   level `jM`.
/// * `m_block_ball_exact`: pooled per-level mass against the exact uniform
///   value (uniform block law, `M ≤ 20`).
/// * `mean_block_distance`: mean normalized distance to a fixed `M`-word,
///   against `½`.
pub fn ball_bound_report<T: Scalar>(
    sn: &StackedNames,
    epsilon: T,
    sample_count: usize,
    seed: u64,
) -> Result<BallBoundReport<T>> {
    if !(epsilon > T::zero() && epsilon < T::half()) {
        return Err(domain("epsilon", format!("{epsilon} must lie in (0, 1/2)")));
    }
    if sample_count < MIN_SAMPLES {
        return Err(Error::InsufficientData(format!(
            "{sample_count} samples, at least {MIN_SAMPLES} needed"
        )));
    }
    let m = sn.blocks();
    let big_m = sn.block_len();
    let n = m * big_m;
    let asserted = epsilon < T::of_f64(0.25);
    let two = T::of_f64(2.0);
    let mut checks = Vec::new();

    let names = sn.sample_names(n, sample_count, Placement::Anywhere, derive_path(seed, &[0]))?;
    let center = sn
        .sample_names(n, 1, Placement::Level(0), derive_path(seed, &[1]))?
        .remove(0);
    let bound = stacked_ball_bound(m, epsilon)?;
    checks.push(LemmaCheck::at_most(
        "base_center_ball",
        ball_mass(&names, &center, epsilon),
        bound,
        binomial_sigma(bound, sample_count),
        asserted,
    ));
    let mid = (m / 2) * big_m;
    if let Ok(mut c) = sn.sample_names(n, 1, Placement::Level(mid), derive_path(seed, &[2])) {
        let bound = stacked_ball_bound(m / 2, two * epsilon)?;
        checks.push(LemmaCheck::at_most(
            "mid_column_ball",
            ball_mass(&names, &c.remove(0), epsilon),
            bound,
            binomial_sigma(bound, sample_count),
            asserted,
        ));
    }

    let half_bound = T::half() + two * epsilon;
    let mut centers = vec![BinaryWord::zeros(big_m), BinaryWord::ones(big_m)];
    let mut rng = rng_for(seed, 3);
    for _ in 0..RANDOM_CENTERS {
        centers.push(BinaryWord::from_u64(rng.gen(), big_m));
    }
    let blocks = sn.sample_names(big_m, sample_count, Placement::Anywhere, derive_path(seed, &[4]))?;
    let worst = centers
        .iter()
        .map(|c| ball_mass(&blocks, c, epsilon))
        .fold(T::zero(), T::max);
    checks.push(LemmaCheck::at_most(
        "m_block_ball",
        worst,
        half_bound,
        binomial_sigma(half_bound, sample_count),
        asserted,
    ));

    let per_level = (sample_count / m).max(MIN_SAMPLES);
    let level_masses: Vec<Vec<T>> = (0..m)
        .into_par_iter()
        .map(|j| {
            let names = sn.sample_names(
                big_m,
                per_level,
                Placement::Level(j * big_m),
                derive_path(seed, &[5, j as u64]),
            )?;
            Ok(centers.iter().map(|c| ball_mass(&names, c, epsilon)).collect())
        })
        .collect::<Result<_>>()?;
    let worst_level = level_masses.iter().flatten().copied().fold(T::zero(), T::max);
    checks.push(LemmaCheck::at_most(
        "m_block_ball_per_level",
        worst_level,
        half_bound,
        binomial_sigma(half_bound, per_level),
        asserted,
    ));
    if matches!(sn.law(), BlockLaw::UniformWords) && big_m <= MAX_EXACT_BLOCK {
        let exact = uniform_block_ball_mass(big_m, epsilon)?;
        let cells = level_masses.len() * centers.len();
        let pooled = level_masses.iter().flatten().copied().sum::<T>() / T::of_usize(cells);
        checks.push(LemmaCheck::near(
            "m_block_ball_exact",
            pooled,
            exact,
            binomial_sigma(exact, per_level * m),
            3.0,
            true,
        ));
    }

    let fixed = &centers[2];
    let dists: Vec<T> = blocks
        .iter()
        .map(|w| T::of_usize(fixed.mismatches_unchecked(w)) / T::of_usize(big_m))
        .collect();
    let count = T::of_usize(dists.len());
    let mean = dists.iter().copied().sum::<T>() / count;
    let var = dists.iter().map(|&d| (d - mean) * (d - mean)).sum::<T>() / (count - T::one());
    checks.push(LemmaCheck::near(
        "mean_block_distance",
        mean,
        T::half(),
        (var / count).sqrt(),
        3.0,
        true,
    ));

    let covering_count_bound = T::half() / stacked_ball_bound(m, epsilon)?;
    Ok(BallBoundReport {
        epsilon,
        blocks: m,
        block_len: big_m,
        sample_count,
        lemma_mode: epsilon <= T::of_f64(0.01),
        asserted,
        covering_count_bound,
        checks,
    })
}

/// Fraction of fiber points in the upper half at each level `jM`, for
/// uniform starting cells at column bases, before any resampling.
///
/// Reports the largest deviation from `½` over levels, against `4σ`.
pub fn level_marginals<T: Scalar>(
    base: &Orbit,
    cocycle: &DyadicCocycle,
    tower: &RokhlinTower,
    block_len: usize,
    samples: usize,
    seed: u64,
) -> Result<LemmaCheck<T>> {
    if base.len() != tower.len() {
        return Err(Error::LengthMismatch {
            left: tower.len(),
            right: base.len(),
        });
    }
    if block_len == 0 || !tower.h().is_multiple_of(block_len) {
        return Err(domain(
            "block length",
            format!("{block_len} does not divide {}", tower.h()),
        ));
    }
    if samples < MIN_SAMPLES {
        return Err(Error::InsufficientData(format!(
            "{samples} samples, at least {MIN_SAMPLES} needed"
        )));
    }
    let levels = tower.h() / block_len;
    let half = 1u32 << (cocycle.resolution() - 1);
    let upper: Vec<Vec<bool>> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(seed, i as u64);
            let column = rng.gen_range(0..tower.column_count());
            let start = tower.base_positions()[column];
            let mut u = (rng.gen::<u64>() & (cocycle.cells() - 1)) as u32;
            let mut out = Vec::with_capacity(levels);
            for level in 0..tower.h() {
                if level % block_len == 0 {
                    out.push(u >= half);
                }
                let t = start + level;
                u = cocycle.apply(t, base.symbols.get(t), u);
            }
            out
        })
        .collect();
    let mut worst = T::zero();
    let mut worst_fraction = T::half();
    for j in 0..levels {
        let ones = upper.iter().filter(|row| row[j]).count();
        let f = T::of_usize(ones) / T::of_usize(samples);
        if (f - T::half()).abs() >= worst {
            worst = (f - T::half()).abs();
            worst_fraction = f;
        }
    }
    Ok(LemmaCheck::near(
        "level_marginals",
        worst_fraction,
        T::half(),
        binomial_sigma(T::half(), samples),
        4.0,
        true,
    ))
}

/// Heavy-block analysis of a sparse index set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparseIntervals {
    /// Blocks `j` with `|I_j ∩ A| < √ε·M`, ascending.
    pub blocks: Vec<usize>,
    /// Number of blocks not in `blocks`.
    pub heavy: usize,
    /// `|J| > (1 − √ε)m`.
    pub strict_bound: bool,
    /// `|J| ≥ (1 − √ε)m`.
    pub weak_bound: bool,
}

fn block_counts(a: &[usize], m: usize, block_len: usize) -> Result<Vec<usize>> {
    if m == 0 || block_len == 0 {
        return Err(domain("blocks", "m and M must be positive"));
    }
    let n = m * block_len;
    let mut seen = vec![false; n];
    let mut counts = vec![0usize; m];
    for &i in a {
        if i >= n {
            return Err(domain("index", format!("{i} is outside [0, {n})")));
        }
        if !seen[i] {
            seen[i] = true;
            counts[i / block_len] += 1;
        }
    }
    Ok(counts)
}

/// `J = { j : |I_j ∩ A| < √ε·M }` for `A ⊂ [0, mM)` with `|A| ≤ ε·mM`.
///
/// Comparisons are squared so no root is taken.
pub fn sparse_interval_lemma<T: Scalar>(
    a: &[usize],
    m: usize,
    block_len: usize,
    epsilon: T,
) -> Result<SparseIntervals> {
    if !(epsilon > T::zero() && epsilon <= T::one()) {
        return Err(domain("epsilon", format!("{epsilon} must lie in (0, 1]")));
    }
    let counts = block_counts(a, m, block_len)?;
    let size: usize = counts.iter().sum();
    if T::of_usize(size) > epsilon * T::of_usize(m * block_len) {
        return Err(Error::Precondition(format!("|A| = {size} exceeds ε·mM")));
    }
    let threshold = epsilon * T::of_usize(block_len * block_len);
    let blocks: Vec<usize> = (0..m)
        .filter(|&j| T::of_usize(counts[j] * counts[j]) < threshold)
        .collect();
    let heavy = m - blocks.len();
    let k2 = T::of_usize(heavy * heavy);
    let limit = epsilon * T::of_usize(m * m);
    Ok(SparseIntervals {
        blocks,
        heavy,
        strict_bound: k2 < limit,
        weak_bound: k2 <= limit,
    })
}

/// [`sparse_interval_lemma`] with `ε = num/den` in exact integer arithmetic.
pub fn sparse_interval_lemma_exact(
    a: &[usize],
    m: usize,
    block_len: usize,
    num: u64,
    den: u64,
) -> Result<SparseIntervals> {
    if den == 0 || num == 0 || num > den {
        return Err(domain("epsilon", format!("{num}/{den} must lie in (0, 1]")));
    }
    let counts = block_counts(a, m, block_len)?;
    sparse_from_counts(&counts, block_len, num, den)
}

fn sparse_from_counts(counts: &[usize], block_len: usize, num: u64, den: u64) -> Result<SparseIntervals> {
    let m = counts.len() as u128;
    let (num, den) = (num as u128, den as u128);
    let size: u128 = counts.iter().map(|&c| c as u128).sum();
    if size * den > num * m * block_len as u128 {
        return Err(Error::Precondition(format!("|A| = {size} exceeds ε·mM")));
    }
    let bl = block_len as u128;
    let blocks: Vec<usize> = (0..counts.len())
        .filter(|&j| (counts[j] as u128).pow(2) * den < num * bl * bl)
        .collect();
    let heavy = counts.len() - blocks.len();
    let k2 = (heavy as u128).pow(2) * den;
    Ok(SparseIntervals {
        blocks,
        heavy,
        strict_bound: k2 < num * m * m,
        weak_bound: k2 <= num * m * m,
    })
}

/// Outcome of a batch of sparse-interval instances.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparseSweep {
    pub instances: u64,
    /// Instances with `|J| ≤ (1 − √ε)m`.
    pub strict_violations: u64,
    /// Instances with `|J| < (1 − √ε)m`.
    pub weak_violations: u64,
    /// Strict violations where `√ε·m` is an integer equal to the heavy count.
    pub boundary_violations: u64,
    /// First strict violation as `(m, M, ε numerator, ε denominator, A)`;
    /// a zero denominator means the numerator holds the bits of an `f64` ε.
    pub example: Option<(usize, usize, u64, u64, Vec<usize>)>,
}

impl SparseSweep {
    fn record(&mut self, counts: &[usize], block_len: usize, num: u64, den: u64, a: impl FnOnce() -> Vec<usize>) {
        let s = sparse_from_counts(counts, block_len, num, den).expect("instances respect |A| ≤ ε·mM");
        self.instances += 1;
        if !s.strict_bound {
            self.strict_violations += 1;
            let m = counts.len() as u128;
            if (s.heavy as u128).pow(2) * den as u128 == num as u128 * m * m {
                self.boundary_violations += 1;
            }
            if self.example.is_none() {
                self.example = Some((counts.len(), block_len, num, den, a()));
            }
        }
        if !s.weak_bound {
            self.weak_violations += 1;
        }
    }

    fn merge(mut self, other: Self) -> Self {
        self.instances += other.instances;
        self.strict_violations += other.strict_violations;
        self.weak_violations += other.weak_violations;
        self.boundary_violations += other.boundary_violations;
        if self.example.is_none() {
            self.example = other.example;
        }
        self
    }
}

/// Random instances: `m, M ∈ [1, 12]`, `ε` uniform in `(0, 1)`, and `A` a
/// uniform subset whose size is uniform in `[0, ⌊ε·mM⌋]`.
pub fn sparse_interval_sweep(instances: usize, seed: u64) -> SparseSweep {
    (0..instances)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(seed, i as u64);
            let m = rng.gen_range(1..=12usize);
            let block_len = rng.gen_range(1..=12usize);
            let n = m * block_len;
            let epsilon: f64 = loop {
                let e: f64 = rng.gen();
                if e > 0.0 {
                    break e;
                }
            };
            let k = rng.gen_range(0..=(epsilon * n as f64).floor() as usize);
            let a = rand::seq::index::sample(&mut rng, n, k).into_vec();
            let r = sparse_interval_lemma(&a, m, block_len, epsilon).expect("instances respect |A| ≤ ε·mM");
            let mut s = SparseSweep {
                instances: 1,
                ..SparseSweep::default()
            };
            if !r.strict_bound {
                s.strict_violations = 1;
                if (r.heavy * r.heavy) as f64 == epsilon * (m * m) as f64 {
                    s.boundary_violations = 1;
                }
                let mut a = a;
                a.sort_unstable();
                s.example = Some((m, block_len, epsilon.to_bits(), 0, a));
            }
            if !r.weak_bound {
                s.weak_violations = 1;
            }
            s
        })
        .reduce(SparseSweep::default, SparseSweep::merge)
}

/// Every `A ⊂ [0, mM)` for every `m·M ≤ max_cells`, at the tightest
/// grid value `ε = max(|A|, 1)/(mM)`.
pub fn sparse_interval_exhaustive(max_cells: usize) -> Result<SparseSweep> {
    if max_cells > 24 {
        return Err(Error::Size {
            detail: format!("exhaustive sweep stops at 24 cells, {max_cells} requested"),
        });
    }
    let mut shapes = Vec::new();
    for m in 1..=max_cells {
        for block_len in 1..=max_cells / m {
            shapes.push((m, block_len));
        }
    }
    Ok(shapes
        .into_par_iter()
        .map(|(m, block_len)| {
            let n = m * block_len;
            let block_mask = (1u64 << block_len) - 1;
            let mut s = SparseSweep::default();
            let mut counts = vec![0usize; m];
            for set in 0u64..1 << n {
                for (j, c) in counts.iter_mut().enumerate() {
                    *c = ((set >> (j * block_len)) & block_mask).count_ones() as usize;
                }
                let size = (set.count_ones() as u64).max(1);
                s.record(&counts, block_len, size, n as u64, || {
                    (0..n).filter(|&i| set >> i & 1 == 1).collect()
                });
            }
            s
        })
        .reduce(SparseSweep::default, SparseSweep::merge))
}
