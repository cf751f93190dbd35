use rand::seq::index::sample;
use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::rng::rng_for;
use crate::stacking::names::StackedNames;
use crate::transport::Verdict;

/// Fewest table rows accepted.
pub const MIN_ROWS: usize = 100;
/// Block pairs beyond this many are subsampled.
pub const MAX_PAIRS: usize = 1024;
/// Largest bias-corrected mutual information (bits) still read as independent.
pub const MI_THRESHOLD: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndependenceReport {
    pub rows: usize,
    pub pairs_tested: usize,
    /// Largest plug-in mutual information over tested pairs, in bits.
    pub max_plugin_mi: f64,
    /// Largest Miller–Madow corrected mutual information, in bits.
    pub max_corrected_mi: f64,
    /// Block pair attaining `max_corrected_mi`.
    pub worst_pair: (usize, usize),
    pub threshold: f64,
    pub verdict: Verdict,
}

/// Pairwise mutual information between block columns of `table`.
///
/// Each row holds the `m` block words of one sampled column. All pairs are
/// tested when there are at most [`MAX_PAIRS`], otherwise a seeded subset.
pub fn check_block_independence(table: &[Vec<u64>], block_len: usize, seed: u64) -> Result<IndependenceReport> {
    if table.len() < MIN_ROWS {
        return Err(Error::InsufficientData(format!(
            "{} rows, at least {MIN_ROWS} needed",
            table.len()
        )));
    }
    if block_len == 0 || block_len > 32 {
        return Err(domain("block length", format!("{block_len} must lie in 1..=32")));
    }
    let m = table[0].len();
    if let Some(bad) = table.iter().find(|r| r.len() != m) {
        return Err(Error::LengthMismatch {
            left: m,
            right: bad.len(),
        });
    }
    if m < 2 {
        return Err(Error::InsufficientData("fewer than two blocks per row".into()));
    }
    let all = m * (m - 1) / 2;
    let pairs: Vec<(usize, usize)> = if all <= MAX_PAIRS {
        (0..m).flat_map(|a| (a + 1..m).map(move |b| (a, b))).collect()
    } else {
        let mut picked: Vec<usize> = sample(&mut rng_for(seed, 0x6d69), all, MAX_PAIRS).into_vec();
        picked.sort_unstable();
        picked.into_iter().map(|p| unrank_pair(p, m)).collect()
    };
    let mis: Vec<(f64, f64)> = pairs
        .par_iter()
        .map(|&(a, b)| mutual_information(table, a, b, block_len))
        .collect();
    let mut worst = 0;
    for (i, mi) in mis.iter().enumerate() {
        if mi.1 > mis[worst].1 {
            worst = i;
        }
    }
    let max_plugin_mi = mis.iter().map(|m| m.0).fold(0.0, f64::max);
    let max_corrected_mi = mis[worst].1;
    Ok(IndependenceReport {
        rows: table.len(),
        pairs_tested: pairs.len(),
        max_plugin_mi,
        max_corrected_mi,
        worst_pair: pairs[worst],
        threshold: MI_THRESHOLD,
        verdict: Verdict::from_bool(max_corrected_mi < MI_THRESHOLD),
    })
}

/// Samples `rows` columns of `sn` and tests its block partitions for
/// pairwise independence.
pub fn check_rj_independence(sn: &StackedNames, rows: usize, seed: u64) -> Result<IndependenceReport> {
    if sn.block_len() > 32 {
        return Err(domain("block length", "mutual information is tabulated for M ≤ 32"));
    }
    check_block_independence(&sn.block_table(rows, seed), sn.block_len(), seed)
}

fn unrank_pair(mut p: usize, m: usize) -> (usize, usize) {
    let mut a = 0;
    while p >= m - 1 - a {
        p -= m - 1 - a;
        a += 1;
    }
    (a, a + 1 + p)
}

fn entropy(counts: &[u32], n: f64) -> f64 {
    counts
        .iter()
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum()
}

/// Plug-in and Miller–Madow mutual information of columns `a`, `b`, in bits.
fn mutual_information(table: &[Vec<u64>], a: usize, b: usize, block_len: usize) -> (f64, f64) {
    let n = table.len() as f64;
    let mut left: FxHashMap<u64, u32> = FxHashMap::default();
    let mut right: FxHashMap<u64, u32> = FxHashMap::default();
    let mut joint_counts: Vec<u32> = if 2 * block_len <= 16 {
        let mut dense = vec![0u32; 1 << (2 * block_len)];
        for row in table {
            dense[((row[a] << block_len) | row[b]) as usize] += 1;
        }
        dense.retain(|&c| c > 0);
        dense
    } else {
        let mut sparse: FxHashMap<(u64, u64), u32> = FxHashMap::default();
        for row in table {
            *sparse.entry((row[a], row[b])).or_default() += 1;
        }
        sparse.into_values().collect()
    };
    for row in table {
        *left.entry(row[a]).or_default() += 1;
        *right.entry(row[b]).or_default() += 1;
    }
    joint_counts.sort_unstable();
    let mut lc: Vec<u32> = left.into_values().collect();
    let mut rc: Vec<u32> = right.into_values().collect();
    lc.sort_unstable();
    rc.sort_unstable();
    let hxy = entropy(&joint_counts, n);
    let hx = entropy(&lc, n);
    let hy = entropy(&rc, n);
    let plugin = (hx + hy - hxy).max(0.0);
    let bias =
        (lc.len() as f64 + rc.len() as f64 - joint_counts.len() as f64 - 1.0) / (2.0 * n * std::f64::consts::LN_2);
    (plugin, plugin + bias)
}
