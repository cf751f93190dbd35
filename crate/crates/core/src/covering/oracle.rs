use crate::covering::{CoverMethod, CoverParams, CoverResult, WeightedSample};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const ORACLE_MAX_POINTS: usize = 24;

/// Minimal number of sample-centred balls covering more than `1 − δ`,
/// found by exhaustive search over centre sets of increasing size.
///
/// Among minimal sets the lexicographically smallest index set is returned.
pub fn exact_cover_oracle<T: Scalar>(s: &WeightedSample<T>, p: &CoverParams<T>) -> Result<CoverResult<T>> {
    p.check_sample(s)?;
    let m = s.len();
    if m > ORACLE_MAX_POINTS {
        return Err(Error::Size {
            detail: format!("exact cover oracle takes at most {ORACLE_MAX_POINTS} points, got {m}"),
        });
    }
    let weights = s.weights();
    let radius = p.radius();
    let masks: Vec<u32> = s
        .words()
        .iter()
        .map(|c| {
            s.ball_members(c, radius)
                .into_iter()
                .fold(0u32, |acc, j| acc | (1 << j))
        })
        .collect();
    // Identical balls are interchangeable; keep the first index of each.
    let mut distinct: Vec<usize> = Vec::new();
    for (i, &mask) in masks.iter().enumerate() {
        if !distinct.iter().any(|&d| masks[d] == mask) {
            distinct.push(i);
        }
    }
    let uncovered = |mask: u32| -> T { (0..m).filter(|&j| mask & (1 << j) == 0).map(|j| weights[j]).sum() };

    for k in 1..=distinct.len() {
        let mut chosen = Vec::with_capacity(k);
        if let Some(mask) = search(&distinct, &masks, k, 0, 0, &mut chosen, &|mask| {
            p.is_covered(uncovered(mask))
        }) {
            let centers: Vec<usize> = chosen.clone();
            let mut seen = 0u32;
            let increments = centers
                .iter()
                .map(|&c| {
                    let fresh = masks[c] & !seen;
                    seen |= masks[c];
                    (0..m).filter(|&j| fresh & (1 << j) != 0).map(|j| weights[j]).sum()
                })
                .collect();
            let covered_mass = (0..m).filter(|&j| mask & (1 << j) != 0).map(|j| weights[j]).sum();
            return Ok(CoverResult {
                k,
                centers,
                covered_mass,
                increments,
                method: CoverMethod::Exact,
            });
        }
    }
    Err(Error::Precondition(
        "no centre set reaches 1 − δ (balls must contain their centres)".into(),
    ))
}

fn search(
    candidates: &[usize],
    masks: &[u32],
    k: usize,
    start: usize,
    acc: u32,
    chosen: &mut Vec<usize>,
    done: &dyn Fn(u32) -> bool,
) -> Option<u32> {
    if chosen.len() == k {
        return done(acc).then_some(acc);
    }
    let need = k - chosen.len();
    for pos in start..=candidates.len().saturating_sub(need) {
        let c = candidates[pos];
        chosen.push(c);
        if let Some(mask) = search(candidates, masks, k, pos + 1, acc | masks[c], chosen, done) {
            return Some(mask);
        }
        chosen.pop();
    }
    None
}
