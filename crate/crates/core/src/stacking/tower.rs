use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::rng_for;

/// Tiling of the orbit index range `[0, L)` by columns of height `h` and
/// `h + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RokhlinTower {
    base_positions: Vec<usize>,
    column_heights: Vec<usize>,
    h: usize,
    len: usize,
}

impl RokhlinTower {
    pub fn base_positions(&self) -> &[usize] {
        &self.base_positions
    }

    pub fn column_heights(&self) -> &[usize] {
        &self.column_heights
    }

    pub fn h(&self) -> usize {
        self.h
    }

    /// Orbit length covered.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn column_count(&self) -> usize {
        self.base_positions.len()
    }

    /// `(base position, height)` per column, left to right.
    pub fn columns(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.base_positions
            .iter()
            .copied()
            .zip(self.column_heights.iter().copied())
    }

    /// Column index and level of an orbit position.
    pub fn locate(&self, position: usize) -> Option<(usize, usize)> {
        if position >= self.len {
            return None;
        }
        let c = self.base_positions.partition_point(|&b| b <= position) - 1;
        Some((c, position - self.base_positions[c]))
    }

    /// Checks that the columns partition `[0, L)` and use heights `h`, `h + 1`.
    pub fn validate(&self) -> Result<()> {
        let mut next = 0;
        for (b, height) in self.columns() {
            if b != next {
                return Err(Error::Precondition(format!(
                    "column at {b} leaves a gap or overlap at {next}"
                )));
            }
            if height != self.h && height != self.h + 1 {
                return Err(Error::Precondition(format!("column height {height} is not h or h + 1")));
            }
            next = b + height;
        }
        if next != self.len {
            return Err(Error::Precondition(format!(
                "columns end at {next}, orbit length is {}",
                self.len
            )));
        }
        Ok(())
    }

    fn from_heights(heights: Vec<usize>, h: usize, len: usize) -> Self {
        let mut base_positions = Vec::with_capacity(heights.len());
        let mut at = 0;
        for &height in &heights {
            base_positions.push(at);
            at += height;
        }
        Self {
            base_positions,
            column_heights: heights,
            h,
            len,
        }
    }
}

/// `b = L mod h` columns of height `h + 1` followed by `(L − b(h+1))/h`
/// columns of height `h`.
pub fn build_tower(len: usize, h: usize) -> Result<RokhlinTower> {
    if h == 0 {
        return Err(Error::Size {
            detail: "tower height must be positive".into(),
        });
    }
    let need = h.checked_mul(h + 1).ok_or_else(|| Error::Size {
        detail: format!("tower height {h} overflows"),
    })?;
    if len < need {
        return Err(Error::Size {
            detail: format!("orbit length {len} is below h·(h+1) = {need}"),
        });
    }
    let tall = len % h;
    let short = (len - tall * (h + 1)) / h;
    let mut heights = vec![h + 1; tall];
    heights.extend(std::iter::repeat_n(h, short));
    Ok(RokhlinTower::from_heights(heights, h, len))
}

/// Same columns as [`build_tower`] laid out in a seeded random order.
pub fn build_tower_shuffled(len: usize, h: usize, seed: u64) -> Result<RokhlinTower> {
    let t = build_tower(len, h)?;
    let mut heights = t.column_heights;
    heights.shuffle(&mut rng_for(seed, 0x746f_7772));
    Ok(RokhlinTower::from_heights(heights, h, len))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_rules() {
        let t = build_tower(10, 2).unwrap();
        assert_eq!(t.column_heights(), &[2; 5]);
        let t = build_tower(11, 2).unwrap();
        assert_eq!(t.column_heights(), &[3, 2, 2, 2, 2]);
        assert_eq!(t.base_positions(), &[0, 3, 5, 7, 9]);
        let t = build_tower(12, 3).unwrap();
        assert_eq!(t.column_heights(), &[3; 4]);
    }

    #[test]
    fn large_tiling() {
        let t = build_tower(1_000_000, 400).unwrap();
        t.validate().unwrap();
        assert_eq!(t.column_count(), 2500);
        let t = build_tower(1_000_123, 400).unwrap();
        t.validate().unwrap();
        assert!(t.column_heights().contains(&400) && t.column_heights().contains(&401));
    }

    #[test]
    fn shuffled_keeps_multiset() {
        let a = build_tower(100_037, 200).unwrap();
        let b = build_tower_shuffled(100_037, 200, 5).unwrap();
        b.validate().unwrap();
        let mut x = a.column_heights().to_vec();
        let mut y = b.column_heights().to_vec();
        assert_ne!(x, y);
        x.sort();
        y.sort();
        assert_eq!(x, y);
    }

    #[test]
    fn locate_positions() {
        let t = build_tower(11, 2).unwrap();
        assert_eq!(t.locate(0), Some((0, 0)));
        assert_eq!(t.locate(2), Some((0, 2)));
        assert_eq!(t.locate(3), Some((1, 0)));
        assert_eq!(t.locate(10), Some((4, 1)));
        assert_eq!(t.locate(11), None);
    }

    #[test]
    fn too_short() {
        assert!(matches!(build_tower(5, 2), Err(Error::Size { .. })));
        assert!(build_tower(6, 2).is_ok());
    }
}
