use rand::Rng;
use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::models::Orbit;
use crate::rng::{derive_path, rng_for};
use crate::stacking::cocycle::DyadicCocycle;
use crate::stacking::tower::RokhlinTower;
use crate::words::BinaryWord;

/// Longest block that fits one packed limb.
pub const MAX_BLOCK: usize = 64;

/// How the fiber name of each tower block is drawn.
#[derive(Debug, Clone, PartialEq)]
pub enum BlockLaw {
    /// Independent uniform `M`-bit words.
    UniformWords,
    /// A fresh uniform fiber cell at each block start, then `M` steps of the
    /// cocycle over the base orbit. The identity cocycle gives names that are
    /// constant on blocks.
    Cocycle { cocycle: DyadicCocycle, base: BinaryWord },
    /// Every block repeats the column's first block word.
    CopiedBlocks,
}

/// Where sampled names start.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Placement {
    /// Uniform over all start positions that leave room for the name.
    Anywhere,
    /// At the given level of a uniformly chosen column.
    Level(usize),
}

/// Fiber names of the tower after independent cutting and stacking.
///
/// A point is an orbit position plus a fiber cell label; points in the same
/// column with the same label share block words.
#[derive(Debug, Clone)]
pub struct StackedNames {
    tower: RokhlinTower,
    block_len: usize,
    blocks: usize,
    seed: u64,
    law: BlockLaw,
}

/// Uniform block words over `tower`; requires `M | h` and `M ≤ 64`.
pub fn independent_stack_names(tower: &RokhlinTower, block_len: usize, seed: u64) -> Result<StackedNames> {
    StackedNames::new(tower, block_len, seed, BlockLaw::UniformWords)
}

impl StackedNames {
    pub fn new(tower: &RokhlinTower, block_len: usize, seed: u64, law: BlockLaw) -> Result<Self> {
        let h = tower.h();
        if block_len == 0 || block_len > h {
            return Err(domain("block length", format!("{block_len} must lie in 1..={h}")));
        }
        if block_len > MAX_BLOCK {
            return Err(Error::Size {
                detail: format!("block length {block_len} exceeds {MAX_BLOCK}"),
            });
        }
        if !h.is_multiple_of(block_len) {
            return Err(domain(
                "block length",
                format!("{block_len} does not divide tower height {h}"),
            ));
        }
        if let BlockLaw::Cocycle { base, .. } = &law {
            if base.len() != tower.len() {
                return Err(Error::LengthMismatch {
                    left: tower.len(),
                    right: base.len(),
                });
            }
        }
        Ok(Self {
            tower: tower.clone(),
            block_len,
            blocks: h / block_len,
            seed,
            law,
        })
    }

    /// Block-resampled names of a cocycle's skew product over `base`.
    pub fn from_cocycle(
        tower: &RokhlinTower,
        block_len: usize,
        seed: u64,
        base: &Orbit,
        cocycle: &DyadicCocycle,
    ) -> Result<Self> {
        Self::new(
            tower,
            block_len,
            seed,
            BlockLaw::Cocycle {
                cocycle: cocycle.clone(),
                base: base.symbols.clone(),
            },
        )
    }

    pub fn tower(&self) -> &RokhlinTower {
        &self.tower
    }

    /// `M`.
    pub fn block_len(&self) -> usize {
        self.block_len
    }

    /// `m = h / M`.
    pub fn blocks(&self) -> usize {
        self.blocks
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn law(&self) -> &BlockLaw {
        &self.law
    }

    /// Fiber word of block `j` in `column` for fiber label `cell`, position
    /// `jM + i` in bit `i`.
    pub fn block_at(&self, column: usize, cell: u64, j: usize) -> u64 {
        let mask = if self.block_len == 64 {
            u64::MAX
        } else {
            (1u64 << self.block_len) - 1
        };
        match &self.law {
            BlockLaw::UniformWords => derive_path(self.seed, &[column as u64, cell, j as u64]) & mask,
            BlockLaw::CopiedBlocks => derive_path(self.seed, &[column as u64, cell, 0]) & mask,
            BlockLaw::Cocycle { cocycle, base } => {
                let d = cocycle.resolution();
                let half = 1u32 << (d - 1);
                let mut u = (derive_path(self.seed, &[column as u64, cell, j as u64]) & (cocycle.cells() - 1)) as u32;
                let start = self.tower.base_positions()[column] + j * self.block_len;
                let mut word = 0u64;
                for i in 0..self.block_len {
                    if u >= half {
                        word |= 1 << i;
                    }
                    let t = start + i;
                    u = cocycle.apply(t, base.get(t), u);
                }
                word
            }
        }
    }

    /// Fiber bit on the extra top level of an `h + 1` column.
    fn top_bit(&self, column: usize, cell: u64) -> bool {
        derive_path(self.seed, &[column as u64, cell, u64::MAX]) & 1 == 1
    }

    /// Length-`n` fiber name of the point `(position, cell)`; names run on
    /// into the following columns.
    pub fn name_at(&self, position: usize, cell: u64, n: usize) -> Result<BinaryWord> {
        let len = self.tower.len();
        if position + n > len {
            return Err(Error::WindowOutOfRange {
                offset: position,
                len: n,
                available: len,
            });
        }
        let mut out = BinaryWord::with_capacity(n);
        if n == 0 {
            return Ok(out);
        }
        let (mut column, mut level) = self.tower.locate(position).expect("position inside the tower");
        let h = self.tower.h();
        let heights = self.tower.column_heights();
        let mut left = n;
        while left > 0 {
            if level < h {
                let j = level / self.block_len;
                let i = level % self.block_len;
                let take = (self.block_len - i).min(left);
                out.push_bits(self.block_at(column, cell, j) >> i, take);
                level += take;
                left -= take;
            } else {
                out.push(self.top_bit(column, cell));
                level += 1;
                left -= 1;
            }
            if level == heights[column] {
                column += 1;
                level = 0;
            }
        }
        Ok(out)
    }

    /// `count` names of length `n` at independently drawn points. Draw `i`
    /// depends only on `(seed, i)`.
    pub fn sample_names(&self, n: usize, count: usize, placement: Placement, seed: u64) -> Result<Vec<BinaryWord>> {
        let len = self.tower.len();
        if n > len {
            return Err(Error::WindowOutOfRange {
                offset: 0,
                len: n,
                available: len,
            });
        }
        if let Placement::Level(level) = placement {
            if level >= self.tower.h() {
                return Err(domain(
                    "level",
                    format!("{level} is not below the tower height {}", self.tower.h()),
                ));
            }
            let first = self.tower.base_positions()[0];
            if first + level + n > len {
                return Err(Error::WindowOutOfRange {
                    offset: first + level,
                    len: n,
                    available: len,
                });
            }
        }
        (0..count)
            .into_par_iter()
            .map(|i| {
                let (position, cell) = self.draw_point(n, placement, seed, i as u64);
                self.name_at(position, cell, n)
            })
            .collect()
    }

    /// Block-word table: one row per sampled `(column, cell)`, `m` words each.
    pub fn block_table(&self, rows: usize, seed: u64) -> Vec<Vec<u64>> {
        (0..rows)
            .into_par_iter()
            .map(|r| {
                let mut rng = rng_for(seed, r as u64);
                let column = rng.gen_range(0..self.tower.column_count());
                let cell: u64 = rng.gen();
                (0..self.blocks).map(|j| self.block_at(column, cell, j)).collect()
            })
            .collect()
    }

    fn draw_point(&self, n: usize, placement: Placement, seed: u64, i: u64) -> (usize, u64) {
        let mut rng = rng_for(seed, i);
        let len = self.tower.len();
        let position = match placement {
            Placement::Anywhere => rng.gen_range(0..=len - n),
            Placement::Level(level) => loop {
                let column = rng.gen_range(0..self.tower.column_count());
                let p = self.tower.base_positions()[column] + level;
                if p + n <= len {
                    break p;
                }
            },
        };
        (position, rng.gen())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stacking::tower::build_tower;

    #[test]
    fn names_follow_blocks() {
        let t = build_tower(1_000, 20).unwrap();
        let sn = independent_stack_names(&t, 5, 3).unwrap();
        assert_eq!(sn.blocks(), 4);
        let w = sn.name_at(0, 9, 20).unwrap();
        for j in 0..4 {
            assert_eq!(w.bits_at(5 * j, 5), sn.block_at(0, 9, j));
        }
        // a name starting mid-block and crossing into the next column
        let w = sn.name_at(17, 9, 10).unwrap();
        assert_eq!(w.bits_at(0, 3), sn.block_at(0, 9, 3) >> 2);
        assert_eq!(w.bits_at(3, 5), sn.block_at(1, 9, 0));
    }

    #[test]
    fn tall_columns_get_a_top_bit() {
        let t = build_tower(1_003, 20).unwrap();
        assert_eq!(t.column_heights()[0], 21);
        let sn = independent_stack_names(&t, 4, 1).unwrap();
        let w = sn.name_at(0, 2, 26).unwrap();
        assert_eq!(w.bits_at(21, 4), sn.block_at(1, 2, 0));
    }

    #[test]
    fn identity_cocycle_gives_constant_blocks() {
        let t = build_tower(2_000, 40).unwrap();
        let base = Orbit::from_symbols(BinaryWord::zeros(2_000));
        let c = DyadicCocycle::identity(16).unwrap();
        let sn = StackedNames::from_cocycle(&t, 10, 7, &base, &c).unwrap();
        let mut seen = [false; 2];
        for cell in 0..50 {
            for j in 0..4 {
                let w = sn.block_at(3, cell, j);
                assert!(w == 0 || w == 0x3ff);
                seen[(w & 1) as usize] = true;
            }
        }
        assert_eq!(seen, [true, true]);
    }

    #[test]
    fn copied_blocks_repeat() {
        let t = build_tower(1_000, 20).unwrap();
        let sn = StackedNames::new(&t, 4, 0, BlockLaw::CopiedBlocks).unwrap();
        let row = &sn.block_table(1, 0)[0];
        assert!(row.iter().all(|&w| w == row[0]));
    }

    #[test]
    fn sampling_is_deterministic_and_placed() {
        let t = build_tower(10_000, 40).unwrap();
        let sn = independent_stack_names(&t, 8, 11).unwrap();
        let a = sn.sample_names(40, 50, Placement::Anywhere, 1).unwrap();
        let b = sn.sample_names(40, 50, Placement::Anywhere, 1).unwrap();
        assert_eq!(a, b);
        let c = sn.sample_names(8, 50, Placement::Level(16), 2).unwrap();
        assert_eq!(c.len(), 50);
        assert!(sn.sample_names(8, 5, Placement::Level(40), 2).is_err());
    }

    #[test]
    fn block_length_rules() {
        let t = build_tower(1_000, 20).unwrap();
        assert!(independent_stack_names(&t, 3, 0).is_err());
        assert!(independent_stack_names(&t, 21, 0).is_err());
        assert!(independent_stack_names(&t, 0, 0).is_err());
        assert!(independent_stack_names(&t, 20, 0).is_ok());
    }
}
