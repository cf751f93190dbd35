//! Rokhlin towers over finite orbits, dyadic cocycles and their skew-product
//! names, independent cutting and stacking, and Monte Carlo checks of the
//! stacked ball-mass bounds.

mod cocycle;
mod independence;
mod lemmas;
mod names;
mod tower;

pub use cocycle::{
    is_bijection, skew_names, skew_names_from, CocycleKind, DyadicCocycle, MAX_RESOLUTION, MAX_TABLE_RESOLUTION,
};
pub use independence::{check_block_independence, check_rj_independence, IndependenceReport, MIN_ROWS, MI_THRESHOLD};
pub use lemmas::{
    ball_bound_report, level_marginals, sparse_interval_exhaustive, sparse_interval_lemma, sparse_interval_lemma_exact,
    sparse_interval_sweep, stacked_ball_bound, uniform_block_ball_mass, BallBoundReport, LemmaCheck, SparseIntervals,
    SparseSweep, MAX_EXACT_BLOCK, MIN_SAMPLES,
};
pub use names::{independent_stack_names, BlockLaw, Placement, StackedNames, MAX_BLOCK};
pub use tower::{build_tower, build_tower_shuffled, RokhlinTower};

/// Default fiber resolution `d`.
pub const DEFAULT_RESOLUTION: u32 = 16;
