//! Hamming-ball covering numbers of weighted name samples.

mod block_coding;
mod greedy;
mod oracle;
mod packing;
mod sample;
mod separation;

pub use block_coding::{block_coding_cover, block_coding_cover_for, BlockCover};
pub use greedy::greedy_cover;
pub use oracle::{exact_cover_oracle, ORACLE_MAX_POINTS};
pub use packing::{packing, packing_lower_bound, Packing};
pub use sample::{
    ball_mass, read_cover_csv, write_cover_csv, CoverMethod, CoverParams, CoverResult, CoverRow, WeightedSample,
};
pub use separation::{separation_check, Separation};
