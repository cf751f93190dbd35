use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Separation {
    InsideU,
    NotCertified,
}

impl Separation {
    pub fn as_str(self) -> &'static str {
        match self {
            Separation::InsideU => "inside_U",
            Separation::NotCertified => "not_certified",
        }
    }
}

/// One-sided certificate: a cover lower bound strictly above twice the
/// base's `2n`-block count.
pub fn separation_check(base_complexity: usize, cover_lb: usize) -> Separation {
    if cover_lb as u128 > 2 * base_complexity as u128 {
        Separation::InsideU
    } else {
        Separation::NotCertified
    }
}
