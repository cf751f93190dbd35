//! Sliding block codes: partitions measurable with respect to a finite window
//! of the coordinate partition.

use crate::error::{Error, Result};
use crate::models::Orbit;
use crate::words::BinaryWord;

/// Largest supported window `2·k0 + 1`.
pub const MAX_WINDOW: usize = 25;

/// Lookup table from `(2·k0 + 1)`-bit windows to a symbol.
///
/// Table index bit `j` is the orbit symbol at offset `j − k0` from the centre.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowCode {
    half_width: usize,
    table: Vec<Option<bool>>,
}

impl WindowCode {
    pub fn from_fn(half_width: usize, f: impl Fn(u64) -> bool) -> Result<Self> {
        let width = Self::check_width(half_width)?;
        Ok(Self {
            half_width,
            table: (0..1u64 << width).map(|w| Some(f(w))).collect(),
        })
    }

    /// Partial table; windows absent from `entries` are rejected when met.
    pub fn from_entries(half_width: usize, entries: &[(u64, bool)]) -> Result<Self> {
        let width = Self::check_width(half_width)?;
        let mut table = vec![None; 1 << width];
        for &(w, b) in entries {
            let slot = table.get_mut(w as usize).ok_or_else(|| Error::Domain {
                what: "window code entry",
                detail: format!("window {w} has more than {width} bits"),
            })?;
            *slot = Some(b);
        }
        Ok(Self { half_width, table })
    }

    pub fn identity() -> Self {
        Self::center(0)
    }

    /// Emits the centre symbol.
    pub fn center(half_width: usize) -> Self {
        Self::from_fn(half_width, |w| (w >> half_width) & 1 == 1).expect("valid width")
    }

    /// Majority vote over the window.
    pub fn majority(half_width: usize) -> Self {
        let width = 2 * half_width + 1;
        Self::from_fn(half_width, |w| (w.count_ones() as usize) * 2 > width).expect("valid width")
    }

    fn check_width(half_width: usize) -> Result<usize> {
        let width = 2 * half_width + 1;
        if width > MAX_WINDOW {
            return Err(Error::Size {
                detail: format!("window of width {width} exceeds {MAX_WINDOW}"),
            });
        }
        Ok(width)
    }

    pub fn half_width(&self) -> usize {
        self.half_width
    }

    pub fn width(&self) -> usize {
        2 * self.half_width + 1
    }

    pub fn lookup(&self, window: u64) -> Option<bool> {
        self.table.get(window as usize).copied().flatten()
    }

    /// Applies the code to every full window of `symbols`; output length is
    /// `symbols.len() − 2·k0`.
    pub fn apply(&self, symbols: &BinaryWord) -> Result<BinaryWord> {
        let width = self.width();
        if symbols.len() < width {
            return Err(Error::WindowOutOfRange {
                offset: 0,
                len: width,
                available: symbols.len(),
            });
        }
        let out_len = symbols.len() - 2 * self.half_width;
        let mut out = BinaryWord::with_capacity(out_len);
        for i in 0..out_len {
            let window = symbols.bits_at(i, width);
            match self.lookup(window) {
                Some(b) => out.push(b),
                None => {
                    return Err(Error::WindowNotCoded {
                        window: BinaryWord::from_u64(window, width).to_string(),
                    })
                }
            }
        }
        Ok(out)
    }
}

/// The coded name stream: entry `i` is the code applied to
/// `orbit[i .. i + 2·k0]`, i.e. centred at orbit position `i + k0`.
pub fn window_code_partition(orbit: &Orbit, code: &WindowCode) -> Result<BinaryWord> {
    code.apply(&orbit.symbols)
}
