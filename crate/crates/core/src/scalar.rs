//! Real-number abstraction shared by the metric, covering and transport code.
//!
//! Symbol data is always integral (packed bits, mismatch counts); only masses,
//! radii and distances are real. Those are generic over [`Scalar`], which is
//! implemented for `f32` and `f64`.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Tolerance used when checking that masses sum to one.
    fn mass_tolerance() -> Self;

    #[inline]
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("usize is representable as a float")
    }

    #[inline]
    fn of_f64(x: f64) -> Self {
        Self::from_f64(x).expect("f64 is representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar converts to f64")
    }

    #[inline]
    fn half() -> Self {
        Self::of_f64(0.5)
    }
}

impl Scalar for f64 {
    fn mass_tolerance() -> Self {
        1e-12
    }
}

impl Scalar for f32 {
    fn mass_tolerance() -> Self {
        1e-5
    }
}

/// Largest mismatch count `j` with `j / n < radius`, evaluated with the same
/// floating-point comparison as the definition of an open ball. `None` means
/// the ball is empty (radius <= 0).
pub fn strict_radius<T: Scalar>(radius: T, n: usize) -> Option<usize> {
    let len = T::of_usize(n);
    let inside = |j: usize| T::of_usize(j) / len < radius;
    if !inside(0) {
        return None;
    }
    let guess = (radius * len).floor().to_usize().unwrap_or(0).min(n);
    let mut j = guess;
    while j > 0 && !inside(j) {
        j -= 1;
    }
    while j < n && inside(j + 1) {
        j += 1;
    }
    Some(j)
}

/// Largest mismatch count `j` with `j / n <= radius`.
pub fn closed_radius<T: Scalar>(radius: T, n: usize) -> Option<usize> {
    let len = T::of_usize(n);
    let inside = |j: usize| T::of_usize(j) / len <= radius;
    if !inside(0) {
        return None;
    }
    let guess = (radius * len).floor().to_usize().unwrap_or(0).min(n);
    let mut j = guess;
    while j > 0 && !inside(j) {
        j -= 1;
    }
    while j < n && inside(j + 1) {
        j += 1;
    }
    Some(j)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strict_radius_matches_definition() {
        assert_eq!(strict_radius(0.25_f64, 10), Some(2));
        assert_eq!(strict_radius(0.2_f64, 10), Some(1));
        assert_eq!(strict_radius(0.0_f64, 10), None);
        assert_eq!(strict_radius(1.5_f64, 10), Some(10));
        assert_eq!(strict_radius(0.05_f64, 10), Some(0));
        assert_eq!(strict_radius(0.01_f32, 400), Some(3));
    }

    #[test]
    fn closed_radius_includes_boundary() {
        assert_eq!(closed_radius(0.2_f64, 10), Some(2));
        assert_eq!(closed_radius(0.0_f64, 10), Some(0));
        assert_eq!(closed_radius(-0.1_f64, 10), None);
    }

    #[test]
    fn brute_force_agreement() {
        for n in 1..40 {
            for r in 0..=50 {
                let radius = r as f64 / 37.0;
                let brute = (0..=n).filter(|&j| (j as f64) / (n as f64) < radius).max();
                assert_eq!(strict_radius(radius, n), brute, "n={n} radius={radius}");
            }
        }
    }
}
