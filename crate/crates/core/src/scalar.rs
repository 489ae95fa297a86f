//! Scalar abstraction for the numeric kernels.
//!
//! Weight computation, temperature scaling, and metric arithmetic are
//! written against [`Real`] so they run at `f32` or `f64`. Everything a
//! kernel needs is in the bound: IEEE float ops from [`num_traits::Float`],
//! lossless-enough construction from counts via [`num_traits::FromPrimitive`],
//! and iterator sums.

use num_traits::{Float, FromPrimitive};

/// Floating-point scalar usable in the numeric kernels.
pub trait Real: Float + FromPrimitive + core::iter::Sum<Self> + core::fmt::Debug {}

impl<T> Real for T where T: Float + FromPrimitive + core::iter::Sum<Self> + core::fmt::Debug {}

/// Converts an `f64` constant into `F`.
///
/// Panics only if `F` cannot represent ordinary finite constants, which no
/// `Real` type in practice fails to do.
pub fn real<F: Real>(value: f64) -> F {
    F::from_f64(value).expect("finite constant must convert")
}

/// Converts a count into `F`, saturating at `F::max_value()` for counts too
/// large to represent.
pub fn from_count<F: Real>(value: u64) -> F {
    F::from_u64(value).unwrap_or_else(F::max_value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_round_trips_constants() {
        assert_eq!(real::<f64>(2.5), 2.5);
        assert_eq!(real::<f32>(2.5), 2.5_f32);
    }

    #[test]
    fn from_count_handles_small_and_large() {
        assert_eq!(from_count::<f64>(16384), 16384.0);
        assert!(from_count::<f32>(u64::MAX).is_finite());
    }
}
