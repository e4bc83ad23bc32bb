//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Real scalar used for weights, field values and kernel densities.
///
/// Implemented for `f32` and `f64`. All algorithms are written against this
/// trait; the crate root exports `f64` aliases for day-to-day use.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + NumAssign + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal. Panics only for values that are not
    /// representable at all, which never happens for the constants used here.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// `log2(1 + t)`, the logarithm used throughout the oscillation estimates.
    #[inline]
    fn log2_1p(self) -> Self {
        self.ln_1p() / Self::ln2()
    }

    #[inline]
    fn ln2() -> Self {
        Self::lit(std::f64::consts::LN_2)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Sums a sequence in order. Kept as a named helper so every reduction in the
/// crate has the same, schedule-independent summation order.
#[inline]
pub fn ordered_sum<S: Scalar, I: IntoIterator<Item = S>>(it: I) -> S {
    let mut acc = S::zero();
    for x in it {
        acc += x;
    }
    acc
}

/// Running maximum helper that keeps the first index attaining the maximum.
#[derive(Debug, Clone, Copy)]
pub struct ArgMax<S> {
    pub value: S,
    pub index: Option<usize>,
}

impl<S: Scalar> Default for ArgMax<S> {
    fn default() -> Self {
        Self { value: S::neg_infinity(), index: None }
    }
}

impl<S: Scalar> ArgMax<S> {
    /// Offers a candidate; only a strictly larger value replaces the current one.
    #[inline]
    pub fn offer(&mut self, value: S, index: usize) {
        if self.index.is_none() || value > self.value {
            self.value = value;
            self.index = Some(index);
        }
    }
}
