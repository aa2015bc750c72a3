//! Scalar abstractions shared by the real-valued and exact code paths.

use num_traits::{CheckedDiv, CheckedMul, CheckedSub, FromPrimitive, Num, Signed};
use std::fmt::Debug;

/// Field-like scalar used for correlation values: `f32`, `f64` or an exact rational.
pub trait Scalar: Num + Signed + FromPrimitive + PartialOrd + Clone + Debug + Send + Sync {}

impl<T> Scalar for T where T: Num + Signed + FromPrimitive + PartialOrd + Clone + Debug + Send + Sync {}

/// Integer ring with overflow-reporting arithmetic, used by fraction-free elimination.
///
/// Fixed-width types report overflow through `None`; arbitrary precision types never do.
pub trait ExactInteger:
    Num + Clone + Debug + From<i8> + CheckedMul + CheckedSub + CheckedDiv
{
}

impl<T> ExactInteger for T where T: Num + Clone + Debug + From<i8> + CheckedMul + CheckedSub + CheckedDiv {}
