//! Scalar abstraction for the numeric core.

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Scalar type used by the concrete pipeline aliases at the crate root.
pub type Scalar = f64;

/// Floating-point scalar, implemented for `f32` and `f64`.
pub trait Real:
    Float
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Default
    + Copy
    + Send
    + Sync
    + std::fmt::Debug
    + std::fmt::Display
    + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` constant into `T`.
pub fn real<T: Real>(v: f64) -> T {
    T::from_f64(v).expect("f64 constant representable in scalar type")
}

/// Total order on finite scalars; panics on NaN, which validated inputs exclude.
pub fn cmp_finite<T: Real>(a: T, b: T) -> std::cmp::Ordering {
    a.partial_cmp(&b).expect("finite scalars compare")
}
