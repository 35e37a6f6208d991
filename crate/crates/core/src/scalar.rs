//! Floating point abstraction shared by the numeric kernels.
//!
//! Geometry, car-following and energy routines are written against [`Scalar`]
//! so they can run in `f32` for bulk what-if sweeps and in `f64` for the
//! simulator proper.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive};

/// Floating point: `f32` or `f64`.
pub trait Scalar:
    Float + FromPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts a literal constant into this scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
