//! Scalar abstraction shared by the jet, expression, geometry and weighted layers.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real scalar type the tensor engine is generic over (`f32` or `f64`).
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// A point in the `(u, v, x, y)` chart.
pub type Point<T> = [T; 4];

/// Chart variable indices.
pub const U: usize = 0;
pub const V: usize = 1;
pub const X: usize = 2;
pub const Y: usize = 3;

/// Names of the chart coordinates in index order.
pub const COORD_NAMES: [&str; 4] = ["u", "v", "x", "y"];

pub(crate) fn point_to_f64<T: Real>(p: &Point<T>) -> [f64; 4] {
    [
        p[0].to_f64_lossy(),
        p[1].to_f64_lossy(),
        p[2].to_f64_lossy(),
        p[3].to_f64_lossy(),
    ]
}
