//! Scalar abstraction shared by every solver in the crate.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating point type the model is evaluated in: `f32` or `f64`.
pub trait Scalar: Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static {
    /// Absolute tolerance for comparisons of normalized quantities
    /// (probabilities as-is, flows divided by demand).
    const TOLERANCE: f64;

    /// Relative slack, in units of the route-2 free-flow time, allowed when
    /// comparing expected route costs in an equilibrium check.
    const COST_SLACK: f64;

    /// Converts an `f64` literal. Panics only for values no float can hold.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn tol() -> Self {
        Self::lit(Self::TOLERANCE)
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Positive part `max(self, 0)`.
    #[inline]
    fn pos(self) -> Self {
        self.max(Self::zero())
    }
}

impl Scalar for f32 {
    const TOLERANCE: f64 = 1e-5;
    const COST_SLACK: f64 = 1e-4;
}

impl Scalar for f64 {
    const TOLERANCE: f64 = 1e-9;
    const COST_SLACK: f64 = 1e-7;
}
