use std::fmt::{Debug, Display};
use std::sync::OnceLock;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating-point type the geometric kernels are written against.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Default predicate tolerance for this precision.
    const DEFAULT_ETA: f64;

    /// Converts an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite scalar")
    }
}

impl Scalar for f32 {
    const DEFAULT_ETA: f64 = 2e-5;
}

impl Scalar for f64 {
    const DEFAULT_ETA: f64 = 1e-9;
}

fn env_eta() -> Option<f64> {
    static ETA: OnceLock<Option<f64>> = OnceLock::new();
    *ETA.get_or_init(|| {
        std::env::var("SFD_TOLERANCE")
            .ok()
            .and_then(|v| v.trim().parse::<f64>().ok())
            .filter(|v| v.is_finite() && *v > 0.0)
    })
}

/// Predicate tolerance η: `SFD_TOLERANCE` if set and valid, else the
/// precision default.
pub fn default_eta<S: Scalar>() -> S {
    S::lit(env_eta().unwrap_or(S::DEFAULT_ETA))
}

/// Clamps `x` into `[lo, hi]`.
#[inline]
pub fn clamp<S: Scalar>(x: S, lo: S, hi: S) -> S {
    x.max(lo).min(hi)
}
