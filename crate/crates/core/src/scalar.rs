//! Floating-point scalar abstraction shared by every module.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real scalar the simulator is generic over (`f32` or `f64`).
///
/// Tolerances scale with the precision of the type: the `f64` values are the
/// ones quoted throughout the crate documentation.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Tolerance for exact algebraic identities (completeness, unitarity, normalization).
    fn algebra_tol() -> Self;

    /// Tolerance for decompose/reconstruct round trips.
    fn roundtrip_tol() -> Self;

    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    #[inline]
    fn algebra_tol() -> Self {
        1e-12
    }
    #[inline]
    fn roundtrip_tol() -> Self {
        1e-9
    }
}

impl Scalar for f32 {
    #[inline]
    fn algebra_tol() -> Self {
        1e-5
    }
    #[inline]
    fn roundtrip_tol() -> Self {
        1e-4
    }
}

/// `arccot(x) = atan2(1, x)`, with range `(0, π)` so that `arccot(0) = π/2`.
#[inline]
pub fn arccot<T: Scalar>(x: T) -> T {
    T::one().atan2(x)
}

/// Reduces an angle modulo π into `(−π/2, π/2]` (the upper end may overshoot by
/// [`Scalar::algebra_tol`]).
///
/// A Y-rotation by `a + π` equals minus the rotation by `a`, so this is the
/// canonical representative up to a global sign.
pub fn reduce_half_turn<T: Scalar>(angle: T) -> T {
    let pi = T::PI();
    let half = T::FRAC_PI_2();
    let mut a = angle - pi * ((angle + half) / pi).floor();
    // values within rounding of -π/2 belong to the closed end at +π/2
    if a <= -half + T::algebra_tol() {
        a = a + pi;
    }
    a
}

/// Distance between two angles modulo π.
pub fn half_turn_distance<T: Scalar>(a: T, b: T) -> T {
    let d = reduce_half_turn(a - b);
    d.abs().min((T::PI() - d.abs()).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    #[test]
    fn arccot_branch() {
        assert!((arccot(0.0_f64) - FRAC_PI_2).abs() < 1e-15);
        assert!((arccot(1.0_f64) - FRAC_PI_4).abs() < 1e-15);
        assert!(arccot(-1.0_f64) > FRAC_PI_2);
    }

    #[test]
    fn half_turn_reduction() {
        for &(x, want) in &[
            (0.0, 0.0),
            (PI, 0.0),
            (-FRAC_PI_2, FRAC_PI_2),
            (FRAC_PI_2, FRAC_PI_2),
            (3.0 * FRAC_PI_4, -FRAC_PI_4),
            (-3.0 * PI + 0.1, 0.1),
        ] {
            let got = reduce_half_turn(x);
            assert!((got - want).abs() < 1e-12, "{x} -> {got}, want {want}");
        }
        assert!(half_turn_distance(FRAC_PI_2 - 1e-13, -FRAC_PI_2) < 1e-12);
    }
}
