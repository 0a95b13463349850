//! Spherical-cap geometry.
//!
//! `g(alpha, x)` is the radius of the ball whose cap has chord `alpha` and
//! height `x`; it is the kernel of every bound in this crate. Two points of a
//! set at distance `alpha` whose midpoint lies at distance `x` from the set
//! certify that no ball of radius larger than `g(alpha, x)` rolls freely
//! between them.

use crate::error::{Error, Result};
use std::fmt;

/// Absolute slack at the domain boundaries of [`g`] and [`g_inv`]. Inputs
/// within this distance of the boundary are clamped onto it instead of being
/// rejected: midpoint distances computed in floating point routinely exceed
/// `alpha/2` by a few ulps even though `x <= alpha/2` holds exactly in real
/// arithmetic.
pub const DOMAIN_SLACK: f64 = 1e-12;

/// A non-negative quantity that may be `+inf`.
///
/// Distances, bound values and profile values are all of this type. `NaN` is
/// excluded by construction, so the `PartialOrd` ordering is total in
/// practice.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ExtendedReal(f64);

impl ExtendedReal {
    pub const INFINITY: ExtendedReal = ExtendedReal(f64::INFINITY);

    /// Wraps a finite non-negative value.
    ///
    /// Panics in debug builds if `v` is negative, NaN or infinite.
    pub fn finite(v: f64) -> ExtendedReal {
        debug_assert!(v.is_finite() && v >= 0.0, "not a finite non-negative value: {v}");
        ExtendedReal(v)
    }

    /// Wraps a value that is either finite non-negative or `+inf`.
    pub fn from_raw(v: f64) -> ExtendedReal {
        debug_assert!(!v.is_nan() && v >= 0.0, "not a valid extended real: {v}");
        ExtendedReal(v)
    }

    /// The underlying `f64`; `f64::INFINITY` for the infinite value.
    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    pub fn min(self, other: ExtendedReal) -> ExtendedReal {
        ExtendedReal(self.0.min(other.0))
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_infinite() {
            write!(f, "inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl From<ExtendedReal> for f64 {
    fn from(v: ExtendedReal) -> f64 {
        v.0
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(Error::Domain(format!("chord length must be finite and >= 0, got {alpha}")));
    }
    Ok(())
}

/// Radius of the ball whose spherical cap has chord `alpha` and height `x`.
///
/// Defined for `x` in `[0, alpha/2]` as `alpha^2/(8 x) + x/2`, with the value
/// `+inf` at `x = 0`. The result is never smaller than `max(x, alpha/2)`.
/// Inputs within [`DOMAIN_SLACK`] of the domain are clamped; anything further
/// out is a domain error.
pub fn g(alpha: f64, x: f64) -> Result<ExtendedReal> {
    check_alpha(alpha)?;
    if !x.is_finite() {
        return Err(Error::Domain(format!("cap height must be finite, got {x}")));
    }
    let half = alpha / 2.0;
    if x < -DOMAIN_SLACK || x > half + DOMAIN_SLACK {
        return Err(Error::Domain(format!(
            "cap height {x} outside [0, {half}] for chord {alpha}"
        )));
    }
    let x = x.clamp(0.0, half);
    if x == 0.0 {
        return Ok(ExtendedReal::INFINITY);
    }
    if x == half {
        // alpha^2/(8x) + x/2 = alpha/2 exactly at the boundary; evaluating the
        // formula would lose an ulp.
        return Ok(ExtendedReal::finite(half));
    }
    Ok(ExtendedReal::finite(alpha * alpha / (8.0 * x) + x / 2.0))
}

/// Inverse of [`g`] in its height argument: the cap height at which a ball of
/// radius `r` subtends a chord `alpha`. Defined for `r >= alpha/2`; the
/// result lies in `[0, alpha/2]`.
pub fn g_inv(alpha: f64, r: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if !r.is_finite() || r < 0.0 {
        return Err(Error::Domain(format!("radius must be finite and >= 0, got {r}")));
    }
    let half = alpha / 2.0;
    if r < half - DOMAIN_SLACK {
        return Err(Error::Domain(format!("radius {r} below alpha/2 = {half}")));
    }
    let r = r.max(half);
    if alpha == 0.0 {
        return Ok(0.0);
    }
    // r - sqrt(r^2 - alpha^2/4), rearranged to avoid cancellation for r >> alpha.
    let disc = (r * r - half * half).max(0.0);
    Ok(half * half / (r + disc.sqrt()))
}
