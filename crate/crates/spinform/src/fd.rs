//! Fourth-order central finite differences.
//!
//! Charts are closed-form, so stencils evaluate them analytically at offset
//! parameters; the default step balances truncation against rounding at
//! double precision.

use std::ops::{Add, Mul, Sub};

/// Default step for derivatives of closed-form maps.
pub const FD_STEP: f64 = 1e-3;

/// First derivative, error O(h⁴).
pub fn deriv1<T, F>(f: F, x: f64, h: f64) -> T
where
    T: Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
    F: Fn(f64) -> T,
{
    ((f(x - 2.0 * h) - f(x + 2.0 * h)) + (f(x + h) - f(x - h)) * 8.0) * (1.0 / (12.0 * h))
}

/// Second derivative, error O(h⁴).
pub fn deriv2<T, F>(f: F, x: f64, h: f64) -> T
where
    T: Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
    F: Fn(f64) -> T,
{
    ((f(x + h) + f(x - h)) * 16.0 - (f(x + 2.0 * h) + f(x - 2.0 * h)) - f(x) * 30.0)
        * (1.0 / (12.0 * h * h))
}

/// First derivative from five equally spaced samples centered at the node.
pub fn stencil1<T>(fm2: T, fm1: T, fp1: T, fp2: T, h: f64) -> T
where
    T: Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
{
    ((fm2 - fp2) + (fp1 - fm1) * 8.0) * (1.0 / (12.0 * h))
}
