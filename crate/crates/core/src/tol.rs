//! Floating-point comparison helpers shared by every module.
//!
//! Distances are `f64`; all comparisons allow a relative slack of
//! [`REL_TOL`].

pub const REL_TOL: f64 = 1e-9;

/// `a <= b` up to relative tolerance.
#[inline]
pub fn le(a: f64, b: f64) -> bool {
    a <= b + REL_TOL * a.abs().max(b.abs())
}

/// `a >= b` up to relative tolerance.
#[inline]
pub fn ge(a: f64, b: f64) -> bool {
    le(b, a)
}

/// `a < b` with the tolerance band counted as equal.
#[inline]
pub fn lt(a: f64, b: f64) -> bool {
    !ge(a, b)
}

#[inline]
pub fn gt(a: f64, b: f64) -> bool {
    !le(a, b)
}

#[inline]
pub fn approx_eq(a: f64, b: f64) -> bool {
    le(a, b) && le(b, a)
}

/// Slack for certificate bounds: `1e-9` absolute on unit-scale values,
/// relative above that.
#[inline]
pub fn cert_slack(b: f64) -> f64 {
    1e-9 * b.abs().max(1.0)
}
