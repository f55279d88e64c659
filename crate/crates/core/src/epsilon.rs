use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Approximation parameter, restricted to `(0, 1/4]`.
///
/// Carries the derived constants every construction needs: the
/// normalization exponent `tau`, the pairing constant `C_eps = 4 + 32/eps`,
/// and the donation lag `ceil(7 log2(1/eps))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Epsilon(f64);

impl Epsilon {
    pub fn new(eps: f64) -> Result<Self> {
        if eps.is_finite() && eps > 0.0 && eps <= 0.25 {
            Ok(Epsilon(eps))
        } else {
            Err(Error::InvalidEpsilon(eps))
        }
    }

    /// `2^-k`.
    pub fn pow2(k: u32) -> Result<Self> {
        Self::new(2f64.powi(-(k as i32)))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `log2(1/eps)`.
    pub fn log_inv(self) -> f64 {
        -self.0.log2()
    }

    /// `tau = 6 + ceil(log2(1/eps))`; inputs are rescaled so that the
    /// smallest pairwise distance is exactly `2^tau`.
    pub fn tau(self) -> u32 {
        6 + ceil_tol(self.log_inv()) as u32
    }

    pub fn min_scaled_distance(self) -> f64 {
        2f64.powi(self.tau() as i32)
    }

    pub fn c_eps(self) -> f64 {
        4.0 + 32.0 / self.0
    }

    /// Number of nonempty in-edge level groups a vertex keeps before it
    /// starts donating: `ceil(7 log2(1/eps))`.
    pub fn donation_lag(self) -> usize {
        ceil_tol(7.0 * self.log_inv()) as usize
    }

    /// Level `i >= 1` with `length` in `(C_eps 2^(i-1), C_eps 2^i]`, or
    /// `None` when `length <= C_eps`.
    pub fn bracket_level(self, length: f64) -> Option<usize> {
        let c = self.c_eps();
        if crate::tol::le(length, c) {
            return None;
        }
        let mut i = 1usize;
        let mut upper = 2.0 * c;
        while !crate::tol::le(length, upper) {
            i += 1;
            upper *= 2.0;
        }
        Some(i)
    }
}

impl TryFrom<f64> for Epsilon {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        Epsilon::new(v)
    }
}

impl From<Epsilon> for f64 {
    fn from(e: Epsilon) -> f64 {
        e.0
    }
}

impl std::fmt::Display for Epsilon {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

// log2 of exact powers of two must not round up to the next integer.
fn ceil_tol(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() < 1e-9 {
        r
    } else {
        x.ceil()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quarter_constants() {
        let e = Epsilon::new(0.25).unwrap();
        assert_eq!(e.tau(), 8);
        assert_eq!(e.c_eps(), 132.0);
        assert_eq!(e.donation_lag(), 14);
        assert_eq!(e.min_scaled_distance(), 256.0);
    }

    #[test]
    fn non_power_of_two() {
        let e = Epsilon::new(0.2).unwrap();
        // log2(5) = 2.32
        assert_eq!(e.tau(), 9);
        assert_eq!(e.donation_lag(), 17);
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(Epsilon::new(0.5).is_err());
        assert!(Epsilon::new(0.0).is_err());
        assert!(Epsilon::new(f64::NAN).is_err());
    }

    #[test]
    fn brackets() {
        let e = Epsilon::new(0.25).unwrap();
        assert_eq!(e.bracket_level(132.0), None);
        assert_eq!(e.bracket_level(256.0), Some(1));
        assert_eq!(e.bracket_level(264.0), Some(1));
        assert_eq!(e.bracket_level(265.0), Some(2));
        assert_eq!(e.bracket_level(512.0), Some(2));
    }
}
