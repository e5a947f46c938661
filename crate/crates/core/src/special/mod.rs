//! Real special functions used throughout the crate.
//!
//! Everything here is `f64`, pure, and restricted to the argument ranges the
//! bounds actually need (positive Gamma arguments, integer Bessel orders).

mod bessel;
mod erf;
mod gamma;

pub use bessel::{
    bessel_j, bessel_j_prime, bessel_j_prime_zeros, bessel_j_prime_zeros_below, spherical_j,
    spherical_j_prime, spherical_j_prime_zeros, spherical_j_prime_zeros_below,
};
pub use erf::{erfc, erfcx};
pub use gamma::{
    beta, factorial, gamma, ln_gamma, unit_ball_volume, upper_incomplete_gamma,
};

use crate::error::{Error, Result};

/// A finite real argument. Construction rejects NaN and infinities.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct RealArg(f64);

impl RealArg {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() {
            Ok(RealArg(value))
        } else {
            Err(Error::domain("RealArg", format!("non-finite argument {value}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for RealArg {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        RealArg::new(value)
    }
}

pub(crate) fn check_finite(func: &'static str, x: f64) -> Result<f64> {
    RealArg::new(x)
        .map(RealArg::value)
        .map_err(|_| Error::domain(func, format!("non-finite argument {x}")))
}
