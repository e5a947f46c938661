use std::f64::consts::PI;

use super::gamma::{upper_cf, upper_gamma_unchecked};

/// Complementary error function.
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    // erfc(x) = Γ(1/2, x²)/√π
    upper_gamma_unchecked(0.5, x * x) / PI.sqrt()
}

/// Scaled complementary error function e^{x²} erfc(x).
///
/// Does not overflow for large positive x, where it behaves like 1/(x√π).
pub fn erfcx(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < 0.0 {
        return 2.0 * (x * x).exp() - erfcx(-x);
    }
    let r = x * x;
    if r < 1.5 {
        r.exp() * erfc(x)
    } else {
        // Γ(1/2, r) = e^{-r} r^{1/2} h
        x * upper_cf(0.5, r) / PI.sqrt()
    }
}
