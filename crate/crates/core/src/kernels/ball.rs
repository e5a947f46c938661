//! Neumann heat kernel at the centre of the unit disk (d = 2) and unit
//! ball (d = 3). Only radial modes are non-zero at the centre.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::special::{bessel_j, bessel_j_prime_zeros, spherical_j, spherical_j_prime_zeros, upper_incomplete_gamma};

/// Largest number of radial zeros requested before giving up.
const MAX_ZEROS: usize = 1 << 16;
/// Consecutive radial zeros are more than this far apart in both families.
const MIN_GAP: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CenterValue {
    pub value: f64,
    /// Bound on the dropped tail of the mode sum.
    pub error: f64,
    pub zeros_used: usize,
}

/// Upper bound on the modes beyond `a`, or None when `a` is not yet in the
/// region where the term envelope decreases.
fn tail_bound(d: u32, a: f64, t: f64) -> Option<f64> {
    match d {
        // weight 1/(π J₀(k)²) <= k; Σ_{i>=1} f(a + 3i) <= (1/3)∫_a^∞ f
        2 if a * a * t >= 0.5 => Some((-a * a * t).exp() / (6.0 * t)),
        // weight 1/(2π j₀(k)²) = (1 + k²)/(2π) on tan k = k
        3 if a * a * t >= 1.0 => {
            let r = a * a * t;
            let g_half = upper_incomplete_gamma(0.5, r).ok()?;
            let g_three_halves = upper_incomplete_gamma(1.5, r).ok()?;
            let integral = g_half / (2.0 * t.sqrt()) + g_three_halves / (2.0 * t.powf(1.5));
            Some(integral / (2.0 * PI * MIN_GAP))
        }
        _ => None,
    }
}

fn mode_weight(d: u32, k: f64) -> f64 {
    match d {
        2 => 1.0 / (PI * bessel_j(0, k).powi(2)),
        _ => 1.0 / (2.0 * PI * spherical_j(0, k).powi(2)),
    }
}

fn constant_mode(d: u32) -> f64 {
    if d == 2 {
        1.0 / PI
    } else {
        3.0 / (4.0 * PI)
    }
}

fn center_sum(d: u32, zeros: &[f64], t: f64, tol: f64) -> Result<CenterValue> {
    let a = *zeros.last().ok_or_else(|| Error::domain("center kernel", "no zeros supplied"))?;
    let tail = tail_bound(d, a, t).unwrap_or(f64::INFINITY);
    if !(tail <= tol) {
        return Err(Error::Truncation {
            tol,
            detail: format!("{} zeros up to {a} leave a tail bound of {tail} at t = {t}", zeros.len()),
        });
    }
    // smallest terms first
    let sum: f64 = zeros.iter().rev().map(|&k| (-k * k * t).exp() * mode_weight(d, k)).sum();
    Ok(CenterValue { value: constant_mode(d) + sum, error: tail, zeros_used: zeros.len() })
}

fn check(t: f64, tol: f64) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) || !(tol > 0.0) {
        return Err(Error::domain("center kernel", format!("need t > 0 and tol > 0, got ({t}, {tol})")));
    }
    Ok(())
}

/// 𝕌_d(0, 0; t) on the unit ball for d ∈ {2, 3}, with a dropped tail of at
/// most `tol`. Zeros are requested in doubling batches.
pub fn ball_center_diag_neumann(d: u32, t: f64, tol: f64) -> Result<CenterValue> {
    check(t, tol)?;
    if d != 2 && d != 3 {
        return Err(Error::domain("ball_center_diag_neumann", format!("only d = 2, 3 are supported, got {d}")));
    }
    let mut count = 64;
    loop {
        let zeros = if d == 2 { bessel_j_prime_zeros(0, count)? } else { spherical_j_prime_zeros(0, count)? };
        match center_sum(d, &zeros, t, tol) {
            Err(Error::Truncation { .. }) if count < MAX_ZEROS => count *= 2,
            other => return other,
        }
    }
}

/// 𝕌_2(0, 0; t) on the unit disk.
pub fn disk_center_diag_neumann(t: f64, tol: f64) -> Result<CenterValue> {
    ball_center_diag_neumann(2, t, tol)
}

/// 𝕌_2(0, 0; t) from a caller-supplied list of positive zeros of J₀'. Fails
/// when the list is too short for `tol`.
pub fn disk_center_diag_neumann_with(zeros: &[f64], t: f64, tol: f64) -> Result<CenterValue> {
    check(t, tol)?;
    center_sum(2, zeros, t, tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn long_time_limit_is_inverse_volume() {
        let v = disk_center_diag_neumann(40.0, 1e-15).unwrap();
        assert!((v.value - 1.0 / PI).abs() < 1e-15);
        let v = ball_center_diag_neumann(3, 40.0, 1e-15).unwrap();
        assert!((v.value - 3.0 / (4.0 * PI)).abs() < 1e-15);
    }

    #[test]
    fn truncation_self_consistency() {
        let z200 = bessel_j_prime_zeros(0, 200).unwrap();
        let z400 = bessel_j_prime_zeros(0, 400).unwrap();
        let a = disk_center_diag_neumann_with(&z200, 0.1, 1e-13).unwrap().value;
        let b = disk_center_diag_neumann_with(&z400, 0.1, 1e-13).unwrap().value;
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn short_list_is_reported() {
        let z = bessel_j_prime_zeros(0, 5).unwrap();
        assert!(matches!(disk_center_diag_neumann_with(&z, 1e-3, 1e-12), Err(Error::Truncation { .. })));
    }

    #[test]
    fn small_time_approaches_free_kernel() {
        // At the centre the boundary is at distance 1.
        for (d, t) in [(2u32, 0.01), (3, 0.01), (2, 0.02)] {
            let v = ball_center_diag_neumann(d, t, 1e-12).unwrap();
            let free = (4.0 * PI * t).powf(-(d as f64) / 2.0);
            assert!(((v.value - free) / free).abs() < 1e-8, "d={d} t={t}: {} vs {free}", v.value);
        }
    }

    #[test]
    fn weight_envelopes_hold() {
        for &k in &bessel_j_prime_zeros(0, 500).unwrap() {
            assert!(mode_weight(2, k) <= k);
        }
        for &k in &spherical_j_prime_zeros(0, 500).unwrap() {
            let w = mode_weight(3, k);
            assert!((w - (1.0 + k * k) / (2.0 * PI)).abs() <= 1e-9 * w);
        }
        for family in [bessel_j_prime_zeros(0, 500).unwrap(), spherical_j_prime_zeros(0, 500).unwrap()] {
            assert!(family.windows(2).all(|w| w[1] - w[0] > MIN_GAP));
        }
    }

    #[test]
    fn scaling_to_other_radii() {
        // K on the ball of radius ρ at its centre is 𝕌(0,0;t/ρ²)/ρ^d; at small
        // t both sides approach the free kernel, which scales the same way.
        let (rho, t) = (2.0, 0.1);
        let scaled = disk_center_diag_neumann(t / (rho * rho), 1e-13).unwrap().value / (rho * rho);
        let free = 1.0 / (4.0 * PI * t);
        assert!(((scaled - free) / free).abs() < 1e-8);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(disk_center_diag_neumann(0.0, 1e-10).is_err());
        assert!(ball_center_diag_neumann(4, 1.0, 1e-10).is_err());
    }
}
