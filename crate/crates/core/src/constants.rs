//! Universal constants C_d^(1..6) of the spectral-function and Green-function
//! diagonal bounds.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{OnceLock, RwLock};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::special::{beta, factorial, gamma, unit_ball_volume};

/// Dimension d >= 2 and Green-function order m > d/2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct DimensionParams {
    pub d: u32,
    pub m: u32,
    /// m_d = ⌈(d+1)/2⌉, the smallest admissible m.
    pub m_d: u32,
}

impl DimensionParams {
    pub fn new(d: u32, m: u32) -> Result<Self> {
        if d < 2 {
            return Err(Error::domain("DimensionParams", format!("dimension {d} must be >= 2")));
        }
        if 2 * m <= d {
            return Err(Error::domain(
                "DimensionParams",
                format!("need m > d/2, got m = {m}, d = {d}"),
            ));
        }
        Ok(DimensionParams { d, m, m_d: min_order(d) })
    }

    /// Uses the default order m = m_d.
    pub fn with_default_order(d: u32) -> Result<Self> {
        Self::new(d, min_order(d))
    }
}

/// ⌈(d+1)/2⌉.
pub fn min_order(d: u32) -> u32 {
    (d + 2) / 2
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstantSet {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub c5: f64,
    pub c6: f64,
}

fn cache() -> &'static RwLock<HashMap<DimensionParams, ConstantSet>> {
    static CACHE: OnceLock<RwLock<HashMap<DimensionParams, ConstantSet>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// C_d^(1..6) for the given (d, m). C_d^(3) is set to its published upper
/// value 2 m_d 3^{1/(2 m_d)}.
pub fn compute_constants(p: DimensionParams) -> ConstantSet {
    if let Some(c) = cache().read().ok().and_then(|m| m.get(&p).copied()) {
        return c;
    }
    let c = derive_constants(p);
    if let Ok(mut m) = cache().write() {
        m.insert(p, c);
    }
    c
}

fn derive_constants(p: DimensionParams) -> ConstantSet {
    let d = p.d as f64;
    let md = p.m_d as f64;
    let omega = unit_ball_volume(p.d).expect("d >= 2");
    let c1 = omega * (2.0 * PI).powi(-(p.d as i32));
    let c3 = 2.0 * md * 3f64.powf(1.0 / (2.0 * md));
    let c2 = d * c1 * (2.0 / PI * c3 * c3 + c3);
    let pow2 = 2f64.powi(p.d as i32 - 2);
    let c4 = c1 + (d - 1.0) / d * pow2 * c2;
    let c5 = pow2 * c2 * (c3.powi(p.d as i32 - 1) + 1.0 / d);
    let c6 = p.m as f64 * c4 * green_beta(p) + free_green_diag(p);
    ConstantSet { c1, c2, c3, c4, c5, c6 }
}

/// B(1 + d/2, m - d/2).
fn green_beta(p: DimensionParams) -> f64 {
    let half = p.d as f64 / 2.0;
    beta(1.0 + half, p.m as f64 - half).expect("m > d/2")
}

/// Spectral-function diagonal bounds at distance ρ from the boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralBound {
    /// C1 λ^{d/2} + (C2/ρ)(λ^{1/2} + C3/ρ)^{d-1}
    pub sharp: f64,
    /// C4 λ^{d/2} + C5 ρ^{-d}
    pub simplified: f64,
}

pub fn spectral_diag_bound(p: DimensionParams, rho: f64, lambda: f64) -> Result<SpectralBound> {
    if !(rho > 0.0 && rho.is_finite()) || !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::domain(
            "spectral_diag_bound",
            format!("need rho > 0 and lambda > 0, got ({rho}, {lambda})"),
        ));
    }
    let c = compute_constants(p);
    let half_d = p.d as f64 / 2.0;
    let sharp = c.c1 * lambda.powf(half_d)
        + c.c2 / rho * (lambda.sqrt() + c.c3 / rho).powi(p.d as i32 - 1);
    let simplified = c.c4 * lambda.powf(half_d) + c.c5 * rho.powi(-(p.d as i32));
    Ok(SpectralBound { sharp, simplified })
}

/// Upper bound m C4 B(1+d/2, m-d/2) + C5 ρ^{-d} on the diagonal of the
/// kernel of (1 + Δ_U)^{-m}.
pub fn green_diag_bound(p: DimensionParams, rho: f64) -> Result<f64> {
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::domain("green_diag_bound", format!("need rho > 0, got {rho}")));
    }
    let c = compute_constants(p);
    Ok(p.m as f64 * c.c4 * green_beta(p) + c.c5 * rho.powi(-(p.d as i32)))
}

/// Diagonal of the free kernel of (1 + Δ_0)^{-m}: Γ(m-d/2)/((4π)^{d/2}(m-1)!).
pub fn free_green_diag(p: DimensionParams) -> f64 {
    let half = p.d as f64 / 2.0;
    gamma(p.m as f64 - half).expect("m > d/2") / ((4.0 * PI).powf(half) * factorial(p.m - 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn validation() {
        assert!(DimensionParams::new(1, 3).is_err());
        assert!(DimensionParams::new(2, 1).is_err());
        assert!(DimensionParams::new(4, 2).is_err());
        assert_eq!(DimensionParams::with_default_order(5).unwrap().m, 3);
        assert_eq!(min_order(2), 2);
        assert_eq!(min_order(3), 2);
        assert_eq!(min_order(4), 3);
    }

    #[test]
    fn two_dimensional_values() {
        let p = DimensionParams::new(2, 2).unwrap();
        let c = compute_constants(p);
        assert!(rel(c.c1, 1.0 / (4.0 * PI)) < 1e-15);
        assert!(rel(c.c3, 4.0 * 3f64.powf(0.25)) < 1e-15);
        assert!((c.c3 - 5.264_296_051_809_97).abs() < 1e-12);
        let second = 1.0 / (4.0 * PI);
        assert!(rel(c.c6, 2.0 * c.c4 * 0.5 + second) < 1e-14);
        assert!(rel(free_green_diag(p), second) < 1e-15);
        assert!(rel(green_diag_bound(p, 1.0).unwrap(), c.c4 + c.c5) < 1e-14);
    }

    #[test]
    fn free_green_three_dimensional() {
        let p = DimensionParams::new(3, 2).unwrap();
        assert!(rel(free_green_diag(p), PI.sqrt() / (4.0 * PI).powf(1.5)) < 1e-14);
    }

    #[test]
    fn cross_identity_with_free_spectral_function() {
        for d in 2..=6u32 {
            for m in min_order(d)..=min_order(d) + 3 {
                let p = DimensionParams::new(d, m).unwrap();
                let c = compute_constants(p);
                let lhs = m as f64 * c.c1 * green_beta(p);
                assert!(rel(lhs, free_green_diag(p)) < 1e-12, "d={d} m={m}");
            }
        }
    }

    /// Γ at integers and half-integers in closed form.
    fn gamma_half_integer(twice: u32) -> f64 {
        if twice.is_multiple_of(2) {
            factorial(twice / 2 - 1)
        } else {
            let n = (twice - 1) / 2; // Γ(n + 1/2) = (2n)!/(4^n n!) √π
            factorial(2 * n) / (4f64.powi(n as i32) * factorial(n)) * PI.sqrt()
        }
    }

    #[test]
    fn constants_match_independent_derivation() {
        for d in 2..=8u32 {
            let m = min_order(d);
            let p = DimensionParams::new(d, m).unwrap();
            let c = compute_constants(p);
            let df = d as f64;
            let omega = PI.powf(df / 2.0) / gamma_half_integer(d + 2);
            let c1 = omega / (2.0 * PI).powf(df);
            let md = ((d + 1) as f64 / 2.0).ceil();
            let c3 = 2.0 * md * 3f64.powf(0.5 / md);
            let c2 = df * c1 * (2.0 * c3 * c3 / PI + c3);
            let c4 = c1 + (df - 1.0) / df * 2f64.powf(df - 2.0) * c2;
            let c5 = 2f64.powf(df - 2.0) * c2 * (c3.powf(df - 1.0) + 1.0 / df);
            // B(1+d/2, m-d/2) = Γ(1+d/2)Γ(m-d/2)/Γ(m+1)
            let b = gamma_half_integer(d + 2) * gamma_half_integer(2 * m - d) / factorial(m);
            let g0 = gamma_half_integer(2 * m - d) / ((4.0 * PI).powf(df / 2.0) * factorial(m - 1));
            let c6 = m as f64 * c4 * b + g0;
            for (got, want) in [(c.c1, c1), (c.c2, c2), (c.c3, c3), (c.c4, c4), (c.c5, c5), (c.c6, c6)] {
                assert!(rel(got, want) < 1e-12, "d={d}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn simplified_dominates_sharp() {
        for d in 2..=6 {
            let p = DimensionParams::with_default_order(d).unwrap();
            for i in 0..12 {
                let rho = 0.01 * 2f64.powi(i);
                for j in 0..15 {
                    let lambda = 1e-3 * 4f64.powi(j);
                    let b = spectral_diag_bound(p, rho, lambda).unwrap();
                    assert!(b.simplified >= b.sharp * (1.0 - 1e-14), "d={d} rho={rho} lambda={lambda}");
                }
            }
        }
    }

    #[test]
    fn sharp_bound_limits_and_scaling() {
        let p = DimensionParams::with_default_order(3).unwrap();
        let c = compute_constants(p);
        let lambda = 7.0;
        let far = spectral_diag_bound(p, 1e9, lambda).unwrap().sharp;
        assert!(rel(far, c.c1 * lambda.powf(1.5)) < 1e-6);
        let (rho, s) = (0.7, 2.0);
        let a = spectral_diag_bound(p, rho, lambda).unwrap().sharp;
        let b = spectral_diag_bound(p, s * rho, lambda / (s * s)).unwrap().sharp;
        assert!(rel(a, s.powi(3) * b) < 1e-13);
    }

    #[test]
    fn sharp_bound_monotonicity() {
        let p = DimensionParams::with_default_order(4).unwrap();
        let v = |rho, lambda| spectral_diag_bound(p, rho, lambda).unwrap().sharp;
        assert!(v(1.0, 2.0) < v(1.0, 3.0));
        assert!(v(1.0, 2.0) > v(1.5, 2.0));
        assert!(spectral_diag_bound(p, 0.0, 1.0).is_err());
        assert!(spectral_diag_bound(p, 1.0, -1.0).is_err());
    }

    #[test]
    fn green_bound_limits() {
        let p = DimensionParams::with_default_order(3).unwrap();
        let c = compute_constants(p);
        let limit = p.m as f64 * c.c4 * green_beta(p);
        assert!(rel(green_diag_bound(p, 1e8).unwrap(), limit) < 1e-12);
        for i in 0..10 {
            let rho = 0.05 * 1.7f64.powi(i);
            assert!(green_diag_bound(p, 2.0 * rho).unwrap() < green_diag_bound(p, rho).unwrap());
        }
    }
}
