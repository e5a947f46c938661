use std::f64::consts::PI;

use super::{free_1d, Bc, FactorValue};
use crate::error::{Error, Result};
use crate::special::erfcx;

/// Heat kernel of the half-line (0, ∞) with condition `bc` at 0.
///
/// The Robin kernel is k₀(x-y) + k₀(x+y) - σ e^{σ(x+y)+σ²t} erfc(z) with
/// z = (x+y)/(2√t) + σ√t. Since z² = (x+y)²/4t + σ(x+y) + σ²t, the last
/// term equals σ e^{-(x+y)²/4t} erfcx(z), which is how it is evaluated.
/// As σ → ∞ the last term tends to 2k₀(x+y), recovering Dirichlet.
pub fn halfline_kernel(bc: Bc, x: f64, y: f64, t: f64) -> Result<f64> {
    halfline_factor(bc, x, y, t).map(|v| v.value())
}

pub(crate) fn halfline_factor(bc: Bc, x: f64, y: f64, t: f64) -> Result<FactorValue> {
    if !(x > 0.0 && y > 0.0 && t > 0.0) || !(x.is_finite() && y.is_finite() && t.is_finite()) {
        return Err(Error::domain(
            "halfline_kernel",
            format!("need x, y, t > 0, got ({x}, {y}, {t})"),
        ));
    }
    let free = free_1d(x - y, t);
    let image = free_1d(x + y, t);
    let correction = match bc.validate()? {
        Bc::Dirichlet => -image,
        Bc::Neumann => image,
        Bc::Robin(sigma) => {
            let s = x + y;
            let z = s / (2.0 * t.sqrt()) + sigma * t.sqrt();
            (-s * s / (4.0 * t)).exp() * (1.0 / (4.0 * PI * t).sqrt() - sigma * erfcx(z))
        }
    };
    Ok(FactorValue { free, correction, error: 0.0 })
}
