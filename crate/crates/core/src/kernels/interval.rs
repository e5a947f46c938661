//! Interval (0, L) kernels in two independent representations: the image
//! series (Dirichlet/Neumann ends only) and the eigenfunction series (any
//! non-negative Robin coefficients, with D and N as the limiting cases).

use std::f64::consts::PI;

use super::{free_1d, Bc, FactorValue};
use crate::error::{Error, Result};

/// Maximum allowed disagreement between the two representations, relative
/// to max(|K|, (4πt)^{-1/2}).
pub const REPRESENTATION_TOL: f64 = 1e-10;

/// Relative size of the dropped image or eigenmode tail.
const SERIES_TOL: f64 = 1e-16;
/// Above this t/L² the image series is not used.
const IMAGES_MAX_T: f64 = 1e4;
/// Above this t/L² the factor kernel switches to the eigen-series.
const IMAGES_PREFERRED_T: f64 = 4.0;

fn check_args(l: f64, x: f64, y: f64, t: f64) -> Result<()> {
    if !(l > 0.0 && l.is_finite()) {
        return Err(Error::domain("interval_kernel", format!("length must be positive, got {l}")));
    }
    if !(x > 0.0 && x < l && y > 0.0 && y < l) {
        return Err(Error::domain(
            "interval_kernel",
            format!("points must lie in (0, {l}), got ({x}, {y})"),
        ));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::domain("interval_kernel", format!("t must be positive, got {t}")));
    }
    Ok(())
}

/// Reflection sign of an end: -1 for Dirichlet, +1 for Neumann.
fn reflection_sign(bc: Bc) -> Option<f64> {
    match bc {
        Bc::Dirichlet => Some(-1.0),
        Bc::Neumann => Some(1.0),
        Bc::Robin(_) => None,
    }
}

/// Image series. The image of y at y + 2nL carries (s₀s_L)^n and the one at
/// -y + 2nL carries s₀(s₀s_L)^n, where s₀, s_L are the end signs.
pub(crate) fn images_factor(l: f64, left: Bc, right: Bc, x: f64, y: f64, t: f64) -> Result<FactorValue> {
    let (Some(s0), Some(sl)) = (reflection_sign(left), reflection_sign(right)) else {
        return Err(Error::domain("interval_images", "image series needs Dirichlet or Neumann ends"));
    };
    if t > IMAGES_MAX_T * l * l {
        return Err(Error::domain("interval_images", format!("t = {t} is too large for the image series")));
    }
    let p = s0 * sl;
    let free = free_1d(x - y, t);
    let scale = 1.0 / (4.0 * PI * t).sqrt();
    let mut correction = s0 * free_1d(x + y, t);
    let mut sign = 1.0;
    let mut n = 1u32;
    loop {
        sign *= p;
        let shift = 2.0 * n as f64 * l;
        correction += sign * (free_1d(x - y - shift, t) + free_1d(x - y + shift, t));
        correction += s0 * sign * (free_1d(x + y - shift, t) + free_1d(x + y + shift, t));
        // every image of index > n is at least a = 2nL away
        let a = shift;
        let tail = 4.0 * scale * (-a * a / (4.0 * t)).exp() / (1.0 - (-a * l / t).exp());
        if tail <= SERIES_TOL * scale {
            return Ok(FactorValue { free, correction, error: tail });
        }
        n += 1;
    }
}

/// Image-series value of the interval kernel (Dirichlet/Neumann ends only).
pub fn interval_images(l: f64, left: Bc, right: Bc, x: f64, y: f64, t: f64) -> Result<f64> {
    check_args(l, x, y, t)?;
    images_factor(l, left.validate()?, right.validate()?, x, y, t).map(|v| v.value())
}

/// Left-end shape φ(x) = a cos μx + b sin μx of an eigenfunction.
fn left_coeffs(left: Bc, mu: f64) -> (f64, f64) {
    match left {
        Bc::Dirichlet => (0.0, 1.0),
        Bc::Neumann => (1.0, 0.0),
        Bc::Robin(s) => (mu, s),
    }
}

/// Right-end condition evaluated on the left-end shape; its positive zeros
/// are the square roots of the eigenvalues.
fn secular(left: Bc, right: Bc, l: f64, mu: f64) -> f64 {
    let (a, b) = left_coeffs(left, mu);
    let (c, s) = ((mu * l).cos(), (mu * l).sin());
    let phi = a * c + b * s;
    let dphi = mu * (-a * s + b * c);
    match right {
        Bc::Dirichlet => phi,
        Bc::Neumann => dphi,
        Bc::Robin(sig) => dphi + sig * phi,
    }
}

/// ∫_0^L (a cos μx + b sin μx)² dx.
fn mode_norm(a: f64, b: f64, mu: f64, l: f64) -> f64 {
    let u = 2.0 * mu * l;
    // (u - sin u)/(4μ), with a series where it cancels
    let minus = if u < 0.1 {
        let u2 = u * u;
        u * u2 / 6.0 * (1.0 - u2 / 20.0 * (1.0 - u2 / 42.0 * (1.0 - u2 / 72.0))) / (4.0 * mu)
    } else {
        (u - u.sin()) / (4.0 * mu)
    };
    let plus = l - minus;
    let cross = (u / 2.0).sin().powi(2) / mu;
    a * a * plus + b * b * minus + a * b * cross
}

/// Positive square roots of the eigenvalues up to `mu_max`, ascending.
fn eigen_roots(l: f64, left: Bc, right: Bc, mu_max: f64) -> Result<Vec<f64>> {
    let unit = PI / l;
    let closed = |offset: f64, first: u64| -> Vec<f64> {
        (first..)
            .map(|k| (k as f64 + offset) * unit)
            .take_while(|&mu| mu <= mu_max)
            .collect()
    };
    match (left, right) {
        (Bc::Dirichlet, Bc::Dirichlet) | (Bc::Neumann, Bc::Neumann) => return Ok(closed(0.0, 1)),
        (Bc::Dirichlet, Bc::Neumann) | (Bc::Neumann, Bc::Dirichlet) => return Ok(closed(0.5, 0)),
        _ => {}
    }
    let f = |mu: f64| secular(left, right, l, mu);
    let step = unit / 16.0;
    let mut roots = Vec::new();
    let mut lo = 1e-9 * unit;
    let mut f_lo = f(lo);
    while lo < mu_max {
        let hi = lo + step;
        let f_hi = f(hi);
        if f_hi == 0.0 {
            roots.push(hi);
        } else if f_lo != 0.0 && f_lo.signum() != f_hi.signum() {
            roots.push(bisect(&f, lo, hi, f_lo)?);
        }
        lo = hi;
        f_lo = f_hi;
    }
    roots.retain(|&mu| mu <= mu_max);
    Ok(roots)
}

fn bisect(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, mut f_lo: f64) -> Result<f64> {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == f_lo.signum() {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
        }
    }
    Err(Error::NonConvergence { routine: "interval eigenvalue bisection", detail: format!("[{lo}, {hi}]") })
}

/// Eigenfunction series Σ e^{-μ_k²t} φ_k(x)φ_k(y). Returns the value and a
/// bound on the dropped tail plus accumulated rounding.
pub fn interval_eigen_series(l: f64, left: Bc, right: Bc, x: f64, y: f64, t: f64) -> Result<(f64, f64)> {
    check_args(l, x, y, t)?;
    let (left, right) = (left.validate()?, right.validate()?);
    let scale = (1.0 / (4.0 * PI * t).sqrt()).max(1.0 / l);
    // Normalised modes with μ >= 1/L satisfy |φ|² <= 4/L, and at most two
    // roots fall in any window of width π/L.
    let tail = |mu: f64| 8.0 / l * (-mu * mu * t).exp() / (1.0 - (-2.0 * mu * PI * t / l).exp());
    let mut mu_cut = 1.0 / l;
    while tail(mu_cut) > SERIES_TOL * scale {
        mu_cut *= 1.1;
    }
    let roots = eigen_roots(l, left, right, mu_cut)?;
    let mut sum = if matches!((left, right), (Bc::Neumann, Bc::Neumann)) { 1.0 / l } else { 0.0 };
    for &mu in &roots {
        let (a, b) = left_coeffs(left, mu);
        let norm = mode_norm(a, b, mu, l);
        let phi = |z: f64| a * (mu * z).cos() + b * (mu * z).sin();
        sum += (-mu * mu * t).exp() * phi(x) * phi(y) / norm;
    }
    let rounding = 4.0 * f64::EPSILON * (roots.len() as f64 + 1.0) * 4.0 / l;
    Ok((sum, tail(mu_cut) + rounding))
}

/// Interval kernel. With Dirichlet/Neumann ends both representations are
/// evaluated and must agree; with a Robin end only the eigen-series exists.
pub fn interval_kernel(l: f64, left: Bc, right: Bc, x: f64, y: f64, t: f64) -> Result<f64> {
    check_args(l, x, y, t)?;
    let (left, right) = (left.validate()?, right.validate()?);
    let (eigen, _) = interval_eigen_series(l, left, right, x, y, t)?;
    if reflection_sign(left).is_none() || reflection_sign(right).is_none() || t > IMAGES_MAX_T * l * l {
        return Ok(eigen);
    }
    let images = images_factor(l, left, right, x, y, t)?.value();
    let scale = images.abs().max(1.0 / (4.0 * PI * t).sqrt());
    if (images - eigen).abs() > REPRESENTATION_TOL * scale {
        return Err(Error::RepresentationMismatch { images, eigen });
    }
    Ok(images)
}

/// Factor kernel used inside product domains: images where they converge
/// quickly, otherwise the eigen-series.
pub(crate) fn interval_factor(l: f64, left: Bc, right: Bc, x: f64, y: f64, t: f64) -> Result<FactorValue> {
    check_args(l, x, y, t)?;
    let images_ok = reflection_sign(left).is_some() && reflection_sign(right).is_some();
    if images_ok && t <= IMAGES_PREFERRED_T * l * l {
        return images_factor(l, left, right, x, y, t);
    }
    let (value, error) = interval_eigen_series(l, left, right, x, y, t)?;
    let free = free_1d(x - y, t);
    Ok(FactorValue { free, correction: value - free, error: error + f64::EPSILON * free })
}
