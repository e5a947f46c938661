//! Integer-order Bessel functions J_n, spherical Bessel functions j_n, their
//! derivatives, and the positive zeros of the derivatives.
//!
//! Values come from Miller's backward recurrence normalised by a sum rule
//! (`J_0 + 2ΣJ_{2k} = 1`, resp. an exact low-order value for j_n), which is
//! stable in every regime up to x = 200 and beyond.

use crate::error::{Error, Result};

const RESCALE_AT: f64 = 1e250;

fn miller_start(nmax: usize, x: f64) -> usize {
    let top = (nmax as f64).max(x);
    let n = (top + 30.0 + (50.0 * top).sqrt()) as usize;
    n + (n % 2) + 2
}

/// J_0(x), ..., J_nmax(x) for x >= 0.
fn bessel_j_upto(nmax: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; nmax + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    if x < 1e-6 {
        // Two-term series (x/2)^n/n! (1 - (x/2)²/(n+1)).
        let h = 0.5 * x;
        let mut lead = 1.0;
        for (n, o) in out.iter_mut().enumerate() {
            if n > 0 {
                lead *= h / n as f64;
            }
            *o = lead * (1.0 - h * h / (n as f64 + 1.0));
        }
        return out;
    }
    let start = miller_start(nmax, x);
    let mut next = 0.0; // J_{k+1}
    let mut cur = 1e-300; // J_k
    let mut norm = 0.0;
    for k in (1..=start).rev() {
        if k <= nmax {
            out[k] = cur;
        }
        if k % 2 == 0 {
            norm += 2.0 * cur;
        }
        let prev = 2.0 * k as f64 / x * cur - next;
        next = cur;
        cur = prev;
        if cur.abs() > RESCALE_AT {
            let s = 1.0 / RESCALE_AT;
            cur *= s;
            next *= s;
            norm *= s;
            for o in out.iter_mut().skip(k) {
                *o *= s;
            }
        }
    }
    out[0] = cur;
    norm += cur;
    for o in out.iter_mut() {
        *o /= norm;
    }
    out
}

/// J_n(x) for integer n >= 0 and x >= 0.
pub fn bessel_j(n: u32, x: f64) -> f64 {
    if x < 0.0 || x.is_nan() {
        return f64::NAN;
    }
    bessel_j_upto(n as usize, x)[n as usize]
}

/// J_n'(x).
pub fn bessel_j_prime(n: u32, x: f64) -> f64 {
    if x < 0.0 || x.is_nan() {
        return f64::NAN;
    }
    let v = bessel_j_upto(n as usize + 1, x);
    jn_prime_from(&v, n as usize)
}

fn jn_prime_from(v: &[f64], n: usize) -> f64 {
    if n == 0 {
        -v[1]
    } else {
        0.5 * (v[n - 1] - v[n + 1])
    }
}

/// j_0(x), ..., j_nmax(x) for x >= 0.
fn spherical_j_upto(nmax: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; nmax + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    if x < 1e-6 {
        // x^n/(2n+1)!! (1 - x²/(2(2n+3)))
        let mut lead = 1.0;
        for (n, o) in out.iter_mut().enumerate() {
            if n > 0 {
                lead *= x / (2 * n + 1) as f64;
            }
            *o = lead * (1.0 - x * x / (2.0 * (2 * n + 3) as f64));
        }
        return out;
    }
    let start = miller_start(nmax.max(1), x);
    let mut next = 0.0;
    let mut cur = 1e-300;
    let mut lowest = [0.0; 2];
    for k in (1..=start).rev() {
        if k <= nmax {
            out[k] = cur;
        }
        if k == 1 {
            lowest[1] = cur;
        }
        let prev = (2 * k + 1) as f64 / x * cur - next;
        next = cur;
        cur = prev;
        if cur.abs() > RESCALE_AT {
            let s = 1.0 / RESCALE_AT;
            cur *= s;
            next *= s;
            lowest[1] *= s;
            for o in out.iter_mut().skip(k) {
                *o *= s;
            }
        }
    }
    out[0] = cur;
    lowest[0] = cur;
    let j0 = x.sin() / x;
    let j1 = x.sin() / (x * x) - x.cos() / x;
    let scale = if j0.abs() >= j1.abs() {
        j0 / lowest[0]
    } else {
        j1 / lowest[1]
    };
    for o in out.iter_mut() {
        *o *= scale;
    }
    out
}

/// Spherical Bessel function j_n(x) = sqrt(π/2x) J_{n+1/2}(x).
pub fn spherical_j(n: u32, x: f64) -> f64 {
    if x < 0.0 || x.is_nan() {
        return f64::NAN;
    }
    spherical_j_upto(n as usize, x)[n as usize]
}

/// j_n'(x).
pub fn spherical_j_prime(n: u32, x: f64) -> f64 {
    if x < 0.0 || x.is_nan() {
        return f64::NAN;
    }
    let v = spherical_j_upto(n as usize + 1, x);
    sph_prime_from(&v, n as usize)
}

fn sph_prime_from(v: &[f64], n: usize) -> f64 {
    if n == 0 {
        -v[1]
    } else {
        (n as f64 * v[n - 1] - (n + 1) as f64 * v[n + 1]) / (2 * n + 1) as f64
    }
}

#[derive(Clone, Copy)]
enum Family {
    Cylindrical,
    Spherical,
}

impl Family {
    /// (f, f') where f is the derivative of the Bessel function and f' its
    /// second derivative from the Bessel ODE.
    fn derivative_pair(self, n: u32, x: f64) -> (f64, f64) {
        let nu = n as usize;
        match self {
            Family::Cylindrical => {
                let v = bessel_j_upto(nu + 1, x);
                let d1 = jn_prime_from(&v, nu);
                let nn = (n as f64).powi(2);
                let d2 = -d1 / x - (1.0 - nn / (x * x)) * v[nu];
                (d1, d2)
            }
            Family::Spherical => {
                let v = spherical_j_upto(nu + 1, x);
                let d1 = sph_prime_from(&v, nu);
                let l = n as f64 * (n as f64 + 1.0);
                let d2 = -2.0 * d1 / x - (1.0 - l / (x * x)) * v[nu];
                (d1, d2)
            }
        }
    }

    /// A point strictly below the first positive derivative zero where
    /// the derivative is not small (the zero at x = 0 is excluded).
    fn scan_start(self, n: u32) -> f64 {
        let n = n as f64;
        match self {
            // j'_{n,1} > sqrt(n(n+2)) > n for n >= 1; J_0' = -J_1 vanishes first at 3.83.
            Family::Cylindrical => (0.9 * n).max(0.5),
            Family::Spherical => (0.8 * n).max(0.5),
        }
    }
}

const SCAN_STEP: f64 = 0.05;
const ZERO_TOL: f64 = 1e-13;

fn refine(family: Family, n: u32, mut lo: f64, mut hi: f64) -> Result<f64> {
    let (flo, _) = family.derivative_pair(n, lo);
    let mut sign_lo = flo.signum();
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let (f, df) = family.derivative_pair(n, x);
        if f == 0.0 {
            return Ok(x);
        }
        if f.signum() == sign_lo {
            lo = x;
        } else {
            hi = x;
        }
        if hi - lo < ZERO_TOL * hi.max(1.0) {
            return Ok(0.5 * (lo + hi));
        }
        let newton = x - f / df;
        x = if df != 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        let (fl, _) = family.derivative_pair(n, lo);
        sign_lo = fl.signum();
        if (x - lo).min(hi - x) < ZERO_TOL * hi.max(1.0) * 0.5 {
            return Ok(x);
        }
    }
    Err(Error::NonConvergence {
        routine: "bessel zero refinement",
        detail: format!("order {n}, bracket [{lo}, {hi}]"),
    })
}

fn derivative_zeros(
    family: Family,
    n: u32,
    count: Option<usize>,
    x_max: f64,
) -> Result<Vec<f64>> {
    let mut zeros = Vec::new();
    let mut a = family.scan_start(n);
    let (mut fa, _) = family.derivative_pair(n, a);
    if fa == 0.0 {
        a += 0.5 * SCAN_STEP;
        fa = family.derivative_pair(n, a).0;
    }
    loop {
        if let Some(c) = count {
            if zeros.len() >= c {
                break;
            }
        } else if a > x_max {
            break;
        }
        let b = a + SCAN_STEP;
        let (fb, _) = family.derivative_pair(n, b);
        if fb == 0.0 {
            zeros.push(b);
            a = b + 0.5 * SCAN_STEP;
            fa = family.derivative_pair(n, a).0;
            continue;
        }
        if fa.signum() != fb.signum() {
            zeros.push(refine(family, n, a, b)?);
        }
        a = b;
        fa = fb;
        if a > 1e4 {
            return Err(Error::NonConvergence {
                routine: "bessel zero scan",
                detail: format!("order {n} scanned past x = 1e4"),
            });
        }
    }
    if count.is_none() {
        zeros.retain(|&z| z <= x_max);
    }
    Ok(zeros)
}

/// First `count` positive zeros of J_n' (the zero at 0 is excluded).
pub fn bessel_j_prime_zeros(n: u32, count: usize) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::domain("bessel_j_prime_zeros", "count must be >= 1"));
    }
    derivative_zeros(Family::Cylindrical, n, Some(count), f64::INFINITY)
}

/// All positive zeros of J_n' up to `x_max`.
pub fn bessel_j_prime_zeros_below(n: u32, x_max: f64) -> Result<Vec<f64>> {
    derivative_zeros(Family::Cylindrical, n, None, x_max)
}

/// First `count` positive zeros of j_n'.
pub fn spherical_j_prime_zeros(n: u32, count: usize) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::domain("spherical_j_prime_zeros", "count must be >= 1"));
    }
    derivative_zeros(Family::Spherical, n, Some(count), f64::INFINITY)
}

/// All positive zeros of j_n' up to `x_max`.
pub fn spherical_j_prime_zeros_below(n: u32, x_max: f64) -> Result<Vec<f64>> {
    derivative_zeros(Family::Spherical, n, None, x_max)
}
