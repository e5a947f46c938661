//! Bounds on the cutoff cost J_m(R; t) = inf_ψ ∫ |(1 - d²/ds²)^m (ψ(s) e^{-s²/4t})| ds.
//!
//! [`jm_closed_form_bound`] evaluates the explicit Laurent-polynomial bound
//! built from the cutoff sup-norms; [`jm_numeric_oracle`] integrates the
//! same quantity for a concrete cutoff ψ_{ε1,ε2} and serves as its check.

use std::collections::BTreeMap;
use std::f64::consts::E;

use num_traits::ToPrimitive;

use crate::cutoff::CutoffSpec;
use crate::error::{Error, Result};
use crate::poly::gaussian_derivative_coeffs;
use crate::quadrature::integrate;
use crate::special::{factorial, upper_incomplete_gamma};

#[derive(Debug, Clone, Copy)]
pub struct JmQuery<'a> {
    pub m: usize,
    /// R = ρ(x) + ρ(y).
    pub r: f64,
    pub t: f64,
    pub cutoff: &'a CutoffSpec,
}

impl<'a> JmQuery<'a> {
    pub fn new(m: usize, r: f64, t: f64, cutoff: &'a CutoffSpec) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) || !(t > 0.0 && t.is_finite()) {
            return Err(Error::domain("JmQuery", format!("need R > 0 and t > 0, got R = {r}, t = {t}")));
        }
        Ok(JmQuery { m, r, t, cutoff })
    }

    /// Whether 0 < t <= R²/8.
    pub fn in_closed_form_range(&self) -> bool {
        self.t <= self.r * self.r / 8.0
    }
}

/// ε₂ ∈ (0, R) and ε₁ = ε₂ - 2t/R > 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsilonSchedule {
    pub eps1: f64,
    pub eps2: f64,
}

impl EpsilonSchedule {
    pub fn new(eps2: f64, q: &JmQuery<'_>) -> Result<Self> {
        let eps1 = eps2 - 2.0 * q.t / q.r;
        if !(eps1 > 0.0 && eps2 < q.r) {
            return Err(Error::domain(
                "EpsilonSchedule",
                format!("need 0 < eps1 < eps2 < R; got eps1 = {eps1}, eps2 = {eps2}, R = {}", q.r),
            ));
        }
        Ok(EpsilonSchedule { eps1, eps2 })
    }
}

fn ceil_half_factorial(num: i64) -> f64 {
    // ⌈num/2⌉! with ⌈-1/2⌉ = 0
    let c = num.div_euclid(2) + num.rem_euclid(2);
    factorial(c.max(0) as u32)
}

/// Laurent terms (power of t, coefficient) of Z(n, ψ₀, R; t); powers are
/// 1 + k - n for k = 0..=n/2.
pub fn z_laurent_terms(n: usize, cutoff: &CutoffSpec, r: f64) -> Result<Vec<(i32, f64)>> {
    let nf = factorial(n as u32);
    let m0 = cutoff.sup_norm(0)?;
    let mut terms: BTreeMap<i32, f64> = BTreeMap::new();
    for k in 0..=n / 2 {
        let p = n - 2 * k;
        let c = nf * ceil_half_factorial(p as i64 - 1) * m0 * E * E * r.powi(p as i32 - 1)
            / (2f64.powi((2 * n - 2 * k) as i32 - 1) * factorial(k as u32) * factorial(p as u32));
        *terms.entry(1 + k as i32 - n as i32).or_default() += c;
    }
    for j in 0..n {
        let mj = cutoff.sup_norm(n - j)?;
        for k in 0..=j / 2 {
            let c = nf * mj * E * r.powi(n as i32 - 2 * k as i32 - 1)
                / (2f64.powi(n as i32 - 2)
                    * factorial(k as u32)
                    * factorial((j - 2 * k) as u32)
                    * factorial((n - j) as u32));
            *terms.entry(1 + k as i32 - n as i32).or_default() += c;
        }
    }
    Ok(terms.into_iter().collect())
}

fn eval_laurent(terms: &[(i32, f64)], t: f64) -> f64 {
    terms.iter().map(|&(p, c)| c * t.powi(p)).sum()
}

/// Z(n, ψ₀, R; t).
pub fn z_function(n: usize, cutoff: &CutoffSpec, r: f64, t: f64) -> Result<f64> {
    Ok(eval_laurent(&z_laurent_terms(n, cutoff, r)?, t))
}

/// Closed-form bound with its factor breakdown:
/// `value = laurent(t) · exp(exponent)` where `exponent = -R²/4t`.
#[derive(Debug, Clone, PartialEq)]
pub struct JmClosedForm {
    /// Σ_n C(m,n) Z(2n) as (power of t, coefficient), ascending powers.
    pub laurent_terms: Vec<(i32, f64)>,
    pub laurent_value: f64,
    pub exponent: f64,
    pub value: f64,
}

impl JmClosedForm {
    pub fn ln_value(&self) -> f64 {
        self.laurent_value.ln() + self.exponent
    }
}

pub fn jm_closed_form(q: &JmQuery<'_>) -> Result<JmClosedForm> {
    if !q.in_closed_form_range() {
        return Err(Error::Hypothesis(format!(
            "t > R^2/8 (t = {}, R = {}, R^2/8 = {})",
            q.t,
            q.r,
            q.r * q.r / 8.0
        )));
    }
    let mut acc: BTreeMap<i32, f64> = BTreeMap::new();
    for n in 0..=q.m {
        let binom = binomial(q.m, n);
        for (p, c) in z_laurent_terms(2 * n, q.cutoff, q.r)? {
            *acc.entry(p).or_default() += binom * c;
        }
    }
    let laurent_terms: Vec<(i32, f64)> = acc.into_iter().collect();
    let laurent_value = eval_laurent(&laurent_terms, q.t);
    let exponent = -q.r * q.r / (4.0 * q.t);
    Ok(JmClosedForm {
        laurent_terms,
        laurent_value,
        exponent,
        value: laurent_value * exponent.exp(),
    })
}

/// Σ_{n=0}^m C(m,n) Z(2n, ψ₀, R; t) e^{-R²/4t}, valid for 0 < t <= R²/8.
pub fn jm_closed_form_bound(q: &JmQuery<'_>) -> Result<f64> {
    jm_closed_form(q).map(|c| c.value)
}

pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Gaussian tail comparison. Returns (lhs, rhs) with
/// lhs = ∫_ρ^∞ s^β e^{-s²/4t} ds and rhs = 2e ⌈(β-1)/2⌉! ρ^{β-1} t e^{-ρ²/4t}.
pub fn gaussian_tail_bound(beta: u32, rho: f64, t: f64) -> Result<(f64, f64)> {
    if !(t > 0.0) || !(rho >= 2.0 * t.sqrt()) {
        return Err(Error::domain(
            "gaussian_tail_bound",
            format!("need t > 0 and rho >= 2 sqrt(t); got rho = {rho}, t = {t}"),
        ));
    }
    let b = beta as f64;
    let r = rho * rho / (4.0 * t);
    let lhs = 2f64.powi(beta as i32) * t.powf(0.5 * (b + 1.0)) * upper_incomplete_gamma(0.5 * (b + 1.0), r)?;
    let rhs = 2.0 * E * ceil_half_factorial(beta as i64 - 1) * rho.powi(beta as i32 - 1) * t * (-r).exp();
    Ok((lhs, rhs))
}

/// The integrand (1 - d²/ds²)^m (ψ_{ε1,ε2}(s) e^{-s²/4t}) on the whole line,
/// represented as poly(s) · e^{-s²/4t}.
pub struct JmIntegrand<'a> {
    q: JmQuery<'a>,
    sched: EpsilonSchedule,
    /// Σ_n C(m,n)(-1)^n as f64, indexed by n.
    outer: Vec<f64>,
    /// Gaussian derivative coefficients c_{j,k} as f64, indexed [j][k].
    gauss: Vec<Vec<f64>>,
    /// Coefficients of the pure-Gaussian polynomial factor (ψ = 1 region).
    tail_poly: Vec<f64>,
}

impl<'a> JmIntegrand<'a> {
    pub fn new(q: JmQuery<'a>, sched: EpsilonSchedule) -> Result<Self> {
        if q.cutoff.smoothness_order() < 2 * q.m {
            return Err(Error::MissingSupNorm {
                index: 2 * q.m,
                available: q.cutoff.smoothness_order(),
            });
        }
        let gauss: Vec<Vec<f64>> = (0..=2 * q.m)
            .map(|j| {
                gaussian_derivative_coeffs(j)
                    .into_iter()
                    .map(|(_, c)| c.to_f64().unwrap_or(f64::NAN))
                    .collect()
            })
            .collect();
        let outer: Vec<f64> = (0..=q.m)
            .map(|n| binomial(q.m, n) * if n % 2 == 0 { 1.0 } else { -1.0 })
            .collect();
        let mut tail_poly = vec![0.0; 2 * q.m + 1];
        for (n, &o) in outer.iter().enumerate() {
            for (k, &c) in gauss[2 * n].iter().enumerate() {
                tail_poly[2 * n - 2 * k] += o * c * q.t.powi(k as i32 - 2 * n as i32);
            }
        }
        Ok(JmIntegrand {
            q,
            sched,
            outer,
            gauss,
            tail_poly,
        })
    }

    fn gauss_poly(&self, j: usize, s: f64) -> f64 {
        let t = self.q.t;
        self.gauss[j]
            .iter()
            .enumerate()
            .map(|(k, c)| c * t.powi(k as i32 - j as i32) * s.powi((j - 2 * k) as i32))
            .sum()
    }

    /// Polynomial factor for s >= 0 (the integrand divided by e^{-s²/4t}).
    pub fn poly_factor(&self, s: f64) -> f64 {
        let s = s.abs();
        let EpsilonSchedule { eps1, eps2 } = self.sched;
        if s <= eps1 {
            return 0.0;
        }
        if s >= eps2 {
            return crate::poly::horner(&self.tail_poly, s);
        }
        let w = eps2 - eps1;
        let u = (s - eps1) / w;
        let mut total = 0.0;
        for (n, &o) in self.outer.iter().enumerate() {
            let order = 2 * n;
            let mut inner = 0.0;
            for j in 0..=order {
                let i = order - j;
                let psi = self.q.cutoff.eval_derivative(i, u) / w.powi(i as i32);
                if psi != 0.0 {
                    inner += binomial(order, j) * psi * self.gauss_poly(j, s);
                }
            }
            total += o * inner;
        }
        total
    }

    pub fn eval(&self, s: f64) -> f64 {
        self.poly_factor(s) * (-s * s / (4.0 * self.q.t)).exp()
    }
}

const SIGN_GRID: usize = 2048;

fn bisect_root<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64) -> f64 {
    let slo = f(lo).signum();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid).signum() == slo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Breakpoints where `f` changes sign in [a, b], found on a uniform grid.
fn sign_breaks<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Vec<f64> {
    let mut out = vec![a];
    let h = (b - a) / SIGN_GRID as f64;
    let mut prev = f(a);
    for i in 1..=SIGN_GRID {
        let x = a + h * i as f64;
        let v = f(x);
        if prev != 0.0 && v != 0.0 && v.signum() != prev.signum() {
            out.push(bisect_root(f, x - h, x));
        }
        if v != 0.0 {
            prev = v;
        }
    }
    out.push(b);
    out
}

/// ∫_a^∞ s^β e^{-s²/4t} ds.
fn gaussian_moment_tail(beta: usize, a: f64, t: f64) -> Result<f64> {
    let b = beta as f64;
    Ok(2f64.powi(beta as i32) * t.powf(0.5 * (b + 1.0)) * upper_incomplete_gamma(0.5 * (b + 1.0), a * a / (4.0 * t))?)
}

/// Numerically evaluates ∫_R |(1 - d²/ds²)^m (ψ_{ε1,ε2}(s) e^{-s²/4t})| ds for
/// the concrete cutoff ψ_{ε1,ε2}(s) = ψ₀((|s| - ε1)/(ε2 - ε1)).
///
/// The integrand vanishes on |s| < ε1. On [ε1, ε2] it is integrated by
/// adaptive quadrature between the sign changes of its polynomial factor; on
/// [ε2, ∞) it is a polynomial times a Gaussian and is integrated in closed
/// form through incomplete Gamma functions. The result is doubled by evenness.
pub fn jm_numeric_oracle(q: &JmQuery<'_>, sched: EpsilonSchedule) -> Result<f64> {
    let integrand = JmIntegrand::new(*q, sched)?;
    let poly = |s: f64| integrand.poly_factor(s);

    // [ε1, ε2]
    let breaks = sign_breaks(&poly, sched.eps1, sched.eps2);
    let h = (sched.eps2 - sched.eps1) / 256.0;
    let peak = (0..=256)
        .map(|i| integrand.eval(sched.eps1 + h * i as f64).abs())
        .fold(0.0, f64::max);
    let scale = peak * (sched.eps2 - sched.eps1);
    let mut middle = 0.0;
    for w in breaks.windows(2) {
        let r = integrate(|s| integrand.eval(s).abs(), w[0], w[1], 1e-13 * scale, 1e-12)?;
        middle += r.value;
    }

    // [ε2, ∞): roots of the tail polynomial lie below the Cauchy bound.
    let tp = &integrand.tail_poly;
    let lead = *tp.last().expect("non-empty tail polynomial");
    let cauchy = 1.0 + tp.iter().rev().skip(1).map(|c| (c / lead).abs()).fold(0.0, f64::max);
    let mut pieces = vec![sched.eps2];
    if cauchy > sched.eps2 {
        let tail = |s: f64| crate::poly::horner(tp, s);
        let b = sign_breaks(&tail, sched.eps2, cauchy);
        pieces.extend(b[1..b.len() - 1].iter().copied());
    }
    let moments = |a: f64| -> Result<Vec<f64>> {
        (0..tp.len()).map(|beta| gaussian_moment_tail(beta, a, q.t)).collect()
    };
    let mut tail_total = 0.0;
    let mut upper = vec![0.0; tp.len()];
    for &a in pieces.iter().rev() {
        let at_a = moments(a)?;
        let piece: f64 = tp
            .iter()
            .zip(at_a.iter().zip(&upper))
            .map(|(c, (ma, mb))| c * (ma - mb))
            .sum();
        tail_total += piece.abs();
        upper = at_a;
    }
    Ok(2.0 * (middle + tail_total))
}
