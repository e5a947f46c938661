//! Interpolating cutoff polynomials and their derivative sup-norms.
//!
//! The base cutoff ψ₀ is a polynomial P on [0, 1] with P(0) = 0, P(1) = 1
//! and vanishing derivatives of orders 1..=n at both endpoints. Extended by
//! 0 on (-∞, 0) and 1 on (1, ∞) it is a C^n function on the line.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::poly::{horner, int, Polynomial, Rational};

/// Grid for the rounded-up sup-norms.
const SUP_GRANULARITY: f64 = 1e-12;
/// Dyadic subdivision depth used to isolate critical points.
const ISOLATION_DEPTH: u32 = 10;
/// Bisection width for refining isolated critical points.
const ROOT_WIDTH: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct CutoffSpec {
    base: Polynomial,
    smoothness: usize,
    sup_norms: Vec<f64>,
    /// f64 coefficients of the derivatives 0..=smoothness of `base`.
    derivs: Vec<Vec<f64>>,
}

impl CutoffSpec {
    /// Builds a cutoff from a polynomial, checking the endpoint conditions
    /// exactly and computing M_0..M_n.
    pub fn from_polynomial(base: Polynomial, smoothness: usize) -> Result<Self> {
        let zero = Rational::zero();
        let one = Rational::one();
        if base.eval(&zero) != zero || base.eval(&one) != one {
            return Err(Error::domain("CutoffSpec", "need P(0) = 0 and P(1) = 1"));
        }
        for i in 1..=smoothness {
            let d = base.nth_derivative(i);
            if !d.eval(&zero).is_zero() || !d.eval(&one).is_zero() {
                return Err(Error::domain(
                    "CutoffSpec",
                    format!("derivative of order {i} does not vanish at both endpoints"),
                ));
            }
        }
        let sup_norms = (0..=smoothness)
            .map(|j| sup_derivative_norm(&base, j))
            .collect();
        let derivs = (0..=smoothness)
            .map(|j| base.nth_derivative(j).to_f64_coeffs())
            .collect();
        Ok(CutoffSpec {
            base,
            smoothness,
            sup_norms,
            derivs,
        })
    }

    pub fn base_polynomial(&self) -> &Polynomial {
        &self.base
    }

    pub fn smoothness_order(&self) -> usize {
        self.smoothness
    }

    pub fn sup_norms(&self) -> &[f64] {
        &self.sup_norms
    }

    /// M_j, or an error when j exceeds the smoothness order.
    pub fn sup_norm(&self, j: usize) -> Result<f64> {
        self.sup_norms
            .get(j)
            .copied()
            .ok_or(Error::MissingSupNorm {
                index: j,
                available: self.smoothness,
            })
    }

    /// j-th derivative of the extended cutoff at `s` (0 <= j <= smoothness).
    pub fn eval_derivative(&self, j: usize, s: f64) -> f64 {
        if s <= 0.0 {
            0.0
        } else if s >= 1.0 {
            if j == 0 {
                1.0
            } else {
                0.0
            }
        } else {
            horner(&self.derivs[j], s)
        }
    }
}

/// The cutoff P_{2m} used by every J_m bound of order m, built once per m.
pub fn standard_cutoff(m: usize) -> Result<Arc<CutoffSpec>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<CutoffSpec>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(c) = cache.lock().ok().and_then(|g| g.get(&m).cloned()) {
        return Ok(c);
    }
    let spec = Arc::new(interpolating_cutoff(2 * m)?);
    if let Ok(mut g) = cache.lock() {
        g.entry(m).or_insert_with(|| spec.clone());
    }
    Ok(spec)
}

/// The unique P_n of degree <= 2n+1 with P_n(0) = 0, P_n(1) = 1 and
/// P_n^{(i)}(0) = P_n^{(i)}(1) = 0 for 1 <= i <= n, found by solving the
/// 2n+2 Hermite interpolation conditions in exact arithmetic.
pub fn interpolating_cutoff(n: usize) -> Result<CutoffSpec> {
    if n == 0 {
        return Err(Error::domain("interpolating_cutoff", "order must be >= 1"));
    }
    let size = 2 * n + 2;
    let mut rows: Vec<Vec<Rational>> = Vec::with_capacity(size);
    for (point, value) in [(0i64, 0i64), (1, 1)] {
        for order in 0..=n {
            let mut row = vec![Rational::zero(); size + 1];
            for (k, slot) in row.iter_mut().enumerate().take(size) {
                if k >= order {
                    // d^order/ds^order s^k = k!/(k-order)! s^(k-order)
                    let falling: i64 = ((k - order + 1)..=k).map(|v| v as i64).product();
                    let pow = if k == order { 1 } else { point.pow((k - order) as u32) };
                    *slot = int(falling * pow);
                }
            }
            row[size] = if order == 0 { int(value) } else { Rational::zero() };
            rows.push(row);
        }
    }
    let coeffs = solve_exact(rows)?;
    CutoffSpec::from_polynomial(Polynomial::new(coeffs), n)
}

/// Gauss–Jordan elimination on an augmented matrix of rationals.
fn solve_exact(mut a: Vec<Vec<Rational>>) -> Result<Vec<Rational>> {
    let n = a.len();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .ok_or_else(|| Error::domain("interpolating_cutoff", "singular interpolation system"))?;
        a.swap(col, pivot);
        let inv = Rational::one() / &a[col][col];
        for v in a[col].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = a[col].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r == col || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                *v -= &f * p;
            }
        }
    }
    Ok(a.into_iter().map(|row| row[n].clone()).collect())
}

fn sign(x: &Rational) -> i8 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

fn dyadic(i: u64, depth: u32) -> Rational {
    Rational::new(BigInt::from(i), BigInt::from(1u64 << depth))
}

fn round_up(v: f64, exact: bool) -> f64 {
    let steps = (v / SUP_GRANULARITY).ceil() + if exact { 0.0 } else { 1.0 };
    let mut g = steps * SUP_GRANULARITY;
    while g < v {
        g = g.next_up();
    }
    g
}

/// max_{0<=s<=1} |p^{(j)}(s)|, rounded up to the 1e-12 grid.
///
/// Critical points are isolated by exact sign changes of p^{(j+1)} on a
/// dyadic subdivision of [0, 1], then bisected in exact arithmetic.
pub fn sup_derivative_norm(p: &Polynomial, j: usize) -> f64 {
    let q = p.nth_derivative(j);
    let dq = q.derivative();
    let abs_f64 = |s: &Rational| q.eval(s).abs().to_f64().unwrap_or(f64::INFINITY);
    let mut best = abs_f64(&Rational::zero()).max(abs_f64(&Rational::one()));
    let mut exact = true;
    if dq.is_zero() {
        return round_up(best, true);
    }
    let cells = 1u64 << ISOLATION_DEPTH;
    let mut prev_s = Rational::zero();
    let mut prev_sign = sign(&dq.eval(&prev_s));
    for i in 1..=cells {
        let s = dyadic(i, ISOLATION_DEPTH);
        let sg = sign(&dq.eval(&s));
        if sg == 0 {
            let v = abs_f64(&s);
            if v > best {
                best = v;
                exact = true;
            }
        } else if prev_sign != 0 && sg != prev_sign {
            let (mut lo, mut hi) = (prev_s.clone(), s.clone());
            let half = Rational::new(BigInt::from(1), BigInt::from(2));
            let mut hit = None;
            while (&hi - &lo).to_f64().unwrap_or(0.0) > ROOT_WIDTH {
                let mid = (&lo + &hi) * &half;
                let sm = sign(&dq.eval(&mid));
                if sm == 0 {
                    hit = Some(mid);
                    break;
                }
                if sm == prev_sign {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let (v, is_exact) = match hit {
                Some(m) => (abs_f64(&m), true),
                None => (abs_f64(&lo).max(abs_f64(&hi)), false),
            };
            if v > best {
                best = v;
                exact = is_exact;
            }
        }
        prev_s = s;
        prev_sign = sg;
    }
    round_up(best, exact)
}
