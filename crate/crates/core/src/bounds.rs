//! Pointwise bounds on |K_U - K_0| and the classical comparison bounds.
//!
//! Every J_m-based bound has the shape `prefactor · J_m(R; t) / (2√(πt))`
//! with R = ρ(x) + ρ(y); only the prefactor depends on which extension of
//! the Laplacian is being bounded. Values are carried together with their
//! logarithm because at small t the bounds underflow long before the
//! comparisons in the reports become interesting.

use std::f64::consts::PI;

use serde::Serialize;

use crate::constants::{compute_constants, free_green_diag, min_order, DimensionParams};
use crate::cutoff::standard_cutoff;
use crate::error::{Error, Result};
use crate::jm::{jm_closed_form, JmClosedForm, JmQuery};
use crate::special::unit_ball_volume;

/// The point pair and time every bound is evaluated on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundQuery {
    pub d: u32,
    pub m: u32,
    pub rho_x: f64,
    pub rho_y: f64,
    /// |x - y|; not constrained by the boundary distances.
    pub dist: f64,
    pub t: f64,
}

impl BoundQuery {
    /// Query with the default order m = m_d.
    pub fn new(d: u32, rho_x: f64, rho_y: f64, dist: f64, t: f64) -> Result<Self> {
        Self::with_order(d, min_order(d), rho_x, rho_y, dist, t)
    }

    pub fn with_order(d: u32, m: u32, rho_x: f64, rho_y: f64, dist: f64, t: f64) -> Result<Self> {
        DimensionParams::new(d, m)?;
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !positive(rho_x) || !positive(rho_y) {
            return Err(Error::domain(
                "BoundQuery",
                format!("boundary distances must be positive, got ({rho_x}, {rho_y})"),
            ));
        }
        if !(dist >= 0.0 && dist.is_finite()) {
            return Err(Error::domain("BoundQuery", format!("|x - y| must be >= 0, got {dist}")));
        }
        if !positive(t) {
            return Err(Error::domain("BoundQuery", format!("t must be positive, got {t}")));
        }
        Ok(BoundQuery { d, m, rho_x, rho_y, dist, t })
    }

    /// Diagonal query x = y at distance ρ from the boundary.
    pub fn diagonal(d: u32, rho: f64, t: f64) -> Result<Self> {
        Self::new(d, rho, rho, 0.0, t)
    }

    pub fn params(&self) -> DimensionParams {
        DimensionParams::new(self.d, self.m).expect("validated on construction")
    }

    /// R = ρ(x) + ρ(y).
    pub fn r(&self) -> f64 {
        self.rho_x + self.rho_y
    }

    pub fn rho_min(&self) -> f64 {
        self.rho_x.min(self.rho_y)
    }

    pub fn rho_max(&self) -> f64 {
        self.rho_x.max(self.rho_y)
    }

    /// Whether t <= R²/8.
    pub fn in_range(&self) -> bool {
        let r = self.r();
        self.t <= r * r / 8.0
    }
}

/// Distance from the convex hull of {x, y} to the boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VdBParams {
    pub delta: f64,
}

/// A J_m-based bound with its factors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JmBound {
    /// Multiplies J_m / (2√(πt)).
    pub prefactor: f64,
    #[serde(skip)]
    pub jm: JmClosedForm,
    pub jm_value: f64,
    pub value: f64,
    /// ln(value) = ln_scale + exponent, kept apart so that ratios of bounds
    /// with the same Gaussian exponent lose no precision at small t.
    pub ln_scale: f64,
    pub exponent: f64,
    pub ln_value: f64,
}

impl JmBound {
    fn assemble(prefactor: f64, jm: JmClosedForm, t: f64) -> Self {
        let time = 2.0 * (PI * t).sqrt();
        let ln_scale = prefactor.ln() + jm.laurent_value.ln() - time.ln();
        JmBound {
            prefactor,
            jm_value: jm.value,
            value: prefactor * jm.value / time,
            ln_scale,
            exponent: jm.exponent,
            ln_value: ln_scale + jm.exponent,
            jm,
        }
    }
}

fn jm_for(q: &BoundQuery) -> Result<JmClosedForm> {
    let m = q.m as usize;
    let cutoff = standard_cutoff(m)?;
    jm_closed_form(&JmQuery::new(m, q.r(), q.t, &cutoff)?)
}

/// (4πt)^{-d/2} exp(-|x-y|²/4t).
pub fn free_kernel(d: u32, dist_sq: f64, t: f64) -> f64 {
    (4.0 * PI * t).powf(-(d as f64) / 2.0) * (-dist_sq / (4.0 * t)).exp()
}

/// (C5 ρ_min^{-d} + C6) J_m(R; t) / (2√(πt)).
pub fn theorem22_bound(q: &BoundQuery) -> Result<JmBound> {
    let c = compute_constants(q.params());
    let prefactor = c.c5 * q.rho_min().powi(-(q.d as i32)) + c.c6;
    Ok(JmBound::assemble(prefactor, jm_for(q)?, q.t))
}

/// The general-order bound at m = m_d together with a factorized display.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Theorem11Bound {
    pub bound: JmBound,
    /// 2 m_d - 1/2, the power of t in the factorized display.
    pub alpha: f64,
    /// Canonical (C1, C2) for this R: the Laurent polynomial multiplied by
    /// t^alpha is majorized by its value at t = R²/8, so that
    /// bound <= (C1 ρ_min^{-d} + C2) e^{-R²/4t} t^{-alpha} for all t <= R²/8.
    pub c1: f64,
    pub c2: f64,
}

pub fn theorem11_bound(q: &BoundQuery) -> Result<Theorem11Bound> {
    let mut q = *q;
    q.m = min_order(q.d);
    let bound = theorem22_bound(&q)?;
    let alpha = 2.0 * q.m as f64 - 0.5;
    let t_max = q.r() * q.r() / 8.0;
    // Every Laurent power p satisfies p + alpha - 1/2 >= 0 and all
    // coefficients are non-negative, so the product is increasing in t.
    let majorant: f64 = bound
        .jm
        .laurent_terms
        .iter()
        .map(|&(p, a)| a * t_max.powf(p as f64 + alpha - 0.5))
        .sum::<f64>()
        / (2.0 * PI.sqrt());
    let c = compute_constants(q.params());
    Ok(Theorem11Bound { bound, alpha, c1: c.c5 * majorant, c2: c.c6 * majorant })
}

/// Dirichlet specialization: G_U ≤ G_0 turns the prefactor into 2 G_0^(m)(x,x).
pub fn dirichlet_green_bound(q: &BoundQuery) -> Result<JmBound> {
    let prefactor = 2.0 * free_green_diag(q.params());
    Ok(JmBound::assemble(prefactor, jm_for(q)?, q.t))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VdbVariant {
    Hull,
    Diag,
    Offdiag,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassicalBound {
    pub value: f64,
    /// ln(value) = ln_scale + exponent.
    pub ln_scale: f64,
    pub exponent: f64,
    pub ln_value: f64,
}

impl ClassicalBound {
    fn from_parts(ln_scale: f64, exponent: f64) -> Self {
        let ln_value = ln_scale + exponent;
        ClassicalBound { value: ln_value.exp(), ln_scale, exponent, ln_value }
    }
}

/// Classical Gaussian Dirichlet bounds. `Hull` needs δ; the diagonal variant
/// uses ρ(x) and ignores y.
pub fn vdb_bound(q: &BoundQuery, v: Option<VdBParams>, variant: VdbVariant) -> Result<ClassicalBound> {
    let d = q.d as f64;
    let t = q.t;
    let ln_gauss = -d / 2.0 * (4.0 * PI * t).ln();
    match variant {
        VdbVariant::Hull => {
            let delta = v
                .ok_or_else(|| Error::domain("vdb_bound", "hull variant needs delta"))?
                .delta;
            if !(delta >= 0.0 && delta <= q.rho_min()) {
                return Err(Error::domain(
                    "vdb_bound",
                    format!("need 0 <= delta <= min(rho), got {delta}"),
                ));
            }
            let mut sum = 0.0;
            let mut term = 2.0; // 2^j δ^{2j-2} / ((j-1)! t^{j-1}) at j = 1
            for j in 1..=q.d {
                sum += term;
                term *= 2.0 * delta * delta / (j as f64 * t);
            }
            let expo = -(q.dist * q.dist + 4.0 * delta * delta) / (4.0 * t);
            Ok(ClassicalBound::from_parts(ln_gauss + sum.ln(), expo))
        }
        VdbVariant::Diag => {
            Ok(ClassicalBound::from_parts((2.0 * d).ln() + ln_gauss, -q.rho_x * q.rho_x / (d * t)))
        }
        VdbVariant::Offdiag => {
            let c = 3.0 - 2.0 * 2f64.sqrt();
            let rho = q.rho_max();
            Ok(ClassicalBound::from_parts((2.0 * d).ln() + ln_gauss, -c * rho * rho / (d * t)))
        }
    }
}

/// Upper values of the two trace functionals entering the Neumann constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NeumannTraceInputs {
    pub d: u32,
    /// Order m the weighted integral was computed for.
    pub m: u32,
    /// ∫_0^1 t^{m-1} Tr(e^{-tΔ_N}) dt, upper bracket.
    pub weighted_integral: f64,
    /// Tr(e^{-Δ_N}), upper bracket.
    pub trace_at_one: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NeumannBound {
    /// The three summands of N_d(x, y); the middle one is G_0^(m)(x,x).
    pub summands: [f64; 3],
    pub n_d: f64,
    pub bound: JmBound,
}

/// Neumann bound on a domain whose inscribed-ball trace data is `trace`.
pub fn neumann_theorem41_bound(q: &BoundQuery, trace: &NeumannTraceInputs) -> Result<NeumannBound> {
    if trace.d != q.d || trace.m != q.m {
        return Err(Error::domain(
            "neumann_theorem41_bound",
            format!(
                "trace data is for (d, m) = ({}, {}), query has ({}, {})",
                trace.d, trace.m, q.d, q.m
            ),
        ));
    }
    let p = q.params();
    let omega = unit_ball_volume(q.d)?;
    let d = q.d as i32;
    let first = trace.weighted_integral / (crate::special::factorial(q.m - 1) * omega)
        * q.rho_max().powi(2 * q.m as i32 - d);
    let second = free_green_diag(p);
    let third = trace.trace_at_one / omega * q.rho_min().powi(-d);
    let n_d = first + second + third;
    Ok(NeumannBound {
        summands: [first, second, third],
        n_d,
        bound: JmBound::assemble(n_d, jm_for(q)?, q.t),
    })
}

/// The default-order bound on the diagonal rewritten as g t^{-alpha} e^{-ρ²/t}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LaceyForm {
    pub alpha: f64,
    pub g_value: f64,
}

pub fn lacey_form(q: &BoundQuery) -> Result<LaceyForm> {
    if q.rho_x != q.rho_y || q.dist != 0.0 {
        return Err(Error::domain("lacey_form", "needs a diagonal query (rho_x = rho_y, dist = 0)"));
    }
    let rho = q.rho_x;
    if q.t > rho * rho / 2.0 {
        return Err(Error::Hypothesis(format!("t > rho^2/2 (t = {}, rho = {rho})", q.t)));
    }
    let b = theorem11_bound(q)?;
    let ln_g = b.bound.ln_value + b.alpha * q.t.ln() + rho * rho / q.t;
    Ok(LaceyForm { alpha: b.alpha, g_value: ln_g.exp() })
}
