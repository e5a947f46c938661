//! Exact heat kernels on separable domains and at the centre of the unit
//! disk and ball.
//!
//! A separable domain is a product of one-dimensional factors, each a full
//! line, a half-line or an interval with its own boundary conditions. Its
//! kernel is the product of the factor kernels. Each factor reports its free
//! part k₀(x - y; t) and the correction coming from the boundary separately,
//! so K - K₀ is assembled without subtracting two nearly equal numbers.

mod ball;
mod halfline;
mod interval;

pub use ball::{ball_center_diag_neumann, disk_center_diag_neumann, disk_center_diag_neumann_with, CenterValue};
pub use halfline::halfline_kernel;
pub use interval::{interval_eigen_series, interval_images, interval_kernel, REPRESENTATION_TOL};

use serde::Serialize;

use crate::error::{Error, Result};

/// A boundary condition at one end of a factor. Robin means
/// ∂_ν u + σ u = 0 with outward normal ν.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Bc {
    Dirichlet,
    Neumann,
    Robin(f64),
}

impl Bc {
    pub(crate) fn validate(self) -> Result<Self> {
        match self {
            Bc::Robin(s) if !(s >= 0.0 && s.is_finite()) => Err(Error::domain(
                "Bc",
                format!("Robin coefficient must be finite and >= 0, got {s}"),
            )),
            Bc::Robin(0.0) => Ok(Bc::Neumann),
            other => Ok(other),
        }
    }

    /// Short label used in reports: D, N or R(σ).
    pub fn label(self) -> String {
        match self {
            Bc::Dirichlet => "D".into(),
            Bc::Neumann => "N".into(),
            Bc::Robin(s) => format!("R({s})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Factor {
    FullLine,
    /// (0, ∞) with a condition at 0.
    HalfLine(Bc),
    /// (0, length).
    Interval { length: f64, left: Bc, right: Bc },
}

impl Factor {
    fn validate(self) -> Result<Self> {
        Ok(match self {
            Factor::FullLine => self,
            Factor::HalfLine(bc) => Factor::HalfLine(bc.validate()?),
            Factor::Interval { length, left, right } => {
                if !(length > 0.0 && length.is_finite()) {
                    return Err(Error::domain("Factor", format!("interval length must be positive, got {length}")));
                }
                Factor::Interval { length, left: left.validate()?, right: right.validate()? }
            }
        })
    }

    /// Distance from coordinate `x` to the factor's boundary, if it has one.
    fn boundary_distance(self, x: f64) -> Option<f64> {
        match self {
            Factor::FullLine => None,
            Factor::HalfLine(_) => Some(x),
            Factor::Interval { length, .. } => Some(x.min(length - x)),
        }
    }

    fn contains(self, x: f64) -> bool {
        x.is_finite()
            && match self {
                Factor::FullLine => true,
                Factor::HalfLine(_) => x > 0.0,
                Factor::Interval { length, .. } => x > 0.0 && x < length,
            }
    }

    fn eval(self, x: f64, y: f64, t: f64) -> Result<FactorValue> {
        match self {
            Factor::FullLine => Ok(FactorValue { free: free_1d(x - y, t), correction: 0.0, error: 0.0 }),
            Factor::HalfLine(bc) => halfline::halfline_factor(bc, x, y, t),
            Factor::Interval { length, left, right } => interval::interval_factor(length, left, right, x, y, t),
        }
    }
}

/// Value of a one-dimensional kernel split as `free + correction`, with an
/// absolute bound on the truncation error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct FactorValue {
    pub free: f64,
    pub correction: f64,
    pub error: f64,
}

impl FactorValue {
    pub fn value(&self) -> f64 {
        self.free + self.correction
    }
}

/// (4πt)^{-1/2} exp(-r²/4t).
pub(crate) fn free_1d(r: f64, t: f64) -> f64 {
    (-r * r / (4.0 * t)).exp() / (4.0 * std::f64::consts::PI * t).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparableDomain {
    factors: Vec<Factor>,
}

impl SeparableDomain {
    pub fn new(factors: Vec<Factor>) -> Result<Self> {
        if factors.len() < 2 {
            return Err(Error::domain("SeparableDomain", "need at least two factors"));
        }
        if factors.iter().all(|f| matches!(f, Factor::FullLine)) {
            return Err(Error::domain("SeparableDomain", "at least one factor must have a boundary"));
        }
        let factors = factors.into_iter().map(Factor::validate).collect::<Result<_>>()?;
        Ok(SeparableDomain { factors })
    }

    /// {x_d > 0} in ℝ^d with `bc` on the boundary hyperplane.
    pub fn half_space(d: usize, bc: Bc) -> Result<Self> {
        let mut f = vec![Factor::FullLine; d.saturating_sub(1)];
        f.push(Factor::HalfLine(bc));
        Self::new(f)
    }

    /// (0, 1)^d with conditions (left, right) per coordinate.
    pub fn unit_box(faces: &[(Bc, Bc)]) -> Result<Self> {
        Self::new(
            faces
                .iter()
                .map(|&(left, right)| Factor::Interval { length: 1.0, left, right })
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.factors.len()
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim() && self.factors.iter().zip(x).all(|(f, &xi)| f.contains(xi))
    }

    /// Distance to the boundary; full-line factors do not contribute.
    pub fn boundary_distance(&self, x: &[f64]) -> f64 {
        self.factors
            .iter()
            .zip(x)
            .filter_map(|(f, &xi)| f.boundary_distance(xi))
            .fold(f64::INFINITY, f64::min)
    }

    /// Compact label such as "R^1 x H[N]" or "I[DN] x I[NN]".
    pub fn label(&self) -> String {
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|f| match f {
                Factor::FullLine => "R".to_string(),
                Factor::HalfLine(bc) => format!("H[{}]", bc.label()),
                Factor::Interval { length, left, right } => {
                    format!("I{length}[{}{}]", left.label(), right.label())
                }
            })
            .collect();
        parts.join("x")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelSample {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub t: f64,
    pub value: f64,
    /// K₀(x, y; t).
    pub free: f64,
    /// K - K₀, assembled from the per-factor corrections.
    pub difference: f64,
    pub truncation_error: f64,
    pub rho_x: f64,
    pub rho_y: f64,
}

/// Heat kernel of the separable domain at (x, y; t).
pub fn product_kernel(dom: &SeparableDomain, x: &[f64], y: &[f64], t: f64) -> Result<KernelSample> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::domain("product_kernel", format!("t must be positive, got {t}")));
    }
    if !dom.contains(x) || !dom.contains(y) {
        return Err(Error::domain("product_kernel", "points must lie strictly inside the domain"));
    }
    let (mut value, mut free, mut difference, mut error) = (1.0, 1.0, 0.0, 0.0);
    for ((f, &xi), &yi) in dom.factors.iter().zip(x).zip(y) {
        let v = f.eval(xi, yi, t)?;
        let k = v.value();
        difference = difference * k + free * v.correction;
        error = error * (k.abs() + v.error) + f64::abs(value) * v.error;
        value *= k;
        free *= v.free;
    }
    Ok(KernelSample {
        x: x.to_vec(),
        y: y.to_vec(),
        t,
        value,
        free,
        difference,
        truncation_error: error,
        rho_x: dom.boundary_distance(x),
        rho_y: dom.boundary_distance(y),
    })
}
