//! Neumann spectrum of the unit disk and unit ball, the heat trace with an
//! explicit tail bound, and the trace-weighted integral of the Neumann
//! constant.

use std::f64::consts::PI;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::bounds::NeumannTraceInputs;
use crate::error::{Error, Result};
use crate::kernels::disk_center_diag_neumann;
use crate::quadrature::integrate;
use crate::special::{bessel_j_prime_zeros_below, spherical_j_prime_zeros_below, unit_ball_volume, upper_incomplete_gamma};

/// Relative trace error accepted by `neumann_trace`.
pub const TRACE_REL_TOL: f64 = 1e-9;
/// Safety factor on the two-term Weyl count used beyond the table.
const OVERCOUNT_FACTOR: f64 = 1.1;
/// Candidate cut points 2^{-k} for the small-t bracket.
const CUT_LADDER: std::ops::RangeInclusive<i32> = 1..=40;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub eigenvalue: f64,
    pub multiplicity: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumTable {
    dimension: u32,
    lambda_max: f64,
    entries: Vec<SpectrumEntry>,
    /// Constant term of the over-count, raised so that N̄ dominates the
    /// table everywhere; low eigenvalues with large multiplicity need it.
    overcount_offset: f64,
}

fn check_dimension(d: u32) -> Result<()> {
    if d == 2 || d == 3 {
        Ok(())
    } else {
        Err(Error::domain("SpectrumTable", format!("only d = 2, 3 are supported, got {d}")))
    }
}

/// All Neumann eigenvalues of the unit d-ball up to `lambda_max`.
pub fn build_spectrum(d: u32, lambda_max: f64) -> Result<SpectrumTable> {
    check_dimension(d)?;
    if !(lambda_max > 0.0 && lambda_max.is_finite()) {
        return Err(Error::domain("build_spectrum", format!("lambda_max must be positive, got {lambda_max}")));
    }
    let k_max = lambda_max.sqrt();
    let mut entries = vec![SpectrumEntry { eigenvalue: 0.0, multiplicity: 1 }];
    for n in 0u32.. {
        let zeros = if d == 2 {
            bessel_j_prime_zeros_below(n, k_max)?
        } else {
            spherical_j_prime_zeros_below(n, k_max)?
        };
        if zeros.is_empty() && n > 0 {
            // first zeros increase with the order
            break;
        }
        let multiplicity = match (d, n) {
            (2, 0) => 1,
            (2, _) => 2,
            _ => 2 * n + 1,
        };
        entries.extend(zeros.iter().map(|&z| SpectrumEntry { eigenvalue: z * z, multiplicity }));
    }
    entries.sort_by(|a, b| a.eigenvalue.total_cmp(&b.eigenvalue));
    Ok(SpectrumTable::from_parts(d, lambda_max, entries))
}

impl SpectrumTable {
    fn from_parts(dimension: u32, lambda_max: f64, entries: Vec<SpectrumEntry>) -> Self {
        let mut t = SpectrumTable { dimension, lambda_max, entries, overcount_offset: 1.0 };
        let mut count = 0u64;
        let mut deficit: f64 = 0.0;
        for e in &t.entries {
            count += e.multiplicity as u64;
            deficit = deficit.max(count as f64 - t.overcount(e.eigenvalue));
        }
        t.overcount_offset += deficit;
        t
    }

    pub fn dimension(&self) -> u32 {
        self.dimension
    }

    pub fn lambda_max(&self) -> f64 {
        self.lambda_max
    }

    pub fn entries(&self) -> &[SpectrumEntry] {
        &self.entries
    }

    /// Number of eigenvalues ≤ λ counted with multiplicity (λ ≤ lambda_max).
    pub fn count_below(&self, lambda: f64) -> u64 {
        self.entries
            .iter()
            .take_while(|e| e.eigenvalue <= lambda)
            .map(|e| e.multiplicity as u64)
            .sum()
    }

    /// Two-term Weyl count ω_d(2π)^{-d}λ^{d/2} + (Neumann boundary term):
    /// λ/4 + √λ/2 for the disk, 2λ^{3/2}/(9π) + λ/4 for the ball.
    pub fn weyl_count(&self, lambda: f64) -> f64 {
        if self.dimension == 2 {
            lambda / 4.0 + lambda.sqrt() / 2.0
        } else {
            2.0 * lambda.powf(1.5) / (9.0 * PI) + lambda / 4.0
        }
    }

    /// Leading Weyl term ω_d(2π)^{-d}λ^{d/2} of the counting function.
    pub fn weyl_leading(&self, lambda: f64) -> f64 {
        if self.dimension == 2 {
            lambda / 4.0
        } else {
            2.0 * lambda.powf(1.5) / (9.0 * PI)
        }
    }

    /// Coefficients c_p of the over-count N̄(λ) = Σ c_p λ^p.
    fn overcount_terms(&self) -> [(f64, f64); 3] {
        let f = OVERCOUNT_FACTOR;
        if self.dimension == 2 {
            [(1.0, f / 4.0), (0.5, f / 2.0), (0.0, self.overcount_offset)]
        } else {
            [(1.5, f * 2.0 / (9.0 * PI)), (1.0, f / 4.0), (0.0, self.overcount_offset)]
        }
    }

    fn overcount(&self, lambda: f64) -> f64 {
        self.overcount_terms().iter().map(|(p, c)| c * lambda.powf(*p)).sum()
    }

    /// Checks that the table is in the regime where the over-count is
    /// trusted beyond lambda_max: on [Λ/2, Λ] the count must sit below
    /// 1.1 × (two-term Weyl) + 1 without help from the fitted offset.
    pub fn validate_overcount(&self) -> Result<()> {
        let mut count = 0u64;
        for e in &self.entries {
            count += e.multiplicity as u64;
            let limit = OVERCOUNT_FACTOR * self.weyl_count(e.eigenvalue) + 1.0;
            if e.eigenvalue >= self.lambda_max / 2.0 && count as f64 > limit {
                return Err(Error::Truncation {
                    tol: 0.0,
                    detail: format!("Weyl over-count fails at λ = {}: {count} eigenvalues vs {limit}", e.eigenvalue),
                });
            }
        }
        Ok(())
    }

    /// Serializes as CSV with columns dimension, lambda_max, eigenvalue,
    /// multiplicity.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let io = |e: csv::Error| Error::Io(e.to_string());
        out.write_record(["dimension", "lambda_max", "eigenvalue", "multiplicity"]).map_err(io)?;
        for e in &self.entries {
            out.write_record([
                self.dimension.to_string(),
                format!("{:.16e}", self.lambda_max),
                format!("{:.16e}", e.eigenvalue),
                e.multiplicity.to_string(),
            ])
            .map_err(io)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        #[derive(Deserialize)]
        struct Row {
            dimension: u32,
            lambda_max: f64,
            eigenvalue: f64,
            multiplicity: u32,
        }
        let mut rdr = csv::Reader::from_reader(r);
        let mut table: Option<SpectrumTable> = None;
        for (i, row) in rdr.deserialize::<Row>().enumerate() {
            let row = row.map_err(|e| Error::Config { line: i + 2, msg: e.to_string() })?;
            let t = table.get_or_insert_with(|| SpectrumTable {
                dimension: row.dimension,
                lambda_max: row.lambda_max,
                entries: Vec::new(),
                overcount_offset: 1.0,
            });
            if row.dimension != t.dimension || row.lambda_max != t.lambda_max {
                return Err(Error::Config { line: i + 2, msg: "inconsistent dimension or lambda_max".into() });
            }
            t.entries.push(SpectrumEntry { eigenvalue: row.eigenvalue, multiplicity: row.multiplicity });
        }
        let table = table.ok_or_else(|| Error::Config { line: 1, msg: "empty spectrum table".into() })?;
        check_dimension(table.dimension)?;
        let table = SpectrumTable::from_parts(table.dimension, table.lambda_max, table.entries);
        let ordered = table.entries.windows(2).all(|w| w[0].eigenvalue <= w[1].eigenvalue);
        if table.entries.first() != Some(&SpectrumEntry { eigenvalue: 0.0, multiplicity: 1 }) || !ordered {
            return Err(Error::Config { line: 2, msg: "table must start with (0, 1) and be sorted".into() });
        }
        Ok(table)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceValue {
    pub value: f64,
    pub error_bound: f64,
}

/// Tr(e^{-tΔ_N}) with a bound on the eigenvalues beyond the table.
///
/// Summation by parts gives tail = t∫_Λ^∞ e^{-λt}(N(λ) - N(Λ))dλ, which is
/// at most Σ c_p t^{-p} Γ(p+1, Λt) - e^{-Λt} N(Λ) when N <= N̄ = Σ c_p λ^p.
pub fn neumann_trace(table: &SpectrumTable, t: f64) -> Result<TraceValue> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::domain("neumann_trace", format!("t must be positive, got {t}")));
    }
    let lam = table.lambda_max;
    // largest terms last keeps the rounding small
    let value: f64 = table.entries.iter().rev().map(|e| e.multiplicity as f64 * (-e.eigenvalue * t).exp()).sum();
    let mut tail = -(-lam * t).exp() * table.count_below(lam) as f64;
    for (p, c) in table.overcount_terms() {
        tail += c * t.powf(-p) * upper_incomplete_gamma(p + 1.0, lam * t)?;
    }
    let rounding = 4.0 * f64::EPSILON * value;
    let error_bound = tail.max(0.0) + rounding;
    if error_bound > TRACE_REL_TOL * value {
        return Err(Error::TraceRange { t, lambda_max: lam });
    }
    Ok(TraceValue { value, error_bound })
}

/// ω_d (4πt)^{-d/2}, the leading small-t term of the trace.
fn weyl_trace(d: u32, t: f64) -> f64 {
    unit_ball_volume(d).expect("d is 2 or 3") * (4.0 * PI * t).powf(-(d as f64) / 2.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceIntegral {
    /// ∫_0^1 t^{m-1} Tr dt, lower end of the bracket.
    pub lower: f64,
    /// Upper end of the bracket; this is the value used in bounds.
    pub upper: f64,
    pub t_cut: f64,
    /// Trace/Weyl ratio allowance used on (0, t_cut).
    pub margin: f64,
}

impl TraceIntegral {
    pub fn value(&self) -> f64 {
        self.upper
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// ∫_0^1 t^{m-1} Tr(e^{-tΔ_N}) dt as a bracket of width <= `tol`.
///
/// On (0, t_cut) the trace lies between the Weyl term ω_d(4πt)^{-d/2} and
/// that term times 1 + margin. The margin is 1.1 times the largest excess
/// of trace over Weyl seen on [t_cut, 2 t_cut]; this is an empirical
/// allowance, not a proved constant. On [t_cut, 1] the certified trace is
/// integrated by adaptive quadrature. t_cut is the largest 2^{-k} whose
/// bracket is narrow enough.
pub fn trace_weighted_integral(table: &SpectrumTable, m: u32, tol: f64) -> Result<TraceIntegral> {
    let d = table.dimension;
    if 2 * m <= d {
        return Err(Error::domain("trace_weighted_integral", format!("need m > d/2, got m = {m}")));
    }
    if !(tol > 0.0) {
        return Err(Error::domain("trace_weighted_integral", format!("tol must be positive, got {tol}")));
    }
    let expo = m as f64 - d as f64 / 2.0;
    let weyl_integral = |t_cut: f64| weyl_trace(d, 1.0) * t_cut.powf(expo) / expo;
    let mut narrowest = f64::INFINITY;
    for k in CUT_LADDER {
        let t_cut = 2f64.powi(-k);
        let Some(margin) = excess_ratio(table, t_cut)? else {
            // table too small for this t_cut; smaller ones are worse
            break;
        };
        let head_lower = weyl_integral(t_cut);
        let head_width = margin * head_lower;
        narrowest = narrowest.min(head_width);
        if head_width > tol {
            continue;
        }
        let f = |t: f64| {
            let tr = neumann_trace(table, t).map(|v| v.value).unwrap_or(f64::NAN);
            t.powi(m as i32 - 1) * tr
        };
        let quad = integrate(f, t_cut, 1.0, 0.0, 1e-12)?;
        if !quad.value.is_finite() {
            return Err(Error::TraceRange { t: t_cut, lambda_max: table.lambda_max });
        }
        let slack = quad.error + TRACE_REL_TOL * quad.value;
        let lower = head_lower + quad.value - slack;
        let upper = head_lower + head_width + quad.value + slack;
        if upper - lower > tol {
            narrowest = narrowest.min(upper - lower);
            continue;
        }
        return Ok(TraceIntegral { lower, upper, t_cut, margin });
    }
    Err(Error::BracketTooWide { width: narrowest, tol })
}

/// 1.1 (max Tr/Weyl - 1) over a grid of [t_cut, 2 t_cut], or None when the
/// table cannot certify the trace there.
fn excess_ratio(table: &SpectrumTable, t_cut: f64) -> Result<Option<f64>> {
    let mut worst: f64 = 0.0;
    for i in 0..=16 {
        let t = t_cut * 2f64.powf(i as f64 / 16.0);
        match neumann_trace(table, t) {
            Ok(v) => worst = worst.max((v.value + v.error_bound) / weyl_trace(table.dimension, t) - 1.0),
            Err(Error::TraceRange { .. }) => return Ok(None),
            Err(e) => return Err(e),
        }
    }
    Ok(Some(OVERCOUNT_FACTOR * worst.max(0.0)))
}

/// Upper values of ∫_0^1 t^{m-1}Tr dt and Tr(e^{-Δ_N}) for the Neumann bound.
pub fn neumann_inputs(table: &SpectrumTable, m: u32, tol: f64) -> Result<NeumannTraceInputs> {
    let integral = trace_weighted_integral(table, m, tol)?;
    let one = neumann_trace(table, 1.0)?;
    Ok(NeumannTraceInputs {
        d: table.dimension,
        m,
        weighted_integral: integral.upper,
        trace_at_one: one.value + one.error_bound,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LaugesenMorpurgoRow {
    pub t: f64,
    /// 𝕌_2(0, 0; t).
    pub lhs: f64,
    pub lhs_error: f64,
    /// Tr(e^{-tΔ_N})/π.
    pub rhs: f64,
    pub rhs_error: f64,
    /// lhs < rhs with the gap exceeding both error bounds.
    pub ok: bool,
}

/// Compares the disk centre kernel with the averaged trace at each t.
pub fn laugesen_morpurgo_check(table: &SpectrumTable, t_grid: &[f64]) -> Result<Vec<LaugesenMorpurgoRow>> {
    if table.dimension != 2 {
        return Err(Error::domain("laugesen_morpurgo_check", "needs the d = 2 table"));
    }
    t_grid
        .iter()
        .map(|&t| {
            let tr = neumann_trace(table, t)?;
            let (rhs, rhs_error) = (tr.value / PI, tr.error_bound / PI);
            let c = disk_center_diag_neumann(t, 1e-3 * TRACE_REL_TOL * rhs)?;
            let lhs_error = c.error + 4.0 * f64::EPSILON * c.value;
            Ok(LaugesenMorpurgoRow {
                t,
                lhs: c.value,
                lhs_error,
                rhs,
                rhs_error,
                ok: rhs - c.value > lhs_error + rhs_error,
            })
        })
        .collect()
}
