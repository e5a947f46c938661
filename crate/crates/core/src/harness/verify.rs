//! Verification sweeps: exact kernels against the bounds.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::config::{Geometry, Sampling, SweepConfig};
use super::{format_float, BoundKind, Cell, Table};
use crate::bounds::{dirichlet_green_bound, theorem11_bound, theorem22_bound, vdb_bound, BoundQuery, VdBParams, VdbVariant};
use crate::constants::min_order;
use crate::error::Result;
use crate::kernels::{product_kernel, Bc, Factor, SeparableDomain};

/// A row passes when |K - K₀| <= bound · (1 + PASS_TOLERANCE).
pub const PASS_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RowStatus {
    Pass,
    /// Exceeds the bound only by less than the kernel's truncation error.
    Tolerance,
    Violation,
}

impl RowStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RowStatus::Pass => "pass",
            RowStatus::Tolerance => "tolerance",
            RowStatus::Violation => "violation",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifySummary {
    pub rows: usize,
    pub passed: usize,
    pub violations: usize,
    pub tolerance_failures: usize,
    /// Largest exact/bound ratio per bound over the rows where it applies.
    pub max_ratio: Vec<(BoundKind, f64)>,
}

impl VerifySummary {
    pub fn status(&self) -> RowStatus {
        if self.violations > 0 {
            RowStatus::Violation
        } else if self.tolerance_failures > 0 {
            RowStatus::Tolerance
        } else {
            RowStatus::Pass
        }
    }

    pub fn lines(&self) -> Vec<String> {
        let mut out = vec![format!(
            "rows: {}, passed: {}, violations: {}, tolerance failures: {}",
            self.rows, self.passed, self.violations, self.tolerance_failures
        )];
        for (k, r) in &self.max_ratio {
            out.push(format!("max |K-K0|/bound for {k}: {}", format_float(*r)));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub table: Table,
    pub summary: VerifySummary,
}

struct Sample {
    x: Vec<f64>,
    y: Vec<f64>,
    t_fraction: f64,
}

#[derive(Clone, Copy)]
struct BoundCell {
    value: f64,
    ln_value: f64,
}

fn draw_samples(config: &SweepConfig) -> Vec<Sample> {
    let g = config.geometry;
    let dim = g.dim();
    let fr = &config.t_fractions;
    match config.sampling {
        Sampling::Random { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let point = |rng: &mut ChaCha8Rng| -> Vec<f64> {
                (0..dim)
                    .map(|i| {
                        let (lo, hi) = g.range(i);
                        rng.gen_range(lo..hi)
                    })
                    .collect()
            };
            (0..samples)
                .map(|i| {
                    let x = point(&mut rng);
                    let y = point(&mut rng);
                    Sample { x, y, t_fraction: fr[i % fr.len()] }
                })
                .collect()
        }
        Sampling::Grid { points_per_axis: n } => {
            let axis = |i: usize| -> Vec<f64> {
                let (lo, hi) = g.range(i);
                (0..n).map(|k| lo + (hi - lo) * (k as f64 + 0.5) / n as f64).collect()
            };
            let axes: Vec<Vec<f64>> = (0..dim).map(axis).collect();
            let total = n.pow(dim as u32);
            let lattice: Vec<Vec<f64>> = (0..total)
                .map(|mut idx| {
                    (0..dim)
                        .map(|i| {
                            let v = axes[i][idx % n];
                            idx /= n;
                            v
                        })
                        .collect()
                })
                .collect();
            let mut out = Vec::with_capacity(total * total * fr.len());
            for x in &lattice {
                for y in &lattice {
                    for &t_fraction in fr {
                        out.push(Sample { x: x.clone(), y: y.clone(), t_fraction });
                    }
                }
            }
            out
        }
    }
}

fn boundary_distance(g: &Geometry, x: &[f64]) -> f64 {
    match g {
        Geometry::HalfSpace { dim, .. } => x[dim - 1],
        Geometry::UnitBox { .. } => x.iter().map(|&v| v.min(1.0 - v)).fold(f64::INFINITY, f64::min),
    }
}

fn query_for(config: &SweepConfig, s: &Sample, kind: BoundKind) -> Result<BoundQuery> {
    let d = config.geometry.dim() as u32;
    let rho_x = boundary_distance(&config.geometry, &s.x);
    let rho_y = boundary_distance(&config.geometry, &s.y);
    let dist = s.x.iter().zip(&s.y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    let r = rho_x + rho_y;
    let t = s.t_fraction * r * r / 8.0;
    let m = if kind == BoundKind::Thm11 { min_order(d) } else { config.m };
    BoundQuery::with_order(d, m, rho_x, rho_y, dist, t)
}

fn evaluate_bound(q: &BoundQuery, kind: BoundKind) -> Result<BoundCell> {
    let (value, ln_value) = match kind {
        BoundKind::Thm11 => {
            let b = theorem11_bound(q)?.bound;
            (b.value, b.ln_value)
        }
        BoundKind::Thm22 => {
            let b = theorem22_bound(q)?;
            (b.value, b.ln_value)
        }
        BoundKind::Dirichlet => {
            let b = dirichlet_green_bound(q)?;
            (b.value, b.ln_value)
        }
        BoundKind::VdbHull => {
            // The distance to the boundary is concave on a convex domain, so
            // the segment [x, y] is closest at an endpoint.
            let b = vdb_bound(q, Some(VdBParams { delta: q.rho_min() }), VdbVariant::Hull)?;
            (b.value, b.ln_value)
        }
        other => unreachable!("{other} is rejected when the config is parsed"),
    };
    Ok(BoundCell { value, ln_value })
}

fn is_dirichlet(dom: &SeparableDomain) -> bool {
    dom.factors().iter().all(|f| match f {
        Factor::FullLine => true,
        Factor::HalfLine(bc) => *bc == Bc::Dirichlet,
        Factor::Interval { left, right, .. } => *left == Bc::Dirichlet && *right == Bc::Dirichlet,
    })
}

/// Classifies |K - K₀| = `exact` (uncertain by `err`) against a bound
/// given by its logarithm.
fn classify(exact: f64, err: f64, ln_bound: f64) -> RowStatus {
    let ln_allow = ln_bound + PASS_TOLERANCE.ln_1p();
    if exact == 0.0 || exact.ln() <= ln_allow {
        RowStatus::Pass
    } else if exact - err <= 0.0 || (exact - err).ln() <= ln_allow {
        RowStatus::Tolerance
    } else {
        RowStatus::Violation
    }
}

fn replay(q: &BoundQuery, kind: BoundKind) -> String {
    format!(
        "heatbound bound --thm {kind} --dim {} --m {} --rho-x {} --rho-y {} --dist {} --t {}",
        q.d,
        q.m,
        format_float(q.rho_x),
        format_float(q.rho_y),
        format_float(q.dist),
        format_float(q.t)
    )
}

/// Runs every sample against every domain of the configuration. Bounds are
/// computed once per sample and shared by all boundary conditions.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepReport> {
    let samples = draw_samples(config);
    let kinds = &config.bounds;
    let queries: Vec<Vec<BoundQuery>> = samples
        .iter()
        .map(|s| kinds.iter().map(|&k| query_for(config, s, k)).collect::<Result<_>>())
        .collect::<Result<_>>()?;
    let bounds: Vec<Vec<BoundCell>> = queries
        .par_iter()
        .map(|qs| qs.iter().zip(kinds).map(|(q, &k)| evaluate_bound(q, k)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;

    let jobs: Vec<(usize, usize)> =
        (0..config.domains.len()).flat_map(|d| (0..samples.len()).map(move |s| (d, s))).collect();
    let kernels = jobs
        .par_iter()
        .map(|&(d, s)| {
            let q = &queries[s][0];
            product_kernel(&config.domains[d], &samples[s].x, &samples[s].y, q.t)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut columns: Vec<String> = [
        "index", "domain", "d", "m", "x", "y", "rho_x", "rho_y", "dist", "t", "t_fraction", "kernel", "free",
        "exact_diff", "truncation_error",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    for k in kinds {
        let c = k.column();
        columns.extend([format!("bound_{c}"), format!("ln_bound_{c}"), format!("ratio_{c}")]);
    }
    columns.extend(["status".to_string(), "replay".to_string()]);
    let mut table = Table::new(columns);

    let mut summary = VerifySummary {
        rows: 0,
        passed: 0,
        violations: 0,
        tolerance_failures: 0,
        max_ratio: kinds.iter().map(|&k| (k, 0.0)).collect(),
    };
    let join = |v: &[f64]| v.iter().map(|&a| format_float(a)).collect::<Vec<_>>().join(";");
    for (index, (&(d, s), k)) in jobs.iter().zip(&kernels).enumerate() {
        let dom = &config.domains[d];
        let dirichlet = is_dirichlet(dom);
        let q0 = &queries[s][0];
        let exact = k.difference.abs();
        let mut row: Vec<Cell> = vec![
            index.into(),
            dom.label().into(),
            q0.d.into(),
            config.m.into(),
            join(&k.x).into(),
            join(&k.y).into(),
            k.rho_x.into(),
            k.rho_y.into(),
            q0.dist.into(),
            k.t.into(),
            samples[s].t_fraction.into(),
            k.value.into(),
            k.free.into(),
            exact.into(),
            k.truncation_error.into(),
        ];
        let mut status = RowStatus::Pass;
        let mut replay_cmd = String::new();
        for (i, &kind) in kinds.iter().enumerate() {
            if kind.dirichlet_only() && !dirichlet {
                row.extend([f64::NAN.into(), f64::NAN.into(), f64::NAN.into()]);
                continue;
            }
            let b = bounds[s][i];
            let ratio = if exact == 0.0 { 0.0 } else { (exact.ln() - b.ln_value).exp() };
            let st = classify(exact, k.truncation_error, b.ln_value);
            if st > RowStatus::Pass && replay_cmd.is_empty() {
                replay_cmd = replay(&queries[s][i], kind);
            }
            status = status.max(st);
            summary.max_ratio[i].1 = summary.max_ratio[i].1.max(ratio);
            row.extend([b.value.into(), b.ln_value.into(), ratio.into()]);
        }
        match status {
            RowStatus::Pass => summary.passed += 1,
            RowStatus::Tolerance => summary.tolerance_failures += 1,
            RowStatus::Violation => summary.violations += 1,
        }
        summary.rows += 1;
        row.extend([status.as_str().into(), replay_cmd.into()]);
        table.push(row);
    }
    Ok(SweepReport { table, summary })
}
