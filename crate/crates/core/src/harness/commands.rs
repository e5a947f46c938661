//! Table-producing commands: constants, cutoffs, single bounds, the van den
//! Berg comparison and the spectrum cache.

use std::fs;
use std::path::{Path, PathBuf};

use super::config::log_spaced;
use super::{BoundKind, Cell, Table};
use crate::bounds::{
    dirichlet_green_bound, free_kernel, neumann_theorem41_bound, theorem11_bound, theorem22_bound, vdb_bound,
    BoundQuery, JmBound, NeumannTraceInputs, VdBParams, VdbVariant,
};
use crate::constants::{compute_constants, free_green_diag, min_order, DimensionParams};
use crate::cutoff::interpolating_cutoff;
use crate::error::{Error, Result};
use crate::spectrum::{build_spectrum, SpectrumTable};

/// Environment variable naming the spectrum cache directory.
pub const SPECTRUM_CACHE_ENV: &str = "HEATBOUND_CACHE_DIR";

/// C_d^(1..6), m_d and the free Green diagonal for one (d, m).
pub fn constants_table(d: u32, m: Option<u32>) -> Result<Table> {
    let p = match m {
        Some(m) => DimensionParams::new(d, m)?,
        None => DimensionParams::with_default_order(d)?,
    };
    let c = compute_constants(p);
    let mut t = Table::new(["d", "m", "m_d", "c1", "c2", "c3", "c4", "c5", "c6", "free_green_diag"]);
    t.push(vec![
        p.d.into(),
        p.m.into(),
        p.m_d.into(),
        c.c1.into(),
        c.c2.into(),
        c.c3.into(),
        c.c4.into(),
        c.c5.into(),
        c.c6.into(),
        free_green_diag(p).into(),
    ]);
    Ok(t)
}

/// P_n and its derivative sup-norms M_0..M_n for n = 1..=n_max.
pub fn cutoff_table(n_max: usize) -> Result<Table> {
    if n_max == 0 {
        return Err(Error::domain("cutoff_table", "n must be >= 1"));
    }
    let mut t = Table::new(["n", "polynomial", "j", "sup_norm"]);
    for n in 1..=n_max {
        let c = interpolating_cutoff(n)?;
        let poly = c.base_polynomial().to_string();
        for (j, &m) in c.sup_norms().iter().enumerate() {
            t.push(vec![n.into(), poly.clone().into(), j.into(), m.into()]);
        }
    }
    Ok(t)
}

fn jm_cells(b: &JmBound, t: f64) -> Vec<Cell> {
    vec![
        b.prefactor.into(),
        b.jm.laurent_value.into(),
        b.jm.exponent.into(),
        b.jm_value.into(),
        (1.0 / (2.0 * (std::f64::consts::PI * t).sqrt())).into(),
    ]
}

const JM_COLUMNS: [&str; 5] = ["prefactor", "jm_laurent", "jm_exponent", "jm_value", "time_factor"];

/// One bound with its factor breakdown. `delta` is needed by `vdb-hull`
/// and `trace` by `neumann41`.
pub fn bound_report(
    kind: BoundKind,
    q: &BoundQuery,
    delta: Option<f64>,
    trace: Option<&NeumannTraceInputs>,
) -> Result<Table> {
    let mut q = *q;
    if kind == BoundKind::Thm11 {
        q.m = min_order(q.d);
    }
    let mut columns: Vec<&str> = vec!["thm", "d", "m", "rho_x", "rho_y", "dist", "t", "value", "ln_value"];
    let mut row: Vec<Cell> = vec![
        kind.name().into(),
        q.d.into(),
        q.m.into(),
        q.rho_x.into(),
        q.rho_y.into(),
        q.dist.into(),
        q.t.into(),
    ];
    let (value, ln_value, extra_cols, extra): (f64, f64, Vec<&str>, Vec<Cell>) = match kind {
        BoundKind::Thm11 => {
            let b = theorem11_bound(&q)?;
            let mut cols = JM_COLUMNS.to_vec();
            cols.extend(["alpha", "c1_display", "c2_display"]);
            let mut cells = jm_cells(&b.bound, q.t);
            cells.extend([b.alpha.into(), b.c1.into(), b.c2.into()]);
            (b.bound.value, b.bound.ln_value, cols, cells)
        }
        BoundKind::Thm22 | BoundKind::Dirichlet => {
            let b = if kind == BoundKind::Thm22 { theorem22_bound(&q)? } else { dirichlet_green_bound(&q)? };
            (b.value, b.ln_value, JM_COLUMNS.to_vec(), jm_cells(&b, q.t))
        }
        BoundKind::VdbHull | BoundKind::VdbDiag | BoundKind::VdbOffdiag => {
            let variant = match kind {
                BoundKind::VdbHull => VdbVariant::Hull,
                BoundKind::VdbDiag => VdbVariant::Diag,
                _ => VdbVariant::Offdiag,
            };
            let b = vdb_bound(&q, delta.map(|delta| VdBParams { delta }), variant)?;
            (b.value, b.ln_value, vec!["delta"], vec![delta.unwrap_or(f64::NAN).into()])
        }
        BoundKind::Neumann41 => {
            let inputs = trace.ok_or_else(|| Error::domain("bound_report", "neumann41 needs trace data"))?;
            let b = neumann_theorem41_bound(&q, inputs)?;
            let mut cols = JM_COLUMNS.to_vec();
            cols.extend(["n_d", "n_trace_integral_term", "n_free_green_term", "n_trace_one_term"]);
            let mut cells = jm_cells(&b.bound, q.t);
            cells.extend([b.n_d.into(), b.summands[0].into(), b.summands[1].into(), b.summands[2].into()]);
            (b.bound.value, b.bound.ln_value, cols, cells)
        }
    };
    row.extend([value.into(), ln_value.into()]);
    row.extend(extra);
    columns.extend(extra_cols);
    let mut t = Table::new(columns);
    t.push(row);
    Ok(t)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompareOptions {
    pub d: u32,
    pub rho: f64,
    /// Range of t/ρ² to tabulate.
    pub t_min_fraction: f64,
    pub t_max_fraction: f64,
    pub points: usize,
}

impl CompareOptions {
    pub fn new(d: u32, rho: f64) -> Self {
        CompareOptions { d, rho, t_min_fraction: 1e-14, t_max_fraction: 0.125, points: 53 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareReport {
    pub table: Table,
    /// Largest t/ρ² at which ln(thm11) - ln(hull bound) changes sign.
    pub crossover: Option<f64>,
    /// Whether some tabulated t has thm11 strictly below the hull bound.
    pub improvement_found: bool,
}

/// ln(thm11 bound) - ln(hull bound) on the diagonal with
/// δ = ρ.
/// Returns (ln thm11, ln hull bound, their difference); the
/// difference is formed from the separated exponents so it stays accurate
/// when both logarithms are huge.
fn ln_ratio(d: u32, rho: f64, t: f64) -> Result<(f64, f64, f64)> {
    let q = BoundQuery::diagonal(d, rho, t)?;
    let a = theorem11_bound(&q)?.bound;
    let b = vdb_bound(&q, Some(VdBParams { delta: rho }), VdbVariant::Hull)?;
    let diff = (a.ln_scale - b.ln_scale) + (a.exponent - b.exponent);
    Ok((a.ln_value, b.ln_value, diff))
}

/// Tabulates the diagonal thm11 bound against the hull bound. The
/// column `ln_reference` is ln((4πt)^{-d/2} e^{-ρ²/t}), the exact half-space
/// Dirichlet deviation, shown for orientation.
pub fn compare(opts: &CompareOptions) -> Result<CompareReport> {
    let CompareOptions { d, rho, t_min_fraction, t_max_fraction, points } = *opts;
    if !(t_min_fraction > 0.0 && t_max_fraction >= t_min_fraction && t_max_fraction <= 0.5) || points == 0 {
        return Err(Error::domain(
            "compare",
            format!("need 0 < t_min <= t_max <= 1/2 (as t/rho^2) and points >= 1, got [{t_min_fraction}, {t_max_fraction}], {points}"),
        ));
    }
    let fractions = log_spaced(t_min_fraction, t_max_fraction, points);
    let mut table = Table::new([
        "t_over_rho2", "t", "ln_thm11", "ln_vdb_hull", "ln_ratio", "thm11_below_vdb", "ln_reference",
    ]);
    let mut diffs = Vec::with_capacity(points);
    for &f in &fractions {
        let t = f * rho * rho;
        let (a, b, diff) = ln_ratio(d, rho, t)?;
        let reference = free_kernel(d, 0.0, 1.0).ln() - d as f64 / 2.0 * t.ln() - rho * rho / t;
        diffs.push(diff);
        table.push(vec![f.into(), t.into(), a.into(), b.into(), diff.into(), (diff < 0.0).into(), reference.into()]);
    }
    let improvement_found = diffs.iter().any(|&r| r < 0.0);
    let mut crossover = None;
    for i in (1..points).rev() {
        if diffs[i - 1].signum() != diffs[i].signum() {
            let f = |lf: f64| ln_ratio(d, rho, lf.exp() * rho * rho).map(|r| r.2);
            let (mut lo, mut hi) = (fractions[i - 1].ln(), fractions[i].ln());
            let lo_sign = diffs[i - 1].signum();
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if f(mid)?.signum() == lo_sign {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            crossover = Some((0.5 * (lo + hi)).exp());
            break;
        }
    }
    Ok(CompareReport { table, crossover, improvement_found })
}

pub fn spectrum_cache_path(dir: &Path, d: u32, lambda_max: f64) -> PathBuf {
    dir.join(format!("neumann-ball-d{d}-lambda{lambda_max}.csv"))
}

/// Loads the table from `cache_dir` when present, otherwise builds it and
/// stores it there. Returns the table and whether it came from the cache.
pub fn load_or_build_spectrum(d: u32, lambda_max: f64, cache_dir: Option<&Path>) -> Result<(SpectrumTable, bool)> {
    let Some(dir) = cache_dir else {
        return Ok((build_spectrum(d, lambda_max)?, false));
    };
    let path = spectrum_cache_path(dir, d, lambda_max);
    if path.exists() {
        let table = SpectrumTable::read_csv(fs::File::open(&path)?).map_err(|e| match e {
            Error::Config { line, msg } => Error::Config { line, msg: format!("{}: {msg}", path.display()) },
            other => other,
        })?;
        if table.dimension() != d || table.lambda_max() != lambda_max {
            return Err(Error::Config { line: 2, msg: format!("{} does not match d = {d}, lambda_max = {lambda_max}", path.display()) });
        }
        return Ok((table, true));
    }
    let table = build_spectrum(d, lambda_max)?;
    fs::create_dir_all(dir)?;
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    table.write_csv(fs::File::create(&tmp)?)?;
    fs::rename(&tmp, &path)?;
    Ok((table, false))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn float(t: &Table, col: &str) -> f64 {
        match t.rows[0][t.column(col).unwrap()] {
            Cell::Float(v) => v,
            ref other => panic!("{other:?}"),
        }
    }

    #[test]
    fn constants_rows() {
        let t = constants_table(2, None).unwrap();
        assert!((float(&t, "c1") - 1.0 / (4.0 * PI)).abs() < 1e-16);
        let t5 = constants_table(5, None).unwrap();
        assert_eq!(t5.rows[0][t5.column("m_d").unwrap()], Cell::Int(3));
        assert_eq!(t5.to_csv().unwrap(), constants_table(5, None).unwrap().to_csv().unwrap());
        assert!(constants_table(1, None).is_err());
        assert!(constants_table(4, Some(2)).is_err());
    }

    #[test]
    fn cutoff_rows() {
        let t = cutoff_table(2).unwrap();
        assert_eq!(t.rows.len(), 2 + 3);
        assert_eq!(t.rows[0][1], Cell::Text("3s^2 - 2s^3".into()));
    }

    #[test]
    fn bound_breakdown_multiplies_out() {
        let q = BoundQuery::new(2, 1.0, 1.0, 0.0, 0.4).unwrap();
        let t = bound_report(BoundKind::Thm11, &q, None, None).unwrap();
        let v = float(&t, "value");
        assert!(v > 0.0);
        let prod = float(&t, "prefactor") * float(&t, "jm_laurent") * float(&t, "jm_exponent").exp() * float(&t, "time_factor");
        assert!(((prod - v) / v).abs() < 1e-13);
        let late = BoundQuery { t: 0.6, ..q };
        let e = bound_report(BoundKind::Thm11, &late, None, None).unwrap_err();
        assert!(e.to_string().contains("t > R^2/8"), "{e}");
        let diag = bound_report(BoundKind::VdbDiag, &BoundQuery { t: 1.0, ..q }, Some(1.0), None).unwrap();
        assert!((float(&diag, "value") - 1.0 / PI * (-0.5f64).exp()).abs() < 1e-15);
        assert!(bound_report(BoundKind::Neumann41, &q, None, None).is_err());
    }

    #[test]
    fn compare_in_two_dimensions_runs() {
        let r = compare(&CompareOptions { points: 5, ..CompareOptions::new(2, 1.0) }).unwrap();
        assert_eq!(r.table.rows.len(), 5);
    }

    #[test]
    fn spectrum_cache_round_trip() {
        let dir = std::env::temp_dir().join(format!("heatbound-cache-test-{}", std::process::id()));
        let (a, hit) = load_or_build_spectrum(2, 150.0, Some(&dir)).unwrap();
        assert!(!hit);
        let (b, hit) = load_or_build_spectrum(2, 150.0, Some(&dir)).unwrap();
        assert!(hit);
        assert_eq!(a, b);
        fs::remove_dir_all(&dir).unwrap();
    }
}
