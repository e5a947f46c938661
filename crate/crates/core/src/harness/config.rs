//! Sweep configuration files.
//!
//! A sweep file is TOML with four sections:
//!
//! ```toml
//! [domain]
//! kind = "half-space"          # or "box" (the unit cube)
//! dim = 2
//! bcs = ["D", "N", "R:1"]      # half-space: D, N or R:<sigma>
//!                              # box: 2*dim letters, left/right per axis, or "all"
//! [sampling]
//! mode = "random"              # or "grid"
//! samples = 500                # random: (x, y, t) samples per boundary condition
//! seed = 7                     # required for random sampling
//! grid_points = 3              # grid: lattice points per axis
//! [time]
//! points = 8                   # log-spaced fractions of R^2/8
//! min_fraction = 0.008
//! [bounds]
//! select = ["11", "dirichlet"]
//! m = 3                        # order for "22" (defaults to m_d)
//! [output]
//! format = "csv"
//! ```

use serde::Deserialize;

use super::{BoundKind, Format};
use crate::constants::{min_order, DimensionParams};
use crate::error::{Error, Result};
use crate::kernels::{Bc, SeparableDomain};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Geometry {
    /// {x_d > 0}; the normal coordinate is sampled in [rho_lo, rho_hi] and
    /// the others in [-1, 1].
    HalfSpace { dim: usize, rho_lo: f64, rho_hi: f64 },
    /// (0, 1)^dim; coordinates are sampled in [margin, 1 - margin].
    UnitBox { dim: usize, margin: f64 },
}

impl Geometry {
    pub fn dim(&self) -> usize {
        match *self {
            Geometry::HalfSpace { dim, .. } | Geometry::UnitBox { dim, .. } => dim,
        }
    }

    /// Sampling range of coordinate `i`.
    pub(crate) fn range(&self, i: usize) -> (f64, f64) {
        match *self {
            Geometry::HalfSpace { dim, rho_lo, rho_hi } if i + 1 == dim => (rho_lo, rho_hi),
            Geometry::HalfSpace { .. } => (-1.0, 1.0),
            Geometry::UnitBox { margin, .. } => (margin, 1.0 - margin),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sampling {
    Random { samples: usize, seed: u64 },
    Grid { points_per_axis: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub geometry: Geometry,
    /// One domain per boundary-condition choice, all on the same geometry.
    pub domains: Vec<SeparableDomain>,
    pub sampling: Sampling,
    pub t_fractions: Vec<f64>,
    pub bounds: Vec<BoundKind>,
    pub m: u32,
    pub format: Format,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    domain: RawDomain,
    sampling: RawSampling,
    #[serde(default)]
    time: RawTime,
    bounds: RawBounds,
    #[serde(default)]
    output: RawOutput,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDomain {
    kind: String,
    dim: usize,
    bcs: Vec<String>,
    rho_min: Option<f64>,
    rho_max: Option<f64>,
    margin: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSampling {
    mode: String,
    samples: Option<usize>,
    seed: Option<u64>,
    grid_points: Option<usize>,
}

#[derive(Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawTime {
    points: usize,
    min_fraction: f64,
}

impl Default for RawTime {
    fn default() -> Self {
        RawTime { points: 8, min_fraction: 8e-3 }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBounds {
    select: Vec<String>,
    m: Option<u32>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    format: Option<String>,
}

/// 1-based line of the first line assigning `key`, for error messages.
fn line_of(text: &str, key: &str) -> usize {
    text.lines()
        .position(|l| {
            let l = l.trim_start();
            l.strip_prefix(key).is_some_and(|rest| rest.trim_start().starts_with('='))
        })
        .map_or(1, |i| i + 1)
}

fn line_from_offset(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

pub(crate) fn parse_half_space_bc(s: &str) -> Option<Bc> {
    match s {
        "D" => Some(Bc::Dirichlet),
        "N" => Some(Bc::Neumann),
        _ => s.strip_prefix("R:").and_then(|v| v.parse().ok()).map(Bc::Robin),
    }
}

/// Every assignment of D/N to the 2·dim faces of the box.
fn all_face_mixtures(dim: usize) -> Vec<Vec<(Bc, Bc)>> {
    let letter = |bit: usize| if bit == 0 { Bc::Dirichlet } else { Bc::Neumann };
    (0..1usize << (2 * dim))
        .map(|mask| (0..dim).map(|i| (letter(mask >> (2 * i) & 1), letter(mask >> (2 * i + 1) & 1))).collect())
        .collect()
}

fn parse_faces(s: &str, dim: usize) -> Option<Vec<(Bc, Bc)>> {
    let letters: Vec<Bc> = s
        .chars()
        .map(|c| match c {
            'D' => Some(Bc::Dirichlet),
            'N' => Some(Bc::Neumann),
            _ => None,
        })
        .collect::<Option<_>>()?;
    (letters.len() == 2 * dim).then(|| letters.chunks(2).map(|p| (p[0], p[1])).collect())
}

impl SweepConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config {
            line: e.span().map_or(1, |s| line_from_offset(text, s.start)),
            msg: e.message().to_string(),
        })?;
        let err = |key: &str, msg: String| Error::Config { line: line_of(text, key), msg };

        let dim = raw.domain.dim;
        if !(2..=8).contains(&dim) {
            return Err(err("dim", format!("dim must be between 2 and 8, got {dim}")));
        }
        let (geometry, domains) = match raw.domain.kind.as_str() {
            "half-space" => {
                let rho_lo = raw.domain.rho_min.unwrap_or(0.05);
                let rho_hi = raw.domain.rho_max.unwrap_or(2.0);
                if !(rho_lo > 0.0 && rho_hi > rho_lo && rho_hi.is_finite()) {
                    return Err(err("rho_min", format!("need 0 < rho_min < rho_max, got [{rho_lo}, {rho_hi}]")));
                }
                let mut domains = Vec::new();
                for s in &raw.domain.bcs {
                    let bc = parse_half_space_bc(s)
                        .ok_or_else(|| err("bcs", format!("bad half-space condition {s:?} (use D, N or R:<sigma>)")))?;
                    domains.push(SeparableDomain::half_space(dim, bc).map_err(|e| err("bcs", e.to_string()))?);
                }
                (Geometry::HalfSpace { dim, rho_lo, rho_hi }, domains)
            }
            "box" => {
                let margin = raw.domain.margin.unwrap_or(0.01);
                if !(margin > 0.0 && margin < 0.5) {
                    return Err(err("margin", format!("margin must lie in (0, 0.5), got {margin}")));
                }
                let mut faces = Vec::new();
                for s in &raw.domain.bcs {
                    if s == "all" {
                        faces.extend(all_face_mixtures(dim));
                    } else {
                        faces.push(parse_faces(s, dim).ok_or_else(|| {
                            err("bcs", format!("bad face string {s:?}: need {} letters from D/N", 2 * dim))
                        })?);
                    }
                }
                let domains = faces
                    .iter()
                    .map(|f| SeparableDomain::unit_box(f).map_err(|e| err("bcs", e.to_string())))
                    .collect::<Result<Vec<_>>>()?;
                (Geometry::UnitBox { dim, margin }, domains)
            }
            other => return Err(err("kind", format!("unknown domain kind {other:?} (half-space or box)"))),
        };
        if domains.is_empty() {
            return Err(err("bcs", "at least one boundary condition is required".into()));
        }

        let sampling = match raw.sampling.mode.as_str() {
            "random" => Sampling::Random {
                samples: raw.sampling.samples.filter(|&n| n > 0).ok_or_else(|| {
                    err("mode", "random sampling needs samples > 0".into())
                })?,
                seed: raw
                    .sampling
                    .seed
                    .ok_or_else(|| err("mode", "random sampling needs a seed".into()))?,
            },
            "grid" => Sampling::Grid {
                points_per_axis: raw
                    .sampling
                    .grid_points
                    .filter(|&n| n > 0)
                    .ok_or_else(|| err("mode", "grid sampling needs grid_points > 0".into()))?,
            },
            other => return Err(err("mode", format!("unknown sampling mode {other:?} (random or grid)"))),
        };

        let time = raw.time;
        if time.points == 0 || !(time.min_fraction > 0.0 && time.min_fraction <= 1.0) {
            return Err(err(
                "min_fraction",
                format!("need points >= 1 and 0 < min_fraction <= 1, got {} and {}", time.points, time.min_fraction),
            ));
        }
        let t_fractions = log_spaced(time.min_fraction, 1.0, time.points);

        let mut bounds = Vec::new();
        for s in &raw.bounds.select {
            let k: BoundKind = s.parse().map_err(|e: Error| err("select", e.to_string()))?;
            if matches!(k, BoundKind::VdbDiag | BoundKind::VdbOffdiag | BoundKind::Neumann41) {
                return Err(err("select", format!("bound {k} has no oracle in sweeps (use 11, 22, dirichlet or vdb-hull)")));
            }
            bounds.push(k);
        }
        if bounds.is_empty() {
            return Err(err("select", "select at least one bound".into()));
        }
        let m = raw.bounds.m.unwrap_or(min_order(dim as u32));
        DimensionParams::new(dim as u32, m).map_err(|e| err("m", e.to_string()))?;

        let format = match raw.output.format {
            Some(f) => f.parse().map_err(|e: Error| err("format", e.to_string()))?,
            None => Format::Csv,
        };
        Ok(SweepConfig { geometry, domains, sampling, t_fractions, bounds, m, format })
    }
}

/// `n` points from `lo` to `hi`, equally spaced in log; `hi` when n = 1.
pub(crate) fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![hi];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}
