//! Parameter sweeps over the test families, with per-instance deficits,
//! certificate quantities and fitted log-log exponents.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::bodies::{self, ConvexPolytope};
use crate::error::{GeomError, Result};
use crate::inequalities::{self, loglog_slope};
use crate::measures::surface_area_measure;
use crate::rng::split_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// Isosceles triangles of height t over [-1, 1].
    Isosceles,
    /// Segments of length 2 with random points at distance <= delta.
    PerturbedSegment,
    /// Thin boxes of height h tilted by h, against a segment along e_n.
    ThinBox,
    /// The near-flat cross-polytopes with long axis lambda.
    Remark,
}

impl Family {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "isosceles" => Family::Isosceles,
            "perturbed-segment" => Family::PerturbedSegment,
            "thin-box" => Family::ThinBox,
            "remark" => Family::Remark,
            other => return Err(GeomError::InvalidParameter(format!("unknown family '{other}'"))),
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Isosceles => "isosceles",
            Family::PerturbedSegment => "perturbed-segment",
            Family::ThinBox => "thin-box",
            Family::Remark => "remark",
        }
    }
}

/// `steps` parameter values from `lo` to `hi`, linear or geometric.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
    pub log: bool,
}

impl Grid {
    /// Parse `a:b:n`.
    pub fn parse(s: &str, log: bool) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || GeomError::InvalidParameter(format!("grid must look like a:b:n, got '{s}'"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let lo: f64 = parts[0].parse().map_err(|_| bad())?;
        let hi: f64 = parts[1].parse().map_err(|_| bad())?;
        let steps: usize = parts[2].parse().map_err(|_| bad())?;
        let g = Grid { lo, hi, steps, log };
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> Result<()> {
        if !(self.lo > 0.0 && self.hi >= self.lo && self.hi.is_finite()) || self.steps == 0 {
            return Err(GeomError::InvalidParameter(
                "grid needs 0 < a <= b and n >= 1".into(),
            ));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.lo];
        }
        let k = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                let s = i as f64 / k;
                if self.log {
                    (self.lo.ln() + s * (self.hi.ln() - self.lo.ln())).exp()
                } else {
                    self.lo + s * (self.hi - self.lo)
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepOptions {
    pub dim: usize,
    pub seed: u64,
    pub tol: f64,
    pub eps0: f64,
    /// The fixed epsilon of the remark family.
    pub remark_eps: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            dim: 3,
            seed: 0,
            tol: inequalities::DEFAULT_TOL,
            eps0: inequalities::DEFAULT_EPS0,
            remark_eps: 0.01,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub index: usize,
    pub param: f64,
    pub eps: f64,
    pub tube_radius: Option<f64>,
    pub slab_width: Option<f64>,
    pub cos_deficit: Option<f64>,
    pub r: Option<f64>,
    /// w_M(e) (remark family).
    pub width_e: Option<f64>,
    /// H^{n-1}(M|e^perp) / V_{n-1}(M) (remark family).
    pub projection_ratio: Option<f64>,
    pub passed: bool,
    pub error: Option<String>,
}

impl SweepRow {
    fn empty(index: usize, param: f64) -> Self {
        SweepRow {
            index,
            param,
            eps: f64::NAN,
            tube_radius: None,
            slab_width: None,
            cos_deficit: None,
            r: None,
            width_e: None,
            projection_ratio: None,
            passed: false,
            error: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub family: Family,
    pub rows: Vec<SweepRow>,
    /// Fitted log-log exponents, e.g. `tube_vs_eps`.
    pub fitted: BTreeMap<String, Option<f64>>,
}

/// Segment [-L/2 e_n, L/2 e_n] perturbed by `delta`.
fn segment_along_last(n: usize, delta: f64, seed: u64) -> Result<ConvexPolytope> {
    let k = bodies::perturbed_segment(n, 2.0, delta, seed)?;
    let mut swap: Vec<Vec<f64>> = (0..n).map(|i| crate::linalg::unit_axis(n, i)).collect();
    swap.swap(0, n - 1);
    k.linear_image(&swap)
}

fn instance(family: Family, index: usize, param: f64, opts: &SweepOptions) -> SweepRow {
    let mut row = SweepRow::empty(index, param);
    if let Err(e) = fill(family, index, param, opts, &mut row) {
        row.passed = false;
        row.error = Some(e.to_string());
    }
    row
}

fn fill(family: Family, index: usize, param: f64, opts: &SweepOptions, row: &mut SweepRow) -> Result<()> {
    let n = opts.dim;
    let seed = split_seed(opts.seed, index as u64);
    match family {
        Family::Isosceles | Family::PerturbedSegment => {
            let k = if family == Family::Isosceles {
                bodies::isosceles(param)?
            } else {
                bodies::perturbed_segment(n, 2.0, param, seed)?
            };
            let c = inequalities::linhart_certificate(&k, opts.tol)?;
            row.eps = c.deficit;
            row.tube_radius = Some(c.tube_radius);
            row.passed = c.passed();
        }
        Family::ThinBox => {
            let m = bodies::thin_box(n, param, param)?;
            let k = segment_along_last(n, param * param, seed)?;
            let c = inequalities::reverse_certificate(&k, &m, opts.eps0, opts.tol)?;
            row.eps = c.deficit;
            row.tube_radius = Some(c.tube_radius);
            row.slab_width = c.slab_width;
            row.cos_deficit = c.cos_ev.map(|x| 1.0 - x);
            row.r = c.r;
            row.passed = c.passed();
        }
        Family::Remark => {
            let eps = opts.remark_eps;
            let m = bodies::remark_body(n, param, eps)?;
            let e = bodies::remark_direction(n, eps)?;
            let s = surface_area_measure(&m)?;
            let ratio = s.integrate_abs_cos(&e)? / s.total_mass();
            let p = inequalities::surface_stability_check(&m, &e, eps, opts.tol)?;
            row.eps = eps;
            row.projection_ratio = Some(ratio);
            row.width_e = Some(m.width(&e)?);
            row.slab_width = Some(p.slab_width);
            row.cos_deficit = Some(1.0 - p.cos_ev);
            row.r = Some(p.r);
            let remark_ok = p.r > 1.0 && p.r < n as f64 && ratio >= 1.0 - eps;
            row.passed = remark_ok && p.bound_checks.iter().all(|c| c.pass != Some(false));
        }
    }
    Ok(())
}

/// Run a family over a grid; instances run in parallel, rows come back in
/// grid order.
pub fn run_sweep(family: Family, grid: &Grid, opts: &SweepOptions) -> Result<SweepResult> {
    grid.validate()?;
    if family == Family::Isosceles && opts.dim != 2 {
        return Err(GeomError::InvalidParameter("the isosceles family lives in the plane (dim 2)".into()));
    }
    let rows: Vec<SweepRow> = grid
        .values()
        .into_par_iter()
        .enumerate()
        .map(|(i, p)| instance(family, i, p, opts))
        .collect();
    let ok: Vec<&SweepRow> = rows.iter().filter(|r| r.error.is_none()).collect();
    let col = |f: fn(&SweepRow) -> Option<f64>| -> Vec<f64> { ok.iter().map(|r| f(r).unwrap_or(f64::NAN)).collect() };
    let eps: Vec<f64> = ok.iter().map(|r| r.eps).collect();
    let mut fitted = BTreeMap::new();
    match family {
        Family::Isosceles | Family::PerturbedSegment => {
            fitted.insert("tube_vs_eps".into(), loglog_slope(&eps, &col(|r| r.tube_radius)));
        }
        Family::ThinBox => {
            fitted.insert("slab_vs_eps".into(), loglog_slope(&eps, &col(|r| r.slab_width)));
            fitted.insert("cos_deficit_vs_eps".into(), loglog_slope(&eps, &col(|r| r.cos_deficit)));
        }
        Family::Remark => {
            let lam: Vec<f64> = ok.iter().map(|r| r.param).collect();
            fitted.insert("width_vs_lambda".into(), loglog_slope(&lam, &col(|r| r.width_e)));
        }
    }
    Ok(SweepResult { family, rows, fitted })
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v:?}")).unwrap_or_default()
}

impl SweepResult {
    pub fn all_passed(&self) -> bool {
        self.rows.iter().all(|r| r.passed)
    }

    /// CSV with a header, one row per instance and a trailing summary row
    /// carrying the fitted exponents.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "family,index,param,eps,tube_radius,slab_width,cos_deficit,r,width_e,projection_ratio,passed,error\n",
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{:?},{:?},{},{},{},{},{},{},{},{}",
                self.family.name(),
                r.index,
                r.param,
                r.eps,
                opt(r.tube_radius),
                opt(r.slab_width),
                opt(r.cos_deficit),
                opt(r.r),
                opt(r.width_e),
                opt(r.projection_ratio),
                r.passed,
                r.error.as_deref().unwrap_or("").replace([',', '\n'], ";")
            );
        }
        let summary: Vec<String> = self
            .fitted
            .iter()
            .map(|(k, v)| format!("{k}={}", opt(*v)))
            .collect();
        let _ = writeln!(out, "{},summary,,,,,,,,,{},{}", self.family.name(), self.all_passed(), summary.join(";"));
        out
    }
}
