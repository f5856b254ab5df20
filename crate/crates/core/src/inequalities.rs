//! Checkers for the inequalities between mixed volumes, intrinsic volumes
//! and the circumradius, and certificates for their stability versions:
//! when a deficit is small, the concrete segment, tube, direction and slab
//! whose existence the stability statements promise.

use serde::Serialize;

use crate::bodies::{ConvexPolytope, Direction};
use crate::error::{check_dim, GeomError, Result};
use crate::functionals::{self, circumradius, mixed_volume_1, surface_area, v1, volume};
use crate::linalg::{self, dot, sub};
use crate::measures::surface_area_measure;
use crate::spherical::PaperConstants;

/// Default tolerance on deficits.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Absolute tolerance of the geometric equality-witness conditions.
pub const WITNESS_TOL: f64 = 1e-9;
/// Default admissible deficit for the reverse Minkowski certificate.
pub const DEFAULT_EPS0: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InequalityName {
    Minkowski,
    BetkeWeil,
    BetkeWeilSelf,
    ReverseMinkowski,
    Linhart,
    SurfaceStability,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityReport {
    pub name: InequalityName,
    pub lhs: f64,
    pub rhs: f64,
    /// Multiplicative gap to equality in the inequality's own normalisation.
    pub deficit: f64,
    pub satisfied: bool,
    pub tolerance: f64,
    pub equality_witness: Option<String>,
}

impl InequalityReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serialises")
    }
}

fn report(name: InequalityName, lhs: f64, rhs: f64, deficit: f64, tol: f64, witness: Option<&str>) -> InequalityReport {
    InequalityReport {
        name,
        lhs,
        rhs,
        deficit,
        satisfied: deficit >= -tol,
        tolerance: tol,
        equality_witness: witness.map(str::to_string),
    }
}

/// epsilon with lhs = (1 - epsilon) rhs; zero when both sides vanish.
fn upper_deficit(lhs: f64, rhs: f64) -> f64 {
    if rhs == 0.0 {
        if lhs == 0.0 {
            0.0
        } else {
            -f64::INFINITY
        }
    } else {
        1.0 - lhs / rhs
    }
}

/// Unit direction of a 1-dimensional body.
fn segment_direction(p: &ConvexPolytope) -> Vec<f64> {
    p.affine_basis()[0].clone()
}

/// V(K, M[n-1])^n >= V(K) V(M)^{n-1}; deficit lhs/rhs - 1.
pub fn check_minkowski(k: &ConvexPolytope, m: &ConvexPolytope, tol: f64) -> Result<InequalityReport> {
    check_dim(k.dim(), m.dim())?;
    let n = k.dim() as i32;
    let lhs = mixed_volume_1(k, m)?.powi(n);
    let rhs = volume(k) * volume(m).powi(n - 1);
    let deficit = if rhs == 0.0 { lhs } else { lhs / rhs - 1.0 };
    let full = k.affine_dim() == k.dim() && m.affine_dim() == m.dim();
    let witness = (full && deficit.abs() < tol).then_some("homothetic");
    Ok(report(InequalityName::Minkowski, lhs, rhs, deficit, tol, witness))
}

fn require_plane(k: &ConvexPolytope) -> Result<()> {
    if k.dim() != 2 {
        return Err(GeomError::InvalidParameter(format!(
            "this inequality is planar, got dimension {}",
            k.dim()
        )));
    }
    Ok(())
}

/// V(K, M) <= F(K) F(M) / 8 in the plane.
pub fn check_betke_weil(k: &ConvexPolytope, m: &ConvexPolytope, tol: f64) -> Result<InequalityReport> {
    require_plane(k)?;
    check_dim(2, m.dim())?;
    let lhs = mixed_volume_1(k, m)?;
    let rhs = surface_area(k)? * surface_area(m)? / 8.0;
    let deficit = upper_deficit(lhs, rhs);
    let orthogonal = k.affine_dim() == 1
        && m.affine_dim() == 1
        && dot(&segment_direction(k), &segment_direction(m)).abs() <= WITNESS_TOL;
    let witness = (orthogonal && deficit.abs() < tol).then_some("orthogonal segments");
    Ok(report(InequalityName::BetkeWeil, lhs, rhs, deficit, tol, witness))
}

/// V(K, -K) <= (sqrt 3 / 18) F(K)^2 in the plane.
pub fn check_betke_weil_self(k: &ConvexPolytope, tol: f64) -> Result<InequalityReport> {
    require_plane(k)?;
    let lhs = mixed_volume_1(k, &k.negate())?;
    let f = surface_area(k)?;
    let rhs = 3f64.sqrt() / 18.0 * f * f;
    let deficit = upper_deficit(lhs, rhs);
    let witness = (k.vertices().len() == 3 && deficit.abs() < tol).then_some("equilateral triangle");
    Ok(report(InequalityName::BetkeWeilSelf, lhs, rhs, deficit, tol, witness))
}

/// V(K, M[n-1]) <= V_1(K) V_{n-1}(M) / n.
pub fn check_reverse_minkowski(k: &ConvexPolytope, m: &ConvexPolytope, tol: f64) -> Result<InequalityReport> {
    check_dim(k.dim(), m.dim())?;
    let n = k.dim();
    let lhs = mixed_volume_1(k, m)?;
    let rhs = v1(k)? * functionals::v_nminus1(m)? / n as f64;
    let deficit = upper_deficit(lhs, rhs);
    let orthogonal = k.affine_dim() == 1
        && m.affine_dim() + 1 == n
        && dot(&segment_direction(k), &m.affine_normals()[0]).abs() >= 1.0 - WITNESS_TOL;
    let witness = (orthogonal && deficit.abs() < tol).then_some("segment orthogonal to hyperplane body");
    Ok(report(InequalityName::ReverseMinkowski, lhs, rhs, deficit, tol, witness))
}

/// V_1(K) >= 2 R(K); deficit epsilon with V_1 = (2 + epsilon) R.
pub fn check_linhart(k: &ConvexPolytope, tol: f64) -> Result<InequalityReport> {
    if k.affine_dim() == 0 {
        return Ok(report(InequalityName::Linhart, 0.0, 0.0, 0.0, tol, Some("point")));
    }
    let lhs = v1(k)?;
    let r = circumradius(k);
    let deficit = lhs / r - 2.0;
    let witness = (k.affine_dim() == 1).then_some("segment");
    Ok(report(InequalityName::Linhart, lhs, 2.0 * r, deficit, tol, witness))
}

/// One recorded comparison. `pass` is None for purely informational
/// ratios against constants that have no explicit value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: Option<bool>,
}

impl BoundCheck {
    fn le(name: &str, lhs: f64, rhs: f64, slack: f64) -> Self {
        BoundCheck {
            name: name.into(),
            lhs,
            rhs,
            pass: Some(lhs <= rhs + slack),
        }
    }

    fn ge(name: &str, lhs: f64, rhs: f64, slack: f64) -> Self {
        BoundCheck {
            name: name.into(),
            lhs,
            rhs,
            pass: Some(lhs >= rhs - slack),
        }
    }

    fn info(name: &str, lhs: f64, rhs: f64) -> Self {
        BoundCheck {
            name: name.into(),
            lhs,
            rhs,
            pass: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateKind {
    Linhart,
    Reverse,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityCertificate {
    pub kind: CertificateKind,
    pub deficit: f64,
    pub segment_endpoints: [Vec<f64>; 2],
    /// Direction of the segment.
    pub e: Direction,
    pub tube_radius: f64,
    pub v: Option<Direction>,
    /// w_M(v).
    pub slab_width: Option<f64>,
    /// Inradius of the projection M | e^perp.
    pub r: Option<f64>,
    pub cos_ev: Option<f64>,
    pub bound_checks: Vec<BoundCheck>,
}

impl StabilityCertificate {
    /// True when no check with a verdict failed.
    pub fn passed(&self) -> bool {
        self.bound_checks.iter().all(|c| c.pass != Some(false))
    }

    pub fn check(&self, name: &str) -> Option<&BoundCheck> {
        self.bound_checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("certificate serialises")
    }
}

/// Distance from `x` to the line through `a` with unit direction `e`.
fn dist_to_line(x: &[f64], a: &[f64], e: &[f64]) -> f64 {
    let d = sub(x, a);
    let t = dot(&d, e);
    (dot(&d, &d) - t * t).max(0.0).sqrt()
}

/// Segment, tube and checks for a body with small Linhart deficit.
pub fn linhart_certificate(k: &ConvexPolytope, tol: f64) -> Result<StabilityCertificate> {
    let rep = check_linhart(k, tol)?;
    let consts = PaperConstants::compute(k.dim())?;
    linhart_from_deficit(k, rep.deficit.max(0.0), &consts, tol)
}

fn linhart_from_deficit(
    k: &ConvexPolytope,
    eps: f64,
    consts: &PaperConstants,
    tol: f64,
) -> Result<StabilityCertificate> {
    if k.affine_dim() == 0 {
        return Err(GeomError::Precondition("body is a point; no segment to certify".into()));
    }
    let admissible = consts.c3_est.min(0.5);
    if eps > admissible {
        return Err(GeomError::Precondition(format!(
            "Linhart deficit {eps:.6e} exceeds the admissible bound min(c3, 1/2) = {admissible:.6e}"
        )));
    }
    let r = circumradius(k);
    let (len, i, j) = k.diameter_pair();
    let (y1, y2) = (k.vertices()[i].clone(), k.vertices()[j].clone());
    let e = Direction::new(sub(&y2, &y1))?;
    let tube = k
        .vertices()
        .iter()
        .map(|x| dist_to_line(x, &y1, &e))
        .fold(0.0, f64::max);
    let c3 = consts.c3_est;
    let slack = tol * r;
    let checks = vec![
        BoundCheck::ge("segment_length", len, (2.0 - (eps / c3).powi(2)) * r, slack),
        BoundCheck::le(
            "tube_radius",
            tube,
            ((5.0 / (2.0 * c3 * c3) + 3.0) * eps).sqrt() * r,
            slack,
        ),
        BoundCheck::le("tube_radius_final", tube, consts.tube_factor * eps.sqrt() * r, slack),
    ];
    Ok(StabilityCertificate {
        kind: CertificateKind::Linhart,
        deficit: eps,
        segment_endpoints: [y1, y2],
        e,
        tube_radius: tube,
        v: None,
        slab_width: None,
        r: None,
        cos_ev: None,
        bound_checks: checks,
    })
}

/// Outcome of the surface-measure stability check for M and e.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurfaceStabilityResult {
    pub v: Direction,
    pub slab_width: f64,
    pub cos_ev: f64,
    /// Projection inradius r of M | e^perp.
    pub r: f64,
    /// (integral |<e,u>| dS_{n-1}(M)) / (2 V_{n-1}(M)).
    pub hypothesis_ratio: f64,
    pub bound_checks: Vec<BoundCheck>,
}

/// A unit vector minimising w_M: the normal of the closest facet of the
/// difference body M + (-M), or the normal of aff(M) when M is flat. Ties
/// go to the larger <e, v>, and the sign is chosen with <e, v> >= 0.
pub fn min_width_direction(m: &ConvexPolytope, e: &Direction) -> Result<Direction> {
    check_dim(m.dim(), e.dim())?;
    let n = m.dim();
    if m.affine_dim() + 1 == n {
        let u = m.affine_normals()[0].clone();
        let u = if dot(&u, e) < 0.0 { linalg::scaled(&u, -1.0) } else { u };
        return Direction::new(u);
    }
    if m.affine_dim() < n {
        return Err(GeomError::Precondition("body must have dimension >= n-1".into()));
    }
    let diff = m.minkowski_sum(&m.negate())?;
    let facets = &diff.geometry().facets;
    let best = facets.iter().map(|f| f.offset).fold(f64::INFINITY, f64::min);
    let cut = best + 1e-12 * best.abs().max(f64::MIN_POSITIVE);
    let mut choice: Option<&Vec<f64>> = None;
    for f in facets.iter().filter(|f| f.offset <= cut) {
        if choice.is_none_or(|c| dot(&f.normal, e) > dot(c, e)) {
            choice = Some(&f.normal);
        }
    }
    let u = choice.expect("difference body has facets").clone();
    let u = if dot(&u, e) < 0.0 { linalg::scaled(&u, -1.0) } else { u };
    Direction::new(u)
}

/// Given that the projection of M to e^perp nearly carries its full surface
/// (integral |<e,u>| dS >= (1 - eps) 2 V_{n-1}(M)), find the thin direction
/// v of M and test w_M(v) <= c4 r sqrt(eps) and <e,v> >= 1 - c5 eps with
/// c4 = 48 n^2 sqrt(6)^n, c5 = (10 n)^4 (2 n)^n.
pub fn surface_stability_check(m: &ConvexPolytope, e: &Direction, eps: f64, tol: f64) -> Result<SurfaceStabilityResult> {
    check_dim(m.dim(), e.dim())?;
    let n = m.dim();
    if m.affine_dim() + 1 < n {
        return Err(GeomError::Precondition("body must have dimension >= n-1".into()));
    }
    if !(eps >= 0.0) {
        return Err(GeomError::InvalidParameter(format!("eps must be >= 0, got {eps}")));
    }
    let s = surface_area_measure(m)?;
    let ratio = s.integrate_abs_cos(e)? / s.total_mass();
    if ratio < 1.0 - eps - 1e-12 {
        return Err(GeomError::Precondition(format!(
            "surface hypothesis violated: measured ratio {ratio:.12} < 1 - eps = {:.12}",
            1.0 - eps
        )));
    }
    let v = min_width_direction(m, e)?;
    let slab = m.width(&v)?;
    let cos_ev = dot(&v, e);
    let r = functionals::inradius_projection(m, e)?;
    let nf = n as f64;
    let c4 = 48.0 * nf * nf * 6f64.sqrt().powi(n as i32);
    let c5 = (10.0 * nf).powi(4) * (2.0 * nf).powi(n as i32);
    let scale = functionals::diameter(m);
    let checks = vec![
        BoundCheck::info("eps_range", eps, 0.5 * (1.0 / (2.0 * nf)).powi(n as i32)),
        BoundCheck::le("c4_slab", slab, c4 * r * eps.sqrt(), tol * scale),
        BoundCheck::ge("c5_cos", cos_ev, 1.0 - c5 * eps, tol),
    ];
    Ok(SurfaceStabilityResult {
        v,
        slab_width: slab,
        cos_ev,
        r,
        hypothesis_ratio: ratio,
        bound_checks: checks,
    })
}

/// The constant c17 of the chain from the reverse deficit to the surface
/// deficit, as a function of eps: c17 sqrt(eps) = eps + 2 c16 sqrt(eps) /
/// (2 - c15 eps^2) with c15 = 16 / c3^2, c16 = 2 sqrt(3 + 3 / c3^2).
/// None when the denominator is not positive.
pub fn c17_bound(eps: f64, consts: &PaperConstants) -> Option<f64> {
    let c3 = consts.c3_est;
    let c15 = 16.0 / (c3 * c3);
    let c16 = 2.0 * (3.0 + 3.0 / (c3 * c3)).sqrt();
    let den = 2.0 - c15 * eps * eps;
    (den > 0.0).then(|| eps + 2.0 * c16 * eps.sqrt() / den)
}

/// Certificate for a pair with small reverse Minkowski deficit: the
/// segment and tube of K, and the thin direction and slab of M.
pub fn reverse_certificate(
    k: &ConvexPolytope,
    m: &ConvexPolytope,
    eps0: f64,
    tol: f64,
) -> Result<StabilityCertificate> {
    check_dim(k.dim(), m.dim())?;
    let n = k.dim();
    if k.affine_dim() < 1 {
        return Err(GeomError::Precondition("K must have dimension >= 1".into()));
    }
    if m.affine_dim() + 1 < n {
        return Err(GeomError::Precondition("M must have dimension >= n-1".into()));
    }
    let rep = check_reverse_minkowski(k, m, tol)?;
    let eps = rep.deficit.max(0.0);
    if eps > eps0 {
        return Err(GeomError::Precondition(format!(
            "reverse Minkowski deficit {eps:.6e} exceeds eps0 = {eps0}"
        )));
    }
    let consts = PaperConstants::compute(n)?;
    let lin = check_linhart(k, tol)?;
    let eps_l = lin.deficit.max(0.0);
    let base = linhart_from_deficit(k, eps_l, &consts, tol)?;
    let e = base.e.clone();
    let s = surface_area_measure(m)?;
    let eps_s = (1.0 - s.integrate_abs_cos(&e)? / s.total_mass()).max(0.0);
    let stab = surface_stability_check(m, &e, eps_s, tol)?;

    let mut checks = vec![BoundCheck::le("linhart_deficit_chain", eps_l, 4.0 * eps, tol)];
    checks.extend(base.bound_checks);
    checks.push(match c17_bound(eps, &consts) {
        Some(b) => BoundCheck::le("surface_deficit_chain", eps_s, b, tol),
        None => BoundCheck::info("surface_deficit_chain", eps_s, f64::NAN),
    });
    checks.extend(stab.bound_checks.iter().cloned());
    let r_k = circumradius(k);
    checks.push(BoundCheck::info("slab_vs_r_eps_quarter", stab.slab_width, stab.r * eps.powf(0.25)));
    checks.push(BoundCheck::info("cos_deficit_vs_sqrt_eps", 1.0 - stab.cos_ev, eps.sqrt()));
    checks.push(BoundCheck::info("tube_vs_r_sqrt_eps", base.tube_radius, r_k * eps.sqrt()));
    Ok(StabilityCertificate {
        kind: CertificateKind::Reverse,
        deficit: eps,
        segment_endpoints: base.segment_endpoints,
        e,
        tube_radius: base.tube_radius,
        v: Some(stab.v),
        slab_width: Some(stab.slab_width),
        r: Some(stab.r),
        cos_ev: Some(stab.cos_ev),
        bound_checks: checks,
    })
}

/// Least-squares slope of log y against log x over pairs with x, y > 0.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}
