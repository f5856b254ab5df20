//! Scalar functionals of polytopes: volume, surface area, V_{n-1}, the
//! mixed volume V(K, M[n-1]), V_1, circumradius, diameter and the inradius
//! of a hyperplane projection.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::bodies::{ConvexPolytope, Direction};
use crate::error::{check_dim, GeomError, Result};
use crate::linalg::{self, dot, sub};
use crate::lp::{self, LinearProgram, LpOutcome};
use crate::measures::surface_area_measure;
use crate::spherical::{self, kappa};

/// Largest Vandermonde condition number accepted by the polynomial fit.
pub const MAX_FIT_CONDITION: f64 = 1e8;

/// n-dimensional volume; zero for lower-dimensional bodies.
pub fn volume(p: &ConvexPolytope) -> f64 {
    let g = p.geometry();
    if g.dim() == p.dim() {
        g.volume
    } else {
        0.0
    }
}

/// Surface area F(P), the total mass of S_{n-1}(P, .).
pub fn surface_area(p: &ConvexPolytope) -> Result<f64> {
    Ok(surface_area_measure(p)?.total_mass())
}

pub fn v_nminus1(p: &ConvexPolytope) -> Result<f64> {
    Ok(surface_area(p)? / 2.0)
}

/// V(K, M[n-1]) = (1/n) * integral of h_K against S_{n-1}(M, .).
pub fn mixed_volume_1(k: &ConvexPolytope, m: &ConvexPolytope) -> Result<f64> {
    check_dim(k.dim(), m.dim())?;
    let s = surface_area_measure(m)?;
    Ok(s.integrate_support(k)? / k.dim() as f64)
}

/// V(K, M[n-1]) read off the polynomial alpha -> V(alpha K + M): the
/// volume is sampled at n+1 equispaced alpha, the interpolating polynomial
/// is solved for, and its linear coefficient is divided by n.
pub fn mixed_volume_oracle(k: &ConvexPolytope, m: &ConvexPolytope) -> Result<f64> {
    check_dim(k.dim(), m.dim())?;
    let n = k.dim();
    if n > 4 {
        return Err(GeomError::InvalidParameter(format!(
            "polynomial-fit oracle is limited to n <= 4, got {n}"
        )));
    }
    let dk = k.diameter_pair().0;
    if dk == 0.0 {
        return Ok(0.0);
    }
    let dm = m.diameter_pair().0;
    let s = if dm > 0.0 { dm / dk } else { 1.0 };
    let ts: Vec<f64> = (0..=n).map(|j| j as f64 / n as f64).collect();
    let vand = DMatrix::from_fn(n + 1, n + 1, |i, j| ts[i].powi(j as i32));
    let sv = vand.clone().svd(false, false).singular_values;
    let cond = sv.max() / sv.min();
    if !(cond <= MAX_FIT_CONDITION) {
        return Err(GeomError::IllConditioned(cond));
    }
    let mut vals = Vec::with_capacity(n + 1);
    for &t in &ts {
        let body = k.scale(s * t)?.minkowski_sum(m)?;
        vals.push(volume(&body));
    }
    let coeffs = vand
        .lu()
        .solve(&DVector::from_vec(vals))
        .ok_or(GeomError::IllConditioned(f64::INFINITY))?;
    // coefficient of t^1, t = alpha / s
    Ok(coeffs[1] / s / n as f64)
}

/// Vertices in the orthonormal coordinates of the affine hull.
fn intrinsic_vertices(p: &ConvexPolytope) -> Vec<Vec<f64>> {
    let frame = &p.geometry().frame;
    if frame.is_identity() {
        p.vertices().to_vec()
    } else {
        p.vertices().iter().map(|v| frame.to_intrinsic(v)).collect()
    }
}

/// How a reported value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exact,
    Quadrature,
    Optimization,
}

/// V_1 together with how it was computed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct V1Value {
    pub value: f64,
    pub method: Method,
    /// Estimated relative error (zero for closed forms).
    pub error_estimate: f64,
}

/// Refinement schedule of the sphere quadrature used for V_1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct V1Options {
    pub start_level: u32,
    pub max_level: u32,
    pub rel_tol: f64,
}

impl Default for V1Options {
    fn default() -> Self {
        V1Options {
            start_level: 1,
            max_level: 7,
            rel_tol: 1e-4,
        }
    }
}

/// First intrinsic volume V_1(P).
pub fn v1(p: &ConvexPolytope) -> Result<f64> {
    Ok(v1_with(p, &V1Options::default())?.value)
}

/// V_1 by affine dimension d: 0, length, half perimeter, the edge sum
/// (1/2pi) sum length * (angle between adjacent facet normals), and the
/// sphere quadrature of the support function for d >= 4.
pub fn v1_with(p: &ConvexPolytope, opts: &V1Options) -> Result<V1Value> {
    let g = p.geometry();
    let exact = |value| V1Value {
        value,
        method: Method::Exact,
        error_estimate: 0.0,
    };
    match g.dim() {
        0 => Ok(exact(0.0)),
        1 => Ok(exact(g.volume)),
        2 => Ok(exact(g.facets.iter().map(|f| f.area).sum::<f64>() / 2.0)),
        3 => Ok(exact(edge_sum(&intrinsic_vertices(p), &g.facets))),
        _ => v1_quadrature_points(&intrinsic_vertices(p), opts),
    }
}

fn edge_sum(verts: &[Vec<f64>], facets: &[crate::hull::Facet]) -> f64 {
    let scale = verts
        .iter()
        .flat_map(|v| v.iter())
        .fold(0.0f64, |a, x| a.max(x.abs()))
        .max(f64::MIN_POSITIVE);
    let tol = 1e-9 * scale;
    let on: Vec<Vec<usize>> = facets
        .iter()
        .map(|f| {
            (0..verts.len())
                .filter(|&i| (dot(&f.normal, &verts[i]) - f.offset).abs() <= tol)
                .collect()
        })
        .collect();
    let mut total = 0.0;
    for i in 0..facets.len() {
        for j in i + 1..facets.len() {
            let shared: Vec<usize> = on[i].iter().copied().filter(|v| on[j].contains(v)).collect();
            if shared.len() < 2 {
                continue;
            }
            let mut len = 0.0f64;
            for a in 0..shared.len() {
                for b in a + 1..shared.len() {
                    len = len.max(linalg::dist(&verts[shared[a]], &verts[shared[b]]));
                }
            }
            let c = dot(&facets[i].normal, &facets[j].normal).clamp(-1.0, 1.0);
            total += len * c.acos();
        }
    }
    total / (2.0 * std::f64::consts::PI)
}

/// V_1 as (1/kappa_{d-1}) * integral of h over S^{d-1}, by the product
/// rule in the ambient dimension, refined until three successive
/// Richardson-extrapolated levels agree to `opts.rel_tol`.
pub fn v1_quadrature(p: &ConvexPolytope, opts: &V1Options) -> Result<V1Value> {
    if p.affine_dim() == 0 {
        return Ok(V1Value {
            value: 0.0,
            method: Method::Quadrature,
            error_estimate: 0.0,
        });
    }
    v1_quadrature_points(p.vertices(), opts)
}

fn v1_quadrature_points(points: &[Vec<f64>], opts: &V1Options) -> Result<V1Value> {
    let d = points[0].len();
    if d < 2 {
        return Err(GeomError::InvalidParameter("quadrature needs dimension >= 2".into()));
    }
    let mut centroid = vec![0.0; d];
    for p in points {
        for i in 0..d {
            centroid[i] += p[i] / points.len() as f64;
        }
    }
    let local: Vec<Vec<f64>> = points.iter().map(|p| sub(p, &centroid)).collect();
    let h = |u: &[f64]| local.iter().map(|v| dot(v, u)).fold(f64::NEG_INFINITY, f64::max);
    let k = kappa(d - 1);
    let mut raw: Vec<f64> = Vec::new();
    let mut extrapolated: Vec<f64> = Vec::new();
    let mut last_err = f64::INFINITY;
    for level in opts.start_level..=opts.max_level {
        let rule = spherical::product_rule_blocks(d, level);
        if rule.len() > 40_000_000 {
            break;
        }
        raw.push(rule.integrate(h) / k);
        let l = raw.len();
        if l >= 2 {
            // midpoint/GL error on kinked integrands decays like m^-2
            extrapolated.push((4.0 * raw[l - 1] - raw[l - 2]) / 3.0);
        }
        let e = extrapolated.len();
        if e >= 2 {
            let a = extrapolated[e - 1];
            last_err = ((a - extrapolated[e - 2]) / a).abs();
            // one agreement can be a coincidence; ask for two in a row
            let prev = if e >= 3 {
                ((extrapolated[e - 2] - extrapolated[e - 3]) / a).abs()
            } else {
                f64::INFINITY
            };
            if last_err < opts.rel_tol && prev < opts.rel_tol {
                return Ok(V1Value {
                    value: a,
                    method: Method::Quadrature,
                    error_estimate: last_err,
                });
            }
        }
    }
    Err(GeomError::NoConvergence(last_err))
}

/// Smallest enclosing ball of the vertices: (centre, radius).
pub fn min_enclosing_ball(p: &ConvexPolytope) -> (Vec<f64>, f64) {
    let frame = &p.geometry().frame;
    let local = intrinsic_vertices(p);
    let d = local[0].len();
    let lift = |c: &[f64]| -> Vec<f64> {
        if frame.is_identity() {
            c.to_vec()
        } else {
            linalg::add(&frame.origin, &frame.to_ambient_direction(c))
        }
    };
    if d == 0 || local.len() == 1 {
        return (p.vertices()[0].clone(), 0.0);
    }
    if let Some((c, r)) = welzl(&local) {
        return (lift(&c), r);
    }
    let (c, r) = crate::oracle::meb_exhaustive(&local);
    (lift(&c), r)
}

/// Circumradius R(P).
pub fn circumradius(p: &ConvexPolytope) -> f64 {
    min_enclosing_ball(p).1
}

pub fn diameter(p: &ConvexPolytope) -> f64 {
    p.diameter_pair().0
}

/// Ball through the given points with centre in their affine hull.
pub(crate) fn circumball(pts: &[&[f64]]) -> Option<(Vec<f64>, f64)> {
    let p0 = pts[0];
    let k = pts.len() - 1;
    if k == 0 {
        return Some((p0.to_vec(), 0.0));
    }
    let q: Vec<Vec<f64>> = pts[1..].iter().map(|p| sub(p, p0)).collect();
    let a = DMatrix::from_fn(k, k, |i, j| 2.0 * dot(&q[i], &q[j]));
    let b = DVector::from_fn(k, |i, _| dot(&q[i], &q[i]));
    let sv = a.clone().svd(false, false).singular_values;
    if sv.min() <= 1e-12 * sv.max() {
        return None;
    }
    let lam = a.lu().solve(&b)?;
    let mut c = p0.to_vec();
    for (l, qi) in lam.iter().zip(&q) {
        for (ci, x) in c.iter_mut().zip(qi) {
            *ci += l * x;
        }
    }
    let r = pts.iter().map(|p| linalg::dist(p, &c)).fold(0.0, f64::max);
    Some((c, r))
}

/// Move-to-front Welzl recursion; None if a support set turns out to be
/// affinely dependent or the result fails the containment check.
fn welzl(points: &[Vec<f64>]) -> Option<(Vec<f64>, f64)> {
    let d = points[0].len();
    let scale = points
        .iter()
        .flat_map(|v| v.iter())
        .fold(0.0f64, |a, x| a.max(x.abs()))
        .max(f64::MIN_POSITIVE);
    let tol = 1e-12 * scale;
    let mut order: Vec<usize> = (0..points.len()).collect();
    let mut boundary: Vec<usize> = Vec::new();
    let ball = mtf(points, &mut order, points.len(), &mut boundary, d, tol)?;
    let slack = 1e-10 * scale;
    if points.iter().all(|p| linalg::dist(p, &ball.0) <= ball.1 + slack) {
        Some(ball)
    } else {
        None
    }
}

fn mtf(
    points: &[Vec<f64>],
    order: &mut Vec<usize>,
    end: usize,
    boundary: &mut Vec<usize>,
    d: usize,
    tol: f64,
) -> Option<(Vec<f64>, f64)> {
    let mut ball = if boundary.is_empty() {
        (points[order[0]].clone(), -1.0)
    } else {
        let pts: Vec<&[f64]> = boundary.iter().map(|&i| points[i].as_slice()).collect();
        circumball(&pts)?
    };
    if boundary.len() == d + 1 {
        return Some(ball);
    }
    let mut i = 0;
    while i < end {
        let pi = order[i];
        if linalg::dist(&points[pi], &ball.0) > ball.1 + tol {
            boundary.push(pi);
            ball = mtf(points, order, i, boundary, d, tol)?;
            boundary.pop();
            let v = order.remove(i);
            order.insert(0, v);
        }
        i += 1;
    }
    Some(ball)
}

/// Radius of the largest (n-1)-ball inside the projection of `m` to
/// e^perp (Chebyshev centre LP); zero when the projection is flat.
pub fn inradius_projection(m: &ConvexPolytope, e: &Direction) -> Result<f64> {
    check_dim(m.dim(), e.dim())?;
    let proj = m.project(e)?;
    let d = proj.dim();
    if proj.affine_dim() < d {
        return Ok(0.0);
    }
    let facets = &proj.geometry().facets;
    let mut c = vec![0.0; d];
    for v in proj.vertices() {
        for i in 0..d {
            c[i] += v[i] / proj.vertices().len() as f64;
        }
    }
    // variables (x+, x-, r), x = centroid + x+ - x-
    let nv = 2 * d + 1;
    let mut obj = vec![0.0; nv];
    obj[2 * d] = 1.0;
    let mut a_ub = Vec::with_capacity(facets.len());
    let mut b_ub = Vec::with_capacity(facets.len());
    for f in facets {
        let mut row = vec![0.0; nv];
        for i in 0..d {
            row[i] = f.normal[i];
            row[d + i] = -f.normal[i];
        }
        row[2 * d] = linalg::norm(&f.normal);
        a_ub.push(row);
        b_ub.push((f.offset - dot(&f.normal, &c)).max(0.0));
    }
    let prog = LinearProgram {
        c: obj,
        a_ub,
        b_ub,
        ..Default::default()
    };
    match lp::solve(&prog)? {
        LpOutcome::Optimal { value, .. } => Ok(value.max(0.0)),
        other => Err(GeomError::Lp(format!("Chebyshev centre LP ended as {other:?}"))),
    }
}

/// Which functionals a report should contain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Functional {
    Volume,
    SurfaceArea,
    V1,
    VNminus1,
    Circumradius,
    Diameter,
}

impl Functional {
    pub const ALL: [Functional; 6] = [
        Functional::Volume,
        Functional::SurfaceArea,
        Functional::V1,
        Functional::VNminus1,
        Functional::Circumradius,
        Functional::Diameter,
    ];

    /// Parse the short names `vol, f, v1, vn1, r, diam`.
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "vol" | "volume" => Functional::Volume,
            "f" | "surface_area" => Functional::SurfaceArea,
            "v1" => Functional::V1,
            "vn1" | "v_nminus1" => Functional::VNminus1,
            "r" | "circumradius" => Functional::Circumradius,
            "diam" | "diameter" => Functional::Diameter,
            other => {
                return Err(GeomError::InvalidParameter(format!("unknown functional '{other}'")))
            }
        })
    }

    fn key(self) -> &'static str {
        match self {
            Functional::Volume => "volume",
            Functional::SurfaceArea => "surface_area",
            Functional::V1 => "v1",
            Functional::VNminus1 => "v_nminus1",
            Functional::Circumradius => "circumradius",
            Functional::Diameter => "diameter",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FunctionalReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub volume: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub surface_area: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v_nminus1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub circumradius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diameter: Option<f64>,
    pub method_tags: BTreeMap<String, Method>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v1_error_estimate: Option<f64>,
}

pub fn functional_report(
    p: &ConvexPolytope,
    which: &[Functional],
    opts: &V1Options,
) -> Result<FunctionalReport> {
    let mut r = FunctionalReport {
        volume: None,
        surface_area: None,
        v1: None,
        v_nminus1: None,
        circumradius: None,
        diameter: None,
        method_tags: BTreeMap::new(),
        v1_error_estimate: None,
    };
    let mut which = which.to_vec();
    which.sort();
    which.dedup();
    for f in which {
        let mut tag = Method::Exact;
        match f {
            Functional::Volume => r.volume = Some(volume(p)),
            Functional::SurfaceArea => r.surface_area = Some(surface_area(p)?),
            Functional::VNminus1 => r.v_nminus1 = Some(v_nminus1(p)?),
            Functional::V1 => {
                let v = v1_with(p, opts)?;
                r.v1 = Some(v.value);
                tag = v.method;
                if v.method == Method::Quadrature {
                    r.v1_error_estimate = Some(v.error_estimate);
                }
            }
            Functional::Circumradius => {
                r.circumradius = Some(circumradius(p));
                tag = Method::Optimization;
            }
            Functional::Diameter => r.diameter = Some(diameter(p)),
        }
        r.method_tags.insert(f.key().to_string(), tag);
    }
    Ok(r)
}

impl FunctionalReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serialises")
    }
}
