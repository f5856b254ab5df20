//! Vertex-represented convex polytopes in R^n and the basic operations on
//! them. Lower-dimensional bodies (points, segments, flat facets) live in the
//! full ambient space; their affine dimension is detected from the data.

use std::fmt;
use std::ops::Deref;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, GeomError, Result};
use crate::hull::{self, Facet};
use crate::linalg::{self, dot, AffineFrame};

pub mod generators;

pub use generators::*;

/// A unit vector of R^n.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Direction(Vec<f64>);

impl Direction {
    /// Normalises `v`; fails for zero or non-finite input.
    pub fn new(v: Vec<f64>) -> Result<Self> {
        if v.iter().any(|x| !x.is_finite()) {
            return Err(GeomError::InvalidParameter("non-finite direction".into()));
        }
        let len = linalg::norm(&v);
        if len == 0.0 {
            return Err(GeomError::InvalidParameter("zero direction".into()));
        }
        if (len - 1.0).abs() <= 1e-15 {
            return Ok(Direction(v));
        }
        Ok(Direction(v.into_iter().map(|x| x / len).collect()))
    }

    pub fn axis(n: usize, i: usize) -> Self {
        Direction(linalg::unit_axis(n, i))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn neg(&self) -> Self {
        Direction(self.0.iter().map(|x| -x).collect())
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for Direction {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl<'de> Deserialize<'de> for Direction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<f64>::deserialize(d)?;
        Direction::new(v).map_err(serde::de::Error::custom)
    }
}

/// Derived data of a polytope: its affine frame and, in intrinsic
/// coordinates, its facets and volume.
#[derive(Debug, Clone)]
pub(crate) struct Geometry {
    pub frame: AffineFrame,
    /// Facets in intrinsic coordinates (empty for points; two 0-dimensional
    /// "facets" of unit measure for segments).
    pub facets: Vec<Facet>,
    /// d-dimensional volume, d = affine dimension.
    pub volume: f64,
    /// Indices (into the constructing point list) of the extreme points.
    pub extreme: Vec<usize>,
}

impl Geometry {
    pub fn dim(&self) -> usize {
        self.frame.dim()
    }
}

/// Compute frame, hull facets and extreme points of a finite point set.
pub(crate) fn analyse(points: &[Vec<f64>]) -> Result<Geometry> {
    let frame = linalg::affine_frame(points);
    let d = frame.dim();
    let local: Vec<Vec<f64>> = if frame.is_identity() {
        points.to_vec()
    } else {
        points.iter().map(|p| frame.to_intrinsic(p)).collect()
    };
    match d {
        0 => {
            let first = (0..points.len())
                .min_by(|&a, &b| lex_cmp(&points[a], &points[b]))
                .unwrap_or(0);
            Ok(Geometry {
                frame,
                facets: vec![],
                volume: 1.0,
                extreme: vec![first],
            })
        }
        1 => {
            let (mut lo, mut hi) = (0, 0);
            for (i, q) in local.iter().enumerate() {
                if q[0] < local[lo][0] {
                    lo = i;
                }
                if q[0] > local[hi][0] {
                    hi = i;
                }
            }
            let facets = vec![
                Facet {
                    normal: vec![-1.0],
                    offset: -local[lo][0],
                    area: 1.0,
                },
                Facet {
                    normal: vec![1.0],
                    offset: local[hi][0],
                    area: 1.0,
                },
            ];
            Ok(Geometry {
                frame,
                facets,
                volume: linalg::dist(&points[lo], &points[hi]),
                extreme: vec![lo, hi],
            })
        }
        _ => {
            let h = hull::build(&local)?;
            let scale = bbox_diag(&local).max(f64::MIN_POSITIVE);
            let tol = 1e-9 * scale;
            let mut extreme = Vec::new();
            for &i in &h.touched {
                let incident: Vec<&[f64]> = h
                    .facets
                    .iter()
                    .filter(|f| (dot(&f.normal, &local[i]) - f.offset).abs() <= tol)
                    .map(|f| f.normal.as_slice())
                    .collect();
                if rank(&incident) == d {
                    extreme.push(i);
                }
            }
            Ok(Geometry {
                frame,
                facets: h.facets,
                volume: h.volume,
                extreme,
            })
        }
    }
}

fn bbox_diag(points: &[Vec<f64>]) -> f64 {
    let n = points[0].len();
    (0..n)
        .map(|i| {
            let (lo, hi) = points
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                    (lo.min(p[i]), hi.max(p[i]))
                });
            (hi - lo) * (hi - lo)
        })
        .sum::<f64>()
        .sqrt()
}

/// Numerical rank of a set of unit vectors (Gram-Schmidt, tolerance 1e-9).
pub(crate) fn rank(vectors: &[&[f64]]) -> usize {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for v in vectors {
        let mut r = v.to_vec();
        for b in &basis {
            let c = dot(&r, b);
            for k in 0..r.len() {
                r[k] -= c * b[k];
            }
        }
        let rn = linalg::norm(&r);
        if rn > 1e-9 {
            basis.push(linalg::scaled(&r, 1.0 / rn));
        }
    }
    basis.len()
}

fn snap(x: f64) -> f64 {
    (x * 1e12).round()
}

fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        let o = snap(*x).total_cmp(&snap(*y));
        if o != std::cmp::Ordering::Equal {
            return o;
        }
    }
    std::cmp::Ordering::Equal
}

/// Compact convex polytope given by its (canonicalised) vertex list.
#[derive(Clone)]
pub struct ConvexPolytope {
    dim: usize,
    vertices: Vec<Vec<f64>>,
    geometry: Arc<OnceLock<Geometry>>,
}

impl fmt::Debug for ConvexPolytope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConvexPolytope")
            .field("dim", &self.dim)
            .field("vertices", &self.vertices)
            .finish()
    }
}

impl PartialEq for ConvexPolytope {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.vertices == other.vertices
    }
}

impl ConvexPolytope {
    /// Convex hull of `points` in R^`dim`. Only extreme points are kept, in
    /// lexicographic order.
    pub fn new(dim: usize, points: Vec<Vec<f64>>) -> Result<Self> {
        if dim < 1 {
            return Err(GeomError::InvalidParameter("ambient dimension must be >= 1".into()));
        }
        if points.is_empty() {
            return Err(GeomError::InvalidParameter("polytope needs at least one point".into()));
        }
        for p in &points {
            check_dim(dim, p.len())?;
            if p.iter().any(|x| !x.is_finite()) {
                return Err(GeomError::InvalidParameter("non-finite coordinate".into()));
            }
        }
        let mut pts = points;
        pts.sort_by(|a, b| a.iter().zip(b.iter()).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal));
        pts.dedup();
        let geom = analyse(&pts)?;
        let mut vertices: Vec<Vec<f64>> = geom.extreme.iter().map(|&i| pts[i].clone()).collect();
        vertices.sort_by(|a, b| lex_cmp(a, b));
        let cell = OnceLock::new();
        let _ = cell.set(geom);
        Ok(ConvexPolytope {
            dim,
            vertices,
            geometry: Arc::new(cell),
        })
    }

    /// Ambient dimension n.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub(crate) fn geometry(&self) -> &Geometry {
        self.geometry
            .get_or_init(|| analyse(&self.vertices).expect("canonical vertices analyse"))
    }

    /// Affine dimension in {0, ..., n}.
    pub fn affine_dim(&self) -> usize {
        self.geometry().dim()
    }

    /// Orthonormal basis of the orthogonal complement of the affine hull.
    pub fn affine_normals(&self) -> &[Vec<f64>] {
        &self.geometry().frame.normals
    }

    /// Orthonormal basis of the direction space of the affine hull.
    pub fn affine_basis(&self) -> &[Vec<f64>] {
        &self.geometry().frame.basis
    }

    /// Volume in the body's own affine dimension (length of a segment, area
    /// of a flat polygon, ...).
    pub fn intrinsic_volume_top(&self) -> f64 {
        let g = self.geometry();
        if g.dim() == 0 {
            0.0
        } else {
            g.volume
        }
    }

    /// Support function h_P(x) = max_v <x, v>.
    pub fn support(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim, x.len())?;
        Ok(self.h(x))
    }

    pub(crate) fn h(&self, x: &[f64]) -> f64 {
        self.vertices
            .iter()
            .map(|v| dot(v, x))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Width h_P(e) + h_P(-e).
    pub fn width(&self, e: &Direction) -> Result<f64> {
        check_dim(self.dim, e.dim())?;
        let (mut hi, mut lo) = (f64::NEG_INFINITY, f64::INFINITY);
        for v in &self.vertices {
            let t = dot(v, e);
            hi = hi.max(t);
            lo = lo.min(t);
        }
        Ok(hi - lo)
    }

    pub fn minkowski_sum(&self, other: &ConvexPolytope) -> Result<ConvexPolytope> {
        check_dim(self.dim, other.dim)?;
        let mut pts = Vec::with_capacity(self.vertices.len() * other.vertices.len());
        for a in &self.vertices {
            for b in &other.vertices {
                pts.push(linalg::add(a, b));
            }
        }
        ConvexPolytope::new(self.dim, pts)
    }

    pub fn scale(&self, lambda: f64) -> Result<ConvexPolytope> {
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(GeomError::InvalidParameter(format!(
                "scale factor must be finite and >= 0, got {lambda}"
            )));
        }
        self.map_vertices(|v| linalg::scaled(v, lambda))
    }

    pub fn translate(&self, t: &[f64]) -> Result<ConvexPolytope> {
        check_dim(self.dim, t.len())?;
        self.map_vertices(|v| linalg::add(v, t))
    }

    pub fn negate(&self) -> ConvexPolytope {
        self.map_vertices(|v| linalg::scaled(v, -1.0))
            .expect("negation preserves validity")
    }

    /// Image under the linear map with matrix rows `m` (n x n).
    pub fn linear_image(&self, m: &[Vec<f64>]) -> Result<ConvexPolytope> {
        check_dim(self.dim, m.len())?;
        for row in m {
            check_dim(self.dim, row.len())?;
        }
        self.map_vertices(|v| linalg::mat_vec(m, v))
    }

    fn map_vertices(&self, f: impl Fn(&[f64]) -> Vec<f64>) -> Result<ConvexPolytope> {
        ConvexPolytope::new(self.dim, self.vertices.iter().map(|v| f(v)).collect())
    }

    /// Orthogonal projection onto e^perp, expressed in the orthonormal basis
    /// of e^perp given by [`ProjectionMap`].
    pub fn project(&self, e: &Direction) -> Result<ConvexPolytope> {
        check_dim(self.dim, e.dim())?;
        if self.dim < 2 {
            return Err(GeomError::InvalidParameter("cannot project a 1-dimensional space".into()));
        }
        let map = ProjectionMap::new(e);
        ConvexPolytope::new(self.dim - 1, self.vertices.iter().map(|v| map.apply(v)).collect())
    }

    /// Diameter and a realising vertex pair.
    pub fn diameter_pair(&self) -> (f64, usize, usize) {
        let mut best = (0.0, 0, 0);
        for i in 0..self.vertices.len() {
            for j in i + 1..self.vertices.len() {
                let d = linalg::dist(&self.vertices[i], &self.vertices[j]);
                if d > best.0 {
                    best = (d, i, j);
                }
            }
        }
        best
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("body serialises")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Orthonormal coordinates on e^perp: the Householder reflection that sends
/// e to the last coordinate axis, followed by dropping that coordinate.
#[derive(Debug, Clone)]
pub struct ProjectionMap {
    reflection: Vec<Vec<f64>>,
}

impl ProjectionMap {
    pub fn new(e: &Direction) -> Self {
        ProjectionMap {
            reflection: linalg::householder_to_last_axis(e),
        }
    }

    /// Coordinates of the projection of `x` to e^perp (length n-1).
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = x.len();
        self.reflection[..n - 1].iter().map(|row| dot(row, x)).collect()
    }

    /// Lift coordinates on e^perp back to R^n.
    pub fn lift(&self, y: &[f64]) -> Vec<f64> {
        let n = y.len() + 1;
        (0..n)
            .map(|j| (0..n - 1).map(|i| self.reflection[i][j] * y[i]).sum())
            .collect()
    }
}

#[derive(Serialize, Deserialize)]
struct BodyJson {
    dim: usize,
    vertices: Vec<Vec<f64>>,
}

impl Serialize for ConvexPolytope {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        BodyJson {
            dim: self.dim,
            vertices: self.vertices.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ConvexPolytope {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = BodyJson::deserialize(d)?;
        ConvexPolytope::new(raw.dim, raw.vertices).map_err(serde::de::Error::custom)
    }
}
