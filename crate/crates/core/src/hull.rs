//! Incremental (beneath-beyond) convex hull in any dimension.
//!
//! The hull is triangulated into oriented simplicial facets; visibility uses
//! the orientation predicate from [`crate::linalg::orient`], which falls back
//! to exact arithmetic near zero, so the combinatorics stay consistent on
//! degenerate inputs (cubes, coplanar Minkowski sums). Coplanar simplices are
//! merged afterwards into geometric facets keyed by their outward normal.

use std::collections::HashMap;

use crate::error::{GeomError, Result};
use crate::linalg::{self, dot, norm, sub};

/// Angular tolerance (radians) for merging simplices into one facet.
pub const NORMAL_MERGE_TOL: f64 = 1e-9;

/// A geometric facet: outward unit normal, offset `<normal, x> = offset`
/// on the facet, and its (d-1)-dimensional volume.
#[derive(Debug, Clone)]
pub struct Facet {
    pub normal: Vec<f64>,
    pub offset: f64,
    pub area: f64,
}

/// Hull of a full-dimensional point set in R^d, d >= 2.
#[derive(Debug, Clone)]
pub struct Hull {
    pub facets: Vec<Facet>,
    pub volume: f64,
    /// Indices of input points appearing as simplex vertices (a superset of
    /// the extreme points when the input has coplanar boundary points).
    pub touched: Vec<usize>,
}

fn choose_initial_simplex(points: &[Vec<f64>]) -> Result<Vec<usize>> {
    let d = points[0].len();
    let mut chosen = vec![0usize];
    // orthonormal basis of the span of chosen - p0
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let p0 = &points[0];
    for _ in 0..d {
        let mut best = None;
        let mut best_r = 0.0;
        for (i, p) in points.iter().enumerate() {
            let mut r = sub(p, p0);
            for b in &basis {
                let c = dot(&r, b);
                for k in 0..d {
                    r[k] -= c * b[k];
                }
            }
            let rn = norm(&r);
            if rn > best_r {
                best_r = rn;
                best = Some((i, r));
            }
        }
        match best {
            Some((i, r)) if best_r > 0.0 => {
                chosen.push(i);
                basis.push(linalg::scaled(&r, 1.0 / best_r));
            }
            _ => {
                return Err(GeomError::DegenerateHull(
                    "point set is not full-dimensional".into(),
                ))
            }
        }
    }
    Ok(chosen)
}

fn orient_facet(points: &[Vec<f64>], facet: &[usize], x: &[f64]) -> i8 {
    let verts: Vec<&[f64]> = facet.iter().map(|&i| points[i].as_slice()).collect();
    linalg::orient(&verts, x)
}

/// Build the hull of a full-dimensional point set (d >= 2).
pub fn build(points: &[Vec<f64>]) -> Result<Hull> {
    let d = points[0].len();
    if d < 2 {
        return Err(GeomError::DegenerateHull("hull needs dimension >= 2".into()));
    }
    let init = choose_initial_simplex(points)?;
    let mut interior = vec![0.0; d];
    for &i in &init {
        for k in 0..d {
            interior[k] += points[i][k] / (d + 1) as f64;
        }
    }

    let mut facets: Vec<Vec<usize>> = Vec::new();
    for skip in 0..=d {
        let mut f: Vec<usize> = init
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != skip)
            .map(|(_, &i)| i)
            .collect();
        let s = orient_facet(points, &f, &points[init[skip]]);
        if s == 0 {
            return Err(GeomError::DegenerateHull("initial simplex is flat".into()));
        }
        if s > 0 {
            f.swap(0, 1);
        }
        facets.push(f);
    }

    let in_init: std::collections::HashSet<usize> = init.iter().copied().collect();
    for (pi, p) in points.iter().enumerate() {
        if in_init.contains(&pi) {
            continue;
        }
        let visible: Vec<bool> = facets
            .iter()
            .map(|f| orient_facet(points, f, p) > 0)
            .collect();
        if !visible.iter().any(|&v| v) {
            continue;
        }
        let mut ridge_count: HashMap<Vec<usize>, (usize, usize, usize)> = HashMap::new();
        let mut ridge_order: Vec<Vec<usize>> = Vec::new();
        for (fi, f) in facets.iter().enumerate() {
            if !visible[fi] {
                continue;
            }
            for j in 0..d {
                let mut key: Vec<usize> = f
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != j)
                    .map(|(_, &v)| v)
                    .collect();
                key.sort_unstable();
                let e = ridge_count.entry(key.clone()).or_insert_with(|| {
                    ridge_order.push(key);
                    (0, fi, j)
                });
                e.0 += 1;
            }
        }
        let mut next: Vec<Vec<usize>> = facets
            .iter()
            .zip(&visible)
            .filter(|(_, &v)| !v)
            .map(|(f, _)| f.clone())
            .collect();
        for key in &ridge_order {
            let (count, fi, j) = ridge_count[key];
            if count == 1 {
                // replacing the dropped vertex by p keeps the orientation
                let mut nf = facets[fi].clone();
                nf[j] = pi;
                next.push(nf);
            }
        }
        facets = next;
    }

    // geometry of the simplicial facets
    let fact = linalg::factorial(d - 1);
    let mut merged: Vec<(Vec<f64>, f64, f64, f64)> = Vec::new(); // normal, offset*area, area, max simplex area
    let mut volume = 0.0;
    let mut touched = std::collections::BTreeSet::new();
    for f in &facets {
        let verts: Vec<&[f64]> = f.iter().map(|&i| points[i].as_slice()).collect();
        let raw = linalg::simplex_normal(&verts);
        let len = norm(&raw);
        if len == 0.0 {
            continue;
        }
        let area = len / fact;
        let mut nrm = linalg::scaled(&raw, 1.0 / len);
        if dot(&nrm, &sub(&interior, verts[0])) > 0.0 {
            nrm = linalg::scaled(&nrm, -1.0);
        }
        let offset = dot(&nrm, verts[0]);
        volume += area * (offset - dot(&nrm, &interior)) / d as f64;
        touched.extend(f.iter().copied());
        match merged
            .iter_mut()
            .find(|(n, ..)| norm(&sub(n, &nrm)) < NORMAL_MERGE_TOL)
        {
            Some(m) => {
                m.1 += offset * area;
                m.2 += area;
                if area > m.3 {
                    m.0 = nrm;
                    m.3 = area;
                }
            }
            None => merged.push((nrm, offset * area, area, area)),
        }
    }
    let facets = merged
        .into_iter()
        .map(|(normal, oa, area, _)| Facet {
            normal,
            offset: oa / area,
            area,
        })
        .collect();
    Ok(Hull {
        facets,
        volume,
        touched: touched.into_iter().collect(),
    })
}
