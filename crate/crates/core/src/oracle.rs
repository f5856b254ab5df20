//! Brute-force reference computations: Monte Carlo V_1 and volume,
//! exhaustive minimum enclosing ball, and a grid-plus-pattern search for
//! the minimal width direction. Slow, simple, and independent of the fast
//! code paths they are compared against.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bodies::{ConvexPolytope, Direction};
use crate::error::{GeomError, Result};
use crate::linalg::{self, dot, sub};
use crate::rng::stream_rng;
use crate::spherical::{self, kappa, Estimate, SAMPLE_CHUNK};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleComparison {
    pub quantity: String,
    pub fast_value: f64,
    pub oracle_value: f64,
    pub rel_err: f64,
    /// Samples or subsets spent by the oracle.
    pub budget: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_std_error: Option<f64>,
}

impl OracleComparison {
    pub fn new(quantity: &str, fast: f64, oracle: f64, budget: u64) -> Self {
        OracleComparison {
            quantity: quantity.to_string(),
            fast_value: fast,
            oracle_value: oracle,
            rel_err: (fast - oracle).abs() / oracle.abs().max(1e-300),
            budget,
            oracle_std_error: None,
        }
    }

    pub fn with_std_error(mut self, se: f64) -> Self {
        self.oracle_std_error = Some(se);
        self
    }
}

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = spherical::stable_sum(xs) / n;
    let dev: Vec<f64> = xs.iter().map(|x| (x - mean) * (x - mean)).collect();
    let var = spherical::stable_sum(&dev) / (n - 1.0).max(1.0);
    (mean, (var / n).sqrt())
}

/// V_1 = (n kappa_n / kappa_{n-1}) * mean of h_P over uniform directions.
pub fn mc_v1(p: &ConvexPolytope, samples: usize, seed: u64) -> Result<Estimate> {
    if samples < 10_000 {
        return Err(GeomError::InvalidParameter(format!("need at least 1e4 samples, got {samples}")));
    }
    let n = p.dim();
    if n < 2 {
        return Err(GeomError::InvalidParameter("Monte Carlo V_1 needs n >= 2".into()));
    }
    let us = spherical::sample_sphere(n, samples, seed);
    let hs: Vec<f64> = us.par_iter().map(|u| p.support(u).expect("dimension checked")).collect();
    let (mean, se) = mean_and_se(&hs);
    let c = n as f64 * kappa(n) / kappa(n - 1);
    Ok(Estimate {
        value: c * mean,
        std_error: c * se,
    })
}

/// Hit-or-miss volume inside the bounding box, membership tested against
/// the facet inequalities.
pub fn volume_mc(p: &ConvexPolytope, samples: usize, seed: u64) -> Result<Estimate> {
    let n = p.dim();
    if p.affine_dim() < n {
        return Err(GeomError::InvalidParameter("body is not full-dimensional".into()));
    }
    let facets = &p.geometry().facets;
    let mut lo = vec![f64::INFINITY; n];
    let mut hi = vec![f64::NEG_INFINITY; n];
    for v in p.vertices() {
        for i in 0..n {
            lo[i] = lo[i].min(v[i]);
            hi[i] = hi[i].max(v[i]);
        }
    }
    let box_vol: f64 = lo.iter().zip(&hi).map(|(a, b)| b - a).product();
    let chunks = samples.div_ceil(SAMPLE_CHUNK);
    let hits: Vec<f64> = (0..chunks)
        .into_par_iter()
        .flat_map_iter(|c| {
            let mut rng = stream_rng(seed, c as u64);
            let len = SAMPLE_CHUNK.min(samples - c * SAMPLE_CHUNK);
            let (lo, hi) = (&lo, &hi);
            (0..len)
                .map(move |_| {
                    let x: Vec<f64> = (0..n).map(|i| lo[i] + (hi[i] - lo[i]) * rng.random::<f64>()).collect();
                    let inside = facets.iter().all(|f| dot(&f.normal, &x) <= f.offset);
                    if inside {
                        1.0
                    } else {
                        0.0
                    }
                })
                .collect::<Vec<f64>>()
        })
        .collect();
    let (mean, se) = mean_and_se(&hits);
    Ok(Estimate {
        value: box_vol * mean,
        std_error: box_vol * se,
    })
}

fn circumcentre(pts: &[&[f64]]) -> Option<(Vec<f64>, f64)> {
    let p0 = pts[0];
    let q: Vec<Vec<f64>> = pts[1..].iter().map(|p| sub(p, p0)).collect();
    let k = q.len();
    if k == 0 {
        return Some((p0.to_vec(), 0.0));
    }
    let a: Vec<Vec<f64>> = (0..k).map(|i| (0..k).map(|j| dot(&q[i], &q[j])).collect()).collect();
    let b: Vec<f64> = (0..k).map(|i| 0.5 * dot(&q[i], &q[i])).collect();
    // Gram determinant against the Hadamard bound detects dependent sets
    let hadamard: f64 = (0..k).map(|i| a[i][i]).product();
    if linalg::det(&a).abs() <= 1e-12 * hadamard {
        return None;
    }
    let lam = linalg::solve(&a, &b)?;
    let mut c = p0.to_vec();
    for (l, qi) in lam.iter().zip(&q) {
        for (ci, x) in c.iter_mut().zip(qi) {
            *ci += l * x;
        }
    }
    Some((c.clone(), linalg::dist(p0, &c)))
}

fn subsets(n: usize, k: usize, mut visit: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        visit(&idx);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] < n - k + i {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Minimum enclosing ball by trying every subset of at most d+1 points as
/// the support set and keeping the smallest ball that contains all points.
pub fn meb_exhaustive(points: &[Vec<f64>]) -> (Vec<f64>, f64) {
    let d = points[0].len();
    let scale = points
        .iter()
        .flat_map(|v| v.iter())
        .fold(0.0f64, |a, x| a.max(x.abs()))
        .max(f64::MIN_POSITIVE);
    let tol = 1e-10 * scale;
    let mut best: Option<(Vec<f64>, f64)> = None;
    for k in 1..=(d + 1).min(points.len()) {
        subsets(points.len(), k, |idx| {
            let pts: Vec<&[f64]> = idx.iter().map(|&i| points[i].as_slice()).collect();
            if let Some((c, r)) = circumcentre(&pts) {
                if best.as_ref().is_some_and(|b| r >= b.1) {
                    return;
                }
                if points.iter().all(|p| linalg::dist(p, &c) <= r + tol) {
                    best = Some((c, r));
                }
            }
        });
    }
    best.expect("the ball through a farthest pair or triple always qualifies")
}

/// Number of support subsets the exhaustive search visits.
pub fn meb_budget(points: usize, d: usize) -> u64 {
    let mut total = 0u64;
    for k in 1..=(d + 1).min(points) {
        let mut c = 1u64;
        for i in 0..k {
            c = c * (points - i) as u64 / (i + 1) as u64;
        }
        total += c;
    }
    total
}

fn width_of(m: &ConvexPolytope, u: &[f64]) -> f64 {
    let (mut hi, mut lo) = (f64::NEG_INFINITY, f64::INFINITY);
    for v in m.vertices() {
        let t = dot(v, u);
        hi = hi.max(t);
        lo = lo.min(t);
    }
    hi - lo
}

fn normalise(v: Vec<f64>) -> Vec<f64> {
    let r = linalg::norm(&v);
    v.into_iter().map(|x| x / r).collect()
}

/// Coarse grid candidates on S^{n-1}: a Fibonacci lattice of 4096 points
/// for n = 3, 4096 angles for n = 2, the product rule nodes otherwise.
fn width_grid(n: usize) -> Vec<Vec<f64>> {
    match n {
        2 => (0..4096)
            .map(|k| {
                let a = std::f64::consts::PI * k as f64 / 4096.0;
                vec![a.cos(), a.sin()]
            })
            .collect(),
        3 => {
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            (0..4096)
                .map(|k| {
                    let z = 1.0 - (k as f64 + 0.5) / 4096.0 * 2.0;
                    let r = (1.0 - z * z).sqrt();
                    let a = golden * k as f64;
                    vec![r * a.cos(), r * a.sin(), z]
                })
                .collect()
        }
        _ => spherical::make_quadrature(n, 1).map(|q| q.nodes).unwrap_or_default(),
    }
}

/// Orthonormal basis of u^perp (Gram-Schmidt against the axes).
fn tangent_basis(u: &[f64]) -> Vec<Vec<f64>> {
    let n = u.len();
    let mut basis: Vec<Vec<f64>> = vec![u.to_vec()];
    for i in 0..n {
        let mut v = linalg::unit_axis(n, i);
        for b in &basis {
            let c = dot(&v, b);
            for k in 0..n {
                v[k] -= c * b[k];
            }
        }
        let r = linalg::norm(&v);
        if r > 1e-6 {
            basis.push(v.into_iter().map(|x| x / r).collect());
        }
        if basis.len() == n {
            break;
        }
    }
    basis.remove(0);
    basis
}

/// Pattern search over the sphere from `start`: try +-steps along tangent
/// directions and their pairwise sums, halve the step on failure.
fn refine(m: &ConvexPolytope, start: &[f64]) -> (Vec<f64>, f64) {
    let mut u = start.to_vec();
    let mut w = width_of(m, &u);
    let mut step = 0.05;
    while step > 1e-12 {
        let t = tangent_basis(&u);
        let mut dirs: Vec<Vec<f64>> = Vec::new();
        for a in 0..t.len() {
            dirs.push(t[a].clone());
            dirs.push(linalg::scaled(&t[a], -1.0));
            for b in a + 1..t.len() {
                for (sa, sb) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                    dirs.push(normalise(linalg::add(&linalg::scaled(&t[a], sa), &linalg::scaled(&t[b], sb))));
                }
            }
        }
        let mut improved = false;
        for d in dirs {
            let cand = normalise(linalg::add(&u, &linalg::scaled(&d, step)));
            let wc = width_of(m, &cand);
            if wc < w {
                u = cand;
                w = wc;
                improved = true;
                break;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (u, w)
}

/// Approximate minimal width direction of `m` and the width attained.
pub fn min_width_search(m: &ConvexPolytope) -> Result<(Direction, f64)> {
    let n = m.dim();
    if n < 2 {
        return Err(GeomError::InvalidParameter("width search needs n >= 2".into()));
    }
    let grid = width_grid(n);
    let mut scored: Vec<(f64, usize)> = grid.iter().enumerate().map(|(i, u)| (width_of(m, u), i)).collect();
    scored.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut best: Option<(Vec<f64>, f64)> = None;
    for &(_, i) in scored.iter().take(8) {
        let (u, w) = refine(m, &grid[i]);
        if best.as_ref().is_none_or(|b| w < b.1) {
            best = Some((u, w));
        }
    }
    let (u, w) = best.expect("grid is non-empty");
    Ok((Direction::new(u)?, w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::*;
    use crate::functionals;

    #[test]
    fn exhaustive_ball_examples() {
        let (_, r) = meb_exhaustive(&[vec![-1.0, 0.0], vec![1.0, 0.0]]);
        assert!((r - 1.0).abs() < 1e-15);
        let h = 3f64.sqrt() / 2.0;
        let (_, r) = meb_exhaustive(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.5, h]]);
        assert!((r - 1.0 / 3f64.sqrt()).abs() < 1e-14);
        let (c, r) = meb_exhaustive(isosceles(0.5).unwrap().vertices());
        assert!((r - 1.0).abs() < 1e-14);
        assert!(linalg::norm(&c) < 1e-14);
        assert_eq!(meb_budget(4, 2), 4 + 6 + 4);
    }

    #[test]
    fn monte_carlo_v1() {
        let cube = box_body(&[1.0, 1.0, 1.0]).unwrap();
        let e = mc_v1(&cube, 100_000, 1).unwrap();
        assert!((e.value - 3.0).abs() < 4.0 * e.std_error, "{e:?}");
        let seg = segment(&Direction::axis(2, 0), 2.0).unwrap();
        let e = mc_v1(&seg, 100_000, 2).unwrap();
        assert!((e.value - 2.0).abs() < 4.0 * e.std_error);
        assert!(mc_v1(&seg, 10, 2).is_err());
    }

    #[test]
    fn monte_carlo_volume() {
        let t = ConvexPolytope::new(2, vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let hex = t.minkowski_sum(&t.negate()).unwrap();
        let e = volume_mc(&hex, 100_000, 5).unwrap();
        assert!((e.value - 3.0).abs() < 4.0 * e.std_error);
        let simplex = ConvexPolytope::new(
            3,
            vec![vec![0.0; 3], vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]],
        )
        .unwrap();
        let e = volume_mc(&simplex, 100_000, 6).unwrap();
        assert!((e.value - 1.0 / 6.0).abs() < 4.0 * e.std_error);
        assert!(volume_mc(&segment(&Direction::axis(2, 0), 1.0).unwrap(), 100, 0).is_err());
    }

    #[test]
    fn width_search_finds_thin_direction() {
        let b = thin_box(3, 0.01, 0.01).unwrap();
        let (_, w) = min_width_search(&b).unwrap();
        assert!((w - 0.01).abs() < 1e-8, "{w}");
        let sq = box_body(&[1.0, 1.0, 0.0]).unwrap();
        let (u, w) = min_width_search(&sq).unwrap();
        assert!(w < 1e-10);
        assert!(u[2].abs() > 1.0 - 1e-9);
    }

    #[test]
    fn welzl_agrees_with_exhaustive() {
        for seed in 0..20 {
            let p = random_polytope(3, 10, seed).unwrap();
            let fast = functionals::circumradius(&p);
            let (_, slow) = meb_exhaustive(p.vertices());
            assert!((fast - slow).abs() < 1e-9);
        }
    }
}
