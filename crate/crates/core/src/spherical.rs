//! Integration on the unit sphere: ball volumes, spherical-cap integrals
//! and their ratio profile, the dimensional constants built from them, and
//! quadrature rules (deterministic product rules and seeded Monte Carlo) for
//! the Dirichlet-Voronoi lower bound on V_1 of spherical point sets.

use std::f64::consts::PI;
use std::sync::OnceLock;

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::bodies::Direction;
use crate::error::{GeomError, Result};
use crate::linalg::dot;
use crate::lp;
use crate::rng::stream_rng;

/// Node count of the fixed 1-D Gauss-Legendre rule.
pub const GL_NODES: usize = 64;

/// Gauss-Legendre nodes and weights on [-1, 1] (Newton iteration on P_m).
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; m];
    let mut w = vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=m {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if m == 1 {
                p1 = z;
                p0 = 1.0;
            }
            dp = m as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[m - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[m - 1 - i] = wi;
    }
    (x, w)
}

fn gl64() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(GL_NODES))
}

/// Integral of `f` over [a, b] with the fixed 64-node rule.
pub fn integrate_1d(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let (x, w) = gl64();
    let (c, h) = ((a + b) / 2.0, (b - a) / 2.0);
    x.iter().zip(w).map(|(xi, wi)| wi * f(c + h * xi)).sum::<f64>() * h
}

/// Volume of the m-dimensional unit ball, pi^{m/2} / Gamma(m/2 + 1).
pub fn kappa(m: usize) -> f64 {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let mut t = vec![1.0, 2.0];
        for k in 2..=32 {
            t.push(t[k - 2] * 2.0 * PI / k as f64);
        }
        t
    });
    table.get(m).copied().unwrap_or_else(|| kappa_gamma(m))
}

fn kappa_gamma(m: usize) -> f64 {
    let h = m as f64 / 2.0;
    PI.powf(h) / statrs::function::gamma::gamma(h + 1.0)
}

/// H^k(S^k) = (k+1) kappa_{k+1}; S^0 is two points.
pub fn sphere_area(k: usize) -> f64 {
    (k + 1) as f64 * kappa(k + 1)
}

/// rho(s) = sin(s)^{n-2}.
pub fn rho(n: usize, s: f64) -> f64 {
    s.sin().powi(n as i32 - 2)
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(GeomError::InvalidParameter(format!("sphere dimension n must be >= 2, got {n}")));
    }
    Ok(())
}

/// H^{n-1} of the cap B(z, alpha) in S^{n-1}.
pub fn cap_measure(n: usize, alpha: f64) -> Result<f64> {
    check_n(n)?;
    if !(alpha > 0.0 && alpha <= PI) {
        return Err(GeomError::InvalidParameter(format!("cap radius must lie in (0, pi], got {alpha}")));
    }
    Ok(sphere_area(n - 2) * integrate_1d(|s| rho(n, s), 0.0, alpha))
}

/// Integral of <z, u> over the cap B(z, alpha).
pub fn cap_first_moment(n: usize, alpha: f64) -> Result<f64> {
    check_n(n)?;
    if !(alpha > 0.0 && alpha <= PI) {
        return Err(GeomError::InvalidParameter(format!("cap radius must lie in (0, pi], got {alpha}")));
    }
    Ok(sphere_area(n - 2) * integrate_1d(|s| s.cos() * rho(n, s), 0.0, alpha))
}

/// Mean of <z, u> over the cap B(z, alpha), alpha in (0, pi/2].
pub fn f_profile(n: usize, alpha: f64) -> Result<f64> {
    check_n(n)?;
    if !(alpha > 0.0 && alpha <= PI / 2.0 + 1e-15) {
        return Err(GeomError::InvalidParameter(format!("alpha must lie in (0, pi/2], got {alpha}")));
    }
    let num = integrate_1d(|s| s.cos() * rho(n, s), 0.0, alpha);
    let den = integrate_1d(|s| rho(n, s), 0.0, alpha);
    Ok(num / den)
}

/// Value of the profile on the hemisphere: 2 kappa_{n-1} / (n kappa_n).
pub fn f_hemisphere(n: usize) -> f64 {
    2.0 * kappa(n - 1) / (n as f64 * kappa(n))
}

/// Grid of epsilons used for the c_1 estimate: (pi/6) k / 200, k = 1..200.
pub fn c1_grid() -> impl Iterator<Item = f64> {
    (1..=200).map(|k| PI / 6.0 * k as f64 / 200.0)
}

/// Smallest slope (f(pi/2 - eps)/f(pi/2) - 1)/eps over the grid.
pub fn c1_estimate(n: usize) -> Result<f64> {
    check_n(n)?;
    let base = f_profile(n, PI / 2.0)?;
    let mut best = f64::INFINITY;
    for eps in c1_grid() {
        let r = (f_profile(n, PI / 2.0 - eps)? / base - 1.0) / eps;
        best = best.min(r);
    }
    Ok(best)
}

/// Lower bound on c_1 from the explicit derivative estimate on
/// [pi/3, pi/2]: f'(alpha) <= -c_2 with
/// c_2 = sin(pi/3)^{n-2} (cos(pi/6) - cos(pi/3)) int_0^{pi/6} rho / (int_0^{pi/2} rho)^2,
/// so f(pi/2 - eps) - f(pi/2) >= c_2 eps and c_1 >= c_2 / f(pi/2).
pub fn c1_closed_form_bound(n: usize) -> Result<f64> {
    check_n(n)?;
    let full = integrate_1d(|s| rho(n, s), 0.0, PI / 2.0);
    let small = integrate_1d(|s| rho(n, s), 0.0, PI / 6.0);
    let c2 = (PI / 3.0).sin().powi(n as i32 - 2) * ((PI / 6.0).cos() - (PI / 3.0).cos()) * small
        / (full * full);
    Ok(c2 / f_profile(n, PI / 2.0)?)
}

/// H^{n-2} of the band {x in S^{n-2}: 0 <= <x, u> <= tau}, n >= 3.
pub fn band_measure(n: usize, tau: f64) -> f64 {
    let lo = tau.clamp(0.0, 1.0).acos();
    sphere_area(n - 3) * integrate_1d(|t| t.sin().powi(n as i32 - 3), lo, PI / 2.0)
}

/// tau(n): the band {0 <= <x,u> <= tau} of S^{n-2} has measure
/// H^{n-2}(S^{n-2}) / (n(n+1)); tau(2) = 1.
pub fn tau(n: usize) -> Result<f64> {
    check_n(n)?;
    if n == 2 {
        return Ok(1.0);
    }
    let target = sphere_area(n - 2) / (n * (n + 1)) as f64;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while hi - lo > 1e-15 {
        let mid = 0.5 * (lo + hi);
        if band_measure(n, mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Dimensional constants assembled from the profile f.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PaperConstants {
    pub n: usize,
    pub tau: f64,
    pub c1_est: f64,
    pub c1_bound: f64,
    pub c3_est: f64,
    pub tube_factor: f64,
}

impl PaperConstants {
    pub fn compute(n: usize) -> Result<Self> {
        let tau = tau(n)?;
        let c1_est = c1_estimate(n)?;
        let c3_est = kappa(n - 1) * c1_est * tau / (2.0 * (n * (n + 1)) as f64);
        Ok(PaperConstants {
            n,
            tau,
            c1_est,
            c1_bound: c1_closed_form_bound(n)?,
            c3_est,
            tube_factor: (3.0 + 3.0 / (c3_est * c3_est)).sqrt(),
        })
    }
}

/// Table of (alpha, f(alpha)) at alpha = (pi/2) k / steps, k = 1..steps.
pub fn f_table(n: usize, steps: usize) -> Result<Vec<[f64; 2]>> {
    (1..=steps)
        .map(|k| {
            let a = PI / 2.0 * k as f64 / steps as f64;
            Ok([a, f_profile(n, a)?])
        })
        .collect()
}

// ---------------------------------------------------------------------------
// quadrature on S^{n-1}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum QuadratureKind {
    /// Gauss-Legendre in each polar angle, uniform in the azimuth.
    Product { level: u32 },
    /// Uniform samples in antipodal pairs (u, -u) stored consecutively.
    MonteCarlo { pairs: usize, seed: u64 },
}

/// Nodes and weights for integration against H^{n-1} on S^{n-1}.
#[derive(Debug, Clone)]
pub struct SphericalQuadrature {
    pub dim: usize,
    pub nodes: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    pub kind: QuadratureKind,
}

/// An integral estimate; `std_error` is zero for deterministic rules.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

/// Sum of `xs` in fixed-size chunks, combined in order; the result does not
/// depend on the number of worker threads.
pub(crate) fn stable_sum(xs: &[f64]) -> f64 {
    xs.par_chunks(4096)
        .map(|c| c.iter().sum::<f64>())
        .collect::<Vec<f64>>()
        .iter()
        .sum()
}

impl SphericalQuadrature {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        stable_sum(&self.weights)
    }

    pub fn integrate(&self, f: impl Fn(&[f64]) -> f64 + Sync) -> Estimate {
        match self.kind {
            QuadratureKind::Product { .. } => {
                let terms: Vec<f64> = self
                    .nodes
                    .par_iter()
                    .zip(&self.weights)
                    .map(|(u, w)| w * f(u))
                    .collect();
                Estimate {
                    value: stable_sum(&terms),
                    std_error: 0.0,
                }
            }
            QuadratureKind::MonteCarlo { pairs, .. } => {
                let area = sphere_area(self.dim - 1);
                let ys: Vec<f64> = (0..pairs)
                    .into_par_iter()
                    .map(|i| 0.5 * (f(&self.nodes[2 * i]) + f(&self.nodes[2 * i + 1])))
                    .collect();
                let mean = stable_sum(&ys) / pairs as f64;
                let dev: Vec<f64> = ys.iter().map(|y| (y - mean) * (y - mean)).collect();
                let var = stable_sum(&dev) / (pairs.max(2) - 1) as f64;
                Estimate {
                    value: area * mean,
                    std_error: area * (var / pairs as f64).sqrt(),
                }
            }
        }
    }
}

/// One-dimensional rule for int_0^pi g(t) sin^k(t) dt, rescaled so that it
/// integrates the weight exactly.
fn polar_rule(m: usize, k: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(m);
    let nodes: Vec<f64> = x.iter().map(|xi| PI / 2.0 * (xi + 1.0)).collect();
    let mut wts: Vec<f64> = nodes
        .iter()
        .zip(&w)
        .map(|(t, wi)| PI / 2.0 * wi * t.sin().powi(k as i32))
        .collect();
    let exact = sin_power_integral(k);
    let s: f64 = wts.iter().sum();
    for v in &mut wts {
        *v *= exact / s;
    }
    (nodes, wts)
}

/// int_0^pi sin^k = H^{k+1}(S^{k+1}) / H^k(S^k).
fn sin_power_integral(k: usize) -> f64 {
    sphere_area(k + 1) / sphere_area(k)
}

/// Polar node count per angle at a refinement level.
pub fn polar_nodes(level: u32) -> usize {
    4usize << level
}

/// Visit every node of the product rule of the given level, in a fixed
/// order, without materialising the node list. The closure receives the
/// node and its weight; the index of the first polar angle (or azimuth for
/// n = 2) is passed so callers can parallelise over it.
pub(crate) fn product_rule_blocks(n: usize, level: u32) -> ProductRule {
    let m = polar_nodes(level);
    let polar: Vec<(Vec<f64>, Vec<f64>)> = (0..n.saturating_sub(2)).map(|j| polar_rule(m, n - 2 - j)).collect();
    let naz = 2 * m;
    let az: Vec<f64> = (0..naz).map(|j| (j as f64 + 0.5) * PI / m as f64).collect();
    ProductRule {
        n,
        polar,
        azimuth: az,
        az_weight: PI / m as f64,
    }
}

pub(crate) struct ProductRule {
    n: usize,
    polar: Vec<(Vec<f64>, Vec<f64>)>,
    azimuth: Vec<f64>,
    az_weight: f64,
}

impl ProductRule {
    pub fn len(&self) -> usize {
        self.polar.iter().map(|p| p.0.len()).product::<usize>() * self.azimuth.len()
    }

    /// Number of outer blocks (first angle's node count).
    pub fn blocks(&self) -> usize {
        if self.polar.is_empty() {
            self.azimuth.len()
        } else {
            self.polar[0].0.len()
        }
    }

    /// Visit all nodes of outer block `b` in a fixed order.
    pub fn visit_block(&self, b: usize, mut visit: impl FnMut(&[f64], f64)) {
        let n = self.n;
        let mut u = vec![0.0; n];
        if self.polar.is_empty() {
            let (s, c) = self.azimuth[b].sin_cos();
            u[0] = c;
            u[1] = s;
            visit(&u, self.az_weight);
            return;
        }
        let depth = self.polar.len();
        let mut idx = vec![0usize; depth];
        idx[0] = b;
        loop {
            // assemble the point for the current polar indices
            let mut sprod = 1.0;
            let mut w = 1.0;
            for (j, &ij) in idx.iter().enumerate() {
                let t = self.polar[j].0[ij];
                w *= self.polar[j].1[ij];
                u[j] = sprod * t.cos();
                sprod *= t.sin();
            }
            for &phi in &self.azimuth {
                let (s, c) = phi.sin_cos();
                u[n - 2] = sprod * c;
                u[n - 1] = sprod * s;
                visit(&u, w * self.az_weight);
            }
            // advance the inner indices (odometer, first index fixed)
            let mut j = depth;
            loop {
                if j == 1 {
                    return;
                }
                j -= 1;
                idx[j] += 1;
                if idx[j] < self.polar[j].0.len() {
                    break;
                }
                idx[j] = 0;
            }
        }
    }

    /// Integral of `f` with deterministic block-ordered summation.
    pub fn integrate(&self, f: impl Fn(&[f64]) -> f64 + Sync) -> f64 {
        let parts: Vec<f64> = (0..self.blocks())
            .into_par_iter()
            .map(|b| {
                let mut s = 0.0;
                self.visit_block(b, |u, w| s += w * f(u));
                s
            })
            .collect();
        parts.iter().sum()
    }
}

/// Product rule on S^{n-1}: 4 * 2^level Gauss-Legendre nodes per polar
/// angle and twice that many uniform azimuth nodes.
pub fn make_quadrature(n: usize, level: u32) -> Result<SphericalQuadrature> {
    check_n(n)?;
    let rule = product_rule_blocks(n, level);
    if rule.len() > 20_000_000 {
        return Err(GeomError::InvalidParameter(format!(
            "product rule with {} nodes is too large; lower the level",
            rule.len()
        )));
    }
    let mut nodes = Vec::with_capacity(rule.len());
    let mut weights = Vec::with_capacity(rule.len());
    for b in 0..rule.blocks() {
        rule.visit_block(b, |u, w| {
            nodes.push(u.to_vec());
            weights.push(w);
        });
    }
    Ok(SphericalQuadrature {
        dim: n,
        nodes,
        weights,
        kind: QuadratureKind::Product { level },
    })
}

/// Samples per independently seeded chunk.
pub const SAMPLE_CHUNK: usize = 4096;

/// `count` uniform points of S^{n-1}. Chunk `i` is drawn from sub-stream
/// `i` of `seed`, so the output does not depend on the thread count.
pub fn sample_sphere(n: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let chunks = count.div_ceil(SAMPLE_CHUNK);
    (0..chunks)
        .into_par_iter()
        .flat_map_iter(|c| {
            let mut rng = stream_rng(seed, c as u64);
            let len = SAMPLE_CHUNK.min(count - c * SAMPLE_CHUNK);
            (0..len)
                .map(|_| loop {
                    let g: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
                    let r = dot(&g, &g).sqrt();
                    if r > 1e-300 {
                        break g.into_iter().map(|x| x / r).collect::<Vec<f64>>();
                    }
                })
                .collect::<Vec<_>>()
        })
        .collect()
}

/// Monte Carlo rule with `pairs` antipodal pairs of uniform points.
pub fn monte_carlo_quadrature(n: usize, pairs: usize, seed: u64) -> Result<SphericalQuadrature> {
    check_n(n)?;
    if pairs < 2 {
        return Err(GeomError::InvalidParameter("need at least two sample pairs".into()));
    }
    let area = sphere_area(n - 1);
    let mut nodes = Vec::with_capacity(2 * pairs);
    for u in sample_sphere(n, pairs, seed) {
        let neg: Vec<f64> = u.iter().map(|x| -x).collect();
        nodes.push(u);
        nodes.push(neg);
    }
    Ok(SphericalQuadrature {
        dim: n,
        weights: vec![area / (2 * pairs) as f64; 2 * pairs],
        nodes,
        kind: QuadratureKind::MonteCarlo { pairs, seed },
    })
}

fn check_spherical_set(points: &[Direction], quad: &SphericalQuadrature) -> Result<()> {
    if points.is_empty() {
        return Err(GeomError::Precondition("empty point set".into()));
    }
    for p in points {
        crate::error::check_dim(quad.dim, p.dim())?;
    }
    let pts: Vec<Vec<f64>> = points.iter().map(|p| p.to_vec()).collect();
    if !lp::in_convex_hull(&pts, &vec![0.0; quad.dim])? {
        return Err(GeomError::Precondition(
            "origin is not in the convex hull of the points".into(),
        ));
    }
    Ok(())
}

fn nearest_site(points: &[Direction], u: &[f64]) -> (usize, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, p) in points.iter().enumerate() {
        let t = dot(p, u);
        if t > best.1 {
            best = (i, t);
        }
    }
    best
}

/// V_1 of conv(points) as (1/kappa_{n-1}) * integral of max_i <u, x_i>.
/// Requires the origin to lie in the hull.
pub fn v1_spherical_hull(points: &[Direction], quad: &SphericalQuadrature) -> Result<Estimate> {
    check_spherical_set(points, quad)?;
    let k = kappa(quad.dim - 1);
    let est = quad.integrate(|u| nearest_site(points, u).1);
    Ok(Estimate {
        value: est.value / k,
        std_error: est.std_error / k,
    })
}

/// Per-cell data of the spherical Dirichlet-Voronoi partition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CellMoment {
    /// (1/kappa_{n-1}) * integral over the cell of <x, x_i>.
    pub moment: f64,
    /// H^{n-1} of the cell.
    pub area: f64,
}

/// Moments of the Dirichlet-Voronoi cells of `points`; ties go to the
/// lowest index. The moments sum to [`v1_spherical_hull`] on the same rule.
pub fn dv_partition_moment(points: &[Direction], quad: &SphericalQuadrature) -> Result<Vec<CellMoment>> {
    check_spherical_set(points, quad)?;
    let k = points.len();
    let kap = kappa(quad.dim - 1);
    let mut moments = vec![0.0; k];
    let mut areas = vec![0.0; k];
    for (u, w) in quad.nodes.iter().zip(&quad.weights) {
        let (i, t) = nearest_site(points, u);
        moments[i] += w * t;
        areas[i] += w;
    }
    Ok(moments
        .into_iter()
        .zip(areas)
        .map(|(m, a)| CellMoment { moment: m / kap, area: a })
        .collect())
}
