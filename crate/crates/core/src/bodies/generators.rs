//! Test-family generators. All random generators are deterministic in their
//! seed.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{ConvexPolytope, Direction, ProjectionMap};
use crate::error::{GeomError, Result};
use crate::linalg;
use crate::rng::stream_rng;

fn positive(name: &str, x: f64) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(GeomError::InvalidParameter(format!("{name} must be positive, got {x}")));
    }
    Ok(())
}

fn ambient(n: usize) -> Result<()> {
    if n < 2 {
        return Err(GeomError::InvalidParameter(format!("dimension must be >= 2, got {n}")));
    }
    Ok(())
}

/// Segment of length `len` along `e`, centred at the origin.
pub fn segment(e: &Direction, len: f64) -> Result<ConvexPolytope> {
    positive("segment length", len)?;
    let half = linalg::scaled(e, len / 2.0);
    ConvexPolytope::new(e.dim(), vec![linalg::scaled(&half, -1.0), half])
}

/// Axis-parallel box [0, a_1] x ... x [0, a_n]. Zero side lengths give
/// lower-dimensional boxes.
pub fn box_body(sides: &[f64]) -> Result<ConvexPolytope> {
    let n = sides.len();
    if n == 0 || n > 20 {
        return Err(GeomError::InvalidParameter("box dimension out of range".into()));
    }
    if sides.iter().any(|&a| !(a >= 0.0) || !a.is_finite()) {
        return Err(GeomError::InvalidParameter("box sides must be >= 0".into()));
    }
    let pts = (0..1usize << n)
        .map(|m| (0..n).map(|k| if (m >> k) & 1 == 1 { sides[k] } else { 0.0 }).collect())
        .collect();
    ConvexPolytope::new(n, pts)
}

/// Triangle [(-1,0), (1,0), (0,t)].
pub fn isosceles(t: f64) -> Result<ConvexPolytope> {
    positive("apex height", t)?;
    ConvexPolytope::new(2, vec![vec![-1.0, 0.0], vec![1.0, 0.0], vec![0.0, t]])
}

/// Regular simplex in R^n with circumradius 1, centred at the origin.
pub fn simplex_regular(n: usize) -> Result<ConvexPolytope> {
    ambient(n)?;
    // standard basis of R^{n+1} lies in the hyperplane sum x = 1
    let ones = Direction::new(vec![1.0; n + 1])?;
    let map = ProjectionMap::new(&ones);
    let c = 1.0 / (n + 1) as f64;
    let mut pts: Vec<Vec<f64>> = (0..=n)
        .map(|i| {
            let mut v = vec![-c; n + 1];
            v[i] += 1.0;
            map.apply(&v)
        })
        .collect();
    let r = linalg::norm(&pts[0]);
    for p in &mut pts {
        *p = linalg::scaled(p, 1.0 / r);
    }
    ConvexPolytope::new(n, pts)
}

/// Cross-polytope conv{+-e_i}.
pub fn cross_polytope(n: usize) -> Result<ConvexPolytope> {
    ambient(n)?;
    let mut pts = Vec::with_capacity(2 * n);
    for i in 0..n {
        pts.push(linalg::unit_axis(n, i));
        pts.push(linalg::scaled(&linalg::unit_axis(n, i), -1.0));
    }
    ConvexPolytope::new(n, pts)
}

/// Convex hull of `k` uniform points of the cube [-1, 1]^n.
pub fn random_polytope(n: usize, k: usize, seed: u64) -> Result<ConvexPolytope> {
    ambient(n)?;
    if k < n + 1 {
        return Err(GeomError::InvalidParameter(format!(
            "need k >= n+1 points for a full-dimensional body, got k={k}, n={n}"
        )));
    }
    let mut rng = stream_rng(seed, 0x5eed_0001);
    let pts = (0..k)
        .map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect();
    ConvexPolytope::new(n, pts)
}

/// Convex polygon approximating the unit disk: regular `k`-gon inscribed in
/// the unit circle.
pub fn regular_polygon(k: usize) -> Result<ConvexPolytope> {
    if k < 3 {
        return Err(GeomError::InvalidParameter("polygon needs k >= 3".into()));
    }
    let pts = (0..k)
        .map(|i| {
            let a = 2.0 * std::f64::consts::PI * i as f64 / k as f64;
            vec![a.cos(), a.sin()]
        })
        .collect();
    ConvexPolytope::new(2, pts)
}

/// Segment [-L/2 e_1, L/2 e_1] in R^n together with eight extra points at
/// distance at most `delta` from it; the endpoints stay a diameter pair.
pub fn perturbed_segment(n: usize, len: f64, delta: f64, seed: u64) -> Result<ConvexPolytope> {
    ambient(n)?;
    positive("segment length", len)?;
    if !(delta >= 0.0) || delta >= 0.1 * len {
        return Err(GeomError::InvalidParameter(format!(
            "perturbation must satisfy 0 <= delta < L/10, got {delta}"
        )));
    }
    let mut rng = stream_rng(seed, 0x5eed_0002);
    let mut pts = vec![
        linalg::scaled(&linalg::unit_axis(n, 0), -len / 2.0),
        linalg::scaled(&linalg::unit_axis(n, 0), len / 2.0),
    ];
    for _ in 0..8 {
        let mut off: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        off[0] = 0.0;
        let on = linalg::norm(&off).max(f64::MIN_POSITIVE);
        let r = delta * rng.random_range(0.0..1.0);
        let mut p = linalg::scaled(&off, r / on);
        p[0] = rng.random_range(-0.45 * len..0.45 * len);
        pts.push(p);
    }
    ConvexPolytope::new(n, pts)
}

/// The body conv{+-sqrt(eps) e_1, +-lambda e_2, +-n e_3, ..., +-n e_n}.
pub fn remark_body(n: usize, lambda: f64, eps: f64) -> Result<ConvexPolytope> {
    if n < 3 {
        return Err(GeomError::InvalidParameter("remark body needs n >= 3".into()));
    }
    positive("lambda", lambda)?;
    if !(eps > 0.0 && eps < 1.0) {
        return Err(GeomError::InvalidParameter(format!("eps must lie in (0, 1), got {eps}")));
    }
    let mut semi = vec![n as f64; n];
    semi[0] = eps.sqrt();
    semi[1] = lambda;
    let mut pts = Vec::with_capacity(2 * n);
    for (i, &a) in semi.iter().enumerate() {
        pts.push(linalg::scaled(&linalg::unit_axis(n, i), a));
        pts.push(linalg::scaled(&linalg::unit_axis(n, i), -a));
    }
    ConvexPolytope::new(n, pts)
}

/// Direction e in lin{e_1, e_2} with <e, e_1> = 1 - eps/2, companion of
/// [`remark_body`].
pub fn remark_direction(n: usize, eps: f64) -> Result<Direction> {
    if n < 2 || !(eps > 0.0 && eps < 1.0) {
        return Err(GeomError::InvalidParameter("remark direction needs n >= 2, eps in (0,1)".into()));
    }
    let c = 1.0 - eps / 2.0;
    let mut e = vec![0.0; n];
    e[0] = c;
    e[1] = (1.0 - c * c).sqrt();
    Direction::new(e)
}

/// Box [-1/2, 1/2]^{n-1} x [0, h] rotated in the (e_1, e_n)-plane by `tilt`
/// radians, so that its thin axis makes angle `tilt` with e_n.
pub fn thin_box(n: usize, h: f64, tilt: f64) -> Result<ConvexPolytope> {
    ambient(n)?;
    positive("box height", h)?;
    let mut sides = vec![1.0; n];
    sides[n - 1] = h;
    let b = box_body(&sides)?;
    let mut shift = vec![-0.5; n];
    shift[n - 1] = 0.0;
    let b = b.translate(&shift)?;
    b.linear_image(&plane_rotation(n, 0, n - 1, tilt))
}

/// Rotation by `angle` in the coordinate plane (i, j).
pub fn plane_rotation(n: usize, i: usize, j: usize, angle: f64) -> Vec<Vec<f64>> {
    let mut m: Vec<Vec<f64>> = (0..n).map(|k| linalg::unit_axis(n, k)).collect();
    let (s, c) = angle.sin_cos();
    m[i][i] = c;
    m[i][j] = -s;
    m[j][i] = s;
    m[j][j] = c;
    m
}

/// Haar-random orthogonal matrix with determinant +1 (QR of a Gaussian
/// matrix with sign correction).
pub fn random_rotation(n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = stream_rng(seed, 0x5eed_0003);
    let g = nalgebra::DMatrix::<f64>::from_fn(n, n, |_, _| StandardNormal.sample(&mut rng));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            for i in 0..n {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    if q.determinant() < 0.0 {
        for i in 0..n {
            q[(i, 0)] = -q[(i, 0)];
        }
    }
    (0..n).map(|i| (0..n).map(|j| q[(i, j)]).collect()).collect()
}
