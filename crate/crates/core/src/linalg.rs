//! Small dense linear-algebra helpers on `&[f64]` rows, plus an exact
//! orientation predicate used by the hull when the floating-point sign is
//! too close to zero to trust.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scaled(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn unit_axis(n: usize, i: usize) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[i] = 1.0;
    e
}

/// Determinant by LU with partial pivoting. `rows` is a square matrix.
pub fn det(rows: &[Vec<f64>]) -> f64 {
    let n = rows.len();
    if n == 0 {
        return 1.0;
    }
    let mut a: Vec<Vec<f64>> = rows.to_vec();
    let mut d = 1.0;
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if a[r][col].abs() > a[piv][col].abs() {
                piv = r;
            }
        }
        if a[piv][col] == 0.0 {
            return 0.0;
        }
        if piv != col {
            a.swap(piv, col);
            d = -d;
        }
        let p = a[col][col];
        d *= p;
        for r in col + 1..n {
            let f = a[r][col] / p;
            if f != 0.0 {
                let (top, rest) = a.split_at_mut(r);
                for (x, y) in rest[0][col..].iter_mut().zip(&top[col][col..]) {
                    *x -= f * y;
                }
            }
        }
    }
    d
}

/// Decompose a finite f64 into (mantissa, exponent) with value = m * 2^e.
fn decompose(x: f64) -> (i64, i32) {
    if x == 0.0 {
        return (0, 0);
    }
    let bits = x.to_bits();
    let sign = if bits >> 63 == 0 { 1 } else { -1 };
    let exp = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & ((1u64 << 52) - 1);
    let (m, e) = if exp == 0 {
        (frac as i64, -1074)
    } else {
        ((frac | (1u64 << 52)) as i64, exp - 1075)
    };
    (sign * m, e)
}

/// Exact sign of `det[p_1 - p_0, ..., p_{d-1} - p_0, x - p_0]`, where the
/// simplex vertices and the query point are exact binary floating-point
/// values. Uses fraction-free Bareiss elimination on big integers.
pub fn orient_exact(simplex: &[&[f64]], x: &[f64]) -> i8 {
    let d = x.len();
    let mut min_exp = i32::MAX;
    let mut scan = |v: &[f64]| {
        for &c in v {
            if c != 0.0 {
                min_exp = min_exp.min(decompose(c).1);
            }
        }
    };
    for p in simplex {
        scan(p);
    }
    scan(x);
    if min_exp == i32::MAX {
        return 0;
    }
    let to_int = |c: f64| -> BigInt {
        let (m, e) = decompose(c);
        BigInt::from(m) << ((e - min_exp).max(0) as usize)
    };
    let base: Vec<BigInt> = simplex[0].iter().map(|&c| to_int(c)).collect();
    let mut a: Vec<Vec<BigInt>> = simplex[1..]
        .iter()
        .map(|p| p.iter().zip(&base).map(|(&c, b)| to_int(c) - b).collect())
        .collect();
    a.push(x.iter().zip(&base).map(|(&c, b)| to_int(c) - b).collect());
    debug_assert_eq!(a.len(), d);

    let mut sign: i8 = 1;
    let mut prev = BigInt::from(1);
    for k in 0..d {
        if a[k][k].is_zero() {
            match (k + 1..d).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..d {
            for j in k + 1..d {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    let last = &a[d - 1][d - 1];
    if last.is_zero() {
        0
    } else if last.is_positive() {
        sign
    } else {
        -sign
    }
}

/// Relative threshold below which the floating-point orientation is
/// re-evaluated exactly.
pub const EXACT_FALLBACK_REL: f64 = 1e-10;

/// Sign of the orientation determinant, exact when the float filter is
/// inconclusive.
pub fn orient(simplex: &[&[f64]], x: &[f64]) -> i8 {
    let p0 = simplex[0];
    let mut rows: Vec<Vec<f64>> = simplex[1..].iter().map(|p| sub(p, p0)).collect();
    rows.push(sub(x, p0));
    let hadamard: f64 = rows.iter().map(|r| norm(r)).product();
    let d = det(&rows);
    if d.abs() > EXACT_FALLBACK_REL * hadamard {
        if d > 0.0 {
            1
        } else {
            -1
        }
    } else if hadamard == 0.0 {
        0
    } else {
        orient_exact(simplex, x)
    }
}

/// Orthonormal frame adapted to the affine hull of a point set.
#[derive(Debug, Clone)]
pub struct AffineFrame {
    pub origin: Vec<f64>,
    /// Orthonormal basis of the direction space of the affine hull.
    pub basis: Vec<Vec<f64>>,
    /// Orthonormal basis of its orthogonal complement.
    pub normals: Vec<Vec<f64>>,
}

impl AffineFrame {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn to_intrinsic(&self, x: &[f64]) -> Vec<f64> {
        let y = sub(x, &self.origin);
        self.basis.iter().map(|b| dot(b, &y)).collect()
    }

    pub fn to_ambient_direction(&self, y: &[f64]) -> Vec<f64> {
        let n = self.origin.len();
        let mut x = vec![0.0; n];
        for (c, b) in y.iter().zip(&self.basis) {
            for i in 0..n {
                x[i] += c * b[i];
            }
        }
        x
    }

    /// True when the frame is the identity on R^n (full-dimensional set).
    pub fn is_identity(&self) -> bool {
        self.basis.len() == self.origin.len() && self.origin.iter().all(|&c| c == 0.0)
    }
}

/// Relative singular-value tolerance for affine rank detection.
pub const RANK_TOL: f64 = 1e-9;

/// Affine hull frame of `points` using an SVD of the centred point matrix.
/// Full-dimensional sets get the identity frame so that coordinates are
/// used untouched.
pub fn affine_frame(points: &[Vec<f64>]) -> AffineFrame {
    let n = points[0].len();
    let k = points.len();
    let mut centroid = vec![0.0; n];
    for p in points {
        for i in 0..n {
            centroid[i] += p[i];
        }
    }
    for c in &mut centroid {
        *c /= k as f64;
    }
    let rows = k.max(n);
    let mut m = DMatrix::<f64>::zeros(rows, n);
    for (r, p) in points.iter().enumerate() {
        for i in 0..n {
            m[(r, i)] = p[i] - centroid[i];
        }
    }
    let svd = m.svd(false, true);
    let vt = svd.v_t.expect("v_t requested");
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let smax = svd.singular_values[order[0]];
    let rank = order
        .iter()
        .filter(|&&i| smax > 0.0 && svd.singular_values[i] > RANK_TOL * smax)
        .count();
    if rank == n {
        return AffineFrame {
            origin: vec![0.0; n],
            basis: (0..n).map(|i| unit_axis(n, i)).collect(),
            normals: vec![],
        };
    }
    let row = |i: usize| -> Vec<f64> {
        let v: Vec<f64> = (0..n).map(|j| vt[(i, j)]).collect();
        canonical_sign(v)
    };
    AffineFrame {
        origin: centroid,
        basis: order[..rank].iter().map(|&i| row(i)).collect(),
        normals: order[rank..].iter().map(|&i| row(i)).collect(),
    }
}

/// Flip `v` so that its first clearly nonzero coordinate is positive.
pub fn canonical_sign(mut v: Vec<f64>) -> Vec<f64> {
    let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-12 * scale) {
        if *first < 0.0 {
            for x in &mut v {
                *x = -*x;
            }
        }
    }
    v
}

/// Householder reflection `H = I - 2 w w^T / |w|^2` that maps the unit
/// vector `e` to a multiple of the last coordinate axis.
pub fn householder_to_last_axis(e: &[f64]) -> Vec<Vec<f64>> {
    let n = e.len();
    let s = if e[n - 1] >= 0.0 { -1.0 } else { 1.0 };
    let mut w = e.to_vec();
    w[n - 1] -= s;
    let ww = dot(&w, &w);
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let id = if i == j { 1.0 } else { 0.0 };
                    id - 2.0 * w[i] * w[j] / ww
                })
                .collect()
        })
        .collect()
}

pub fn mat_vec(m: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    m.iter().map(|row| dot(row, x)).collect()
}

/// Solve a small dense system; `None` when singular.
pub fn solve(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let m = DMatrix::from_fn(n, n, |i, j| a[i][j]);
    let rhs = nalgebra::DVector::from_column_slice(b);
    let lu = m.lu();
    lu.solve(&rhs).map(|x| x.iter().copied().collect())
}

/// Outward-free normal of the hyperplane through `d` points in R^d
/// (generalised cross product of the edge vectors). The length equals
/// `(d-1)!` times the (d-1)-volume of the simplex.
pub fn simplex_normal(verts: &[&[f64]]) -> Vec<f64> {
    let d = verts[0].len();
    let edges: Vec<Vec<f64>> = verts[1..].iter().map(|v| sub(v, verts[0])).collect();
    (0..d)
        .map(|i| {
            let minor: Vec<Vec<f64>> = edges
                .iter()
                .map(|e| {
                    e.iter()
                        .enumerate()
                        .filter(|&(j, _)| j != i)
                        .map(|(_, &x)| x)
                        .collect()
                })
                .collect();
            let sgn = if (i + d - 1).is_multiple_of(2) { 1.0 } else { -1.0 };
            sgn * det(&minor)
        })
        .collect()
}

pub fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}
