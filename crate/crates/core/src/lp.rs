//! Dense two-phase simplex method (Bland's rule) for the small linear
//! programs that show up here: Chebyshev centres of projected polytopes and
//! origin-in-hull feasibility tests.

use crate::error::{GeomError, Result};

/// `maximize c.x  s.t.  a_ub x <= b_ub,  a_eq x = b_eq,  x >= 0`.
#[derive(Debug, Clone, Default)]
pub struct LinearProgram {
    pub c: Vec<f64>,
    pub a_ub: Vec<Vec<f64>>,
    pub b_ub: Vec<f64>,
    pub a_eq: Vec<Vec<f64>>,
    pub b_eq: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, value: f64 },
    Infeasible,
    Unbounded,
}

const EPS: f64 = 1e-11;
const MAX_PIVOTS: usize = 50_000;

struct Tableau {
    // m rows of length ncols + 1 (last entry = rhs)
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    ncols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c];
        for v in &mut self.rows[r] {
            *v /= p;
        }
        let pr = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                let f = row[c];
                if f != 0.0 {
                    for (v, pv) in row.iter_mut().zip(&pr) {
                        *v -= f * pv;
                    }
                }
            }
        }
        self.basis[r] = c;
    }

    /// Maximise `obj` over columns `allowed`; returns false if unbounded.
    fn optimise(&mut self, obj: &[f64], allowed: usize) -> Result<bool> {
        for _ in 0..MAX_PIVOTS {
            // reduced costs: obj_j - sum_i obj_{B_i} a_ij
            let mut entering = None;
            for j in 0..allowed {
                if self.basis.contains(&j) {
                    continue;
                }
                let mut rc = obj[j];
                for (i, &b) in self.basis.iter().enumerate() {
                    rc -= obj[b] * self.rows[i][j];
                }
                if rc > EPS {
                    entering = Some(j);
                    break;
                }
            }
            let Some(c) = entering else {
                return Ok(true);
            };
            let mut leave: Option<(usize, f64)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                let a = row[c];
                if a > EPS {
                    let ratio = row[self.ncols] / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < lr - EPS
                                || (ratio <= lr + EPS && self.basis[i] < self.basis[li])
                            {
                                Some((i, ratio))
                            } else {
                                Some((li, lr))
                            }
                        }
                    };
                }
            }
            match leave {
                None => return Ok(false),
                Some((r, _)) => self.pivot(r, c),
            }
        }
        Err(GeomError::Lp("pivot limit exceeded".into()))
    }
}

pub fn solve(lp: &LinearProgram) -> Result<LpOutcome> {
    let nv = lp.c.len();
    let n_ub = lp.a_ub.len();
    let n_eq = lp.a_eq.len();
    let m = n_ub + n_eq;
    for row in lp.a_ub.iter().chain(&lp.a_eq) {
        if row.len() != nv {
            return Err(GeomError::Lp("constraint width does not match objective".into()));
        }
    }
    // columns: [x (nv) | slack (n_ub) | artificial (m)]
    let ncols = nv + n_ub + m;
    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut needs_art = vec![false; m];
    for i in 0..m {
        let mut row = vec![0.0; ncols + 1];
        let (coeffs, rhs) = if i < n_ub {
            (&lp.a_ub[i], lp.b_ub[i])
        } else {
            (&lp.a_eq[i - n_ub], lp.b_eq[i - n_ub])
        };
        let sgn = if rhs < 0.0 { -1.0 } else { 1.0 };
        for j in 0..nv {
            row[j] = sgn * coeffs[j];
        }
        if i < n_ub {
            row[nv + i] = sgn;
        }
        row[ncols] = sgn * rhs;
        if i < n_ub && sgn > 0.0 {
            basis.push(nv + i);
        } else {
            row[nv + n_ub + i] = 1.0;
            basis.push(nv + n_ub + i);
            needs_art[i] = true;
        }
        rows.push(row);
    }
    let mut t = Tableau { rows, basis, ncols };

    if needs_art.iter().any(|&b| b) {
        let mut obj1 = vec![0.0; ncols];
        for (i, &na) in needs_art.iter().enumerate() {
            if na {
                obj1[nv + n_ub + i] = -1.0;
            }
        }
        t.optimise(&obj1, ncols)?;
        let infeas: f64 = t
            .basis
            .iter()
            .enumerate()
            .filter(|(_, &b)| b >= nv + n_ub)
            .map(|(i, _)| t.rows[i][ncols])
            .sum();
        let scale = 1.0 + lp.b_ub.iter().chain(&lp.b_eq).fold(0.0f64, |a, b| a.max(b.abs()));
        if infeas > 1e-9 * scale {
            return Ok(LpOutcome::Infeasible);
        }
        // drive remaining artificials out of the basis
        for r in 0..m {
            if t.basis[r] >= nv + n_ub {
                if let Some(c) = (0..nv + n_ub).find(|&c| t.rows[r][c].abs() > 1e-9) {
                    t.pivot(r, c);
                }
            }
        }
    }

    let mut obj = vec![0.0; ncols];
    obj[..nv].copy_from_slice(&lp.c);
    // artificial columns stay non-basic in phase two (a redundant row may keep
    // one at level zero, which is harmless)
    for r in 0..m {
        if t.basis[r] >= nv + n_ub {
            for v in &mut t.rows[r][nv + n_ub..ncols] {
                *v = 0.0;
            }
            t.rows[r][t.basis[r]] = 1.0;
        }
    }
    if !t.optimise(&obj, nv + n_ub)? {
        return Ok(LpOutcome::Unbounded);
    }
    let mut x = vec![0.0; nv];
    for (i, &b) in t.basis.iter().enumerate() {
        if b < nv {
            x[b] = t.rows[i][ncols];
        }
    }
    let value = crate::linalg::dot(&lp.c, &x);
    Ok(LpOutcome::Optimal { x, value })
}

/// True when `target` lies in the convex hull of `points` (within LP tolerance).
pub fn in_convex_hull(points: &[Vec<f64>], target: &[f64]) -> Result<bool> {
    let k = points.len();
    let n = target.len();
    let mut a_eq: Vec<Vec<f64>> = (0..n)
        .map(|i| points.iter().map(|p| p[i]).collect())
        .collect();
    let mut b_eq: Vec<f64> = target.to_vec();
    a_eq.push(vec![1.0; k]);
    b_eq.push(1.0);
    let lp = LinearProgram {
        c: vec![0.0; k],
        a_eq,
        b_eq,
        ..Default::default()
    };
    Ok(matches!(solve(&lp)?, LpOutcome::Optimal { .. }))
}
