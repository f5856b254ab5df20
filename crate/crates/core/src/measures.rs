//! Surface area measure S_{n-1}(P, .) of a polytope as a finite sum of
//! atoms on the unit sphere, and the integrals against it that the
//! functionals are built from.

use serde::{Deserialize, Serialize};

use crate::bodies::{ConvexPolytope, Direction};
use crate::error::{check_dim, GeomError, Result};
use crate::linalg::{self, dot};

/// Relative tolerance of the closedness check sum(mass * normal) = 0.
pub const CLOSEDNESS_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub normal: Vec<f64>,
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceAreaMeasure {
    pub dim: usize,
    pub atoms: Vec<Atom>,
}

impl SurfaceAreaMeasure {
    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).sum()
    }

    /// Integral of `f` against the measure.
    pub fn integrate(&self, f: impl Fn(&[f64]) -> f64) -> f64 {
        self.atoms.iter().map(|a| f(&a.normal) * a.mass).sum()
    }

    /// Integral of the support function of `p`; n times V(p, K[n-1]).
    pub fn integrate_support(&self, p: &ConvexPolytope) -> Result<f64> {
        check_dim(self.dim, p.dim())?;
        Ok(self.integrate(|u| p.h(u)))
    }

    /// Integral of |<e, u>|; equals twice the (n-1)-volume of the
    /// projection of the body to e^perp.
    pub fn integrate_abs_cos(&self, e: &Direction) -> Result<f64> {
        check_dim(self.dim, e.dim())?;
        Ok(self.integrate(|u| dot(e, u).abs()))
    }

    /// |sum mass * normal|.
    pub fn resultant(&self) -> f64 {
        let mut s = vec![0.0; self.dim];
        for a in &self.atoms {
            for (si, ui) in s.iter_mut().zip(&a.normal) {
                *si += a.mass * ui;
            }
        }
        linalg::norm(&s)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("measure serialises")
    }
}

/// Surface area measure of `p`:
/// empty for affine dimension <= n-2, two antipodal atoms of mass
/// H^{n-1}(p) for flat bodies, one atom per facet otherwise.
pub fn surface_area_measure(p: &ConvexPolytope) -> Result<SurfaceAreaMeasure> {
    let n = p.dim();
    let g = p.geometry();
    let d = g.dim();
    let mut atoms = Vec::new();
    if d + 1 == n {
        let u = g.frame.normals[0].clone();
        let area = g.volume;
        atoms.push(Atom {
            normal: linalg::scaled(&u, -1.0),
            mass: area,
        });
        atoms.push(Atom { normal: u, mass: area });
    } else if d == n {
        for f in &g.facets {
            if f.area > 0.0 {
                atoms.push(Atom {
                    normal: f.normal.clone(),
                    mass: f.area,
                });
            }
        }
    }
    atoms.sort_by(|a, b| {
        a.normal
            .iter()
            .zip(&b.normal)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let s = SurfaceAreaMeasure { dim: n, atoms };
    let total = s.total_mass();
    if s.resultant() > CLOSEDNESS_TOL * total {
        return Err(GeomError::DegenerateHull(format!(
            "facet normals do not close up: |sum m u| = {:.3e}, total mass {:.3e}",
            s.resultant(),
            total
        )));
    }
    Ok(s)
}
