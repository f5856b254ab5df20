//! Convex-geometry functionals of polytopes in R^n: surface area measures,
//! mixed volumes V(K, M[n-1]), intrinsic volumes V_1 and V_{n-1},
//! circumradius and widths, together with checkers for the classical
//! inequalities relating them (Minkowski, Betke-Weil, the reverse
//! Minkowski-type bound V(K, M[n-1]) <= V_1(K) V_{n-1}(M) / n, and the
//! Linhart bound V_1 >= 2R) and certificates for their stability versions.

// !(x > 0.0) is used on purpose so NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bodies;
pub mod cli;
pub mod error;
pub mod hull;
pub mod inequalities;
pub mod linalg;
pub mod lp;
pub mod functionals;
pub mod measures;
pub mod oracle;
pub mod rng;
pub mod spherical;
pub mod sweeps;

pub use bodies::{ConvexPolytope, Direction};
pub use error::{GeomError, Result};
