//! Exact arithmetic for periodic continued fractions over ℤ, ℤ[1/S] and quadratic orders:
//! continuant matrices, nearest-integer expansions, Fermat–Pell curves, matrix
//! factorization solvers, and integral-point experiments.

pub mod contmat;
pub mod error;
pub mod experiment;
pub mod expr;
pub mod factor;
pub mod gauss;
pub mod hurwitz;
pub mod linalg;
pub mod pcf;
pub mod pell;
pub mod ring;
pub mod suite;

pub use contmat::{dmat, e_matrix, eigen_check, quad_poly, Mat2, Pcf, QuadPoly};
pub use error::{Error, Result};
pub use ring::{Basis, QuadIrr, RElem, RelQuad, Ring};
