//! Exact verification of the comparison between Orlov's LG/CY pipeline and
//! the localized mirror functor on the hexagonal torus.
//!
//! Everything is computed with rational exponents and rational coefficients,
//! truncated at an explicit cutoff in the Novikov variable.

pub mod blocks;
pub mod fukaya;
pub mod linalg;
pub mod matrix;
pub mod mirror;
pub mod mfcat;
pub mod orlov;


pub mod qseries;
pub mod ring;

pub use matrix::{GradedMatrix, PolyMatrix, TwistList};
pub use mfcat::{MatrixFactorization, MfMorphism};
pub use qseries::{Coeff, Cutoff, NovikovSeries, QExp};
pub use ring::{GradedPolynomial, Monomial, NamedSeriesBundle, Var};
