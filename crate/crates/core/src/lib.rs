//! An entire free function that is locally bounded in the free topology but
//! unbounded on the row ball, built from polynomial identities of matrix
//! algebras.
//!
//! The algebraic layer ([`NCPolynomial`]) is generic over the coefficient
//! ring; evaluation, norms and certificates run in double-precision complex
//! arithmetic. Common instantiations are exported as aliases below.

pub mod counterexample;
pub mod error;
pub mod fock;
pub mod identities;
pub mod ncpoly;
pub mod numerics;
pub mod regions;
pub mod scalar;

pub use error::{Error, Result};
pub use ncpoly::{
    evaluate, evaluate_poly_matrix, CMatrix, Degree, MatrixTuple, NCPolynomial, PolyMatrix, Word,
};
pub use scalar::{Coeff, ScalableCoeff};

pub use num_complex::Complex64;

/// Free polynomial with double-precision complex coefficients.
pub type Poly = NCPolynomial<Complex64>;
/// Real coefficients.
pub type RealPoly = NCPolynomial<f64>;
/// Integer coefficients; exact for signed sums such as standard polynomials.
pub type IntPoly = NCPolynomial<i64>;
/// Exact rational coefficients.
pub type RatPoly = NCPolynomial<num_rational::Ratio<i64>>;
