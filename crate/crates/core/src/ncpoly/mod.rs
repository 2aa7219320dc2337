//! Free (noncommutative) polynomial algebra and evaluation on matrix tuples.

mod eval;
pub mod json;
mod poly;
mod word;

pub use eval::{
    direct_sum, evaluate, evaluate_poly_matrix, evaluate_poly_matrix_with, CMatrix, MatrixTuple,
    PolyMatrix,
};
pub use poly::{Degree, NCPolynomial};
pub use word::{Letter, Word};
