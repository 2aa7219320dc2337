use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::ncpoly::{CMatrix, MatrixTuple};

pub const DEFAULT_NORM_TOL: f64 = 1e-10;
const MAX_ITERATIONS: usize = 200_000;

/// A linear map given only through its action and the action of its adjoint.
pub trait LinearOperator {
    fn ncols(&self) -> usize;
    fn nrows(&self) -> usize;
    /// `y = A x`
    fn apply(&self, x: &[Complex64], y: &mut [Complex64]);
    /// `x = A^* y`
    fn apply_adjoint(&self, y: &[Complex64], x: &mut [Complex64]);
}

impl LinearOperator for CMatrix {
    fn ncols(&self) -> usize {
        self.ncols()
    }
    fn nrows(&self) -> usize {
        self.nrows()
    }
    fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        for (i, out) in y.iter_mut().enumerate() {
            let mut acc = Complex64::zero();
            for (j, xj) in x.iter().enumerate() {
                acc += self[(i, j)] * xj;
            }
            *out = acc;
        }
    }
    fn apply_adjoint(&self, y: &[Complex64], x: &mut [Complex64]) {
        for (j, out) in x.iter_mut().enumerate() {
            let col = self.column(j);
            let mut acc = Complex64::zero();
            for (a, yi) in col.iter().zip(y) {
                acc += a.conj() * yi;
            }
            *out = acc;
        }
    }
}

/// The block row `[X_1, ..., X_d]` of a tuple, without materializing it.
pub struct BlockRow<'a>(pub &'a MatrixTuple);

impl LinearOperator for BlockRow<'_> {
    fn ncols(&self) -> usize {
        self.0.n() * self.0.d()
    }
    fn nrows(&self) -> usize {
        self.0.n()
    }
    fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        let n = self.0.n();
        y.fill(Complex64::zero());
        for (k, m) in self.0.mats().iter().enumerate() {
            let part = &x[k * n..(k + 1) * n];
            for i in 0..n {
                let mut acc = Complex64::zero();
                for j in 0..n {
                    acc += m[(i, j)] * part[j];
                }
                y[i] += acc;
            }
        }
    }
    fn apply_adjoint(&self, y: &[Complex64], x: &mut [Complex64]) {
        let n = self.0.n();
        for (k, m) in self.0.mats().iter().enumerate() {
            for j in 0..n {
                let mut acc = Complex64::zero();
                for i in 0..n {
                    acc += m[(i, j)].conj() * y[i];
                }
                x[k * n + j] = acc;
            }
        }
    }
}

/// Adjoint view, so the power method can iterate on the smaller Gram matrix.
struct Adjoint<'a, A: ?Sized>(&'a A);

impl<A: LinearOperator + ?Sized> LinearOperator for Adjoint<'_, A> {
    fn ncols(&self) -> usize {
        self.0.nrows()
    }
    fn nrows(&self) -> usize {
        self.0.ncols()
    }
    fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        self.0.apply_adjoint(x, y)
    }
    fn apply_adjoint(&self, y: &[Complex64], x: &mut [Complex64]) {
        self.0.apply(y, x)
    }
}

fn norm2(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn start_vector(len: usize, variant: usize) -> Vec<Complex64> {
    // Deterministic, with no zero entries and irregular phases.
    let v: Vec<Complex64> = (0..len)
        .map(|i| {
            let t = (i + 1) as f64 * (0.754_877_666 + variant as f64 * std::f64::consts::FRAC_1_PI);
            Complex64::from_polar(1.0 + 0.5 * (t * 1.7).fract(), t * 2.399_963)
        })
        .collect();
    let s = norm2(&v);
    v.into_iter().map(|z| z / s).collect()
}

/// Largest singular value by the power method on `A^* A`.
///
/// Stops once the eigen-residual `||A^*A v - λ v||` drops below `tol · λ`.
pub fn operator_norm_op<A: LinearOperator + ?Sized>(a: &A, tol: f64) -> Result<f64> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Domain(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    if a.nrows() < a.ncols() {
        return power_iteration(&Adjoint(a), tol);
    }
    power_iteration(a, tol)
}

fn power_iteration<A: LinearOperator + ?Sized>(a: &A, tol: f64) -> Result<f64> {
    let (m, n) = (a.nrows(), a.ncols());
    if m == 0 || n == 0 {
        return Ok(0.0);
    }
    if n == 1 {
        // a single column: its Euclidean norm, without iteration roundoff
        let mut av = vec![Complex64::zero(); m];
        a.apply(&[Complex64::from(1.0)], &mut av);
        return Ok(norm2(&av));
    }
    let mut av = vec![Complex64::zero(); m];
    let mut z = vec![Complex64::zero(); n];
    for variant in 0..3 {
        let mut v = start_vector(n, variant);
        let mut lambda = 0.0;
        for _ in 0..MAX_ITERATIONS {
            a.apply(&v, &mut av);
            a.apply_adjoint(&av, &mut z);
            lambda = av.iter().map(|w| w.norm_sqr()).sum::<f64>();
            if !lambda.is_finite() {
                return Err(Error::Domain("non-finite operator entries".into()));
            }
            if lambda == 0.0 {
                break;
            }
            let residual = z
                .iter()
                .zip(&v)
                .map(|(zi, vi)| (zi - vi * lambda).norm_sqr())
                .sum::<f64>()
                .sqrt();
            let zn = norm2(&z);
            for (vi, zi) in v.iter_mut().zip(&z) {
                *vi = zi / zn;
            }
            if residual <= tol * lambda {
                break;
            }
        }
        if lambda > 0.0 {
            return Ok(lambda.sqrt());
        }
    }
    Ok(0.0)
}

/// Largest singular value of a dense matrix via the power method.
pub fn operator_norm(a: &CMatrix, tol: f64) -> Result<f64> {
    if a.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::Domain("matrix has non-finite entries".into()));
    }
    operator_norm_op(a, tol)
}

/// Dense singular-value route; kept as an independent oracle.
pub fn operator_norm_svd(a: &CMatrix) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.clone().singular_values().max()
}
