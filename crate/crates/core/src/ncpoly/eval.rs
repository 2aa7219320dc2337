use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::Zero;

use super::poly::NCPolynomial;
use super::word::Word;
use crate::error::{check_dim, Error, Result};
use crate::numerics;
use crate::scalar::Coeff;

/// Dense complex matrix.
pub type CMatrix = DMatrix<Complex64>;

/// A point of the matrix universe: `d` complex `n x n` matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixTuple {
    n: usize,
    mats: Vec<CMatrix>,
}

impl MatrixTuple {
    pub fn new(mats: Vec<CMatrix>) -> Result<Self> {
        let first = mats
            .first()
            .ok_or_else(|| Error::Domain("matrix tuple needs at least one matrix".into()))?;
        let n = first.nrows();
        if n == 0 {
            return Err(Error::Domain("matrix size must be at least 1".into()));
        }
        for m in &mats {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::Domain(format!(
                    "all matrices must be {n}x{n}, found {}x{}",
                    m.nrows(),
                    m.ncols()
                )));
            }
        }
        Ok(MatrixTuple { n, mats })
    }

    pub fn zeros(n: usize, d: usize) -> Self {
        MatrixTuple {
            n,
            mats: vec![CMatrix::zeros(n, n); d],
        }
    }

    /// A tuple of `1 x 1` matrices.
    pub fn scalars(values: &[Complex64]) -> Result<Self> {
        Self::new(
            values
                .iter()
                .map(|&v| CMatrix::from_element(1, 1, v))
                .collect(),
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.mats.len()
    }

    pub fn mats(&self) -> &[CMatrix] {
        &self.mats
    }

    pub fn get(&self, i: usize) -> &CMatrix {
        &self.mats[i]
    }

    pub fn scaled(&self, factor: f64) -> Self {
        MatrixTuple {
            n: self.n,
            mats: self
                .mats
                .iter()
                .map(|m| m * Complex64::from(factor))
                .collect(),
        }
    }

    /// Block-diagonal direct sum `X ⊕ Y`.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        check_dim(self.d(), other.d())?;
        let mats = self
            .mats
            .iter()
            .zip(&other.mats)
            .map(|(a, b)| direct_sum(a, b))
            .collect();
        Ok(MatrixTuple {
            n: self.n + other.n,
            mats,
        })
    }

    /// `S X_i S^{-1}` for every `i`; `s_inv` must be the inverse of `s`.
    pub fn conjugate(&self, s: &CMatrix, s_inv: &CMatrix) -> Result<Self> {
        check_dim(self.n, s.nrows())?;
        Ok(MatrixTuple {
            n: self.n,
            mats: self.mats.iter().map(|m| s * m * s_inv).collect(),
        })
    }

    /// The `n x (d n)` block row `[X_1, ..., X_d]`.
    pub fn block_row(&self) -> CMatrix {
        let n = self.n;
        let mut row = CMatrix::zeros(n, n * self.d());
        for (i, m) in self.mats.iter().enumerate() {
            row.view_mut((0, i * n), (n, n)).copy_from(m);
        }
        row
    }

    /// Operator norm of the block row, i.e. `sqrt(|| sum X_i X_i^* ||)`.
    pub fn row_norm(&self) -> f64 {
        numerics::operator_norm_op(&numerics::BlockRow(self), numerics::DEFAULT_NORM_TOL)
            .expect("finite tuple entries")
    }

    pub fn is_finite(&self) -> bool {
        self.mats
            .iter()
            .all(|m| m.iter().all(|z| z.re.is_finite() && z.im.is_finite()))
    }
}

pub fn direct_sum(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    let mut out = CMatrix::zeros(ra + rb, ca + cb);
    out.view_mut((0, 0), (ra, ca)).copy_from(a);
    out.view_mut((ra, ca), (rb, cb)).copy_from(b);
    out
}

/// `sum_w c_w X_w`, with `X_w` the ordered product along `w` and the empty
/// word mapped to the identity.
///
/// Words are visited in plain lexicographic order so each shared prefix
/// product is computed once.
pub fn evaluate<T: Coeff>(p: &NCPolynomial<T>, x: &MatrixTuple) -> Result<CMatrix> {
    check_dim(p.d(), x.d())?;
    let n = x.n();
    let mut out = CMatrix::zeros(n, n);
    let mut order: Vec<(&Word, Complex64)> = p.terms().map(|(w, c)| (w, c.to_c64())).collect();
    order.sort_by(|a, b| a.0.letters().cmp(b.0.letters()));

    // stack[i] holds the product of the first i letters of the current word
    let mut stack: Vec<CMatrix> = vec![CMatrix::identity(n, n)];
    let mut prev: &[u16] = &[];
    for (w, c) in order {
        let letters = w.letters();
        let common = prev.iter().zip(letters).take_while(|(a, b)| a == b).count();
        for depth in common..letters.len() {
            if stack.len() <= depth + 1 {
                stack.push(CMatrix::zeros(n, n));
            }
            let (head, tail) = stack.split_at_mut(depth + 1);
            head[depth].mul_to(x.get(letters[depth] as usize), &mut tail[0]);
        }
        for (o, v) in out.iter_mut().zip(stack[letters.len()].iter()) {
            *o += c * v;
        }
        prev = letters;
    }
    Ok(out)
}

/// A rectangular grid of free polynomials sharing one `d`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyMatrix<T: Coeff = Complex64> {
    rows: usize,
    cols: usize,
    d: usize,
    entries: Vec<NCPolynomial<T>>,
}

impl<T: Coeff> PolyMatrix<T> {
    /// `entries` in row-major order.
    pub fn new(rows: usize, cols: usize, entries: Vec<NCPolynomial<T>>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Domain("polynomial matrix must be nonempty".into()));
        }
        check_dim(rows * cols, entries.len())?;
        let d = entries[0].d();
        for e in &entries {
            check_dim(d, e.d())?;
        }
        Ok(PolyMatrix {
            rows,
            cols,
            d,
            entries,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn entry(&self, row: usize, col: usize) -> &NCPolynomial<T> {
        &self.entries[row * self.cols + col]
    }

    /// Block-diagonal direct sum; off-diagonal blocks are zero.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        check_dim(self.d, other.d)?;
        let rows = self.rows + other.rows;
        let cols = self.cols + other.cols;
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                let e = if i < self.rows && j < self.cols {
                    self.entry(i, j).clone()
                } else if i >= self.rows && j >= self.cols {
                    other.entry(i - self.rows, j - self.cols).clone()
                } else {
                    NCPolynomial::zero(self.d)
                };
                entries.push(e);
            }
        }
        Ok(PolyMatrix {
            rows,
            cols,
            d: self.d,
            entries,
        })
    }
}

/// Block matrix `[evaluate(Δ_ij, X)]` of size `(rows n) x (cols n)`.
pub fn evaluate_poly_matrix<T: Coeff>(delta: &PolyMatrix<T>, x: &MatrixTuple) -> Result<CMatrix> {
    evaluate_poly_matrix_with(delta, x, |_, _| false)
}

/// As [`evaluate_poly_matrix`], but entries for which `known_zero(row, col)`
/// holds are taken to be exactly zero without evaluation.
pub fn evaluate_poly_matrix_with<T: Coeff>(
    delta: &PolyMatrix<T>,
    x: &MatrixTuple,
    known_zero: impl Fn(usize, usize) -> bool,
) -> Result<CMatrix> {
    check_dim(delta.d(), x.d())?;
    let n = x.n();
    let mut out = CMatrix::from_element(delta.rows * n, delta.cols * n, Complex64::zero());
    for i in 0..delta.rows {
        for j in 0..delta.cols {
            let e = delta.entry(i, j);
            if e.is_zero() || known_zero(i, j) {
                continue;
            }
            let block = evaluate(e, x)?;
            out.view_mut((i * n, j * n), (n, n)).copy_from(&block);
        }
    }
    Ok(out)
}
