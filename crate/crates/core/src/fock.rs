//! Truncated full Fock space over `d` letters and its left creation
//! operators `S_i : w -> i w`, which form a row contraction.

use num_complex::Complex64;
use num_traits::Zero;
use rayon::prelude::*;

use crate::counterexample::Counterexample;
use crate::error::{Error, Result};
use crate::ncpoly::{CMatrix, MatrixTuple, Word};
use crate::numerics::{operator_norm_op, LinearOperator, DEFAULT_NORM_TOL};
use crate::Poly;

/// Largest truncated Fock dimension handled at all.
pub const MAX_FOCK_DIM: usize = 20_000;
/// Largest dimension for which dense creation matrices are built.
pub const MAX_DENSE_FOCK_DIM: usize = 4096;

/// `sum_{j <= l} d^j`, or `None` on overflow.
pub fn fock_dim(d: usize, l: usize) -> Option<usize> {
    let mut total = 0usize;
    let mut pow = 1usize;
    for j in 0..=l {
        total = total.checked_add(pow)?;
        if j < l {
            pow = pow.checked_mul(d)?;
        }
    }
    Some(total)
}

/// Words of length at most `L`, indexed in graded lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedFock {
    d: usize,
    l: usize,
    dim: usize,
    /// `offsets[j]` is the index of the first word of length `j`.
    offsets: Vec<usize>,
}

impl TruncatedFock {
    pub fn new(d: usize, l: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::Domain("Fock space needs at least one letter".into()));
        }
        let dim = fock_dim(d, l).unwrap_or(usize::MAX);
        if dim > MAX_FOCK_DIM {
            return Err(Error::Size {
                what: "truncated Fock dimension",
                size: dim as u128,
                limit: MAX_FOCK_DIM as u128,
            });
        }
        let mut offsets = Vec::with_capacity(l + 2);
        let mut acc = 0;
        for j in 0..=l {
            offsets.push(acc);
            acc += d.pow(j as u32);
        }
        offsets.push(acc);
        Ok(TruncatedFock { d, l, dim, offsets })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn max_len(&self) -> usize {
        self.l
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, w: &Word) -> usize {
        w.letters()
            .iter()
            .fold(0, |acc, &a| acc * self.d + a as usize)
    }

    /// Basis index of `w`, if `|w| <= L` and its letters are in range.
    pub fn index(&self, w: &Word) -> Option<usize> {
        if w.len() > self.l || w.letters().iter().any(|&a| a as usize >= self.d) {
            return None;
        }
        Some(self.offsets[w.len()] + self.value(w))
    }

    pub fn word(&self, index: usize) -> Option<Word> {
        if index >= self.dim {
            return None;
        }
        let len = self.offsets.partition_point(|&o| o <= index) - 1;
        let mut v = index - self.offsets[len];
        let mut letters = vec![0; len];
        for slot in letters.iter_mut().rev() {
            *slot = (v % self.d) as u16;
            v /= self.d;
        }
        Some(Word::new(letters))
    }

    /// Vacuum vector `Ω`, the empty word.
    pub fn vacuum(&self) -> Vec<Complex64> {
        let mut v = vec![Complex64::zero(); self.dim];
        v[0] = Complex64::from(1.0);
        v
    }
}

/// Dense `S_1, .., S_d` on words of length `<= L`; overflow maps to zero.
pub fn truncated_creation(d: usize, l: usize) -> Result<MatrixTuple> {
    let fock = TruncatedFock::new(d, l)?;
    if fock.dim() > MAX_DENSE_FOCK_DIM {
        return Err(Error::Size {
            what: "dense truncated Fock dimension (use FockOperator)",
            size: fock.dim() as u128,
            limit: MAX_DENSE_FOCK_DIM as u128,
        });
    }
    let dim = fock.dim();
    let mats = (0..d)
        .map(|i| {
            let mut s = CMatrix::zeros(dim, dim);
            for len in 0..l {
                let block = d.pow(len as u32);
                let src = fock.offsets[len];
                let dst = fock.offsets[len + 1] + i * block;
                for v in 0..block {
                    s[(dst + v, src + v)] = Complex64::from(1.0);
                }
            }
            s
        })
        .collect();
    MatrixTuple::new(mats)
}

/// `p(rS)` on the truncated Fock space, applied term by term without
/// storing a matrix.
pub struct FockOperator {
    fock: TruncatedFock,
    /// `(|w|, value of w, c_w r^{|w|})`
    terms: Vec<(usize, usize, Complex64)>,
}

impl FockOperator {
    pub fn new(p: &Poly, r: f64, l: usize) -> Result<Self> {
        let fock = TruncatedFock::new(p.d(), l)?;
        let terms = p
            .terms()
            .filter(|(w, _)| w.len() <= l)
            .map(|(w, c)| (w.len(), fock.value(w), c * r.powi(w.len() as i32)))
            .collect();
        Ok(FockOperator { fock, terms })
    }

    pub fn fock(&self) -> &TruncatedFock {
        &self.fock
    }

    /// Calls `f(row, col, len)` for each length-`len` block `row.. <- col..`
    /// touched by the term.
    fn blocks(&self, wlen: usize, wval: usize, mut f: impl FnMut(usize, usize, usize)) {
        let d = self.fock.d;
        for vlen in 0..=(self.fock.l - wlen) {
            let block = d.pow(vlen as u32);
            let row = self.fock.offsets[wlen + vlen] + wval * block;
            let col = self.fock.offsets[vlen];
            f(row, col, block);
        }
    }

    pub fn to_dense(&self) -> CMatrix {
        let dim = self.fock.dim;
        let mut m = CMatrix::zeros(dim, dim);
        for &(wlen, wval, c) in &self.terms {
            self.blocks(wlen, wval, |row, col, len| {
                for t in 0..len {
                    m[(row + t, col + t)] += c;
                }
            });
        }
        m
    }
}

impl LinearOperator for FockOperator {
    fn ncols(&self) -> usize {
        self.fock.dim
    }
    fn nrows(&self) -> usize {
        self.fock.dim
    }
    fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        y.fill(Complex64::zero());
        for &(wlen, wval, c) in &self.terms {
            self.blocks(wlen, wval, |row, col, len| {
                for (yi, xi) in y[row..row + len].iter_mut().zip(&x[col..col + len]) {
                    *yi += c * xi;
                }
            });
        }
    }
    fn apply_adjoint(&self, y: &[Complex64], x: &mut [Complex64]) {
        x.fill(Complex64::zero());
        for &(wlen, wval, c) in &self.terms {
            let cc = c.conj();
            self.blocks(wlen, wval, |row, col, len| {
                for (xi, yi) in x[col..col + len].iter_mut().zip(&y[row..row + len]) {
                    *xi += cc * yi;
                }
            });
        }
    }
}

fn check_radius(r: f64, open: bool) -> Result<()> {
    let ok = r > 0.0 && if open { r < 1.0 } else { r <= 1.0 };
    if ok {
        Ok(())
    } else {
        let range = if open { "(0, 1)" } else { "(0, 1]" };
        Err(Error::Domain(format!(
            "radius must lie in {range}, got {r}"
        )))
    }
}

/// `||p(rS) Ω|| = sqrt(sum_{|w| <= L} r^{2|w|} |c_w|^2)`.
pub fn vacuum_norm(p: &Poly, r: f64, l: usize) -> Result<f64> {
    check_radius(r, false)?;
    Ok(p.terms()
        .filter(|(w, _)| w.len() <= l)
        .map(|(w, c)| r.powi(2 * w.len() as i32) * c.norm_sqr())
        .sum::<f64>()
        .sqrt())
}

/// `||p(rS)||` on the truncated Fock space, a lower bound for the supremum
/// of `||p||` over the row ball.
pub fn cd_lower_bound(p: &Poly, r: f64, l: usize) -> Result<f64> {
    check_radius(r, true)?;
    let op = FockOperator::new(p, r, l)?;
    let estimate = operator_norm_op(&op, DEFAULT_NORM_TOL)?;
    // ||p(rS) Ω|| is itself attained by a unit vector
    Ok(estimate.max(vacuum_norm(p, r, l)?))
}

#[derive(Clone, Debug, PartialEq)]
pub struct UnboundednessRow {
    pub k: u64,
    pub vacuum_bound: f64,
    /// Absent when the Fock dimension exceeds [`MAX_FOCK_DIM`].
    pub operator_bound: Option<f64>,
}

/// Lower bounds on `||sum_{k<=K} q_k||` over the row ball, for `K = 1..Kmax`,
/// with terms of degree above `L` dropped.
///
/// The vacuum column is computed from group counts: distinct groups are
/// homogeneous of distinct degrees, so their Fock vectors are orthogonal.
pub fn unboundedness_table(
    cx: &Counterexample,
    r: f64,
    l: usize,
    k_max: u64,
) -> Result<Vec<UnboundednessRow>> {
    check_radius(r, true)?;
    let with_operator = fock_dim(cx.family().d(), l).is_some_and(|dim| dim <= MAX_FOCK_DIM);
    (1..=k_max)
        .into_par_iter()
        .map(|k| {
            let vacuum_bound = cx
                .groups(k)
                .iter()
                .filter(|g| g.degree <= l as u64)
                .map(|g| {
                    let c = g.count() as f64 * r.powi(g.degree as i32) * cx.qk_h2_norm(g.first);
                    c * c
                })
                .sum::<f64>()
                .sqrt();
            let operator_bound = if with_operator {
                let f_k = cx.partial_sum(k, Some(l))?;
                Some(cd_lower_bound(&f_k, r, l)?)
            } else {
                None
            };
            Ok(UnboundednessRow {
                k,
                vacuum_bound,
                operator_bound,
            })
        })
        .collect()
}

pub const TABLE_HEADER: &str = "K,vacuum_bound,operator_bound";

/// CSV with header `K,vacuum_bound,operator_bound`; missing operator bounds
/// are empty fields.
pub fn table_csv(rows: &[UnboundednessRow]) -> String {
    let mut out = String::from(TABLE_HEADER);
    out.push('\n');
    for row in rows {
        let op = row
            .operator_bound
            .map(|v| format!("{v:.16e}"))
            .unwrap_or_default();
        out.push_str(&format!("{},{:.16e},{}\n", row.k, row.vacuum_bound, op));
    }
    out
}
