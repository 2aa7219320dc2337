use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::word::{Letter, Word};
use crate::error::{check_dim, Error, Result};
use crate::scalar::{Coeff, ScalableCoeff};
use num_complex::Complex64;

/// Degree of a free polynomial. The zero polynomial has degree
/// [`Degree::MinusInfinity`], which sorts below every finite degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Degree {
    MinusInfinity,
    Finite(usize),
}

impl Degree {
    pub fn finite(self) -> Option<usize> {
        match self {
            Degree::MinusInfinity => None,
            Degree::Finite(d) => Some(d),
        }
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::MinusInfinity => write!(f, "-inf"),
            Degree::Finite(d) => write!(f, "{d}"),
        }
    }
}

/// A polynomial in `d` noncommuting variables.
///
/// Terms are kept in a `BTreeMap` keyed by [`Word`], so iteration follows the
/// graded lexicographic order. No stored coefficient is exactly zero; only
/// literal cancellation removes a term.
#[derive(Clone, PartialEq)]
pub struct NCPolynomial<T: Coeff> {
    d: usize,
    terms: BTreeMap<Word, T>,
}

fn accumulate<T: Coeff>(terms: &mut BTreeMap<Word, T>, word: Word, c: T) {
    match terms.entry(word) {
        Entry::Vacant(e) => {
            if !c.is_zero() {
                e.insert(c);
            }
        }
        Entry::Occupied(mut e) => {
            let sum = e.get().clone() + c;
            if sum.is_zero() {
                e.remove();
            } else {
                *e.get_mut() = sum;
            }
        }
    }
}

impl<T: Coeff> NCPolynomial<T> {
    pub fn zero(d: usize) -> Self {
        NCPolynomial {
            d,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(d: usize) -> Self {
        Self::constant(d, T::one())
    }

    pub fn constant(d: usize, c: T) -> Self {
        let mut terms = BTreeMap::new();
        accumulate(&mut terms, Word::empty(), c);
        NCPolynomial { d, terms }
    }

    /// The variable with index `i`.
    pub fn var(d: usize, i: usize) -> Result<Self> {
        Self::monomial(d, Word::letter(i as Letter), T::one())
    }

    pub fn monomial(d: usize, word: Word, c: T) -> Result<Self> {
        Self::from_terms(d, [(word, c)])
    }

    /// Builds a polynomial from `(word, coefficient)` pairs. Repeated words are
    /// summed, exact zeros dropped.
    pub fn from_terms<I>(d: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Word, T)>,
    {
        let mut map = BTreeMap::new();
        for (w, c) in terms {
            if let Some(l) = w.max_letter() {
                if l as usize >= d {
                    return Err(Error::Domain(format!(
                        "letter {l} out of range for {d} variables"
                    )));
                }
            }
            accumulate(&mut map, w, c);
        }
        Ok(NCPolynomial { d, terms: map })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &T)> + '_ {
        self.terms.iter()
    }

    pub fn coeff(&self, w: &Word) -> Option<&T> {
        self.terms.get(w)
    }

    pub fn degree(&self) -> Degree {
        self.terms
            .keys()
            .map(Word::len)
            .max()
            .map_or(Degree::MinusInfinity, Degree::Finite)
    }

    /// True iff every word has the same length (vacuously for zero).
    pub fn is_homogeneous(&self) -> bool {
        let mut lens = self.terms.keys().map(Word::len);
        match lens.next() {
            None => true,
            Some(first) => lens.all(|l| l == first),
        }
    }

    pub fn homogeneous_component(&self, degree: usize) -> Self {
        NCPolynomial {
            d: self.d,
            terms: self
                .terms
                .iter()
                .filter(|(w, _)| w.len() == degree)
                .map(|(w, c)| (w.clone(), c.clone()))
                .collect(),
        }
    }

    /// Drops all terms of degree above `cap`.
    pub fn truncate_degree(&self, cap: usize) -> Self {
        NCPolynomial {
            d: self.d,
            terms: self
                .terms
                .iter()
                .filter(|(w, _)| w.len() <= cap)
                .map(|(w, c)| (w.clone(), c.clone()))
                .collect(),
        }
    }

    /// Square root of the sum of squared coefficient moduli.
    pub fn h2_norm(&self) -> f64 {
        let mut scale = 0.0f64;
        let mut ssq = 1.0f64;
        // scaled sum of squares, stable for wide coefficient ranges
        for c in self.terms.values() {
            let a = c.modulus_f64();
            if a == 0.0 {
                continue;
            }
            if scale < a {
                ssq = 1.0 + ssq * (scale / a) * (scale / a);
                scale = a;
            } else {
                ssq += (a / scale) * (a / scale);
            }
        }
        scale * ssq.sqrt()
    }

    pub fn l1_norm(&self) -> f64 {
        self.terms.values().map(Coeff::modulus_f64).sum()
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        check_dim(self.d, other.d)?;
        let mut terms = self.terms.clone();
        for (w, c) in &other.terms {
            accumulate(&mut terms, w.clone(), c.clone());
        }
        Ok(NCPolynomial { d: self.d, terms })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        check_dim(self.d, other.d)?;
        let mut terms = self.terms.clone();
        for (w, c) in &other.terms {
            accumulate(&mut terms, w.clone(), -c.clone());
        }
        Ok(NCPolynomial { d: self.d, terms })
    }

    /// Product: coefficients convolve along word concatenation.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        check_dim(self.d, other.d)?;
        let mut terms = BTreeMap::new();
        for (u, a) in &self.terms {
            for (v, b) in &other.terms {
                accumulate(&mut terms, u.concat(v), a.clone() * b.clone());
            }
        }
        Ok(NCPolynomial { d: self.d, terms })
    }

    pub fn scale_by(&self, c: &T) -> Self {
        let mut terms = BTreeMap::new();
        for (w, a) in &self.terms {
            accumulate(&mut terms, w.clone(), a.clone() * c.clone());
        }
        NCPolynomial { d: self.d, terms }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.d);
        for _ in 0..e {
            acc = acc.try_mul(self).expect("same d");
        }
        acc
    }

    pub fn map_coeffs<U: Coeff>(&self, f: impl Fn(&T) -> U) -> NCPolynomial<U> {
        let mut terms = BTreeMap::new();
        for (w, c) in &self.terms {
            accumulate(&mut terms, w.clone(), f(c));
        }
        NCPolynomial { d: self.d, terms }
    }

    pub fn to_complex(&self) -> NCPolynomial<Complex64> {
        self.map_coeffs(Coeff::to_c64)
    }
}

impl<T: ScalableCoeff> NCPolynomial<T> {
    pub fn scale_real(&self, factor: f64) -> Self {
        self.map_coeffs(|c| c.scale(factor))
    }

    /// Rescales to unit H² norm.
    pub fn normalize_h2(&self) -> Result<Self> {
        let norm = self.h2_norm();
        if norm == 0.0 {
            return Err(Error::Domain("cannot normalize the zero polynomial".into()));
        }
        Ok(self.scale_real(1.0 / norm))
    }
}

impl<T: Coeff> fmt::Display for NCPolynomial<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (w, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c:?})*{w}")?;
        }
        Ok(())
    }
}

impl<T: Coeff> fmt::Debug for NCPolynomial<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NCPolynomial(d={}; {})", self.d, self)
    }
}

// Operator sugar. These panic on mismatched `d`; use the `try_*` methods to
// get a `Result` instead.

impl<T: Coeff> Add for &NCPolynomial<T> {
    type Output = NCPolynomial<T>;
    fn add(self, rhs: Self) -> NCPolynomial<T> {
        self.try_add(rhs)
            .expect("dimension mismatch in polynomial sum")
    }
}

impl<T: Coeff> Sub for &NCPolynomial<T> {
    type Output = NCPolynomial<T>;
    fn sub(self, rhs: Self) -> NCPolynomial<T> {
        self.try_sub(rhs)
            .expect("dimension mismatch in polynomial difference")
    }
}

impl<T: Coeff> Mul for &NCPolynomial<T> {
    type Output = NCPolynomial<T>;
    fn mul(self, rhs: Self) -> NCPolynomial<T> {
        self.try_mul(rhs)
            .expect("dimension mismatch in polynomial product")
    }
}

impl<T: Coeff> Neg for &NCPolynomial<T> {
    type Output = NCPolynomial<T>;
    fn neg(self) -> NCPolynomial<T> {
        self.map_coeffs(|c| -c.clone())
    }
}
