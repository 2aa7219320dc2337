//! JSON persistence for polynomials and matrix tuples.
//!
//! Polynomial: `{"d": 2, "terms": [{"w": [0, 1], "c": [re, im]}, ...]}` with
//! terms in canonical (graded lexicographic) order.
//! Matrix tuple: `{"n": 2, "d": 2, "mats": [[[[re, im], ...], ...], ...]}`,
//! each matrix row-major.

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::eval::{CMatrix, MatrixTuple};
use super::poly::NCPolynomial;
use super::word::{Letter, Word};
use crate::error::{Error, Result};
use crate::scalar::Coeff;

#[derive(Serialize, Deserialize)]
pub(crate) struct TermJson {
    pub w: Vec<Letter>,
    pub c: [f64; 2],
}

#[derive(Serialize, Deserialize)]
pub(crate) struct PolyJson {
    pub d: usize,
    pub terms: Vec<TermJson>,
}

impl<T: Coeff> From<&NCPolynomial<T>> for PolyJson {
    fn from(p: &NCPolynomial<T>) -> Self {
        PolyJson {
            d: p.d(),
            terms: p
                .terms()
                .map(|(w, c)| {
                    let z = c.to_c64();
                    TermJson {
                        w: w.letters().to_vec(),
                        c: [z.re, z.im],
                    }
                })
                .collect(),
        }
    }
}

impl TryFrom<PolyJson> for NCPolynomial<Complex64> {
    type Error = Error;

    fn try_from(j: PolyJson) -> Result<Self> {
        let mut seen = std::collections::BTreeSet::new();
        for t in &j.terms {
            if !seen.insert(t.w.clone()) {
                return Err(Error::Format(format!("duplicate word {:?}", t.w)));
            }
            if !(t.c[0].is_finite() && t.c[1].is_finite()) {
                return Err(Error::Format("non-finite coefficient".into()));
            }
        }
        NCPolynomial::from_terms(
            j.d,
            j.terms
                .into_iter()
                .map(|t| (Word::new(t.w), Complex64::new(t.c[0], t.c[1]))),
        )
    }
}

impl<T: Coeff> Serialize for NCPolynomial<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolyJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for NCPolynomial<Complex64> {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let j = PolyJson::deserialize(de)?;
        NCPolynomial::try_from(j).map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct TupleJson {
    n: usize,
    d: usize,
    mats: Vec<Vec<Vec<[f64; 2]>>>,
}

impl From<&MatrixTuple> for TupleJson {
    fn from(x: &MatrixTuple) -> Self {
        let n = x.n();
        TupleJson {
            n,
            d: x.d(),
            mats: x
                .mats()
                .iter()
                .map(|m| {
                    (0..n)
                        .map(|i| (0..n).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
                        .collect()
                })
                .collect(),
        }
    }
}

impl TryFrom<TupleJson> for MatrixTuple {
    type Error = Error;

    fn try_from(j: TupleJson) -> Result<Self> {
        if j.mats.len() != j.d {
            return Err(Error::Format(format!(
                "declared d = {} but {} matrices given",
                j.d,
                j.mats.len()
            )));
        }
        let mut mats = Vec::with_capacity(j.d);
        for m in &j.mats {
            if m.len() != j.n || m.iter().any(|row| row.len() != j.n) {
                return Err(Error::Format(format!("matrix is not {0}x{0}", j.n)));
            }
            mats.push(CMatrix::from_fn(j.n, j.n, |r, c| {
                Complex64::new(m[r][c][0], m[r][c][1])
            }));
        }
        let x = MatrixTuple::new(mats)?;
        if !x.is_finite() {
            return Err(Error::Format("non-finite matrix entry".into()));
        }
        Ok(x)
    }
}

impl Serialize for MatrixTuple {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        TupleJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for MatrixTuple {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let j = TupleJson::deserialize(de)?;
        MatrixTuple::try_from(j).map_err(D::Error::custom)
    }
}

/// Row-major `[[re, im], ...]` rows of a complex matrix.
pub fn matrix_to_json(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| [m[(i, j)].re, m[(i, j)].im])
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Poly;

    #[test]
    fn polynomial_layout() {
        let p = Poly::from_terms(
            2,
            [
                (Word::new(vec![1, 0]), Complex64::new(-1.0, 0.0)),
                (Word::empty(), Complex64::new(0.5, 2.0)),
                (Word::new(vec![0, 1]), Complex64::new(1.0, 0.0)),
            ],
        )
        .unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(
            s,
            r#"{"d":2,"terms":[{"w":[],"c":[0.5,2.0]},{"w":[0,1],"c":[1.0,0.0]},{"w":[1,0],"c":[-1.0,0.0]}]}"#
        );
        let back: Poly = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn rejects_bad_polynomials() {
        let dup = r#"{"d":2,"terms":[{"w":[0],"c":[1,0]},{"w":[0],"c":[1,0]}]}"#;
        assert!(serde_json::from_str::<Poly>(dup).is_err());
        let bad_letter = r#"{"d":2,"terms":[{"w":[2],"c":[1,0]}]}"#;
        assert!(serde_json::from_str::<Poly>(bad_letter).is_err());
    }

    #[test]
    fn tuple_layout() {
        let x = MatrixTuple::new(vec![
            CMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0].map(Complex64::from)),
            CMatrix::identity(2, 2),
        ])
        .unwrap();
        let s = serde_json::to_string(&x).unwrap();
        assert!(
            s.starts_with(r#"{"n":2,"d":2,"mats":[[[[1.0,0.0],[2.0,0.0]],[[3.0,0.0],[4.0,0.0]]]"#)
        );
        let back: MatrixTuple = serde_json::from_str(&s).unwrap();
        assert_eq!(back, x);
        let bad = r#"{"n":2,"d":1,"mats":[[[[1,0]],[[1,0]]]]}"#;
        assert!(serde_json::from_str::<MatrixTuple>(bad).is_err());
    }
}
