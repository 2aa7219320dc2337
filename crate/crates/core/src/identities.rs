//! Polynomial identities of matrix algebras: homogeneous free polynomials that
//! vanish on every tuple of `n x n` matrices.
//!
//! Three sources: the standard polynomial `S_{2n}` pushed down to two
//! variables, the Hall identity for `M_2`, and a numerical kernel search over
//! all words of a fixed degree.

use nalgebra::DVector;
use num_complex::Complex64;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ncpoly::json::PolyJson;
use crate::ncpoly::{evaluate, CMatrix, Degree, Letter, MatrixTuple, NCPolynomial, Word};
use crate::numerics::random::{random_tuple_with, seeded_rng, tags};
use crate::numerics::{nullspace, operator_norm, DEFAULT_NORM_TOL};
use crate::scalar::Coeff;
use crate::Poly;

/// Largest `m` accepted by [`standard_polynomial`] (`8! = 40320` terms).
pub const MAX_STANDARD_DEGREE: usize = 8;
pub const DEFAULT_CERTIFY_TOL: f64 = 1e-9;
pub const KERNEL_RECERTIFY_TRIALS: usize = 50;
const MAX_KERNEL_COLUMNS: usize = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Standard2var,
    Hall,
    Kernel,
}

#[derive(Clone, Copy, Debug)]
pub struct CertifyOptions {
    pub trials: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            trials: 20,
            tol: DEFAULT_CERTIFY_TOL,
            seed: 0,
        }
    }
}

/// Outcome of [`certify_identity`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Certification {
    pub level: usize,
    pub trials: usize,
    pub tol: f64,
    pub max_residual: f64,
}

impl Certification {
    pub fn passed(&self) -> bool {
        self.max_residual < self.tol
    }
}

/// A unit-H² homogeneous polynomial numerically certified to vanish on
/// `M_level^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct CertifiedIdentity {
    poly: Poly,
    level: usize,
    max_residual: f64,
    trials: usize,
    provenance: Provenance,
}

impl CertifiedIdentity {
    /// Certifies `poly` at `level`. The polynomial must already be
    /// homogeneous, nonzero and H²-normalized.
    pub fn certify(
        poly: Poly,
        level: usize,
        provenance: Provenance,
        opts: &CertifyOptions,
    ) -> Result<Self> {
        check_identity_shape(&poly)?;
        let cert = certify_with_tag(
            &poly,
            level,
            opts.trials,
            opts.tol,
            opts.seed,
            tags::CERTIFY,
        )?;
        Self::from_certification(poly, provenance, cert)
    }

    fn from_certification(poly: Poly, provenance: Provenance, cert: Certification) -> Result<Self> {
        if !cert.passed() {
            return Err(Error::NotCertified {
                level: cert.level,
                residual: cert.max_residual,
                tol: cert.tol,
            });
        }
        Ok(CertifiedIdentity {
            poly,
            level: cert.level,
            max_residual: cert.max_residual,
            trials: cert.trials,
            provenance,
        })
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn max_residual(&self) -> f64 {
        self.max_residual
    }

    pub fn trials(&self) -> usize {
        self.trials
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn degree(&self) -> usize {
        self.poly.degree().finite().unwrap_or(0)
    }
}

fn check_identity_shape(poly: &Poly) -> Result<()> {
    if poly.is_zero() {
        return Err(Error::Domain("an identity must be nonzero".into()));
    }
    if !poly.is_homogeneous() {
        return Err(Error::Domain("an identity must be homogeneous".into()));
    }
    if (poly.h2_norm() - 1.0).abs() > 1e-12 {
        return Err(Error::Domain(format!(
            "identity must have unit H2 norm, got {}",
            poly.h2_norm()
        )));
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct IdentityMeta {
    level: usize,
    residual: f64,
    trials: usize,
    provenance: Provenance,
}

#[derive(Serialize, Deserialize)]
struct IdentityJson {
    #[serde(flatten)]
    poly: PolyJson,
    identity: IdentityMeta,
}

impl Serialize for CertifiedIdentity {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        IdentityJson {
            poly: PolyJson::from(&self.poly),
            identity: IdentityMeta {
                level: self.level,
                residual: self.max_residual,
                trials: self.trials,
                provenance: self.provenance,
            },
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CertifiedIdentity {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = IdentityJson::deserialize(de)?;
        let poly = Poly::try_from(j.poly).map_err(D::Error::custom)?;
        check_identity_shape(&poly).map_err(D::Error::custom)?;
        Ok(CertifiedIdentity {
            poly,
            level: j.identity.level,
            max_residual: j.identity.residual,
            trials: j.identity.trials,
            provenance: j.identity.provenance,
        })
    }
}

/// All permutations of `0..m` with their signs, by Heap's algorithm.
fn signed_permutations(m: usize) -> Vec<(Vec<usize>, i64)> {
    let mut perm: Vec<usize> = (0..m).collect();
    let mut out = vec![(perm.clone(), 1)];
    let mut counters = vec![0usize; m];
    let mut sign = 1i64;
    let mut i = 1;
    while i < m {
        if counters[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(counters[i], i);
            }
            sign = -sign;
            out.push((perm.clone(), sign));
            counters[i] += 1;
            i = 1;
        } else {
            counters[i] = 0;
            i += 1;
        }
    }
    out
}

/// `S_m = sum_σ sgn(σ) x_σ(1) ... x_σ(m)` in `m` variables.
pub fn standard_polynomial<T: Coeff>(m: usize) -> Result<NCPolynomial<T>> {
    if m == 0 {
        return Err(Error::Precondition(
            "standard polynomial needs m >= 1".into(),
        ));
    }
    if m > MAX_STANDARD_DEGREE {
        return Err(Error::Size {
            what: "standard polynomial order",
            size: m as u128,
            limit: MAX_STANDARD_DEGREE as u128,
        });
    }
    NCPolynomial::from_terms(
        m,
        signed_permutations(m).into_iter().map(|(perm, sign)| {
            let word = Word::new(perm.into_iter().map(|i| i as Letter).collect());
            let c = if sign > 0 { T::one() } else { -T::one() };
            (word, c)
        }),
    )
}

/// Replaces letter `i` of `p` by `words[i]` (an algebra map into
/// `target_d` variables).
pub fn substitute<T: Coeff>(
    p: &NCPolynomial<T>,
    words: &[Word],
    target_d: usize,
) -> Result<NCPolynomial<T>> {
    if words.len() != p.d() {
        return Err(Error::Dimension {
            expected: p.d(),
            found: words.len(),
        });
    }
    if words.iter().any(Word::is_empty) {
        return Err(Error::Domain("replacement words must be nonempty".into()));
    }
    NCPolynomial::from_terms(
        target_d,
        p.terms().map(|(w, c)| {
            let mut letters = Vec::new();
            for &l in w.letters() {
                letters.extend_from_slice(words[l as usize].letters());
            }
            (Word::new(letters), c.clone())
        }),
    )
}

fn check_standard_level(n: usize) -> Result<()> {
    if (1..=4).contains(&n) {
        Ok(())
    } else {
        Err(Error::Size {
            what: "standard identity level",
            size: n as u128,
            limit: 4,
        })
    }
}

/// `S_{2n}(x, xy, xy^2, ..., xy^{2n-1})` before normalization: homogeneous of
/// degree `n(2n+1)` with `(2n)!` coefficients `±1`.
pub fn standard_identity_2var_poly<T: Coeff>(n: usize) -> Result<NCPolynomial<T>> {
    check_standard_level(n)?;
    let words: Vec<Word> = (0..2 * n)
        .map(|i| {
            let mut letters = vec![0];
            letters.extend(std::iter::repeat_n(1, i));
            Word::new(letters)
        })
        .collect();
    substitute(&standard_polynomial::<T>(2 * n)?, &words, 2)
}

pub fn standard_identity_2var(n: usize) -> Result<CertifiedIdentity> {
    standard_identity_2var_with(n, &CertifyOptions::default())
}

pub fn standard_identity_2var_with(n: usize, opts: &CertifyOptions) -> Result<CertifiedIdentity> {
    let poly = standard_identity_2var_poly::<i64>(n)?
        .to_complex()
        .normalize_h2()?;
    CertifiedIdentity::certify(poly, n, Provenance::Standard2var, opts)
}

/// `[[x, y]^2, x]` expanded with integer coefficients.
pub fn hall_poly<T: Coeff>() -> NCPolynomial<T> {
    let x = NCPolynomial::<T>::var(2, 0).expect("d = 2");
    let y = NCPolynomial::<T>::var(2, 1).expect("d = 2");
    let c = &(&x * &y) - &(&y * &x);
    let c2 = &c * &c;
    &(&c2 * &x) - &(&x * &c2)
}

pub fn hall_identity() -> Result<CertifiedIdentity> {
    hall_identity_with(&CertifyOptions::default())
}

pub fn hall_identity_with(opts: &CertifyOptions) -> Result<CertifiedIdentity> {
    let poly = hall_poly::<i64>().to_complex().normalize_h2()?;
    CertifiedIdentity::certify(poly, 2, Provenance::Hall, opts)
}

/// Scale-free residual of `p` at one tuple:
/// `||p(X)|| / (l1(p) · max(1, ||row X||)^deg p)`.
pub fn relative_residual<T: Coeff>(p: &NCPolynomial<T>, x: &MatrixTuple) -> Result<f64> {
    let l1 = p.l1_norm();
    if l1 == 0.0 {
        return Ok(0.0);
    }
    let value = operator_norm(&evaluate(p, x)?, DEFAULT_NORM_TOL)?;
    let deg = match p.degree() {
        Degree::Finite(k) => k as i32,
        Degree::MinusInfinity => 0,
    };
    Ok(value / (l1 * x.row_norm().max(1.0).powi(deg)))
}

/// Max relative residual of `p` over `trials` random `n x n` tuples.
pub fn certify_identity<T: Coeff>(
    p: &NCPolynomial<T>,
    n: usize,
    trials: usize,
    tol: f64,
    seed: u64,
) -> Result<Certification> {
    certify_with_tag(p, n, trials, tol, seed, tags::CERTIFY)
}

fn certify_with_tag<T: Coeff>(
    p: &NCPolynomial<T>,
    n: usize,
    trials: usize,
    tol: f64,
    seed: u64,
    tag: u64,
) -> Result<Certification> {
    if trials == 0 {
        return Err(Error::Precondition(
            "certification needs at least one trial".into(),
        ));
    }
    if n == 0 {
        return Err(Error::Precondition("matrix size must be at least 1".into()));
    }
    let residuals: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = seeded_rng(seed, tag, t as u64);
            let x = random_tuple_with(&mut rng, n, p.d(), 1.0);
            relative_residual(p, &x)
        })
        .collect::<Result<_>>()?;
    // NaN must not be swallowed by the max
    let max_residual = residuals.into_iter().fold(0.0f64, |acc, r| {
        if r.is_nan() || acc.is_nan() {
            f64::NAN
        } else {
            acc.max(r)
        }
    });
    Ok(Certification {
        level: n,
        trials,
        tol,
        max_residual,
    })
}

/// Products `X_w` for words sorted lexicographically, sharing prefixes.
fn word_products(x: &MatrixTuple, words: &[Word]) -> Vec<CMatrix> {
    let n = x.n();
    let mut stack = vec![CMatrix::identity(n, n)];
    let mut prev: &[Letter] = &[];
    let mut out = Vec::with_capacity(words.len());
    for w in words {
        let letters = w.letters();
        let common = prev.iter().zip(letters).take_while(|(a, b)| a == b).count();
        stack.truncate(common + 1);
        for &l in &letters[common..] {
            let next = stack.last().expect("nonempty") * x.get(l as usize);
            stack.push(next);
        }
        out.push(stack[letters.len()].clone());
        prev = letters;
    }
    out
}

/// Relative size below which kernel coefficients count as zero.
const KERNEL_DUST: f64 = 1e-12;

fn kernel_vector_to_poly(v: &DVector<Complex64>, words: &[Word], d: usize) -> Result<Poly> {
    let (pivot, _) = v.iter().enumerate().fold((0, -1.0), |best, (i, z)| {
        if z.norm() > best.1 {
            (i, z.norm())
        } else {
            best
        }
    });
    let phase = if v[pivot].is_zero() {
        Complex64::from(1.0)
    } else {
        v[pivot].conj() / v[pivot].norm()
    };
    // drop SVD roundoff dust so exact zeros stay structural
    let cut = KERNEL_DUST * v[pivot].norm();
    let terms = words
        .iter()
        .cloned()
        .zip(v.iter().map(|z| z * phase))
        .filter(|(_, c)| c.norm() > cut);
    Poly::from_terms(d, terms)?.normalize_h2()
}

/// Smallest comfortable sample count for [`find_identities`]: enough rows to
/// cover the `d^degree` unknowns plus a small margin.
pub fn default_samples(n: usize, d: usize, degree: usize) -> usize {
    let columns = d.saturating_pow(degree as u32);
    columns.saturating_add(8).div_ceil((n * n).max(1)) + 4
}

/// Identities of `M_n^d` that are homogeneous of degree `degree`, found as the
/// numerical kernel of the evaluation map on `samples` random tuples.
///
/// Each kernel vector is re-certified on fresh tuples; an empty kernel gives
/// an empty list.
pub fn find_identities(
    n: usize,
    d: usize,
    degree: usize,
    samples: usize,
    tol: f64,
    seed: u64,
) -> Result<Vec<CertifiedIdentity>> {
    if n == 0 {
        return Err(Error::Precondition("matrix size must be at least 1".into()));
    }
    if d < 2 {
        return Err(Error::Precondition(format!(
            "identities are searched in d >= 2 variables, got d = {d}"
        )));
    }
    let columns = (d as u128).checked_pow(degree as u32).unwrap_or(u128::MAX);
    if columns > MAX_KERNEL_COLUMNS as u128 {
        return Err(Error::Size {
            what: "word count d^D",
            size: columns,
            limit: MAX_KERNEL_COLUMNS as u128,
        });
    }
    let columns = columns as usize;
    if (samples as u128) * ((n * n) as u128) < (columns as u128) + 8 {
        return Err(Error::Precondition(format!(
            "need samples * n^2 >= d^D + 8, have {} < {}",
            samples * n * n,
            columns + 8
        )));
    }

    let words = Word::all_of_length(d, degree);
    let blocks: Vec<Vec<CMatrix>> = (0..samples)
        .into_par_iter()
        .map(|s| {
            let mut rng = seeded_rng(seed, tags::KERNEL_SAMPLES, s as u64);
            let x = random_tuple_with(&mut rng, n, d, 1.0);
            word_products(&x, &words)
        })
        .collect();
    let nn = n * n;
    let mut a = CMatrix::zeros(samples * nn, columns);
    for (s, products) in blocks.iter().enumerate() {
        for (col, m) in products.iter().enumerate() {
            for i in 0..n {
                for j in 0..n {
                    a[(s * nn + i * n + j, col)] = m[(i, j)];
                }
            }
        }
    }

    let kernel = nullspace(&a, tol)?;
    let mut found = Vec::with_capacity(kernel.basis.len());
    for v in &kernel.basis {
        let poly = kernel_vector_to_poly(v, &words, d)?;
        let cert = certify_with_tag(
            &poly,
            n,
            KERNEL_RECERTIFY_TRIALS,
            tol,
            seed,
            tags::KERNEL_RECERTIFY,
        )?;
        if let Ok(id) = CertifiedIdentity::from_certification(poly, Provenance::Kernel, cert) {
            found.push(id);
        }
    }
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::IntPoly;

    fn word(s: &str) -> Word {
        Word::new(s.chars().map(|c| if c == 'x' { 0 } else { 1 }).collect())
    }

    fn int_poly(terms: &[(&str, i64)]) -> IntPoly {
        IntPoly::from_terms(2, terms.iter().map(|(s, c)| (word(s), *c))).unwrap()
    }

    #[test]
    fn small_standard_polynomials() {
        let s1 = standard_polynomial::<i64>(1).unwrap();
        assert_eq!(s1, IntPoly::var(1, 0).unwrap());
        assert_eq!(
            standard_polynomial::<i64>(2).unwrap(),
            int_poly(&[("xy", 1), ("yx", -1)])
        );
        let s3 = standard_polynomial::<i64>(3).unwrap();
        assert_eq!(s3.num_terms(), 6);
        let w = |v: &[Letter]| Word::new(v.to_vec());
        assert_eq!(s3.coeff(&w(&[0, 1, 2])), Some(&1));
        assert_eq!(s3.coeff(&w(&[1, 0, 2])), Some(&-1));
        assert_eq!(s3.coeff(&w(&[1, 2, 0])), Some(&1));
        assert_eq!(s3.coeff(&w(&[2, 1, 0])), Some(&-1));
        assert!(matches!(
            standard_polynomial::<i64>(9),
            Err(Error::Size { .. })
        ));
        assert!(standard_polynomial::<i64>(0).is_err());
    }

    #[test]
    fn standard_polynomial_is_alternating() {
        for m in 2..=5 {
            let s = standard_polynomial::<i64>(m).unwrap();
            for i in 0..m {
                for j in (i + 1)..m {
                    let swap: Vec<Word> = (0..m)
                        .map(|k| {
                            let t = if k == i {
                                j
                            } else if k == j {
                                i
                            } else {
                                k
                            };
                            Word::letter(t as Letter)
                        })
                        .collect();
                    assert_eq!(substitute(&s, &swap, m).unwrap(), -&s);
                }
            }
        }
    }

    #[test]
    fn substitution_examples() {
        let comm = int_poly(&[("xy", 1), ("yx", -1)]);
        let sub = substitute(&comm, &[word("x"), word("xy")], 2).unwrap();
        assert_eq!(sub, int_poly(&[("xxy", 1), ("xyx", -1)]));
        assert_eq!(substitute(&comm, &[word("x"), word("y")], 2).unwrap(), comm);
        let x = IntPoly::var(1, 0).unwrap();
        assert_eq!(
            substitute(&x, &[word("yy")], 2).unwrap(),
            int_poly(&[("yy", 1)])
        );
        assert!(matches!(
            substitute(&comm, &[word("x"), Word::empty()], 2),
            Err(Error::Domain(_))
        ));
        assert!(substitute(&comm, &[word("x")], 2).is_err());
    }

    #[test]
    fn substitution_is_multiplicative() {
        let p = int_poly(&[("xy", 2), ("x", -1), ("", 3)]);
        let q = int_poly(&[("yx", 1), ("yy", 5)]);
        let words = [word("xyy"), word("yx")];
        let lhs = substitute(&(&p * &q), &words, 2).unwrap();
        let rhs = &substitute(&p, &words, 2).unwrap() * &substitute(&q, &words, 2).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn standard_identity_shapes() {
        let p1 = standard_identity_2var_poly::<i64>(1).unwrap();
        assert_eq!(p1, int_poly(&[("xxy", 1), ("xyx", -1)]));
        for (n, terms) in [(1usize, 2usize), (2, 24), (3, 720)] {
            let p = standard_identity_2var_poly::<i64>(n).unwrap();
            assert_eq!(p.num_terms(), terms);
            assert_eq!(p.degree(), Degree::Finite(n * (2 * n + 1)));
            assert!(p.is_homogeneous());
            assert!(p.terms().all(|(_, c)| c.abs() == 1));
        }
        let p2 = standard_identity_2var_poly::<i64>(2).unwrap();
        assert!((p2.h2_norm() - 24f64.sqrt()).abs() < 1e-12);
        assert!(standard_identity_2var_poly::<i64>(5).is_err());
        assert!(standard_identity_2var_poly::<i64>(0).is_err());
    }

    #[test]
    fn normalized_first_identity() {
        let id = standard_identity_2var(1).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(id.degree(), 3);
        assert!((id.poly().coeff(&word("xxy")).unwrap().re - r).abs() < 1e-15);
        assert!((id.poly().coeff(&word("xyx")).unwrap().re + r).abs() < 1e-15);
        // scalars commute, so p_1 vanishes on them; exactly when products are
        // representable, to roundoff otherwise
        let x =
            MatrixTuple::scalars(&[Complex64::new(0.5, -1.0), Complex64::new(2.0, 0.25)]).unwrap();
        let v = evaluate(id.poly(), &x).unwrap();
        assert_eq!(v[(0, 0)], Complex64::zero());
        let x =
            MatrixTuple::scalars(&[Complex64::new(0.3, -1.1), Complex64::new(0.7, 0.9)]).unwrap();
        assert!(evaluate(id.poly(), &x).unwrap()[(0, 0)].norm() < 1e-15);
    }

    #[test]
    fn hall_expansion() {
        let h = hall_poly::<i64>();
        assert_eq!(h.num_terms(), 6);
        assert_eq!(h.degree(), Degree::Finite(5));
        assert!(h.terms().all(|(_, c)| c.abs() == 1));
        assert!(h.coeff(&word("xyxyx")).is_none());
        assert!((h.h2_norm() - 6f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn hall_certification() {
        let hall = hall_poly::<i64>().to_complex().normalize_h2().unwrap();
        let at2 = certify_identity(&hall, 2, 50, 1e-9, 1).unwrap();
        assert!(at2.max_residual < 1e-10);
        let at3 = certify_identity(&hall, 3, 5, 1e-9, 1).unwrap();
        assert!(at3.max_residual > 1e-3);
        let id = hall_identity().unwrap();
        assert_eq!(id.provenance(), Provenance::Hall);
        assert_eq!(id.level(), 2);
    }

    #[test]
    fn certification_detects_non_identities() {
        let x = Poly::var(2, 0).unwrap();
        let c = certify_identity(&x, 1, 10, 1e-9, 0).unwrap();
        // |x| / max(1, |(x, y)|) over scalars: order one, far above any tolerance
        assert!(c.max_residual > 0.5 && c.max_residual <= 1.0 + 1e-12);
        assert!(!c.passed());

        let p1 = standard_identity_2var(1).unwrap();
        let at2 = certify_identity(p1.poly(), 2, 20, 1e-9, 0).unwrap();
        assert!(at2.max_residual > 1e-3);

        assert!(matches!(
            CertifiedIdentity::certify(x, 1, Provenance::Kernel, &CertifyOptions::default()),
            Err(Error::NotCertified { .. })
        ));
    }

    #[test]
    fn standard_identities_certify_at_their_level() {
        let p2 = standard_identity_2var(2).unwrap();
        let c = certify_identity(p2.poly(), 2, 50, 1e-9, 3).unwrap();
        assert!(c.max_residual < 1e-10);
    }

    #[test]
    fn standard_identity_vanishes_below_twice_its_level() {
        // X, XY, .., XY^{2n-1} span at most j dimensions in M_j, so the
        // alternating sum dies on M_j for every j < 2n.
        let p2 = standard_identity_2var(2).unwrap();
        assert!(certify_identity(p2.poly(), 3, 10, 1e-9, 0)
            .unwrap()
            .passed());
        assert!(
            certify_identity(p2.poly(), 4, 10, 1e-9, 0)
                .unwrap()
                .max_residual
                > 1e-12
        );
    }

    #[test]
    fn kernel_finds_the_commutator() {
        let ids = find_identities(1, 2, 2, 20, 1e-9, 0).unwrap();
        assert_eq!(ids.len(), 1);
        let p = ids[0].poly();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let target = Poly::from_terms(
            2,
            [
                (word("xy"), Complex64::from(r)),
                (word("yx"), Complex64::from(-r)),
            ],
        )
        .unwrap();
        let overlap: Complex64 = target
            .terms()
            .map(|(w, c)| c.conj() * p.coeff(w).copied().unwrap_or_default())
            .sum();
        assert!((overlap.norm() - 1.0).abs() < 1e-9);
        assert_eq!(ids[0].provenance(), Provenance::Kernel);
    }

    #[test]
    fn kernel_empty_for_linear_words() {
        assert!(find_identities(1, 2, 1, 20, 1e-9, 0).unwrap().is_empty());
    }

    #[test]
    fn kernel_preconditions() {
        assert!(matches!(
            find_identities(1, 2, 4, 10, 1e-9, 0),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            find_identities(1, 2, 21, 10, 1e-9, 0),
            Err(Error::Size { .. })
        ));
        assert!(matches!(
            find_identities(1, 1, 2, 20, 1e-9, 0),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn identity_json_round_trip() {
        let id = hall_identity().unwrap();
        let s = serde_json::to_string(&id).unwrap();
        assert!(s.contains(r#""identity":{"level":2"#));
        assert!(s.contains(r#""provenance":"hall""#));
        let back: CertifiedIdentity = serde_json::from_str(&s).unwrap();
        assert_eq!(back, id);
    }
}
