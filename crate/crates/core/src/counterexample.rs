//! The entire free function `f = sum_{k>=1} q_k`, with
//! `q_k = prod_n p_n^{floor(k / (2^n deg p_n))}` over a finite family of
//! certified identities `p_1, .., p_M`.
//!
//! On `M_n` every `q_k` with `k >= 2^n deg p_n` contains a positive power of
//! `p_n` and vanishes, so `f(X)` is a finite sum. Evaluation multiplies cached
//! matrix powers of `p_n(X)` and never expands `q_k`.

use std::collections::HashMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::identities::{
    default_samples, find_identities, hall_identity_with, standard_identity_2var_with,
    CertifiedIdentity, CertifyOptions, DEFAULT_CERTIFY_TOL,
};
use crate::ncpoly::{evaluate, CMatrix, MatrixTuple};
use crate::Poly;

pub const DEFAULT_MAX_LEVEL: usize = 4;
/// Largest monomial count [`Counterexample::build_qk`] will expand.
pub const EXPANSION_LIMIT: u128 = 1 << 22;

/// How the generators `p_n` are chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeneratorChoice {
    /// `standard_identity_2var(n)` at every level.
    Standard2var,
    /// As `Standard2var`, with the Hall identity at level 2.
    HallOverride,
    /// Lowest-degree kernel identity per level, standard identity as fallback.
    Kernel,
}

/// Certified identities `p_1, .., p_M`, member `n` vanishing on `M_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorFamily {
    members: Vec<CertifiedIdentity>,
    d: usize,
    degrees: Vec<usize>,
    l1_bounds: Vec<f64>,
    h2_norms: Vec<f64>,
}

impl GeneratorFamily {
    pub fn new(members: Vec<CertifiedIdentity>) -> Result<Self> {
        if members.len() < 2 {
            return Err(Error::Precondition(format!(
                "a generator family needs at least 2 levels, got {}",
                members.len()
            )));
        }
        let d = members[0].poly().d();
        if d < 2 {
            return Err(Error::Precondition(
                "the construction needs at least two variables".into(),
            ));
        }
        for (i, m) in members.iter().enumerate() {
            check_dim(d, m.poly().d())?;
            if m.level() != i + 1 {
                return Err(Error::Precondition(format!(
                    "member {} is certified at level {}, expected {}",
                    i + 1,
                    m.level(),
                    i + 1
                )));
            }
            if m.degree() == 0 {
                return Err(Error::Precondition(
                    "generators must have positive degree".into(),
                ));
            }
        }
        let degrees = members.iter().map(CertifiedIdentity::degree).collect();
        let l1_bounds = members.iter().map(|m| m.poly().l1_norm()).collect();
        let h2_norms = members.iter().map(|m| m.poly().h2_norm()).collect();
        Ok(GeneratorFamily {
            members,
            d,
            degrees,
            l1_bounds,
            h2_norms,
        })
    }

    pub fn standard(max_level: usize) -> Result<Self> {
        Self::build(
            GeneratorChoice::Standard2var,
            max_level,
            &CertifyOptions::default(),
        )
    }

    pub fn with_hall_override(max_level: usize) -> Result<Self> {
        Self::build(
            GeneratorChoice::HallOverride,
            max_level,
            &CertifyOptions::default(),
        )
    }

    pub fn build(choice: GeneratorChoice, max_level: usize, opts: &CertifyOptions) -> Result<Self> {
        let members = (1..=max_level)
            .map(|n| match (choice, n) {
                (GeneratorChoice::HallOverride, 2) => hall_identity_with(opts),
                (GeneratorChoice::Kernel, n) => kernel_generator(n, opts),
                _ => standard_identity_2var_with(n, opts),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(members)
    }

    /// `M`, the number of levels.
    pub fn max_level(&self) -> usize {
        self.members.len()
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn members(&self) -> &[CertifiedIdentity] {
        &self.members
    }

    /// Generator at level `n` (1-based).
    pub fn member(&self, n: usize) -> &CertifiedIdentity {
        &self.members[n - 1]
    }

    pub fn poly(&self, n: usize) -> &Poly {
        self.members[n - 1].poly()
    }

    pub fn degree(&self, n: usize) -> usize {
        self.degrees[n - 1]
    }

    pub fn l1_bound(&self, n: usize) -> f64 {
        self.l1_bounds[n - 1]
    }
}

/// Kernel search up to this many words per level before falling back.
const KERNEL_SEARCH_COLUMNS: usize = 1 << 8;

fn kernel_generator(n: usize, opts: &CertifyOptions) -> Result<CertifiedIdentity> {
    let d = 2usize;
    let mut degree = 2;
    while d.pow(degree as u32) <= KERNEL_SEARCH_COLUMNS {
        let found = find_identities(
            n,
            d,
            degree,
            default_samples(n, d, degree),
            DEFAULT_CERTIFY_TOL,
            opts.seed,
        )?;
        if let Some(first) = found.into_iter().next() {
            return Ok(first);
        }
        degree += 1;
    }
    standard_identity_2var_with(n, opts)
}

#[derive(Serialize, Deserialize)]
struct FamilyJson {
    #[serde(rename = "M")]
    max_level: usize,
    d: usize,
    members: Vec<CertifiedIdentity>,
}

impl Serialize for GeneratorFamily {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FamilyJson {
            max_level: self.max_level(),
            d: self.d,
            members: self.members.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GeneratorFamily {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = FamilyJson::deserialize(de)?;
        if j.members.len() != j.max_level {
            return Err(D::Error::custom("M does not match the member count"));
        }
        let fam = GeneratorFamily::new(j.members).map_err(D::Error::custom)?;
        if fam.d != j.d {
            return Err(D::Error::custom("d does not match the members"));
        }
        Ok(fam)
    }
}

/// A maximal run of consecutive `k` sharing one exponent vector, hence one
/// `q_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QkGroup {
    pub first: u64,
    pub last: u64,
    pub exponents: Vec<u64>,
    pub degree: u64,
}

impl QkGroup {
    pub fn count(&self) -> u64 {
        self.last - self.first + 1
    }
}

#[derive(Clone, Debug)]
pub struct Counterexample {
    family: GeneratorFamily,
}

impl Counterexample {
    pub fn new(family: GeneratorFamily) -> Self {
        Counterexample { family }
    }

    pub fn family(&self) -> &GeneratorFamily {
        &self.family
    }

    pub fn max_level(&self) -> usize {
        self.family.max_level()
    }

    /// `2^n deg p_n`: `p_n` first appears in `q_k` at this `k`.
    pub fn period(&self, n: usize) -> u64 {
        (1u64 << n) * self.family.degree(n) as u64
    }

    /// `floor(k / (2^n deg p_n))`.
    ///
    /// Panics unless `1 <= n <= M`.
    pub fn exponent(&self, k: u64, n: usize) -> u64 {
        assert!(
            (1..=self.max_level()).contains(&n),
            "level {n} out of range"
        );
        k / self.period(n)
    }

    pub fn exponents(&self, k: u64) -> Vec<u64> {
        (1..=self.max_level())
            .map(|n| self.exponent(k, n))
            .collect()
    }

    pub fn qk_degree(&self, k: u64) -> u64 {
        self.exponents(k)
            .iter()
            .enumerate()
            .map(|(i, e)| e * self.family.degree(i + 1) as u64)
            .sum()
    }

    /// `prod_n ||p_n||_{H2}^{e_n}`, exact for products of homogeneous factors.
    pub fn qk_h2_norm(&self, k: u64) -> f64 {
        self.exponents(k)
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| self.family.h2_norms[i].powi(e as i32))
            .product()
    }

    /// Monomial count of the expanded `q_k` (saturating).
    pub fn qk_term_count(&self, k: u64) -> u128 {
        self.exponents(k)
            .iter()
            .enumerate()
            .fold(1u128, |acc, (i, &e)| {
                let terms = self.family.poly(i + 1).num_terms() as u128;
                let pow = u32::try_from(e)
                    .ok()
                    .and_then(|e| terms.checked_pow(e))
                    .unwrap_or(u128::MAX);
                acc.saturating_mul(pow)
            })
    }

    /// Expands `q_k`, multiplying factors in ascending `n`.
    pub fn build_qk(&self, k: u64) -> Result<Poly> {
        let count = self.qk_term_count(k);
        if count > EXPANSION_LIMIT {
            return Err(Error::Size {
                what: "expanded q_k monomial count (use factored evaluation)",
                size: count,
                limit: EXPANSION_LIMIT,
            });
        }
        let mut q = Poly::one(self.family.d());
        for (i, &e) in self.exponents(k).iter().enumerate() {
            for _ in 0..e {
                q = q.try_mul(self.family.poly(i + 1))?;
            }
        }
        Ok(q)
    }

    /// `2^m deg p_m`; on `M_m`, `q_k = 0` for every `k` at or beyond it.
    pub fn truncation_threshold(&self, m: usize) -> Result<u64> {
        if m == 0 || m > self.max_level() {
            return Err(Error::Level {
                n: m,
                max: self.max_level(),
            });
        }
        Ok(self.period(m))
    }

    /// First `k` from which every `q_k` vanishes on `M_n`:
    /// `min_{n <= m <= M} threshold(m)`. Equals `threshold(n)` for families
    /// with increasing thresholds, such as the default one.
    pub fn evaluation_cutoff(&self, n: usize) -> Result<u64> {
        if n == 0 || n > self.max_level() {
            return Err(Error::Level {
                n,
                max: self.max_level(),
            });
        }
        Ok((n..=self.max_level())
            .map(|m| self.period(m))
            .min()
            .expect("nonempty range"))
    }

    /// Groups of consecutive `k` in `1..=k_max` with equal exponent vectors.
    pub fn groups(&self, k_max: u64) -> Vec<QkGroup> {
        let mut out: Vec<QkGroup> = Vec::new();
        let mut k = 1;
        while k <= k_max {
            let exponents = self.exponents(k);
            // next k at which some exponent increments
            let next = (1..=self.max_level())
                .map(|n| (k / self.period(n) + 1) * self.period(n))
                .min()
                .expect("nonempty family");
            let last = (next - 1).min(k_max);
            out.push(QkGroup {
                first: k,
                last,
                degree: self.qk_degree(k),
                exponents,
            });
            k = last + 1;
        }
        out
    }

    /// `sum_{k=1}^{K} q_k`, dropping every `q_k` of degree above `degree_cap`.
    pub fn partial_sum(&self, k_max: u64, degree_cap: Option<usize>) -> Result<Poly> {
        let mut sum = Poly::zero(self.family.d());
        for g in self.groups(k_max) {
            if degree_cap.is_some_and(|cap| g.degree > cap as u64) {
                continue;
            }
            let q = self.build_qk(g.first)?;
            sum = sum.try_add(&q.scale_by(&Complex64::from(g.count() as f64)))?;
        }
        Ok(sum)
    }

    /// `||sum_{k<=K} q_k||_{H2}`, without expansion: distinct groups have
    /// distinct degrees, so their contributions are orthogonal.
    pub fn h2_growth(&self, k_max: u64) -> f64 {
        self.groups(k_max)
            .iter()
            .map(|g| {
                let c = g.count() as f64 * self.qk_h2_norm(g.first);
                c * c
            })
            .sum::<f64>()
            .sqrt()
    }

    fn check_tuple(&self, x: &MatrixTuple) -> Result<()> {
        check_dim(self.family.d(), x.d())?;
        if x.n() > self.max_level() {
            return Err(Error::Level {
                n: x.n(),
                max: self.max_level(),
            });
        }
        Ok(())
    }

    /// `q_k(X)` from cached powers of `p_n(X)`.
    pub fn evaluate_qk(&self, k: u64, x: &MatrixTuple) -> Result<CMatrix> {
        check_dim(self.family.d(), x.d())?;
        let mut ev = FactoredEvaluator::new(self, x);
        ev.product(&self.exponents(k))
    }

    /// `f(X) = sum_{k < cutoff(n)} q_k(X)` for `X` in `M_n`, `n <= M`.
    pub fn evaluate_f(&self, x: &MatrixTuple) -> Result<CMatrix> {
        self.check_tuple(x)?;
        let cutoff = self.evaluation_cutoff(x.n())?;
        let mut ev = FactoredEvaluator::new(self, x);
        let n = x.n();
        let mut f = CMatrix::zeros(n, n);
        for g in self.groups(cutoff - 1) {
            let q = ev.product(&g.exponents)?;
            f += q * Complex64::from(g.count() as f64);
        }
        Ok(f)
    }

    /// [`evaluate_f`](Self::evaluate_f) over many tuples in parallel; results
    /// are in input order.
    pub fn evaluate_f_batch(&self, xs: &[MatrixTuple]) -> Result<Vec<CMatrix>> {
        xs.par_iter().map(|x| self.evaluate_f(x)).collect()
    }
}

/// Caches `p_n(X)` and its repeated squares for one tuple.
pub struct FactoredEvaluator<'a> {
    cx: &'a Counterexample,
    x: &'a MatrixTuple,
    squares: HashMap<usize, Vec<CMatrix>>,
    powers: HashMap<(usize, u64), CMatrix>,
}

impl<'a> FactoredEvaluator<'a> {
    pub fn new(cx: &'a Counterexample, x: &'a MatrixTuple) -> Self {
        FactoredEvaluator {
            cx,
            x,
            squares: HashMap::new(),
            powers: HashMap::new(),
        }
    }

    fn square_chain(&mut self, level: usize, bits: usize) -> Result<&Vec<CMatrix>> {
        if !self.squares.contains_key(&level) {
            let base = evaluate(self.cx.family.poly(level), self.x)?;
            self.squares.insert(level, vec![base]);
        }
        let chain = self.squares.get_mut(&level).expect("inserted");
        while chain.len() < bits {
            let last = chain.last().expect("nonempty");
            let sq = last * last;
            chain.push(sq);
        }
        Ok(chain)
    }

    /// `p_level(X)^e` by repeated squaring.
    pub fn power(&mut self, level: usize, e: u64) -> Result<CMatrix> {
        if let Some(p) = self.powers.get(&(level, e)) {
            return Ok(p.clone());
        }
        let n = self.x.n();
        let bits = (64 - e.leading_zeros()) as usize;
        let chain = self.square_chain(level, bits.max(1))?;
        let mut acc = CMatrix::identity(n, n);
        for (j, sq) in chain.iter().enumerate().take(bits) {
            if (e >> j) & 1 == 1 {
                acc = &acc * sq;
            }
        }
        self.powers.insert((level, e), acc.clone());
        Ok(acc)
    }

    /// `prod_n p_n(X)^{e_n}` in ascending `n`.
    pub fn product(&mut self, exponents: &[u64]) -> Result<CMatrix> {
        let n = self.x.n();
        let mut acc = CMatrix::identity(n, n);
        for (i, &e) in exponents.iter().enumerate() {
            if e > 0 {
                acc = &acc * &self.power(i + 1, e)?;
            }
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::random_tuple;

    fn default_cx() -> Counterexample {
        Counterexample::new(GeneratorFamily::standard(DEFAULT_MAX_LEVEL).unwrap())
    }

    #[test]
    fn exponents_and_degrees() {
        let cx = default_cx();
        assert_eq!(cx.family().degree(1), 3);
        assert_eq!(cx.exponent(12, 1), 2);
        assert_eq!(cx.exponent(5, 1), 0);
        for n in 1..=4 {
            let p = cx.period(n);
            assert_eq!(cx.exponent(p - 1, n), 0);
            assert_eq!(cx.exponent(p, n), 1);
        }
        assert_eq!(cx.qk_degree(12), 6);
        assert!((cx.qk_h2_norm(40) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn thresholds() {
        let cx = default_cx();
        assert_eq!(cx.truncation_threshold(1).unwrap(), 6);
        assert_eq!(cx.truncation_threshold(2).unwrap(), 40);
        assert!(matches!(
            cx.truncation_threshold(5),
            Err(Error::Level { .. })
        ));
        let hall = Counterexample::new(GeneratorFamily::with_hall_override(3).unwrap());
        assert_eq!(hall.truncation_threshold(2).unwrap(), 20);
    }

    #[test]
    fn small_qk() {
        let cx = default_cx();
        for k in 1..6 {
            assert_eq!(cx.build_qk(k).unwrap(), Poly::one(2));
        }
        assert_eq!(cx.build_qk(6).unwrap(), *cx.family().poly(1));
        let q12 = cx.build_qk(12).unwrap();
        assert!((q12.h2_norm() - 1.0).abs() < 1e-12);
        assert!(matches!(cx.build_qk(200), Err(Error::Size { .. })));
    }

    #[test]
    fn partial_sums() {
        let cx = default_cx();
        assert_eq!(
            cx.partial_sum(5, None).unwrap(),
            Poly::constant(2, Complex64::from(5.0))
        );
        let s11 = cx.partial_sum(11, None).unwrap();
        let expected = Poly::constant(2, Complex64::from(5.0))
            .try_add(&cx.family().poly(1).scale_by(&Complex64::from(6.0)))
            .unwrap();
        assert!(s11.try_sub(&expected).unwrap().h2_norm() < 1e-15);
        assert!((s11.h2_norm().powi(2) - 61.0).abs() < 1e-12);
        assert!((cx.h2_growth(11) - 61f64.sqrt()).abs() < 1e-12);
        let capped = cx.partial_sum(11, Some(2)).unwrap();
        assert_eq!(capped, Poly::constant(2, Complex64::from(5.0)));
    }

    #[test]
    fn groups_partition_the_range() {
        let cx = default_cx();
        let gs = cx.groups(60);
        assert_eq!(gs.first().unwrap().first, 1);
        assert_eq!(gs.last().unwrap().last, 60);
        for pair in gs.windows(2) {
            assert_eq!(pair[0].last + 1, pair[1].first);
            assert!(pair[0].degree < pair[1].degree);
        }
        let total: u64 = gs.iter().map(QkGroup::count).sum();
        assert_eq!(total, 60);
    }

    #[test]
    fn f_on_scalars() {
        let cx = default_cx();
        let zero = MatrixTuple::zeros(1, 2);
        let f0 = cx.evaluate_f(&zero).unwrap();
        assert_eq!(f0[(0, 0)], Complex64::from(5.0));
        let x =
            MatrixTuple::scalars(&[Complex64::new(0.5, 0.25), Complex64::new(-2.0, 1.0)]).unwrap();
        assert!((cx.evaluate_f(&x).unwrap()[(0, 0)] - Complex64::from(5.0)).norm() < 1e-12);
    }

    #[test]
    fn f_respects_direct_sums() {
        let cx = default_cx();
        for seed in 0..5 {
            let x = random_tuple(1, 2, 1.0, seed);
            let y = random_tuple(1, 2, 1.0, seed + 100);
            let xy = x.direct_sum(&y).unwrap();
            let lhs = cx.evaluate_f(&xy).unwrap();
            let rhs =
                crate::ncpoly::direct_sum(&cx.evaluate_f(&x).unwrap(), &cx.evaluate_f(&y).unwrap());
            assert!((lhs - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn level_and_dimension_errors() {
        let cx = default_cx();
        assert!(matches!(
            cx.evaluate_f(&MatrixTuple::zeros(5, 2)),
            Err(Error::Level { n: 5, max: 4 })
        ));
        assert!(matches!(
            cx.evaluate_f(&MatrixTuple::zeros(1, 3)),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn factored_matches_expanded() {
        let cx = default_cx();
        for (n, seed) in [(1usize, 1u64), (2, 2), (2, 3)] {
            let x = crate::numerics::random_row_contraction(n, 2, 0.1, seed);
            let cutoff = cx.evaluation_cutoff(n).unwrap();
            let mut expanded = CMatrix::zeros(n, n);
            for k in 1..cutoff {
                expanded += evaluate(&cx.build_qk(k).unwrap(), &x).unwrap();
            }
            let factored = cx.evaluate_f(&x).unwrap();
            assert!((factored - expanded).norm() < 1e-10);
        }
    }

    #[test]
    fn family_validation() {
        let fam = GeneratorFamily::standard(2).unwrap();
        let mut members = fam.members().to_vec();
        members.swap(0, 1);
        assert!(GeneratorFamily::new(members).is_err());
        assert!(GeneratorFamily::new(fam.members()[..1].to_vec()).is_err());
    }

    #[test]
    fn family_json_round_trip() {
        let fam = GeneratorFamily::with_hall_override(2).unwrap();
        let s = serde_json::to_string(&fam).unwrap();
        assert!(s.starts_with(r#"{"M":2,"d":2,"members":["#));
        let back: GeneratorFamily = serde_json::from_str(&s).unwrap();
        assert_eq!(back, fam);
    }
}
