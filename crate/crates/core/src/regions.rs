//! Basic sets `B_δ = {X : ||δ(X)|| < 1}`, the row ball, and a certified
//! bound for `f` on a basic set built around a given point.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::counterexample::{Counterexample, FactoredEvaluator};
use crate::error::{check_dim, Error, Result};
use crate::fock::{cd_lower_bound, fock_dim, vacuum_norm, MAX_FOCK_DIM};
use crate::ncpoly::{evaluate_poly_matrix_with, MatrixTuple, PolyMatrix};
use crate::numerics::random::{seeded_rng, tags, tuple_with_row_norm};
use crate::numerics::{operator_norm, DEFAULT_NORM_TOL};
use crate::Poly;

/// Relative enlargement of the row norm when choosing `r`.
pub const DEFAULT_SLACK: f64 = 0.05;
/// Absolute slack on the per-term checks of an audit.
pub const AUDIT_SLACK: f64 = 1e-8;
/// Radius of the Fock witnesses reported by an audit.
pub const AUDIT_FOCK_RADIUS: f64 = 0.999;

/// Entry `(row, col)` of `δ` is a polynomial identity for every size up to
/// `level`, so its block is exactly zero there.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VanishingBlock {
    pub row: usize,
    pub col: usize,
    pub level: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BasicSet {
    delta: PolyMatrix,
    label: String,
    vanishing: Vec<VanishingBlock>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Membership {
    pub member: bool,
    /// `1 - ||δ(X)||`
    pub margin: f64,
}

/// `1 x d` matrix `[x_1/r, .., x_d/r]`; its basic set is `r C^d`.
pub fn row_ball_delta(d: usize, r: f64) -> Result<PolyMatrix> {
    if d == 0 || !(r > 0.0 && r.is_finite()) {
        return Err(Error::Domain(format!(
            "row ball needs d >= 1 and r > 0, got d={d}, r={r}"
        )));
    }
    let entries = (0..d)
        .map(|i| Ok(Poly::var(d, i)?.scale_real(1.0 / r)))
        .collect::<Result<Vec<_>>>()?;
    PolyMatrix::new(1, d, entries)
}

impl BasicSet {
    pub fn new(delta: PolyMatrix, label: impl Into<String>) -> Self {
        BasicSet {
            delta,
            label: label.into(),
            vanishing: Vec::new(),
        }
    }

    pub fn row_ball(d: usize, r: f64) -> Result<Self> {
        Ok(Self::new(row_ball_delta(d, r)?, format!("row ball r={r}")))
    }

    pub fn delta(&self) -> &PolyMatrix {
        &self.delta
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn d(&self) -> usize {
        self.delta.d()
    }

    pub fn vanishing_blocks(&self) -> &[VanishingBlock] {
        &self.vanishing
    }

    /// Caller guarantees that entry `(row, col)` vanishes on `M_n` for
    /// `n <= level`.
    pub(crate) fn with_vanishing(mut self, block: VanishingBlock) -> Self {
        self.vanishing.push(block);
        self
    }

    /// `||δ(X)||`, taking annotated vanishing blocks as exact zeros.
    pub fn delta_norm(&self, x: &MatrixTuple) -> Result<f64> {
        let n = x.n();
        let m = evaluate_poly_matrix_with(&self.delta, x, |i, j| {
            self.vanishing
                .iter()
                .any(|b| b.row == i && b.col == j && n <= b.level)
        })?;
        operator_norm(&m, DEFAULT_NORM_TOL)
    }

    pub fn membership(&self, x: &MatrixTuple) -> Result<Membership> {
        check_dim(self.d(), x.d())?;
        let margin = 1.0 - self.delta_norm(x)?;
        Ok(Membership {
            member: margin > 0.0,
            margin,
        })
    }

    /// `δ = δ_1 ⊕ δ_2`, whose basic set is the intersection.
    pub fn intersect(&self, other: &BasicSet) -> Result<BasicSet> {
        let delta = self.delta.direct_sum(&other.delta)?;
        let (dr, dc) = (self.delta.rows(), self.delta.cols());
        let vanishing = self
            .vanishing
            .iter()
            .copied()
            .chain(other.vanishing.iter().map(|b| VanishingBlock {
                row: b.row + dr,
                col: b.col + dc,
                level: b.level,
            }))
            .collect();
        Ok(BasicSet {
            delta,
            label: format!("({}) ∩ ({})", self.label, other.label),
            vanishing,
        })
    }
}

/// Bounds `||q_k(Y)||` and `||f(Y)||` for every `Y` in the proof basic set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalBoundCertificate {
    pub m: usize,
    pub r: f64,
    /// `r e^A`, where `A` bounds the growth of the generators' l1 norms.
    pub rho: f64,
    /// `2^m deg p_m`
    pub threshold: u64,
    /// `(2 rho)^threshold`, the weight on `p_m` in `δ`.
    pub c: f64,
    /// Bounds for `k = 1, .., 2 threshold - 1`.
    pub per_k: Vec<f64>,
    /// `sum_{k >= 2 threshold} (2 rho)^threshold 2^{-k}`
    pub tail: f64,
    pub total: f64,
}

impl LocalBoundCertificate {
    /// `(2 rho)^threshold 2^{-k}`, which dominates the per-term bound for
    /// `k >= threshold`.
    pub fn envelope(&self, k: u64) -> f64 {
        self.c * 0.5f64.powf(k as f64)
    }

    pub fn bound_for(&self, k: u64) -> f64 {
        match usize::try_from(k) {
            Ok(k) if k >= 1 && k <= self.per_k.len() => self.per_k[k - 1],
            _ => self.envelope(k),
        }
    }
}

/// Natural log of the inflation `ρ / r` for a family.
pub fn log_inflation(cx: &Counterexample) -> f64 {
    let fam = cx.family();
    let m = fam.max_level();
    let head: f64 = (1..=m)
        .map(|n| fam.l1_bound(n).ln().max(0.0) / cx.period(n) as f64)
        .sum();
    head + (fam.d() as f64).ln() * 0.5f64.powi(m as i32)
}

/// The basic set `r C^d ∩ B_{c p_m}` around `X ∈ M_m`, with `r` the
/// slackened row norm of `X` (at least 1), and its bound for `f`.
pub fn proof_basic_set(
    x: &MatrixTuple,
    cx: &Counterexample,
) -> Result<(BasicSet, LocalBoundCertificate)> {
    proof_basic_set_with(x, cx, DEFAULT_SLACK)
}

pub fn proof_basic_set_with(
    x: &MatrixTuple,
    cx: &Counterexample,
    slack: f64,
) -> Result<(BasicSet, LocalBoundCertificate)> {
    let fam = cx.family();
    check_dim(fam.d(), x.d())?;
    let m = x.n();
    if m > fam.max_level() {
        return Err(Error::Level {
            n: m,
            max: fam.max_level(),
        });
    }
    if !x.is_finite() {
        return Err(Error::Domain("tuple has non-finite entries".into()));
    }
    let r = (x.row_norm() * (1.0 + slack)).max(1.0);
    let rho = r * log_inflation(cx).exp();
    let t = cx.period(m);
    let c = (2.0 * rho).powf(t as f64);
    if !c.is_finite() {
        return Err(Error::Domain(format!(
            "scale constant (2 rho)^{t} overflows"
        )));
    }

    let weighted = PolyMatrix::new(1, 1, vec![fam.poly(m).scale_real(c)])?;
    let ball = BasicSet::row_ball(fam.d(), r)?;
    let level_set =
        BasicSet::new(weighted, format!("||c p_{m}|| < 1")).with_vanishing(VanishingBlock {
            row: 0,
            col: 0,
            level: m,
        });
    let set = ball.intersect(&level_set)?;

    let per_k: Vec<f64> = (1..2 * t)
        .map(|k| rho.powf(k as f64) * c.powf(-((k / t) as f64)))
        .collect();
    let tail = c * 2.0f64.powf(1.0 - 2.0 * t as f64);
    let total = per_k.iter().sum::<f64>() + tail;
    let cert = LocalBoundCertificate {
        m,
        r,
        rho,
        threshold: t,
        c,
        per_k,
        tail,
        total,
    };
    Ok((set, cert))
}

/// Up to `count` members of `B` of size `n`, by rejection from Gaussian
/// tuples rescaled to row norm `radius * u`, `u` uniform in `(0, 1]`.
///
/// Proposal `i` is drawn from its own stream, and members are kept in
/// proposal order, so the result does not depend on the thread count.
pub fn sample_in(
    set: &BasicSet,
    n: usize,
    count: usize,
    attempts: usize,
    radius: f64,
    seed: u64,
) -> Result<Vec<MatrixTuple>> {
    if attempts < count {
        return Err(Error::Precondition(format!(
            "attempts ({attempts}) < count ({count})"
        )));
    }
    if n == 0 || !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::Domain(format!(
            "need n >= 1 and radius > 0, got n={n}, radius={radius}"
        )));
    }
    let d = set.d();
    let batch = count.max(64);
    let mut out = Vec::with_capacity(count);
    let mut start = 0;
    while start < attempts && out.len() < count {
        let end = (start + batch).min(attempts);
        let proposals: Vec<Option<MatrixTuple>> = (start..end)
            .into_par_iter()
            .map(|i| {
                let mut rng = seeded_rng(seed, tags::SAMPLE_IN, i as u64);
                let u = 1.0 - rng.random::<f64>();
                let x = tuple_with_row_norm(&mut rng, n, d, radius * u);
                Ok(set.membership(&x)?.member.then_some(x))
            })
            .collect::<Result<_>>()?;
        for x in proposals.into_iter().flatten() {
            if out.len() == count {
                break;
            }
            out.push(x);
        }
        start = end;
    }
    if out.len() < count {
        return Err(Error::SamplingExhausted {
            accepted: out.len(),
            attempts,
            needed: count,
            rate: out.len() as f64 / attempts as f64,
        });
    }
    Ok(out)
}

/// One audited inequality. `k = None` is the check on `||f(X)||` against
/// the certificate total.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditRow {
    pub sample: usize,
    pub n: usize,
    pub k: Option<u64>,
    pub bound: f64,
    pub observed: f64,
    pub pass: bool,
}

/// Truncated-Fock lower bound on `sup ||p_n||` over the row ball.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FockCheck {
    pub n: usize,
    pub degree: usize,
    pub r: f64,
    pub l: usize,
    /// `||p_n(rS)||`, absent when the Fock dimension exceeds the cap.
    pub operator_bound: Option<f64>,
    /// `||p_n(rS) Ω||`, available at any `L`.
    pub vacuum_bound: f64,
    /// Whether the bound exceeds 1, i.e. `||p_n(rX)|| <= r^{deg p_n}` fails
    /// for some row contraction `X`.
    pub exceeds_one: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub certificate: LocalBoundCertificate,
    pub rows: Vec<AuditRow>,
    pub fock: Vec<FockCheck>,
    pub checks: usize,
    pub violations: usize,
    pub max_f_norm: f64,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    pub const CSV_HEADER: &'static str = "n,k,bound,observed,pass";

    /// One line per row; the `f` check prints `f` in the `k` column.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            let k = row.k.map_or_else(|| "f".to_string(), |k| k.to_string());
            out.push_str(&format!(
                "{},{},{:.16e},{:.16e},{}\n",
                row.n, k, row.bound, row.observed, row.pass
            ));
        }
        out
    }
}

/// Checks every sampled member against the certificate: `||q_k(X)||` for
/// each `k` below the evaluation cutoff of its size, and `||f(X)||`.
/// Also reports Fock lower bounds on `sup ||p_n||` over the row ball.
pub fn audit_local_bound(
    set: &BasicSet,
    cert: &LocalBoundCertificate,
    cx: &Counterexample,
    samples: &[MatrixTuple],
) -> Result<AuditReport> {
    check_dim(set.d(), cx.family().d())?;
    let per_sample: Vec<Vec<AuditRow>> = samples
        .par_iter()
        .enumerate()
        .map(|(s, x)| audit_sample(cert, cx, s, x))
        .collect::<Result<_>>()?;
    let rows: Vec<AuditRow> = per_sample.into_iter().flatten().collect();
    let violations = rows.iter().filter(|r| !r.pass).count();
    let max_f_norm = rows
        .iter()
        .filter(|r| r.k.is_none())
        .map(|r| r.observed)
        .fold(0.0, f64::max);
    let fock = (1..=cx.max_level())
        .map(|n| fock_check(cx.family().poly(n), n, AUDIT_FOCK_RADIUS))
        .collect::<Result<_>>()?;
    Ok(AuditReport {
        certificate: cert.clone(),
        checks: rows.len(),
        violations,
        max_f_norm,
        rows,
        fock,
    })
}

fn audit_sample(
    cert: &LocalBoundCertificate,
    cx: &Counterexample,
    s: usize,
    x: &MatrixTuple,
) -> Result<Vec<AuditRow>> {
    let n = x.n();
    let cutoff = cx.evaluation_cutoff(n)?;
    let mut ev = FactoredEvaluator::new(cx, x);
    let mut rows = Vec::with_capacity(cutoff as usize);
    for k in 1..cutoff {
        let observed = operator_norm(&ev.product(&cx.exponents(k))?, DEFAULT_NORM_TOL)?;
        let bound = cert.bound_for(k);
        rows.push(AuditRow {
            sample: s,
            n,
            k: Some(k),
            bound,
            observed,
            pass: observed <= bound + AUDIT_SLACK,
        });
    }
    let observed = operator_norm(&cx.evaluate_f(x)?, DEFAULT_NORM_TOL)?;
    rows.push(AuditRow {
        sample: s,
        n,
        k: None,
        bound: cert.total,
        observed,
        pass: observed <= cert.total,
    });
    Ok(rows)
}

/// Fock check at `L = max(8, deg p)`; the operator bound is skipped when
/// that space is too large.
pub fn fock_check(p: &Poly, n: usize, r: f64) -> Result<FockCheck> {
    let degree = p.degree().finite().unwrap_or(0);
    let l = degree.max(8);
    let vacuum_bound = vacuum_norm(p, r, l)?;
    let operator_bound = if fock_dim(p.d(), l).is_some_and(|dim| dim <= MAX_FOCK_DIM) {
        Some(cd_lower_bound(p, r, l)?)
    } else {
        None
    };
    let exceeds_one = operator_bound.unwrap_or(vacuum_bound) > 1.0;
    Ok(FockCheck {
        n,
        degree,
        r,
        l,
        operator_bound,
        vacuum_bound,
        exceeds_one,
    })
}
