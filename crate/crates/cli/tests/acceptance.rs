//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use ncw_core::counterexample::{
    Counterexample, FactoredEvaluator, GeneratorFamily, DEFAULT_MAX_LEVEL,
};
use ncw_core::fock::unboundedness_table;
use ncw_core::identities::{certify_identity, find_identities, hall_poly};
use ncw_core::ncpoly::direct_sum;
use ncw_core::numerics::random::{
    complex_gaussian, gaussian_matrix, random_tuple_with, seeded_rng, tags,
};
use ncw_core::numerics::{operator_norm, random_row_contraction, DEFAULT_NORM_TOL};
use ncw_core::regions::{audit_local_bound, proof_basic_set, sample_in, AuditReport, AUDIT_SLACK};
use ncw_core::{evaluate, CMatrix, Complex64, Poly, Word};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn default_cx() -> Counterexample {
    Counterexample::new(GeneratorFamily::standard(DEFAULT_MAX_LEVEL).expect("default family"))
}

fn identity_certification(cx: &Counterexample) -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;
    for n in 1..=4 {
        let p = cx.family().poly(n);
        let own = certify_identity(p, n, 50, 1e-9, 1).unwrap().max_residual;
        let ok = own < 1e-9;
        pass &= ok;
        notes.push(format!(
            "p_{n}@M_{n} {own:.2e}{}",
            if ok { "" } else { " (!)" }
        ));
        if n <= 3 {
            let next = certify_identity(p, n + 1, 50, 1e-9, 1)
                .unwrap()
                .max_residual;
            let ok = next > 1e-3;
            pass &= ok;
            notes.push(format!(
                "p_{n}@M_{} {next:.2e}{}",
                n + 1,
                if ok { "" } else { " (!)" }
            ));
        }
    }
    outcome(pass, notes.join(", "))
}

fn coefficient_vector(p: &Poly, words: &[Word]) -> DVector<Complex64> {
    DVector::from_iterator(
        words.len(),
        words
            .iter()
            .map(|w| p.coeff(w).copied().unwrap_or_default()),
    )
}

fn kernel_oracle() -> Outcome {
    let found = find_identities(1, 2, 2, 20, 1e-9, 0).unwrap();
    let words = Word::all_of_length(2, 2);
    let c = std::f64::consts::FRAC_1_SQRT_2;
    let commutator = DVector::from_vec(vec![
        Complex64::from(0.0),
        Complex64::from(c),
        Complex64::from(-c),
        Complex64::from(0.0),
    ]);
    let commutator_err = match found.as_slice() {
        [only] => {
            let v = coefficient_vector(only.poly(), &words);
            let overlap = commutator.dotc(&v);
            let phase = overlap / overlap.norm();
            (v - &commutator * phase).norm()
        }
        _ => f64::INFINITY,
    };

    let found5 = find_identities(2, 2, 5, 20, 1e-9, 0).unwrap();
    let words5 = Word::all_of_length(2, 5);
    let hall = coefficient_vector(&hall_poly::<Complex64>().normalize_h2().unwrap(), &words5);
    let basis = DMatrix::from_columns(
        &found5
            .iter()
            .map(|id| coefficient_vector(id.poly(), &words5))
            .collect::<Vec<_>>(),
    );
    let projection_err = if found5.is_empty() {
        f64::INFINITY
    } else {
        let coords = basis.clone().svd(true, true).solve(&hall, 1e-12).unwrap();
        (&basis * coords - &hall).norm()
    };
    outcome(
        found.len() == 1 && commutator_err < 1e-9 && projection_err < 1e-8,
        format!(
            "deg-2 kernel dim {} (phase distance {commutator_err:.2e}); deg-5 kernel dim {}, Hall projection residual {projection_err:.2e}",
            found.len(),
            found5.len()
        ),
    )
}

fn random_homogeneous(rng: &mut rand_chacha::ChaCha8Rng, degree: usize) -> Poly {
    let terms = Word::all_of_length(2, degree)
        .into_iter()
        .map(|w| (w, complex_gaussian(rng, 1.0)))
        .collect::<Vec<_>>();
    Poly::from_terms(2, terms).unwrap()
}

fn h2_multiplicativity() -> Outcome {
    let mut rng = seeded_rng(3, tags::TEST, 0);
    let mut worst: f64 = 0.0;
    for i in 0..200 {
        let p = random_homogeneous(&mut rng, i % 5);
        let q = random_homogeneous(&mut rng, (i / 5) % 5);
        let pq = p.try_mul(&q).unwrap();
        worst = worst.max((pq.h2_norm() - p.h2_norm() * q.h2_norm()).abs());
    }
    let one = Poly::one(2);
    let x = Poly::var(2, 0).unwrap();
    let a = one.try_add(&x).unwrap();
    let b = one.try_sub(&x).unwrap();
    let gap = a.h2_norm() * b.h2_norm() - a.try_mul(&b).unwrap().h2_norm();
    outcome(
        worst < 1e-12 && gap >= 0.5,
        format!("max deviation {worst:.2e} over 200 pairs; (1+x)(1-x) gap {gap:.4}"),
    )
}

fn qk_claims(cx: &Counterexample) -> Outcome {
    let degree_ok = (1..=500).all(|k| cx.qk_degree(k) <= k);
    let mut worst: f64 = 0.0;
    for k in 1..=60 {
        let analytic = cx.qk_h2_norm(k);
        let expanded = cx.build_qk(k).unwrap().h2_norm();
        worst = worst
            .max((analytic - 1.0).abs())
            .max((expanded - analytic).abs());
    }
    outcome(
        degree_ok && worst < 1e-12,
        format!(
            "deg q_k <= k for k <= 500: {degree_ok}; max |H2 - 1| and expansion gap {worst:.2e}"
        ),
    )
}

fn eventual_vanishing(cx: &Counterexample) -> Outcome {
    let mut worst: f64 = 0.0;
    for m in 1..=3 {
        let t = cx.truncation_threshold(m).unwrap();
        for seed in 0..20 {
            let x = random_row_contraction(m, 2, 0.05, seed);
            let mut ev = FactoredEvaluator::new(cx, &x);
            for k in t..=t + 10 {
                let q = ev.product(&cx.exponents(k)).unwrap();
                worst = worst.max(operator_norm(&q, DEFAULT_NORM_TOL).unwrap());
            }
        }
    }
    outcome(
        worst < 1e-10,
        format!("max ||q_k(X)|| {worst:.2e} over m = 1..3, 20 row contractions each"),
    )
}

fn unboundedness(cx: &Counterexample) -> Outcome {
    let growth_ok = (1..=500).all(|k| cx.h2_growth(k).powi(2) >= k as f64);
    let rows = unboundedness_table(cx, 0.99, 30, 40).unwrap();
    let monotone = rows
        .windows(2)
        .all(|w| w[1].vacuum_bound >= w[0].vacuum_bound);
    let last = rows.last().unwrap().vacuum_bound;
    let target = 2.0 * 40f64.sqrt();
    outcome(
        growth_ok && monotone && last > target,
        format!("h2_growth^2 >= K to 500: {growth_ok}; vacuum column monotone: {monotone}, K=40 value {last:.4} vs 2 sqrt(40) = {target:.4}"),
    )
}

fn local_audit(cx: &Counterexample, m: usize) -> AuditReport {
    let x = random_row_contraction(m, 2, 0.1, 7);
    let (set, cert) = proof_basic_set(&x, cx).unwrap();
    let samples = sample_in(&set, m, 100, 2000, cert.r, 7).unwrap();
    audit_local_bound(&set, &cert, cx, &samples).unwrap()
}

fn local_boundedness(reports: &[AuditReport]) -> Outcome {
    let pass = reports.iter().all(|r| r.passed() && r.rows.len() > 100);
    let notes: Vec<String> = reports
        .iter()
        .map(|r| {
            format!(
                "m={}: {} checks, {} violations, max ||f|| {:.3} <= total {:.3e} (per-k slack {AUDIT_SLACK:e})",
                r.certificate.m, r.checks, r.violations, r.max_f_norm, r.certificate.total
            )
        })
        .collect();
    outcome(pass, notes.join("; "))
}

fn normalization_tension(reports: &[AuditReport]) -> Outcome {
    let fock = &reports[0].fock[0];
    let bound = fock.operator_bound.unwrap_or(f64::NAN);
    let corrected_ok = reports.iter().all(AuditReport::passed);
    outcome(
        fock.exceeds_one && bound > 1.0 && corrected_ok,
        format!(
            "Fock bound on ||p_1|| over the row ball at r={}, L={}: {bound:.12} (needs > 1); rho-certificate audits pass: {corrected_ok}",
            fock.r, fock.l
        ),
    )
}

fn free_function_axioms(cx: &Counterexample) -> Outcome {
    let f20 = cx.partial_sum(20, None).unwrap();
    let polys = [
        ("p_1", cx.family().poly(1).clone()),
        ("p_2", cx.family().poly(2).clone()),
        ("f_20", f20),
    ];
    let mut notes = Vec::new();
    let mut pass = true;
    for (name, p) in &polys {
        let mut worst: f64 = 0.0;
        for i in 0..100u64 {
            let mut rng = seeded_rng(i, tags::TEST, 9);
            let (a, b) = (1 + (i % 3) as usize, 1 + ((i / 3) % 3) as usize);
            let x = random_tuple_with(&mut rng, a, 2, 1.0);
            let y = random_tuple_with(&mut rng, b, 2, 1.0);
            let lhs = evaluate(p, &x.direct_sum(&y).unwrap()).unwrap();
            let rhs = direct_sum(&evaluate(p, &x).unwrap(), &evaluate(p, &y).unwrap());
            worst = worst.max((lhs - rhs).norm());

            let s = CMatrix::identity(a, a) + gaussian_matrix(&mut rng, a, a, 0.3);
            let s_inv = s.clone().try_inverse().unwrap();
            let lhs = evaluate(p, &x.conjugate(&s, &s_inv).unwrap()).unwrap();
            let rhs = &s * evaluate(p, &x).unwrap() * &s_inv;
            worst = worst.max((lhs - rhs).norm());
        }
        pass &= worst < 1e-8;
        notes.push(format!("{name} {worst:.2e}"));
    }
    outcome(pass, format!("max deviation: {}", notes.join(", ")))
}

fn run_ncw(args: &[&str], dir: &Path) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_ncw"))
        .args(args)
        .current_dir(dir)
        .env_remove("NCW_SEED")
        .output()
        .expect("ncw runs")
}

fn determinism() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    std::fs::write(
        dir.join("hall.json"),
        serde_json::to_string(&hall_poly::<Complex64>().normalize_h2().unwrap()).unwrap(),
    )
    .unwrap();
    let tuple = random_tuple_with(&mut seeded_rng(5, tags::TEST, 0), 2, 2, 1.0);
    std::fs::write(dir.join("x.json"), serde_json::to_string(&tuple).unwrap()).unwrap();

    let runs: [(&str, Vec<&str>, Vec<&str>); 7] = [
        (
            "pi find",
            vec![
                "pi", "find", "--n", "2", "--deg", "5", "--seed", "3", "--out", "OUT",
            ],
            vec!["OUT/pi_n2_d2_deg5_0.json"],
        ),
        (
            "pi certify",
            vec![
                "pi",
                "certify",
                "--poly",
                "hall.json",
                "--n",
                "2",
                "--trials",
                "50",
                "--out",
                "OUT.json",
            ],
            vec!["OUT.json"],
        ),
        (
            "family build",
            vec![
                "family",
                "build",
                "--generator",
                "hall-override",
                "--max-level",
                "3",
                "--out",
                "OUT.json",
            ],
            vec!["OUT.json"],
        ),
        (
            "eval",
            vec![
                "eval",
                "--tuple",
                "x.json",
                "--max-level",
                "2",
                "--out",
                "OUT.json",
            ],
            vec!["OUT.json"],
        ),
        (
            "demo unbounded",
            vec![
                "demo",
                "unbounded",
                "--r",
                "0.9",
                "--L",
                "8",
                "--Kmax",
                "16",
                "--max-level",
                "2",
                "--csv",
                "OUT.csv",
            ],
            vec!["OUT.csv"],
        ),
        (
            "demo localbound",
            vec![
                "demo",
                "localbound",
                "--size",
                "2",
                "--samples",
                "30",
                "--seed",
                "7",
                "--max-level",
                "2",
                "--csv",
                "OUT.csv",
                "--json",
                "OUT.json",
            ],
            vec!["OUT.csv", "OUT.json"],
        ),
        (
            "fock witness",
            vec![
                "fock",
                "witness",
                "--L",
                "3",
                "--poly",
                "hall.json",
                "--out",
                "OUT.json",
            ],
            vec!["OUT.json"],
        ),
    ];
    let mut failures = Vec::new();
    for (name, args, outputs) in &runs {
        let mut contents: Vec<Vec<Vec<u8>>> = Vec::new();
        for (run, threads) in ["1", "4", "4"].iter().enumerate() {
            let tag = format!("run{run}");
            let args: Vec<String> = args.iter().map(|a| a.replace("OUT", &tag)).collect();
            let mut full = vec!["--threads", threads];
            full.extend(args.iter().map(String::as_str));
            let out = run_ncw(&full, dir);
            if !out.status.success() {
                failures.push(format!("{name}: exit {:?}", out.status.code()));
                break;
            }
            contents.push(
                outputs
                    .iter()
                    .map(|o| std::fs::read(dir.join(o.replace("OUT", &tag))).unwrap_or_default())
                    .collect(),
            );
        }
        if contents.len() == 3 && !(contents[0] == contents[1] && contents[1] == contents[2]) {
            failures.push(format!("{name}: outputs differ"));
        }
    }
    outcome(
        failures.is_empty(),
        if failures.is_empty() {
            format!(
                "{} commands byte-identical across reruns and --threads 1/4",
                runs.len()
            )
        } else {
            failures.join("; ")
        },
    )
}

fn main() {
    let started = Instant::now();
    let cx = default_cx();
    let mut results: Vec<(usize, &str, Outcome, f64)> = Vec::new();
    let mut record = |id, name, f: &mut dyn FnMut() -> Outcome| {
        let t = Instant::now();
        let o = f();
        let secs = t.elapsed().as_secs_f64();
        println!(
            "criterion {id:>2} {} [{name}] {} ({secs:.1}s)",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        results.push((id, name, o, secs));
    };
    record(1, "identity certification", &mut || {
        identity_certification(&cx)
    });
    record(2, "kernel oracle", &mut kernel_oracle);
    record(3, "H2 multiplicativity", &mut h2_multiplicativity);
    record(4, "q_k degree and norm", &mut || qk_claims(&cx));
    record(5, "eventual vanishing", &mut || eventual_vanishing(&cx));
    record(6, "unboundedness witness", &mut || unboundedness(&cx));
    let reports = [local_audit(&cx, 1), local_audit(&cx, 2)];
    record(7, "local boundedness", &mut || local_boundedness(&reports));
    record(8, "normalization tension", &mut || {
        normalization_tension(&reports)
    });
    record(9, "free-function axioms", &mut || free_function_axioms(&cx));
    record(10, "determinism", &mut determinism);

    let passed = results.iter().filter(|r| r.2.pass).count();
    println!(
        "acceptance: {passed}/{} criteria passed in {:.1}s",
        results.len(),
        started.elapsed().as_secs_f64()
    );
    if passed != results.len() {
        std::process::exit(1);
    }
}
