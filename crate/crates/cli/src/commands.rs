use std::fs;
use std::path::Path;

use ncw_core::counterexample::{Counterexample, GeneratorFamily};
use ncw_core::fock::{
    cd_lower_bound, table_csv, truncated_creation, unboundedness_table, vacuum_norm,
};
use ncw_core::identities::{
    certify_identity, default_samples, find_identities, CertifyOptions, DEFAULT_CERTIFY_TOL,
};
use ncw_core::ncpoly::json::matrix_to_json;
use ncw_core::numerics::{operator_norm, random_row_contraction, DEFAULT_NORM_TOL};
use ncw_core::regions::{audit_local_bound, proof_basic_set, sample_in};
use ncw_core::{Error, MatrixTuple, Poly};
use serde_json::json;

use crate::args::*;
use crate::output::{emit, emit_json, parse_json, read_input, with_meta, Meta};
use crate::CliError;

/// Slack on the monotonicity check of the unboundedness table.
const MONOTONE_SLACK: f64 = 1e-10;

fn build_family(args: &FamilyArgs, seed: u64) -> Result<GeneratorFamily, CliError> {
    let opts = CertifyOptions {
        trials: args.trials,
        tol: DEFAULT_CERTIFY_TOL,
        seed,
    };
    Ok(GeneratorFamily::build(
        args.generator.into(),
        args.max_level,
        &opts,
    )?)
}

pub fn pi_find(args: &PiFindArgs) -> Result<(), CliError> {
    let samples = args
        .samples
        .unwrap_or_else(|| default_samples(args.n, args.d, args.deg));
    let found = find_identities(args.n, args.d, args.deg, samples, args.tol, args.seed)?;
    if found.is_empty() {
        return Err(CliError::Empty(format!(
            "no identities of degree {} for M_{} in {} variables",
            args.deg, args.n, args.d
        )));
    }
    let meta = Meta::new("pi find", &(args, samples), args.seed, &[]);
    match &args.out {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| CliError::Io(dir.clone(), e))?;
            for (i, id) in found.iter().enumerate() {
                let path = dir.join(format!(
                    "pi_n{}_d{}_deg{}_{}.json",
                    args.n, args.d, args.deg, i
                ));
                emit_json(Some(&path), &with_meta(id, &meta)?)?;
                println!("{}", path.display());
            }
        }
        None => emit_json(None, &with_meta(&json!({ "identities": found }), &meta)?)?,
    }
    Ok(())
}

pub fn pi_certify(args: &PiCertifyArgs) -> Result<(), CliError> {
    let bytes = read_input(&args.poly)?;
    let poly: Poly = parse_json(&args.poly, &bytes)?;
    let cert = certify_identity(&poly, args.n, args.trials, args.tol, args.seed)?;
    let meta = Meta::new("pi certify", args, args.seed, &[("poly", &bytes)]);
    let record = json!({
        "level": cert.level,
        "trials": cert.trials,
        "tol": cert.tol,
        "residual": cert.max_residual,
        "passed": cert.passed(),
    });
    emit_json(args.out.as_deref(), &with_meta(&record, &meta)?)?;
    if cert.passed() {
        Ok(())
    } else {
        Err(CliError::Check(format!(
            "residual {:.16e} is not below {:.16e} at level {}",
            cert.max_residual, cert.tol, cert.level
        )))
    }
}

pub fn family_build(args: &FamilyBuildArgs) -> Result<(), CliError> {
    let family = build_family(&args.family, args.seed)?;
    let meta = Meta::new("family build", args, args.seed, &[]);
    emit_json(args.out.as_deref(), &with_meta(&family, &meta)?)
}

pub fn eval(args: &EvalArgs) -> Result<(), CliError> {
    let tuple_bytes = read_input(&args.tuple)?;
    let x: MatrixTuple = parse_json(&args.tuple, &tuple_bytes)?;
    let (family, family_bytes) = match &args.family_file {
        Some(path) => {
            let bytes = read_input(path)?;
            (parse_json::<GeneratorFamily>(path, &bytes)?, Some(bytes))
        }
        None => {
            if x.n() > args.family.max_level {
                return Err(Error::Level {
                    n: x.n(),
                    max: args.family.max_level,
                }
                .into());
            }
            (build_family(&args.family, args.seed)?, None)
        }
    };
    let cx = Counterexample::new(family);
    let f = cx.evaluate_f(&x)?;
    let norm = operator_norm(&f, DEFAULT_NORM_TOL)?;
    let mut inputs: Vec<(&str, &[u8])> = vec![("tuple", &tuple_bytes)];
    if let Some(b) = &family_bytes {
        inputs.push(("family", b));
    }
    let meta = Meta::new("eval", args, args.seed, &inputs);
    let record = json!({
        "n": x.n(),
        "d": x.d(),
        "norm": norm,
        "f": matrix_to_json(&f),
    });
    emit_json(args.out.as_deref(), &with_meta(&record, &meta)?)
}

pub fn demo_unbounded(args: &UnboundedArgs) -> Result<(), CliError> {
    let cx = Counterexample::new(build_family(&args.family, args.seed)?);
    let rows = unboundedness_table(&cx, args.r, args.l, args.k_max)?;
    let meta = Meta::new("demo unbounded", args, args.seed, &[]);
    let mut csv = meta.csv_comment();
    csv.push_str(&table_csv(&rows));
    emit(args.csv.as_deref(), &csv)?;

    let monotone = rows.windows(2).all(|w| {
        let vac = w[1].vacuum_bound >= w[0].vacuum_bound - MONOTONE_SLACK;
        let op = match (w[0].operator_bound, w[1].operator_bound) {
            (Some(a), Some(b)) => b >= a - MONOTONE_SLACK,
            _ => true,
        };
        vac && op
    });
    if let Some(last) = rows.last() {
        let target = 2.0 * (last.k as f64).sqrt();
        eprintln!(
            "K={}: vacuum bound {:.16e} (2 sqrt(K) = {:.16e}, exceeded: {})",
            last.k,
            last.vacuum_bound,
            target,
            last.vacuum_bound > target
        );
    }
    if monotone {
        Ok(())
    } else {
        Err(CliError::Check("table is not nondecreasing in K".into()))
    }
}

pub fn demo_localbound(args: &LocalboundArgs) -> Result<(), CliError> {
    let cx = Counterexample::new(build_family(&args.family, args.seed)?);
    let d = cx.family().d();
    if args.size > cx.max_level() {
        return Err(Error::Level {
            n: args.size,
            max: cx.max_level(),
        }
        .into());
    }
    let x = random_row_contraction(args.size, d, args.margin, args.seed);
    let (set, cert) = proof_basic_set(&x, &cx)?;
    let attempts = args.attempts.unwrap_or(20 * args.samples);
    let n = args.sample_size.unwrap_or(args.size);
    let radius = args.radius.unwrap_or(cert.r);
    let samples = sample_in(&set, n, args.samples, attempts, radius, args.seed)?;
    let report = audit_local_bound(&set, &cert, &cx, &samples)?;

    let meta = Meta::new("demo localbound", args, args.seed, &[]);
    let mut csv = meta.csv_comment();
    csv.push_str(&report.to_csv());
    emit(args.csv.as_deref(), &csv)?;
    if let Some(path) = &args.json {
        let record = json!({
            "point": x,
            "basic_set": set.label(),
            "report": report,
        });
        emit_json(Some(path), &with_meta(&record, &meta)?)?;
    }

    eprintln!(
        "{} checks, {} violations; max ||f(X)|| = {:.16e}, certified total {:.16e}",
        report.checks, report.violations, report.max_f_norm, cert.total
    );
    for fc in &report.fock {
        let op = fc
            .operator_bound
            .map_or_else(|| "n/a".to_string(), |v| format!("{v:.16e}"));
        eprintln!(
            "p_{}: Fock bound at r={} L={}: operator {}, vacuum {:.16e}, exceeds 1: {}",
            fc.n, fc.r, fc.l, op, fc.vacuum_bound, fc.exceeds_one
        );
    }
    if report.passed() {
        Ok(())
    } else {
        Err(CliError::Check(format!(
            "{} certificate violations",
            report.violations
        )))
    }
}

pub fn fock_witness(args: &WitnessArgs) -> Result<(), CliError> {
    let s = truncated_creation(args.d, args.l)?.scaled(args.r);
    let mut record = json!({
        "d": args.d,
        "L": args.l,
        "r": args.r,
        "dim": s.n(),
        "row_norm": s.row_norm(),
        "tuple": s,
    });
    let mut inputs: Vec<(&str, Vec<u8>)> = Vec::new();
    if let Some(path) = &args.poly {
        let bytes = read_input(path)?;
        let p: Poly = parse_json(path, &bytes)?;
        if p.d() != args.d {
            return Err(Error::Dimension {
                expected: args.d,
                found: p.d(),
            }
            .into());
        }
        record["poly_bounds"] = json!({
            "vacuum_norm": vacuum_norm(&p, args.r, args.l)?,
            "cd_lower_bound": cd_lower_bound(&p, args.r, args.l)?,
            "h2_norm": p.h2_norm(),
            "l1_norm": p.l1_norm(),
        });
        inputs.push(("poly", bytes));
    }
    let borrowed: Vec<(&str, &[u8])> = inputs.iter().map(|(n, b)| (*n, b.as_slice())).collect();
    let meta = Meta::new("fock witness", args, args.seed, &borrowed);
    emit_json(
        args.out.as_deref().map(Path::new),
        &with_meta(&record, &meta)?,
    )
}
