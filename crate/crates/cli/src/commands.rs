use std::io::Write;

use a2a_core::bounds::{bound_report, c1_lower_universal, c2_lower_universal};
use a2a_core::dft::{dft_params, run_dft};
use a2a_core::gf::{is_prime, Fe};
use a2a_core::linalg::{mat_vec_mul, random_matrix, random_vector};
use a2a_core::netsim::{dump_trace, trace_to_jsonl};
use a2a_core::vandermonde::{lagrange_target, run_lagrange, run_vandermonde, target_matrix, vdm_params};
use a2a_core::{
    run_orchestrated, run_universal, Algorithm, CostReport, MatrixFq, PrimeField, SystemConfig,
    TransformDirection,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::{sources, BoundsArgs, Failure, Format, OrchestrateArgs, OutputArgs, RunArgs, SweepArgs};

const ROUND_LIMIT_VAR: &str = "A2A_ROUND_LIMIT";

#[derive(Debug, Serialize)]
struct RunRecord {
    algo: String,
    k: usize,
    p: usize,
    q: u32,
    c1: usize,
    c2: usize,
    d: Vec<usize>,
    c1_lower: usize,
    c2_lower: usize,
    verified: bool,
    total_cost: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    output: Vec<u32>,
    /// Row relabelling of the computed matrix relative to its textbook form.
    #[serde(skip_serializing_if = "Option::is_none")]
    row_permutation: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    replay_match: Option<bool>,
}

impl RunRecord {
    fn new(algo: &str, k: usize, p: usize, field: &PrimeField, report: &CostReport, out: &OutputArgs) -> Self {
        RunRecord {
            algo: algo.to_string(),
            k,
            p,
            q: field.modulus(),
            c1: report.c1,
            c2: report.c2,
            d: report.d.clone(),
            c1_lower: c1_lower_universal(k, p),
            c2_lower: c2_lower_universal(k, p).1,
            verified: false,
            total_cost: report.total_cost(out.beta, out.tau),
            n: None,
            output: Vec::new(),
            row_permutation: None,
            trace: None,
            replay_match: None,
        }
    }
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(";")
}

fn emit(rec: &RunRecord, format: Format) -> Result<(), Failure> {
    match format {
        Format::Json => {
            let line = serde_json::to_string(rec).map_err(|e| Failure::Usage(e.to_string()))?;
            println!("{line}");
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(std::io::stdout());
            let io = |e: csv::Error| Failure::Usage(e.to_string());
            w.write_record([
                "algo", "k", "p", "q", "c1", "c2", "d", "c1_lower", "c2_lower", "verified", "total_cost", "output",
            ])
            .map_err(io)?;
            w.write_record([
                rec.algo.clone(),
                rec.k.to_string(),
                rec.p.to_string(),
                rec.q.to_string(),
                rec.c1.to_string(),
                rec.c2.to_string(),
                join(&rec.d),
                rec.c1_lower.to_string(),
                rec.c2_lower.to_string(),
                rec.verified.to_string(),
                rec.total_cost.to_string(),
                join(&rec.output),
            ])
            .map_err(io)?;
            w.flush().map_err(|e| Failure::Usage(e.to_string()))?;
        }
    }
    Ok(())
}

fn round_limit_override() -> Result<Option<usize>, Failure> {
    match std::env::var(ROUND_LIMIT_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Failure::Usage(format!("{ROUND_LIMIT_VAR} must be a natural number, got {v:?}"))),
        Err(_) => Ok(None),
    }
}

fn config(k: usize, p: usize, field: &PrimeField, out: &OutputArgs, traced: bool) -> Result<SystemConfig, Failure> {
    let mut c = SystemConfig::new(k, p, field)
        .map_err(Failure::core)?
        .with_costs(out.beta, out.tau)
        .with_trace(traced);
    if let Some(limit) = round_limit_override()? {
        c = c.with_round_limit(limit);
    }
    Ok(c)
}

fn check_flags(args: &RunArgs) -> Result<(), Failure> {
    let usage = |m: &str| Err(Failure::Usage(m.to_string()));
    if args.matrix.is_some() && args.algo != Algorithm::Universal {
        return usage("--matrix only applies to --algo universal");
    }
    if args.inverse && !matches!(args.algo, Algorithm::Dft | Algorithm::Vandermonde) {
        return usage("--inverse only applies to dft and vandermonde");
    }
    if args.phi.is_some() && args.algo != Algorithm::Vandermonde {
        return usage("--phi only applies to vandermonde");
    }
    if (args.phi_omega.is_some() || args.phi_alpha.is_some()) && args.algo != Algorithm::Lagrange {
        return usage("--phi-omega and --phi-alpha only apply to lagrange");
    }
    Ok(())
}

/// Runs the protocol and its oracle.
fn execute(args: &RunArgs, traced: bool) -> Result<(RunRecord, CostReport), Failure> {
    check_flags(args)?;
    let field = PrimeField::new(args.q).map_err(Failure::core)?;
    let cfg = config(args.k, args.p, &field, &args.out, traced)?;
    let (matrix_seed, input_seed) = sources::seeds(&args.seeds)?;
    let x = sources::input(&args.input, &field, args.k, input_seed)?;
    let direction = if args.inverse {
        TransformDirection::Inverse
    } else {
        TransformDirection::Forward
    };
    let invert_if = |a: MatrixFq| if args.inverse { a.invert() } else { Ok(a) };

    let (y, report, oracle, perm): (Vec<Fe>, CostReport, MatrixFq, Option<Vec<usize>>) = match args.algo {
        Algorithm::Universal => {
            let spec = args.matrix.as_deref().unwrap_or("random");
            let a = sources::matrix(spec, &field, args.k, args.k, matrix_seed)?;
            let (y, r) = run_universal(&cfg, &a, &x).map_err(Failure::core)?;
            (y, r, a, None)
        }
        Algorithm::Dft => {
            let params = dft_params(&cfg).map_err(Failure::core)?;
            let a = invert_if(params.computed_matrix()).map_err(Failure::core)?;
            let (y, r) = run_dft(&cfg, &x, direction).map_err(Failure::core)?;
            (y, r, a, Some(params.digit_reversal()))
        }
        Algorithm::Vandermonde => {
            let params = vdm_params(&cfg, args.phi.as_deref()).map_err(Failure::core)?;
            let a = invert_if(target_matrix(&params)).map_err(Failure::core)?;
            let (y, r) = run_vandermonde(&cfg, &params, &x, direction).map_err(Failure::core)?;
            (y, r, a, Some(params.e))
        }
        Algorithm::Lagrange => {
            let m = vdm_params(&cfg, None).map_err(Failure::core)?.m;
            let identity: Vec<usize> = (0..m).collect();
            let omega = args.phi_omega.clone().unwrap_or_else(|| identity.clone());
            let alpha = args.phi_alpha.clone().unwrap_or(identity);
            let a = lagrange_target(&cfg, &omega, &alpha).map_err(Failure::core)?;
            let (y, r) = run_lagrange(&cfg, &omega, &alpha, &x).map_err(Failure::core)?;
            (y, r, a, None)
        }
    };
    let expected = mat_vec_mul(&x, &oracle).map_err(Failure::core)?;
    let mut rec = RunRecord::new(args.algo.name(), args.k, args.p, &field, &report, &args.out);
    rec.verified = expected == y;
    rec.output = y.iter().map(|v| v.value()).collect();
    rec.row_permutation = perm;
    Ok((rec, report))
}

fn write_trace(report: &CostReport, path: &std::path::Path) -> Result<(), Failure> {
    let text = trace_to_jsonl(dump_trace(report).map_err(Failure::core)?);
    std::fs::File::create(path)
        .and_then(|mut f| f.write_all(text.as_bytes()))
        .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
}

fn finish(rec: &RunRecord, format: Format) -> Result<(), Failure> {
    emit(rec, format)?;
    if !rec.verified {
        return Err(Failure::Mismatch("protocol output differs from x · A".into()));
    }
    if rec.replay_match == Some(false) {
        return Err(Failure::Mismatch("trace differs from the recorded one".into()));
    }
    Ok(())
}

pub fn run(args: &RunArgs) -> Result<(), Failure> {
    let (mut rec, report) = execute(args, args.out.trace.is_some())?;
    if let Some(path) = &args.out.trace {
        write_trace(&report, path)?;
        rec.trace = Some(path.display().to_string());
    }
    finish(&rec, args.out.format)
}

pub fn verify(args: &RunArgs) -> Result<(), Failure> {
    let path = args
        .out
        .trace
        .as_ref()
        .ok_or_else(|| Failure::Usage("verify needs --trace FILE from an earlier run".into()))?;
    let recorded = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    let (mut rec, report) = execute(args, true)?;
    let replayed = trace_to_jsonl(dump_trace(&report).map_err(Failure::core)?);
    rec.trace = Some(path.display().to_string());
    rec.replay_match = Some(replayed == recorded);
    finish(&rec, args.out.format)
}

pub fn bounds(args: &BoundsArgs) -> Result<(), Failure> {
    if args.k == 0 || args.p == 0 {
        return Err(Failure::Usage("--k and --p must be at least 1".into()));
    }
    let field = args.q.map(PrimeField::new).transpose().map_err(Failure::core)?;
    let report = bound_report(args.k, args.p, field.as_ref());
    println!("{}", serde_json::to_string(&report).map_err(|e| Failure::Usage(e.to_string()))?);
    Ok(())
}

pub fn orchestrate(args: &OrchestrateArgs) -> Result<(), Failure> {
    if args.k == 0 {
        return Err(Failure::Usage("--k must be at least 1".into()));
    }
    let field = PrimeField::new(args.q).map_err(Failure::core)?;
    let cfg = config(args.n, args.p, &field, &args.out, args.out.trace.is_some())?;
    let (matrix_seed, input_seed) = sources::seeds(&args.seeds)?;
    let g = sources::matrix(&args.matrix, &field, args.k, args.n, matrix_seed)?;
    let x = sources::input(&args.input, &field, args.k, input_seed)?;
    let (y, report) = run_orchestrated(&cfg, &g, &x).map_err(Failure::core)?;
    let mut rec = RunRecord::new("orchestrate", args.k, args.p, &field, &report, &args.out);
    rec.n = Some(args.n);
    rec.verified = mat_vec_mul(&x, &g).map_err(Failure::core)? == y;
    rec.output = y.iter().map(|v| v.value()).collect();
    if let Some(path) = &args.out.trace {
        write_trace(&report, path)?;
        rec.trace = Some(path.display().to_string());
    }
    finish(&rec, args.out.format)
}

fn parse_k_spec(spec: &str) -> Result<Vec<usize>, Failure> {
    let bad = || Failure::Usage(format!("--k expects A-B or A,B,..., got {spec:?}"));
    if let Some((a, b)) = spec.split_once('-') {
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b.trim().parse().map_err(|_| bad())?;
        if a > b {
            return Err(bad());
        }
        return Ok((a..=b).collect());
    }
    spec.split(',').map(|t| t.trim().parse().map_err(|_| bad())).collect()
}

#[derive(Debug, Clone, Copy)]
enum QPolicy {
    Fixed(u64),
    Auto,
}

fn smallest_prime(from: u64, ok: impl Fn(u64) -> bool) -> u64 {
    (from.max(3)..).find(|&q| is_prime(q) && ok(q)).expect("primes are unbounded")
}

fn auto_q(algo: Algorithm, k: usize) -> u64 {
    match algo {
        Algorithm::Universal => smallest_prime(k as u64 + 1, |_| true),
        _ => smallest_prime(k as u64 + 1, |q| (q - 1) % k as u64 == 0),
    }
}

#[derive(Debug, Serialize)]
struct SweepRow {
    k: usize,
    p: usize,
    q: Option<u64>,
    c1: Option<usize>,
    c2: Option<usize>,
    c1_lower: usize,
    c2_lower: usize,
    ratio: Option<String>,
    verified: Option<bool>,
    status: &'static str,
    note: String,
}

fn sweep_one(algo: Algorithm, k: usize, p: usize, policy: QPolicy, seed: u64) -> SweepRow {
    let (c2_real, c2_lower) = c2_lower_universal(k, p);
    let mut row = SweepRow {
        k,
        p,
        q: None,
        c1: None,
        c2: None,
        c1_lower: c1_lower_universal(k, p),
        c2_lower,
        ratio: None,
        verified: None,
        status: "skipped",
        note: String::new(),
    };
    if k < 2 || p == 0 || p >= k {
        row.note = "needs K >= 2 and 1 <= p < K".into();
        return row;
    }
    let q = match policy {
        QPolicy::Fixed(q) => q,
        QPolicy::Auto => auto_q(algo, k),
    };
    row.q = Some(q);
    match sweep_run(algo, k, p, q, seed) {
        Ok((verified, report)) => {
            row.c1 = Some(report.c1);
            row.c2 = Some(report.c2);
            row.ratio = Some(format!("{:.6}", report.c2 as f64 / c2_real));
            row.verified = Some(verified);
            row.status = "ok";
        }
        Err(f) => row.note = f.message().to_string(),
    }
    row
}

fn sweep_run(algo: Algorithm, k: usize, p: usize, q: u64, seed: u64) -> Result<(bool, CostReport), Failure> {
    let field = PrimeField::new(q).map_err(Failure::core)?;
    let mut cfg = SystemConfig::new(k, p, &field).map_err(Failure::core)?;
    if let Some(limit) = round_limit_override()? {
        cfg = cfg.with_round_limit(limit);
    }
    let x = random_vector(&field, k, seed.wrapping_add(1));
    let (y, report, oracle) = match algo {
        Algorithm::Universal => {
            let a = random_matrix(&field, k, k, seed);
            let (y, r) = run_universal(&cfg, &a, &x).map_err(Failure::core)?;
            (y, r, a)
        }
        Algorithm::Dft => {
            let params = dft_params(&cfg).map_err(Failure::core)?;
            let (y, r) = run_dft(&cfg, &x, TransformDirection::Forward).map_err(Failure::core)?;
            (y, r, params.computed_matrix())
        }
        Algorithm::Vandermonde => {
            let params = vdm_params(&cfg, None).map_err(Failure::core)?;
            let (y, r) = run_vandermonde(&cfg, &params, &x, TransformDirection::Forward).map_err(Failure::core)?;
            (y, r, target_matrix(&params))
        }
        Algorithm::Lagrange => {
            let params = vdm_params(&cfg, None).map_err(Failure::core)?;
            let range = field.order() / params.z;
            let shift = if range >= 2 * params.m { params.m } else { 1 };
            let alpha: Vec<usize> = (0..params.m).map(|i| (i + shift) % range).collect();
            let (y, r) = run_lagrange(&cfg, &params.phi, &alpha, &x).map_err(Failure::core)?;
            (y, r, lagrange_target(&cfg, &params.phi, &alpha).map_err(Failure::core)?)
        }
    };
    Ok((mat_vec_mul(&x, &oracle).map_err(Failure::core)? == y, report))
}

pub fn sweep(args: &SweepArgs) -> Result<(), Failure> {
    let ks = parse_k_spec(&args.k)?;
    let policy = if args.q == "auto" {
        QPolicy::Auto
    } else {
        QPolicy::Fixed(
            args.q
                .parse()
                .map_err(|_| Failure::Usage(format!("--q expects a prime or auto, got {:?}", args.q)))?,
        )
    };
    round_limit_override()?;
    let grid: Vec<(usize, usize)> = ks.iter().flat_map(|&k| args.p.iter().map(move |&p| (k, p))).collect();
    let rows: Vec<SweepRow> = grid
        .par_iter()
        .map(|&(k, p)| sweep_one(args.algo, k, p, policy, args.seed))
        .collect();

    let mut w = csv::Writer::from_writer(std::io::stdout());
    let io = |e: csv::Error| Failure::Usage(e.to_string());
    for row in &rows {
        w.serialize(row).map_err(io)?;
    }
    w.flush().map_err(|e| Failure::Usage(e.to_string()))?;
    if rows.iter().any(|r| r.verified == Some(false)) {
        return Err(Failure::Mismatch("some sweep rows failed verification".into()));
    }
    Ok(())
}
