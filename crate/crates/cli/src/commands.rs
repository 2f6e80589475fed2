use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use radial_kernels::analysis::{check_positive_definite, corollary5_witness, corollary6_witness, Verdict};
use radial_kernels::graphs::{
    self, conditionally_negative_check, gram_psd_check, is_median, median_kernel_check, sageev_distance_check,
    schoenberg_check, GraphBall,
};
use radial_kernels::moments::{reconstruct, solve, Atom, DiscreteMeasure, MomentOptions};
use radial_kernels::operators::{build_product_b, build_tree_b};
use radial_kernels::{extract_limits, Error, RadialKernelSpec};
use serde_json::{json, Value};

use crate::args::{KernelJob, Space, Witness};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_INPUT: i32 = 3;

/// Result of one command: the JSON document, its exit code and a summary line.
pub struct Outcome {
    pub document: Value,
    pub code: i32,
    pub summary: String,
}

pub type CommandResult = Result<Outcome, Error>;

/// Exit code for an error escaping a command.
pub fn error_code(e: &Error) -> i32 {
    match e {
        Error::NotPositive { .. } | Error::LimitsViolated { .. } | Error::NotMedian => EXIT_NEGATIVE,
        Error::JointDiagonalizationFailed { .. } | Error::SpectrumOutOfRange { .. } | Error::EigenSolverFailed => {
            EXIT_INCONCLUSIVE
        }
        _ => EXIT_INPUT,
    }
}

/// Reads a JSON argument that is either inline or a file path.
fn inline_or_file(arg: &str) -> Result<String, Error> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with('{') {
        Ok(arg.to_string())
    } else {
        Ok(std::fs::read_to_string(arg)?)
    }
}

fn load_kernel(arg: &str) -> Result<RadialKernelSpec, Error> {
    RadialKernelSpec::from_json(&inline_or_file(arg)?)
}

pub fn check(job: &KernelJob) -> CommandResult {
    let phi = load_kernel(&job.kernel)?;
    let report = check_positive_definite(&phi, &job.space.degrees, job.trunc, job.tol)?;
    let code = match report.verdict {
        Verdict::Member => EXIT_OK,
        Verdict::NonMember => EXIT_NEGATIVE,
        Verdict::Inconclusive => EXIT_INCONCLUSIVE,
    };
    let summary = format!(
        "{:?}: min eigenvalue {:.3e}, trace norm {:.6}, tail {:.3e}",
        report.verdict, report.min_eigenvalue, report.trace_norm, report.tail_heuristic
    );
    Ok(Outcome { document: serde_json::to_value(&report)?, code, summary })
}

/// Multi-indices with total `t ≤ n_max`: all mass on the first coordinate and
/// an even split.
fn report_indices(dims: usize, n_max: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for t in 0..=n_max {
        let mut first = vec![0; dims];
        first[0] = t;
        out.push(first);
        if dims > 1 {
            out.push((0..dims).map(|i| t / dims + usize::from(i < t % dims)).collect());
        }
    }
    out
}

pub fn moments(job: &KernelJob, n_report: usize, seed: u64) -> CommandResult {
    let phi = load_kernel(&job.kernel)?;
    let qs = &job.space.degrees;
    let options = MomentOptions { tol: job.tol, seed, ..MomentOptions::default() };
    let b = match qs.as_slice() {
        [q] => build_tree_b(&phi, *q, job.trunc)?,
        _ => build_product_b(&phi, qs, job.trunc)?,
    };
    let solution = solve(&b.entries, qs, job.trunc, extract_limits(&phi), &options)?;
    let n_max = phi.max_index().map_or(n_report, |m| m.min(n_report));
    let mut max_error: f64 = 0.0;
    for n in report_indices(qs.len(), n_max) {
        let expected = phi.value(n.iter().sum())?;
        max_error = max_error.max((reconstruct(&solution.measure, qs, &n)? - expected).abs());
    }
    let summary = format!(
        "{} interior atoms, c+ = {}, c- = {}, max reconstruction error {:.3e} for |n| <= {n_max}",
        solution.measure.atoms.len(),
        solution.measure.c_plus,
        solution.measure.c_minus,
        max_error
    );
    let document = json!({
        "measure": solution.measure,
        "rank": solution.rank,
        "boundary_mass": solution.boundary_mass,
        "symmetry_defect": solution.symmetry_defect,
        "joint_residual": solution.joint_residual,
        "n_report": n_max,
        "max_reconstruction_error": max_error,
    });
    Ok(Outcome { document, code: EXIT_OK, summary })
}

pub fn reconstruct_cmd(measure: &str, space: &Space, n: &[usize]) -> CommandResult {
    let measure = DiscreteMeasure::from_json(&inline_or_file(measure)?)?;
    let value = reconstruct(&measure, &space.degrees, n)?;
    Ok(Outcome { document: json!({ "n": n, "value": value }), code: EXIT_OK, summary: format!("phi({n:?}) = {value}") })
}

const WITNESS_TOL: f64 = 1e-14;

pub fn witness(w: &Witness) -> CommandResult {
    match *w {
        Witness::Cor5 { q, eps, trunc } => {
            let r = corollary5_witness(q, eps, trunc)?;
            let agree = (r.entry11 - r.closed_form).abs() <= WITNESS_TOL;
            let code = if agree && r.in_rq && r.entry11 < 0.0 { EXIT_OK } else { EXIT_NEGATIVE };
            let summary = format!("in R+(T_{q}): {}, entry (1,1) = {} vs closed form {}", r.in_rq, r.entry11, r.closed_form);
            Ok(Outcome { document: serde_json::to_value(r)?, code, summary })
        }
        Witness::Cor6 { q, trunc } => {
            let r = corollary6_witness(q, trunc)?;
            let closed_form = -2.0 / q as f64;
            let agree = (r.quad_form - closed_form).abs() <= WITNESS_TOL;
            let code = if agree && r.in_rq { EXIT_OK } else { EXIT_NEGATIVE };
            let summary = format!("in R+(T_{q}): {}, normalized form {} vs closed form {closed_form}", r.in_rq, r.quad_form);
            let mut document = serde_json::to_value(r)?;
            document["closed_form"] = json!(closed_form);
            Ok(Outcome { document, code, summary })
        }
    }
}

/// Parses a graph source; see the `median` help text.
pub fn load_graph(source: &str) -> Result<GraphBall, Error> {
    if let Some(parts) = source.strip_prefix("product:") {
        let factors = parts.split('*').map(load_graph).collect::<Result<Vec<_>, _>>()?;
        return graphs::product_ball(&factors);
    }
    let bad = || Error::InvalidParameter(format!("cannot parse graph source {source:?}"));
    let num = |s: &str| s.trim().parse::<usize>().map_err(|_| bad());
    let (kind, rest) = source.split_once(':').unwrap_or((source, ""));
    match kind {
        "tree" => {
            let (q, r) = rest.split_once(':').ok_or_else(bad)?;
            graphs::tree_ball(num(q)? as u64, num(r)?)
        }
        "grid" => {
            let (a, b) = rest.split_once('x').ok_or_else(bad)?;
            graphs::grid(num(a)?, num(b)?)
        }
        "cube" => graphs::hypercube(num(rest)?),
        "path" => graphs::path(num(rest)?),
        "cycle" => graphs::cycle(num(rest)?),
        "petersen" => graphs::petersen(),
        "kbip" => {
            let (a, b) = rest.split_once(',').ok_or_else(bad)?;
            graphs::complete_bipartite(num(a)?, num(b)?)
        }
        _ if Path::new(source).exists() => GraphBall::from_edge_list(&std::fs::read_to_string(source)?),
        _ => Err(Error::Io(std::io::Error::new(
            std::io::ErrorKind::NotFound,
            format!("graph source {source:?} is neither a generator nor a file"),
        ))),
    }
}

pub fn oracle(kernel: &str, space: Option<&Space>, radius: usize, graph: Option<&str>, tol: f64) -> CommandResult {
    let phi = load_kernel(kernel)?;
    let ball = match (graph, space) {
        (Some(source), _) => load_graph(source)?,
        (None, Some(space)) => {
            let factors = space
                .degrees
                .iter()
                .map(|q| {
                    let q = q.q().ok_or_else(|| Error::InvalidParameter("balls need finite degrees".into()))?;
                    graphs::tree_ball(q, radius)
                })
                .collect::<Result<Vec<_>, _>>()?;
            if factors.len() == 1 {
                factors.into_iter().next().expect("one factor")
            } else {
                graphs::product_ball(&factors)?
            }
        }
        (None, None) => return Err(Error::InvalidParameter("oracle needs --space or --graph".into())),
    };
    let check = gram_psd_check(&ball, &phi, tol)?;
    let code = if check.psd { EXIT_OK } else { EXIT_NEGATIVE };
    let summary = format!("{}: psd {} (min eigenvalue {:.3e}, {} vertices)", ball.descriptor, check.psd, check.min_eigenvalue, ball.n_vertices());
    let document = json!({ "psd": check.psd, "min_eigenvalue": check.min_eigenvalue, "n_vertices": ball.n_vertices() });
    Ok(Outcome { document, code, summary })
}

const ALL_CHECKS: [&str; 5] = ["median", "sageev", "condneg", "schoenberg", "kernel"];

/// A random positive measure on `[-1, 1]` with up to four atoms.
pub fn random_measure(rng: &mut impl Rng) -> DiscreteMeasure {
    let atoms = (0..rng.random_range(1..=4))
        .map(|_| Atom { location: vec![rng.random_range(-1.0..=1.0)], weight: rng.random_range(0.1..2.0) })
        .collect();
    DiscreteMeasure { dims: 1, atoms, c_plus: rng.random_range(0.0..1.0), c_minus: rng.random_range(0.0..1.0) }
}

pub fn median(source: &str, checks: &[String], s_grid: &[f64], measures: usize, tol: f64, seed: u64) -> CommandResult {
    let g = load_graph(source)?;
    let selected: Vec<&str> = if checks.iter().any(|c| c == "all") {
        ALL_CHECKS.to_vec()
    } else {
        checks.iter().map(String::as_str).collect()
    };
    let mut rows = Vec::new();
    for check in selected {
        let (pass, detail) = match check {
            "median" => {
                let ok = is_median(&g)?;
                (ok, json!(ok))
            }
            "sageev" => {
                let worst = sageev_distance_check(&g)?;
                (worst == 0, json!({ "max_discrepancy": worst }))
            }
            "condneg" => {
                let c = conditionally_negative_check(&g, tol)?;
                (c.holds, json!(c))
            }
            "schoenberg" => {
                let mut failing = Vec::new();
                for &s in s_grid {
                    if !schoenberg_check(&g, s, tol)? {
                        failing.push(s);
                    }
                }
                (failing.is_empty(), json!({ "s_grid": s_grid, "failing": failing }))
            }
            "kernel" => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut failures = 0;
                for _ in 0..measures {
                    if !median_kernel_check(&g, &random_measure(&mut rng), tol)? {
                        failures += 1;
                    }
                }
                (failures == 0, json!({ "measures": measures, "failures": failures }))
            }
            other => return Err(Error::InvalidParameter(format!("unknown check {other:?}"))),
        };
        rows.push(json!({ "check": check, "pass": pass, "detail": detail }));
    }
    let all_pass = rows.iter().all(|r| r["pass"] == json!(true));
    let table: Vec<String> = rows
        .iter()
        .map(|r| format!("{}: {}", r["check"].as_str().unwrap_or(""), if r["pass"] == json!(true) { "pass" } else { "FAIL" }))
        .collect();
    let summary = format!("{} ({} vertices)\n{}", g.descriptor, g.n_vertices(), table.join("\n"));
    let document = json!({ "graph": g.descriptor.to_string(), "n_vertices": g.n_vertices(), "checks": rows });
    Ok(Outcome { document, code: if all_pass { EXIT_OK } else { EXIT_NEGATIVE }, summary })
}
