use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use anyhow::{anyhow, Context};
use locc_core::linalg::{svd, Matrix};
use locc_core::majorization::BirkhoffDecomposition;
use locc_core::protocol::{feasibility, full_pipeline, lo_popescu, Protocol};
use locc_core::states::BipartiteState;
use locc_core::verifier::{simulate_parallel, verify, Stage, VerificationReport};
use serde::Serialize;

use crate::format::{
    matrix_from_json, matrix_to_json, read_json, state_digest, write_json, LoPopescuFile,
    MatrixJson, ProtocolFile, StateFile, NORM_WARNING,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Human,
    Structured,
}

#[derive(Debug, Clone, Copy)]
pub struct Settings {
    pub tol: f64,
    pub format: Format,
}

/// Failure of a command, carrying its exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad arguments, unreadable files or numerical failures (exit 1).
    Usage(anyhow::Error),
    /// The requested conversion is impossible (exit 2).
    Infeasible(String),
    /// A protocol did not pass verification (exit 3).
    VerificationFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Infeasible(_) => 2,
            CliError::VerificationFailed(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(e) => write!(f, "{e:#}"),
            CliError::Infeasible(msg) => write!(f, "infeasible: {msg}"),
            CliError::VerificationFailed(msg) => write!(f, "verification failed: {msg}"),
        }
    }
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Usage(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(e.into())
    }
}

impl From<locc_core::Error> for CliError {
    fn from(e: locc_core::Error) -> Self {
        match e {
            locc_core::Error::InfeasibleTarget { .. } | locc_core::Error::RankViolation { .. } => {
                CliError::Infeasible(e.to_string())
            }
            other => CliError::Usage(other.into()),
        }
    }
}

pub type CmdResult = Result<(), CliError>;

/// Rounds to 12 significant digits so that `0.4000000000000001` prints as `0.4`.
pub fn num(x: f64) -> String {
    let rounded: f64 = format!("{x:.11e}").parse().unwrap_or(x);
    format!("{rounded}")
}

fn nums(xs: &[f64]) -> String {
    let parts: Vec<String> = xs.iter().map(|&x| num(x)).collect();
    format!("[{}]", parts.join(", "))
}

fn emit<T: Serialize>(out: &mut dyn Write, value: &T) -> CmdResult {
    serde_json::to_writer_pretty(&mut *out, value).map_err(|e| anyhow!(e))?;
    writeln!(out)?;
    Ok(())
}

fn load_state(path: &Path, err: &mut dyn Write) -> anyhow::Result<BipartiteState<f64>> {
    let file: StateFile = read_json(path)?;
    let (state, norm) = file
        .to_state()
        .with_context(|| format!("state {}", path.display()))?;
    if (norm - 1.0).abs() > NORM_WARNING {
        writeln!(
            err,
            "warning: {} has norm {norm}, normalized on load",
            path.display()
        )?;
    }
    Ok(state)
}

fn load_protocol(path: &Path) -> anyhow::Result<ProtocolFile> {
    read_json(path)
}

#[derive(Serialize)]
struct CheckReport {
    spectrum_a: Vec<f64>,
    spectrum_b: Vec<f64>,
    rank_a: usize,
    rank_b: usize,
    rank_ok: bool,
    deterministic: bool,
    p_max: f64,
}

pub fn check(
    a: &Path,
    b: &Path,
    s: Settings,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CmdResult {
    let a = load_state(a, err)?;
    let b = load_state(b, err)?;
    let f = feasibility(&a, &b, s.tol)?;
    let report = CheckReport {
        spectrum_a: f.spectrum_a.values().to_vec(),
        spectrum_b: f.spectrum_b.values().to_vec(),
        rank_a: f.rank_a,
        rank_b: f.rank_b,
        rank_ok: f.rank_ok,
        deterministic: f.deterministic,
        p_max: if f.rank_ok { f.p_max } else { 0.0 },
    };
    match s.format {
        Format::Structured => emit(out, &report)?,
        Format::Human => {
            writeln!(out, "spectrum A: {}", nums(&report.spectrum_a))?;
            writeln!(out, "spectrum B: {}", nums(&report.spectrum_b))?;
            if report.rank_ok {
                writeln!(out, "rank: {} >= {} (ok)", report.rank_a, report.rank_b)?;
            } else {
                writeln!(
                    out,
                    "rank(A) < rank(B): {} < {}",
                    report.rank_a, report.rank_b
                )?;
            }
            let det = if report.deterministic { "yes" } else { "no" };
            writeln!(out, "deterministic: {det}, pMax = {}", num(report.p_max))?;
        }
    }
    if !report.rank_ok {
        return Err(CliError::Infeasible(format!(
            "rank(A) < rank(B): {} < {}",
            report.rank_a, report.rank_b
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct SynthReport {
    branches: usize,
    caratheodory_bound: usize,
    declared_probability: f64,
    p_max: f64,
    has_tail: bool,
    dims: [usize; 2],
    max_verification_error: f64,
    output: String,
}

pub fn synth(
    a_path: &Path,
    b_path: &Path,
    prob: Option<f64>,
    out_path: &Path,
    s: Settings,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CmdResult {
    let a = load_state(a_path, err)?;
    let b = load_state(b_path, err)?;
    if let Some(p) = prob {
        if !(p > 0.0 && p <= 1.0) {
            return Err(CliError::Usage(anyhow!(
                "--prob must lie in (0, 1], got {p}"
            )));
        }
    }
    let f = feasibility(&a, &b, s.tol)?;
    if !f.rank_ok {
        return Err(CliError::Infeasible(format!(
            "rank(A) < rank(B): {} < {}",
            f.rank_a, f.rank_b
        )));
    }
    if let Some(p) = prob {
        if p > f.p_max + s.tol {
            return Err(CliError::Infeasible(format!(
                "requested p = {} exceeds pMax = {}",
                num(p),
                num(f.p_max)
            )));
        }
    }
    let protocol = full_pipeline(&a, &b, prob, s.tol)?;
    let r = verify(&protocol, &a, &b, s.tol)?;
    if !r.pass {
        return Err(CliError::VerificationFailed(format!(
            "synthesized protocol has error {:.3e} above tolerance {:e}",
            r.max_error(),
            s.tol
        )));
    }
    write_json(out_path, &ProtocolFile::from_protocol(&protocol, &a, &b))?;

    let (n, m) = protocol.dims();
    let report = SynthReport {
        branches: protocol.stage1.len(),
        caratheodory_bound: BirkhoffDecomposition::<f64>::term_bound(n),
        declared_probability: protocol.declared_probability,
        p_max: f.p_max,
        has_tail: protocol.stage2.is_some(),
        dims: [n, m],
        max_verification_error: r.max_error(),
        output: out_path.display().to_string(),
    };
    match s.format {
        Format::Structured => emit(out, &report)?,
        Format::Human => {
            writeln!(
                out,
                "branches: {} (Caratheodory bound (n-1)^2+1 = {} for n = {n})",
                report.branches, report.caratheodory_bound
            )?;
            writeln!(
                out,
                "success probability: {} (pMax = {})",
                num(report.declared_probability),
                num(f.p_max)
            )?;
            let tail = if report.has_tail {
                "pure contraction on the success branch"
            } else {
                "none"
            };
            writeln!(out, "second stage: {tail}")?;
            writeln!(
                out,
                "verified: max error {:.3e}",
                report.max_verification_error
            )?;
            writeln!(out, "wrote {}", report.output)?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct BranchJson {
    index: usize,
    stage: &'static str,
    proportionality_error: f64,
    weight_error: f64,
}

#[derive(Serialize)]
struct VerifyReport {
    pass: bool,
    source_digest_ok: bool,
    target_digest_ok: bool,
    completeness_error: f64,
    weight_sum_error: f64,
    contraction_excess: f64,
    unitarity_error: f64,
    tail_completeness_error: f64,
    completion_weight: f64,
    branch_errors: Vec<BranchJson>,
    measured_success_probability: f64,
    declared_probability: f64,
    tolerance: f64,
}

impl VerifyReport {
    fn new(r: &VerificationReport<f64>, source_ok: bool, target_ok: bool) -> Self {
        Self {
            pass: r.pass && source_ok && target_ok,
            source_digest_ok: source_ok,
            target_digest_ok: target_ok,
            completeness_error: r.completeness_error,
            weight_sum_error: r.weight_sum_error,
            contraction_excess: r.contraction_excess,
            unitarity_error: r.unitarity_error,
            tail_completeness_error: r.tail_completeness_error,
            completion_weight: r.completion_weight,
            branch_errors: r
                .branch_errors
                .iter()
                .map(|b| BranchJson {
                    index: b.index,
                    stage: match b.stage {
                        Stage::Instrument => "instrument",
                        Stage::Tail => "tail",
                    },
                    proportionality_error: b.proportionality_error,
                    weight_error: b.weight_error,
                })
                .collect(),
            measured_success_probability: r.measured_success_probability,
            declared_probability: r.declared_probability,
            tolerance: r.tolerance,
        }
    }
}

pub fn verify_cmd(
    p_path: &Path,
    a_path: &Path,
    b_path: &Path,
    s: Settings,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CmdResult {
    let file = load_protocol(p_path)?;
    let protocol = file.to_protocol()?;
    let a = load_state(a_path, err)?;
    let b = load_state(b_path, err)?;
    let r = verify(&protocol, &a, &b, s.tol)?;
    let report = VerifyReport::new(
        &r,
        file.source_digest == state_digest(&a),
        file.target_digest == state_digest(&b),
    );
    match s.format {
        Format::Structured => emit(out, &report)?,
        Format::Human => {
            if !report.source_digest_ok {
                writeln!(out, "source digest: MISMATCH")?;
            }
            if !report.target_digest_ok {
                writeln!(out, "target digest: MISMATCH")?;
            }
            writeln!(out, "completeness error: {:.3e}", report.completeness_error)?;
            writeln!(out, "weight sum error: {:.3e}", report.weight_sum_error)?;
            writeln!(out, "contraction excess: {:.3e}", report.contraction_excess)?;
            writeln!(out, "unitarity error: {:.3e}", report.unitarity_error)?;
            if protocol.stage2.is_some() {
                writeln!(
                    out,
                    "tail completeness error: {:.3e}",
                    report.tail_completeness_error
                )?;
            }
            for b in &report.branch_errors {
                writeln!(
                    out,
                    "branch {} ({}): proportionality {:.3e}, weight {:.3e}",
                    b.index, b.stage, b.proportionality_error, b.weight_error
                )?;
            }
            writeln!(
                out,
                "success probability: measured {}, declared {}",
                num(report.measured_success_probability),
                num(report.declared_probability)
            )?;
            writeln!(out, "result: {}", if report.pass { "PASS" } else { "FAIL" })?;
        }
    }
    if !report.pass {
        let reason = if !(report.source_digest_ok && report.target_digest_ok) {
            "state digests do not match the protocol file".to_string()
        } else {
            format!(
                "max error {:.3e} above tolerance {:e}",
                r.max_error(),
                s.tol
            )
        };
        return Err(CliError::VerificationFailed(reason));
    }
    Ok(())
}

#[derive(Serialize)]
struct SimulateReport {
    trials: u64,
    seed: u64,
    outcome_counts: BTreeMap<usize, u64>,
    success_count: u64,
    empirical_p: f64,
    declared_probability: f64,
}

#[allow(clippy::too_many_arguments)]
pub fn simulate_cmd(
    p_path: &Path,
    a_path: &Path,
    trials: u64,
    seed: u64,
    workers: usize,
    s: Settings,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CmdResult {
    let file = load_protocol(p_path)?;
    let protocol: Protocol<f64> = file.to_protocol()?;
    let a = load_state(a_path, err)?;
    if file.source_digest != state_digest(&a) {
        writeln!(
            err,
            "warning: {} is not the protocol's source state",
            a_path.display()
        )?;
    }
    let r = simulate_parallel(&protocol, &a, trials, seed, workers)?;
    let report = SimulateReport {
        trials: r.trials,
        seed: r.seed,
        outcome_counts: r.outcome_counts,
        success_count: r.success_count,
        empirical_p: r.empirical_p,
        declared_probability: protocol.declared_probability,
    };
    match s.format {
        Format::Structured => emit(out, &report)?,
        Format::Human => {
            writeln!(out, "trials: {}, seed: {}", report.trials, report.seed)?;
            writeln!(
                out,
                "{:>8}  {:>10}  {:>10}",
                "outcome", "count", "frequency"
            )?;
            for (k, c) in &report.outcome_counts {
                let label = if *k == 0 {
                    "m0".to_string()
                } else {
                    k.to_string()
                };
                let freq = if report.trials == 0 {
                    0.0
                } else {
                    *c as f64 / report.trials as f64
                };
                writeln!(out, "{label:>8}  {c:>10}  {freq:>10.6}")?;
            }
            writeln!(
                out,
                "success: {} ({:.6}, declared {})",
                report.success_count,
                report.empirical_p,
                num(report.declared_probability)
            )?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct LoPopescuReport {
    alice_singular_values: Vec<f64>,
    output: String,
}

pub fn lopopescu_cmd(
    m_path: &Path,
    psi_path: &Path,
    out_path: &Path,
    s: Settings,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CmdResult {
    let mj: MatrixJson = read_json(m_path)?;
    let m: Matrix<f64> =
        matrix_from_json(&mj).with_context(|| format!("matrix {}", m_path.display()))?;
    let psi = load_state(psi_path, err)?;
    let (n, u) = lo_popescu(&m, &psi, s.tol)?;
    write_json(
        out_path,
        &LoPopescuFile {
            n: matrix_to_json(&n),
            u: matrix_to_json(&u),
        },
    )?;
    let report = LoPopescuReport {
        alice_singular_values: svd(&n)?.sigma,
        output: out_path.display().to_string(),
    };
    match s.format {
        Format::Structured => emit(out, &report)?,
        Format::Human => {
            writeln!(
                out,
                "Alice contraction singular values: {}",
                nums(&report.alice_singular_values)
            )?;
            writeln!(out, "wrote {}", report.output)?;
        }
    }
    Ok(())
}
