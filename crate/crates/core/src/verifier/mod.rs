//! Independent verification and Monte-Carlo simulation of protocols.
//!
//! Nothing here calls into the synthesis code: every invariant is recomputed
//! from the protocol's matrices with plain linear algebra.

mod oracle;
mod simulate;

pub use oracle::{oracle_majorization, oracle_protocol_apply, MajorizationFlags};
pub use simulate::{simulate, simulate_parallel, SimulationResult};

use crate::error::{Error, Result};
use crate::linalg::{operator_norm, unitarity_error, Matrix};
use crate::protocol::Protocol;
use crate::scalar::{Real, C};
use crate::states::BipartiteState;

/// Which part of the protocol a branch check refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    /// Stage-one outcome `λ`, checked against the intermediate state.
    Instrument,
    /// Success branch of the tail following outcome `λ`, checked against the target.
    Tail,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BranchError<T> {
    /// Outcome index, starting at 1 (0 is the completion outcome `M₀`).
    pub index: usize,
    pub stage: Stage,
    /// `‖out − c·expected‖₂` with `c` the projection coefficient.
    pub proportionality_error: T,
    /// `| |c|² − declared weight |`.
    pub weight_error: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport<T> {
    /// `‖Σ M_λ†M_λ + M₀†M₀ − I‖₂`.
    pub completeness_error: T,
    /// `|Σ q_λ − 1|`.
    pub weight_sum_error: T,
    /// Largest excess of `‖M_λ‖` over one.
    pub contraction_excess: T,
    /// Largest `‖U†U − I‖₂` over Bob's unitaries, including the tail's.
    pub unitarity_error: T,
    /// `‖N†N + N_fail†N_fail − I‖₂`, zero without a tail.
    pub tail_completeness_error: T,
    /// Probability of the completion outcome on the source state.
    pub completion_weight: T,
    pub branch_errors: Vec<BranchError<T>>,
    pub measured_success_probability: T,
    pub declared_probability: T,
    pub tolerance: T,
    pub pass: bool,
}

impl<T: Real> VerificationReport<T> {
    /// Largest of all recorded errors.
    pub fn max_error(&self) -> T {
        let mut e = self
            .completeness_error
            .max(self.weight_sum_error)
            .max(self.contraction_excess)
            .max(self.unitarity_error)
            .max(self.tail_completeness_error)
            .max(self.completion_weight)
            .max((self.measured_success_probability - self.declared_probability).abs());
        for b in &self.branch_errors {
            e = e.max(b.proportionality_error).max(b.weight_error);
        }
        e
    }
}

/// Projection of `out` onto normalized `expected`: returns `(c, ‖out − c·expected‖₂)`.
fn project<T: Real>(out: &Matrix<T>, expected: &Matrix<T>) -> (C<T>, T) {
    let norm2 = expected.inner(expected).re;
    let c = expected.inner(out) / norm2;
    let resid = (out - &expected.scale_complex(c)).frobenius_norm();
    (c, resid)
}

/// Recomputes every protocol invariant on the source `a` and target `b`.
///
/// States smaller than the protocol's local dimensions are zero-padded.
pub fn verify<T: Real>(
    protocol: &Protocol<T>,
    a: &BipartiteState<T>,
    b: &BipartiteState<T>,
    tol: T,
) -> Result<VerificationReport<T>> {
    let (n, m) = (protocol.m0.rows(), protocol.intermediate.dim_b());
    if !protocol.m0.is_square() || protocol.intermediate.dim_a() != n {
        return Err(Error::DimensionMismatch(
            "inconsistent protocol dimensions".into(),
        ));
    }
    for s in [a, b] {
        if s.dim_a() > n || s.dim_b() > m {
            return Err(Error::DimensionMismatch(format!(
                "state is {}x{}, protocol acts on {n}x{m}",
                s.dim_a(),
                s.dim_b()
            )));
        }
    }
    for e in &protocol.stage1 {
        if e.m.shape() != (n, n) || e.u.shape() != (m, m) {
            return Err(Error::DimensionMismatch("instrument element shape".into()));
        }
    }
    if let Some(t) = &protocol.stage2 {
        if t.n.shape() != (n, n) || t.n_fail.shape() != (n, n) || t.v.shape() != (m, m) {
            return Err(Error::DimensionMismatch("tail operator shape".into()));
        }
    }
    let a = a.matrix().embed(n, m);
    let b = b.matrix().embed(n, m);
    let q = protocol.intermediate.matrix();

    let mut povm = &protocol.m0.adjoint() * &protocol.m0;
    let mut contraction_excess = T::zero();
    let mut unitarity = T::zero();
    for e in &protocol.stage1 {
        povm = &povm + &(&e.m.adjoint() * &e.m);
        contraction_excess = contraction_excess.max(operator_norm(&e.m)? - T::one());
        unitarity = unitarity.max(unitarity_error(&e.u));
    }
    let completeness_error = (&povm - &Matrix::identity(n)).frobenius_norm();
    let weight_sum: T = protocol.stage1.iter().map(|e| e.q).sum();
    let completion_weight = (&protocol.m0 * &a).frobenius_norm().powi(2);

    let mut tail_completeness_error = T::zero();
    if let Some(t) = &protocol.stage2 {
        let comp = &(&t.n.adjoint() * &t.n) + &(&t.n_fail.adjoint() * &t.n_fail);
        tail_completeness_error = (&comp - &Matrix::identity(n)).frobenius_norm();
        unitarity = unitarity.max(unitarity_error(&t.v));
        contraction_excess = contraction_excess.max(operator_norm(&t.n)? - T::one());
    }

    let mut branch_errors = Vec::new();
    let mut measured = T::zero();
    for (k, e) in protocol.stage1.iter().enumerate() {
        let out = &(&e.m * &a) * &e.u.transpose();
        let (c, resid) = project(&out, q);
        branch_errors.push(BranchError {
            index: k + 1,
            stage: Stage::Instrument,
            proportionality_error: resid,
            weight_error: (c.norm_sqr() - e.q).abs(),
        });
        match &protocol.stage2 {
            None => {
                // intermediate is the target itself
                let (cb, rb) = project(&out, &b);
                if rb <= tol {
                    measured = measured + cb.norm_sqr();
                }
            }
            Some(t) => {
                let out2 = &(&t.n * &out) * &t.v.transpose();
                let (cb, rb) = project(&out2, &b);
                branch_errors.push(BranchError {
                    index: k + 1,
                    stage: Stage::Tail,
                    proportionality_error: rb,
                    weight_error: (cb.norm_sqr() - e.q * t.p).abs(),
                });
                if rb <= tol {
                    measured = measured + cb.norm_sqr();
                }
            }
        }
    }

    let mut report = VerificationReport {
        completeness_error,
        weight_sum_error: (weight_sum - T::one()).abs(),
        contraction_excess: contraction_excess.max(T::zero()),
        unitarity_error: unitarity,
        tail_completeness_error,
        completion_weight,
        branch_errors,
        measured_success_probability: measured,
        declared_probability: protocol.declared_probability,
        tolerance: tol,
        pass: false,
    };
    report.pass = report.max_error() <= tol;
    Ok(report)
}
