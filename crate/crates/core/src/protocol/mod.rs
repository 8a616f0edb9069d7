//! Construction of LOCC protocols between bipartite pure states.
//!
//! A conversion `A → B` with success probability `p` runs in two stages:
//! a deterministic instrument taking `A` to an intermediate state `Q`
//! (Alice measures `M_λ`, Bob applies `U_λ`), then a single pure contraction
//! `N ⊗ V` taking `Q` to `B` on its success branch. The second stage is absent
//! for deterministic conversions, where `Q = B`.

mod deterministic;
mod feasibility;
mod lo_popescu;
mod pipeline;
mod pure;
mod tail;

pub use deterministic::{synth_deterministic, DeterministicInstrument};
pub use feasibility::{build_intermediate, check_pure_necessary, feasibility, Feasibility};
pub use lo_popescu::lo_popescu;
pub use pipeline::full_pipeline;
pub use pure::synth_pure;
pub use tail::synth_probabilistic_tail;

use crate::linalg::Matrix;
use crate::states::BipartiteState;

/// One outcome of Alice's measurement with Bob's feedback unitary.
#[derive(Debug, Clone, PartialEq)]
pub struct InstrumentElement<T> {
    /// Alice's contraction `M_λ`.
    pub m: Matrix<T>,
    /// Bob's unitary `U_λ`.
    pub u: Matrix<T>,
    /// Outcome probability `q_λ`.
    pub q: T,
}

/// Probabilistic stage `Q → B`: success contraction `n` with Bob unitary `v`,
/// and the failure contraction `n_fail = √(I − n†n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tail<T> {
    pub n: Matrix<T>,
    pub v: Matrix<T>,
    pub p: T,
    pub n_fail: Matrix<T>,
}

/// Single-branch transform `M ⊗ U |A⟩⟩ = √p |B⟩⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureTransform<T> {
    pub m: Matrix<T>,
    pub u: Matrix<T>,
    pub p: T,
}

/// Full conversion protocol.
#[derive(Debug, Clone, PartialEq)]
pub struct Protocol<T> {
    /// Deterministic instrument `A → Q`.
    pub stage1: Vec<InstrumentElement<T>>,
    /// Completion `M₀ = I − A A‡`, an outcome that never fires on `A`.
    pub m0: Matrix<T>,
    pub stage2: Option<Tail<T>>,
    pub intermediate: BipartiteState<T>,
    pub declared_probability: T,
}

impl<T> Protocol<T> {
    /// Local dimensions `(n, m)` the protocol acts on.
    pub fn dims(&self) -> (usize, usize) {
        (
            self.m0.rows(),
            self.stage1.first().map_or(0, |e| e.u.rows()),
        )
    }
}
