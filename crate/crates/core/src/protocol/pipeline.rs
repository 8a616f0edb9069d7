use crate::error::{Error, Result};
use crate::protocol::{
    build_intermediate, feasibility, synth_deterministic, synth_probabilistic_tail,
    InstrumentElement, Protocol,
};
use crate::scalar::Real;
use crate::states::BipartiteState;

/// Synthesizes a protocol converting `a` into `b` with probability
/// `p_target` (default: the maximum).
///
/// States with different local dimensions are zero-padded to common ones; the
/// protocol acts on the padded spaces. Deterministic targets use `Q = B` and
/// need no second stage.
pub fn full_pipeline<T: Real>(
    a: &BipartiteState<T>,
    b: &BipartiteState<T>,
    p_target: Option<T>,
    tol: T,
) -> Result<Protocol<T>> {
    let n = a.dim_a().max(b.dim_a());
    let m = a.dim_b().max(b.dim_b());
    let a = a.embed(n, m);
    let b = b.embed(n, m);

    let f = feasibility(&a, &b, tol)?;
    if !f.rank_ok {
        return Err(Error::RankViolation {
            source_rank: f.rank_a,
            target_rank: f.rank_b,
        });
    }
    let p = p_target.unwrap_or(f.p_max);
    if p.is_nan() || p <= T::zero() {
        return Err(Error::Precondition(format!(
            "target probability {p} must be positive"
        )));
    }
    if p > f.p_max + tol {
        return Err(Error::InfeasibleTarget {
            requested: p.as_f64(),
            max: f.p_max.as_f64(),
        });
    }
    let p = p.min(f.p_max);

    if f.deterministic && p >= T::one() - tol {
        let inst = synth_deterministic(&a, &b, tol)?;
        return Ok(Protocol {
            stage1: inst.elements,
            m0: inst.m0,
            stage2: None,
            intermediate: b,
            declared_probability: T::one(),
        });
    }

    let q = build_intermediate(&a, &b, p, tol)?;
    let inst = synth_deterministic(&a, &q, tol)?;
    let tail = synth_probabilistic_tail(&q, &b, p, tol)?;
    let stage1: Vec<InstrumentElement<T>> = inst.elements;
    Ok(Protocol {
        stage1,
        m0: inst.m0,
        stage2: Some(tail),
        intermediate: q,
        declared_probability: p,
    })
}
