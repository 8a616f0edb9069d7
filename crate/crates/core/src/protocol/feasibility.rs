use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::majorization::{
    intermediate_spectrum_tol, max_conversion_probability, prec_sub, prec_super_tol, prec_tol,
    Spectrum,
};
use crate::scalar::Real;
use crate::states::BipartiteState;

/// Outcome of the LOCC feasibility test for `A → B`.
#[derive(Debug, Clone, PartialEq)]
pub struct Feasibility<T> {
    /// `σ²(A) ≺ σ²(B)`: conversion succeeds with certainty.
    pub deterministic: bool,
    /// Largest achievable success probability.
    pub p_max: T,
    /// `rank(A) ≥ rank(B)`.
    pub rank_ok: bool,
    pub rank_a: usize,
    pub rank_b: usize,
    pub spectrum_a: Spectrum<T>,
    pub spectrum_b: Spectrum<T>,
}

pub fn feasibility<T: Real>(
    a: &BipartiteState<T>,
    b: &BipartiteState<T>,
    tol: T,
) -> Result<Feasibility<T>> {
    let sa = a.spectrum()?;
    let sb = b.spectrum()?;
    let deterministic = prec_tol(&sa, &sb, tol);
    let p_max = if deterministic {
        T::one()
    } else {
        max_conversion_probability(&sa, &sb)?
    };
    Ok(Feasibility {
        deterministic,
        p_max,
        rank_ok: sa.rank() >= sb.rank(),
        rank_a: sa.rank(),
        rank_b: sb.rank(),
        spectrum_a: sa,
        spectrum_b: sb,
    })
}

/// Necessary condition `p·σ²(B) ≺_w σ²(A)` for a single-branch conversion.
pub fn check_pure_necessary<T: Real>(
    a: &BipartiteState<T>,
    b: &BipartiteState<T>,
    p: T,
) -> Result<bool> {
    Ok(prec_sub(&b.spectrum()?.scaled(p), &a.spectrum()?))
}

/// Diagonal intermediate state `Q` with `σ²(A) ≺ σ²(Q)` and `σ²(Q) ≥ p·σ²(B)`.
///
/// The result has `A`'s local dimensions.
pub fn build_intermediate<T: Real>(
    a: &BipartiteState<T>,
    b: &BipartiteState<T>,
    p: T,
    tol: T,
) -> Result<BipartiteState<T>> {
    let sa = a.spectrum()?;
    let target = b.spectrum()?.scaled(p);
    if !prec_super_tol(&sa, &target, tol) {
        let max = max_conversion_probability(&sa, &b.spectrum()?).unwrap_or(T::zero());
        return Err(Error::InfeasibleTarget {
            requested: p.as_f64(),
            max: max.as_f64(),
        });
    }
    let v = intermediate_spectrum_tol(&sa, &target, tol)?;
    let (n, m) = (a.dim_a(), a.dim_b());
    if v.values()
        .iter()
        .skip(n.min(m))
        .any(|&x| x > T::lit(crate::majorization::SPECTRUM_ZERO))
    {
        return Err(Error::DimensionMismatch(
            "target spectrum does not fit in the source dimensions".into(),
        ));
    }
    let diag: Vec<T> = v.values().iter().take(n.min(m)).map(|x| x.sqrt()).collect();
    BipartiteState::from_matrix(Matrix::diag_rect(n, m, &diag))
}
