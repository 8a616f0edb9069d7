use crate::error::{Error, Result};
use crate::linalg::{is_contraction, psd_sqrt, Matrix};
use crate::majorization::SPECTRUM_ZERO;
use crate::protocol::Tail;
use crate::scalar::Real;
use crate::states::BipartiteState;

/// Pure contraction `N ⊗ V` with `N Q Vᵀ = √p B`:
/// `N = √p X_B Σ_B Σ_Q‡ X_Q†` and `Vᵀ = Y_Q† Y_B`.
///
/// Requires `σ²(Q) ≥ p·σ²(B)` componentwise. The failure branch is completed
/// by the principal root `√(I − N†N)`.
pub fn synth_probabilistic_tail<T: Real>(
    q: &BipartiteState<T>,
    b: &BipartiteState<T>,
    p: T,
    tol: T,
) -> Result<Tail<T>> {
    let (n, m) = (q.dim_a(), q.dim_b());
    if (b.dim_a(), b.dim_b()) != (n, m) {
        return Err(Error::DimensionMismatch(format!(
            "intermediate is {n}x{m}, target is {}x{}",
            b.dim_a(),
            b.dim_b()
        )));
    }
    if !(p > T::zero() && p <= T::one() + tol) {
        return Err(Error::Precondition(format!(
            "probability {p} outside (0, 1]"
        )));
    }
    let sq = q.schmidt()?;
    let sb = b.schmidt()?;
    for (x, y) in sq
        .coefficients
        .values()
        .iter()
        .zip(sb.coefficients.values())
    {
        if *x < p * *y - tol {
            return Err(Error::Precondition(
                "tail requires σ²(Q) ≥ p·σ²(B) componentwise".into(),
            ));
        }
    }

    let zero = T::lit(SPECTRUM_ZERO).sqrt();
    let ratios: Vec<T> = sq
        .singular_values
        .iter()
        .zip(&sb.singular_values)
        .map(|(&sq, &sb)| if sq > zero { sb / sq } else { T::zero() })
        .collect();
    let mut diag = vec![T::zero(); n];
    diag[..ratios.len()].copy_from_slice(&ratios);
    let nn = (&(&sb.local_a * &Matrix::diag(&diag)) * &sq.local_a.adjoint()).scale(p.sqrt());
    let v = (&sb.local_b.transpose() * &sq.local_b.conj()).clone();

    if !is_contraction(&nn, tol) {
        return Err(Error::Numerical(
            "tail operator is not a contraction".into(),
        ));
    }
    let out = &(&nn * q.matrix()) * &v.transpose();
    if (&out - &b.matrix().scale(p.sqrt())).frobenius_norm() > tol {
        return Err(Error::Numerical(
            "tail operator does not map Q onto √p·B".into(),
        ));
    }
    let n_fail = psd_sqrt(&(&Matrix::identity(n) - &(&nn.adjoint() * &nn)))?;
    Ok(Tail {
        n: nn,
        v,
        p,
        n_fail,
    })
}
