use crate::error::{Error, Result};
use crate::linalg::{is_unitary, operator_norm, pinv, Matrix};
use crate::protocol::PureTransform;
use crate::scalar::Real;
use crate::states::BipartiteState;

/// Single-branch conversion `M ⊗ U |A⟩⟩ = √p |B⟩⟩` with
/// `M = √p·B·U*·A‡ + N·(I − A A‡)`.
///
/// Defaults are `N = 0` and `U = Y_Bᵀ Y_A*`, which give a contraction whenever
/// `p·σ²(B) ≤ σ²(A)` componentwise. Other choices of `N` or `U` may be passed in;
/// the result is rejected if the identity fails or `M` is not a contraction.
pub fn synth_pure<T: Real>(
    a: &BipartiteState<T>,
    b: &BipartiteState<T>,
    p: T,
    free_n: Option<&Matrix<T>>,
    u: Option<&Matrix<T>>,
    tol: T,
) -> Result<PureTransform<T>> {
    if a.dim_b() != b.dim_b() {
        return Err(Error::DimensionMismatch(format!(
            "Bob dimensions differ: {} vs {}",
            a.dim_b(),
            b.dim_b()
        )));
    }
    if !(p > T::zero() && p <= T::one() + tol) {
        return Err(Error::Precondition(format!(
            "probability {p} outside (0, 1]"
        )));
    }
    let sa = a.schmidt()?;
    let sb = b.schmidt()?;
    if sa.rank < sb.rank {
        return Err(Error::RankViolation {
            source_rank: sa.rank,
            target_rank: sb.rank,
        });
    }

    let u = match u {
        Some(u) if !is_unitary(u, tol) || u.rows() != a.dim_b() => {
            return Err(Error::Precondition(
                "U must be a unitary on Bob's space".into(),
            ));
        }
        Some(u) => u.clone(),
        None => &sb.local_b.transpose() * &sa.local_b.conj(),
    };
    let a_pinv = pinv(a.matrix())?;
    let mut m = (&(&b.matrix().scale(p.sqrt()) * &u.conj()) * &a_pinv).clone();
    if let Some(free) = free_n {
        if free.shape() != (b.dim_a(), a.dim_a()) {
            return Err(Error::DimensionMismatch(format!(
                "free operator must be {}x{}",
                b.dim_a(),
                a.dim_a()
            )));
        }
        let complement = &Matrix::identity(a.dim_a()) - &(a.matrix() * &a_pinv);
        m = &m + &(free * &complement);
    }

    let out = &(&m * a.matrix()) * &u.transpose();
    if (&out - &b.matrix().scale(p.sqrt())).frobenius_norm() > tol {
        return Err(Error::Numerical("M·A·Uᵀ ≠ √p·B for the chosen U".into()));
    }
    let norm = operator_norm(&m)?;
    if norm > T::one() + tol {
        return Err(Error::NotAContraction {
            norm: norm.as_f64(),
        });
    }
    Ok(PureTransform { m, u, p })
}
