use crate::error::{Error, Result};
use crate::linalg::{is_contraction, operator_norm, svd, transposition_unitary, Matrix};
use crate::scalar::Real;
use crate::states::BipartiteState;

/// Moves a contraction `M` on Bob's side to Alice: returns `(N, U)` with
/// `(I ⊗ M)|Ψ⟩⟩ = (N ⊗ U)|Ψ⟩⟩`, i.e. `Ψ Mᵀ = N Ψ Uᵀ`, where
/// `N = K_{MΨᵀ} M K_Ψ` and `U = K_{MΨᵀ}† K_Ψ†`.
///
/// The transposition unitaries need a square `Ψ`. A state with fewer rows
/// than columns is zero-padded on Alice's side and `N` restricted back; a
/// state with more rows is compressed onto the range of `Ψ` by an isometry.
pub fn lo_popescu<T: Real>(
    m_bob: &Matrix<T>,
    psi: &BipartiteState<T>,
    tol: T,
) -> Result<(Matrix<T>, Matrix<T>)> {
    let (n, m) = (psi.dim_a(), psi.dim_b());
    if m_bob.shape() != (m, m) {
        return Err(Error::DimensionMismatch(format!(
            "Bob operator is {}x{}, Bob space has dimension {m}",
            m_bob.rows(),
            m_bob.cols()
        )));
    }
    let norm = operator_norm(m_bob)?;
    if norm > T::one() + tol {
        return Err(Error::NotAContraction {
            norm: norm.as_f64(),
        });
    }
    let psi_m = psi.matrix();

    let (n_alice, u) = if n == m {
        square_case(m_bob, psi_m)?
    } else if n < m {
        let (np, u) = square_case(m_bob, &psi_m.embed(m, m))?;
        (np.block(n, n), u)
    } else {
        let f = svd(psi_m)?;
        let iso = f.x.block(n, m);
        let phi = &iso.adjoint() * psi_m;
        let (nphi, u) = square_case(m_bob, &phi)?;
        (&(&iso * &nphi) * &iso.adjoint(), u)
    };

    let lhs = psi_m * &m_bob.transpose();
    let rhs = &(&n_alice * psi_m) * &u.transpose();
    if (&lhs - &rhs).frobenius_norm() > tol {
        return Err(Error::Numerical("Ψ·Mᵀ ≠ N·Ψ·Uᵀ".into()));
    }
    if !is_contraction(&n_alice, tol) {
        return Err(Error::Numerical(
            "Alice operator is not a contraction".into(),
        ));
    }
    Ok((n_alice, u))
}

fn square_case<T: Real>(m_bob: &Matrix<T>, psi: &Matrix<T>) -> Result<(Matrix<T>, Matrix<T>)> {
    let k_mpsi = transposition_unitary(&(m_bob * &psi.transpose()))?;
    let k_psi = transposition_unitary(psi)?;
    let n = &(&k_mpsi * m_bob) * &k_psi;
    let u = &k_mpsi.adjoint() * &k_psi.adjoint();
    Ok((n, u))
}
