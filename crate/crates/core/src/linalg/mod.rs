//! Dense complex linear algebra: SVD, Moore-Penrose pseudoinverse,
//! transposition unitaries, polar decomposition, norms and predicates.

mod matrix;
mod svd;

pub use matrix::Matrix;
pub use svd::{svd, Svd};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Default tolerance for predicate checks.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Singular values at or below this fraction of `σ_max` count as zero when
/// pseudo-inverting.
pub const PINV_RELATIVE_CUTOFF: f64 = 1e-12;

/// Moore-Penrose pseudoinverse `Y† Σ‡ X†`.
pub fn pinv<T: Real>(m: &Matrix<T>) -> Result<Matrix<T>> {
    let f = svd(m)?;
    let smax = f.sigma.first().copied().unwrap_or_else(T::zero);
    let cutoff = smax * T::lit(PINV_RELATIVE_CUTOFF);
    let inv: Vec<T> = f
        .sigma
        .iter()
        .map(|&s| {
            if s > cutoff && s > T::zero() {
                s.recip()
            } else {
                T::zero()
            }
        })
        .collect();
    let sigma_pinv = Matrix::diag_rect(m.cols(), m.rows(), &inv);
    Ok(&(&f.y.adjoint() * &sigma_pinv) * &f.x.adjoint())
}

/// Orthogonal projector `m m‡` onto the range of `m`.
pub fn range_projector<T: Real>(m: &Matrix<T>) -> Result<Matrix<T>> {
    Ok(m * &pinv(m)?)
}

/// Unitary `K` with `K m K* = mᵀ`, built as `K = Yᵀ X†` from `m = X Σ Y`.
pub fn transposition_unitary<T: Real>(m: &Matrix<T>) -> Result<Matrix<T>> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let f = svd(m)?;
    Ok(&f.y.transpose() * &f.x.adjoint())
}

/// Polar decomposition `m = positive · unitary` with `positive = √(m m†)`.
pub fn polar<T: Real>(m: &Matrix<T>) -> Result<(Matrix<T>, Matrix<T>)> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let f = svd(m)?;
    let unitary = &f.x * &f.y;
    let positive = &(&f.x * &f.sigma_matrix()) * &f.x.adjoint();
    Ok((unitary, hermitian_part(&positive)))
}

/// Principal square root of a Hermitian positive semidefinite matrix.
///
/// For `h = X Σ Y` positive semidefinite, `h = Y† Σ Y`, so `√h = Y† √Σ Y`.
pub fn psd_sqrt<T: Real>(h: &Matrix<T>) -> Result<Matrix<T>> {
    if !h.is_square() {
        return Err(Error::NotSquare {
            rows: h.rows(),
            cols: h.cols(),
        });
    }
    let f = svd(h)?;
    let roots: Vec<T> = f.sigma.iter().map(|s| s.sqrt()).collect();
    let root = &(&f.y.adjoint() * &Matrix::diag(&roots)) * &f.y;
    Ok(hermitian_part(&root))
}

/// `(h + h†) / 2`, removing rounding asymmetry.
pub fn hermitian_part<T: Real>(h: &Matrix<T>) -> Matrix<T> {
    (h + &h.adjoint()).scale(T::lit(0.5))
}

/// Largest singular value.
pub fn operator_norm<T: Real>(m: &Matrix<T>) -> Result<T> {
    Ok(svd(m)?.sigma[0])
}

pub fn frobenius_norm<T: Real>(m: &Matrix<T>) -> T {
    m.frobenius_norm()
}

pub fn is_contraction<T: Real>(m: &Matrix<T>, tol: T) -> bool {
    operator_norm(m).is_ok_and(|n| n <= T::one() + tol)
}

/// `‖m†m − I‖₂ ≤ tol` in the Frobenius norm; non-square matrices are never unitary.
pub fn is_unitary<T: Real>(m: &Matrix<T>, tol: T) -> bool {
    m.is_square() && unitarity_error(m) <= tol
}

pub fn unitarity_error<T: Real>(m: &Matrix<T>) -> T {
    (&(&m.adjoint() * m) - &Matrix::identity(m.cols())).frobenius_norm()
}
