//! Bipartite pure states as coefficient matrices.
//!
//! `|A⟩⟩ = Σ a_ij |i⟩₁⊗|j⟩₂` is identified with the `n x m` matrix `a`, and
//! local operators act by `(M_A ⊗ M_B)|A⟩⟩ = |M_A · a · M_Bᵀ⟩⟩`.

use crate::error::{Error, Result};
use crate::linalg::{svd, Matrix, DEFAULT_TOL};
use crate::majorization::{Spectrum, SPECTRUM_ZERO};
use crate::scalar::{Real, C};

/// Normalized bipartite pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteState<T> {
    a: Matrix<T>,
}

impl<T: Real> BipartiteState<T> {
    /// Reshapes row-major amplitudes into an `n x m` coefficient matrix and
    /// normalizes. Returns the state and the norm that was divided out.
    pub fn from_amplitudes(amplitudes: &[C<T>], n: usize, m: usize) -> Result<(Self, T)> {
        if amplitudes.len() != n * m {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for a {n}x{m} state",
                amplitudes.len()
            )));
        }
        let a = Matrix::from_vec(n, m, amplitudes.to_vec())?;
        let norm = a.frobenius_norm();
        if norm == T::zero() {
            return Err(Error::ZeroVector);
        }
        Ok((
            Self {
                a: a.scale(norm.recip()),
            },
            norm,
        ))
    }

    /// Normalizes an arbitrary nonzero coefficient matrix.
    pub fn from_matrix(a: Matrix<T>) -> Result<Self> {
        let (n, m) = a.shape();
        Self::from_amplitudes(a.as_slice(), n, m).map(|(s, _)| s)
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.a
    }

    pub fn amplitudes(&self) -> &[C<T>] {
        self.a.as_slice()
    }

    pub fn dim_a(&self) -> usize {
        self.a.rows()
    }

    pub fn dim_b(&self) -> usize {
        self.a.cols()
    }

    /// Zero-pads the local dimensions to `n x m`; the state is unchanged.
    pub fn embed(&self, n: usize, m: usize) -> Self {
        Self {
            a: self.a.embed(n, m),
        }
    }

    pub fn schmidt(&self) -> Result<SchmidtForm<T>> {
        schmidt(self)
    }

    pub fn spectrum(&self) -> Result<Spectrum<T>> {
        Ok(schmidt(self)?.coefficients)
    }
}

/// Schmidt decomposition `a = X_A · diag(σ) · Y_A`.
#[derive(Debug, Clone)]
pub struct SchmidtForm<T> {
    /// Squared Schmidt coefficients `σ²_i`, nonincreasing.
    pub coefficients: Spectrum<T>,
    pub singular_values: Vec<T>,
    pub local_a: Matrix<T>,
    pub local_b: Matrix<T>,
    pub rank: usize,
}

pub fn schmidt<T: Real>(s: &BipartiteState<T>) -> Result<SchmidtForm<T>> {
    let f = svd(&s.a)?;
    let coefficients = Spectrum::new(f.sigma.iter().map(|&x| x * x).collect());
    let rank = coefficients.rank();
    Ok(SchmidtForm {
        coefficients,
        singular_values: f.sigma,
        local_a: f.x,
        local_b: f.y,
        rank,
    })
}

/// `(M_A ⊗ M_B)|a⟩⟩ = |M_A a M_Bᵀ⟩⟩` together with its squared Frobenius norm.
pub fn apply_local<T: Real>(
    m_a: &Matrix<T>,
    m_b: &Matrix<T>,
    a: &Matrix<T>,
) -> Result<(Matrix<T>, T)> {
    if m_a.cols() != a.rows() || m_b.cols() != a.cols() {
        return Err(Error::DimensionMismatch(format!(
            "local operators {}x{} ⊗ {}x{} on a {}x{} state",
            m_a.rows(),
            m_a.cols(),
            m_b.rows(),
            m_b.cols(),
            a.rows(),
            a.cols()
        )));
    }
    let out = &(m_a * a) * &m_b.transpose();
    let w = out.frobenius_norm().powi(2);
    Ok((out, w))
}

/// Whether `s1 = c·s2` for some complex `c`, using the largest-modulus entry
/// of `s2` as reference. The residual is measured relative to `‖s1‖₂`.
pub fn proportional<T: Real>(s1: &Matrix<T>, s2: &Matrix<T>, tol: T) -> (bool, Option<C<T>>) {
    if s1.shape() != s2.shape() {
        return (false, None);
    }
    let Some((idx, pivot)) = s2
        .as_slice()
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm().partial_cmp(&b.1.norm()).expect("finite"))
    else {
        return (false, None);
    };
    if pivot.norm() == T::zero() {
        let zero = s1.frobenius_norm() <= tol;
        return (zero, zero.then(|| C::new(T::zero(), T::zero())));
    }
    let c = s1.as_slice()[idx] / pivot;
    let resid = (s1 - &s2.scale_complex(c)).frobenius_norm();
    let scale = s1.frobenius_norm().max(T::lit(SPECTRUM_ZERO));
    if resid <= tol * scale {
        (true, Some(c))
    } else {
        (false, None)
    }
}

/// [`proportional`] at the default tolerance.
pub fn proportional_default<T: Real>(s1: &Matrix<T>, s2: &Matrix<T>) -> (bool, Option<C<T>>) {
    proportional(s1, s2, T::resolvable(DEFAULT_TOL))
}
