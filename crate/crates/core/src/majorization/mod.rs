//! Vector majorization and the constructions built on it.
//!
//! Spectra are squared Schmidt coefficients (eigenvalues of `AA†`) stored
//! sorted nonincreasing. All relations compare partial sums with an absolute
//! tolerance, [`MAJORIZATION_TOL`] unless a `_tol` variant is used.

mod birkhoff;
mod t_transform;

pub use birkhoff::{birkhoff_decompose, BirkhoffDecomposition};
pub use t_transform::{apply_chain, compose_bistochastic, t_transform_chain, TTransform};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Absolute tolerance on partial sums.
pub const MAJORIZATION_TOL: f64 = 1e-9;

/// Entries at or below this value count as zero when computing ranks.
pub const SPECTRUM_ZERO: f64 = 1e-12;

/// Nonnegative vector sorted nonincreasing.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<T> {
    values: Vec<T>,
}

impl<T: Real> Spectrum<T> {
    /// Sorts and clamps negative entries to zero.
    pub fn new(mut values: Vec<T>) -> Self {
        for v in values.iter_mut() {
            if *v < T::zero() {
                *v = T::zero();
            }
        }
        values.sort_by(|a, b| b.partial_cmp(a).expect("finite spectrum"));
        Self { values }
    }

    /// Validating constructor: entries must be finite and `≥ −1e−12`, the sum
    /// at most `1 + 1e−9`.
    pub fn try_new(values: Vec<T>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        if values.iter().any(|&v| v < -T::lit(SPECTRUM_ZERO)) {
            return Err(Error::Precondition("spectrum has negative entries".into()));
        }
        let s = Self::new(values);
        if s.sum() > T::one() + T::resolvable(MAJORIZATION_TOL) {
            return Err(Error::Precondition(format!(
                "spectrum sum {} exceeds one",
                s.sum()
            )));
        }
        Ok(s)
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sum(&self) -> T {
        self.values.iter().copied().sum()
    }

    /// Number of entries above [`SPECTRUM_ZERO`].
    pub fn rank(&self) -> usize {
        self.values
            .iter()
            .filter(|&&v| v > T::lit(SPECTRUM_ZERO))
            .count()
    }

    /// Copy zero-padded to length `n` (never truncates).
    pub fn padded(&self, n: usize) -> Self {
        let mut values = self.values.clone();
        if n > values.len() {
            values.resize(n, T::zero());
        }
        Self { values }
    }

    pub fn scaled(&self, p: T) -> Self {
        Self::new(self.values.iter().map(|&v| v * p).collect())
    }

    /// `h[l] = Σ_{i ≤ l} x_i`.
    pub fn head_sums(&self) -> Vec<T> {
        self.values
            .iter()
            .scan(T::zero(), |acc, &v| {
                *acc = *acc + v;
                Some(*acc)
            })
            .collect()
    }

    /// `t[l] = Σ_{i ≥ l} x_i`.
    pub fn tail_sums(&self) -> Vec<T> {
        let mut tails = vec![T::zero(); self.values.len()];
        let mut acc = T::zero();
        for (i, &v) in self.values.iter().enumerate().rev() {
            acc = acc + v;
            tails[i] = acc;
        }
        tails
    }
}

fn pad_pair<T: Real>(x: &Spectrum<T>, y: &Spectrum<T>) -> (Spectrum<T>, Spectrum<T>) {
    let n = x.len().max(y.len());
    (x.padded(n), y.padded(n))
}

/// `x ≺ y`: head sums of `x` dominated by those of `y`, totals equal.
pub fn prec<T: Real>(x: &Spectrum<T>, y: &Spectrum<T>) -> bool {
    prec_tol(x, y, T::resolvable(MAJORIZATION_TOL))
}

pub fn prec_tol<T: Real>(x: &Spectrum<T>, y: &Spectrum<T>, tol: T) -> bool {
    prec_sub_tol(x, y, tol) && (x.sum() - y.sum()).abs() <= tol
}

/// `x ≺^w y`: every tail sum of `x` dominates the corresponding tail of `y`.
pub fn prec_super<T: Real>(x: &Spectrum<T>, y: &Spectrum<T>) -> bool {
    prec_super_tol(x, y, T::resolvable(MAJORIZATION_TOL))
}

pub fn prec_super_tol<T: Real>(x: &Spectrum<T>, y: &Spectrum<T>, tol: T) -> bool {
    let (x, y) = pad_pair(x, y);
    x.tail_sums()
        .iter()
        .zip(y.tail_sums())
        .all(|(&a, b)| a >= b - tol)
}

/// `x ≺_w y`: every head sum of `x` is dominated by that of `y`.
pub fn prec_sub<T: Real>(x: &Spectrum<T>, y: &Spectrum<T>) -> bool {
    prec_sub_tol(x, y, T::resolvable(MAJORIZATION_TOL))
}

pub fn prec_sub_tol<T: Real>(x: &Spectrum<T>, y: &Spectrum<T>, tol: T) -> bool {
    let (x, y) = pad_pair(x, y);
    x.head_sums()
        .iter()
        .zip(y.head_sums())
        .all(|(&a, b)| a <= b + tol)
}

/// Given `x ≺^w y`, returns `v = (Σx − Σy + y₁, y₂, …, y_N)` with `v ≥ y`
/// componentwise and `x ≺ v`.
pub fn intermediate_spectrum<T: Real>(x: &Spectrum<T>, y: &Spectrum<T>) -> Result<Spectrum<T>> {
    intermediate_spectrum_tol(x, y, T::resolvable(MAJORIZATION_TOL))
}

pub fn intermediate_spectrum_tol<T: Real>(
    x: &Spectrum<T>,
    y: &Spectrum<T>,
    tol: T,
) -> Result<Spectrum<T>> {
    if !prec_super_tol(x, y, tol) {
        return Err(Error::Precondition(
            "intermediate vector requires x to be supermajorized by y".into(),
        ));
    }
    let (x, y) = pad_pair(x, y);
    let mut v = y.values.clone();
    if let Some(first) = v.first_mut() {
        *first = *first + (x.sum() - y.sum());
    }
    Ok(Spectrum::new(v))
}

/// Largest `p` with `xa ≺^w p·xb`: the minimum over `l` of the tail ratios
/// `Σ_{i≥l} xa_i / Σ_{i≥l} xb_i`, skipping tails where `xb` is exhausted.
///
/// Returns zero when `rank(xa) < rank(xb)`.
pub fn max_conversion_probability<T: Real>(xa: &Spectrum<T>, xb: &Spectrum<T>) -> Result<T> {
    let tol = T::resolvable(MAJORIZATION_TOL);
    for s in [xa, xb] {
        if (s.sum() - T::one()).abs() > tol {
            return Err(Error::NotNormalized {
                sum: s.sum().as_f64(),
            });
        }
    }
    if xa.rank() < xb.rank() {
        return Ok(T::zero());
    }
    let (a, b) = pad_pair(xa, xb);
    let zero = T::lit(SPECTRUM_ZERO);
    let p = a
        .tail_sums()
        .into_iter()
        .zip(b.tail_sums())
        .filter(|&(_, tb)| tb > zero)
        .map(|(ta, tb)| ta / tb)
        .fold(T::one(), |m, r| m.min(r));
    Ok(p.max(T::zero()).min(T::one()))
}
