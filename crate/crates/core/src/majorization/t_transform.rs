use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::majorization::{prec, Spectrum};
use crate::scalar::Real;

/// T-transform on coordinates `i < j`:
/// `(x_i, x_j) ← (t·x_i + (1−t)·x_j, (1−t)·x_i + t·x_j)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TTransform<T> {
    pub i: usize,
    pub j: usize,
    pub t: T,
}

impl<T: Real> TTransform<T> {
    pub fn apply(&self, v: &mut [T]) {
        let (a, b) = (v[self.i], v[self.j]);
        let s = T::one() - self.t;
        v[self.i] = self.t * a + s * b;
        v[self.j] = s * a + self.t * b;
    }

    /// `t·I + (1−t)·P_ij` as an `n x n` matrix.
    pub fn matrix(&self, n: usize) -> Matrix<T> {
        let mut m = Matrix::identity(n);
        let s = T::one() - self.t;
        m[(self.i, self.i)] = crate::scalar::c(self.t);
        m[(self.j, self.j)] = crate::scalar::c(self.t);
        m[(self.i, self.j)] = crate::scalar::c(s);
        m[(self.j, self.i)] = crate::scalar::c(s);
        m
    }
}

/// Hardy-Littlewood-Pólya chain: a sequence of at most `N − 1` T-transforms
/// carrying `y` to `x` when `x ≺ y`.
///
/// Each step picks the largest `j` with `x_j < y_j` and the smallest `k > j`
/// with `x_k > y_k`, then moves `min(y_j − x_j, x_k − y_k)` from `y_j` to `y_k`.
/// The coordinate that reaches its target is pinned exactly, so it is never
/// selected again.
pub fn t_transform_chain<T: Real>(x: &Spectrum<T>, y: &Spectrum<T>) -> Result<Vec<TTransform<T>>> {
    if !prec(x, y) {
        return Err(Error::Precondition(
            "T-transform chain requires x ≺ y".into(),
        ));
    }
    let n = x.len().max(y.len());
    let x = x.padded(n);
    let target = x.values();
    let mut cur = y.padded(n).values().to_vec();
    let thr = T::epsilon() * T::lit(64.0);
    let mut chain = Vec::new();

    while chain.len() < n.saturating_sub(1) {
        let Some(j) = (0..n).rev().find(|&j| cur[j] - target[j] > thr) else {
            break;
        };
        let Some(k) = (j + 1..n).find(|&k| target[k] - cur[k] > thr) else {
            break;
        };
        let gap = cur[j] - cur[k];
        let dj = cur[j] - target[j];
        let dk = target[k] - cur[k];
        let delta = dj.min(dk);
        let t = (T::one() - delta / gap).max(T::zero()).min(T::one());
        let step = TTransform { i: j, j: k, t };
        step.apply(&mut cur);
        if dj <= dk {
            cur[j] = target[j];
        }
        if dk <= dj {
            cur[k] = target[k];
        }
        chain.push(step);
    }
    Ok(chain)
}

/// Applies the chain in order to a copy of `v`.
pub fn apply_chain<T: Real>(chain: &[TTransform<T>], v: &[T]) -> Vec<T> {
    let mut out = v.to_vec();
    for step in chain {
        step.apply(&mut out);
    }
    out
}

/// Product `T_L ⋯ T_1` of the chain, a doubly stochastic `n x n` matrix `D`
/// with `D·y = x`.
pub fn compose_bistochastic<T: Real>(chain: &[TTransform<T>], n: usize) -> Matrix<T> {
    chain
        .iter()
        .fold(Matrix::identity(n), |d, step| &step.matrix(n) * &d)
}
