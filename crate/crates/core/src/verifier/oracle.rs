//! Definitional re-implementations used to cross-check the main code paths.
//!
//! Deliberately naive: explicit loops, no shared helpers.

use crate::linalg::Matrix;
use crate::protocol::Protocol;
use crate::scalar::{Real, C};

/// Results of the three majorization relations between `x` and `y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MajorizationFlags {
    /// `x ≺ y`
    pub majorized: bool,
    /// `x ≺^w y`
    pub super_majorized: bool,
    /// `x ≺_w y`
    pub sub_majorized: bool,
}

fn sorted_desc<T: Real>(v: &[T], len: usize) -> Vec<T> {
    let mut out: Vec<T> = v
        .iter()
        .map(|&x| if x < T::zero() { T::zero() } else { x })
        .collect();
    while out.len() < len {
        out.push(T::zero());
    }
    // selection sort
    for i in 0..out.len() {
        let mut best = i;
        for j in i + 1..out.len() {
            if out[j] > out[best] {
                best = j;
            }
        }
        out.swap(i, best);
    }
    out
}

/// Checks all three relations by summing each partial sum from scratch.
pub fn oracle_majorization<T: Real>(x: &[T], y: &[T], tol: T) -> MajorizationFlags {
    let n = x.len().max(y.len());
    let xs = sorted_desc(x, n);
    let ys = sorted_desc(y, n);
    let mut sub = true;
    let mut sup = true;
    for k in 1..=n {
        let mut hx = T::zero();
        let mut hy = T::zero();
        for i in 0..k {
            hx = hx + xs[i];
            hy = hy + ys[i];
        }
        if hx > hy + tol {
            sub = false;
        }
        let mut tx = T::zero();
        let mut ty = T::zero();
        for i in k - 1..n {
            tx = tx + xs[i];
            ty = ty + ys[i];
        }
        if tx < ty - tol {
            sup = false;
        }
    }
    let mut total = T::zero();
    for i in 0..n {
        total = total + xs[i] - ys[i];
    }
    MajorizationFlags {
        majorized: sub && total.abs() <= tol,
        super_majorized: sup,
        sub_majorized: sub,
    }
}

fn naive_mul<T: Real>(a: &Matrix<T>, b: &Matrix<T>) -> Matrix<T> {
    let (r, k, c) = (a.rows(), a.cols(), b.cols());
    assert_eq!(k, b.rows(), "inner dimensions");
    let mut data = Vec::with_capacity(r * c);
    for i in 0..r {
        for j in 0..c {
            let mut s = C::new(T::zero(), T::zero());
            for l in 0..k {
                s = s + a[(i, l)] * b[(l, j)];
            }
            data.push(s);
        }
    }
    Matrix::from_vec(r, c, data).expect("finite product")
}

fn naive_transpose<T: Real>(a: &Matrix<T>) -> Matrix<T> {
    Matrix::from_fn(a.cols(), a.rows(), |i, j| a[(j, i)])
}

fn naive_weight<T: Real>(a: &Matrix<T>) -> T {
    let mut s = T::zero();
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            s = s + a[(i, j)].norm_sqr();
        }
    }
    s
}

/// Unnormalized branch outputs of the protocol on `a` with their weights.
///
/// Entry `λ − 1` holds `M_λ·a·U_λᵀ` after stage one, followed by
/// `N·M_λ·a·U_λᵀ·Vᵀ` when a second stage is present. `a` must already have
/// the protocol's dimensions.
pub fn oracle_protocol_apply<T: Real>(
    protocol: &Protocol<T>,
    a: &Matrix<T>,
) -> Vec<(Matrix<T>, T)> {
    let mut out = Vec::new();
    for e in &protocol.stage1 {
        let mut s = naive_mul(&naive_mul(&e.m, a), &naive_transpose(&e.u));
        if let Some(t) = &protocol.stage2 {
            s = naive_mul(&naive_mul(&t.n, &s), &naive_transpose(&t.v));
        }
        let w = naive_weight(&s);
        out.push((s, w));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::majorization::{prec, prec_sub, prec_super, Spectrum};
    use crate::protocol::full_pipeline;
    use crate::random;
    use crate::states::{apply_local, BipartiteState};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn equal_vectors_satisfy_everything() {
        let x = [0.5, 0.3, 0.2];
        let f = oracle_majorization(&x, &x, 1e-9);
        assert!(f.majorized && f.super_majorized && f.sub_majorized);
    }

    #[test]
    fn agrees_with_library_relations() {
        let mut rng = ChaCha8Rng::seed_from_u64(60);
        for _ in 0..10_000 {
            let n = rng.random_range(1..=6);
            let zeros = rng.random_range(0..n);
            let x: Spectrum<f64> = random::random_spectrum(&mut rng, n, zeros);
            let y: Spectrum<f64> = if rng.random_bool(0.5) {
                let ny = rng.random_range(1..=6);
                random::random_spectrum(&mut rng, ny, 0)
            } else {
                x.scaled(rng.random_range(0.5..1.0))
            };
            let f = oracle_majorization(x.values(), y.values(), 1e-9);
            assert_eq!(f.majorized, prec(&x, &y));
            assert_eq!(f.super_majorized, prec_super(&x, &y));
            assert_eq!(f.sub_majorized, prec_sub(&x, &y));
        }
    }

    #[test]
    fn agrees_with_apply_local() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        for _ in 0..20 {
            let a: BipartiteState<f64> = random::random_state(&mut rng, 3, 3, 3);
            let b: BipartiteState<f64> = random::random_state(&mut rng, 3, 3, 2);
            let p = full_pipeline(&a, &b, None, 1e-9).unwrap();
            let branches = oracle_protocol_apply(&p, a.matrix());
            assert_eq!(branches.len(), p.stage1.len());
            for (e, (s, w)) in p.stage1.iter().zip(&branches) {
                let (mid, _) = apply_local(&e.m, &e.u, a.matrix()).unwrap();
                let (fin, wl) = match &p.stage2 {
                    Some(t) => apply_local(&t.n, &t.v, &mid).unwrap(),
                    None => apply_local(&Matrix::identity(3), &Matrix::identity(3), &mid).unwrap(),
                };
                assert!(s.max_abs_diff(&fin) < 1e-12);
                assert!((w - wl).abs() < 1e-12);
            }
        }
    }
}
