//! Birkhoff-von Neumann decomposition of doubly stochastic matrices.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::majorization::MAJORIZATION_TOL;
use crate::scalar::Real;

/// Convex combination `Σ_λ q_λ Π_λ` of permutation matrices.
///
/// Each permutation is stored as `perm[l] = k`, meaning `Π_λ` has its one at
/// `(l, k)`; see [`Matrix::permutation`].
#[derive(Debug, Clone, PartialEq)]
pub struct BirkhoffDecomposition<T> {
    pub terms: Vec<(T, Vec<usize>)>,
}

impl<T: Real> BirkhoffDecomposition<T> {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_weight(&self) -> T {
        self.terms.iter().map(|(w, _)| *w).sum()
    }

    pub fn reconstruct(&self, n: usize) -> Matrix<T> {
        self.terms
            .iter()
            .fold(Matrix::zeros(n, n), |acc, (w, perm)| {
                &acc + &Matrix::permutation(perm).scale(*w)
            })
    }

    /// Carathéodory bound `(N−1)² + 1` on the number of terms.
    pub fn term_bound(n: usize) -> usize {
        n.saturating_sub(1).pow(2) + 1
    }
}

/// Greedy decomposition: repeatedly takes the permutation inside the positive
/// support of the residual that maximizes its smallest entry (bottleneck
/// matching), subtracts that entry along it, and stops once the residual mass
/// vanishes.
///
/// Every step shrinks the support, so the residual moves to a strictly lower
/// dimensional face of the Birkhoff polytope and the number of terms never
/// exceeds `(N−1)² + 1`.
pub fn birkhoff_decompose<T: Real>(d: &Matrix<T>) -> Result<BirkhoffDecomposition<T>> {
    if !d.is_square() {
        return Err(Error::NotSquare {
            rows: d.rows(),
            cols: d.cols(),
        });
    }
    let n = d.rows();
    let tol = T::resolvable(MAJORIZATION_TOL);
    let mut deviation = T::zero();
    for z in d.as_slice() {
        deviation = deviation.max(z.im.abs()).max((-z.re).max(T::zero()));
    }
    for i in 0..n {
        let row: T = (0..n).map(|j| d[(i, j)].re).sum();
        let col: T = (0..n).map(|j| d[(j, i)].re).sum();
        deviation = deviation
            .max((row - T::one()).abs())
            .max((col - T::one()).abs());
    }
    if deviation > tol {
        return Err(Error::NotDoublyStochastic {
            deviation: deviation.as_f64(),
        });
    }

    let zero_thr = T::epsilon() * T::lit(512.0);
    let mut residual: Vec<Vec<T>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let v = d[(i, j)].re;
                    if v > zero_thr {
                        v
                    } else {
                        T::zero()
                    }
                })
                .collect()
        })
        .collect();

    let mut terms = Vec::new();
    let mut remaining = T::one();
    while remaining > zero_thr * T::lit(n as f64) {
        let Some(perm) = bottleneck_matching(&residual) else {
            if remaining > tol {
                return Err(Error::NoPerfectMatching);
            }
            break;
        };
        let w = (0..n)
            .map(|l| residual[l][perm[l]])
            .fold(T::infinity(), |a, b| a.min(b));
        for (l, &k) in perm.iter().enumerate() {
            let r = residual[l][k] - w;
            residual[l][k] = if r > zero_thr { r } else { T::zero() };
        }
        remaining = remaining - w;
        terms.push((w, perm));
        if terms.len() > BirkhoffDecomposition::<T>::term_bound(n) {
            return Err(Error::Numerical("Birkhoff term bound exceeded".into()));
        }
    }
    Ok(BirkhoffDecomposition { terms })
}

/// Perfect matching on the positive entries of `r` maximizing the minimum
/// matched entry, or `None` if the positive support has no perfect matching.
fn bottleneck_matching<T: Real>(r: &[Vec<T>]) -> Option<Vec<usize>> {
    let mut levels: Vec<T> = r
        .iter()
        .flatten()
        .copied()
        .filter(|&v| v > T::zero())
        .collect();
    levels.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    levels.dedup();
    // feasibility is monotone in the threshold
    let mut best = perfect_matching(r, *levels.first()?)?;
    let (mut lo, mut hi) = (0usize, levels.len());
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        match perfect_matching(r, levels[mid]) {
            Some(m) => {
                best = m;
                lo = mid;
            }
            None => hi = mid,
        }
    }
    Some(best)
}

/// Kuhn's augmenting-path matching of rows to columns on `{r[i][j] ≥ thr}`.
fn perfect_matching<T: Real>(r: &[Vec<T>], thr: T) -> Option<Vec<usize>> {
    let n = r.len();
    let mut col_owner: Vec<Option<usize>> = vec![None; n];

    fn augment<T: Real>(
        row: usize,
        r: &[Vec<T>],
        thr: T,
        seen: &mut [bool],
        col_owner: &mut [Option<usize>],
    ) -> bool {
        for col in 0..r.len() {
            if r[row][col] >= thr && !seen[col] {
                seen[col] = true;
                let free = match col_owner[col] {
                    None => true,
                    Some(other) => augment(other, r, thr, seen, col_owner),
                };
                if free {
                    col_owner[col] = Some(row);
                    return true;
                }
            }
        }
        false
    }

    for row in 0..n {
        let mut seen = vec![false; n];
        if !augment(row, r, thr, &mut seen, &mut col_owner) {
            return None;
        }
    }
    let mut perm = vec![0; n];
    for (col, owner) in col_owner.iter().enumerate() {
        perm[owner.expect("perfect matching")] = col;
    }
    Some(perm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn permutation_is_single_term() {
        let p = Matrix::<f64>::permutation(&[1, 2, 0]);
        let b = birkhoff_decompose(&p).unwrap();
        assert_eq!(b.terms, vec![(1.0, vec![1, 2, 0])]);
    }

    #[test]
    fn uniform_two_by_two() {
        let d = Matrix::<f64>::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]]).unwrap();
        let mut b = birkhoff_decompose(&d).unwrap();
        b.terms.sort_by(|a, c| a.1.cmp(&c.1));
        assert_eq!(b.terms, vec![(0.5, vec![0, 1]), (0.5, vec![1, 0])]);
    }

    #[test]
    fn random_four_by_four() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let d: Matrix<f64> = random::random_doubly_stochastic(&mut rng, 4, 6);
            let b = birkhoff_decompose(&d).unwrap();
            assert!(b.len() <= 10);
            assert!(b.reconstruct(4).max_abs_diff(&d) < 1e-10);
            assert!((b.total_weight() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn rejects_non_stochastic() {
        let d = Matrix::<f64>::from_real_rows(&[&[0.7, 0.5], &[0.3, 0.5]]).unwrap();
        assert!(matches!(
            birkhoff_decompose(&d),
            Err(Error::NotDoublyStochastic { .. })
        ));
        assert!(matches!(
            birkhoff_decompose(&Matrix::<f64>::zeros(2, 3)),
            Err(Error::NotSquare { .. })
        ));
    }

    #[test]
    fn matching_detects_missing_support() {
        let r = vec![
            vec![1.0, 1.0, 0.0],
            vec![1.0, 1.0, 0.0],
            vec![1.0, 1.0, 0.0],
        ];
        assert!(perfect_matching(&r, 0.5).is_none());
    }

    proptest! {
        #[test]
        fn reconstruction_and_bound(seed in any::<u64>(), n in 1usize..=8, terms in 1usize..=20) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let d: Matrix<f64> = random::random_doubly_stochastic(&mut rng, n, terms);
            let b = birkhoff_decompose(&d).unwrap();
            prop_assert!(b.len() <= BirkhoffDecomposition::<f64>::term_bound(n));
            prop_assert!(b.reconstruct(n).max_abs_diff(&d) < 1e-10);
            prop_assert!(b.terms.iter().all(|(w, _)| *w >= 0.0));
        }
    }
}
