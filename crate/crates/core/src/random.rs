//! Random instance generators used by tests, benchmarks and the acceptance suite.

use num_complex::Complex;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::linalg::Matrix;
use crate::majorization::Spectrum;
use crate::scalar::Real;
use crate::states::BipartiteState;

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn gaussian_matrix<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    rows: usize,
    cols: usize,
) -> Matrix<T> {
    Matrix::from_fn(rows, cols, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex::new(T::lit(re), T::lit(im))
    })
}

/// Haar-distributed unitary: Gram-Schmidt on a Gaussian matrix, phases fixed
/// by the diagonal of the triangular factor.
pub fn haar_unitary<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize) -> Matrix<T> {
    let g: Matrix<T> = gaussian_matrix(rng, n, n);
    let mut q: Vec<Vec<Complex<T>>> = Vec::with_capacity(n);
    for j in 0..n {
        let mut v = g.column(j);
        for _ in 0..2 {
            for b in &q {
                let proj = b
                    .iter()
                    .zip(&v)
                    .fold(Complex::new(T::zero(), T::zero()), |acc, (x, y)| {
                        acc + x.conj() * y
                    });
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi = *vi - proj * bi;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        q.push(v.into_iter().map(|z| z / norm).collect());
    }
    let mut u = Matrix::zeros(n, n);
    for (j, col) in q.iter().enumerate() {
        u.set_column(j, col);
    }
    u
}

/// Random `rows x cols` matrix of exactly the given rank (almost surely).
pub fn random_rank_matrix<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    rows: usize,
    cols: usize,
    rank: usize,
) -> Matrix<T> {
    if rank == 0 {
        return Matrix::zeros(rows, cols);
    }
    let l: Matrix<T> = gaussian_matrix(rng, rows, rank);
    let r: Matrix<T> = gaussian_matrix(rng, rank, cols);
    &l * &r
}

/// Random contraction: Gaussian matrix rescaled to operator norm in `(0, 1]`.
pub fn random_contraction<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize) -> Matrix<T> {
    let g: Matrix<T> = gaussian_matrix(rng, n, n);
    let norm = crate::linalg::operator_norm(&g).expect("finite gaussian matrix");
    let target: f64 = rng.random_range(0.05..=1.0);
    g.scale(T::lit(target) / norm)
}

/// Normalized spectrum of length `n` drawn uniformly from the simplex, with the
/// last `zeros` entries forced to zero.
pub fn random_spectrum<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    zeros: usize,
) -> Spectrum<T> {
    let live = n.saturating_sub(zeros).max(1);
    let mut v: Vec<f64> = (0..live).map(|_| Exp1.sample(rng)).collect();
    let s: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= s);
    v.resize(n, 0.0);
    Spectrum::new(v.into_iter().map(T::lit).collect())
}

/// Doubly stochastic `n x n` matrix as a random convex mix of `terms` permutations.
pub fn random_doubly_stochastic<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    terms: usize,
) -> Matrix<T> {
    let mut w: Vec<f64> = (0..terms.max(1)).map(|_| Exp1.sample(rng)).collect();
    let s: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= s);
    let mut d = Matrix::zeros(n, n);
    for wk in w {
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(rng);
        d = &d + &Matrix::permutation(&perm).scale(T::lit(wk));
    }
    d
}

/// Random normalized state with Schmidt rank `rank` (clamped to `min(n, m)`).
pub fn random_state<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    m: usize,
    rank: usize,
) -> BipartiteState<T> {
    let rank = rank.clamp(1, n.min(m));
    let a: Matrix<T> = random_rank_matrix(rng, n, m, rank);
    BipartiteState::from_matrix(a).expect("nonzero random matrix")
}

/// Random state with the prescribed squared Schmidt coefficients, dressed by
/// Haar-random local unitaries.
pub fn state_with_spectrum<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    m: usize,
    spectrum: &Spectrum<T>,
) -> BipartiteState<T> {
    let sv: Vec<T> = spectrum.values().iter().map(|&x| x.sqrt()).collect();
    let ua: Matrix<T> = haar_unitary(rng, n);
    let ub: Matrix<T> = haar_unitary(rng, m);
    let a = &(&ua * &Matrix::diag_rect(n, m, &sv)) * &ub;
    BipartiteState::from_matrix(a).expect("nonzero spectrum")
}
