//! Singular value decomposition by one-sided (Hestenes) Jacobi rotations.
//!
//! Factors are returned in the `O = X Σ Y` convention: `X` and `Y` are both
//! unitary and `Y` multiplies from the right without an adjoint, so the usual
//! `V†` is stored directly as `y`.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{c, czero, Real, C};

/// `m = x · diag_rect(sigma) · y` with singular values sorted nonincreasing.
#[derive(Debug, Clone)]
pub struct Svd<T> {
    /// Left unitary factor, `rows x rows`.
    pub x: Matrix<T>,
    /// Singular values, length `min(rows, cols)`, nonincreasing.
    pub sigma: Vec<T>,
    /// Right unitary factor, `cols x cols`.
    pub y: Matrix<T>,
}

impl<T: Real> Svd<T> {
    /// The rectangular diagonal factor `Σ`.
    pub fn sigma_matrix(&self) -> Matrix<T> {
        Matrix::diag_rect(self.x.rows(), self.y.rows(), &self.sigma)
    }

    pub fn reconstruct(&self) -> Matrix<T> {
        &(&self.x * &self.sigma_matrix()) * &self.y
    }

    /// Number of singular values above `threshold`.
    pub fn rank(&self, threshold: T) -> usize {
        self.sigma.iter().filter(|&&s| s > threshold).count()
    }
}

/// Sweep cap per matrix dimension.
const SWEEPS_PER_DIM: usize = 100;

/// Computes the SVD of `m`.
///
/// Fails only on non-finite input or when the Jacobi sweeps do not converge
/// within `100 · max(rows, cols)` sweeps.
pub fn svd<T: Real>(m: &Matrix<T>) -> Result<Svd<T>> {
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    if m.rows() >= m.cols() {
        let (u, sigma, v) = one_sided_jacobi(m)?;
        Ok(Svd {
            x: u,
            sigma,
            y: v.adjoint(),
        })
    } else {
        // m† = U Σ V†  =>  m = V Σᵀ U†
        let (u, sigma, v) = one_sided_jacobi(&m.adjoint())?;
        Ok(Svd {
            x: v,
            sigma,
            y: u.adjoint(),
        })
    }
}

/// Tall case (`rows >= cols`): returns full unitary `U`, singular values, and `V`
/// with `a = U Σ V†`.
fn one_sided_jacobi<T: Real>(a: &Matrix<T>) -> Result<(Matrix<T>, Vec<T>, Matrix<T>)> {
    let rows = a.rows();
    let n = a.cols();
    let mut work: Vec<Vec<C<T>>> = (0..n).map(|j| a.column(j)).collect();
    let mut v: Vec<Vec<C<T>>> = (0..n)
        .map(|j| {
            (0..n)
                .map(|i| if i == j { c(T::one()) } else { czero() })
                .collect()
        })
        .collect();

    let eps = T::epsilon();
    // columns below this norm are numerically zero and dropped from `U` later
    let floor = {
        let f = a.frobenius_norm() * eps;
        f * f
    };
    let max_sweeps = SWEEPS_PER_DIM * rows.max(n);
    let mut converged = n < 2;
    for _ in 0..max_sweeps {
        if converged {
            break;
        }
        let mut rotated = false;
        for i in 0..n - 1 {
            for j in i + 1..n {
                let alpha: T = work[i].iter().map(|z| z.norm_sqr()).sum();
                let beta: T = work[j].iter().map(|z| z.norm_sqr()).sum();
                let gamma = work[i]
                    .iter()
                    .zip(&work[j])
                    .fold(czero::<T>(), |acc, (p, q)| acc + p.conj() * q);
                let g = gamma.norm();
                if g == T::zero() || g <= eps * (alpha * beta).sqrt() || alpha.min(beta) <= floor {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let two = T::lit(2.0);
                let zeta = (beta - alpha) / (two * g);
                let sign = if zeta >= T::zero() {
                    T::one()
                } else {
                    -T::one()
                };
                let t = sign / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let cs = T::one() / (T::one() + t * t).sqrt();
                let sn = cs * t;
                rotate(&mut work, i, j, cs, sn, phase);
                rotate(&mut v, i, j, cs, sn, phase);
            }
        }
        if !rotated {
            converged = true;
        }
    }
    if !converged {
        return Err(Error::SvdNoConvergence { sweeps: max_sweeps });
    }

    let norms: Vec<T> = work
        .iter()
        .map(|col| col.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    // stable: equal singular values keep their column order
    order.sort_by(|&p, &q| norms[q].partial_cmp(&norms[p]).expect("finite norms"));

    let sigma: Vec<T> = order.iter().map(|&k| norms[k]).collect();
    let smax = sigma.first().copied().unwrap_or_else(T::zero);
    let negligible = smax * eps * T::lit(rows.max(n) as f64);

    let mut basis: Vec<Vec<C<T>>> = Vec::with_capacity(rows);
    for (&k, &s) in order.iter().zip(&sigma) {
        if s > negligible && s > T::min_positive_value() {
            basis.push(work[k].iter().map(|&z| z / s).collect());
        } else {
            break;
        }
    }
    let kept = basis.len();
    complete_basis(&mut basis, rows);

    let mut u = Matrix::zeros(rows, rows);
    for (j, col) in basis.iter().enumerate() {
        u.set_column(j, col);
    }
    let mut vm = Matrix::zeros(n, n);
    for (j, &k) in order.iter().enumerate() {
        vm.set_column(j, &v[k]);
    }
    debug_assert!(kept <= n);
    Ok((u, sigma, vm))
}

/// `[a_i, a_j] <- [a_i, a_j] · [[c, s·w], [-s·w̄, c]]` with `w` a unit phase.
fn rotate<T: Real>(cols: &mut [Vec<C<T>>], i: usize, j: usize, cs: T, sn: T, w: C<T>) {
    let (left, right) = cols.split_at_mut(j);
    let ci = &mut left[i];
    let cj = &mut right[0];
    let wc = w.conj();
    for (p, q) in ci.iter_mut().zip(cj.iter_mut()) {
        let a = *p;
        let b = *q;
        *p = a * cs - b * wc * sn;
        *q = a * w * sn + b * cs;
    }
}

/// Extends an orthonormal set in `C^dim` to a full basis by Gram-Schmidt on
/// the standard basis, always taking the candidate with the largest residual.
pub(crate) fn complete_basis<T: Real>(basis: &mut Vec<Vec<C<T>>>, dim: usize) {
    while basis.len() < dim {
        let mut best: Option<(T, Vec<C<T>>)> = None;
        for e in 0..dim {
            let mut r: Vec<C<T>> = (0..dim)
                .map(|i| if i == e { c(T::one()) } else { czero() })
                .collect();
            // twice is enough
            for _ in 0..2 {
                for b in basis.iter() {
                    let proj = b
                        .iter()
                        .zip(&r)
                        .fold(czero::<T>(), |acc, (x, y)| acc + x.conj() * y);
                    for (ri, bi) in r.iter_mut().zip(b) {
                        *ri = *ri - proj * bi;
                    }
                }
            }
            let norm = r.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
            if best.as_ref().is_none_or(|(bn, _)| norm > *bn) {
                best = Some((norm, r));
            }
        }
        let (norm, r) = best.expect("dim > 0");
        basis.push(r.into_iter().map(|z| z / norm).collect());
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{is_unitary, operator_norm};
    use crate::random;
    use num_complex::Complex;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn check(m: &Matrix<f64>) -> Svd<f64> {
        let f = svd(m).unwrap();
        assert!(is_unitary(&f.x, 1e-12), "x not unitary");
        assert!(is_unitary(&f.y, 1e-12), "y not unitary");
        assert!(f.sigma.windows(2).all(|w| w[0] >= w[1]));
        assert!(f.sigma.iter().all(|&s| s >= 0.0));
        let err = (&f.reconstruct() - m).frobenius_norm();
        assert!(
            err <= 1e-10 * f64::max(1.0, m.frobenius_norm()),
            "reconstruction {err}"
        );
        f
    }

    #[test]
    fn identity() {
        let f = check(&Matrix::identity(2));
        assert_eq!(f.sigma, vec![1.0, 1.0]);
        assert!(f.x.max_abs_diff(&Matrix::identity(2)) < 1e-15);
    }

    #[test]
    fn diagonal_is_reordered() {
        let f = check(&Matrix::diag(&[3.0, 4.0]));
        assert!((f.sigma[0] - 4.0).abs() < 1e-14 && (f.sigma[1] - 3.0).abs() < 1e-14);
    }

    /// Singular values as square roots of the eigenvalues of `m†m`, from an
    /// independent Jacobi eigenvalue iteration on the Hermitian Gram matrix.
    fn gram_eigen_oracle(m: &Matrix<f64>) -> Vec<f64> {
        let g = &m.adjoint() * m;
        let n = g.rows();
        // embed the Hermitian n×n matrix as a real symmetric 2n×2n [[Re, -Im], [Im, Re]]
        let mut r = vec![vec![0.0; 2 * n]; 2 * n];
        for i in 0..n {
            for j in 0..n {
                let z = g[(i, j)];
                r[i][j] = z.re;
                r[i + n][j + n] = z.re;
                r[i][j + n] = -z.im;
                r[i + n][j] = z.im;
            }
        }
        let d = 2 * n;
        for _ in 0..200 {
            let off: f64 = (0..d)
                .flat_map(|i| (0..d).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| r[i][j] * r[i][j])
                .sum();
            if off < 1e-30 {
                break;
            }
            for p in 0..d {
                for q in p + 1..d {
                    if r[p][q].abs() < 1e-300 {
                        continue;
                    }
                    let theta = (r[q][q] - r[p][p]) / (2.0 * r[p][q]);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let cs = 1.0 / (t * t + 1.0).sqrt();
                    let sn = t * cs;
                    for row in r.iter_mut() {
                        let (a, b) = (row[p], row[q]);
                        row[p] = cs * a - sn * b;
                        row[q] = sn * a + cs * b;
                    }
                    let (rp, rq) = (r[p].clone(), r[q].clone());
                    for (k, (a, b)) in rp.into_iter().zip(rq).enumerate() {
                        r[p][k] = cs * a - sn * b;
                        r[q][k] = sn * a + cs * b;
                    }
                }
            }
        }
        // every eigenvalue appears twice in the real embedding
        let mut ev: Vec<f64> = (0..d).map(|i| r[i][i].max(0.0)).collect();
        ev.sort_by(|a, b| b.partial_cmp(a).unwrap());
        ev.iter().step_by(2).map(|x| x.sqrt()).collect()
    }

    #[test]
    fn random_tall_matches_eigen_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let m = random::gaussian_matrix(&mut rng, 5, 3);
            let f = check(&m);
            let oracle = gram_eigen_oracle(&m);
            for (s, o) in f.sigma.iter().zip(&oracle) {
                assert!((s - o).abs() < 1e-10, "{s} vs {o}");
            }
        }
    }

    #[test]
    fn wide_and_rank_deficient() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let m = random::gaussian_matrix(&mut rng, 2, 6);
            check(&m);
            let l = random::gaussian_matrix(&mut rng, 5, 2);
            let r = random::gaussian_matrix(&mut rng, 2, 4);
            let f = check(&(&l * &r));
            assert!(f.sigma[2] < 1e-12 * f.sigma[0]);
        }
        let f = check(&Matrix::zeros(3, 2));
        assert_eq!(f.sigma, vec![0.0, 0.0]);
    }

    #[test]
    fn sigma_invariant_under_transpose_and_adjoint() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let m: Matrix<f64> = random::gaussian_matrix(&mut rng, 4, 3);
            let s = svd(&m).unwrap().sigma;
            let st = svd(&m.transpose()).unwrap().sigma;
            let sa = svd(&m.adjoint()).unwrap().sigma;
            for k in 0..3 {
                assert!((s[k] - st[k]).abs() < 1e-10 && (s[k] - sa[k]).abs() < 1e-10);
            }
            assert!(operator_norm(&m).unwrap() <= m.frobenius_norm() + 1e-12);
        }
    }

    #[test]
    fn degenerate_singular_values() {
        // unitary times 2: all singular values equal
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u = random::haar_unitary::<f64, _>(&mut rng, 4);
        let f = check(&u.scale(2.0));
        assert!(f.sigma.iter().all(|&s| (s - 2.0).abs() < 1e-12));
    }

    #[test]
    fn single_precision_scalar() {
        let m = Matrix::<f32>::from_rows(&[
            vec![Complex::new(1.0, 0.5), Complex::new(0.0, 2.0)],
            vec![Complex::new(-1.0, 0.0), Complex::new(0.25, 0.0)],
            vec![Complex::new(0.0, 0.0), Complex::new(3.0, -1.0)],
        ])
        .unwrap();
        let f = svd(&m).unwrap();
        assert!((&f.reconstruct() - &m).frobenius_norm() < 1e-5);
        assert!(is_unitary(&f.x, 1e-5) && is_unitary(&f.y, 1e-5));
    }

    #[test]
    fn deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let m: Matrix<f64> = random::gaussian_matrix(&mut rng, 4, 4);
        let a = svd(&m).unwrap();
        let b = svd(&m).unwrap();
        assert_eq!(a.x, b.x);
        assert_eq!(a.y, b.y);
        assert_eq!(a.sigma, b.sigma);
    }
}
