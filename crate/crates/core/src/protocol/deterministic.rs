use crate::error::{Error, Result};
use crate::linalg::{is_contraction, pinv, Matrix};
use crate::majorization::{birkhoff_decompose, compose_bistochastic, prec_tol, t_transform_chain};
use crate::protocol::InstrumentElement;
use crate::scalar::Real;
use crate::states::{apply_local, BipartiteState};

/// Outcomes below this probability are dropped from the instrument.
const NEGLIGIBLE_OUTCOME: f64 = 1e-12;

/// Deterministic instrument `A → Q` and the unitaries `W_λ` realizing
/// `AA† = Σ_λ q_λ W_λ† QQ† W_λ`.
#[derive(Debug, Clone)]
pub struct DeterministicInstrument<T> {
    pub elements: Vec<InstrumentElement<T>>,
    pub m0: Matrix<T>,
    /// Alice-side mixing unitaries, one per element.
    pub mixing: Vec<Matrix<T>>,
}

/// Extends a permutation of `0..perm.len()` by the identity to `0..n`.
fn extended_permutation<T: Real>(perm: &[usize], n: usize) -> Matrix<T> {
    let full: Vec<usize> = (0..n)
        .map(|l| if l < perm.len() { perm[l] } else { l })
        .collect();
    Matrix::permutation(&full)
}

/// Builds the instrument converting `A` into `Q` with certainty.
///
/// `σ²(A) = D σ²(Q)` is realized by a T-transform chain, `D = Σ q_λ Π_λ` by a
/// Birkhoff decomposition, and each permutation turns into
/// `M_λ = √q_λ · Q · U_λ* · A‡` with `U_λ* = Y_Q† Π_λᵀ Y_A` and the matching
/// Alice unitary `W_λ = X_Q Π_λᵀ X_A†`. `M₀ = I − A A‡` completes the measurement.
pub fn synth_deterministic<T: Real>(
    a: &BipartiteState<T>,
    q: &BipartiteState<T>,
    tol: T,
) -> Result<DeterministicInstrument<T>> {
    let (n, m) = (a.dim_a(), a.dim_b());
    if (q.dim_a(), q.dim_b()) != (n, m) {
        return Err(Error::DimensionMismatch(format!(
            "source is {n}x{m}, intermediate is {}x{}",
            q.dim_a(),
            q.dim_b()
        )));
    }
    let sa = a.schmidt()?;
    let sq = q.schmidt()?;
    if !prec_tol(&sa.coefficients, &sq.coefficients, tol) {
        return Err(Error::Precondition(
            "deterministic conversion requires σ²(A) ≺ σ²(Q)".into(),
        ));
    }
    if sa.rank < sq.rank {
        return Err(Error::RankViolation {
            source_rank: sa.rank,
            target_rank: sq.rank,
        });
    }

    let k = n.min(m);
    let chain = t_transform_chain(&sa.coefficients, &sq.coefficients)?;
    let d = compose_bistochastic(&chain, k);
    let mut terms = birkhoff_decompose(&d)?.terms;
    terms.retain(|(w, _)| *w >= T::lit(NEGLIGIBLE_OUTCOME));
    let total: T = terms.iter().map(|(w, _)| *w).sum();

    let a_pinv = pinv(a.matrix())?;
    let qm = q.matrix();
    let mut elements = Vec::with_capacity(terms.len());
    let mut mixing = Vec::with_capacity(terms.len());
    for (w, perm) in &terms {
        let weight = *w / total;
        let pi_m = extended_permutation::<T>(perm, m).transpose();
        let pi_n = extended_permutation::<T>(perm, n).transpose();
        let u_conj = &(&sq.local_b.adjoint() * &pi_m) * &sa.local_b;
        let mm = (&(qm * &u_conj) * &a_pinv).scale(weight.sqrt());
        mixing.push(&(&sq.local_a * &pi_n) * &sa.local_a.adjoint());
        elements.push(InstrumentElement {
            m: mm,
            u: u_conj.conj(),
            q: weight,
        });
    }
    let m0 = &Matrix::identity(n) - &(a.matrix() * &a_pinv);

    for (idx, e) in elements.iter().enumerate() {
        if !is_contraction(&e.m, tol) {
            return Err(Error::Numerical(format!(
                "instrument element {idx} is not a contraction"
            )));
        }
        let (out, w) = apply_local(&e.m, &e.u, a.matrix())?;
        let expected = qm.scale(e.q.sqrt());
        if (&out - &expected).frobenius_norm() > tol || (w - e.q).abs() > tol {
            return Err(Error::Numerical(format!(
                "instrument element {idx} does not map A onto Q"
            )));
        }
    }
    Ok(DeterministicInstrument {
        elements,
        m0,
        mixing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{is_unitary, range_projector};
    use crate::majorization::Spectrum;
    use crate::random;
    use num_complex::Complex;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn diag_state(spec: &[f64]) -> BipartiteState<f64> {
        let d: Vec<f64> = spec.iter().map(|x| x.sqrt()).collect();
        BipartiteState::from_matrix(Matrix::diag(&d)).unwrap()
    }

    fn check_instrument(
        a: &BipartiteState<f64>,
        q: &BipartiteState<f64>,
        inst: &DeterministicInstrument<f64>,
    ) {
        let n = a.dim_a();
        let mut sum = Matrix::zeros(n, n);
        for e in &inst.elements {
            assert!(is_contraction(&e.m, 1e-9));
            assert!(is_unitary(&e.u, 1e-9));
            sum = &sum + &(&e.m.adjoint() * &e.m);
        }
        let pa = range_projector(a.matrix()).unwrap();
        assert!((&sum - &pa).frobenius_norm() < 1e-9, "Σ M†M ≠ P_A");
        let total = &sum + &(&inst.m0.adjoint() * &inst.m0);
        assert!((&total - &Matrix::identity(n)).frobenius_norm() < 1e-9);
        let qsum: f64 = inst.elements.iter().map(|e| e.q).sum();
        assert!((qsum - 1.0).abs() < 1e-9);

        // AA† = Σ q W† QQ† W
        let aa = a.matrix() * &a.matrix().adjoint();
        let qq = q.matrix() * &q.matrix().adjoint();
        let mixed = inst
            .elements
            .iter()
            .zip(&inst.mixing)
            .fold(Matrix::zeros(n, n), |acc, (e, w)| {
                &acc + &(&(&w.adjoint() * &qq) * w).scale(e.q)
            });
        assert!((&mixed - &aa).frobenius_norm() < 1e-9);
    }

    #[test]
    fn identity_instrument_when_q_is_a() {
        let a = diag_state(&[0.7, 0.3]);
        let inst = synth_deterministic(&a, &a, 1e-9).unwrap();
        assert_eq!(inst.elements.len(), 1);
        assert!(inst.elements[0].m.max_abs_diff(&Matrix::identity(2)) < 1e-12);
        assert!(inst.elements[0].u.max_abs_diff(&Matrix::identity(2)) < 1e-12);
        check_instrument(&a, &a, &inst);
    }

    #[test]
    fn bell_to_eighty_twenty() {
        let bell = diag_state(&[0.5, 0.5]);
        let q = diag_state(&[0.8, 0.2]);
        let inst = synth_deterministic(&bell, &q, 1e-9).unwrap();
        assert_eq!(inst.elements.len(), 2);
        let (s8, s2) = (0.8f64.sqrt(), 0.2f64.sqrt());
        let m1 = Matrix::diag(&[s8, s2]);
        let m2 = Matrix::from_real_rows(&[&[0.0, s8], &[s2, 0.0]]).unwrap();
        let swap = Matrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        for e in &inst.elements {
            assert!((e.q - 0.5).abs() < 1e-12);
            let is_first =
                e.m.max_abs_diff(&m1) < 1e-12 && e.u.max_abs_diff(&Matrix::identity(2)) < 1e-12;
            let is_second = e.m.max_abs_diff(&m2) < 1e-12 && e.u.max_abs_diff(&swap) < 1e-12;
            assert!(is_first || is_second, "{:?}", e);
        }
        check_instrument(&bell, &q, &inst);
    }

    #[test]
    fn random_four_level() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..30 {
            let sq: Spectrum<f64> = random::random_spectrum(&mut rng, 4, 0);
            let d: Matrix<f64> = random::random_doubly_stochastic(&mut rng, 4, 5);
            let sa = Spectrum::new(
                (0..4)
                    .map(|i| (0..4).map(|k| d[(i, k)].re * sq.values()[k]).sum())
                    .collect(),
            );
            let a = random::state_with_spectrum(&mut rng, 4, 4, &sa);
            let q = random::state_with_spectrum(&mut rng, 4, 4, &sq);
            let inst = synth_deterministic(&a, &q, 1e-9).unwrap();
            assert!(inst.elements.len() <= 10);
            check_instrument(&a, &q, &inst);
        }
    }

    #[test]
    fn rectangular_and_rank_deficient() {
        let mut rng = ChaCha8Rng::seed_from_u64(78);
        for (n, m) in [(2, 4), (4, 2), (3, 5)] {
            let k = n.min(m);
            let sq: Spectrum<f64> = random::random_spectrum(&mut rng, k, 1);
            let d: Matrix<f64> = random::random_doubly_stochastic(&mut rng, k, 3);
            let sa = Spectrum::new(
                (0..k)
                    .map(|i| (0..k).map(|j| d[(i, j)].re * sq.values()[j]).sum())
                    .collect(),
            );
            let a = random::state_with_spectrum(&mut rng, n, m, &sa);
            let q = random::state_with_spectrum(&mut rng, n, m, &sq);
            let inst = synth_deterministic(&a, &q, 1e-9).unwrap();
            check_instrument(&a, &q, &inst);
        }
        // complex phases in A
        let a = BipartiteState::from_matrix(
            Matrix::from_rows(&[
                vec![Complex::new(0.3, 0.4), Complex::new(0.0, 0.1)],
                vec![Complex::new(0.2, 0.0), Complex::new(-0.5, 0.6)],
            ])
            .unwrap(),
        )
        .unwrap();
        let sa = a.spectrum().unwrap();
        let q = diag_state(&[sa.values()[0] + 0.5 * sa.values()[1], 0.5 * sa.values()[1]]);
        let inst = synth_deterministic(&a, &q, 1e-9).unwrap();
        check_instrument(&a, &q, &inst);
    }

    #[test]
    fn rejects_non_majorized_target() {
        let a = diag_state(&[0.8, 0.2]);
        let q = diag_state(&[0.5, 0.5]);
        assert!(matches!(
            synth_deterministic(&a, &q, 1e-9),
            Err(Error::Precondition(_))
        ));
    }
}
