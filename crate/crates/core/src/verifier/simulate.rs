use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::protocol::Protocol;
use crate::scalar::Real;
use crate::states::BipartiteState;

/// Aggregate outcome of a Monte-Carlo run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationResult {
    pub trials: u64,
    pub seed: u64,
    /// Stage-one outcome counts; key 0 is the completion outcome `M₀`.
    pub outcome_counts: BTreeMap<usize, u64>,
    pub success_count: u64,
    pub empirical_p: f64,
}

/// Outcome weights on the source state and conditional tail success rates.
struct Table {
    cumulative: Vec<f64>,
    success: Vec<f64>,
}

fn table<T: Real>(protocol: &Protocol<T>, a: &BipartiteState<T>) -> Result<Table> {
    let (n, m) = (protocol.m0.rows(), protocol.intermediate.dim_b());
    if a.dim_a() > n || a.dim_b() > m {
        return Err(Error::DimensionMismatch(format!(
            "state is {}x{}, protocol acts on {n}x{m}",
            a.dim_a(),
            a.dim_b()
        )));
    }
    let a = a.matrix().embed(n, m);
    let mut weights = vec![(&protocol.m0 * &a).frobenius_norm().powi(2).as_f64()];
    let mut success = vec![0.0];
    for e in &protocol.stage1 {
        let out = &(&e.m * &a) * &e.u.transpose();
        let w = out.frobenius_norm().powi(2).as_f64();
        weights.push(w);
        success.push(match &protocol.stage2 {
            None => 1.0,
            Some(t) if w > 0.0 => {
                let fin = &(&t.n * &out) * &t.v.transpose();
                (fin.frobenius_norm().powi(2).as_f64() / w).min(1.0)
            }
            Some(_) => 0.0,
        });
    }
    let total: f64 = weights.iter().sum();
    if !total.is_finite() || total <= 0.0 {
        return Err(Error::Numerical(
            "protocol annihilates the source state".into(),
        ));
    }
    let cumulative = weights
        .iter()
        .scan(0.0, |acc, w| {
            *acc += w / total;
            Some(*acc)
        })
        .collect();
    Ok(Table {
        cumulative,
        success,
    })
}

/// One trial draws from its own stream `(seed, trial)`, so the aggregate does
/// not depend on how trials are split.
fn run_trial(t: &Table, seed: u64, trial: u64) -> (usize, bool) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    let u: f64 = rng.random();
    let k = t
        .cumulative
        .iter()
        .position(|&c| u < c)
        .unwrap_or(t.cumulative.len() - 1);
    let v: f64 = rng.random();
    (k, k > 0 && v < t.success[k])
}

fn run_range(t: &Table, seed: u64, range: std::ops::Range<u64>) -> (BTreeMap<usize, u64>, u64) {
    let mut counts = BTreeMap::new();
    let mut successes = 0;
    for trial in range {
        let (k, ok) = run_trial(t, seed, trial);
        *counts.entry(k).or_insert(0) += 1;
        successes += u64::from(ok);
    }
    (counts, successes)
}

fn finish(
    trials: u64,
    seed: u64,
    outcome_counts: BTreeMap<usize, u64>,
    success_count: u64,
) -> SimulationResult {
    SimulationResult {
        trials,
        seed,
        outcome_counts,
        success_count,
        empirical_p: if trials == 0 {
            0.0
        } else {
            success_count as f64 / trials as f64
        },
    }
}

/// Samples the protocol `trials` times on `a`: first the stage-one outcome
/// with probability `‖M_λ a U_λᵀ‖₂²`, then the tail's success branch with its
/// conditional weight.
pub fn simulate<T: Real>(
    protocol: &Protocol<T>,
    a: &BipartiteState<T>,
    trials: u64,
    seed: u64,
) -> Result<SimulationResult> {
    let t = table(protocol, a)?;
    let (counts, successes) = run_range(&t, seed, 0..trials);
    Ok(finish(trials, seed, counts, successes))
}

/// Same as [`simulate`], with trials split into contiguous blocks over
/// `workers` threads. The result is identical for every worker count.
pub fn simulate_parallel<T: Real>(
    protocol: &Protocol<T>,
    a: &BipartiteState<T>,
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<SimulationResult> {
    let t = table(protocol, a)?;
    let workers = workers.max(1) as u64;
    let chunk = trials.div_ceil(workers);
    let parts: Vec<_> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let lo = (w * chunk).min(trials);
                let hi = ((w + 1) * chunk).min(trials);
                let t = &t;
                s.spawn(move || run_range(t, seed, lo..hi))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker panicked"))
            .collect()
    });
    let mut counts = BTreeMap::new();
    let mut successes = 0;
    for (c, k) in parts {
        for (outcome, n) in c {
            *counts.entry(outcome).or_insert(0) += n;
        }
        successes += k;
    }
    Ok(finish(trials, seed, counts, successes))
}
