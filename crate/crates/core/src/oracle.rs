//! Independent checks for the field-value solver: plain value iteration and
//! Monte Carlo simulation of the absorbing chain.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field_value::{FieldValues, StochasticMatrix};

/// Steps after which a random walk is abandoned.
pub const WALK_STEP_CAP: usize = 1_000_000;

/// Iterates `v <- P_tt v + P_tτ b` from `v = 0` until the largest change drops
/// below `tol`. Returns the values and the number of sweeps.
pub fn value_iteration(
    p: &StochasticMatrix,
    tol: f64,
    cap: usize,
) -> Result<(FieldValues, usize)> {
    let n = p.n_transient();
    let mut v = vec![0.0f64; n];
    let mut next = vec![0.0f64; n];
    for sweep in 1..=cap {
        let mut change = 0.0f64;
        for i in 0..n {
            let mut acc = 0.0;
            for &(j, w) in p.row(i) {
                acc += w * match p.terminal_value(j) {
                    Some(b) => b,
                    None => v[j],
                };
            }
            next[i] = acc;
            change = change.max((acc - v[i]).abs());
        }
        core::mem::swap(&mut v, &mut next);
        if change < tol {
            return Ok((
                FieldValues {
                    c: p.c(),
                    values: v,
                    shot_value: p.shot_value(),
                    dangling: p.dangling().to_vec(),
                },
                sweep,
            ));
        }
    }
    Err(Error::NonConvergence {
        iterations: cap,
        change: f64::NAN,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub walks: usize,
}

/// Mean terminal payoff of `n_walks` random walks from `start`. Walk `k` uses
/// its own stream `(seed, k)`, so results do not depend on evaluation order.
/// Dangling states end a walk with payoff 0.
pub fn monte_carlo_value(
    p: &StochasticMatrix,
    start: usize,
    n_walks: usize,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    monte_carlo_value_capped(p, start, n_walks, seed, WALK_STEP_CAP)
}

pub fn monte_carlo_value_capped(
    p: &StochasticMatrix,
    start: usize,
    n_walks: usize,
    seed: u64,
    step_cap: usize,
) -> Result<MonteCarloEstimate> {
    if n_walks == 0 {
        return Err(Error::EmptyInput("monte carlo needs at least one walk"));
    }
    let mut sum = 0.0f64;
    let mut sum_sq = 0.0f64;
    let mut capped = 0usize;
    let mut completed = 0usize;
    for walk in 0..n_walks {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(walk as u64);
        match walk_payoff(p, start, &mut rng, step_cap) {
            Some(payoff) => {
                sum += payoff;
                sum_sq += payoff * payoff;
                completed += 1;
            }
            None => capped += 1,
        }
    }
    if capped * 100 > n_walks {
        return Err(Error::UnreliableMonteCarlo {
            capped,
            walks: n_walks,
        });
    }
    let n = completed as f64;
    let mean = sum / n;
    let variance = if completed > 1 {
        ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    Ok(MonteCarloEstimate {
        mean,
        std_error: libm::sqrt(variance / n),
        walks: completed,
    })
}

fn walk_payoff(p: &StochasticMatrix, start: usize, rng: &mut ChaCha8Rng, cap: usize) -> Option<f64> {
    let mut state = start;
    for _ in 0..cap {
        if let Some(b) = p.terminal_value(state) {
            return Some(b);
        }
        let row = p.row(state);
        let Some(&(last, _)) = row.last() else {
            return Some(0.0);
        };
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut next = last;
        for &(j, w) in row {
            acc += w;
            if u < acc {
                next = j;
                break;
            }
        }
        state = next;
    }
    p.terminal_value(state)
}

/// A random absorbing system over `c` clusters: every transient state moves to
/// one to three transient states and always has some mass on a terminal, so
/// nothing is trapped.
pub fn random_absorbing_system(c: usize, shot_value: f64, seed: u64) -> Result<StochasticMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows = (0..2 * c).map(|_| random_row(c, &mut rng)).collect();
    StochasticMatrix::from_rows(c, rows, shot_value)
}

/// Like [`random_absorbing_system`], but the opponent half is the own half with
/// the roles swapped: own and opponent clusters trade places and every
/// terminal becomes its conceded counterpart. Its values satisfy
/// `v(c + k) = -v(k)`.
pub fn mirrored_absorbing_system(c: usize, shot_value: f64, seed: u64) -> Result<StochasticMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let own: Vec<Vec<(usize, f64)>> = (0..c).map(|_| random_row(c, &mut rng)).collect();
    let swap = |j: usize| match j {
        j if j < c => j + c,
        j if j < 2 * c => j - c,
        t => 2 * c + ((t - 2 * c) ^ 2),
    };
    let opp: Vec<Vec<(usize, f64)>> = own
        .iter()
        .map(|row| row.iter().map(|&(j, w)| (swap(j), w)).collect())
        .collect();
    StochasticMatrix::from_rows(c, own.into_iter().chain(opp).collect(), shot_value)
}

fn random_row(c: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, f64)> {
    let mut row: Vec<(usize, f64)> = (0..rng.random_range(1..=3))
        .map(|_| (rng.random_range(0..2 * c), rng.random_range(0.1..1.0)))
        .collect();
    row.push((2 * c + rng.random_range(0..4), rng.random_range(0.05..0.5)));
    let total: f64 = row.iter().map(|e| e.1).sum();
    for e in &mut row {
        e.1 /= total;
    }
    row
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    fn hand_system() -> StochasticMatrix {
        StochasticMatrix::from_rows(1, vec![vec![(3, 0.5), (1, 0.5)], vec![(5, 1.0)]], 0.7).unwrap()
    }

    #[test]
    fn value_iteration_hand_instance() {
        let (fv, sweeps) = value_iteration(&hand_system(), 1e-13, 1000).unwrap();
        assert!(fv.own(0).abs() < 1e-12);
        assert!((fv.opp(0) + 0.7).abs() < 1e-12);
        assert!(sweeps <= 4);
    }

    #[test]
    fn all_dangling_converges_immediately() {
        let p = StochasticMatrix::from_rows(2, vec![Vec::new(); 4], 0.7).unwrap();
        let (fv, sweeps) = value_iteration(&p, 1e-12, 10).unwrap();
        assert_eq!(sweeps, 1);
        assert!(fv.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn value_iteration_cap() {
        let p = StochasticMatrix::from_rows(1, vec![vec![(1, 1.0)], vec![(0, 0.999), (4, 0.001)]], 0.7)
            .unwrap();
        assert!(matches!(
            value_iteration(&p, 1e-14, 5),
            Err(Error::NonConvergence { .. })
        ));
    }

    #[test]
    fn deterministic_goal_walk() {
        let p = StochasticMatrix::from_rows(1, vec![vec![(2, 1.0)], vec![(4, 1.0)]], 0.7).unwrap();
        let est = monte_carlo_value(&p, 0, 1000, 3).unwrap();
        assert_eq!(est.mean, 1.0);
        assert_eq!(est.std_error, 0.0);
    }

    #[test]
    fn coin_flip_walk() {
        let p = StochasticMatrix::from_rows(1, vec![vec![(2, 0.5), (4, 0.5)], vec![]], 0.7).unwrap();
        let est = monte_carlo_value(&p, 0, 100_000, 11).unwrap();
        // binomial: stderr ≈ 1 / sqrt(n)
        assert!((est.std_error - 1.0 / libm::sqrt(100_000.0)).abs() < 1e-4);
        assert!(est.mean.abs() < 3.0 * est.std_error);
    }

    #[test]
    fn capped_walks_are_an_error() {
        let p = StochasticMatrix::from_rows(1, vec![vec![(1, 1.0)], vec![(0, 1.0)]], 0.7).unwrap();
        assert_eq!(
            monte_carlo_value_capped(&p, 0, 10, 0, 100),
            Err(Error::UnreliableMonteCarlo {
                capped: 10,
                walks: 10
            })
        );
    }

    #[test]
    fn mirrored_system_is_antisymmetric() {
        let p = mirrored_absorbing_system(5, 0.7, 4).unwrap();
        let (fv, _) = value_iteration(&p, 1e-14, 100_000).unwrap();
        for k in 0..5 {
            assert!((fv.own(k) + fv.opp(k)).abs() < 1e-12);
        }
    }

    #[test]
    fn random_systems_have_no_dangling_rows() {
        for seed in 0..20 {
            let p = random_absorbing_system(3, 0.7, seed).unwrap();
            assert!(p.dangling().iter().all(|&d| !d));
        }
    }

    #[test]
    fn walks_are_reproducible() {
        let p = hand_system();
        assert_eq!(
            monte_carlo_value(&p, 0, 500, 9).unwrap(),
            monte_carlo_value(&p, 0, 500, 9).unwrap()
        );
    }
}
