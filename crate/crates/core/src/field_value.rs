//! Field values from the absorbing possession chain.
//!
//! With `c` clusters there are `2c` transient states: `k` is "this team has
//! the ball in its own cluster `k`" and `c + k` is "the opponent has the ball
//! in its cluster `k`". Four terminal states follow at `2c..2c+4`: goal
//! scored, shot taken, goal conceded, shot conceded, worth `+1, +s, -1, -s`.
//! A state's field value is the expected terminal payoff of a chain started
//! there, i.e. the solution of `(I - P_tt) v = P_tτ b`.

use alloc::collections::BTreeMap;
use alloc::collections::VecDeque;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::event::TeamEventSet;
use crate::partition::{
    build_partition, PartitionAssignments, PartitionConfig, PreviousIteration, TeamPartition,
};

/// Offsets of the terminal states past the `2c` transient states.
pub const GOAL: usize = 0;
pub const SHOT: usize = 1;
pub const CONCEDED_GOAL: usize = 2;
pub const CONCEDED_SHOT: usize = 3;

pub fn terminal_values(shot_value: f64) -> [f64; 4] {
    [1.0, shot_value, -1.0, -shot_value]
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValuationConfig {
    /// Payoff of taking a shot that is not a goal.
    pub shot_value: f64,
    pub partition: PartitionConfig,
    /// Bound on the ∞-norm residual of the solved system.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Largest transient system solved by dense elimination; larger ones use
    /// Gauss-Seidel iteration.
    pub direct_solve_limit: usize,
}

impl Default for ValuationConfig {
    fn default() -> Self {
        Self {
            shot_value: 0.7,
            partition: PartitionConfig::default(),
            tolerance: 1e-10,
            max_iterations: 100_000,
            direct_solve_limit: 300,
        }
    }
}

impl ValuationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.shot_value) {
            return Err(Error::InvalidConfig(format!(
                "shot value {} outside [0, 1]",
                self.shot_value
            )));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidConfig("solver tolerance must be positive".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig("solver iteration cap must be positive".into()));
        }
        self.partition.validate()
    }
}

/// Transition counts between the `2c + 4` states.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionSystem {
    c: usize,
    rows: Vec<BTreeMap<usize, f64>>,
    pub terminal_values: [f64; 4],
}

impl TransitionSystem {
    pub fn new(c: usize, shot_value: f64) -> Self {
        Self {
            c,
            rows: vec![BTreeMap::new(); 2 * c + 4],
            terminal_values: terminal_values(shot_value),
        }
    }

    pub fn c(&self) -> usize {
        self.c
    }

    pub fn n_states(&self) -> usize {
        2 * self.c + 4
    }

    pub fn terminal(&self, offset: usize) -> usize {
        2 * self.c + offset
    }

    /// Adds `count` transitions. Terminal states never have outgoing
    /// transitions.
    pub fn add(&mut self, from: usize, to: usize, count: f64) {
        assert!(from < 2 * self.c, "state {from} is terminal or out of range");
        assert!(to < self.n_states(), "state {to} out of range");
        *self.rows[from].entry(to).or_insert(0.0) += count;
    }

    pub fn count(&self, from: usize, to: usize) -> f64 {
        self.rows
            .get(from)
            .and_then(|r| r.get(&to))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.rows.iter().flat_map(|r| r.values()).sum()
    }

    /// Non-zero counts as `(row, col, count)`, row-major.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(i, r)| r.iter().map(move |(&j, &w)| (i, j, w)))
    }

    /// Adds another shard's counts into this one.
    pub fn merge(&mut self, other: &TransitionSystem) {
        assert_eq!(self.c, other.c, "cannot merge systems of different size");
        for (i, j, w) in other.entries() {
            self.add(i, j, w);
        }
    }
}

struct Side<'a> {
    passes: &'a [crate::event::PassRecord],
    pass_clusters: &'a [crate::partition::ClusterAssignment],
    shots: &'a [crate::event::ShotRecord],
    shot_clusters: &'a [usize],
    assists: &'a [Option<usize>],
    own_base: usize,
    other_base: usize,
    goal: usize,
    shot: usize,
}

fn accumulate_side(ts: &mut TransitionSystem, side: &Side<'_>) -> Result<()> {
    if side.pass_clusters.len() != side.passes.len() {
        return Err(Error::MissingAssignment {
            what: "pass",
            index: side.pass_clusters.len().min(side.passes.len()),
        });
    }
    if side.shot_clusters.len() != side.shots.len() {
        return Err(Error::MissingAssignment {
            what: "shot",
            index: side.shot_clusters.len().min(side.shots.len()),
        });
    }
    for (index, (pass, a)) in side.passes.iter().zip(side.pass_clusters).enumerate() {
        let landing = || {
            a.l_e
                .map(|l| side.other_base + l)
                .ok_or(Error::MissingLandingCluster { index })
        };
        if pass.successful {
            ts.add(side.own_base + a.c_s, side.own_base + a.c_e, 1.0);
            if pass.changes_possession() {
                ts.add(side.own_base + a.c_e, landing()?, 1.0);
            }
        } else {
            ts.add(side.own_base + a.c_s, landing()?, 1.0);
        }
    }
    for (index, (shot, &cluster)) in side.shots.iter().zip(side.shot_clusters).enumerate() {
        let terminal = if shot.is_goal { side.goal } else { side.shot };
        ts.add(side.own_base + cluster, terminal, 1.0);
        if let Some(Some(assist)) = side.assists.get(index) {
            let a = side
                .pass_clusters
                .get(*assist)
                .ok_or(Error::MissingAssignment {
                    what: "assist pass",
                    index: *assist,
                })?;
            ts.add(side.own_base + a.c_e, side.own_base + cluster, 1.0);
        }
    }
    Ok(())
}

/// Counts every transition implied by the team's and its opponents' events.
pub fn accumulate_transitions(
    assignments: &PartitionAssignments,
    events: &TeamEventSet,
    c: usize,
    shot_value: f64,
) -> Result<TransitionSystem> {
    let mut ts = TransitionSystem::new(c, shot_value);
    let own = Side {
        passes: &events.own_passes,
        pass_clusters: &assignments.own_passes,
        shots: &events.own_shots,
        shot_clusters: &assignments.own_shots,
        assists: &events.own_shot_assists,
        own_base: 0,
        other_base: c,
        goal: ts.terminal(GOAL),
        shot: ts.terminal(SHOT),
    };
    accumulate_side(&mut ts, &own)?;
    let opp = Side {
        passes: &events.opponent_passes,
        pass_clusters: &assignments.opponent_passes,
        shots: &events.opponent_shots,
        shot_clusters: &assignments.opponent_shots,
        assists: &events.opponent_shot_assists,
        own_base: c,
        other_base: 0,
        goal: ts.terminal(CONCEDED_GOAL),
        shot: ts.terminal(CONCEDED_SHOT),
    };
    accumulate_side(&mut ts, &opp)?;
    Ok(ts)
}

/// Row-stochastic transition matrix over `2c + 4` states. Rows of transient
/// states without any transition stay empty and are flagged dangling.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticMatrix {
    c: usize,
    rows: Vec<Vec<(usize, f64)>>,
    dangling: Vec<bool>,
    pub terminal_values: [f64; 4],
}

impl StochasticMatrix {
    /// Builds a matrix from explicit transient rows (`2c` of them, columns
    /// sorted or not). Every row must sum to 0 or 1.
    pub fn from_rows(c: usize, rows: Vec<Vec<(usize, f64)>>, shot_value: f64) -> Result<Self> {
        if rows.len() != 2 * c {
            return Err(Error::Validation(format!(
                "expected {} transient rows, got {}",
                2 * c,
                rows.len()
            )));
        }
        let n = 2 * c + 4;
        let mut clean = Vec::with_capacity(n);
        let mut dangling = Vec::with_capacity(2 * c);
        for (i, row) in rows.into_iter().enumerate() {
            let mut merged: BTreeMap<usize, f64> = BTreeMap::new();
            for (j, w) in row {
                if j >= n || !(w >= 0.0) {
                    return Err(Error::Validation(format!(
                        "row {i}: invalid entry ({j}, {w})"
                    )));
                }
                if w > 0.0 {
                    *merged.entry(j).or_insert(0.0) += w;
                }
            }
            let sum: f64 = merged.values().sum();
            if !merged.is_empty() && (sum - 1.0).abs() > 1e-9 {
                return Err(Error::Validation(format!("row {i} sums to {sum}")));
            }
            dangling.push(merged.is_empty());
            clean.push(merged.into_iter().collect());
        }
        clean.resize(n, Vec::new());
        Ok(Self {
            c,
            rows: clean,
            dangling,
            terminal_values: terminal_values(shot_value),
        })
    }

    pub fn c(&self) -> usize {
        self.c
    }

    pub fn n_states(&self) -> usize {
        2 * self.c + 4
    }

    pub fn n_transient(&self) -> usize {
        2 * self.c
    }

    pub fn row(&self, state: usize) -> &[(usize, f64)] {
        &self.rows[state]
    }

    pub fn is_dangling(&self, state: usize) -> bool {
        self.dangling.get(state).copied().unwrap_or(false)
    }

    pub fn dangling(&self) -> &[bool] {
        &self.dangling
    }

    pub fn shot_value(&self) -> f64 {
        self.terminal_values[SHOT]
    }

    /// Payoff of a terminal state, `None` for transient states.
    pub fn terminal_value(&self, state: usize) -> Option<f64> {
        state
            .checked_sub(self.n_transient())
            .and_then(|k| self.terminal_values.get(k).copied())
    }
}

/// Divides every row by its total.
pub fn normalize_rows(ts: &TransitionSystem) -> StochasticMatrix {
    let n = ts.n_states();
    let mut rows = Vec::with_capacity(n);
    let mut dangling = Vec::with_capacity(2 * ts.c);
    for (i, row) in ts.rows.iter().enumerate() {
        let total: f64 = row.values().sum();
        if total > 0.0 {
            rows.push(row.iter().map(|(&j, &w)| (j, w / total)).collect());
        } else {
            rows.push(Vec::new());
        }
        if i < 2 * ts.c {
            dangling.push(!(total > 0.0));
        }
    }
    StochasticMatrix {
        c: ts.c,
        rows,
        dangling,
        terminal_values: ts.terminal_values,
    }
}

/// Solved value of each of the `2c` transient states.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldValues {
    pub c: usize,
    pub values: Vec<f64>,
    pub shot_value: f64,
    pub dangling: Vec<bool>,
}

impl FieldValues {
    /// Value of having the ball in own cluster `k`.
    pub fn own(&self, k: usize) -> f64 {
        self.values[k]
    }

    /// Value (for this team) of the opponent having the ball in its cluster
    /// `k`.
    pub fn opp(&self, k: usize) -> f64 {
        self.values[self.c + k]
    }

    pub fn get(&self, state: usize) -> f64 {
        self.values[state]
    }

    pub fn own_values(&self) -> &[f64] {
        &self.values[..self.c]
    }

    pub fn opp_values(&self) -> &[f64] {
        &self.values[self.c..]
    }
}

/// Expected payoff of absorbing into a terminal in one step, per transient
/// state.
fn terminal_reward(p: &StochasticMatrix) -> Vec<f64> {
    let n = p.n_transient();
    (0..n)
        .map(|i| {
            p.row(i)
                .iter()
                .filter(|&&(j, _)| j >= n)
                .map(|&(j, w)| w * p.terminal_values[j - n])
                .sum()
        })
        .collect()
}

/// Transient states from which no terminal or dangling state is reachable.
fn trapped_states(p: &StochasticMatrix) -> Vec<usize> {
    let n = p.n_transient();
    let mut incoming: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut reaches = vec![false; n];
    let mut queue = VecDeque::new();
    for i in 0..n {
        let exits = p.is_dangling(i) || p.row(i).iter().any(|&(j, _)| j >= n);
        if exits {
            reaches[i] = true;
            queue.push_back(i);
        }
        for &(j, _) in p.row(i) {
            if j < n {
                incoming[j].push(i);
            }
        }
    }
    while let Some(j) = queue.pop_front() {
        for &i in &incoming[j] {
            if !reaches[i] {
                reaches[i] = true;
                queue.push_back(i);
            }
        }
    }
    (0..n).filter(|&i| !reaches[i]).collect()
}

/// `‖v - P_tt v - r‖∞` over the non-dangling states.
pub fn residual(p: &StochasticMatrix, values: &[f64]) -> f64 {
    let n = p.n_transient();
    let r = terminal_reward(p);
    (0..n)
        .filter(|&i| !p.is_dangling(i))
        .map(|i| {
            let flow: f64 = p
                .row(i)
                .iter()
                .filter(|&&(j, _)| j < n)
                .map(|&(j, w)| w * values[j])
                .sum();
            (values[i] - flow - r[i]).abs()
        })
        .fold(0.0, f64::max)
}

fn solve_dense(p: &StochasticMatrix, r: &[f64], active: &[usize]) -> Result<Vec<f64>> {
    let n = p.n_transient();
    let m = active.len();
    let mut index = vec![usize::MAX; n];
    for (k, &i) in active.iter().enumerate() {
        index[i] = k;
    }
    // augmented matrix [I - P_tt | r], row-major with stride m + 1
    let stride = m + 1;
    let mut a = vec![0.0f64; m * stride];
    for (k, &i) in active.iter().enumerate() {
        a[k * stride + k] = 1.0;
        for &(j, w) in p.row(i) {
            if j < n && index[j] != usize::MAX {
                a[k * stride + index[j]] -= w;
            }
        }
        a[k * stride + m] = r[i];
    }
    for col in 0..m {
        let pivot = (col..m)
            .max_by(|&x, &y| a[x * stride + col].abs().total_cmp(&a[y * stride + col].abs()))
            .unwrap();
        if a[pivot * stride + col].abs() < 1e-13 {
            return Err(Error::TrappedStates(
                active[col..].to_vec(),
            ));
        }
        if pivot != col {
            for t in 0..stride {
                a.swap(pivot * stride + t, col * stride + t);
            }
        }
        let d = a[col * stride + col];
        for row in col + 1..m {
            let factor = a[row * stride + col] / d;
            if factor != 0.0 {
                for t in col..stride {
                    a[row * stride + t] -= factor * a[col * stride + t];
                }
            }
        }
    }
    let mut x = vec![0.0f64; m];
    for k in (0..m).rev() {
        let mut acc = a[k * stride + m];
        for t in k + 1..m {
            acc -= a[k * stride + t] * x[t];
        }
        x[k] = acc / a[k * stride + k];
    }
    let mut values = vec![0.0; n];
    for (k, &i) in active.iter().enumerate() {
        values[i] = x[k];
    }
    Ok(values)
}

fn solve_gauss_seidel(
    p: &StochasticMatrix,
    r: &[f64],
    active: &[usize],
    cfg: &ValuationConfig,
) -> Result<Vec<f64>> {
    let n = p.n_transient();
    let mut values = vec![0.0f64; n];
    let mut change = f64::INFINITY;
    for _ in 0..cfg.max_iterations {
        change = 0.0;
        for &i in active {
            let mut acc = r[i];
            let mut stay = 0.0;
            for &(j, w) in p.row(i) {
                if j == i {
                    stay += w;
                } else if j < n {
                    acc += w * values[j];
                }
            }
            let next = acc / (1.0 - stay);
            change = change.max((next - values[i]).abs());
            values[i] = next;
        }
        if change < cfg.tolerance && residual(p, &values) <= cfg.tolerance {
            return Ok(values);
        }
    }
    Err(Error::NonConvergence {
        iterations: cfg.max_iterations,
        change,
    })
}

/// Solves the absorbing chain for the expected terminal payoff of every
/// transient state. Dangling states are worth 0.
pub fn solve_field_values(p: &StochasticMatrix, cfg: &ValuationConfig) -> Result<FieldValues> {
    let trapped = trapped_states(p);
    if !trapped.is_empty() {
        return Err(Error::TrappedStates(trapped));
    }
    let n = p.n_transient();
    let r = terminal_reward(p);
    let active: Vec<usize> = (0..n).filter(|&i| !p.is_dangling(i)).collect();
    let mut values = if active.len() <= cfg.direct_solve_limit {
        solve_dense(p, &r, &active)?
    } else {
        solve_gauss_seidel(p, &r, &active, cfg)?
    };
    let res = residual(p, &values);
    if !(res <= cfg.tolerance) {
        return Err(Error::NonConvergence {
            iterations: 0,
            change: res,
        });
    }
    // payoffs are convex combinations of terminal values in [-1, 1]
    for v in &mut values {
        *v = v.clamp(-1.0, 1.0);
    }
    Ok(FieldValues {
        c: p.c,
        values,
        shot_value: p.shot_value(),
        dangling: p.dangling.clone(),
    })
}

/// Final state of a team's coarsening loop.
#[derive(Debug, Clone, PartialEq)]
pub struct TeamValuation {
    pub team_id: alloc::string::String,
    pub partition: TeamPartition,
    pub assignments: PartitionAssignments,
    pub transitions: TransitionSystem,
    pub values: FieldValues,
    /// Number of partition + solve rounds that ran.
    pub iterations: usize,
}

/// Runs the coarsening loop for one team: for `c` from `c_max` down to
/// `c_min`, re-partition using the previous round's field values, then count,
/// normalise and solve.
pub fn run_team_valuation(events: &TeamEventSet, cfg: &ValuationConfig) -> Result<TeamValuation> {
    cfg.validate()?;
    let mut last: Option<TeamValuation> = None;
    for c in cfg.partition.cluster_counts() {
        let round = |last: &Option<TeamValuation>| -> Result<TeamValuation> {
            let prev = last.as_ref().map(|v| PreviousIteration {
                values: &v.values,
                assignments: &v.assignments,
            });
            let (partition, assignments) = build_partition(events, prev, c, &cfg.partition)?;
            let transitions = accumulate_transitions(&assignments, events, c, cfg.shot_value)?;
            let values = solve_field_values(&normalize_rows(&transitions), cfg)?;
            Ok(TeamValuation {
                team_id: events.team_id.clone(),
                partition,
                assignments,
                transitions,
                values,
                iterations: last.as_ref().map_or(1, |v| v.iterations + 1),
            })
        };
        let next = round(&last).map_err(|e| Error::Iteration {
            clusters: c,
            source: alloc::boxed::Box::new(e),
        })?;
        last = Some(next);
    }
    Ok(last.expect("cluster_counts is never empty"))
}
