//! Pass scores, player rankings and the distribution of lost-ball scores.
//!
//! A successful pass is worth the change in field value between its end and
//! start clusters. An unsuccessful pass is worth the value of the opponent
//! holding the ball at the mirrored end point, minus the start value.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::event::{PassRecord, Point, PositionGroup, Roster};
use crate::field_value::{FieldValues, TeamValuation};
use crate::partition::ClusterAssignment;

#[derive(Debug, Clone, PartialEq)]
pub struct QPassRecord {
    pub match_id: String,
    pub seq: u64,
    pub source_seq: Option<u64>,
    pub team_id: String,
    pub player_id: String,
    pub is_virtual: bool,
    pub start: Point,
    pub end: Point,
    pub successful: bool,
    pub c_s: usize,
    pub c_e: usize,
    pub l_e: Option<usize>,
    pub f_s: f64,
    pub f_e: f64,
    /// Opponent-possession value at the mirrored end point; unsuccessful
    /// passes only.
    pub l_e_value: Option<f64>,
    pub qpass: f64,
}

pub fn qpass_of_pass(
    pass: &PassRecord,
    a: &ClusterAssignment,
    fv: &FieldValues,
) -> Result<QPassRecord> {
    let f_s = fv.own(a.c_s);
    let f_e = fv.own(a.c_e);
    let (qpass, l_e_value) = if pass.successful {
        (f_e - f_s, None)
    } else {
        let l_e = a.l_e.ok_or(Error::MissingLandingCluster { index: 0 })?;
        let v = fv.opp(l_e);
        (v - f_s, Some(v))
    };
    Ok(QPassRecord {
        match_id: pass.match_id.clone(),
        seq: pass.seq,
        source_seq: pass.source_seq,
        team_id: pass.team_id.clone(),
        player_id: pass.player_id.clone(),
        is_virtual: pass.is_virtual,
        start: pass.start,
        end: pass.end,
        successful: pass.successful,
        c_s: a.c_s,
        c_e: a.c_e,
        l_e: a.l_e,
        f_s,
        f_e,
        l_e_value,
        qpass,
    })
}

/// Scores every pass the team made, virtual ones included.
pub fn score_team(passes: &[PassRecord], valuation: &TeamValuation) -> Result<Vec<QPassRecord>> {
    let assignments = &valuation.assignments.own_passes;
    if assignments.len() != passes.len() {
        return Err(Error::MissingAssignment {
            what: "pass",
            index: assignments.len().min(passes.len()),
        });
    }
    passes
        .iter()
        .zip(assignments)
        .enumerate()
        .map(|(index, (p, a))| {
            qpass_of_pass(p, a, &valuation.values).map_err(|e| match e {
                Error::MissingLandingCluster { .. } => Error::MissingLandingCluster { index },
                other => other,
            })
        })
        .collect()
}

/// Median with the mean-of-middle-pair convention. Sorts `values`.
pub fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    Some(if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlayerRanking {
    pub player_id: String,
    pub name: String,
    pub team_id: String,
    pub position: PositionGroup,
    pub pass_count: usize,
    pub median_qpass: f64,
}

/// Median QPass of every player with at least `min_passes` real passes, best
/// first. Ties keep player-id order.
pub fn rank_players(
    records: &[QPassRecord],
    roster: &Roster,
    min_passes: usize,
) -> Result<Vec<PlayerRanking>> {
    let mut by_player: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for r in records.iter().filter(|r| !r.is_virtual) {
        by_player.entry(&r.player_id).or_default().push(r.qpass);
    }
    let mut rankings = Vec::new();
    for (player, mut values) in by_player {
        if values.len() < min_passes {
            continue;
        }
        let entry = roster
            .get(player)
            .ok_or_else(|| Error::MissingRoster(player.into()))?;
        let pass_count = values.len();
        let median_qpass = median(&mut values).expect("non-empty");
        rankings.push(PlayerRanking {
            player_id: player.into(),
            name: entry.name.clone(),
            team_id: entry.team_id.clone(),
            position: entry.position,
            pass_count,
            median_qpass,
        });
    }
    rankings.sort_by(|a, b| b.median_qpass.total_cmp(&a.median_qpass));
    Ok(rankings)
}

/// The player's `n` best real passes, highest QPass first; ties by seq.
pub fn top_passes(records: &[QPassRecord], player_id: &str, n: usize) -> Result<Vec<QPassRecord>> {
    let mut mine: Vec<&QPassRecord> = records
        .iter()
        .filter(|r| r.player_id == player_id && !r.is_virtual)
        .collect();
    if mine.is_empty() {
        return Err(Error::UnknownPlayer(player_id.into()));
    }
    mine.sort_by(|a, b| {
        b.qpass
            .total_cmp(&a.qpass)
            .then(a.seq.cmp(&b.seq))
            .then_with(|| a.match_id.cmp(&b.match_id))
    });
    Ok(mine.into_iter().take(n).cloned().collect())
}

/// Empirical CDF of the QPass of one position group's unsuccessful passes.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupCdf {
    pub group: PositionGroup,
    /// `(qpass, fraction of passes <= qpass)`, sorted by qpass.
    pub points: Vec<(f64, f64)>,
    /// Share of unsuccessful passes with positive QPass.
    pub beneficial_fraction: f64,
}

impl GroupCdf {
    pub fn count(&self) -> usize {
        self.points.len()
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CdfReport {
    pub groups: Vec<GroupCdf>,
    /// Groups without any unsuccessful pass.
    pub omitted: Vec<PositionGroup>,
}

pub fn unsuccessful_cdf(records: &[QPassRecord], roster: &Roster) -> Result<CdfReport> {
    let mut by_group: BTreeMap<PositionGroup, Vec<f64>> = BTreeMap::new();
    for r in records.iter().filter(|r| !r.successful && !r.is_virtual) {
        let entry = roster
            .get(&r.player_id)
            .ok_or_else(|| Error::MissingRoster(r.player_id.clone()))?;
        by_group.entry(entry.position).or_default().push(r.qpass);
    }
    let mut report = CdfReport::default();
    for group in PositionGroup::ALL {
        let Some(mut values) = by_group.remove(&group) else {
            report.omitted.push(group);
            continue;
        };
        values.sort_by(f64::total_cmp);
        let n = values.len() as f64;
        let beneficial = values.iter().filter(|&&v| v > 0.0).count() as f64 / n;
        let points = values
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, (i + 1) as f64 / n))
            .collect();
        report.groups.push(GroupCdf {
            group,
            points,
            beneficial_fraction: beneficial,
        });
    }
    Ok(report)
}
