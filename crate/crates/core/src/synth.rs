//! Seeded synthetic leagues.
//!
//! Matches are simulated as alternating possessions. Each possession is a
//! random walk over the pitch: the player holding the ball is picked by zone
//! (goalkeepers deepest, attackers highest), and passes follow position
//! specific range and direction priors scaled by the team's style. The output
//! uses the same event model as parsed files, so the whole pipeline can run on
//! it.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::event::{Event, MatchEventLog, PassRecord, Point, PositionGroup, RosterEntry, ShotRecord};
use crate::partition::mix_seed;

/// Pitch zones by `x`: own third, middle third, attacking third, box area.
pub const ZONE_EDGES: [f64; 3] = [33.0, 66.0, 83.0];

fn zone(x: f64) -> usize {
    ZONE_EDGES.iter().take_while(|&&e| x >= e).count()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TeamStyle {
    /// Completion probability of an ordinary pass.
    pub retention: f64,
    /// 0 = cautious, 1 = direct; scales forward pass distance.
    pub progress_bias: f64,
    /// Probability of shooting instead of passing, per zone.
    pub shot_propensity: [f64; 4],
    /// Probability that an action is a forced, unsuccessful pass.
    pub turnover_rate: f64,
    /// Probability that a defender or goalkeeper in the own third clears the
    /// ball long upfield.
    pub clearance_rate: f64,
    /// Probability of being dispossessed right after receiving a pass.
    pub dispossession_rate: f64,
}

impl Default for TeamStyle {
    fn default() -> Self {
        Self {
            retention: 0.84,
            progress_bias: 0.5,
            shot_propensity: [0.0, 0.006, 0.045, 0.25],
            turnover_rate: 0.03,
            clearance_rate: 0.05,
            dispossession_rate: 0.03,
        }
    }
}

impl TeamStyle {
    fn probabilities(&self) -> impl Iterator<Item = (&'static str, f64)> + '_ {
        [
            ("retention", self.retention),
            ("progress_bias", self.progress_bias),
            ("turnover_rate", self.turnover_rate),
            ("clearance_rate", self.clearance_rate),
            ("dispossession_rate", self.dispossession_rate),
        ]
        .into_iter()
        .chain(self.shot_propensity.iter().map(|&p| ("shot_propensity", p)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticLeagueSpec {
    pub teams: Vec<TeamStyle>,
    /// Matches played by every pair of teams, alternating home side.
    pub matches_per_pairing: usize,
    pub possessions_per_match: usize,
    /// Probability that a shot is a goal.
    pub goal_conversion: f64,
    pub seed: u64,
}

impl SyntheticLeagueSpec {
    /// A league whose teams vary deterministically around the default style.
    pub fn league(
        n_teams: usize,
        matches_per_pairing: usize,
        possessions_per_match: usize,
        seed: u64,
    ) -> Self {
        let teams = (0..n_teams)
            .map(|i| {
                let t = if n_teams > 1 {
                    i as f64 / (n_teams - 1) as f64
                } else {
                    0.5
                };
                let base = TeamStyle::default();
                TeamStyle {
                    retention: 0.80 + 0.08 * t,
                    progress_bias: 0.7 - 0.4 * t,
                    shot_propensity: base.shot_propensity.map(|p| p * (0.8 + 0.4 * t)),
                    ..base
                }
            })
            .collect();
        Self {
            teams,
            matches_per_pairing,
            possessions_per_match,
            goal_conversion: 0.11,
            seed,
        }
    }

    /// Twenty teams, home and away: about 330k passes and 8.6k shots.
    pub fn full_season(seed: u64) -> Self {
        Self::league(20, 2, 218, seed)
    }

    pub fn validate(&self) -> Result<()> {
        if self.teams.len() < 2 {
            return Err(Error::Validation(format!(
                "a league needs at least 2 teams, got {}",
                self.teams.len()
            )));
        }
        if self.teams.len() > 99 {
            return Err(Error::Validation("at most 99 teams are supported".into()));
        }
        let mut probs = self
            .teams
            .iter()
            .enumerate()
            .flat_map(|(i, t)| t.probabilities().map(move |(name, p)| (i, name, p)));
        if let Some((i, name, p)) = probs.find(|&(_, _, p)| !(0.0..=1.0).contains(&p)) {
            return Err(Error::Validation(format!(
                "team {i}: {name} = {p} is not a probability"
            )));
        }
        if !(0.0..=1.0).contains(&self.goal_conversion) {
            return Err(Error::Validation(format!(
                "goal conversion {} is not a probability",
                self.goal_conversion
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticLeague {
    pub logs: Vec<MatchEventLog>,
    pub roster: Vec<RosterEntry>,
}

const SQUAD: [(PositionGroup, usize); 4] = [
    (PositionGroup::Goalkeeper, 2),
    (PositionGroup::Defender, 6),
    (PositionGroup::Midfielder, 6),
    (PositionGroup::Attacker, 4),
];

const LINEUP: [(PositionGroup, usize); 4] = [
    (PositionGroup::Goalkeeper, 1),
    (PositionGroup::Defender, 4),
    (PositionGroup::Midfielder, 3),
    (PositionGroup::Attacker, 3),
];

const MAX_ACTIONS_PER_POSSESSION: usize = 80;

pub fn team_id(index: usize) -> String {
    format!("T{:02}", index + 1)
}

fn player_id(team: usize, group: PositionGroup, k: usize) -> String {
    format!("{}-{}{}", team_id(team), group.code(), k + 1)
}

fn round1(v: f64) -> f64 {
    libm::round(v * 10.0) / 10.0
}

fn on_pitch(x: f64, y: f64) -> Point {
    Point::clamped(round1(x), round1(y))
}

struct Lineup {
    players: [Vec<String>; 4],
}

impl Lineup {
    fn pick(rng: &mut ChaCha8Rng, team: usize) -> Self {
        let mut players: [Vec<String>; 4] = Default::default();
        for (slot, (&(group, squad), &(_, starters))) in SQUAD.iter().zip(&LINEUP).enumerate() {
            let mut ids: Vec<usize> = (0..squad).collect();
            if group == PositionGroup::Goalkeeper {
                // first-choice keeper plays most matches
                if rng.random::<f64>() < 0.15 {
                    ids.swap(0, 1);
                }
            } else {
                for i in 0..starters {
                    let j = rng.random_range(i..squad);
                    ids.swap(i, j);
                }
            }
            players[slot] = ids[..starters]
                .iter()
                .map(|&k| player_id(team, group, k))
                .collect();
        }
        Self { players }
    }

    fn holder(&self, rng: &mut ChaCha8Rng, group: PositionGroup) -> &str {
        let slot = &self.players[group as usize];
        &slot[rng.random_range(0..slot.len())]
    }
}

/// Position of the player likely to have the ball at `x`.
fn group_at(x: f64) -> PositionGroup {
    if x < 12.0 {
        PositionGroup::Goalkeeper
    } else if x < 40.0 {
        PositionGroup::Defender
    } else if x < 70.0 {
        PositionGroup::Midfielder
    } else {
        PositionGroup::Attacker
    }
}

/// Intended pass target from `from` for a player of `group`.
fn pass_target(rng: &mut ChaCha8Rng, group: PositionGroup, from: Point, style: &TeamStyle) -> Point {
    let (dx_lo, dx_hi, dy) = match group {
        PositionGroup::Goalkeeper => (20.0, 50.0, 30.0),
        PositionGroup::Defender => (-5.0, 25.0, 20.0),
        PositionGroup::Midfielder => (-10.0, 20.0, 25.0),
        PositionGroup::Attacker => (-20.0, 8.0, 25.0),
    };
    let mut dx: f64 = rng.random_range(dx_lo..dx_hi);
    if dx > 0.0 {
        dx *= 0.5 + style.progress_bias;
    }
    let dy: f64 = rng.random_range(-dy..dy);
    on_pitch(from.x + dx, from.y + dy)
}

struct MatchSim<'a> {
    spec: &'a SyntheticLeagueSpec,
    match_id: String,
    teams: [usize; 2],
    lineups: [Lineup; 2],
    events: Vec<Event>,
    rng: ChaCha8Rng,
}

/// Where and how the next possession starts.
struct Restart {
    side: usize,
    at: Point,
}

impl MatchSim<'_> {
    fn next_seq(&self) -> u64 {
        self.events.len() as u64 + 1
    }

    fn push_pass(&mut self, side: usize, player: &str, start: Point, end: Point, ok: bool) -> u64 {
        let seq = self.next_seq();
        self.events.push(Event::Pass(PassRecord {
            match_id: self.match_id.clone(),
            seq,
            source_seq: Some(seq),
            team_id: team_id(self.teams[side]),
            player_id: player.into(),
            start,
            end,
            successful: ok,
            is_virtual: false,
            possession_id: 0,
            is_last_of_possession: false,
            possession_ends_in_shot: false,
            assist_for_shot: None,
        }));
        seq
    }

    fn possession(&mut self, restart: Restart) -> Restart {
        let side = restart.side;
        let other = 1 - side;
        let style = &self.spec.teams[self.teams[side]];
        let mut at = restart.at;
        let mut last_pass: Option<(u64, String)> = None;
        for _ in 0..MAX_ACTIONS_PER_POSSESSION {
            let group = group_at(at.x);
            let player: String = self.lineups[side].holder(&mut self.rng, group).into();
            let u: f64 = self.rng.random();

            // pressing makes losing the ball near the own goal more likely
            let pressure = if at.x < ZONE_EDGES[0] { 3.0 } else { 1.0 };
            if u < (style.turnover_rate * pressure).min(1.0) {
                let target = pass_target(&mut self.rng, group, at, style);
                self.push_pass(side, &player, at, target, false);
                return Restart {
                    side: other,
                    at: target.mirror(),
                };
            }

            let deep = matches!(group, PositionGroup::Goalkeeper | PositionGroup::Defender);
            if deep && at.x < ZONE_EDGES[0] && self.rng.random::<f64>() < style.clearance_rate {
                let target = on_pitch(
                    self.rng.random_range(65.0..95.0),
                    self.rng.random_range(10.0..90.0),
                );
                let ok = self.rng.random::<f64>() < 0.25;
                let seq = self.push_pass(side, &player, at, target, ok);
                if !ok {
                    return Restart {
                        side: other,
                        at: target.mirror(),
                    };
                }
                last_pass = Some((seq, player));
                at = target;
                continue;
            }

            if self.rng.random::<f64>() < style.shot_propensity[zone(at.x)] {
                let assisted_by = last_pass
                    .as_ref()
                    .filter(|(_, passer)| *passer != player)
                    .map(|(seq, _)| *seq);
                let is_goal = self.rng.random::<f64>() < self.spec.goal_conversion;
                let seq = self.next_seq();
                self.events.push(Event::Shot(ShotRecord {
                    match_id: self.match_id.clone(),
                    seq,
                    team_id: team_id(self.teams[side]),
                    player_id: player,
                    location: at,
                    is_goal,
                    assisted_by,
                    possession_id: 0,
                }));
                let at = if is_goal {
                    Point::new(50.0, 50.0)
                } else {
                    on_pitch(6.0, self.rng.random_range(35.0..65.0))
                };
                return Restart { side: other, at };
            }

            let target = pass_target(&mut self.rng, group, at, style);
            let mut completion = style.retention;
            if group == PositionGroup::Goalkeeper {
                completion *= 0.85;
            }
            if target.x >= ZONE_EDGES[2] {
                completion *= 0.7;
            }
            let ok = self.rng.random::<f64>() < completion;
            let seq = self.push_pass(side, &player, at, target, ok);
            if !ok {
                return Restart {
                    side: other,
                    at: target.mirror(),
                };
            }
            if self.rng.random::<f64>() < style.dispossession_rate {
                return Restart {
                    side: other,
                    at: target.mirror(),
                };
            }
            last_pass = Some((seq, player));
            at = if self.rng.random::<f64>() < 0.5 {
                on_pitch(
                    target.x + self.rng.random_range(0.0..8.0),
                    target.y + self.rng.random_range(-4.0..4.0),
                )
            } else {
                target
            };
        }
        Restart {
            side: other,
            at: at.mirror(),
        }
    }

    fn play(mut self) -> Result<MatchEventLog> {
        let mut restart = Restart {
            side: 0,
            at: Point::new(50.0, 50.0),
        };
        for _ in 0..self.spec.possessions_per_match {
            restart = self.possession(restart);
        }
        // make sure both teams appear even in tiny matches
        if !self
            .events
            .iter()
            .any(|e| e.team_id() == team_id(self.teams[1]))
        {
            let player: String = self.lineups[1]
                .holder(&mut self.rng, PositionGroup::Midfielder)
                .into();
            let at = restart.at;
            self.push_pass(1, &player, at, on_pitch(at.x + 5.0, at.y), false);
        }
        MatchEventLog::new(self.match_id, self.events)
    }
}

/// Simulates every fixture of the league. Byte-identical output for a fixed
/// spec.
pub fn generate_synthetic_league(spec: &SyntheticLeagueSpec) -> Result<SyntheticLeague> {
    spec.validate()?;
    let n = spec.teams.len();
    let mut roster = Vec::new();
    for team in 0..n {
        for &(group, count) in &SQUAD {
            for k in 0..count {
                roster.push(RosterEntry {
                    player_id: player_id(team, group, k),
                    name: format!("{} {} {}", team_id(team), group.label(), k + 1),
                    team_id: team_id(team),
                    position: group,
                });
            }
        }
    }

    let mut fixtures = Vec::new();
    for round in 0..spec.matches_per_pairing {
        for a in 0..n {
            for b in a + 1..n {
                fixtures.push(if round % 2 == 0 { [a, b] } else { [b, a] });
            }
        }
    }
    let mut logs = Vec::with_capacity(fixtures.len());
    for (index, teams) in fixtures.into_iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(spec.seed, &[index as u64]));
        let lineups = [Lineup::pick(&mut rng, teams[0]), Lineup::pick(&mut rng, teams[1])];
        let sim = MatchSim {
            spec,
            match_id: format!("M{:04}", index + 1),
            teams,
            lineups,
            events: Vec::new(),
            rng,
        };
        logs.push(sim.play()?);
    }
    Ok(SyntheticLeague { logs, roster })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event::segment_possessions;

    #[test]
    fn zones() {
        assert_eq!(zone(0.0), 0);
        assert_eq!(zone(40.0), 1);
        assert_eq!(zone(70.0), 2);
        assert_eq!(zone(90.0), 3);
    }

    #[test]
    fn deterministic_for_a_seed() {
        let spec = SyntheticLeagueSpec::league(2, 1, 40, 42);
        assert_eq!(
            generate_synthetic_league(&spec).unwrap(),
            generate_synthetic_league(&spec).unwrap()
        );
        let other = SyntheticLeagueSpec { seed: 43, ..spec.clone() };
        assert_ne!(
            generate_synthetic_league(&spec).unwrap().logs,
            generate_synthetic_league(&other).unwrap().logs
        );
    }

    #[test]
    fn certain_turnovers_give_single_pass_possessions() {
        let mut spec = SyntheticLeagueSpec::league(2, 1, 50, 1);
        for t in &mut spec.teams {
            t.turnover_rate = 1.0;
        }
        let league = generate_synthetic_league(&spec).unwrap();
        let log = segment_possessions(league.logs[0].clone());
        assert_eq!(log.events.len(), 50);
        assert!(log.passes().all(|p| !p.successful && p.is_last_of_possession));
        assert!(log.shots().next().is_none());
    }

    #[test]
    fn rejects_invalid_probabilities() {
        let mut spec = SyntheticLeagueSpec::league(2, 1, 10, 0);
        spec.teams[1].retention = 1.5;
        assert!(matches!(generate_synthetic_league(&spec), Err(Error::Validation(_))));
        let spec = SyntheticLeagueSpec::league(1, 1, 10, 0);
        assert!(matches!(generate_synthetic_league(&spec), Err(Error::Validation(_))));
    }

    #[test]
    fn roster_and_fixtures() {
        let spec = SyntheticLeagueSpec::league(4, 2, 20, 5);
        let league = generate_synthetic_league(&spec).unwrap();
        assert_eq!(league.logs.len(), 12);
        assert_eq!(league.roster.len(), 4 * 18);
        assert!(league
            .logs
            .iter()
            .flat_map(|l| l.passes())
            .all(|p| league.roster.iter().any(|r| r.player_id == p.player_id)));
    }
}
