//! Event data model: passes, shots, possessions and per-team event sets.
//!
//! Coordinates live on a `[0, 100] x [0, 100]` pitch where every team attacks
//! from left to right in its own frame. Converting a location between the two
//! frames is a point reflection through the centre spot, see [`mirror`].

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};

pub const PITCH_LENGTH: f64 = 100.0;
pub const PITCH_WIDTH: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Builds a point, clamping both coordinates onto the pitch.
    pub fn clamped(x: f64, y: f64) -> Self {
        Self {
            x: x.clamp(0.0, PITCH_LENGTH),
            y: y.clamp(0.0, PITCH_WIDTH),
        }
    }

    pub fn mirror(self) -> Self {
        mirror(self)
    }
}

/// Converts a location into the opposing team's attack frame.
pub fn mirror(p: Point) -> Point {
    Point::new(PITCH_LENGTH - p.x, PITCH_WIDTH - p.y)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PassRecord {
    pub match_id: String,
    pub seq: u64,
    /// Sequence number in the source file; `None` for virtual passes.
    pub source_seq: Option<u64>,
    pub team_id: String,
    pub player_id: String,
    pub start: Point,
    pub end: Point,
    pub successful: bool,
    pub is_virtual: bool,
    pub possession_id: u32,
    pub is_last_of_possession: bool,
    /// The possession this pass belongs to ended with a shot.
    pub possession_ends_in_shot: bool,
    /// Seq of the shot this pass assisted.
    pub assist_for_shot: Option<u64>,
}

impl PassRecord {
    /// A pass hands the ball to the other team at its end point: either it
    /// failed, or it was the last pass of a possession that did not end in a
    /// shot.
    pub fn changes_possession(&self) -> bool {
        !self.successful || (self.is_last_of_possession && !self.possession_ends_in_shot)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShotRecord {
    pub match_id: String,
    pub seq: u64,
    pub team_id: String,
    pub player_id: String,
    pub location: Point,
    pub is_goal: bool,
    /// Seq of the assisting pass.
    pub assisted_by: Option<u64>,
    pub possession_id: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Event {
    Pass(PassRecord),
    Shot(ShotRecord),
}

impl Event {
    pub fn seq(&self) -> u64 {
        match self {
            Event::Pass(p) => p.seq,
            Event::Shot(s) => s.seq,
        }
    }

    fn set_seq(&mut self, seq: u64) {
        match self {
            Event::Pass(p) => p.seq = seq,
            Event::Shot(s) => s.seq = seq,
        }
    }

    pub fn team_id(&self) -> &str {
        match self {
            Event::Pass(p) => &p.team_id,
            Event::Shot(s) => &s.team_id,
        }
    }

    pub fn match_id(&self) -> &str {
        match self {
            Event::Pass(p) => &p.match_id,
            Event::Shot(s) => &s.match_id,
        }
    }

    pub fn possession_id(&self) -> u32 {
        match self {
            Event::Pass(p) => p.possession_id,
            Event::Shot(s) => s.possession_id,
        }
    }

    fn set_possession_id(&mut self, id: u32) {
        match self {
            Event::Pass(p) => p.possession_id = id,
            Event::Shot(s) => s.possession_id = id,
        }
    }

    /// Whether this event closes the possession it belongs to.
    fn ends_possession(&self) -> bool {
        match self {
            Event::Pass(p) => !p.successful,
            Event::Shot(_) => true,
        }
    }

    pub fn as_pass(&self) -> Option<&PassRecord> {
        match self {
            Event::Pass(p) => Some(p),
            Event::Shot(_) => None,
        }
    }

    pub fn as_shot(&self) -> Option<&ShotRecord> {
        match self {
            Event::Pass(_) => None,
            Event::Shot(s) => Some(s),
        }
    }
}

/// All events of one match, ordered by `seq`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchEventLog {
    pub match_id: String,
    /// Team identifiers in order of first appearance.
    pub teams: [String; 2],
    pub events: Vec<Event>,
}

impl MatchEventLog {
    /// Validates and wraps the events of a single match.
    pub fn new(match_id: impl Into<String>, events: Vec<Event>) -> Result<Self> {
        let match_id = match_id.into();
        if events.is_empty() {
            return Err(Error::Validation(format!("match `{match_id}` has no events")));
        }
        let mut teams: Vec<String> = Vec::with_capacity(2);
        let mut previous: Option<u64> = None;
        for event in &events {
            if event.match_id() != match_id {
                return Err(Error::Validation(format!(
                    "event {} belongs to match `{}`, expected `{match_id}`",
                    event.seq(),
                    event.match_id()
                )));
            }
            if let Some(prev) = previous {
                if event.seq() <= prev {
                    return Err(Error::Validation(format!(
                        "match `{match_id}`: seq {} does not increase after {prev}",
                        event.seq()
                    )));
                }
            }
            previous = Some(event.seq());
            if !teams.iter().any(|t| t == event.team_id()) {
                teams.push(event.team_id().into());
            }
        }
        if teams.len() != 2 {
            return Err(Error::Validation(format!(
                "match `{match_id}` has {} teams, expected exactly 2",
                teams.len()
            )));
        }
        for event in &events {
            if let Event::Shot(shot) = event {
                if let Some(assist) = shot.assisted_by {
                    let found = events.iter().any(|e| {
                        matches!(e, Event::Pass(p) if p.seq == assist && p.team_id == shot.team_id)
                    });
                    if !found || assist >= shot.seq {
                        return Err(Error::Validation(format!(
                            "match `{match_id}`: shot {} names assist {assist}, which is not an earlier pass of the same team",
                            shot.seq
                        )));
                    }
                }
            }
        }
        let mut teams = teams.into_iter();
        let teams = [teams.next().unwrap(), teams.next().unwrap()];
        Ok(Self {
            match_id,
            teams,
            events,
        })
    }

    pub fn passes(&self) -> impl Iterator<Item = &PassRecord> {
        self.events.iter().filter_map(Event::as_pass)
    }

    pub fn shots(&self) -> impl Iterator<Item = &ShotRecord> {
        self.events.iter().filter_map(Event::as_shot)
    }

    pub fn opponent_of(&self, team: &str) -> Option<&str> {
        match &self.teams {
            [a, b] if a == team => Some(b),
            [a, b] if b == team => Some(a),
            _ => None,
        }
    }
}

/// Inserts a virtual pass wherever a pass ends somewhere other than where the
/// next pass of the same possession starts. The virtual pass is credited to the
/// player making the next pass. Events are renumbered `1..=n` afterwards;
/// `source_seq` keeps the original numbering.
pub fn insert_virtual_passes(log: MatchEventLog) -> MatchEventLog {
    let MatchEventLog {
        match_id,
        teams,
        events,
    } = log;
    let mut out: Vec<Event> = Vec::with_capacity(events.len() + events.len() / 2);
    for event in events {
        if let (Some(Event::Pass(prev)), Event::Pass(next)) = (out.last(), &event) {
            if prev.team_id == next.team_id && prev.successful && prev.end != next.start {
                let carry = PassRecord {
                    match_id: next.match_id.clone(),
                    seq: prev.seq,
                    source_seq: None,
                    team_id: next.team_id.clone(),
                    player_id: next.player_id.clone(),
                    start: prev.end,
                    end: next.start,
                    successful: true,
                    is_virtual: true,
                    possession_id: prev.possession_id,
                    is_last_of_possession: false,
                    possession_ends_in_shot: prev.possession_ends_in_shot,
                    assist_for_shot: None,
                };
                out.push(Event::Pass(carry));
            }
        }
        out.push(event);
    }
    resequence(&mut out);
    MatchEventLog {
        match_id,
        teams,
        events: out,
    }
}

fn resequence(events: &mut [Event]) {
    // Virtual passes reuse their predecessor's seq until renumbered, so map
    // only the non-virtual events.
    let mut renumbered: BTreeMap<u64, u64> = BTreeMap::new();
    for (i, event) in events.iter_mut().enumerate() {
        let new_seq = i as u64 + 1;
        let is_virtual = matches!(event, Event::Pass(p) if p.is_virtual);
        if !is_virtual {
            renumbered.insert(event.seq(), new_seq);
        }
        event.set_seq(new_seq);
    }
    for event in events.iter_mut() {
        match event {
            Event::Pass(p) => {
                p.assist_for_shot = p.assist_for_shot.and_then(|s| renumbered.get(&s).copied());
            }
            Event::Shot(s) => {
                s.assisted_by = s.assisted_by.and_then(|a| renumbered.get(&a).copied());
            }
        }
    }
}

/// Assigns possession ids. A possession is a maximal run of events by one team
/// and ends at an unsuccessful pass, at a shot, or when the other team acts.
/// Also marks the last pass of each possession, whether the possession ended
/// in a shot, and which pass assisted which shot.
pub fn segment_possessions(mut log: MatchEventLog) -> MatchEventLog {
    let events = &mut log.events;
    let mut next_id: u32 = 0;
    let mut open: Option<(u32, String)> = None;
    for event in events.iter_mut() {
        let id = match &open {
            Some((id, team)) if team == event.team_id() => *id,
            _ => {
                let id = next_id;
                next_id += 1;
                id
            }
        };
        event.set_possession_id(id);
        open = if event.ends_possession() {
            None
        } else {
            Some((id, event.team_id().into()))
        };
    }

    let mut start = 0;
    while start < events.len() {
        let id = events[start].possession_id();
        let mut end = start;
        while end < events.len() && events[end].possession_id() == id {
            end += 1;
        }
        let ends_in_shot = matches!(events[end - 1], Event::Shot(_));
        let last_pass = (start..end).rev().find(|&i| matches!(events[i], Event::Pass(_)));
        for (i, event) in events[start..end].iter_mut().enumerate() {
            if let Event::Pass(p) = event {
                p.possession_ends_in_shot = ends_in_shot;
                p.is_last_of_possession = Some(start + i) == last_pass;
            }
        }
        start = end;
    }

    let assists: BTreeMap<u64, u64> = events
        .iter()
        .filter_map(Event::as_shot)
        .filter_map(|s| s.assisted_by.map(|a| (a, s.seq)))
        .collect();
    for event in events.iter_mut() {
        if let Event::Pass(p) = event {
            p.assist_for_shot = assists.get(&p.seq).copied();
        }
    }
    log
}

/// Segments possessions and fills in virtual passes.
pub fn augment(log: MatchEventLog) -> MatchEventLog {
    segment_possessions(insert_virtual_passes(segment_possessions(log)))
}

/// The four event sets a team's valuation is built from. Every event stays in
/// the acting team's own attack frame.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TeamEventSet {
    pub team_id: String,
    pub own_passes: Vec<PassRecord>,
    /// Passes by every opponent in matches against this team.
    pub opponent_passes: Vec<PassRecord>,
    pub own_shots: Vec<ShotRecord>,
    pub opponent_shots: Vec<ShotRecord>,
    /// Index into `own_passes` of each own shot's assist.
    pub own_shot_assists: Vec<Option<usize>>,
    /// Index into `opponent_passes` of each opponent shot's assist.
    pub opponent_shot_assists: Vec<Option<usize>>,
}

/// Collects a team's events over all the given matches.
pub fn build_team_event_sets(logs: &[MatchEventLog], team: &str) -> Result<TeamEventSet> {
    let mut set = TeamEventSet {
        team_id: team.into(),
        ..TeamEventSet::default()
    };
    let mut found = false;
    for log in logs {
        if !log.teams.iter().any(|t| t == team) {
            continue;
        }
        found = true;
        let mut own_index: BTreeMap<u64, usize> = BTreeMap::new();
        let mut opp_index: BTreeMap<u64, usize> = BTreeMap::new();
        for event in &log.events {
            let own = event.team_id() == team;
            match event {
                Event::Pass(p) if own => {
                    own_index.insert(p.seq, set.own_passes.len());
                    set.own_passes.push(p.clone());
                }
                Event::Pass(p) => {
                    opp_index.insert(p.seq, set.opponent_passes.len());
                    set.opponent_passes.push(p.clone());
                }
                Event::Shot(s) if own => {
                    let assist = s.assisted_by.and_then(|a| own_index.get(&a).copied());
                    set.own_shot_assists.push(assist);
                    set.own_shots.push(s.clone());
                }
                Event::Shot(s) => {
                    let assist = s.assisted_by.and_then(|a| opp_index.get(&a).copied());
                    set.opponent_shot_assists.push(assist);
                    set.opponent_shots.push(s.clone());
                }
            }
        }
    }
    if found {
        Ok(set)
    } else {
        Err(Error::UnknownTeam(team.into()))
    }
}

/// Every team appearing in the logs, sorted.
pub fn team_ids(logs: &[MatchEventLog]) -> Vec<String> {
    let mut teams: Vec<String> = logs.iter().flat_map(|l| l.teams.iter().cloned()).collect();
    teams.sort();
    teams.dedup();
    teams
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PositionGroup {
    Goalkeeper,
    Defender,
    Midfielder,
    Attacker,
}

impl PositionGroup {
    pub const ALL: [PositionGroup; 4] = [
        PositionGroup::Goalkeeper,
        PositionGroup::Defender,
        PositionGroup::Midfielder,
        PositionGroup::Attacker,
    ];

    /// Roster file code.
    pub fn code(self) -> &'static str {
        match self {
            PositionGroup::Goalkeeper => "GK",
            PositionGroup::Defender => "DF",
            PositionGroup::Midfielder => "MF",
            PositionGroup::Attacker => "FW",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            PositionGroup::Goalkeeper => "goalkeeper",
            PositionGroup::Defender => "defender",
            PositionGroup::Midfielder => "midfielder",
            PositionGroup::Attacker => "attacker",
        }
    }
}

impl fmt::Display for PositionGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for PositionGroup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "GK" => Ok(PositionGroup::Goalkeeper),
            "DF" => Ok(PositionGroup::Defender),
            "MF" => Ok(PositionGroup::Midfielder),
            "FW" => Ok(PositionGroup::Attacker),
            other => Err(Error::Validation(format!("unknown position `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RosterEntry {
    pub player_id: String,
    pub name: String,
    pub team_id: String,
    pub position: PositionGroup,
}

pub type Roster = BTreeMap<String, RosterEntry>;

pub fn roster_from_entries(entries: impl IntoIterator<Item = RosterEntry>) -> Roster {
    entries
        .into_iter()
        .map(|e| (e.player_id.clone(), e))
        .collect()
}
