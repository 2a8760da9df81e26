//! Event and roster CSV files.

use std::collections::HashMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use qpass_core::{Event, MatchEventLog, PassRecord, Point, PositionGroup, RosterEntry, ShotRecord};

use crate::error::{PipelineError, Result};

pub const EVENT_HEADER: [&str; 11] = [
    "match_id", "seq", "team_id", "player_id", "kind", "x_start", "y_start", "x_end", "y_end",
    "flag", "assist_seq",
];

pub const ROSTER_HEADER: [&str; 4] = ["player_id", "name", "team_id", "position"];

fn parse_error(path: &Path, line: u64, message: impl Into<String>) -> PipelineError {
    PipelineError::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

fn empty_log(path: &Path) -> PipelineError {
    PipelineError::Input {
        path: path.to_path_buf(),
        source: qpass_core::Error::EmptyInput("event file has no events"),
    }
}

fn csv_reader<R: Read>(reader: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader)
}

fn check_header(path: &Path, found: &csv::StringRecord, expected: &[&str], optional: usize) -> Result<()> {
    let required = expected.len() - optional;
    let ok = found.len() >= required
        && found.len() <= expected.len()
        && found.iter().zip(expected).all(|(a, b)| a.eq_ignore_ascii_case(b));
    if ok {
        Ok(())
    } else {
        Err(parse_error(
            path,
            1,
            format!("header must be `{}`", expected[..required].join(",")),
        ))
    }
}

fn coordinate(path: &Path, line: u64, name: &str, raw: &str) -> Result<f64> {
    let value: f64 = raw
        .parse()
        .map_err(|_| parse_error(path, line, format!("{name}: `{raw}` is not a number")))?;
    if !value.is_finite() {
        return Err(parse_error(path, line, format!("{name}: `{raw}` is not finite")));
    }
    Ok(value)
}

/// Reads every match in an event file. Rows are grouped by `match_id` in order
/// of first appearance; coordinates outside the pitch are clamped onto it.
pub fn read_events<R: Read>(reader: R, path: &Path) -> Result<Vec<MatchEventLog>> {
    let mut rdr = csv_reader(reader);
    let header = rdr
        .headers()
        .map_err(|e| parse_error(path, 1, e.to_string()))?
        .clone();
    if header.is_empty() {
        return Err(empty_log(path));
    }
    check_header(path, &header, &EVENT_HEADER, 1)?;

    let mut order: Vec<String> = Vec::new();
    let mut groups: HashMap<String, Vec<Event>> = HashMap::new();
    for row in rdr.records() {
        let row = row.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_error(path, line, e.to_string())
        })?;
        let line = row.position().map_or(0, |p| p.line());
        if row.len() < 10 || row.len() > 11 {
            return Err(parse_error(
                path,
                line,
                format!("expected 10 or 11 fields, found {}", row.len()),
            ));
        }
        let field = |i: usize| row.get(i).unwrap_or("");
        let match_id = field(0).to_string();
        if match_id.is_empty() {
            return Err(parse_error(path, line, "match_id is empty"));
        }
        let seq: u64 = field(1)
            .parse()
            .map_err(|_| parse_error(path, line, format!("seq: `{}` is not an integer", field(1))))?;
        let team_id = field(2).to_string();
        let player_id = field(3).to_string();
        if team_id.is_empty() || player_id.is_empty() {
            return Err(parse_error(path, line, "team_id and player_id are required"));
        }
        let flag = match field(9) {
            "1" => true,
            "0" => false,
            other => return Err(parse_error(path, line, format!("flag: `{other}` is not 0 or 1"))),
        };
        let start = Point::clamped(
            coordinate(path, line, "x_start", field(5))?,
            coordinate(path, line, "y_start", field(6))?,
        );
        let assist = field(10);
        let event = match field(4) {
            "pass" => {
                if !assist.is_empty() {
                    return Err(parse_error(path, line, "only shots may name an assist"));
                }
                let end = Point::clamped(
                    coordinate(path, line, "x_end", field(7))?,
                    coordinate(path, line, "y_end", field(8))?,
                );
                Event::Pass(PassRecord {
                    match_id: match_id.clone(),
                    seq,
                    source_seq: Some(seq),
                    team_id,
                    player_id,
                    start,
                    end,
                    successful: flag,
                    is_virtual: false,
                    possession_id: 0,
                    is_last_of_possession: false,
                    possession_ends_in_shot: false,
                    assist_for_shot: None,
                })
            }
            "shot" => {
                let assisted_by = if assist.is_empty() {
                    None
                } else {
                    Some(assist.parse().map_err(|_| {
                        parse_error(path, line, format!("assist_seq: `{assist}` is not an integer"))
                    })?)
                };
                Event::Shot(ShotRecord {
                    match_id: match_id.clone(),
                    seq,
                    team_id,
                    player_id,
                    location: start,
                    is_goal: flag,
                    assisted_by,
                    possession_id: 0,
                })
            }
            other => return Err(parse_error(path, line, format!("kind: `{other}` is not pass or shot"))),
        };
        if !groups.contains_key(&match_id) {
            order.push(match_id.clone());
        }
        groups.entry(match_id).or_default().push(event);
    }
    if order.is_empty() {
        return Err(empty_log(path));
    }

    order
        .into_iter()
        .map(|id| {
            let events = groups.remove(&id).unwrap_or_default();
            MatchEventLog::new(id, events).map_err(|source| PipelineError::Input {
                path: path.to_path_buf(),
                source,
            })
        })
        .collect()
}

pub fn read_events_file(path: &Path) -> Result<Vec<MatchEventLog>> {
    let file = File::open(path).map_err(PipelineError::io(path))?;
    read_events(file, path)
}

/// Reads an event file, or every `*.csv` file of a directory in name order.
pub fn read_events_path(path: &Path) -> Result<Vec<MatchEventLog>> {
    if !path.is_dir() {
        return read_events_file(path);
    }
    let mut files: Vec<PathBuf> = std::fs::read_dir(path)
        .map_err(PipelineError::io(path))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "csv"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(parse_error(path, 0, "directory holds no .csv files"));
    }
    let mut logs = Vec::new();
    for file in &files {
        logs.extend(read_events_file(file)?);
    }
    Ok(logs)
}

fn fmt_coord(v: f64) -> String {
    format!("{v}")
}

/// Writes logs in the input event format. Virtual passes are written like any
/// other pass, so feed this the logs as parsed.
pub fn write_events<W: Write>(writer: W, logs: &[MatchEventLog]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(EVENT_HEADER)?;
    for log in logs {
        for event in &log.events {
            match event {
                Event::Pass(p) => w.write_record([
                    p.match_id.as_str(),
                    &p.seq.to_string(),
                    &p.team_id,
                    &p.player_id,
                    "pass",
                    &fmt_coord(p.start.x),
                    &fmt_coord(p.start.y),
                    &fmt_coord(p.end.x),
                    &fmt_coord(p.end.y),
                    if p.successful { "1" } else { "0" },
                    "",
                ])?,
                Event::Shot(s) => w.write_record([
                    s.match_id.as_str(),
                    &s.seq.to_string(),
                    &s.team_id,
                    &s.player_id,
                    "shot",
                    &fmt_coord(s.location.x),
                    &fmt_coord(s.location.y),
                    "",
                    "",
                    if s.is_goal { "1" } else { "0" },
                    &s.assisted_by.map(|a| a.to_string()).unwrap_or_default(),
                ])?,
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Augmented logs with possession ids and virtual-pass flags.
pub fn write_augmented_events<W: Write>(writer: W, logs: &[MatchEventLog]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "match_id", "seq", "source_seq", "team_id", "player_id", "kind", "x_start", "y_start",
        "x_end", "y_end", "flag", "assist_seq", "virtual", "possession_id", "last_of_possession",
    ])?;
    let opt = |v: Option<u64>| v.map(|v| v.to_string()).unwrap_or_default();
    for log in logs {
        for event in &log.events {
            match event {
                Event::Pass(p) => w.write_record([
                    p.match_id.as_str(),
                    &p.seq.to_string(),
                    &opt(p.source_seq),
                    &p.team_id,
                    &p.player_id,
                    "pass",
                    &fmt_coord(p.start.x),
                    &fmt_coord(p.start.y),
                    &fmt_coord(p.end.x),
                    &fmt_coord(p.end.y),
                    if p.successful { "1" } else { "0" },
                    "",
                    if p.is_virtual { "1" } else { "0" },
                    &p.possession_id.to_string(),
                    if p.is_last_of_possession { "1" } else { "0" },
                ])?,
                Event::Shot(s) => w.write_record([
                    s.match_id.as_str(),
                    &s.seq.to_string(),
                    "",
                    &s.team_id,
                    &s.player_id,
                    "shot",
                    &fmt_coord(s.location.x),
                    &fmt_coord(s.location.y),
                    "",
                    "",
                    if s.is_goal { "1" } else { "0" },
                    &opt(s.assisted_by),
                    "0",
                    &s.possession_id.to_string(),
                    "1",
                ])?,
            }
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_roster<R: Read>(reader: R, path: &Path) -> Result<Vec<RosterEntry>> {
    let mut rdr = csv_reader(reader);
    let header = rdr
        .headers()
        .map_err(|e| parse_error(path, 1, e.to_string()))?
        .clone();
    check_header(path, &header, &ROSTER_HEADER, 0)?;
    let mut entries = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_error(path, line, e.to_string())
        })?;
        let line = row.position().map_or(0, |p| p.line());
        if row.len() != 4 {
            return Err(parse_error(path, line, format!("expected 4 fields, found {}", row.len())));
        }
        let position: PositionGroup = row[3]
            .parse()
            .map_err(|_| parse_error(path, line, format!("position: `{}` is not GK, DF, MF or FW", &row[3])))?;
        if row[0].is_empty() {
            return Err(parse_error(path, line, "player_id is empty"));
        }
        entries.push(RosterEntry {
            player_id: row[0].to_string(),
            name: row[1].to_string(),
            team_id: row[2].to_string(),
            position,
        });
    }
    Ok(entries)
}

pub fn read_roster_file(path: &Path) -> Result<Vec<RosterEntry>> {
    let file = File::open(path).map_err(PipelineError::io(path))?;
    read_roster(file, path)
}

pub fn write_roster<W: Write>(writer: W, roster: &[RosterEntry]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(ROSTER_HEADER)?;
    for e in roster {
        w.write_record([&e.player_id, &e.name, &e.team_id, e.position.code()])?;
    }
    w.flush()?;
    Ok(())
}
