//! Stage orchestration and the output manifest.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use qpass_core::event::{augment, build_team_event_sets, roster_from_entries, team_ids, Roster};
use qpass_core::field_value::run_team_valuation;
use qpass_core::partition::build_partition;
use qpass_core::qpass::{rank_players, score_team, top_passes, unsuccessful_cdf, CdfReport};
use qpass_core::synth::{generate_synthetic_league, SyntheticLeagueSpec};
use qpass_core::{
    MatchEventLog, PlayerRanking, PositionGroup, QPassRecord, TeamValuation,
};

use crate::config::RunConfig;
use crate::error::{PipelineError, Result};
use crate::{export, io, render};

pub const MANIFEST: &str = "manifest.txt";

/// How far a run goes. Each stage includes the ones before it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    Ingest,
    Partition,
    Value,
    Score,
    Rank,
    Report,
}

impl Stage {
    fn needs_roster(self) -> bool {
        self >= Stage::Rank
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportBundle {
    pub out_dir: PathBuf,
    /// Paths relative to `out_dir`, sorted, manifest excluded.
    pub files: Vec<PathBuf>,
    pub manifest: PathBuf,
}

struct Writer<'a> {
    out: &'a Path,
}

impl Writer<'_> {
    fn path(&self, rel: &str) -> Result<PathBuf> {
        let path = self.out.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(PipelineError::io(parent))?;
        }
        Ok(path)
    }

    fn csv(&self, rel: &str, write: impl FnOnce(BufWriter<File>) -> csv::Result<()>) -> Result<()> {
        let path = self.path(rel)?;
        let file = File::create(&path).map_err(PipelineError::io(&path))?;
        write(BufWriter::new(file)).map_err(|source| PipelineError::Csv { path, source })
    }

    fn text(&self, rel: &str, text: &str) -> Result<()> {
        let path = self.path(rel)?;
        fs::write(&path, text).map_err(PipelineError::io(&path))
    }
}

/// File-name-safe form of an identifier.
fn slug(id: &str) -> String {
    id.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

fn check_inputs(cfg: &RunConfig, stage: Stage) -> Result<(PathBuf, Option<PathBuf>)> {
    cfg.validate()?;
    let events = cfg
        .events
        .clone()
        .ok_or_else(|| PipelineError::Config("no event file given (--events)".into()))?;
    if !events.exists() {
        return Err(PipelineError::Config(format!("event path {} does not exist", events.display())));
    }
    let roster = match &cfg.roster {
        Some(path) if !path.is_file() => {
            return Err(PipelineError::Config(format!("roster file {} does not exist", path.display())))
        }
        Some(path) => Some(path.clone()),
        None if stage.needs_roster() => {
            return Err(PipelineError::Config("this stage needs a roster file (--roster)".into()))
        }
        None => None,
    };
    Ok((events, roster))
}

/// Runs the pipeline up to `stage` and writes the manifest. Inputs are checked
/// before anything is written.
pub fn run_pipeline(cfg: &RunConfig, stage: Stage) -> Result<ReportBundle> {
    let (events_path, roster_path) = check_inputs(cfg, stage)?;
    let started = Instant::now();

    let logs = io::read_events_path(&events_path)?;
    let roster: Option<Roster> = match &roster_path {
        Some(p) => Some(roster_from_entries(io::read_roster_file(p)?)),
        None => None,
    };
    let logs: Vec<MatchEventLog> = logs.into_par_iter().map(augment).collect();
    let all_teams = team_ids(&logs);
    let teams = match &cfg.team {
        Some(t) if !all_teams.contains(t) => {
            return Err(PipelineError::Config(format!("team `{t}` does not appear in the events")))
        }
        Some(t) => vec![t.clone()],
        None => all_teams,
    };
    log::info!(
        "read {} matches, {} teams from {}",
        logs.len(),
        teams.len(),
        events_path.display()
    );

    fs::create_dir_all(&cfg.out).map_err(PipelineError::io(&cfg.out))?;
    let w = Writer { out: &cfg.out };
    w.csv("events_augmented.csv", |f| io::write_augmented_events(f, &logs))?;
    if stage == Stage::Ingest {
        return write_manifest(&cfg.out);
    }

    let event_sets = teams
        .iter()
        .map(|t| build_team_event_sets(&logs, t).map_err(PipelineError::stage("event model")))
        .collect::<Result<Vec<_>>>()?;

    if stage == Stage::Partition {
        let c = cfg.valuation.partition.c_max;
        let parts = event_sets
            .par_iter()
            .map(|set| {
                build_partition(set, None, c, &cfg.valuation.partition)
                    .map_err(PipelineError::stage("partitioning"))
            })
            .collect::<Result<Vec<_>>>()?;
        for (team, (partition, _)) in teams.iter().zip(&parts) {
            write_partition_tables(&w, team, &partition.own, &partition.opp)?;
        }
        return write_manifest(&cfg.out);
    }

    let valuations = event_sets
        .par_iter()
        .map(|set| {
            let t = Instant::now();
            let v = run_team_valuation(set, &cfg.valuation).map_err(|source| PipelineError::Team {
                team: set.team_id.clone(),
                source,
            });
            log::info!("valued team {} in {:.1}s", set.team_id, t.elapsed().as_secs_f64());
            v
        })
        .collect::<Result<Vec<TeamValuation>>>()?;

    let mut summary = String::from("team,iterations,clusters,own_passes,opponent_passes,own_shots,opponent_shots\n");
    for (team, (val, set)) in teams.iter().zip(valuations.iter().zip(&event_sets)) {
        let dir = format!("teams/{}", slug(team));
        write_partition_tables(&w, team, &val.partition.own, &val.partition.opp)?;
        w.csv(&format!("{dir}/field_values.csv"), |f| export::write_field_values(f, &val.values))?;
        w.csv(&format!("{dir}/transitions.csv"), |f| export::write_transitions(f, &val.transitions))?;
        summary.push_str(&format!(
            "{team},{},{},{},{},{},{}\n",
            val.iterations,
            val.values.c,
            set.own_passes.len(),
            set.opponent_passes.len(),
            set.own_shots.len(),
            set.opponent_shots.len()
        ));
    }
    w.text("valuation_summary.csv", &summary)?;
    if stage == Stage::Value {
        return write_manifest(&cfg.out);
    }

    let mut records: Vec<QPassRecord> = Vec::new();
    for (set, val) in event_sets.iter().zip(&valuations) {
        records.extend(score_team(&set.own_passes, val).map_err(PipelineError::stage("scoring"))?);
    }
    w.csv("qpass_records.csv", |f| export::write_qpass_records(f, &records))?;
    if stage == Stage::Score {
        return write_manifest(&cfg.out);
    }

    let roster = roster.expect("checked above");
    let rankings = rank_players(&records, &roster, cfg.min_passes).map_err(PipelineError::stage("ranking"))?;
    let cdf = unsuccessful_cdf(&records, &roster).map_err(PipelineError::stage("ranking"))?;
    w.csv("rankings.csv", |f| export::write_rankings(f, &rankings))?;
    for group in PositionGroup::ALL {
        let table = top_and_bottom(&rankings, group, cfg.plot_players);
        w.csv(&format!("rankings_{}.csv", group.code()), |f| export::write_rankings(f, &table))?;
    }
    w.csv("unsuccessful_cdf.csv", |f| export::write_cdf(f, &cdf))?;
    w.csv("beneficial_share.csv", |f| export::write_beneficial(f, &cdf))?;
    if stage == Stage::Rank {
        return write_manifest(&cfg.out);
    }

    render_figures(cfg, &w, &teams, &valuations, &records, &rankings, &cdf)?;
    log::info!("pipeline finished in {:.1}s", started.elapsed().as_secs_f64());
    write_manifest(&cfg.out)
}

fn write_partition_tables(
    w: &Writer<'_>,
    team: &str,
    own: &qpass_core::Clustering,
    opp: &qpass_core::Clustering,
) -> Result<()> {
    let dir = format!("teams/{}", slug(team));
    w.csv(&format!("{dir}/partition_own.csv"), |f| export::write_partition(f, own))?;
    w.csv(&format!("{dir}/partition_opp.csv"), |f| export::write_partition(f, opp))?;
    w.csv(&format!("{dir}/scaler_own.csv"), |f| export::write_scaler(f, own))?;
    w.csv(&format!("{dir}/scaler_opp.csv"), |f| export::write_scaler(f, opp))
}

/// Best and worst `n` of one position, best first, without repeats.
fn top_and_bottom(rankings: &[PlayerRanking], group: PositionGroup, n: usize) -> Vec<PlayerRanking> {
    let mine: Vec<&PlayerRanking> = rankings.iter().filter(|r| r.position == group).collect();
    let mut picked: Vec<usize> = (0..mine.len().min(n)).collect();
    picked.extend(mine.len().saturating_sub(n).max(picked.len())..mine.len());
    picked.into_iter().map(|i| mine[i].clone()).collect()
}

fn render_figures(
    cfg: &RunConfig,
    w: &Writer<'_>,
    teams: &[String],
    valuations: &[TeamValuation],
    records: &[QPassRecord],
    rankings: &[PlayerRanking],
    cdf: &CdfReport,
) -> Result<()> {
    let mut figures: BTreeMap<String, String> = BTreeMap::new();
    let team_figures: Vec<Vec<(String, String)>> = teams
        .par_iter()
        .zip(valuations)
        .map(|(team, val)| {
            let dir = format!("figures/{}", slug(team));
            let mut out = Vec::new();
            if cfg.reports.partition_maps {
                out.push((
                    format!("{dir}/partition_own.svg"),
                    render::render_partition_map(&val.partition.own, &format!("{team}: in possession clusters")),
                ));
                out.push((
                    format!("{dir}/partition_opp.svg"),
                    render::render_partition_map(&val.partition.opp, &format!("{team}: opponent possession clusters")),
                ));
            }
            if cfg.reports.heatmaps {
                for (side, clustering, label) in [
                    (render::Side::Own, &val.partition.own, "in possession"),
                    (render::Side::Opp, &val.partition.opp, "opponent in possession"),
                ] {
                    out.push((
                        format!("{dir}/values_{}.svg", side.name()),
                        render::render_value_heatmap(clustering, &val.values, side, &format!("{team}: field values, {label}")),
                    ));
                }
            }
            out
        })
        .collect();
    figures.extend(team_figures.into_iter().flatten());

    if cfg.reports.pass_plots {
        for group in PositionGroup::ALL {
            for r in top_and_bottom(rankings, group, cfg.plot_players) {
                let best = top_passes(records, &r.player_id, cfg.top_n).map_err(PipelineError::stage("report"))?;
                figures.insert(
                    format!("figures/passes/{}_{}.svg", group.code(), slug(&r.player_id)),
                    render::render_pass_trajectories(&best, &format!("{}: top {} passes", r.name, best.len())),
                );
            }
        }
        let mut lost: Vec<QPassRecord> = records
            .iter()
            .filter(|r| !r.successful && !r.is_virtual && r.qpass > 0.0)
            .cloned()
            .collect();
        lost.sort_by(|a, b| {
            b.qpass
                .total_cmp(&a.qpass)
                .then_with(|| a.match_id.cmp(&b.match_id))
                .then(a.seq.cmp(&b.seq))
        });
        lost.truncate(cfg.top_n);
        if !lost.is_empty() {
            figures.insert(
                "figures/beneficial_lost_balls.svg".into(),
                render::render_pass_trajectories(&lost, "Unsuccessful passes that raised field value"),
            );
        }
    }
    if cfg.reports.cdf {
        figures.insert(
            "figures/unsuccessful_cdf.svg".into(),
            render::render_cdf(cdf, "QPass of unsuccessful passes by position"),
        );
    }
    for (rel, svg) in &figures {
        w.text(rel, svg)?;
    }
    Ok(())
}

/// Generates a synthetic league and writes `events.csv` and `roster.csv`.
pub fn run_synth(cfg: &RunConfig) -> Result<ReportBundle> {
    let opts = &cfg.synth;
    let mut spec = SyntheticLeagueSpec::league(
        opts.teams,
        opts.matches_per_pairing,
        opts.possessions,
        cfg.valuation.partition.seed,
    );
    if let Some(rate) = opts.clearance_rate {
        for t in &mut spec.teams {
            t.clearance_rate = rate;
        }
    }
    spec.validate().map_err(|e| PipelineError::Config(e.to_string()))?;
    let league = generate_synthetic_league(&spec).map_err(PipelineError::stage("synthetic league"))?;
    fs::create_dir_all(&cfg.out).map_err(PipelineError::io(&cfg.out))?;
    let w = Writer { out: &cfg.out };
    w.csv("events.csv", |f| io::write_events(f, &league.logs))?;
    w.csv("roster.csv", |f| io::write_roster(f, &league.roster))?;
    write_manifest(&cfg.out)
}

fn collect_files(root: &Path, dir: &Path, out: &mut Vec<PathBuf>) -> Result<()> {
    for entry in fs::read_dir(dir).map_err(PipelineError::io(dir))? {
        let path = entry.map_err(PipelineError::io(dir))?.path();
        if path.is_dir() {
            collect_files(root, &path, out)?;
        } else {
            let rel = path.strip_prefix(root).expect("under root").to_path_buf();
            if rel != Path::new(MANIFEST) {
                out.push(rel);
            }
        }
    }
    Ok(())
}

fn manifest_name(rel: &Path) -> String {
    rel.components()
        .map(|c| c.as_os_str().to_string_lossy())
        .collect::<Vec<_>>()
        .join("/")
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(PipelineError::io(path))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// Hashes every file under `out` into `manifest.txt`, one `path sha256` line
/// per file in path order.
pub fn write_manifest(out: &Path) -> Result<ReportBundle> {
    let mut files = Vec::new();
    collect_files(out, out, &mut files)?;
    files.sort_by_key(|p| manifest_name(p));
    let manifest = out.join(MANIFEST);
    let mut text = String::new();
    for rel in &files {
        text.push_str(&format!("{} {}\n", manifest_name(rel), sha256_file(&out.join(rel))?));
    }
    let mut f = File::create(&manifest).map_err(PipelineError::io(&manifest))?;
    f.write_all(text.as_bytes()).map_err(PipelineError::io(&manifest))?;
    Ok(ReportBundle {
        out_dir: out.to_path_buf(),
        files,
        manifest,
    })
}
