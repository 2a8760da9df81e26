use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use qpass::{exit_code, run_pipeline, run_synth, PipelineError, RunConfig, Stage, MANIFEST};

fn synth(dir: &Path, teams: usize) -> RunConfig {
    let mut cfg = RunConfig::default();
    cfg.out = dir.join("data");
    cfg.synth.teams = teams;
    cfg.synth.matches_per_pairing = 2;
    cfg.synth.possessions = 120;
    cfg.valuation.partition.seed = 42;
    run_synth(&cfg).unwrap();
    let mut run = RunConfig::default();
    run.events = Some(cfg.out.join("events.csv"));
    run.roster = Some(cfg.out.join("roster.csv"));
    run.valuation.partition.c_max = 20;
    run.valuation.partition.c_min = 20;
    run.valuation.partition.seed = 42;
    run.min_passes = 20;
    run
}

fn manifest_paths(out: &Path) -> Vec<String> {
    fs::read_to_string(out.join(MANIFEST))
        .unwrap()
        .lines()
        .map(|l| l.split_once(' ').unwrap().0.to_string())
        .collect()
}

fn all_files(dir: &Path, root: &Path, out: &mut Vec<String>) {
    for e in fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        if p.is_dir() {
            all_files(&p, root, out);
        } else {
            out.push(p.strip_prefix(root).unwrap().to_string_lossy().replace('\\', "/"));
        }
    }
}

#[test]
fn two_team_league_emits_every_report() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = synth(tmp.path(), 2);
    cfg.out = tmp.path().join("run");
    let bundle = run_pipeline(&cfg, Stage::Report).unwrap();
    let listed = manifest_paths(&cfg.out);
    for must in [
        "events_augmented.csv",
        "qpass_records.csv",
        "rankings.csv",
        "rankings_FW.csv",
        "unsuccessful_cdf.csv",
        "beneficial_share.csv",
        "valuation_summary.csv",
        "teams/T01/field_values.csv",
        "teams/T01/partition_own.csv",
        "teams/T02/transitions.csv",
        "figures/T01/partition_own.svg",
        "figures/T02/values_opp.svg",
        "figures/unsuccessful_cdf.svg",
    ] {
        assert!(listed.iter().any(|p| p == must), "missing {must}");
    }
    assert!(listed.iter().any(|p| p.starts_with("figures/passes/")));
    let mut on_disk = Vec::new();
    all_files(&cfg.out, &cfg.out, &mut on_disk);
    on_disk.retain(|p| p != MANIFEST);
    on_disk.sort();
    assert_eq!(on_disk, listed);
    assert_eq!(bundle.files.len(), listed.len());

    let fv = fs::read_to_string(cfg.out.join("teams/T01/field_values.csv")).unwrap();
    assert_eq!(fv.lines().count(), 1 + 2 * 20);
    assert!(fv.starts_with("state_kind,cluster_id,value\nown,0,"));
    let ranks = fs::read_to_string(cfg.out.join("rankings.csv")).unwrap();
    assert!(ranks.starts_with("player,qpass_median,team,position,pass_count\n"));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = synth(tmp.path(), 3);
    cfg.out = tmp.path().join("a");
    run_pipeline(&cfg, Stage::Report).unwrap();
    cfg.out = tmp.path().join("b");
    run_pipeline(&cfg, Stage::Report).unwrap();
    let a = fs::read(tmp.path().join("a").join(MANIFEST)).unwrap();
    let b = fs::read(tmp.path().join("b").join(MANIFEST)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn missing_roster_is_a_config_error_with_no_output() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = synth(tmp.path(), 2);
    cfg.out = tmp.path().join("run");
    cfg.roster = Some(tmp.path().join("absent.csv"));
    let err = run_pipeline(&cfg, Stage::Report).unwrap_err();
    assert!(matches!(err, PipelineError::Config(_)));
    assert_eq!(err.exit_code(), exit_code::CONFIG);
    assert!(!cfg.out.exists());

    cfg.roster = None;
    let err = run_pipeline(&cfg, Stage::Rank).unwrap_err();
    assert_eq!(err.exit_code(), exit_code::CONFIG);
    // earlier stages do not need one
    run_pipeline(&cfg, Stage::Score).unwrap();
}

#[test]
fn early_stages_stop_early() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = synth(tmp.path(), 2);
    cfg.out = tmp.path().join("ingest");
    run_pipeline(&cfg, Stage::Ingest).unwrap();
    assert_eq!(manifest_paths(&cfg.out), ["events_augmented.csv"]);

    cfg.out = tmp.path().join("partition");
    cfg.team = Some("T02".into());
    run_pipeline(&cfg, Stage::Partition).unwrap();
    let listed = manifest_paths(&cfg.out);
    assert!(listed.contains(&"teams/T02/partition_own.csv".to_string()));
    assert!(!listed.iter().any(|p| p.starts_with("teams/T01")));
    let part = fs::read_to_string(cfg.out.join("teams/T02/partition_own.csv")).unwrap();
    assert!(part.starts_with("cluster_id,x_centroid,y_centroid,f_centroid\n"));
    assert_eq!(part.lines().count(), 21);

    cfg.team = Some("T99".into());
    assert_eq!(run_pipeline(&cfg, Stage::Partition).unwrap_err().exit_code(), exit_code::CONFIG);
}

#[test]
fn too_many_clusters_is_a_pipeline_error() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = synth(tmp.path(), 2);
    cfg.out = tmp.path().join("run");
    cfg.valuation.partition.c_max = 100_000;
    cfg.valuation.partition.c_min = 100_000;
    let err = run_pipeline(&cfg, Stage::Value).unwrap_err();
    assert_eq!(err.exit_code(), exit_code::PIPELINE, "{err}");
}

#[test]
fn config_file_and_overrides() {
    let mut cfg = RunConfig::default();
    assert_eq!(cfg.valuation.shot_value, 0.7);
    assert_eq!(
        (cfg.valuation.partition.c_max, cfg.valuation.partition.c_min, cfg.valuation.partition.c_step),
        (1000, 100, 50)
    );
    assert_eq!(cfg.min_passes, 100);
    cfg.apply_text("# run\ns = 0.5\ncmax=200\n\nmin-passes = 10\nreports = cdf,heatmap\n").unwrap();
    cfg.set("cmax", "300").unwrap();
    assert_eq!(cfg.valuation.shot_value, 0.5);
    assert_eq!(cfg.valuation.partition.c_max, 300);
    assert_eq!(cfg.min_passes, 10);
    assert!(cfg.reports.cdf && cfg.reports.heatmaps && !cfg.reports.pass_plots);
    for bad in ["nonsense = 1", "cmax = many", "no equals sign"] {
        let err = RunConfig::default().apply_text(bad).unwrap_err();
        assert_eq!(err.exit_code(), exit_code::CONFIG);
    }
    for key in qpass::config::KEYS {
        let value = match key {
            "reports" => "all",
            "s" | "kmeans-tolerance" | "clearance-rate" => "0.5",
            _ => "7",
        };
        RunConfig::default().set(key, value).unwrap();
    }
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qpass"))
}

#[test]
fn binary_prints_only_the_manifest_path() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    let out = bin()
        .args(["synth", "--teams", "2", "--matches-per-pairing", "1", "--possessions", "80", "--seed", "5", "--out"])
        .arg(&data)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), data.join(MANIFEST).display().to_string());

    let conf = tmp.path().join("run.conf");
    fs::write(&conf, format!("events = {}\ncmax = 10\ncmin = 10\nmin-passes = 5\n", data.join("events.csv").display())).unwrap();
    let run = tmp.path().join("run");
    let out = bin()
        .arg("all")
        .arg("--config")
        .arg(&conf)
        .arg("--roster")
        .arg(data.join("roster.csv"))
        .arg("--out")
        .arg(&run)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(stdout.lines().collect::<Vec<_>>(), [run.join(MANIFEST).display().to_string()]);
    assert!(!out.stderr.is_empty());
    let summary = fs::read_to_string(run.join("valuation_summary.csv")).unwrap();
    assert!(summary.lines().nth(1).unwrap().starts_with("T01,1,10,"));
}

#[test]
fn binary_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let events: PathBuf = tmp.path().join("events.csv");
    fs::write(&events, "match_id,seq,team_id,player_id,kind,x_start,y_start,x_end,y_end,flag\nM1,1,A,P,kick,1,2,3,4,1\n").unwrap();
    let code = |args: &[&str]| bin().args(args).output().unwrap().status.code().unwrap();
    let ev = events.to_str().unwrap();
    let out = tmp.path().join("o");
    let out = out.to_str().unwrap();
    assert_eq!(code(&["ingest", "--events", ev, "--out", out]), exit_code::INPUT);
    assert_eq!(code(&["all", "--events", ev, "--roster", "/nonexistent.csv", "--out", out]), exit_code::CONFIG);
    assert_eq!(code(&["ingest", "--out", out]), exit_code::CONFIG);
    assert_eq!(code(&["ingest", "--events", ev, "--cmin", "5", "--cmax", "4"]), exit_code::CONFIG);
}
