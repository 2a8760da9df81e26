use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qpass::{exit_code, run_pipeline, run_synth, PipelineError, RunConfig, Stage};

/// Pass valuation from event data: cluster the pitch per team, solve field
/// values, score every pass and rank players.
///
/// Exit codes: 0 ok, 2 configuration, 3 input data, 4 pipeline stage, 5 output.
#[derive(Parser, Debug)]
#[command(name = "qpass", version, about)]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand, Debug)]
enum Verb {
    /// Validate and augment events
    Ingest(Flags),
    /// Cluster each team's passes at the largest cluster count
    Partition(Flags),
    /// Run the full coarsening loop and solve field values
    Value(Flags),
    /// Score every pass
    Score(Flags),
    /// Write ranking and lost-ball tables
    Rank(Flags),
    /// Render figures
    Report(Flags),
    /// Generate a synthetic league
    Synth(Flags),
    /// Everything from ingest to report
    All(Flags),
}

/// Every flag mirrors a config file key.
#[derive(Args, Debug, Default)]
struct Flags {
    /// Flat `key = value` file; flags override it
    #[arg(long)]
    config: Option<PathBuf>,
    /// Event CSV, or a directory of them
    #[arg(long)]
    events: Option<String>,
    #[arg(long)]
    roster: Option<String>,
    /// Output directory
    #[arg(long)]
    out: Option<String>,
    /// Only this team
    #[arg(long)]
    team: Option<String>,
    /// Value of a shot [default: 0.7]
    #[arg(long)]
    s: Option<String>,
    /// [default: 1000]
    #[arg(long)]
    cmax: Option<String>,
    /// [default: 100]
    #[arg(long)]
    cmin: Option<String>,
    /// [default: 50]
    #[arg(long)]
    cstep: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// [default: 100]
    #[arg(long = "min-passes")]
    min_passes: Option<String>,
    #[arg(long = "batch-size")]
    batch_size: Option<String>,
    #[arg(long = "kmeans-iterations")]
    kmeans_iterations: Option<String>,
    #[arg(long = "kmeans-tolerance")]
    kmeans_tolerance: Option<String>,
    /// Passes per trajectory plot [default: 30]
    #[arg(long = "top-n")]
    top_n: Option<String>,
    /// Players plotted from each end of a position table [default: 5]
    #[arg(long = "plot-players")]
    plot_players: Option<String>,
    /// Comma list of partition, heatmap, passes, cdf, all, none
    #[arg(long)]
    reports: Option<String>,
    /// synth: number of teams [default: 20]
    #[arg(long)]
    teams: Option<String>,
    /// synth [default: 2]
    #[arg(long = "matches-per-pairing")]
    matches_per_pairing: Option<String>,
    /// synth: possessions per match [default: 218]
    #[arg(long)]
    possessions: Option<String>,
    /// synth: clearance rate for every team
    #[arg(long = "clearance-rate")]
    clearance_rate: Option<String>,
}

impl Flags {
    fn overrides(&self) -> [(&'static str, &Option<String>); 20] {
        [
            ("events", &self.events),
            ("roster", &self.roster),
            ("out", &self.out),
            ("team", &self.team),
            ("s", &self.s),
            ("cmax", &self.cmax),
            ("cmin", &self.cmin),
            ("cstep", &self.cstep),
            ("seed", &self.seed),
            ("min-passes", &self.min_passes),
            ("batch-size", &self.batch_size),
            ("kmeans-iterations", &self.kmeans_iterations),
            ("kmeans-tolerance", &self.kmeans_tolerance),
            ("top-n", &self.top_n),
            ("plot-players", &self.plot_players),
            ("reports", &self.reports),
            ("teams", &self.teams),
            ("matches-per-pairing", &self.matches_per_pairing),
            ("possessions", &self.possessions),
            ("clearance-rate", &self.clearance_rate),
        ]
    }

    fn config(&self) -> Result<RunConfig, PipelineError> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        for (key, value) in self.overrides() {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        Ok(cfg)
    }
}

fn run(verb: &Verb) -> Result<qpass::ReportBundle, PipelineError> {
    let (flags, stage) = match verb {
        Verb::Synth(f) => return run_synth(&f.config()?),
        Verb::Ingest(f) => (f, Stage::Ingest),
        Verb::Partition(f) => (f, Stage::Partition),
        Verb::Value(f) => (f, Stage::Value),
        Verb::Score(f) => (f, Stage::Score),
        Verb::Rank(f) => (f, Stage::Rank),
        Verb::Report(f) | Verb::All(f) => (f, Stage::Report),
    };
    run_pipeline(&flags.config()?, stage)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(&cli.verb) {
        Ok(bundle) => {
            println!("{}", bundle.manifest.display());
            ExitCode::from(exit_code::OK as u8)
        }
        Err(e) => {
            log::error!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
