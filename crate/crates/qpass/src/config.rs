//! Run configuration: defaults, a flat `key = value` file, then command line
//! flags of the same names.

use std::path::{Path, PathBuf};

use qpass_core::ValuationConfig;

use crate::error::{PipelineError, Result};

/// Figures that `report` renders.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Reports {
    pub partition_maps: bool,
    pub heatmaps: bool,
    pub pass_plots: bool,
    pub cdf: bool,
}

impl Default for Reports {
    fn default() -> Self {
        Self {
            partition_maps: true,
            heatmaps: true,
            pass_plots: true,
            cdf: true,
        }
    }
}

impl Reports {
    fn parse(value: &str) -> Result<Self> {
        let mut r = Reports {
            partition_maps: false,
            heatmaps: false,
            pass_plots: false,
            cdf: false,
        };
        for item in value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            match item {
                "all" => r = Reports::default(),
                "none" => {}
                "partition" => r.partition_maps = true,
                "heatmap" => r.heatmaps = true,
                "passes" => r.pass_plots = true,
                "cdf" => r.cdf = true,
                other => {
                    return Err(PipelineError::Config(format!(
                        "reports: unknown figure `{other}` (partition, heatmap, passes, cdf, all, none)"
                    )))
                }
            }
        }
        Ok(r)
    }
}

/// Options of the `synth` verb.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthOptions {
    pub teams: usize,
    pub matches_per_pairing: usize,
    pub possessions: usize,
    /// Overrides every team's clearance rate.
    pub clearance_rate: Option<f64>,
}

impl Default for SynthOptions {
    fn default() -> Self {
        Self {
            teams: 20,
            matches_per_pairing: 2,
            possessions: 218,
            clearance_rate: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub events: Option<PathBuf>,
    pub roster: Option<PathBuf>,
    pub out: PathBuf,
    pub team: Option<String>,
    pub valuation: ValuationConfig,
    pub min_passes: usize,
    /// Passes drawn per player trajectory plot.
    pub top_n: usize,
    /// Players plotted from each end of every position table.
    pub plot_players: usize,
    pub reports: Reports,
    pub synth: SynthOptions,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            events: None,
            roster: None,
            out: PathBuf::from("qpass-out"),
            team: None,
            valuation: ValuationConfig::default(),
            min_passes: 100,
            top_n: 30,
            plot_players: 5,
            reports: Reports::default(),
            synth: SynthOptions::default(),
        }
    }
}

/// Every key accepted in a config file; each is also a `--key` flag.
pub const KEYS: [&str; 20] = [
    "events",
    "roster",
    "out",
    "team",
    "s",
    "cmax",
    "cmin",
    "cstep",
    "seed",
    "min-passes",
    "batch-size",
    "kmeans-iterations",
    "kmeans-tolerance",
    "top-n",
    "plot-players",
    "reports",
    "teams",
    "matches-per-pairing",
    "possessions",
    "clearance-rate",
];

fn number<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| PipelineError::Config(format!("{key}: cannot parse `{value}`")))
}

impl RunConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        let p = &mut self.valuation.partition;
        match key {
            "events" => self.events = Some(PathBuf::from(value)),
            "roster" => self.roster = Some(PathBuf::from(value)),
            "out" => self.out = PathBuf::from(value),
            "team" => self.team = Some(value.to_string()),
            "s" => self.valuation.shot_value = number(key, value)?,
            "cmax" => p.c_max = number(key, value)?,
            "cmin" => p.c_min = number(key, value)?,
            "cstep" => p.c_step = number(key, value)?,
            "seed" => p.seed = number(key, value)?,
            "batch-size" => p.batch_size = number(key, value)?,
            "kmeans-iterations" => p.max_iterations = number(key, value)?,
            "kmeans-tolerance" => p.tolerance = number(key, value)?,
            "min-passes" => self.min_passes = number(key, value)?,
            "top-n" => self.top_n = number(key, value)?,
            "plot-players" => self.plot_players = number(key, value)?,
            "reports" => self.reports = Reports::parse(value)?,
            "teams" => self.synth.teams = number(key, value)?,
            "matches-per-pairing" => self.synth.matches_per_pairing = number(key, value)?,
            "possessions" => self.synth.possessions = number(key, value)?,
            "clearance-rate" => self.synth.clearance_rate = Some(number(key, value)?),
            other => return Err(PipelineError::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    /// Applies a config file. Blank lines and `#` comments are skipped.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                PipelineError::Config(format!("line {}: expected `key = value`", i + 1))
            })?;
            self.set(key.trim(), value)
                .map_err(|e| PipelineError::Config(format!("line {}: {e}", i + 1)))?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| PipelineError::Config(format!("{}: {e}", path.display())))?;
        self.apply_text(&text)
    }

    /// Checks values; core parameters are checked by their own validators.
    pub fn validate(&self) -> Result<()> {
        self.valuation
            .validate()
            .map_err(|e| PipelineError::Config(e.to_string()))?;
        if self.top_n == 0 {
            return Err(PipelineError::Config("top-n must be at least 1".into()));
        }
        Ok(())
    }
}
