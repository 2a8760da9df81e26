use std::path::PathBuf;

/// Process exit codes, one per failure class.
pub mod exit_code {
    pub const OK: i32 = 0;
    pub const CONFIG: i32 = 2;
    pub const INPUT: i32 = 3;
    pub const PIPELINE: i32 = 4;
    pub const OUTPUT: i32 = 5;
}

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("config: {0}")]
    Config(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("{path}: {source}")]
    Input {
        path: PathBuf,
        #[source]
        source: qpass_core::Error,
    },

    #[error("{stage}: {source}")]
    Pipeline {
        stage: &'static str,
        #[source]
        source: qpass_core::Error,
    },

    #[error("field values for team {team}: {source}")]
    Team {
        team: String,
        #[source]
        source: qpass_core::Error,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl PipelineError {
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config(_) => exit_code::CONFIG,
            PipelineError::Parse { .. } | PipelineError::Input { .. } => exit_code::INPUT,
            PipelineError::Pipeline { .. } | PipelineError::Team { .. } => exit_code::PIPELINE,
            PipelineError::Io { .. } | PipelineError::Csv { .. } => exit_code::OUTPUT,
        }
    }

    pub(crate) fn stage(stage: &'static str) -> impl FnOnce(qpass_core::Error) -> Self {
        move |source| PipelineError::Pipeline { stage, source }
    }

    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Self {
        let path = path.into();
        move |source| PipelineError::Io { path, source }
    }
}

pub type Result<T, E = PipelineError> = std::result::Result<T, E>;
