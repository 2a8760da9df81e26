use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("event log validation failed: {0}")]
    Validation(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("cannot build {clusters} clusters from {points} distinct points; lower the cluster count")]
    TooFewPoints { points: usize, clusters: usize },

    #[error("team `{0}` does not appear in any match")]
    UnknownTeam(String),

    #[error("player `{0}` has no scored passes")]
    UnknownPlayer(String),

    #[error("player `{0}` is missing from the roster")]
    MissingRoster(String),

    #[error("{what} {index} has no cluster assignment")]
    MissingAssignment { what: &'static str, index: usize },

    #[error("pass {index} ends a possession but has no landing cluster in the other clustering")]
    MissingLandingCluster { index: usize },

    #[error("transition system is singular: states {0:?} cannot reach an absorbing state")]
    TrappedStates(Vec<usize>),

    #[error("fixed-point iteration did not converge within {iterations} iterations (last change {change:e})")]
    NonConvergence { iterations: usize, change: f64 },

    #[error("{capped} of {walks} random walks hit the step cap")]
    UnreliableMonteCarlo { capped: usize, walks: usize },

    #[error("iteration with {clusters} clusters failed: {source}")]
    Iteration {
        clusters: usize,
        #[source]
        source: Box<Error>,
    },
}
