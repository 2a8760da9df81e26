//! Files, figures and the command line around `qpass-core`.
//!
//! Exit codes of the `qpass` binary:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 2 | bad configuration or missing input path |
//! | 3 | malformed or invalid input data |
//! | 4 | a pipeline stage failed |
//! | 5 | an output could not be written |

pub mod config;
pub mod error;
pub mod export;
pub mod io;
pub mod pipeline;
pub mod render;

pub use config::{Reports, RunConfig, SynthOptions};
pub use error::{exit_code, PipelineError, Result};
pub use pipeline::{run_pipeline, run_synth, write_manifest, ReportBundle, Stage, MANIFEST};
