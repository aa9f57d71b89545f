//! Problem specification parsing, result serialization, statistics
//! reporting, monomial rendering and run management.
//!
//! All file formats are versioned by a `schema` field and unknown versions
//! are refused.

mod checkpoint;
mod document;
mod render;
mod run;
mod stats;

pub use checkpoint::{problem_hash, Checkpoint, CheckpointState, CHECKPOINT_SCHEMA};
pub use document::{
    external_chars, DocumentError, ResultDocument, ScaleInfo, StateDocument, StatsBlock,
    StratumDocument, TimingsBlock, RESULT_SCHEMA,
};
pub use render::render_monomials;
pub use render::RenderError;
pub use run::{build_problem, resume_run, run, run_stream, RunError, StreamRunSummary};
pub use stats::emit_stats_table;

use crate::stability::StabilityOptions;
use serde::{Deserialize, Serialize};

pub const PROBLEM_SCHEMA: &str = "gitstates/problem/v1";
pub const STREAM_SCHEMA: &str = "gitstates/stream/v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Stable,
    Semistable,
    Polystable,
    SupersetStream,
}

/// Options mirrored by the CLI flags.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProblemOptions {
    pub use_full_weyl: bool,
    pub fastpath: bool,
    pub workers: usize,
    pub reductive_fallback: bool,
    pub stream_dedupe: bool,
    pub checkpoint_path: Option<String>,
    pub checkpoint_every: Option<u64>,
    pub output_path: Option<String>,
    /// Upper bound on the number of enumerated subsets per task.
    pub size_cap: Option<u128>,
}

impl Default for ProblemOptions {
    fn default() -> Self {
        ProblemOptions {
            use_full_weyl: false,
            fastpath: false,
            workers: 1,
            reductive_fallback: false,
            stream_dedupe: false,
            checkpoint_path: None,
            checkpoint_every: None,
            output_path: None,
            size_cap: None,
        }
    }
}

impl ProblemOptions {
    pub fn stability(&self) -> StabilityOptions {
        StabilityOptions {
            use_full_weyl: self.use_full_weyl,
            fastpath: self.fastpath,
            workers: self.workers.max(1),
            reductive_fallback: self.reductive_fallback,
        }
    }
}

/// A full problem description: group, representation, tasks and options.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub schema: String,
    pub family: crate::roots::RootFamily,
    pub rank: usize,
    /// Representation expression, e.g. `wedge(2, irrep(2,0,0))`.
    pub rep: String,
    pub tasks: Vec<Task>,
    #[serde(default)]
    pub options: ProblemOptions,
}

impl ProblemSpec {
    pub fn new(family: crate::roots::RootFamily, rank: usize, rep: &str, tasks: &[Task]) -> Self {
        ProblemSpec {
            schema: PROBLEM_SCHEMA.to_string(),
            family,
            rank,
            rep: rep.to_string(),
            tasks: tasks.to_vec(),
            options: ProblemOptions::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<ProblemSpec, DocumentError> {
        let spec: ProblemSpec =
            serde_json::from_str(text).map_err(|e| DocumentError::Malformed(e.to_string()))?;
        if spec.schema != PROBLEM_SCHEMA {
            return Err(DocumentError::UnknownSchema(spec.schema));
        }
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serialization cannot fail")
    }
}
