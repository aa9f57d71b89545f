//! The run orchestrator: executes requested tasks in dependency order and
//! assembles the result document.

use super::checkpoint::{problem_hash, Checkpoint};
use super::document::{
    external_chars, DocumentError, ResultDocument, StateDocument, StatsBlock, StratumDocument,
    TimingsBlock, RESULT_SCHEMA,
};
use super::{ProblemSpec, Task, STREAM_SCHEMA};
use crate::roots::{build, RootError, RootSystemSpec};
use crate::stability::{
    assumption_check, binomial_u128, essential_semistable, essential_stable,
    max_states_checkpointed, polystable_strata_with_prededup, semistable_max_states,
    stable_max_states, superset_stream, EnumerationKind, MaxStatesOutcome, Problem, StabilityError,
    State,
};
use crate::weights::{evaluate, parse_rep_expr, ParseError, WeightError};
use serde::{Deserialize, Serialize};
use std::fs;
use std::io::Write;
use std::time::Instant;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("configuration error: {0}")]
    Config(#[from] RootError),
    #[error("representation expression: {0}")]
    Parse(#[from] ParseError),
    #[error("weight system: {0}")]
    Weights(#[from] WeightError),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("precondition failure: {0}")]
    Precondition(String),
    #[error("size cap exceeded: task needs {needed} subsets, cap is {cap}")]
    SizeCap { needed: u128, cap: u128 },
    #[error("invalid problem spec: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Document(#[from] DocumentError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl From<StabilityError> for RunError {
    fn from(e: StabilityError) -> Self {
        match e {
            StabilityError::AssumptionViolated(detail) => RunError::Precondition(detail),
            StabilityError::CheckpointSink(io) => RunError::Io(io),
            other => RunError::Domain(other.to_string()),
        }
    }
}

impl RunError {
    /// Stable machine-readable error code.
    pub fn code(&self) -> &'static str {
        match self {
            RunError::Config(_) => "config",
            RunError::Parse(_) => "parse",
            RunError::Weights(_) => "weights",
            RunError::Domain(_) => "domain",
            RunError::Precondition(_) => "precondition",
            RunError::SizeCap { .. } => "size-cap",
            RunError::InvalidSpec(_) => "invalid-spec",
            RunError::Document(_) => "document",
            RunError::Io(_) => "io",
        }
    }

    /// Process exit code: 2 for precondition failures, 3 for size-cap
    /// refusals, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Precondition(_) => 2,
            RunError::SizeCap { .. } => 3,
            _ => 1,
        }
    }
}

fn millis(start: Instant) -> u64 {
    start.elapsed().as_millis() as u64
}

/// Builds the indexed problem for a spec: root data, weight system support,
/// and the type-A level, timing the weight-system phase.
pub fn build_problem(
    spec: &ProblemSpec,
) -> Result<(Problem, Option<crate::exact::Int>, u64), RunError> {
    let data = build(RootSystemSpec {
        family: spec.family,
        rank: spec.rank,
    })?;
    let expr = parse_rep_expr(&spec.rep)?;
    let start = Instant::now();
    let ws = evaluate(&data, &expr)?;
    let weights_ms = millis(start);
    let problem = Problem::from_weight_system(data, &ws).map_err(RunError::from)?;
    Ok((problem, ws.level, weights_ms))
}

fn check_cap(spec: &ProblemSpec, pool: usize, k: usize) -> Result<(), RunError> {
    if let Some(cap) = spec.options.size_cap {
        let needed = binomial_u128(pool, k);
        if needed > cap {
            return Err(RunError::SizeCap { needed, cap });
        }
    }
    Ok(())
}

fn state_documents(xi_external: &[Vec<i64>], states: &[State]) -> Vec<StateDocument> {
    states
        .iter()
        .map(|s| StateDocument {
            witness: s
                .witness
                .as_ref()
                .expect("maximal states carry witnesses")
                .0
                 .0
                .iter()
                .map(|x| x.to_string())
                .collect(),
            characters: s.mask.iter().map(|i| xi_external[i].clone()).collect(),
        })
        .collect()
}

fn phase_name(kind: EnumerationKind) -> &'static str {
    match kind {
        EnumerationKind::NonStable => "stable",
        EnumerationKind::Unstable => "semistable",
    }
}

fn pool_size(problem: &Problem, spec: &ProblemSpec, kind: EnumerationKind) -> usize {
    if spec.options.reductive_fallback {
        problem.chars.iter().filter(|c| !c.is_zero()).count()
    } else {
        match kind {
            EnumerationKind::NonStable => essential_stable(problem).len(),
            EnumerationKind::Unstable => essential_semistable(problem).len(),
        }
    }
}

/// Runs one enumeration task, checkpointing to the configured path when one
/// is set (resuming from it when `resume` holds).
fn run_task(
    problem: &Problem,
    spec: &ProblemSpec,
    kind: EnumerationKind,
    hash: &str,
    resume: bool,
) -> Result<MaxStatesOutcome, RunError> {
    let options = spec.options.stability();
    let Some(cp_path) = &spec.options.checkpoint_path else {
        return Ok(match kind {
            EnumerationKind::NonStable => stable_max_states(problem, &options)?,
            EnumerationKind::Unstable => semistable_max_states(problem, &options)?,
        });
    };

    let phase = phase_name(kind);
    let (start_cursor, seed) = if resume {
        let cp = Checkpoint::from_json(&fs::read_to_string(cp_path)?)?;
        if cp.problem_hash != hash {
            return Err(RunError::InvalidSpec(format!(
                "checkpoint belongs to a different problem (hash {} != {})",
                cp.problem_hash, hash
            )));
        }
        if cp.phase != phase {
            return Err(RunError::InvalidSpec(format!(
                "checkpoint phase {:?} does not match the requested task {phase:?}",
                cp.phase
            )));
        }
        (cp.cursor_value()? + 1, cp.antichain_states(problem)?)
    } else {
        (0, Vec::new())
    };

    let every = spec.options.checkpoint_every.unwrap_or(10_000);
    let path = cp_path.clone();
    let hash = hash.to_string();
    let mut write = move |cursor: u128, antichain: &[State]| -> std::io::Result<()> {
        let mut cp = Checkpoint::new(hash.clone(), phase, cursor, antichain.len() as u64);
        cp.set_antichain(antichain);
        let tmp = format!("{path}.tmp");
        fs::write(&tmp, cp.to_json())?;
        fs::rename(&tmp, &path)
    };
    Ok(max_states_checkpointed(
        problem,
        &options,
        kind,
        start_cursor,
        seed,
        every,
        &mut write,
    )?)
}

fn execute(spec: &ProblemSpec, resume: bool) -> Result<ResultDocument, RunError> {
    if spec.tasks.contains(&Task::SupersetStream) {
        return Err(RunError::InvalidSpec(
            "superset-stream runs through run_stream, not run".into(),
        ));
    }
    if spec.tasks.is_empty() {
        return Err(RunError::InvalidSpec("no tasks requested".into()));
    }
    if spec.options.checkpoint_path.is_some() {
        let single_enumeration = spec.tasks == [Task::Stable] || spec.tasks == [Task::Semistable];
        if !single_enumeration {
            return Err(RunError::InvalidSpec(
                "checkpointing requires a single stable or semistable task".into(),
            ));
        }
        if spec.options.workers > 1 {
            return Err(RunError::InvalidSpec(
                "checkpointed runs are single-worker".into(),
            ));
        }
    } else if resume {
        return Err(RunError::InvalidSpec(
            "resume requires a checkpoint path".into(),
        ));
    }

    let (problem, level, weights_ms) = build_problem(spec)?;
    let (xi_external, scale) = external_chars(&problem.data, level.as_ref(), &problem.chars);
    let options = spec.options.stability();
    let rank = problem.rank();
    let hash = if spec.options.checkpoint_path.is_some() {
        problem_hash(spec, &problem)
    } else {
        String::new()
    };

    let mut stats = StatsBlock {
        xi_v: problem.chars.len(),
        timings: TimingsBlock {
            weights_ms,
            ..Default::default()
        },
        ..Default::default()
    };
    let mut stable_out: Option<MaxStatesOutcome> = None;
    let mut semistable_out: Option<MaxStatesOutcome> = None;
    let mut polystable_doc: Option<Vec<StratumDocument>> = None;

    let want = |t: Task| spec.tasks.contains(&t);
    let need_stable = want(Task::Stable) || want(Task::Polystable);

    if need_stable {
        check_cap(
            spec,
            pool_size(&problem, spec, EnumerationKind::NonStable),
            rank - 1,
        )?;
        let start = Instant::now();
        let out = run_task(&problem, spec, EnumerationKind::NonStable, &hash, resume)?;
        stats.timings.stable_ms = Some(millis(start));
        stats.a3 = Some(out.essential.len());
        stats.p_s = Some(out.states.len());
        stats.refine_dropped_stable = Some(out.refine_dropped);
        stable_out = Some(out);
    }

    if want(Task::Semistable) {
        let report = assumption_check(&problem);
        stats.assumption_full_dimensional = Some(report.full_dimensional);
        stats.assumption_origin_interior = Some(report.origin_interior);
        if !report.holds() && !options.reductive_fallback {
            return Err(RunError::Precondition(report.detail));
        }
        check_cap(
            spec,
            pool_size(&problem, spec, EnumerationKind::Unstable),
            rank,
        )?;
        let start = Instant::now();
        let out = run_task(&problem, spec, EnumerationKind::Unstable, &hash, resume)?;
        stats.timings.semistable_ms = Some(millis(start));
        stats.b2 = Some(out.essential.len());
        stats.p_ss = Some(out.states.len());
        stats.refine_dropped_semistable = Some(out.refine_dropped);
        semistable_out = Some(out);
    }

    if want(Task::Polystable) {
        let p_s = &stable_out.as_ref().expect("stable computed above").states;
        let start = Instant::now();
        let (strata, prededup) =
            polystable_strata_with_prededup(&problem, p_s, options.reductive_fallback);
        stats.timings.polystable_ms = Some(millis(start));
        stats.p_ps = Some(strata.len());
        stats.polystable_prededup = Some(prededup);
        polystable_doc = Some(
            strata
                .iter()
                .map(|s| StratumDocument {
                    characters: s.mask.iter().map(|i| xi_external[i].clone()).collect(),
                    span_dim: s.span_dim.expect("strata carry span dimensions"),
                })
                .collect(),
        );
    }

    Ok(ResultDocument {
        schema: RESULT_SCHEMA.to_string(),
        problem: spec.clone(),
        scale,
        xi_v: xi_external.clone(),
        stable: stable_out
            .as_ref()
            .map(|o| state_documents(&xi_external, &o.states)),
        semistable: semistable_out
            .as_ref()
            .map(|o| state_documents(&xi_external, &o.states)),
        polystable: polystable_doc,
        stats,
    })
}

/// Executes the requested tasks (`superset-stream` excluded; see
/// [`run_stream`]) and returns the result document. Deterministic for a
/// fixed spec up to the timing fields.
pub fn run(spec: &ProblemSpec) -> Result<ResultDocument, RunError> {
    execute(spec, false)
}

/// Continues a checkpointed single-task run from its saved cursor and
/// antichain, producing the same document as an uninterrupted run.
pub fn resume_run(spec: &ProblemSpec) -> Result<ResultDocument, RunError> {
    execute(spec, true)
}

/// Header line of a stream file.
#[derive(Serialize, Deserialize)]
struct StreamHeader {
    schema: String,
    problem: ProblemSpec,
    problem_hash: String,
    xi_v: Vec<Vec<i64>>,
}

/// One stream record: the subset cursor, the witness, and the state as
/// indices into the header's `xi_v`.
#[derive(Serialize, Deserialize)]
struct StreamRecordDoc {
    cursor: String,
    lambda: Vec<String>,
    chars: Vec<usize>,
}

#[derive(Clone, Debug, Default)]
pub struct StreamRunSummary {
    pub subsets_processed: u128,
    pub emitted: u64,
    pub distinct: Option<u64>,
    pub last_cursor: Option<u128>,
}

fn write_stream_checkpoint(
    path: &str,
    hash: &str,
    cursor: u128,
    emitted: u64,
    hashes: Option<&std::collections::HashSet<u64>>,
) -> Result<(), RunError> {
    let mut cp = Checkpoint::new(hash.to_string(), "superset-stream", cursor, emitted);
    if let Some(set) = hashes {
        let mut sorted: Vec<String> = set.iter().map(|h| format!("{h:016x}")).collect();
        sorted.sort();
        cp.dedupe_hashes = Some(sorted);
    }
    let tmp = format!("{path}.tmp");
    fs::write(&tmp, cp.to_json())?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Runs the superset stream: every chamber-witnessed candidate state is
/// appended to the output file as a newline-delimited record, with periodic
/// checkpoints when a checkpoint path is configured. With `resume` the run
/// continues after the checkpointed cursor.
pub fn run_stream(spec: &ProblemSpec, resume: bool) -> Result<StreamRunSummary, RunError> {
    let output_path = spec
        .options
        .output_path
        .as_ref()
        .ok_or_else(|| RunError::InvalidSpec("superset-stream requires an output path".into()))?
        .clone();

    let (problem, level, _weights_ms) = build_problem(spec)?;
    let (xi_external, _) = external_chars(&problem.data, level.as_ref(), &problem.chars);
    let hash = problem_hash(spec, &problem);
    let rank = problem.rank();
    let pool = essential_stable(&problem).len();
    check_cap(spec, pool, rank - 1)?;

    let mut start_cursor: u128 = 0;
    let mut seeded_hashes: Option<std::collections::HashSet<u64>> = None;
    let mut seeded_emitted: u64 = 0;
    if resume {
        let cp_path = spec
            .options
            .checkpoint_path
            .as_ref()
            .ok_or_else(|| RunError::InvalidSpec("resume requires a checkpoint path".into()))?;
        let cp = Checkpoint::from_json(&fs::read_to_string(cp_path)?)?;
        if cp.problem_hash != hash {
            return Err(RunError::InvalidSpec(format!(
                "checkpoint belongs to a different problem (hash {} != {})",
                cp.problem_hash, hash
            )));
        }
        if cp.phase != "superset-stream" {
            return Err(RunError::InvalidSpec(format!(
                "checkpoint phase {:?} does not match superset-stream",
                cp.phase
            )));
        }
        start_cursor = cp.cursor_value()? + 1;
        seeded_emitted = cp.emitted;
        if spec.options.stream_dedupe {
            let hashes = cp
                .dedupe_hashes
                .as_ref()
                .ok_or_else(|| {
                    RunError::InvalidSpec(
                        "checkpoint lacks dedupe hashes required for a dedupe resume".into(),
                    )
                })?
                .iter()
                .map(|h| {
                    u64::from_str_radix(h, 16).map_err(|_| {
                        RunError::Document(DocumentError::Malformed(format!("bad hash {h:?}")))
                    })
                })
                .collect::<Result<std::collections::HashSet<u64>, RunError>>()?;
            seeded_hashes = Some(hashes);
        }
    }

    let mut file = fs::OpenOptions::new()
        .create(true)
        .append(resume)
        .truncate(!resume)
        .write(true)
        .open(&output_path)?;
    if !resume {
        let header = StreamHeader {
            schema: STREAM_SCHEMA.to_string(),
            problem: spec.clone(),
            problem_hash: hash.clone(),
            xi_v: xi_external,
        };
        writeln!(file, "{}", serde_json::to_string(&header).expect("header"))?;
    }

    let checkpoint_path = spec.options.checkpoint_path.clone();
    let checkpoint_every = spec
        .options
        .checkpoint_every
        .unwrap_or(if checkpoint_path.is_some() {
            10_000
        } else {
            u64::MAX
        });

    let dedupe = spec.options.stream_dedupe;
    let summary = superset_stream::<RunError>(
        &problem,
        start_cursor,
        dedupe,
        seeded_hashes,
        Some(checkpoint_every),
        |rec| {
            let doc = StreamRecordDoc {
                cursor: rec.cursor.to_string(),
                lambda: rec.lambda.0.iter().map(|x| x.to_string()).collect(),
                chars: rec.mask.iter().collect(),
            };
            writeln!(file, "{}", serde_json::to_string(&doc).expect("record"))
                .map_err(RunError::from)
        },
        |progress| {
            if let Some(path) = &checkpoint_path {
                write_stream_checkpoint(
                    path,
                    &hash,
                    progress.cursor,
                    seeded_emitted + progress.emitted,
                    progress.distinct_hashes,
                )?;
            }
            Ok(())
        },
    )?;
    file.flush()?;

    Ok(StreamRunSummary {
        subsets_processed: summary.subsets_processed,
        emitted: seeded_emitted + summary.emitted,
        distinct: summary.distinct,
        last_cursor: summary.last_cursor,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roots::RootFamily;

    fn spec(family: RootFamily, rank: usize, rep: &str, tasks: &[Task]) -> ProblemSpec {
        ProblemSpec::new(family, rank, rep, tasks)
    }

    #[test]
    fn cubic_surfaces_stats_row() {
        let doc = run(&spec(
            RootFamily::A,
            3,
            "irrep(3,0,0)",
            &[Task::Stable, Task::Semistable, Task::Polystable],
        ))
        .unwrap();
        assert_eq!(doc.stats.xi_v, 20);
        assert_eq!(doc.stats.a3, Some(8));
        assert_eq!(doc.stats.b2, Some(15));
        assert_eq!(doc.stats.p_s, Some(3));
        assert_eq!(doc.stats.p_ss, Some(3));
        assert_eq!(doc.stats.p_ps, Some(3));
        assert_eq!(doc.stats.polystable_prededup, Some(5));
        assert_eq!(doc.stats.refine_dropped_stable, Some(0));
        assert_eq!(doc.scale.a_projection_scale, Some(4));
        assert_eq!(doc.scale.level, Some(3));
    }

    #[test]
    fn document_roundtrip_is_lossless() {
        let doc = run(&spec(
            RootFamily::A,
            2,
            "irrep(3,0)",
            &[Task::Stable, Task::Semistable, Task::Polystable],
        ))
        .unwrap();
        let text = doc.to_json();
        let back = ResultDocument::from_json(&text).unwrap();
        assert_eq!(back, doc);
        let wrong = text.replace("result/v1", "result/v0");
        assert!(ResultDocument::from_json(&wrong).is_err());
    }

    #[test]
    fn size_cap_refusal() {
        let mut s = spec(RootFamily::A, 3, "irrep(3,0,0)", &[Task::Stable]);
        s.options.size_cap = Some(3);
        let err = run(&s).unwrap_err();
        assert_eq!(err.exit_code(), 3);
        assert_eq!(err.code(), "size-cap");
    }

    #[test]
    fn precondition_failure_surfaces_with_code() {
        // a torus-degenerate input: the trivial representation of A1
        let s = spec(RootFamily::A, 1, "irrep(0)", &[Task::Semistable]);
        let err = run(&s).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert_eq!(err.code(), "precondition");
    }

    #[test]
    fn worker_counts_give_identical_documents() {
        let tasks = [Task::Stable, Task::Semistable, Task::Polystable];
        let mut specs = Vec::new();
        for workers in [1usize, 4, 8] {
            let mut s = spec(RootFamily::A, 3, "irrep(3,0,0)", &tasks);
            s.options.workers = workers;
            specs.push(s);
        }
        let docs: Vec<String> = specs
            .iter()
            .map(|s| {
                let mut d = run(s).unwrap().without_timings();
                // the echoed spec records the worker count; normalize it
                d.problem.options.workers = 1;
                d.to_json()
            })
            .collect();
        assert_eq!(docs[0], docs[1]);
        assert_eq!(docs[0], docs[2]);
    }

    #[test]
    fn interrupted_checkpointed_run_resumes_to_identical_document() {
        let dir = std::env::temp_dir();
        let cp_path = dir.join(format!("gitstates-cp-{}.json", std::process::id()));
        let cp_str = cp_path.to_str().unwrap().to_string();

        let mut s = spec(RootFamily::A, 3, "irrep(3,0,0)", &[Task::Semistable]);
        s.options.checkpoint_path = Some(cp_str.clone());
        s.options.checkpoint_every = Some(7);
        let uninterrupted = run(&s).unwrap().without_timings();
        let final_cp = Checkpoint::from_json(&fs::read_to_string(&cp_path).unwrap()).unwrap();
        assert_eq!(final_cp.phase, "semistable");
        assert!(!final_cp.antichain.is_empty());

        // simulate an interruption by rewinding the cursor roughly halfway
        // and shrinking the antichain to what was retained by then
        let (problem, _, _) = build_problem(&s).unwrap();
        let hash = problem_hash(&s, &problem);
        let total = final_cp.cursor_value().unwrap();
        let mid = total / 2;
        let mut collected: Option<Checkpoint> = None;
        {
            let mut capture = |cursor: u128, antichain: &[State]| -> std::io::Result<()> {
                if cursor <= mid {
                    let mut cp = Checkpoint::new(hash.clone(), "semistable", cursor, 0);
                    cp.set_antichain(antichain);
                    collected = Some(cp);
                }
                Ok(())
            };
            max_states_checkpointed(
                &problem,
                &s.options.stability(),
                EnumerationKind::Unstable,
                0,
                Vec::new(),
                1,
                &mut capture,
            )
            .unwrap();
        }
        fs::write(&cp_path, collected.unwrap().to_json()).unwrap();

        let resumed = resume_run(&s).unwrap().without_timings();
        assert_eq!(resumed, uninterrupted);
        fs::remove_file(&cp_path).ok();
    }

    #[test]
    fn checkpoint_requires_single_task_and_one_worker() {
        let mut s = spec(
            RootFamily::A,
            2,
            "irrep(3,0)",
            &[Task::Stable, Task::Semistable],
        );
        s.options.checkpoint_path = Some("/tmp/never-written".into());
        assert!(matches!(run(&s), Err(RunError::InvalidSpec(_))));
        let mut s = spec(RootFamily::A, 2, "irrep(3,0)", &[Task::Stable]);
        s.options.checkpoint_path = Some("/tmp/never-written".into());
        s.options.workers = 4;
        assert!(matches!(run(&s), Err(RunError::InvalidSpec(_))));
    }
}
