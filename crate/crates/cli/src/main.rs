//! Command-line interface for the stability computations.
//!
//! Exit codes: 0 success, 2 precondition failure (the semistable
//! assumption), 3 size-cap refusal, 1 anything else.

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use gitstates::io::{
    emit_stats_table, render_monomials, run, run_stream, ProblemOptions, ProblemSpec,
    ResultDocument, RunError, Task, PROBLEM_SCHEMA,
};
use gitstates::oracle;
use gitstates::roots::RootFamily;
use gitstates::stability::{semistable_max_states, stable_max_states};
use std::fs;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "gitstates",
    about = "Exact stable/semistable/polystable loci for linearized classical group actions",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ProblemArgs {
    /// Problem spec file (JSON); flags below override nothing when given.
    #[arg(long, conflicts_with_all = ["family", "rank", "rep", "tasks"])]
    spec: Option<String>,
    /// Root system family: A, B, C or D.
    #[arg(long)]
    family: Option<RootFamily>,
    /// Root system rank.
    #[arg(long)]
    rank: Option<usize>,
    /// Representation expression, e.g. "wedge(2, irrep(2,0,0))".
    #[arg(long)]
    rep: Option<String>,
    /// Comma-separated tasks: stable, semistable, polystable, superset-stream.
    #[arg(long, value_delimiter = ',', default_values_t = [
        "stable".to_string(), "semistable".to_string(), "polystable".to_string()
    ])]
    tasks: Vec<String>,
    /// Refine with the full Weyl group instead of the ray stabilizers.
    #[arg(long)]
    use_full_weyl: bool,
    /// Enable the sufficient-maximality shortcut (result-identical).
    #[arg(long)]
    fastpath: bool,
    /// Number of enumeration workers.
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Treat the problem as a bare torus action (no Weyl pruning).
    #[arg(long)]
    reductive_fallback: bool,
    /// Deduplicate stream records by state hash.
    #[arg(long)]
    stream_dedupe: bool,
    /// Checkpoint file path (stream mode).
    #[arg(long)]
    checkpoint: Option<String>,
    /// Checkpoint frequency in subsets.
    #[arg(long)]
    checkpoint_every: Option<u64>,
    /// Output file (result document or stream records).
    #[arg(long)]
    output: Option<String>,
    /// Refuse tasks needing more than this many subsets.
    #[arg(long)]
    size_cap: Option<u128>,
}

impl ProblemArgs {
    fn into_spec(self) -> anyhow::Result<ProblemSpec> {
        if let Some(path) = &self.spec {
            let text = fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
            let mut spec = ProblemSpec::from_json(&text)?;
            // command-line paths still apply to a file-borne spec
            if self.output.is_some() {
                spec.options.output_path = self.output;
            }
            if self.checkpoint.is_some() {
                spec.options.checkpoint_path = self.checkpoint;
            }
            return Ok(spec);
        }
        let (Some(family), Some(rank), Some(rep)) = (self.family, self.rank, self.rep.clone())
        else {
            anyhow::bail!("either --spec or all of --family/--rank/--rep are required");
        };
        let tasks = self
            .tasks
            .iter()
            .map(|t| match t.as_str() {
                "stable" => Ok(Task::Stable),
                "semistable" => Ok(Task::Semistable),
                "polystable" => Ok(Task::Polystable),
                "superset-stream" => Ok(Task::SupersetStream),
                other => Err(anyhow::anyhow!("unknown task {other:?}")),
            })
            .collect::<anyhow::Result<Vec<_>>>()?;
        Ok(ProblemSpec {
            schema: PROBLEM_SCHEMA.to_string(),
            family,
            rank,
            rep,
            tasks,
            options: ProblemOptions {
                use_full_weyl: self.use_full_weyl,
                fastpath: self.fastpath,
                workers: self.workers,
                reductive_fallback: self.reductive_fallback,
                stream_dedupe: self.stream_dedupe,
                checkpoint_path: self.checkpoint,
                checkpoint_every: self.checkpoint_every,
                output_path: self.output,
                size_cap: self.size_cap,
            },
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Compute the requested state families and write a result document.
    Run(ProblemArgs),
    /// Print a statistics table over result documents.
    Stats {
        /// Result document files.
        files: Vec<String>,
        /// Tab-separated output instead of aligned text.
        #[arg(long)]
        tsv: bool,
    },
    /// Render a hypersurface document's states as monomial families.
    Render {
        /// Result document file.
        file: String,
    },
    /// Resume a checkpointed superset-stream run.
    Resume(ProblemArgs),
    /// Cross-check the optimized algorithms against brute-force oracles.
    #[command(hide = true)]
    Verify {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Number of random subsets for the Hilbert-Mumford consistency check.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
    },
}

fn fail(code: i32, error_code: &str, message: &str) -> ExitCode {
    eprintln!(
        "{}",
        serde_json::json!({"error": {"code": error_code, "message": message}})
    );
    ExitCode::from(code as u8)
}

fn fail_run(err: RunError) -> ExitCode {
    fail(err.exit_code(), err.code(), &err.to_string())
}

fn cmd_run(args: ProblemArgs) -> anyhow::Result<ExitCode> {
    let spec = args.into_spec()?;
    if spec.tasks.contains(&Task::SupersetStream) {
        match run_stream(&spec, false) {
            Ok(summary) => {
                println!(
                    "{}",
                    serde_json::json!({
                        "subsets_processed": summary.subsets_processed.to_string(),
                        "emitted": summary.emitted,
                        "distinct": summary.distinct,
                        "last_cursor": summary.last_cursor.map(|c| c.to_string()),
                    })
                );
                return Ok(ExitCode::SUCCESS);
            }
            Err(err) => return Ok(fail_run(err)),
        }
    }
    match run(&spec) {
        Ok(doc) => {
            let text = doc.to_json();
            match &spec.options.output_path {
                Some(path) => fs::write(path, &text).with_context(|| format!("writing {path}"))?,
                None => println!("{text}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Err(err) => Ok(fail_run(err)),
    }
}

fn cmd_stats(files: &[String], tsv: bool) -> anyhow::Result<ExitCode> {
    let mut docs = Vec::new();
    for path in files {
        let text = fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
        docs.push(ResultDocument::from_json(&text)?);
    }
    print!("{}", emit_stats_table(&docs, tsv));
    Ok(ExitCode::SUCCESS)
}

fn cmd_render(file: &str) -> anyhow::Result<ExitCode> {
    let text = fs::read_to_string(file).with_context(|| format!("reading {file}"))?;
    let doc = ResultDocument::from_json(&text)?;
    match render_monomials(&doc) {
        Ok(rendered) => {
            print!("{rendered}");
            Ok(ExitCode::SUCCESS)
        }
        Err(e) => Ok(fail(1, "unsupported-rendering", &e.to_string())),
    }
}

fn cmd_resume(args: ProblemArgs) -> anyhow::Result<ExitCode> {
    let spec = args.into_spec()?;
    if spec.tasks.contains(&Task::SupersetStream) {
        return match run_stream(&spec, true) {
            Ok(summary) => {
                println!(
                    "{}",
                    serde_json::json!({
                        "subsets_processed": summary.subsets_processed.to_string(),
                        "emitted": summary.emitted,
                        "distinct": summary.distinct,
                        "last_cursor": summary.last_cursor.map(|c| c.to_string()),
                    })
                );
                Ok(ExitCode::SUCCESS)
            }
            Err(err) => Ok(fail_run(err)),
        };
    }
    // checkpointed stable/semistable enumeration
    match gitstates::io::resume_run(&spec) {
        Ok(doc) => {
            let text = doc.to_json();
            match &spec.options.output_path {
                Some(path) => fs::write(path, &text).with_context(|| format!("writing {path}"))?,
                None => println!("{text}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Err(err) => Ok(fail_run(err)),
    }
}

fn cmd_verify(args: ProblemArgs, samples: usize, seed: u64) -> anyhow::Result<ExitCode> {
    let spec = args.into_spec()?;
    let (problem, _level, _ms) = match gitstates::io::build_problem(&spec) {
        Ok(x) => x,
        Err(err) => return Ok(fail_run(err)),
    };
    let options = spec.options.stability();
    let stable = match stable_max_states(&problem, &options) {
        Ok(o) => o,
        Err(e) => return Ok(fail(1, "domain", &e.to_string())),
    };
    let semistable = match semistable_max_states(&problem, &options) {
        Ok(o) => o,
        Err(e) => return Ok(fail(2, "precondition", &e.to_string())),
    };

    let brute_s = match oracle::brute_nonstable(&problem) {
        Ok(b) => b,
        Err(e) => return Ok(fail(3, "size-cap", &e.to_string())),
    };
    let brute_ss = oracle::brute_unstable(&problem).expect("cap already checked");
    let fast_s = oracle::orbit_rep_set(&problem, &stable.states);
    let fast_ss = oracle::orbit_rep_set(&problem, &semistable.states);
    let s_ok = brute_s == fast_s;
    let ss_ok = brute_ss == fast_ss;
    println!(
        "oracle nonstable: {} ({} orbits)",
        if s_ok { "MATCH" } else { "MISMATCH" },
        brute_s.len()
    );
    println!(
        "oracle unstable:  {} ({} orbits)",
        if ss_ok { "MATCH" } else { "MISMATCH" },
        brute_ss.len()
    );
    let report = oracle::hilbert_mumford_consistency(
        &problem,
        &stable.states,
        &semistable.states,
        samples,
        seed,
    );
    println!(
        "hilbert-mumford consistency: {}/{} samples agree",
        report.samples - report.disagreements,
        report.samples
    );
    if let Some(d) = &report.first_disagreement {
        println!("first disagreement: {d}");
    }
    if s_ok && ss_ok && report.consistent() {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(1))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Stats { files, tsv } => cmd_stats(&files, tsv),
        Command::Render { file } => cmd_render(&file),
        Command::Resume(args) => cmd_resume(args),
        Command::Verify {
            problem,
            samples,
            seed,
        } => cmd_verify(problem, samples, seed),
    };
    match result {
        Ok(code) => code,
        Err(err) => fail(1, "error", &format!("{err:#}")),
    }
}
