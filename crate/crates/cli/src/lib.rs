//! Frontend plumbing for the `albo` binary: run one problem file and report
//! the verdict.

pub mod render;

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use albo_core::engine::{Blocking, EngineConfig};
use albo_core::normalize::conjoin_problem;
use albo_core::search::{
    solve, solve_observed, Limits, Recorder, SearchConfig, SearchError, Strategy, Verdict,
};
use albo_core::semantics::{parse_model, satisfied, write_model};
use albo_core::syntax::parse_problem;

pub use render::{render_trace, TraceMode};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_LIMIT: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub input: PathBuf,
    pub strategy: Strategy,
    pub limits: Limits,
    pub trace: Option<TraceMode>,
    /// Trace destination; standard error when absent.
    pub trace_out: Option<PathBuf>,
    pub model_out: Option<PathBuf>,
    pub una: Option<bool>,
    pub blocking: Blocking,
    pub merge_first: bool,
}

impl RunConfig {
    pub fn new(input: impl Into<PathBuf>) -> RunConfig {
        RunConfig {
            input: input.into(),
            strategy: Strategy::default(),
            limits: Limits::default(),
            trace: None,
            trace_out: None,
            model_out: None,
            una: None,
            blocking: Blocking::Eager,
            merge_first: true,
        }
    }
}

/// Runs the pipeline, writing the verdict to `out` and diagnostics to
/// `err`, and returns the exit status.
pub fn run(config: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match run_inner(config, out, err) {
        Ok(status) => status,
        Err((status, message)) => {
            let _ = writeln!(err, "albo: {message}");
            status
        }
    }
}

type Failure = (i32, String);

fn internal(message: impl std::fmt::Display) -> Failure {
    (EXIT_INTERNAL, message.to_string())
}

fn run_inner(config: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    let path = config.input.display();
    let text = fs::read_to_string(&config.input)
        .map_err(|e| (EXIT_INPUT, format!("cannot read {path}: {e}")))?;
    let mut problem = parse_problem(&text).map_err(|e| (EXIT_INPUT, format!("{path}: {e}")))?;
    if let Some(una) = config.una {
        problem.una = una;
    }
    let original = conjoin_problem(&problem).map_err(|e| (EXIT_INPUT, format!("{path}: {e}")))?;

    let search = SearchConfig {
        strategy: config.strategy,
        limits: config.limits,
        engine: EngineConfig {
            blocking: config.blocking,
        },
        merge_first: config.merge_first,
        exhaustive: false,
    };
    let mut recorder = Recorder::default();
    let result = if config.trace.is_some() {
        solve_observed(&problem, &search, &mut recorder)
    } else {
        solve(&problem, &search)
    };
    if let Some(mode) = config.trace {
        let rendered = render_trace(&recorder.events, mode);
        match &config.trace_out {
            Some(p) => fs::write(p, rendered)
                .map_err(|e| internal(format!("cannot write {}: {e}", p.display())))?,
            None => err.write_all(rendered.as_bytes()).map_err(internal)?,
        }
    }
    let verdict = match result {
        Ok(v) => v,
        Err(SearchError::Normalize(e)) => return Err((EXIT_INPUT, format!("{path}: {e}"))),
        Err(SearchError::Config(e)) => return Err((EXIT_INPUT, e)),
        Err(e) => return Err(internal(e)),
    };

    if let (Verdict::Satisfiable(sat), Some(p)) = (&verdict, &config.model_out) {
        let written = write_model(&sat.model);
        fs::write(p, &written)
            .map_err(|e| internal(format!("cannot write {}: {e}", p.display())))?;
        let reread = fs::read_to_string(p)
            .map_err(|e| internal(format!("cannot re-read {}: {e}", p.display())))?;
        let model = parse_model(&reread).map_err(internal)?;
        if !satisfied(&model, &original).map_err(internal)? {
            return Err(internal("written model does not satisfy the problem"));
        }
    }

    writeln!(out, "{verdict}").map_err(internal)?;
    Ok(match verdict {
        Verdict::ResourceLimit { .. } => EXIT_LIMIT,
        _ => EXIT_OK,
    })
}
