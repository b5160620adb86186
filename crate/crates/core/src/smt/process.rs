//! Running an external SMT-LIB solver as a subprocess.

use std::io::{Read, Write};
use std::process::{Command, Stdio};
use std::thread;
use std::time::Duration;

use thiserror::Error;
use wait_timeout::ChildExt;

use super::model::{parse_solver_output, SolverVerdict};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("could not start solver `{command}`: {reason}")]
    SolverSpawnFailure { command: String, reason: String },
    #[error("malformed solver output: {0}")]
    MalformedSolverOutput(String),
}

/// How to invoke the solver. The script is written to its stdin.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverConfig {
    pub command: Vec<String>,
    pub timeout: Duration,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            command: vec!["z3".into(), "-smt2".into(), "-in".into()],
            timeout: Duration::from_secs(60),
        }
    }
}

impl SolverConfig {
    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = timeout;
        self
    }

    /// Splits a command line on whitespace.
    pub fn with_command(mut self, command_line: &str) -> Self {
        self.command = command_line.split_whitespace().map(str::to_string).collect();
        self
    }

    fn display(&self) -> String {
        self.command.join(" ")
    }
}

/// Runs `script` through the solver. A zero timeout, or a solver that does
/// not finish in time, gives [`SolverVerdict::Unknown`].
pub fn run_solver(script: &str, cfg: &SolverConfig) -> Result<SolverVerdict, SolverError> {
    if cfg.timeout.is_zero() {
        return Ok(SolverVerdict::Unknown("timeout".into()));
    }
    let spawn_err = |reason: String| SolverError::SolverSpawnFailure { command: cfg.display(), reason };
    let (program, args) = cfg.command.split_first().ok_or_else(|| spawn_err("empty command".into()))?;
    let mut child = Command::new(program)
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .map_err(|e| spawn_err(e.to_string()))?;
    let mut stdin = child.stdin.take().expect("piped stdin");
    let input = script.to_string();
    let writer = thread::spawn(move || {
        // A solver that exits early closes the pipe; its output still decides.
        let _ = stdin.write_all(input.as_bytes());
    });
    let mut stdout = child.stdout.take().expect("piped stdout");
    let reader = thread::spawn(move || {
        let mut out = String::new();
        let _ = stdout.read_to_string(&mut out);
        out
    });
    let status = child.wait_timeout(cfg.timeout).map_err(|e| spawn_err(e.to_string()))?;
    if status.is_none() {
        let _ = child.kill();
        let _ = child.wait();
        let _ = writer.join();
        let _ = reader.join();
        return Ok(SolverVerdict::Unknown("timeout".into()));
    }
    let _ = writer.join();
    let out = reader.join().unwrap_or_default();
    parse_solver_output(&out).map_err(|e| SolverError::MalformedSolverOutput(e.0))
}
