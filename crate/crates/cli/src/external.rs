//! External problems evaluated by a child process speaking a line protocol:
//! the parent writes one whitespace-separated decision vector per line to
//! the child's stdin and reads back one line `f g1 .. gm h1 .. hq`.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};
use std::sync::{Arc, Mutex};

use serde::Deserialize;
use ude3::{Error, ProblemSpec, RawEval};

use crate::CliError;

/// Declaration of an external problem.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExternalProblemFile {
    pub dimension: usize,
    pub lower_bounds: Vec<f64>,
    pub upper_bounds: Vec<f64>,
    pub n_ineq: usize,
    pub n_eq: usize,
    #[serde(default = "default_eq_tol")]
    pub eq_tol: f64,
    /// Executable path; must implement the line protocol deterministically.
    pub command: String,
    #[serde(default)]
    pub args: Vec<String>,
}

fn default_eq_tol() -> f64 {
    ude3::problems::DEFAULT_EQ_TOL
}

struct ChildIo {
    child: Child,
    stdin: ChildStdin,
    stdout: BufReader<ChildStdout>,
}

impl Drop for ChildIo {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

/// Parse a declaration file, spawn the child, and wrap the line protocol as
/// a problem evaluator. The child stays alive for the whole campaign;
/// requests are serialized across threads.
pub fn subprocess_evaluator(path: &Path) -> Result<ProblemSpec<f64>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        CliError::Config(format!("cannot read problem file {}: {e}", path.display()))
    })?;
    let decl: ExternalProblemFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("invalid problem file {}: {e}", path.display())))?;

    let mut child = Command::new(&decl.command)
        .args(&decl.args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .map_err(|e| CliError::Config(format!("cannot start evaluator `{}`: {e}", decl.command)))?;
    let stdin = child.stdin.take().expect("stdin was piped");
    let stdout = BufReader::new(child.stdout.take().expect("stdout was piped"));
    let io = Arc::new(Mutex::new(ChildIo {
        child,
        stdin,
        stdout,
    }));

    let n_ineq = decl.n_ineq;
    let n_eq = decl.n_eq;
    let evaluator = move |x: &[f64]| -> ude3::Result<RawEval<f64>> {
        let mut io = io.lock().expect("evaluator lock");
        let mut request = String::with_capacity(x.len() * 24);
        for (j, v) in x.iter().enumerate() {
            if j > 0 {
                request.push(' ');
            }
            request.push_str(&format!("{v}"));
        }
        request.push('\n');
        io.stdin
            .write_all(request.as_bytes())
            .and_then(|_| io.stdin.flush())
            .map_err(|e| Error::Evaluator(format!("cannot write to evaluator process: {e}")))?;
        let mut line = String::new();
        let n = io
            .stdout
            .read_line(&mut line)
            .map_err(|e| Error::Evaluator(format!("cannot read from evaluator process: {e}")))?;
        if n == 0 {
            return Err(Error::Evaluator(
                "evaluator process closed its output".into(),
            ));
        }
        parse_reply(&line, n_ineq, n_eq)
    };

    ProblemSpec::new(
        decl.dimension,
        decl.lower_bounds,
        decl.upper_bounds,
        decl.n_ineq,
        decl.n_eq,
        decl.eq_tol,
        Arc::new(evaluator),
    )
    .map_err(CliError::from)
}

/// Parse one reply line into `f`, `g`, and `h`, positionally.
pub fn parse_reply(line: &str, n_ineq: usize, n_eq: usize) -> ude3::Result<RawEval<f64>> {
    let trimmed = line.trim_end_matches(['\n', '\r']);
    let fields: Vec<&str> = trimmed.split_whitespace().collect();
    let expected = 1 + n_ineq + n_eq;
    if fields.len() != expected {
        return Err(Error::Evaluator(format!(
            "malformed evaluator reply {trimmed:?}: expected {expected} fields, got {}",
            fields.len()
        )));
    }
    let mut values = Vec::with_capacity(expected);
    for (i, field) in fields.iter().enumerate() {
        let value: f64 = field.parse().map_err(|_| {
            Error::Evaluator(format!(
                "malformed evaluator reply {trimmed:?}: field {i} ({field:?}) is not a number"
            ))
        })?;
        values.push(value);
    }
    let eq = values.split_off(1 + n_ineq);
    let ineq = values.split_off(1);
    Ok(RawEval {
        objective: values[0],
        ineq,
        eq,
    })
}
