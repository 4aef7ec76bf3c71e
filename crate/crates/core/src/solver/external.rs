//! Adapter for external SAT solvers following SAT-competition conventions:
//! the formula is passed as a DIMACS file path (the last argument), exit code
//! 10 means SAT, 20 means UNSAT, and `v` lines carry the model.

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use wait_timeout::ChildExt;

use super::{Capabilities, SatOracle, SolveResult, SolveStats, SolverError};
use crate::cnf::{emit_dimacs, Cnf};

#[derive(Debug, Clone)]
pub struct ExternalSolver {
    program: PathBuf,
    args: Vec<OsString>,
    timeout: Option<Duration>,
}

impl ExternalSolver {
    /// Resolves `program` (a path, or a bare name looked up on `PATH`) and
    /// fails immediately if no executable file is found.
    pub fn new(program: impl AsRef<Path>) -> Result<Self, SolverError> {
        let program = resolve_executable(program.as_ref())?;
        Ok(ExternalSolver {
            program,
            args: Vec::new(),
            timeout: None,
        })
    }

    /// Extra arguments placed before the DIMACS path.
    pub fn with_args<I, S>(mut self, args: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<OsString>,
    {
        self.args = args.into_iter().map(Into::into).collect();
        self
    }

    pub fn with_timeout(mut self, timeout: Option<Duration>) -> Self {
        self.timeout = timeout;
        self
    }

    pub fn program(&self) -> &Path {
        &self.program
    }

    fn run(&self, f: &Cnf) -> Result<(Option<i32>, String), String> {
        let mut file = tempfile::Builder::new()
            .prefix("acount-")
            .suffix(".cnf")
            .tempfile()
            .map_err(|e| format!("cannot create temp file: {e}"))?;
        file.write_all(emit_dimacs(f).as_bytes())
            .and_then(|_| file.flush())
            .map_err(|e| format!("cannot write temp file: {e}"))?;

        let mut command = Command::new(&self.program);
        // own process group, so a timeout also reaches the solver's children
        #[cfg(unix)]
        std::os::unix::process::CommandExt::process_group(&mut command, 0);
        let mut child = command
            .args(&self.args)
            .arg(file.path())
            .stdin(Stdio::null())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(|e| format!("cannot spawn {}: {e}", self.program.display()))?;

        let mut stdout = child.stdout.take().expect("stdout is piped");
        let reader = std::thread::spawn(move || {
            let mut out = String::new();
            let _ = stdout.read_to_string(&mut out);
            out
        });

        let status = match self.timeout {
            Some(t) => match child.wait_timeout(t) {
                Ok(Some(status)) => status,
                Ok(None) => {
                    kill_group(&mut child);
                    let _ = child.wait();
                    let _ = reader.join();
                    return Err(format!("timeout after {:.3}s", t.as_secs_f64()));
                }
                Err(e) => return Err(format!("wait failed: {e}")),
            },
            None => child.wait().map_err(|e| format!("wait failed: {e}"))?,
        };
        let out = reader.join().map_err(|_| "stdout reader panicked".to_string())?;
        Ok((status.code(), out))
    }
}

impl SatOracle for ExternalSolver {
    fn decide(&self, f: &Cnf) -> SolveResult {
        let start = Instant::now();
        let outcome = self.run(f);
        let stats = SolveStats {
            wall: start.elapsed(),
            ..Default::default()
        };
        let (code, out) = match outcome {
            Ok(pair) => pair,
            Err(diagnostic) => return SolveResult::unknown(stats, diagnostic),
        };
        let status_line = out
            .lines()
            .find_map(|l| l.strip_prefix("s ").map(str::trim));
        match code {
            Some(10) => {
                if status_line.is_some_and(|s| s != "SATISFIABLE") {
                    return SolveResult::unknown(stats, "exit code 10 contradicts the status line");
                }
                match parse_model(&out, f.num_vars()) {
                    Ok(witness) => SolveResult::sat_checked(f, witness, stats),
                    Err(e) => SolveResult::unknown(stats, e),
                }
            }
            Some(20) => {
                if status_line.is_some_and(|s| s != "UNSATISFIABLE") {
                    return SolveResult::unknown(stats, "exit code 20 contradicts the status line");
                }
                SolveResult::unsat(stats)
            }
            Some(other) => SolveResult::unknown(stats, format!("unexpected exit code {other}")),
            None => SolveResult::unknown(stats, "solver terminated by a signal"),
        }
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities {
            witnesses: true,
            deterministic: false,
        }
    }

    fn name(&self) -> String {
        format!("external:{}", self.program.display())
    }
}

fn kill_group(child: &mut std::process::Child) {
    #[cfg(unix)]
    if let Ok(pid) = i32::try_from(child.id()) {
        // SAFETY: plain syscall on a process group we created
        unsafe {
            libc::kill(-pid, libc::SIGKILL);
        }
    }
    let _ = child.kill();
}

/// Collects `v` lines into an assignment. `Ok(None)` when there are none.
/// Variables the model does not mention default to false.
fn parse_model(out: &str, n: usize) -> Result<Option<Vec<bool>>, String> {
    let mut seen = false;
    let mut model = vec![false; n];
    for line in out.lines() {
        let Some(rest) = line.strip_prefix('v') else {
            continue;
        };
        if !(rest.is_empty() || rest.starts_with(char::is_whitespace)) {
            continue;
        }
        seen = true;
        for tok in rest.split_whitespace() {
            let value: i64 = tok.parse().map_err(|_| format!("bad model token `{tok}`"))?;
            if value == 0 {
                continue;
            }
            let var = value.unsigned_abs() as usize;
            if var > n {
                return Err(format!("model mentions variable {var} beyond {n}"));
            }
            model[var - 1] = value > 0;
        }
    }
    Ok(seen.then_some(model))
}

fn resolve_executable(program: &Path) -> Result<PathBuf, SolverError> {
    let is_bare_name = program.components().count() == 1 && !program.is_absolute();
    if is_bare_name && !program.exists() {
        if let Some(paths) = std::env::var_os("PATH") {
            for dir in std::env::split_paths(&paths) {
                let candidate = dir.join(program);
                if is_executable(&candidate) {
                    return Ok(candidate);
                }
            }
        }
        return Err(SolverError::Config(format!(
            "solver `{}` not found on PATH",
            program.display()
        )));
    }
    if is_executable(program) {
        Ok(program.to_path_buf())
    } else {
        Err(SolverError::Config(format!(
            "solver `{}` is not an executable file",
            program.display()
        )))
    }
}

fn is_executable(path: &Path) -> bool {
    let Ok(meta) = std::fs::metadata(path) else {
        return false;
    };
    if !meta.is_file() {
        return false;
    }
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        meta.permissions().mode() & 0o111 != 0
    }
    #[cfg(not(unix))]
    {
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_models() {
        assert_eq!(parse_model("s SATISFIABLE\nv 1 -2\nv 3 0\n", 3).unwrap(), Some(vec![true, false, true]));
        assert_eq!(parse_model("s UNSATISFIABLE\n", 3).unwrap(), None);
        assert!(parse_model("v 4 0\n", 3).is_err());
        assert!(parse_model("v x 0\n", 3).is_err());
    }

    #[test]
    fn missing_executable_is_a_config_error() {
        assert!(matches!(
            ExternalSolver::new("/definitely/not/here/solver"),
            Err(SolverError::Config(_))
        ));
        assert!(matches!(
            ExternalSolver::new("acount-no-such-solver-on-path"),
            Err(SolverError::Config(_))
        ));
    }
}
