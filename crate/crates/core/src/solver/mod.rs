//! Satisfiability oracles and model counting on top of them.
//!
//! [`Dpll`] is the built-in oracle; [`ExternalSolver`] shells out to any
//! SAT-competition style binary. [`count_up_to`] enumerates models through
//! an oracle with blocking clauses, [`exact_count`] enumerates assignments
//! directly and serves as the reference count.

mod dpll;
mod external;

use std::time::Duration;

use serde::Serialize;
use thiserror::Error;

use crate::cnf::{Clause, Cnf, Literal};

pub use dpll::Dpll;
pub use external::ExternalSolver;

/// Default ceiling on `n` for exhaustive assignment enumeration.
pub const DEFAULT_ENUMERATION_BUDGET: usize = 26;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Sat,
    Unsat,
    /// A resource limit tripped or the oracle misbehaved. Never a verdict.
    Unknown,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SolveStats {
    pub decisions: u64,
    pub propagations: u64,
    #[serde(skip)]
    pub wall: Duration,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveResult {
    pub status: Status,
    /// Satisfying assignment indexed by `var - 1`, when the oracle gave one.
    pub witness: Option<Vec<bool>>,
    pub stats: SolveStats,
    pub diagnostic: Option<String>,
}

impl SolveResult {
    pub fn unsat(stats: SolveStats) -> Self {
        SolveResult {
            status: Status::Unsat,
            witness: None,
            stats,
            diagnostic: None,
        }
    }

    pub fn unknown(stats: SolveStats, diagnostic: impl Into<String>) -> Self {
        SolveResult {
            status: Status::Unknown,
            witness: None,
            stats,
            diagnostic: Some(diagnostic.into()),
        }
    }

    /// A SAT answer whose witness, if any, has been checked against `f`.
    /// A witness that fails the check demotes the answer to UNKNOWN.
    pub fn sat_checked(f: &Cnf, witness: Option<Vec<bool>>, stats: SolveStats) -> Self {
        if let Some(w) = &witness {
            if w.len() != f.num_vars() || !f.is_satisfied_by(w) {
                return SolveResult::unknown(stats, "oracle returned an assignment that does not satisfy the formula");
            }
        }
        SolveResult {
            status: Status::Sat,
            witness,
            stats,
            diagnostic: None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ResourceLimits {
    pub timeout: Option<Duration>,
    pub max_decisions: Option<u64>,
    /// Passed along to external solvers that accept one; advisory.
    pub memory_hint_mb: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Capabilities {
    /// SAT answers carry a model, so the oracle can drive enumeration.
    pub witnesses: bool,
    /// Identical formulas always get identical answers.
    pub deterministic: bool,
}

/// Answers "is this formula satisfiable".
pub trait SatOracle: Send + Sync {
    fn decide(&self, f: &Cnf) -> SolveResult;

    fn capabilities(&self) -> Capabilities;

    fn name(&self) -> String;
}

impl<T: SatOracle + ?Sized> SatOracle for &T {
    fn decide(&self, f: &Cnf) -> SolveResult {
        (**self).decide(f)
    }
    fn capabilities(&self) -> Capabilities {
        (**self).capabilities()
    }
    fn name(&self) -> String {
        (**self).name()
    }
}

impl<T: SatOracle + ?Sized> SatOracle for Box<T> {
    fn decide(&self, f: &Cnf) -> SolveResult {
        (**self).decide(f)
    }
    fn capabilities(&self) -> Capabilities {
        (**self).capabilities()
    }
    fn name(&self) -> String {
        (**self).name()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolverError {
    #[error("{n} variables exceed the enumeration budget of {budget}")]
    OverBudget { n: usize, budget: usize },
    #[error("oracle gave no answer: {0}")]
    OracleUnknown(String),
    #[error("oracle answered SAT without a model; enumeration needs witnesses")]
    MissingWitness,
    #[error("solver configuration: {0}")]
    Config(String),
}

/// Number of satisfying assignments by visiting all `2^n` of them.
pub fn exact_count(f: &Cnf) -> Result<u64, SolverError> {
    exact_count_with_budget(f, DEFAULT_ENUMERATION_BUDGET)
}

pub fn exact_count_with_budget(f: &Cnf, budget: usize) -> Result<u64, SolverError> {
    let n = f.num_vars();
    if n > budget || n > 63 {
        return Err(SolverError::OverBudget { n, budget: budget.min(63) });
    }
    let masks = f.clause_masks().expect("n <= 63");
    let full = if n == 0 { 0 } else { u64::MAX >> (64 - n) };
    let mut count = 0u64;
    for x in 0..=full {
        let not_x = !x & full;
        if masks.iter().all(|&(pos, neg)| (x & pos) | (not_x & neg) != 0) {
            count += 1;
        }
    }
    Ok(count)
}

/// `min(|sol(f)|, cap)`, found by asking the oracle for a model, blocking
/// it with a clause over all `n` variables, and repeating.
pub fn count_up_to<O: SatOracle + ?Sized>(f: &Cnf, cap: u64, oracle: &O) -> Result<u64, SolverError> {
    let mut g = f.clone();
    let mut count = 0u64;
    while count < cap {
        let result = oracle.decide(&g);
        match result.status {
            Status::Unsat => break,
            Status::Unknown => {
                return Err(SolverError::OracleUnknown(
                    result.diagnostic.unwrap_or_else(|| "no diagnostic".into()),
                ))
            }
            Status::Sat => {
                let witness = result.witness.ok_or(SolverError::MissingWitness)?;
                count += 1;
                g.add_clause(blocking_clause(&witness))
                    .expect("blocking clause uses the formula's own variables");
            }
        }
    }
    Ok(count)
}

/// The clause excluding exactly the assignment `model`.
pub fn blocking_clause(model: &[bool]) -> Clause {
    Clause::new(
        model
            .iter()
            .enumerate()
            .map(|(i, &value)| Literal::new(i as u32 + 1, !value)),
    )
    .expect("one literal per variable")
}
