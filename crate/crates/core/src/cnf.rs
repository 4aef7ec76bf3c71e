//! CNF formulas and the DIMACS text format.
//!
//! A [`Cnf`] declares its variable count up front; variables that never
//! occur in a clause are still free and count toward the solution set.

use std::fmt;

use thiserror::Error;

/// A signed occurrence of a variable. Variables are numbered from 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    var: u32,
    positive: bool,
}

impl Literal {
    pub fn new(var: u32, positive: bool) -> Self {
        assert!(var >= 1, "variables are numbered from 1");
        Literal { var, positive }
    }

    pub fn pos(var: u32) -> Self {
        Self::new(var, true)
    }

    pub fn neg(var: u32) -> Self {
        Self::new(var, false)
    }

    /// Builds a literal from its DIMACS integer form. Zero is not a literal.
    pub fn from_dimacs(value: i64) -> Option<Self> {
        if value == 0 || value.unsigned_abs() > u32::MAX as u64 {
            return None;
        }
        Some(Literal::new(value.unsigned_abs() as u32, value > 0))
    }

    pub fn to_dimacs(self) -> i64 {
        if self.positive {
            self.var as i64
        } else {
            -(self.var as i64)
        }
    }

    pub fn var(self) -> u32 {
        self.var
    }

    pub fn is_positive(self) -> bool {
        self.positive
    }

    pub fn negated(self) -> Self {
        Literal {
            var: self.var,
            positive: !self.positive,
        }
    }

    /// Truth value under an assignment indexed by `var - 1`.
    pub fn eval(self, assignment: &[bool]) -> bool {
        assignment[self.var as usize - 1] == self.positive
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

/// A disjunction of literals. The empty clause is the falsum.
///
/// Clauses are normalized on construction: repeated literals collapse to
/// their first occurrence and a clause holding both `x` and `¬x` is rejected
/// as tautological.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Clause {
    literals: Vec<Literal>,
}

impl Clause {
    /// Normalizes `literals`; returns `None` for a tautology.
    pub fn new(literals: impl IntoIterator<Item = Literal>) -> Option<Self> {
        let mut out: Vec<Literal> = Vec::new();
        for lit in literals {
            if out.contains(&lit) {
                continue;
            }
            if out.contains(&lit.negated()) {
                return None;
            }
            out.push(lit);
        }
        Some(Clause { literals: out })
    }

    pub fn falsum() -> Self {
        Clause {
            literals: Vec::new(),
        }
    }

    pub fn literals(&self) -> &[Literal] {
        &self.literals
    }

    pub fn len(&self) -> usize {
        self.literals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }

    pub fn max_var(&self) -> u32 {
        self.literals.iter().map(|l| l.var()).max().unwrap_or(0)
    }

    pub fn is_satisfied_by(&self, assignment: &[bool]) -> bool {
        self.literals.iter().any(|l| l.eval(assignment))
    }

    /// Same literal set regardless of order.
    fn canonical(&self) -> Vec<Literal> {
        let mut lits = self.literals.clone();
        lits.sort();
        lits
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CnfError {
    #[error("literal {literal} exceeds the declared variable count {num_vars}")]
    VariableOutOfRange { literal: i64, num_vars: usize },
    #[error("variable count mismatch: {left} vs {right}")]
    VariableCountMismatch { left: usize, right: usize },
}

/// A CNF formula over variables `1..=num_vars`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cnf {
    num_vars: usize,
    clauses: Vec<Clause>,
}

impl Cnf {
    /// The empty (always true) formula.
    pub fn new(num_vars: usize) -> Self {
        Cnf {
            num_vars,
            clauses: Vec::new(),
        }
    }

    pub fn from_clauses(num_vars: usize, clauses: Vec<Clause>) -> Result<Self, CnfError> {
        let mut cnf = Cnf::new(num_vars);
        for clause in clauses {
            cnf.add_clause(clause)?;
        }
        Ok(cnf)
    }

    /// Convenience constructor from DIMACS-style integer clauses.
    /// Tautological clauses are dropped.
    pub fn from_dimacs_clauses(num_vars: usize, clauses: &[&[i64]]) -> Result<Self, CnfError> {
        let mut cnf = Cnf::new(num_vars);
        for raw in clauses {
            let mut lits = Vec::with_capacity(raw.len());
            for &v in raw.iter() {
                let lit = Literal::from_dimacs(v).ok_or(CnfError::VariableOutOfRange {
                    literal: v,
                    num_vars,
                })?;
                lits.push(lit);
            }
            if let Some(clause) = Clause::new(lits) {
                cnf.add_clause(clause)?;
            }
        }
        Ok(cnf)
    }

    pub fn add_clause(&mut self, clause: Clause) -> Result<(), CnfError> {
        if let Some(bad) = clause
            .literals()
            .iter()
            .find(|l| l.var() as usize > self.num_vars)
        {
            return Err(CnfError::VariableOutOfRange {
                literal: bad.to_dimacs(),
                num_vars: self.num_vars,
            });
        }
        self.clauses.push(clause);
        Ok(())
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    /// Total number of literal occurrences.
    pub fn size(&self) -> usize {
        self.clauses.iter().map(Clause::len).sum()
    }

    pub fn max_clause_width(&self) -> usize {
        self.clauses.iter().map(Clause::len).max().unwrap_or(0)
    }

    pub fn is_satisfied_by(&self, assignment: &[bool]) -> bool {
        debug_assert_eq!(assignment.len(), self.num_vars);
        self.clauses.iter().all(|c| c.is_satisfied_by(assignment))
    }

    /// Structural equality up to clause order and literal order.
    pub fn same_clause_set(&self, other: &Cnf) -> bool {
        if self.num_vars != other.num_vars || self.clauses.len() != other.clauses.len() {
            return false;
        }
        let mut a: Vec<_> = self.clauses.iter().map(Clause::canonical).collect();
        let mut b: Vec<_> = other.clauses.iter().map(Clause::canonical).collect();
        a.sort();
        b.sort();
        a == b
    }

    /// Clause masks for formulas over at most 64 variables: bit `v-1` of the
    /// first mask marks a positive occurrence of `v`, of the second a
    /// negative one.
    pub fn clause_masks(&self) -> Option<Vec<(u64, u64)>> {
        if self.num_vars > 64 {
            return None;
        }
        Some(
            self.clauses
                .iter()
                .map(|c| {
                    c.literals().iter().fold((0u64, 0u64), |(p, n), l| {
                        let bit = 1u64 << (l.var() - 1);
                        if l.is_positive() {
                            (p | bit, n)
                        } else {
                            (p, n | bit)
                        }
                    })
                })
                .collect(),
        )
    }
}

/// Clause union of two formulas over the same variables.
pub fn conjoin(f: &Cnf, g: &Cnf) -> Result<Cnf, CnfError> {
    if f.num_vars != g.num_vars {
        return Err(CnfError::VariableCountMismatch {
            left: f.num_vars,
            right: g.num_vars,
        });
    }
    let mut clauses = Vec::with_capacity(f.clauses.len() + g.clauses.len());
    clauses.extend_from_slice(&f.clauses);
    clauses.extend_from_slice(&g.clauses);
    Ok(Cnf {
        num_vars: f.num_vars,
        clauses,
    })
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: malformed problem line: {reason}")]
    BadHeader { line: usize, reason: String },
    #[error("line {line}: missing `p cnf` header before clauses")]
    MissingHeader { line: usize },
    #[error("line {line}: token `{token}` is not an integer")]
    BadToken { line: usize, token: String },
    #[error("line {line}: literal {literal} out of range for {num_vars} variables")]
    LiteralOutOfRange {
        line: usize,
        literal: i64,
        num_vars: usize,
    },
    #[error("input contains no `p cnf` header")]
    NoHeader,
}

/// A parsed DIMACS file: the formula, non-fatal diagnostics and the raw
/// comment lines (text after the leading `c`).
#[derive(Debug, Clone)]
pub struct Dimacs {
    pub cnf: Cnf,
    pub warnings: Vec<String>,
    pub comments: Vec<String>,
}

/// Parses DIMACS CNF text. Tautological clauses are dropped and repeated
/// literals collapsed; a header/body clause-count mismatch is a warning.
pub fn parse_dimacs(text: &str) -> Result<Dimacs, ParseError> {
    let mut header: Option<(usize, usize)> = None;
    let mut cnf = Cnf::new(0);
    let mut warnings = Vec::new();
    let mut comments = Vec::new();
    let mut pending: Vec<Literal> = Vec::new();
    let mut raw_clauses = 0usize;
    let mut tautologies = 0usize;

    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('c') {
            if rest.is_empty() || rest.starts_with(char::is_whitespace) {
                comments.push(rest.trim_start().to_string());
                continue;
            }
        }
        if trimmed.starts_with('%') {
            // SATLIB end marker
            break;
        }
        if trimmed.starts_with('p') {
            if header.is_some() {
                return Err(ParseError::BadHeader {
                    line: line_no,
                    reason: "duplicate problem line".into(),
                });
            }
            let parts: Vec<&str> = trimmed.split_whitespace().collect();
            if parts.len() != 4 || parts[0] != "p" || parts[1] != "cnf" {
                return Err(ParseError::BadHeader {
                    line: line_no,
                    reason: format!("expected `p cnf <vars> <clauses>`, got `{trimmed}`"),
                });
            }
            let n = parts[2].parse::<usize>().map_err(|_| ParseError::BadHeader {
                line: line_no,
                reason: format!("variable count `{}` is not a nonnegative integer", parts[2]),
            })?;
            let m = parts[3].parse::<usize>().map_err(|_| ParseError::BadHeader {
                line: line_no,
                reason: format!("clause count `{}` is not a nonnegative integer", parts[3]),
            })?;
            header = Some((n, m));
            cnf = Cnf::new(n);
            continue;
        }
        let Some((n, _)) = header else {
            return Err(ParseError::MissingHeader { line: line_no });
        };
        for token in trimmed.split_whitespace() {
            let value = token.parse::<i64>().map_err(|_| ParseError::BadToken {
                line: line_no,
                token: token.to_string(),
            })?;
            if value == 0 {
                raw_clauses += 1;
                match Clause::new(pending.drain(..)) {
                    Some(clause) => cnf.clauses.push(clause),
                    None => tautologies += 1,
                }
                continue;
            }
            if value.unsigned_abs() as usize > n {
                return Err(ParseError::LiteralOutOfRange {
                    line: line_no,
                    literal: value,
                    num_vars: n,
                });
            }
            pending.push(Literal::from_dimacs(value).expect("nonzero literal"));
        }
    }

    let Some((_, declared)) = header else {
        return Err(ParseError::NoHeader);
    };
    if !pending.is_empty() {
        warnings.push("last clause is not terminated by 0; accepted as-is".to_string());
        raw_clauses += 1;
        match Clause::new(pending.drain(..)) {
            Some(clause) => cnf.clauses.push(clause),
            None => tautologies += 1,
        }
    }
    if raw_clauses != declared {
        warnings.push(format!(
            "header declares {declared} clauses but {raw_clauses} were read"
        ));
    }
    if tautologies > 0 {
        warnings.push(format!("dropped {tautologies} tautological clause(s)"));
    }
    Ok(Dimacs {
        cnf,
        warnings,
        comments,
    })
}

/// Serializes a formula as DIMACS CNF text.
pub fn emit_dimacs(f: &Cnf) -> String {
    let mut out = format!("p cnf {} {}\n", f.num_vars, f.clauses.len());
    for clause in &f.clauses {
        for lit in clause.literals() {
            out.push_str(&lit.to_dimacs().to_string());
            out.push(' ');
        }
        out.push_str("0\n");
    }
    out
}

/// Random formula with `m` clauses, each over `width` distinct variables
/// (fewer if `width > n`) with uniform signs.
pub fn random_kcnf<R: rand::Rng + ?Sized>(n: usize, m: usize, width: usize, rng: &mut R) -> Cnf {
    let width = width.min(n);
    let mut f = Cnf::new(n);
    for _ in 0..m {
        let vars = rand::seq::index::sample(rng, n, width);
        let lits: Vec<Literal> = vars.iter().map(|v| Literal::new(v as u32 + 1, rng.random())).collect();
        f.clauses.push(Clause::new(lits).expect("distinct variables"));
    }
    f
}
