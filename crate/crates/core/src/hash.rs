//! Sparse random linear hash functions over GF(2) and their CNF encoding.
//!
//! A row `h_i(x) = ⊕_{j∈S_i} x_j` together with a target bit `b_i` is an
//! [`XorConstraint`]. Rows are drawn either with every coordinate included
//! independently with probability `p` (the Bernoulli family) or as a
//! uniformly random `k`-subset (the fixed-width family). Parity
//! constraints are expanded directly into `2^{|S|-1}` clauses over the
//! variables of `S`, so the encoding never introduces auxiliary variables.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cnf::{Clause, Cnf, Literal};

/// Largest row support the direct expansion accepts (2^23 clauses).
pub const MAX_ENCODABLE_SUPPORT: usize = 24;

#[derive(Debug, Error, PartialEq)]
pub enum HashError {
    #[error("bias p = {0} must lie in (0, 1/2]")]
    InvalidBias(f64),
    #[error("row width k = {k} must lie in 1..={n}")]
    InvalidWidth { k: usize, n: usize },
    #[error("a hash function needs at least one row")]
    NoRows,
    #[error("support index {index} outside 1..={n}")]
    IndexOutOfRange { index: u32, n: usize },
    #[error("malformed xor comment `{0}`")]
    BadXorComment(String),
}

/// One parity constraint `⊕_{j∈support} x_j = target`.
///
/// The support is kept sorted and duplicate-free. An empty support is the
/// constant-0 parity, so the constraint is trivially true for target 0 and
/// unsatisfiable for target 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct XorConstraint {
    support: Vec<u32>,
    target: bool,
}

impl XorConstraint {
    pub fn new(support: impl IntoIterator<Item = u32>, target: bool) -> Self {
        let mut support: Vec<u32> = support.into_iter().collect();
        support.sort_unstable();
        support.dedup();
        assert!(support.first().is_none_or(|&v| v >= 1), "variables are numbered from 1");
        XorConstraint { support, target }
    }

    pub fn support(&self) -> &[u32] {
        &self.support
    }

    pub fn target(&self) -> bool {
        self.target
    }

    pub fn with_target(mut self, target: bool) -> Self {
        self.target = target;
        self
    }

    pub fn width(&self) -> usize {
        self.support.len()
    }

    /// `⊕_{j∈S} x_j` for an assignment indexed by `var - 1`.
    pub fn parity(&self, assignment: &[bool]) -> bool {
        self.support
            .iter()
            .fold(false, |acc, &v| acc ^ assignment[v as usize - 1])
    }

    pub fn is_satisfied_by(&self, assignment: &[bool]) -> bool {
        self.parity(assignment) == self.target
    }

    /// Support as a bit mask (bit `v-1` for variable `v`); `None` past 64 variables.
    pub fn mask(&self) -> Option<u64> {
        self.support.iter().try_fold(0u64, |acc, &v| {
            (v <= 64).then(|| acc | 1u64 << (v - 1))
        })
    }

    /// `c xor <target> <vars...>` audit line body (without the `c `).
    pub fn to_comment(&self) -> String {
        let mut out = format!("xor {}", u8::from(self.target));
        for v in &self.support {
            out.push(' ');
            out.push_str(&v.to_string());
        }
        out
    }

    /// Inverse of [`XorConstraint::to_comment`]; `None` for comments that
    /// are not xor audit lines.
    pub fn from_comment(comment: &str) -> Option<Result<Self, HashError>> {
        let mut tokens = comment.split_whitespace();
        if tokens.next() != Some("xor") {
            return None;
        }
        let bad = || HashError::BadXorComment(comment.to_string());
        let target = match tokens.next() {
            Some("0") => false,
            Some("1") => true,
            _ => return Some(Err(bad())),
        };
        let mut support = Vec::new();
        for tok in tokens {
            match tok.parse::<u32>() {
                Ok(v) if v >= 1 => support.push(v),
                _ => return Some(Err(bad())),
            }
        }
        Some(Ok(XorConstraint::new(support, target)))
    }
}

/// How rows of a hash function are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "family")]
pub enum RowFamily {
    /// Each coordinate independently with probability `p`.
    Bernoulli { p: f64 },
    /// A uniformly random subset of exactly `k` coordinates.
    FixedWidth { k: usize },
}

impl RowFamily {
    pub fn validate(&self, n: usize) -> Result<(), HashError> {
        match *self {
            RowFamily::Bernoulli { p } => {
                if p > 0.0 && p <= 0.5 {
                    Ok(())
                } else {
                    Err(HashError::InvalidBias(p))
                }
            }
            RowFamily::FixedWidth { k } => {
                if (1..=n).contains(&k) {
                    Ok(())
                } else {
                    Err(HashError::InvalidWidth { k, n })
                }
            }
        }
    }

    /// Draws one row's support; the target is left at 0.
    pub fn sample_row<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<XorConstraint, HashError> {
        match *self {
            RowFamily::Bernoulli { p } => sample_bernoulli_row(n, p, rng),
            RowFamily::FixedWidth { k } => sample_fixed_k_row(n, k, rng),
        }
    }
}

/// Row with each of the `n` coordinates included independently with
/// probability `p`. Target bit is 0.
pub fn sample_bernoulli_row<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Result<XorConstraint, HashError> {
    RowFamily::Bernoulli { p }.validate(n)?;
    let support = (1..=n as u32).filter(|_| rng.random::<f64>() < p);
    Ok(XorConstraint::new(support, false))
}

/// Row whose support is a uniformly random `k`-subset of `1..=n`. Target bit is 0.
pub fn sample_fixed_k_row<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<XorConstraint, HashError> {
    RowFamily::FixedWidth { k }.validate(n)?;
    let picked = rand::seq::index::sample(rng, n, k);
    Ok(XorConstraint::new(picked.iter().map(|i| i as u32 + 1), false))
}

/// `h(x) = b` as a list of rows over a shared dimension.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HashFunction {
    n: usize,
    rows: Vec<XorConstraint>,
}

impl HashFunction {
    pub fn new(n: usize, rows: Vec<XorConstraint>) -> Result<Self, HashError> {
        if rows.is_empty() {
            return Err(HashError::NoRows);
        }
        for row in &rows {
            if let Some(&index) = row.support().iter().find(|&&v| v as usize > n) {
                return Err(HashError::IndexOutOfRange { index, n });
            }
        }
        Ok(HashFunction { n, rows })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[XorConstraint] {
        &self.rows
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn targets(&self) -> Vec<bool> {
        self.rows.iter().map(XorConstraint::target).collect()
    }

    pub fn push_row(&mut self, row: XorConstraint) -> Result<(), HashError> {
        if let Some(&index) = row.support().iter().find(|&&v| v as usize > self.n) {
            return Err(HashError::IndexOutOfRange { index, n: self.n });
        }
        self.rows.push(row);
        Ok(())
    }

    /// True iff every row parity matches its target.
    pub fn is_satisfied_by(&self, assignment: &[bool]) -> bool {
        self.rows.iter().all(|r| r.is_satisfied_by(assignment))
    }

    pub fn row_masks(&self) -> Option<Vec<u64>> {
        self.rows.iter().map(XorConstraint::mask).collect()
    }
}

/// Draws `m` independent rows from `family`, each with an independent
/// uniform target bit. Per row the support is drawn before the target.
pub fn build_hash<R: Rng + ?Sized>(n: usize, m: usize, family: RowFamily, rng: &mut R) -> Result<HashFunction, HashError> {
    if m == 0 {
        return Err(HashError::NoRows);
    }
    family.validate(n)?;
    let mut rows = Vec::with_capacity(m);
    for _ in 0..m {
        let row = family.sample_row(n, rng)?;
        let target = rng.random::<bool>();
        rows.push(row.with_target(target));
    }
    HashFunction::new(n, rows)
}

/// Expands one parity constraint into CNF over `n` variables.
///
/// For a nonempty support the result has exactly `2^{|S|-1}` clauses of
/// width `|S|`, one per assignment of `S` with the wrong parity. An empty
/// support yields the empty formula for target 0 and a single falsum
/// clause for target 1.
///
/// # Panics
/// If the support exceeds [`MAX_ENCODABLE_SUPPORT`] or mentions a variable
/// above `n`.
pub fn xor_to_cnf(c: &XorConstraint, n: usize) -> Cnf {
    let mut cnf = Cnf::new(n);
    append_xor_clauses(&mut cnf, c);
    cnf
}

fn append_xor_clauses(cnf: &mut Cnf, c: &XorConstraint) {
    let width = c.width();
    assert!(
        width <= MAX_ENCODABLE_SUPPORT,
        "xor support of width {width} is too wide to expand"
    );
    if width == 0 {
        if c.target() {
            cnf.add_clause(Clause::falsum()).expect("falsum has no variables");
        }
        return;
    }
    for forbidden in 0u32..(1u32 << width) {
        // skip assignments that already have the right parity
        if (forbidden.count_ones() % 2 == 1) == c.target() {
            continue;
        }
        let lits = c.support().iter().enumerate().map(|(j, &v)| {
            // exclude `forbidden`: require x_v to differ from its bit
            Literal::new(v, forbidden >> j & 1 == 0)
        });
        let clause = Clause::new(lits).expect("distinct variables never form a tautology");
        cnf.add_clause(clause).expect("support index exceeds the formula's variable count");
    }
}

/// CNF whose solutions are exactly `{x : h(x) = b}`, over `h.n()` variables.
pub fn encode_hash(h: &HashFunction) -> Cnf {
    let mut cnf = Cnf::new(h.n());
    for row in h.rows() {
        append_xor_clauses(&mut cnf, row);
    }
    cnf
}

/// Per-row support sizes of a hash function.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LocalityReport {
    pub row_supports: Vec<usize>,
    pub max_support: usize,
    /// Smallest `k` such that every row depends on at most `k` coordinates.
    pub k_local_for: usize,
    /// Whether `max_support <= k` for the queried budget.
    pub within_budget: bool,
}

pub fn locality_report(h: &HashFunction, k: usize) -> LocalityReport {
    let row_supports: Vec<usize> = h.rows().iter().map(XorConstraint::width).collect();
    let max_support = row_supports.iter().copied().max().unwrap_or(0);
    LocalityReport {
        row_supports,
        max_support,
        k_local_for: max_support,
        within_budget: max_support <= k,
    }
}
