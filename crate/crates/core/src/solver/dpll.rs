//! Chronological-backtracking DPLL with two-watched-literal unit propagation.
//!
//! Branching always picks the lowest-numbered unassigned variable and tries
//! `false` before `true`, so the search (and the model it returns) is a
//! deterministic function of the formula.

use std::time::Instant;

use super::{Capabilities, ResourceLimits, SatOracle, SolveResult, SolveStats};
use crate::cnf::Cnf;

#[derive(Debug, Clone, Default)]
pub struct Dpll {
    limits: ResourceLimits,
}

impl Dpll {
    pub fn new(limits: ResourceLimits) -> Self {
        Dpll { limits }
    }

    pub fn limits(&self) -> &ResourceLimits {
        &self.limits
    }
}

impl SatOracle for Dpll {
    fn decide(&self, f: &Cnf) -> SolveResult {
        let start = Instant::now();
        let mut search = Search::new(f);
        let outcome = search.run(&self.limits, start);
        let stats = SolveStats {
            decisions: search.decisions,
            propagations: search.propagations,
            wall: start.elapsed(),
        };
        match outcome {
            Outcome::Sat => SolveResult::sat_checked(f, Some(search.model()), stats),
            Outcome::Unsat => SolveResult::unsat(stats),
            Outcome::Limit(reason) => SolveResult::unknown(stats, reason),
        }
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities {
            witnesses: true,
            deterministic: true,
        }
    }

    fn name(&self) -> String {
        "internal-dpll".into()
    }
}

enum Outcome {
    Sat,
    Unsat,
    Limit(&'static str),
}

// Literal codes: 2*(var-1) for x, 2*(var-1)+1 for ¬x.
type Lit = u32;

#[inline]
fn lit_var(l: Lit) -> usize {
    (l >> 1) as usize
}

struct Search {
    num_vars: usize,
    /// 0 unassigned, 1 true, -1 false
    values: Vec<i8>,
    clauses: Vec<Vec<Lit>>,
    watches: Vec<Vec<usize>>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    /// (variable, second branch already taken) per decision level
    branches: Vec<(usize, bool)>,
    qhead: usize,
    units: Vec<Lit>,
    trivially_unsat: bool,
    decisions: u64,
    propagations: u64,
}

impl Search {
    fn new(f: &Cnf) -> Self {
        let n = f.num_vars();
        let mut search = Search {
            num_vars: n,
            values: vec![0; n],
            clauses: Vec::with_capacity(f.num_clauses()),
            watches: vec![Vec::new(); 2 * n],
            trail: Vec::with_capacity(n),
            trail_lim: Vec::new(),
            branches: Vec::new(),
            qhead: 0,
            units: Vec::new(),
            trivially_unsat: false,
            decisions: 0,
            propagations: 0,
        };
        for clause in f.clauses() {
            let lits: Vec<Lit> = clause
                .literals()
                .iter()
                .map(|l| 2 * (l.var() - 1) + u32::from(!l.is_positive()))
                .collect();
            match lits.len() {
                0 => search.trivially_unsat = true,
                1 => search.units.push(lits[0]),
                _ => {
                    let idx = search.clauses.len();
                    search.watches[lits[0] as usize].push(idx);
                    search.watches[lits[1] as usize].push(idx);
                    search.clauses.push(lits);
                }
            }
        }
        search
    }

    #[inline]
    fn lit_value(&self, l: Lit) -> i8 {
        let v = self.values[lit_var(l)];
        if l & 1 == 1 {
            -v
        } else {
            v
        }
    }

    #[inline]
    fn assign(&mut self, l: Lit) {
        self.values[lit_var(l)] = if l & 1 == 1 { -1 } else { 1 };
        self.trail.push(l);
    }

    /// Returns false on conflict.
    fn propagate(&mut self) -> bool {
        while self.qhead < self.trail.len() {
            let became_true = self.trail[self.qhead];
            self.qhead += 1;
            self.propagations += 1;
            let false_lit = became_true ^ 1;
            let mut watchers = std::mem::take(&mut self.watches[false_lit as usize]);
            let mut i = 0;
            let mut conflict = false;
            while i < watchers.len() {
                let ci = watchers[i];
                let clause = &mut self.clauses[ci];
                if clause[0] == false_lit {
                    clause.swap(0, 1);
                }
                let other = clause[0];
                let other_value = {
                    let v = self.values[lit_var(other)];
                    if other & 1 == 1 { -v } else { v }
                };
                if other_value == 1 {
                    i += 1;
                    continue;
                }
                let mut moved = false;
                for j in 2..clause.len() {
                    let cand = clause[j];
                    let v = self.values[lit_var(cand)];
                    let cv = if cand & 1 == 1 { -v } else { v };
                    if cv != -1 {
                        clause.swap(1, j);
                        self.watches[cand as usize].push(ci);
                        watchers.swap_remove(i);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                if other_value == -1 {
                    conflict = true;
                    break;
                }
                self.assign(other);
                i += 1;
            }
            // restore remaining watchers (including those after a conflict)
            let slot = &mut self.watches[false_lit as usize];
            watchers.append(slot);
            *slot = watchers;
            if conflict {
                return false;
            }
        }
        true
    }

    fn undo_to(&mut self, len: usize) {
        for &l in &self.trail[len..] {
            self.values[lit_var(l)] = 0;
        }
        self.trail.truncate(len);
        self.qhead = len;
    }

    fn run(&mut self, limits: &ResourceLimits, start: Instant) -> Outcome {
        if self.trivially_unsat {
            return Outcome::Unsat;
        }
        for l in std::mem::take(&mut self.units) {
            match self.lit_value(l) {
                1 => {}
                -1 => return Outcome::Unsat,
                _ => self.assign(l),
            }
        }
        let deadline = limits.timeout.map(|t| start + t);
        loop {
            if !self.propagate() {
                // flip the most recent decision whose second branch is untried
                loop {
                    let Some((var, flipped)) = self.branches.pop() else {
                        return Outcome::Unsat;
                    };
                    let lim = self.trail_lim.pop().expect("one trail mark per branch");
                    self.undo_to(lim);
                    if !flipped {
                        self.branches.push((var, true));
                        self.trail_lim.push(self.trail.len());
                        self.assign(2 * var as Lit);
                        break;
                    }
                }
                continue;
            }
            let Some(var) = (0..self.num_vars).find(|&v| self.values[v] == 0) else {
                return Outcome::Sat;
            };
            self.decisions += 1;
            if limits.max_decisions.is_some_and(|m| self.decisions > m) {
                return Outcome::Limit("decision limit reached");
            }
            if self.decisions % 1024 == 0 && deadline.is_some_and(|d| Instant::now() >= d) {
                return Outcome::Limit("timeout");
            }
            self.branches.push((var, false));
            self.trail_lim.push(self.trail.len());
            self.assign(2 * var as Lit + 1);
        }
    }

    fn model(&self) -> Vec<bool> {
        self.values.iter().map(|&v| v == 1).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::{Clause, Literal};
    use crate::solver::{exact_count, Status};
    use crate::seed;
    use rand::Rng;
    use std::time::Duration;

    fn random_kcnf<R: Rng>(rng: &mut R, n: usize, m: usize, k: usize) -> Cnf {
        let mut f = Cnf::new(n);
        while f.num_clauses() < m {
            let lits = (0..k).map(|_| Literal::new(rng.random_range(1..=n as u32), rng.random()));
            if let Some(c) = Clause::new(lits) {
                f.add_clause(c).unwrap();
            }
        }
        f
    }

    #[test]
    fn trivial_formulas() {
        let s = Dpll::default();
        let r = s.decide(&Cnf::new(3));
        assert_eq!(r.status, Status::Sat);
        assert_eq!(r.witness.unwrap().len(), 3);
        let f = Cnf::from_dimacs_clauses(1, &[&[1], &[-1]]).unwrap();
        assert_eq!(s.decide(&f).status, Status::Unsat);
        let mut g = Cnf::new(2);
        g.add_clause(Clause::falsum()).unwrap();
        assert_eq!(s.decide(&g).status, Status::Unsat);
        assert_eq!(s.decide(&Cnf::new(0)).status, Status::Sat);
    }

    #[test]
    fn prefers_false_on_lowest_variable() {
        let f = Cnf::from_dimacs_clauses(3, &[&[1, 2, 3]]).unwrap();
        let w = Dpll::default().decide(&f).witness.unwrap();
        assert_eq!(w, vec![false, false, true]);
    }

    #[test]
    fn agrees_with_enumeration_on_random_3cnf() {
        let s = Dpll::default();
        let mut rng = seed::from_seed(99);
        for _ in 0..200 {
            let n = rng.random_range(3..=16);
            // around the 4.26 ratio both answers are common
            let m = rng.random_range(n * 3..=n * 6);
            let f = random_kcnf(&mut rng, n, m, 3);
            let r = s.decide(&f);
            let expected_sat = exact_count(&f).unwrap() > 0;
            assert_eq!(r.status == Status::Sat, expected_sat, "{f:?}");
            if let Some(w) = r.witness {
                assert!(f.is_satisfied_by(&w));
            }
        }
    }

    #[test]
    fn agrees_on_wide_clauses() {
        let s = Dpll::default();
        let mut rng = seed::from_seed(100);
        for _ in 0..100 {
            let n = rng.random_range(4..=12);
            let (m, k) = (rng.random_range(1..=4 * n), rng.random_range(1..=6));
            let f = random_kcnf(&mut rng, n, m, k);
            assert_eq!(s.decide(&f).status == Status::Sat, exact_count(&f).unwrap() > 0);
        }
    }

    #[test]
    fn decision_limit_gives_unknown() {
        let mut rng = seed::from_seed(5);
        let f = random_kcnf(&mut rng, 40, 170, 3);
        let s = Dpll::new(ResourceLimits {
            max_decisions: Some(1),
            ..Default::default()
        });
        let r = s.decide(&f);
        if r.status == Status::Unknown {
            assert_eq!(r.diagnostic.as_deref(), Some("decision limit reached"));
        }
        let s = Dpll::new(ResourceLimits {
            timeout: Some(Duration::ZERO),
            max_decisions: Some(0),
            ..Default::default()
        });
        assert_eq!(s.decide(&Cnf::new(2)).status, Status::Unknown);
    }
}
