//! Approximate model counting for CNF formulas by adding sparse random XOR
//! constraints and querying a SAT oracle, together with exact Fourier
//! analysis tools that check the probabilistic bounds the hashing relies on.

pub mod acceptance;
pub mod cli;
pub mod cnf;
pub mod counter;
pub mod fourier;
pub mod hash;
pub mod seed;
pub mod solver;
