mod common;

use std::time::{Duration, Instant};

use acount::cnf::{random_kcnf, Cnf};
use acount::counter::{count, AcountConfig, Mode};
use acount::seed;
use acount::solver::{count_up_to, exact_count, Dpll, ExternalSolver, SatOracle, SolverError, Status};
use rand::Rng;

fn contradiction() -> Cnf {
    Cnf::from_dimacs_clauses(3, &[&[1], &[-1, 2]]).unwrap()
}

#[test]
fn agrees_with_internal_solver() {
    let external = ExternalSolver::new(common::BIN).unwrap().with_args(["solve"]);
    let internal = Dpll::default();
    let mut rng = seed::from_seed(40);
    let (mut sat, mut unsat) = (0, 0);
    for _ in 0..100 {
        let n = rng.random_range(5..=20);
        let m = (n as f64 * rng.random_range(3.0..5.5)) as usize;
        let f = random_kcnf(n, m, 3, &mut rng);
        let a = internal.decide(&f);
        let b = external.decide(&f);
        assert_eq!(a.status, b.status, "{f:?}");
        match b.status {
            Status::Sat => {
                sat += 1;
                assert!(f.is_satisfied_by(b.witness.as_ref().unwrap()));
            }
            Status::Unsat => unsat += 1,
            Status::Unknown => panic!("{:?}", b.diagnostic),
        }
    }
    assert!(sat > 10 && unsat > 10, "corpus should mix outcomes: {sat} / {unsat}");
}

#[test]
fn wrapper_script_and_enumeration() {
    let dir = tempfile::tempdir().unwrap();
    let external = ExternalSolver::new(common::wrapped_internal_solver(dir.path())).unwrap();
    let mut rng = seed::from_seed(41);
    for _ in 0..5 {
        let f = random_kcnf(8, 12, 3, &mut rng);
        assert_eq!(count_up_to(&f, u64::MAX, &external).unwrap(), exact_count(&f).unwrap());
    }
}

#[test]
fn counting_is_oracle_independent() {
    let external = ExternalSolver::new(common::BIN).unwrap().with_args(["solve"]);
    let f = random_kcnf(10, 8, 3, &mut seed::from_seed(42));
    for cfg in [
        AcountConfig::new(Mode::Bernoulli, 7, 5),
        AcountConfig::new(Mode::Hybrid, 7, 5),
    ] {
        assert_eq!(count(&f, &cfg, &external).unwrap(), count(&f, &cfg, &Dpll::default()).unwrap());
    }
}

#[test]
fn unsat_exit_without_model() {
    let dir = tempfile::tempdir().unwrap();
    let s = ExternalSolver::new(common::script(dir.path(), "u.sh", "echo 's UNSATISFIABLE'; exit 20")).unwrap();
    assert_eq!(s.decide(&contradiction()).status, Status::Unsat);
}

#[test]
fn sat_exit_without_model_has_no_witness() {
    let dir = tempfile::tempdir().unwrap();
    let s = ExternalSolver::new(common::script(dir.path(), "s.sh", "exit 10")).unwrap();
    let r = s.decide(&contradiction());
    assert_eq!(r.status, Status::Sat);
    assert!(r.witness.is_none());
    assert_eq!(count_up_to(&contradiction(), 4, &s), Err(SolverError::MissingWitness));
}

#[test]
fn wrong_model_is_unknown() {
    let dir = tempfile::tempdir().unwrap();
    let s = ExternalSolver::new(common::script(dir.path(), "w.sh", "echo 's SATISFIABLE'; echo 'v -1 2 0'; exit 10")).unwrap();
    assert_eq!(s.decide(&contradiction()).status, Status::Unknown);
}

#[test]
fn garbage_and_odd_exits_are_unknown() {
    let dir = tempfile::tempdir().unwrap();
    for (name, body) in [
        ("g.sh", "echo 'hello world'; exit 3"),
        ("z.sh", "exit 0"),
        ("c.sh", "echo 's UNSATISFIABLE'; exit 10"),
        ("d.sh", "echo 's SATISFIABLE'; exit 20"),
        ("m.sh", "echo 's SATISFIABLE'; echo 'v 1 x 0'; exit 10"),
        ("k.sh", "kill -9 $$"),
    ] {
        let s = ExternalSolver::new(common::script(dir.path(), name, body)).unwrap();
        let r = s.decide(&contradiction());
        assert_eq!(r.status, Status::Unknown, "{name}");
        assert!(r.diagnostic.is_some());
    }
}

#[test]
fn timeout_kills_the_solver() {
    let dir = tempfile::tempdir().unwrap();
    let s = ExternalSolver::new(common::script(dir.path(), "slow.sh", "sleep 30; exit 20"))
        .unwrap()
        .with_timeout(Some(Duration::from_millis(300)));
    let start = Instant::now();
    let r = s.decide(&contradiction());
    assert_eq!(r.status, Status::Unknown);
    assert!(start.elapsed() < Duration::from_secs(10));
}

#[test]
fn missing_solver_is_reported() {
    assert!(matches!(
        ExternalSolver::new("/nonexistent/solver"),
        Err(SolverError::Config(_))
    ));
}
