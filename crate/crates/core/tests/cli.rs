mod common;

use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use acount::cnf::{conjoin, parse_dimacs, Cnf};
use acount::hash::{encode_hash, HashFunction, XorConstraint};
use serde_json::Value;

fn acount(args: &[&str]) -> Output {
    Command::new(common::BIN).args(args).env_remove("ACOUNT_SOLVER").output().unwrap()
}

fn acount_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(common::BIN)
        .args(args)
        .env_remove("ACOUNT_SOLVER")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const SMALL: &str = "c two pinned, one clause\np cnf 12 3\n1 0\n-2 0\n3 4 5 0\n";

#[test]
fn count_record_fields() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "f.cnf", SMALL);
    let out = acount(&["count", "--seed", "7", &f]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    for key in [
        "estimate", "log2_estimate", "stopped_at_l", "mode", "k", "kappa", "seed", "oracle_queries", "wall_ms",
        "aborted",
    ] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["seed"], 7);
    assert_eq!(v["mode"], "bernoulli");
    assert_eq!(v["k"], 11);
    let estimate = v["estimate"].as_u64().unwrap();
    assert!(estimate.is_power_of_two());
}

#[test]
fn count_is_deterministic_modulo_wall_time() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "f.cnf", SMALL);
    for mode in ["bernoulli", "fixed_k", "hybrid"] {
        let strip = |out: Output| {
            let mut v = json(&out);
            v.as_object_mut().unwrap().remove("wall_ms");
            v.to_string()
        };
        let a = strip(acount(&["count", "--mode", mode, "--seed", "99", &f]));
        let b = strip(acount(&["count", "--mode", mode, "--seed", "99", &f]));
        assert_eq!(a, b);
    }
}

#[test]
fn seed_is_printed_when_not_given() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "f.cnf", SMALL);
    let v = json(&acount(&["count", &f]));
    let seed = v["seed"].as_u64().unwrap().to_string();
    let again = json(&acount(&["count", "--seed", &seed, &f]));
    assert_eq!(v["estimate"], again["estimate"]);
    assert_eq!(v["trials_log"], again["trials_log"]);
}

#[test]
fn hybrid_exact_path_flag() {
    let dir = tempfile::tempdir().unwrap();
    // 2^3 models over 12 variables, below the cap 2^3
    let text = "p cnf 12 9\n1 0\n2 0\n3 0\n4 0\n5 0\n6 0\n7 0\n8 0\n9 0\n";
    let f = write(dir.path(), "f.cnf", text);
    let v = json(&acount(&["count", "--mode", "hybrid", "--delta", "0.25", "--seed", "7", &f]));
    assert_eq!(v["exact_path"], true);
    assert_eq!(v["estimate"], 8);
}

#[test]
fn unsatisfiable_input_counts_zero() {
    for mode in ["bernoulli", "fixed_k", "hybrid"] {
        let out = acount_stdin(&["count", "--mode", mode, "--seed", "1"], "p cnf 6 2\n1 0\n-1 0\n");
        assert_eq!(out.status.code(), Some(0));
        assert_eq!(json(&out)["estimate"], 0);
    }
}

#[test]
fn parse_and_usage_errors_exit_2() {
    assert_eq!(acount_stdin(&["count"], "1 2 0\n").status.code(), Some(2));
    assert_eq!(acount_stdin(&["count"], "p cnf 2 1\n1 x 0\n").status.code(), Some(2));
    assert_eq!(acount(&["count", "/nonexistent.cnf"]).status.code(), Some(2));
    assert_eq!(acount(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(acount_stdin(&["count", "--k", "40"], SMALL).status.code(), Some(2));
    assert_eq!(acount(&["--help"]).status.code(), Some(0));
}

#[test]
fn exact_counts() {
    let out = acount_stdin(&["exact"], "p cnf 10 0\n");
    assert_eq!(json(&out)["exact"], 1024);
    let out = acount_stdin(&["exact"], "p cnf 1 2\n1 0\n-1 0\n");
    assert_eq!(json(&out)["exact"], 0);
    let out = acount_stdin(&["exact", "--budget", "8"], "p cnf 10 0\n");
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn encode_zero_rows_echoes_input() {
    let out = acount_stdin(&["encode", "--m", "0"], SMALL);
    assert_eq!(out.status.code(), Some(0));
    let back = parse_dimacs(&String::from_utf8(out.stdout).unwrap()).unwrap().cnf;
    assert!(back.same_clause_set(&parse_dimacs(SMALL).unwrap().cnf));
    assert_eq!(back.num_vars(), 12);
}

#[test]
fn encode_comments_round_trip() {
    let input = parse_dimacs(SMALL).unwrap().cnf;
    for family in ["bernoulli", "fixed_k"] {
        let out = acount_stdin(&["encode", "--m", "4", "--family", family, "--seed", "3"], SMALL);
        assert_eq!(out.status.code(), Some(0));
        let parsed = parse_dimacs(&String::from_utf8(out.stdout).unwrap()).unwrap();
        assert_eq!(parsed.cnf.num_vars(), input.num_vars());
        let rows: Vec<XorConstraint> = parsed
            .comments
            .iter()
            .filter_map(|c| XorConstraint::from_comment(c))
            .map(Result::unwrap)
            .collect();
        assert_eq!(rows.len(), 4);
        assert!(parsed.comments.iter().any(|c| c == "seed 3"));
        let h = HashFunction::new(12, rows).unwrap();
        let rebuilt: Cnf = conjoin(&input, &encode_hash(&h)).unwrap();
        assert!(rebuilt.same_clause_set(&parsed.cnf));
    }
}

#[test]
fn analyze_contractive_records() {
    let out = acount(&["analyze", "--checker", "contractive", "--n", "8", "--trials", "100", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let lines: Vec<Value> = String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 100);
    for v in &lines {
        assert_eq!(v["checker"], "contractive");
        assert_eq!(v["holds"], true);
        assert_eq!(v["params"]["seed"], 1);
        for key in ["lhs", "rhs", "margin"] {
            assert!(v[key].is_number());
        }
    }
}

#[test]
fn analyze_a_bound_grid() {
    let out = acount(&["analyze", "--checker", "A-bound", "--grid", "20x20"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 400);
    assert!(text.lines().all(|l| serde_json::from_str::<Value>(l).unwrap()["holds"] == true));
}

#[test]
fn analyze_other_checkers() {
    for checker in ["identity", "mu-p", "fixed-k", "kkl", "conditioning", "locality", "extraction"] {
        let out = acount(&[
            "analyze", "--checker", checker, "--n", "8", "--trials", "3", "--seed", "2", "--draws", "50",
        ]);
        assert_eq!(out.status.code(), Some(0), "{checker}");
        assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 3, "{checker}");
    }
}

#[test]
fn analyze_errors() {
    let out = acount(&["analyze", "--checker", "bogus"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    for name in ["contractive", "A-bound", "mu-p", "kkl"] {
        assert!(err.contains(name), "{err}");
    }
    assert_eq!(acount(&["analyze", "--checker", "contractive", "--n", "13"]).status.code(), Some(4));
    assert_eq!(acount(&["analyze", "--checker", "mu-p", "--n", "15"]).status.code(), Some(4));
}

#[test]
fn external_solver_via_flag_and_env() {
    let dir = tempfile::tempdir().unwrap();
    let solver = common::wrapped_internal_solver(dir.path());
    let f = write(dir.path(), "f.cnf", SMALL);
    let internal = json(&acount(&["count", "--seed", "5", &f]));
    let flagged = json(&acount(&["count", "--seed", "5", "--solver", solver.to_str().unwrap(), &f]));
    let out = Command::new(common::BIN)
        .args(["count", "--seed", "5", &f])
        .env("ACOUNT_SOLVER", &solver)
        .output()
        .unwrap();
    let from_env = json(&out);
    for v in [&flagged, &from_env] {
        assert_eq!(v["estimate"], internal["estimate"]);
        assert_eq!(v["trials_log"], internal["trials_log"]);
        assert_eq!(v["solver"], solver.to_str().unwrap());
    }
}

#[test]
fn oracle_failures_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "f.cnf", SMALL);
    assert_eq!(acount(&["count", "--solver", "/nonexistent/solver", &f]).status.code(), Some(3));
    let broken = common::script(dir.path(), "broken.sh", "echo nonsense; exit 1");
    let out = acount(&["count", "--solver", broken.to_str().unwrap(), "--seed", "1", &f]);
    assert_eq!(out.status.code(), Some(3));
    let v = json(&out);
    assert_eq!(v["aborted"], true);
    assert_eq!(v["abort_reason"]["reason"], "oracle_unknown");
}

#[test]
fn solve_subcommand_protocol() {
    let dir = tempfile::tempdir().unwrap();
    let sat = write(dir.path(), "s.cnf", SMALL);
    let out = acount(&["solve", &sat]);
    assert_eq!(out.status.code(), Some(10));
    let unsat = write(dir.path(), "u.cnf", "p cnf 1 2\n1 0\n-1 0\n");
    assert_eq!(acount(&["solve", &unsat]).status.code(), Some(20));
}

#[test]
fn selftest_fast_passes_and_catches_fault() {
    let out = acount(&["selftest", "--fast"]);
    let err = String::from_utf8_lossy(&out.stderr).to_string();
    assert_eq!(out.status.code(), Some(0), "{err}");
    assert_eq!(err.lines().filter(|l| l.starts_with("criterion")).count(), 13);
    let out = acount(&["selftest", "--fast", "--inject-fault", "xor-encoding"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr).to_string();
    assert!(err.lines().any(|l| l.starts_with("criterion  8 FAIL")), "{err}");
}
