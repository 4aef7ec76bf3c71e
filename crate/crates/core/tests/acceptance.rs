//! Runs every acceptance criterion at full scale and prints one line each.

use std::io::Write;

use acount::acceptance::{run_all, Faults, Scale};

#[test]
fn acceptance() {
    let reports = run_all(Scale::Full, Faults::default());
    // straight to the handle so the lines survive output capture
    let mut err = std::io::stderr().lock();
    for r in &reports {
        writeln!(err, "{r}").unwrap();
    }
    drop(err);
    let failed: Vec<u8> = reports.iter().filter(|r| !r.passed).map(|r| r.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
