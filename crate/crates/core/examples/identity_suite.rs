//! The full identity suite over the built-in families.

use std::time::Instant;

use qfib::catalog::builtin_families;
use qfib::identities::{consistency_violations, run_suite, summarize, Bounds, Status};

fn main() {
    let bounds = Bounds::default();
    let start = Instant::now();
    let reports = run_suite(&builtin_families(), &bounds);
    let elapsed = start.elapsed();

    for r in reports.iter().filter(|r| r.status != Status::Skipped) {
        println!("{:<18} {:<24} {} {}", r.family, r.identity, r.status, r.range);
    }
    let s = summarize(&reports);
    println!("{} PASS, {} FAIL, {} SKIPPED in {elapsed:?}", s.pass, s.fail, s.skipped);
    assert_eq!(s.fail, 0);
    assert!(consistency_violations(&reports).is_empty());
}
