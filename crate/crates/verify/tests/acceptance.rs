//! Runs every acceptance criterion and prints one PASS/FAIL line each.
//!
//! Pass criterion numbers as arguments to run a subset, e.g.
//! `cargo test --release -p spinfact-verify --test acceptance -- 2,3`.

use std::process::ExitCode;

use spinfact::acceptance::ALL_CRITERIA;

fn main() -> ExitCode {
    let selected: Vec<usize> = std::env::args()
        .skip(1)
        .flat_map(|a| a.split(',').filter_map(|t| t.trim().parse().ok()).collect::<Vec<_>>())
        .collect();
    let mut failed = Vec::new();
    for (k, criterion) in ALL_CRITERIA.iter().enumerate() {
        let id = k + 1;
        if !selected.is_empty() && !selected.contains(&id) {
            continue;
        }
        let r = criterion();
        println!("{}", r.line());
        for d in &r.details {
            println!("       {d}");
        }
        if !r.passed {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}
