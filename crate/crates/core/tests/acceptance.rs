//! The twelve acceptance criteria, one pass/fail line each.
//!
//! `cargo test -p fqrank --test acceptance [-- <name or number>...]`

use std::process::ExitCode;

use fqrank::harness::suites::{run_suite, suite_names};

fn main() -> ExitCode {
    let filters: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let selected: Vec<&str> = suite_names()
        .into_iter()
        .enumerate()
        .filter(|(i, name)| filters.is_empty() || filters.iter().any(|f| f == name || *f == (i + 1).to_string()))
        .map(|(_, name)| name)
        .collect();
    let mut failed = Vec::new();
    for name in &selected {
        match run_suite(name) {
            Ok(outcome) => {
                println!("{}", outcome.summary_line());
                if !outcome.pass {
                    failed.push(*name);
                }
            }
            Err(e) => {
                println!("[FAIL] {name}: {e}");
                failed.push(*name);
            }
        }
    }
    println!(
        "\nacceptance: {} of {} criteria passed{}",
        selected.len() - failed.len(),
        selected.len(),
        if failed.is_empty() { String::new() } else { format!("; failed: {}", failed.join(", ")) }
    );
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
