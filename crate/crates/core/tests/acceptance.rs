//! Acceptance suite: runs every criterion at its stated tolerance and prints
//! one PASS/FAIL line each. `KPZLAB_CRITERIA=4,5,11` restricts the run.

use std::process::ExitCode;

use kpzlab::suite::{Suite, DEFAULT_SUITE_SEED, TITLES};

fn main() -> ExitCode {
    let selected: Vec<u32> = match std::env::var("KPZLAB_CRITERIA") {
        Ok(list) if !list.trim().is_empty() => list.split(',').filter_map(|s| s.trim().parse().ok()).collect(),
        _ => (1..=TITLES.len() as u32).collect(),
    };
    let suite = Suite::new(DEFAULT_SUITE_SEED, None);
    let mut failed = 0;
    for id in selected {
        match suite.run(id) {
            Ok(outcome) => {
                println!("{}", outcome.line());
                if !outcome.pass() {
                    failed += 1;
                }
            }
            Err(e) => {
                println!("criterion {id:>2} FAIL [{}] error: {e}", TITLES[id as usize - 1]);
                failed += 1;
            }
        }
    }
    println!("acceptance: {failed} criteria failed");
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
