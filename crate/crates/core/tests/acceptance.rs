//! All ten acceptance criteria, run one after another so that the wall-clock
//! budgets are measured without competing work. Runs without the libtest
//! harness so the per-criterion lines are always printed.

use maxmod_core::acceptance::{run, Level};

fn main() {
    let results = run(Level::Full);
    for r in &results {
        println!("{}", r.line());
    }
    let failed: Vec<usize> = results.iter().filter(|r| !r.pass).map(|r| r.id).collect();
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
