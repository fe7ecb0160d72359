//! Runs the built-in invariant suite, optionally filtered, and prints the table.

use migr_scatter::validate::{run_invariants, table};

fn main() {
    let filter = std::env::args().nth(1);
    let checks = run_invariants(filter.as_deref());
    print!("{}", table(&checks));
    if checks.iter().any(|c| !c.passed) {
        std::process::exit(1);
    }
}
