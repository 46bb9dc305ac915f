// Verify the analytic gradients against central finite differences on
// random small problems, the same check `sef gradcheck` runs.
//
// Run with: cargo run --release --example gradient_check

use sef::gradcheck::{self, DEFAULT_INSTANCES, DEFAULT_TOLERANCE};

fn main() -> sef::Result<()> {
    run_example()
}

pub fn run_example() -> sef::Result<()> {
    let report = gradcheck::run(42, None, DEFAULT_INSTANCES, DEFAULT_TOLERANCE)?;
    for g in &report.gradients {
        println!("{:<26} max relative error {:.2e}  {}", g.name, g.max_relative_error, if g.passed { "ok" } else { "FAILED" });
    }
    if !report.passed() {
        return Err(sef::SefError::Numerical("gradient check failed".into()));
    }
    Ok(())
}
