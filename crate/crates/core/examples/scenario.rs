//! Runs a shipped scenario and prints its report as JSON.
//!
//! `cargo run --example scenario -- example-3-2-ii`

use potgraph::report::{emit, Format};
use potgraph::scenarios::{run_scenario, ScenarioOptions, SCENARIOS};

fn main() -> potgraph::Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| SCENARIOS[0].to_string());
    let report = run_scenario(&name, &ScenarioOptions::default())?;
    for (k, v) in &report.verdicts {
        eprintln!("{k}: {v}");
    }
    emit(&report, Format::Json, None)
}
