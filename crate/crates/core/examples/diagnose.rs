//! Combined ℓ²-Liouville / self-adjointness diagnosis with the implication log.

use potgraph::diagnose::{diagnose, DiagnoseOptions};
use potgraph::scenarios;

fn main() -> potgraph::Result<()> {
    for (name, e) in [
        ("standard ray", scenarios::standard_ray()),
        ("two-sided line", scenarios::two_sided_line()),
        ("unit line", scenarios::unit_line()),
    ] {
        let d = diagnose(&e, &DiagnoseOptions::default())?;
        println!("{name}");
        println!("  λ₀: {:?}", d.lambda0.verdict);
        println!("  m(X): {:?}", d.total_measure);
        println!("  ℓ²-Liouville: {:?}", d.l2_liouville_evidence);
        println!("  ESA: {:?}", d.esa_evidence);
        for a in &d.implications_applied {
            println!("  applied {} ({})", a.statement, a.outcome);
        }
    }
    Ok(())
}
