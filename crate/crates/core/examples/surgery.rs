//! Removes the pole of a Green's function, hangs new rays on its neighbours and
//! checks the continued function is a nonconstant ℓ² harmonic function.

use potgraph::scenarios::run_surgery_demo;
use potgraph::surgery::L2Norm;

fn main() -> potgraph::Result<()> {
    for unit_measure in [false, true] {
        let run = run_surgery_demo(unit_measure, 60, 1e-10)?;
        let r = &run.report;
        println!("new-ray measure {}", if unit_measure { "1" } else { "2^-r" });
        println!("  attached rays: {:?}", run.surgered.attached);
        println!("  max interior residual {:.3e} at {:?}", r.max_interior_residual, r.worst_vertex);
        match &r.l2_norm_with_tail {
            L2Norm::Finite { value, tail_bound, .. } => println!("  ‖g‖² = {value:.12} (tail ≤ {tail_bound:.1e})"),
            other => println!("  ‖g‖²: {other:?}"),
        }
        println!("  conclusion holds: {}", r.theorem_conclusion);
    }
    Ok(())
}
