//! Completeness of the min-degree path metric, with the ray lengths that
//! witness incompleteness.

use potgraph::metrics::{check_intrinsic, completeness_verdict, degree_length, LengthFunction};
use potgraph::scenarios::{self, run_surgery_demo};

fn main() -> potgraph::Result<()> {
    let surgered = run_surgery_demo(false, 20, 1e-10)?.surgered.graph;
    for (name, e) in [("standard ray", scenarios::standard_ray()), ("surgered graph", surgered)] {
        let sigma = degree_length(&e)?;
        let v = completeness_verdict(&e, &sigma)?;
        let check = check_intrinsic(&e, &sigma)?;
        println!("{name}: {:?}", v.verdict);
        println!("  intrinsic: passes {} (min slack {:.3e})", check.passes, check.min_slack);
    }
    let e = scenarios::unit_line();
    let v = completeness_verdict(&e, &LengthFunction::constant(&e, 1.0))?;
    println!("unit line, unit lengths: {:?}", v.verdict);
    Ok(())
}
