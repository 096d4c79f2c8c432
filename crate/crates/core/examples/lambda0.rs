//! Bottom of the spectrum along a depth ladder, for a finite-measure and an
//! infinite-measure half-line.

use potgraph::spectral::{strict_positivity_verdict, SpectralOptions};
use potgraph::scenarios;

fn main() -> potgraph::Result<()> {
    for (name, e) in [("standard ray", scenarios::standard_ray()), ("unit line", scenarios::unit_line())] {
        let est = strict_positivity_verdict(&e, &SpectralOptions::default())?;
        println!("{name}:");
        for (d, l) in est.depths.iter().zip(&est.eigenvalues) {
            println!("  λ(K_{d}) = {l:.10}");
        }
        println!("  verdict {:?}", est.verdict);
    }
    Ok(())
}
