//! Time-integrated heat kernel against the Dirichlet Green's function on a
//! truncation.

use potgraph::potential::heat_green_crosscheck;
use potgraph::{scenarios, VertexId};

fn main() -> potgraph::Result<()> {
    let e = scenarios::standard_ray();
    let o = VertexId::core("1");
    for t in [5.0, 10.0, 20.0, 50.0] {
        let c = heat_green_crosscheck(&e, &o, 8, t)?;
        println!("T = {t:>4}: discrepancy {:.3e}, spectral bound {:.3e}", c.discrepancy, c.bound);
    }
    Ok(())
}
