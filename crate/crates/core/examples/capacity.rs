//! Capacity of a single vertex: positive on the standard half-line, zero on
//! the unit-weight line where `cap = 1/(n−1)` at every truncation.

use std::collections::BTreeSet;

use potgraph::potential::{capacity, ExhaustionOptions};
use potgraph::{scenarios, VertexId};

fn main() -> potgraph::Result<()> {
    let omega: BTreeSet<VertexId> = [VertexId::core("1")].into();
    let c = capacity(&scenarios::standard_ray(), &omega, &ExhaustionOptions::default())?;
    println!("standard ray: cap = {:.10} ({:?})", c.value, c.trace.verdict);

    let opts = ExhaustionOptions { tol: 1e-10, max_depth: 20 };
    let c = capacity(&scenarios::unit_line(), &omega, &opts)?;
    for (d, v) in c.trace.depths.iter().zip(&c.trace.values).step_by(4) {
        println!("unit line depth {d:>2}: {v:.6}");
    }
    println!("unit line: cap = {} ({:?})", c.value, c.trace.verdict);
    Ok(())
}
