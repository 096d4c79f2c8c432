//! Green's function of the standard half-line by exhaustion, against the
//! closed form `g(x_n) = 2^{1−n}`.

use potgraph::potential::{green_function, ExhaustionOptions};
use potgraph::{scenarios, VertexId};

fn main() -> potgraph::Result<()> {
    let e = scenarios::standard_ray();
    let o = VertexId::core("1");
    let g = green_function(&e, &o, &ExhaustionOptions::default())?;
    println!("pole value trace: {} depths, verdict {:?}", g.trace.depths.len(), g.trace.verdict);
    let limit = g.limit.as_ref().expect("transient graph");
    for n in 1..=8usize {
        let v = if n == 1 { o.clone() } else { VertexId::ray("r", n - 1) };
        let exact = 2f64.powi(1 - n as i32);
        println!("g({n}) = {:.12}  closed form {exact:.12}", limit.value(&e, &v)?);
    }
    Ok(())
}
