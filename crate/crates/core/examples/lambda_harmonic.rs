//! A λ-harmonic function (λ < 0) on the standard half-line: increasing,
//! bounded and square-summable against the finite measure.

use potgraph::harmonic::lambda_harmonic_ray;
use potgraph::scenarios;

fn main() -> potgraph::Result<()> {
    let e = scenarios::standard_ray();
    let h = lambda_harmonic_ray(&e, -1.0, 1.0, 200)?;
    for (n, v) in h.values.iter().enumerate().take(8) {
        println!("f({}) = {v:.10}", n + 1);
    }
    println!("max recursion residual {:.3e}", h.max_recursion_residual);
    println!("increasing {}, bounded {:?}, in ℓ² {:?}", h.strictly_increasing, h.bounded, h.in_l2);
    Ok(())
}
