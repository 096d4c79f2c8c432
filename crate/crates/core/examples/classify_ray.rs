//! Summability classification of a few ray families.

use potgraph::harmonic::classify_ray;
use potgraph::{RaySpec, SequenceRule};

fn main() {
    let rays = [
        ("graded", SequenceRule::geometric(2.0, 2.0), SequenceRule::geometric(0.5, 0.5)),
        ("unit", SequenceRule::constant(1.0), SequenceRule::constant(1.0)),
        ("heavy", SequenceRule::geometric(4.0, 4.0), SequenceRule::geometric(2.0, 2.0)),
        ("power", SequenceRule::power(1.0, 2.0), SequenceRule::power(1.0, -2.0)),
    ];
    for (id, w, m) in rays {
        let c = classify_ray(&RaySpec::new(id, "o", w, m));
        println!(
            "{id:>6}: Σ1/b {:?}, Σm {:?}, bounded harmonic {}, ℓ² extension {}, ESA fails {}",
            c.sum_inv_b.value(),
            c.sum_m.value(),
            c.bounded_nonconstant_harmonic_possible,
            c.l2_nonconstant_extension_possible,
            c.esa_fails_on_ray
        );
    }
}
