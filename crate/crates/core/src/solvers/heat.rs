use nalgebra::{DMatrix, SymmetricEigen};

use super::DirichletOperator;
use crate::error::{Error, Result};
use crate::graph::{VertexFunction, VertexId};

/// Largest interior handled by the dense spectral method.
pub const HEAT_DENSE_LIMIT: usize = 500;

#[derive(Clone, Debug, PartialEq)]
pub struct HeatIntegral {
    /// `x ↦ ∫₀^T p_t(o, x) dt`.
    pub values: VertexFunction,
    pub lambda_min: f64,
}

/// `x ↦ ∫₀^T p_t(o, x) dt` for the heat kernel of `L_n`.
pub fn heat_integral(op: &DirichletOperator, o: &VertexId, horizon: f64) -> Result<VertexFunction> {
    heat_integral_detailed(op, o, horizon).map(|h| h.values)
}

/// Spectral evaluation `Σ_i (1 − e^{−λ_i T})/λ_i · u_i(o) u_i(x)` with the
/// `u_i` orthonormal in `ℓ²(m)`, obtained from the symmetric matrix
/// `M^{−1/2} (D − B) M^{−1/2}`.
pub fn heat_integral_detailed(op: &DirichletOperator, o: &VertexId, horizon: f64) -> Result<HeatIntegral> {
    let n = op.len();
    if n > HEAT_DENSE_LIMIT {
        return Err(Error::TooLarge {
            size: n,
            limit: HEAT_DENSE_LIMIT,
        });
    }
    if !(horizon >= 0.0) {
        return Err(Error::InvalidArgument(format!("horizon must be nonnegative, got {horizon}")));
    }
    let io = op.position(o).ok_or_else(|| Error::UnknownVertex(o.clone()))?;
    let sqrt_m: Vec<f64> = op.measures().iter().map(|m| m.sqrt()).collect();
    let mut s = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        s[(i, i)] = op.diag(i) / op.measures()[i];
        for &(j, c) in op.links(i) {
            s[(i, j)] = -c / (sqrt_m[i] * sqrt_m[j]);
        }
    }
    if let Some(comp) = op
        .interior_components()
        .into_iter()
        .find(|c| c.iter().all(|&i| op.grounding(i) == 0.0))
    {
        return Err(Error::Singular(format!(
            "zero eigenvalue: component of {} is not grounded",
            op.vertices()[comp[0]]
        )));
    }
    let eig = SymmetricEigen::new(s);
    let lambda_min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if !(lambda_min > 0.0) {
        return Err(Error::Singular(format!("nonpositive eigenvalue {lambda_min:e}")));
    }
    let mut h = vec![0.0; n];
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        let w = eig.eigenvectors.column(k);
        let weight = -(-lambda * horizon).exp_m1() / lambda * w[io] / sqrt_m[io];
        for x in 0..n {
            h[x] += weight * w[x] / sqrt_m[x];
        }
    }
    Ok(HeatIntegral {
        values: op.from_vec(&h),
        lambda_min,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::FiniteWeightedGraph;

    #[test]
    fn scalar_case() {
        let mut g = FiniteWeightedGraph::new();
        g.add_vertex("x", 1.0).add_vertex("y", 1.0).set_weight("x", "y", 2.0);
        let op = DirichletOperator::new(g, [VertexId::core("x")].into()).unwrap();
        let x = VertexId::core("x");
        for t in [0.0, 0.1, 1.0, 5.0] {
            let h = heat_integral(&op, &x, t).unwrap();
            let exact = (1.0 - (-2.0 * t).exp()) / 2.0;
            assert!((h.value(&x) - exact).abs() < 1e-15);
        }
    }
}
