use super::{DirichletOperator, KronFactor, SolveOptions};
use crate::error::{Error, Result};
use crate::graph::VertexFunction;

#[derive(Clone, Debug, PartialEq)]
pub struct EigenPair {
    pub value: f64,
    /// `m`-normalized, first nonzero entry positive.
    pub vector: VertexFunction,
    /// `‖L_n v − λ v‖_m` with `‖v‖_m = 1`.
    pub residual: f64,
    /// `max_x |(L_n v − λ v)(x)| / (Σ |terms at x|)`: residual relative to the
    /// size of the terms that cancel at each vertex.
    pub componentwise_residual: f64,
    pub iterations: usize,
}

/// Componentwise tolerance at which inverse iteration stops.
const COMPONENTWISE_TOL: f64 = 1e-11;
/// Accepted when the iteration budget runs out.
const COMPONENTWISE_FALLBACK: f64 = 1e-8;

/// Bottom of the spectrum of `L_n` and a corresponding eigenvector.
///
/// Each interior component is handled separately. A component with no path
/// to ground carries the eigenvalue 0 with a constant eigenvector; otherwise
/// inverse iteration `f ← (D − B)⁻¹ M f` runs from the all-ones vector. The
/// iterates stay positive, converge to the Perron vector of the component,
/// and every step reuses one factorization.
pub fn smallest_eigenvalue(op: &DirichletOperator, opts: &SolveOptions) -> Result<EigenPair> {
    opts.check()?;
    if op.is_empty() {
        return Err(Error::InvalidArgument("interior set is empty".into()));
    }
    let n = op.len();
    let max_iter = opts.max_iter.unwrap_or_else(|| 1000.max(50 * n));
    let mut best: Option<(Vec<f64>, f64, f64, usize)> = None;
    for comp in op.interior_components() {
        let grounded = comp.iter().any(|&i| op.grounding(i) > 0.0);
        let (local, lambda, cw, iters) = if grounded {
            inverse_iteration(op, &comp, max_iter)?
        } else {
            (vec![1.0; comp.len()], 0.0, 0.0, 0)
        };
        if best.as_ref().is_none_or(|b| lambda < b.1) {
            let mut full = vec![0.0; n];
            for (l, &g) in comp.iter().enumerate() {
                full[g] = local[l];
            }
            best = Some((full, lambda, cw, iters));
        }
        if lambda == 0.0 {
            break;
        }
    }
    let (mut v, value, componentwise_residual, iterations) = best.expect("nonempty interior");
    let norm = op.m_norm(&v);
    v.iter_mut().for_each(|x| *x /= norm);
    if v.iter().find(|x| **x != 0.0).is_some_and(|x| *x < 0.0) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    let av = op.apply_b(&v);
    let m = op.measures();
    let residual = av
        .iter()
        .zip(&v)
        .zip(m)
        .map(|((a, x), m)| (a - value * m * x).powi(2) / m)
        .sum::<f64>()
        .sqrt();
    Ok(EigenPair {
        value,
        vector: op.from_vec(&v),
        residual,
        componentwise_residual,
        iterations,
    })
}

fn inverse_iteration(op: &DirichletOperator, comp: &[usize], max_iter: usize) -> Result<(Vec<f64>, f64, f64, usize)> {
    let factor = KronFactor::on_subset(op, comp)?;
    let k = comp.len();
    let pos: std::collections::HashMap<usize, usize> = comp.iter().enumerate().map(|(l, &g)| (g, l)).collect();
    let m: Vec<f64> = comp.iter().map(|&g| op.measures()[g]).collect();
    let m_norm = |f: &[f64]| f.iter().zip(&m).map(|(x, m)| x * x * m).sum::<f64>().sqrt();
    let mut f = vec![1.0; k];
    let n0 = m_norm(&f);
    f.iter_mut().for_each(|x| *x /= n0);
    let mut lambda = f64::INFINITY;
    let mut cw = f64::INFINITY;
    for it in 1..=max_iter {
        let mut next: Vec<f64> = f.iter().zip(&m).map(|(x, m)| x * m).collect();
        factor.solve_in_place(&mut next);
        let dot: f64 = f.iter().zip(&next).zip(&m).map(|((a, b), m)| a * b * m).sum();
        let nn = m_norm(&next);
        lambda = dot / (nn * nn);
        next.iter_mut().for_each(|x| *x /= nn);
        f = next;
        cw = componentwise(op, comp, &pos, &f, lambda);
        if cw <= COMPONENTWISE_TOL {
            return Ok((f, lambda, cw, it));
        }
    }
    if cw <= COMPONENTWISE_FALLBACK {
        Ok((f, lambda, cw, max_iter))
    } else {
        Err(Error::NonConvergence {
            iterations: max_iter,
            residual: cw,
        })
    }
}

fn componentwise(
    op: &DirichletOperator,
    comp: &[usize],
    pos: &std::collections::HashMap<usize, usize>,
    f: &[f64],
    lambda: f64,
) -> f64 {
    let mut worst: f64 = 0.0;
    for (l, &g) in comp.iter().enumerate() {
        let mut net = op.diag(g) * f[l] - lambda * op.measures()[g] * f[l];
        let mut scale = op.diag(g) * f[l].abs() + lambda * op.measures()[g] * f[l].abs();
        for &(j, c) in op.links(g) {
            if let Some(&lj) = pos.get(&j) {
                net -= c * f[lj];
                scale += c * f[lj].abs();
            }
        }
        if scale > 0.0 {
            worst = worst.max(net.abs() / scale);
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{FiniteWeightedGraph, VertexId};
    use std::collections::BTreeSet;

    fn line(n: usize) -> FiniteWeightedGraph {
        let mut g = FiniteWeightedGraph::new();
        for i in 1..=n {
            g.add_vertex(VertexId::core(i.to_string()), 1.0);
        }
        for i in 1..n {
            g.set_weight(VertexId::core(i.to_string()), VertexId::core((i + 1).to_string()), 1.0);
        }
        g
    }

    fn first(n: usize) -> BTreeSet<VertexId> {
        (1..=n).map(|i| VertexId::core(i.to_string())).collect()
    }

    #[test]
    fn one_by_one() {
        let mut g = FiniteWeightedGraph::new();
        g.add_vertex("x", 1.0).add_vertex("y", 1.0).set_weight("x", "y", 2.0);
        let op = DirichletOperator::new(g, [VertexId::core("x")].into()).unwrap();
        let e = smallest_eigenvalue(&op, &SolveOptions::default()).unwrap();
        assert!((e.value - 2.0).abs() < 1e-14);
        assert!((e.vector.value(&VertexId::core("x")) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn ungrounded_gives_zero_and_constant() {
        let op = DirichletOperator::new(line(4), first(4)).unwrap();
        let e = smallest_eigenvalue(&op, &SolveOptions::default()).unwrap();
        assert_eq!(e.value, 0.0);
        for (_, x) in e.vector.iter() {
            assert!((x - 0.5).abs() < 1e-14);
        }
    }

    #[test]
    fn dirichlet_line_matches_closed_form() {
        // K = {1..n} grounded at n+1: λ = 2(1 − cos(π/(2n+1)))
        for n in [3usize, 10, 50] {
            let op = DirichletOperator::new(line(n + 1), first(n)).unwrap();
            let e = smallest_eigenvalue(&op, &SolveOptions::default()).unwrap();
            let exact = 2.0 * (1.0 - (std::f64::consts::PI / (2 * n + 1) as f64).cos());
            assert!((e.value - exact).abs() < 1e-12 * exact.max(1.0), "{n}: {} vs {exact}", e.value);
            assert!(e.residual < 1e-8);
        }
    }
}
