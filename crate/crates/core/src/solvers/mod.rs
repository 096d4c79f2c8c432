//! Linear algebra for Dirichlet restrictions of the Laplacian.
//!
//! A [`DirichletOperator`] acts on functions supported in an interior set `K`;
//! every vertex outside `K` is held at zero. Internally the operator is kept
//! in conductance form `D − B` (symmetric in the plain inner product) so that
//! `L_n u = f` becomes `(D − B) u = M f`.

mod cg;
mod eigen;
mod factor;
mod heat;

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::graph::{FiniteWeightedGraph, VertexFunction, VertexId};

pub use eigen::{smallest_eigenvalue, EigenPair};
pub use factor::KronFactor;
pub use heat::{heat_integral, heat_integral_detailed, HeatIntegral, HEAT_DENSE_LIMIT};

/// Interior size above which [`Method::Auto`] switches to conjugate gradients.
pub const DIRECT_LIMIT: usize = 2000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Auto,
    Direct,
    ConjugateGradient,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveOptions {
    pub tol: f64,
    /// Defaults to `50 · |K|` (or `max(1000, 50 · |K|)` for eigen iterations).
    pub max_iter: Option<usize>,
    pub method: Method,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: 1e-10,
            max_iter: None,
            method: Method::Auto,
        }
    }
}

impl SolveOptions {
    pub fn with_method(method: Method) -> Self {
        SolveOptions {
            method,
            ..Self::default()
        }
    }

    fn check(&self) -> Result<()> {
        if self.tol > 0.0 && self.tol.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("tolerance must be positive, got {}", self.tol)))
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveStats {
    pub method: Method,
    pub iterations: usize,
    /// `‖L_n u − f‖_m / ‖f‖_m`, as evaluated in floating point.
    pub relative_residual: f64,
}

/// Laplacian of `graph` restricted to functions vanishing off `interior`,
/// optionally with extra conductances from interior vertices to ground.
#[derive(Clone, Debug, PartialEq)]
pub struct DirichletOperator {
    graph: FiniteWeightedGraph,
    interior: BTreeSet<VertexId>,
    ground: BTreeMap<VertexId, f64>,
    index: Vec<VertexId>,
    pos: BTreeMap<VertexId, usize>,
    measure: Vec<f64>,
    grounding: Vec<f64>,
    links: Vec<Vec<(usize, f64)>>,
}

impl DirichletOperator {
    pub fn new(graph: FiniteWeightedGraph, interior: BTreeSet<VertexId>) -> Result<Self> {
        for v in &interior {
            if !graph.contains(v) {
                return Err(Error::UnknownVertex(v.clone()));
            }
        }
        let mut op = DirichletOperator {
            graph,
            interior,
            ground: BTreeMap::new(),
            index: Vec::new(),
            pos: BTreeMap::new(),
            measure: Vec::new(),
            grounding: Vec::new(),
            links: Vec::new(),
        };
        op.rebuild()?;
        Ok(op)
    }

    /// Adds conductance `c ≥ 0` from each listed interior vertex to ground.
    pub fn with_ground(mut self, ground: BTreeMap<VertexId, f64>) -> Result<Self> {
        for (v, &c) in &ground {
            if !self.interior.contains(v) {
                return Err(Error::UnknownVertex(v.clone()));
            }
            if !(c >= 0.0 && c.is_finite()) {
                return Err(Error::InvalidArgument(format!("ground conductance at {v} must be nonnegative")));
            }
        }
        self.ground = ground;
        self.rebuild()?;
        Ok(self)
    }

    fn rebuild(&mut self) -> Result<()> {
        self.index = self.interior.iter().cloned().collect();
        self.pos = self.index.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect();
        self.measure = Vec::with_capacity(self.index.len());
        self.grounding = Vec::with_capacity(self.index.len());
        self.links = Vec::with_capacity(self.index.len());
        for x in &self.index {
            self.measure.push(self.graph.measure(x)?);
            let mut g = self.ground.get(x).copied().unwrap_or(0.0);
            let mut row = Vec::new();
            for (y, b) in self.graph.neighbors(x) {
                match self.pos.get(y) {
                    Some(&j) => row.push((j, b)),
                    None => g += b,
                }
            }
            self.grounding.push(g);
            self.links.push(row);
        }
        Ok(())
    }

    pub fn graph(&self) -> &FiniteWeightedGraph {
        &self.graph
    }

    pub fn interior(&self) -> &BTreeSet<VertexId> {
        &self.interior
    }

    pub fn ground(&self) -> &BTreeMap<VertexId, f64> {
        &self.ground
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.index
    }

    pub fn position(&self, v: &VertexId) -> Option<usize> {
        self.pos.get(v).copied()
    }

    pub(crate) fn measures(&self) -> &[f64] {
        &self.measure
    }

    /// Conductance from vertex `i` to ground (exterior neighbors plus extra ground).
    pub(crate) fn grounding(&self, i: usize) -> f64 {
        self.grounding[i]
    }

    pub(crate) fn links(&self, i: usize) -> &[(usize, f64)] {
        &self.links[i]
    }

    /// Diagonal of `D − B`: all incident weight plus extra ground.
    pub(crate) fn diag(&self, i: usize) -> f64 {
        self.grounding[i] + self.links[i].iter().map(|l| l.1).sum::<f64>()
    }

    pub(crate) fn to_vec(&self, f: &VertexFunction) -> Vec<f64> {
        self.index.iter().map(|v| f.value(v)).collect()
    }

    pub(crate) fn from_vec(&self, u: &[f64]) -> VertexFunction {
        self.index.iter().cloned().zip(u.iter().copied()).collect()
    }

    /// `(D − B) u`.
    pub(crate) fn apply_b(&self, u: &[f64]) -> Vec<f64> {
        (0..self.len())
            .map(|i| self.diag(i) * u[i] - self.links[i].iter().map(|&(j, b)| b * u[j]).sum::<f64>())
            .collect()
    }

    /// `L_n f` on the interior.
    pub fn apply(&self, f: &VertexFunction) -> VertexFunction {
        let u = self.to_vec(f);
        let y = self.apply_b(&u);
        self.from_vec(&y.iter().zip(&self.measure).map(|(y, m)| y / m).collect::<Vec<_>>())
    }

    /// `‖u‖_m` over the interior.
    pub(crate) fn m_norm(&self, u: &[f64]) -> f64 {
        u.iter().zip(&self.measure).map(|(x, m)| x * x * m).sum::<f64>().sqrt()
    }

    /// `‖L_n u − f‖_m / ‖f‖_m` given `y = M f`.
    pub(crate) fn relative_residual(&self, u: &[f64], y: &[f64]) -> f64 {
        let r = self.apply_b(u);
        let num: f64 = r.iter().zip(y).zip(&self.measure).map(|((a, b), m)| (a - b).powi(2) / m).sum();
        let den: f64 = y.iter().zip(&self.measure).map(|(b, m)| b * b / m).sum();
        if den == 0.0 {
            num.sqrt()
        } else {
            (num / den).sqrt()
        }
    }

    /// Connected pieces of the interior (edges inside `K` only).
    pub(crate) fn interior_components(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut head = 0;
            while head < comp.len() {
                let x = comp[head];
                head += 1;
                for &(y, _) in &self.links[x] {
                    if !seen[y] {
                        seen[y] = true;
                        comp.push(y);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }
}

/// Solves `L_n u = rhs` for `u` supported in the interior.
pub fn solve(op: &DirichletOperator, rhs: &VertexFunction, opts: &SolveOptions) -> Result<VertexFunction> {
    solve_with_stats(op, rhs, opts).map(|(u, _)| u)
}

pub fn solve_with_stats(
    op: &DirichletOperator,
    rhs: &VertexFunction,
    opts: &SolveOptions,
) -> Result<(VertexFunction, SolveStats)> {
    opts.check()?;
    for (v, x) in rhs.iter() {
        if x != 0.0 && op.position(v).is_none() {
            return Err(Error::InvalidArgument(format!("right-hand side is nonzero at non-interior vertex {v}")));
        }
    }
    let y: Vec<f64> = op.to_vec(rhs).iter().zip(op.measures()).map(|(f, m)| f * m).collect();
    let method = match opts.method {
        Method::Auto if op.len() <= DIRECT_LIMIT => Method::Direct,
        Method::Auto => Method::ConjugateGradient,
        m => m,
    };
    let (u, iterations) = match method {
        Method::Direct => {
            let factor = KronFactor::new(op)?;
            let mut u = y.clone();
            factor.solve_in_place(&mut u);
            (u, 0)
        }
        _ => {
            let max_iter = opts.max_iter.unwrap_or(50 * op.len().max(1));
            cg::pcg(op, &y, opts.tol, max_iter)?
        }
    };
    let stats = SolveStats {
        method,
        iterations,
        relative_residual: op.relative_residual(&u, &y),
    };
    Ok((op.from_vec(&u), stats))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(weights: &[f64], measures: &[f64]) -> FiniteWeightedGraph {
        let mut g = FiniteWeightedGraph::new();
        for (i, &m) in measures.iter().enumerate() {
            g.add_vertex(VertexId::core((i + 1).to_string()), m);
        }
        for (i, &b) in weights.iter().enumerate() {
            g.set_weight(VertexId::core((i + 1).to_string()), VertexId::core((i + 2).to_string()), b);
        }
        g
    }

    fn set(labels: &[&str]) -> BTreeSet<VertexId> {
        labels.iter().map(|&l| VertexId::core(l)).collect()
    }

    #[test]
    fn one_by_one_system() {
        let op = DirichletOperator::new(path(&[2.0], &[1.0, 1.0]), set(&["1"])).unwrap();
        let rhs: VertexFunction = [(VertexId::core("1"), 1.0)].into_iter().collect();
        for method in [Method::Direct, Method::ConjugateGradient] {
            let u = solve(&op, &rhs, &SolveOptions::with_method(method)).unwrap();
            assert!((u.value(&VertexId::core("1")) - 0.5).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_rhs_gives_zero() {
        let op = DirichletOperator::new(path(&[1.0, 1.0], &[1.0; 3]), set(&["1", "2"])).unwrap();
        let u = solve(&op, &VertexFunction::new(), &SolveOptions::default()).unwrap();
        assert_eq!(u.max_abs(), 0.0);
    }

    #[test]
    fn path_grounded_at_end() {
        let op = DirichletOperator::new(path(&[1.0, 1.0], &[1.0; 3]), set(&["1", "2"])).unwrap();
        let rhs: VertexFunction = [(VertexId::core("1"), 1.0)].into_iter().collect();
        for method in [Method::Direct, Method::ConjugateGradient] {
            let u = solve(&op, &rhs, &SolveOptions::with_method(method)).unwrap();
            assert!((u.value(&VertexId::core("1")) - 2.0).abs() < 1e-12);
            assert!((u.value(&VertexId::core("2")) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn ungrounded_component_is_singular() {
        let op = DirichletOperator::new(path(&[1.0], &[1.0; 2]), set(&["1", "2"])).unwrap();
        let rhs: VertexFunction = [(VertexId::core("1"), 1.0)].into_iter().collect();
        assert!(matches!(
            solve(&op, &rhs, &SolveOptions::with_method(Method::Direct)),
            Err(Error::Singular(_))
        ));
    }

    #[test]
    fn rhs_outside_interior_rejected() {
        let op = DirichletOperator::new(path(&[1.0], &[1.0; 2]), set(&["1"])).unwrap();
        let rhs: VertexFunction = [(VertexId::core("2"), 1.0)].into_iter().collect();
        assert!(solve(&op, &rhs, &SolveOptions::default()).is_err());
    }
}
