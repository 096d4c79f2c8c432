//! Infinite graphs as a finite core with rays attached.
//!
//! A ray `x_1, x_2, …` hangs off a core vertex. Edge weights are indexed so
//! that `weights.value(0)` is `b(attach, x_1)` and `weights.value(k)` is
//! `b(x_k, x_{k+1})`; `measures.value(k)` is `m(x_k)` for `k ≥ 1`.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::graph::{FiniteWeightedGraph, VertexFunction, VertexId};
use crate::sequence::{SequenceRule, SeriesSum};
use crate::solvers::DirichletOperator;

#[derive(Clone, Debug, PartialEq)]
pub struct RaySpec {
    pub id: String,
    pub attach: VertexId,
    pub weights: SequenceRule,
    pub measures: SequenceRule,
}

impl RaySpec {
    pub fn new(id: impl Into<String>, attach: impl Into<VertexId>, weights: SequenceRule, measures: SequenceRule) -> Self {
        RaySpec {
            id: id.into(),
            attach: attach.into(),
            weights,
            measures,
        }
    }

    pub fn vertex(&self, k: usize) -> VertexId {
        VertexId::ray(self.id.clone(), k)
    }

    /// `b(x_k, x_{k+1})`, with `x_0` the attach vertex.
    pub fn weight(&self, k: usize) -> f64 {
        self.weights.value(k)
    }

    /// `m(x_k)` for `k ≥ 1`.
    pub fn measure(&self, k: usize) -> f64 {
        self.measures.value(k)
    }

    /// `Σ_{k ≥ from} 1/b(x_k, x_{k+1})`: the resistance from `x_from` to infinity.
    pub fn resistance_from(&self, from: usize) -> SeriesSum {
        self.weights.reciprocal_sum_from(from)
    }

    /// `Σ_{k ≥ from} m(x_k)`, `from ≥ 1`.
    pub fn measure_from(&self, from: usize) -> SeriesSum {
        self.measures.sum_from(from.max(1))
    }

    /// `Σ_{k=1}^{r} m(x_k)`.
    pub fn measure_upto(&self, r: usize) -> f64 {
        self.measures.partial_sum(1, r + 1)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExtendedGraph {
    pub core: FiniteWeightedGraph,
    pub rays: Vec<RaySpec>,
}

impl ExtendedGraph {
    pub fn new(core: FiniteWeightedGraph) -> Self {
        ExtendedGraph {
            core,
            rays: Vec::new(),
        }
    }

    pub fn with_ray(mut self, ray: RaySpec) -> Self {
        self.rays.push(ray);
        self
    }

    /// Every violated invariant, as text. Empty iff valid.
    pub fn validate(&self) -> Vec<String> {
        let mut out: Vec<String> = self.core.validate().iter().map(|v| v.to_string()).collect();
        let mut ids = BTreeSet::new();
        for ray in &self.rays {
            if !ids.insert(ray.id.as_str()) {
                out.push(format!("duplicate ray id {}", ray.id));
            }
            if !self.core.contains(&ray.attach) {
                out.push(format!("ray {} attaches to unknown vertex {}", ray.id, ray.attach));
            }
            if !ray.attach.is_core() {
                out.push(format!("ray {} must attach to a core vertex", ray.id));
            }
            if let Err(e) = ray.weights.validate() {
                out.push(format!("ray {} weights: {e}", ray.id));
            }
            if let Err(e) = ray.measures.validate() {
                out.push(format!("ray {} measures: {e}", ray.id));
            }
        }
        out
    }

    pub fn check(&self) -> Result<()> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidGraph(v))
        }
    }

    pub fn ray(&self, id: &str) -> Result<&RaySpec> {
        self.rays
            .iter()
            .find(|r| r.id == id)
            .ok_or_else(|| Error::UnknownRay(id.to_string()))
    }

    pub fn rays_at<'a>(&'a self, x: &'a VertexId) -> impl Iterator<Item = &'a RaySpec> + 'a {
        self.rays.iter().filter(move |r| &r.attach == x)
    }

    pub fn contains(&self, v: &VertexId) -> bool {
        match v {
            VertexId::Core(_) => self.core.contains(v),
            VertexId::Ray { ray, index } => *index >= 1 && self.rays.iter().any(|r| &r.id == ray),
        }
    }

    pub fn measure(&self, v: &VertexId) -> Result<f64> {
        match v {
            VertexId::Core(_) => self.core.measure(v),
            VertexId::Ray { ray, index } if *index >= 1 => Ok(self.ray(ray)?.measure(*index)),
            _ => Err(Error::UnknownVertex(v.clone())),
        }
    }

    /// Neighbors of any vertex of the infinite graph.
    pub fn neighbors(&self, x: &VertexId) -> Result<Vec<(VertexId, f64)>> {
        match x {
            VertexId::Core(_) => {
                if !self.core.contains(x) {
                    return Err(Error::UnknownVertex(x.clone()));
                }
                let mut out: Vec<_> = self.core.neighbors(x).map(|(y, b)| (y.clone(), b)).collect();
                out.extend(self.rays_at(x).map(|r| (r.vertex(1), r.weight(0))));
                Ok(out)
            }
            VertexId::Ray { ray, index } if *index >= 1 => {
                let r = self.ray(ray)?;
                let prev = if *index == 1 { r.attach.clone() } else { r.vertex(index - 1) };
                Ok(vec![(prev, r.weight(index - 1)), (r.vertex(index + 1), r.weight(*index))])
            }
            _ => Err(Error::UnknownVertex(x.clone())),
        }
    }

    /// Core plus the first `depth` vertices of every ray.
    pub fn truncate(&self, depth: usize) -> Result<FiniteWeightedGraph> {
        if depth == 0 {
            return Err(Error::InvalidArgument("truncation depth must be at least 1".into()));
        }
        let mut g = self.core.clone();
        for ray in &self.rays {
            for k in 1..=depth {
                g.add_vertex(ray.vertex(k), ray.measure(k));
            }
            g.set_weight(ray.attach.clone(), ray.vertex(1), ray.weight(0));
            for k in 1..depth {
                g.set_weight(ray.vertex(k), ray.vertex(k + 1), ray.weight(k));
            }
        }
        Ok(g)
    }

    /// Vertex set of `truncate(depth)` without building the graph.
    pub fn truncation_vertices(&self, depth: usize) -> BTreeSet<VertexId> {
        let mut out = self.core.vertex_set();
        for ray in &self.rays {
            out.extend((1..=depth).map(|k| ray.vertex(k)));
        }
        out
    }

    /// `L_n`: the Laplacian on `truncate(depth)` with every vertex beyond it grounded.
    pub fn dirichlet(&self, depth: usize) -> Result<DirichletOperator> {
        let graph = self.truncate(depth + 1)?;
        DirichletOperator::new(graph, self.truncation_vertices(depth))
    }

    /// Whether some ray has finite resistance to infinity.
    pub fn has_finite_resistance_ray(&self) -> bool {
        self.rays.iter().any(|r| r.resistance_from(1).is_finite())
    }

    /// `truncate(depth)` with each ray cut point `x_depth` grounded through the
    /// exact resistance `Σ_{k ≥ depth} 1/b` of the discarded tail. Solutions on
    /// this operator coincide with the infinite-graph limits restricted to the
    /// truncation. Rays of infinite resistance are left ungrounded.
    pub fn tail_grounded(&self, depth: usize) -> Result<DirichletOperator> {
        let graph = self.truncate(depth)?;
        let interior = graph.vertex_set();
        let mut ground = BTreeMap::new();
        for ray in &self.rays {
            if let SeriesSum::Finite { value, .. } = ray.resistance_from(depth) {
                ground.insert(ray.vertex(depth), 1.0 / value);
            }
        }
        DirichletOperator::new(graph, interior)?.with_ground(ground)
    }

    /// `m(X)`: core measure plus every ray's measure tail.
    pub fn total_measure(&self) -> SeriesSum {
        let mut value = self.core.total_measure();
        let mut error = 0.0;
        for ray in &self.rays {
            match ray.measure_from(1) {
                SeriesSum::Finite { value: v, error: e } => {
                    value += v;
                    error += e;
                }
                other => return other,
            }
        }
        SeriesSum::Finite { value, error }
    }

    /// Components of the infinite graph, each given by its core vertices;
    /// a ray belongs to the component of its attach vertex.
    pub fn core_components(&self) -> Vec<Vec<VertexId>> {
        self.core.connected_components()
    }

    pub fn is_connected(&self) -> bool {
        self.core.is_connected()
    }
}

/// Values along a ray encoded by increments `d_j = f(x_{j+1}) − f(x_j)`
/// (with `x_0` the attach vertex). Beyond the explicit increments the profile
/// is harmonic: `d_j = flux / b(x_j, x_{j+1})`.
#[derive(Clone, Debug, PartialEq)]
pub struct RayProfile {
    pub increments: Vec<f64>,
    pub flux: f64,
}

impl RayProfile {
    pub fn harmonic(flux: f64) -> Self {
        RayProfile {
            increments: Vec::new(),
            flux,
        }
    }

    pub fn increment(&self, ray: &RaySpec, j: usize) -> f64 {
        match self.increments.get(j) {
            Some(&d) => d,
            None => self.flux / ray.weight(j),
        }
    }
}

/// A function on the whole infinite graph: explicit core values and a
/// [`RayProfile`] per ray. Rays without a profile are constant.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExtendedFunction {
    pub core: VertexFunction,
    pub rays: BTreeMap<String, RayProfile>,
}

impl ExtendedFunction {
    pub fn new(core: VertexFunction) -> Self {
        ExtendedFunction {
            core,
            rays: BTreeMap::new(),
        }
    }

    fn increment(&self, ray: &RaySpec, j: usize) -> f64 {
        self.rays.get(&ray.id).map_or(0.0, |p| p.increment(ray, j))
    }

    pub fn value(&self, graph: &ExtendedGraph, v: &VertexId) -> Result<f64> {
        match v {
            VertexId::Core(_) => Ok(self.core.value(v)),
            VertexId::Ray { ray, index } => {
                let r = graph.ray(ray)?;
                let base = self.core.value(&r.attach);
                Ok(base + (0..*index).map(|j| self.increment(r, j)).sum::<f64>())
            }
        }
    }

    /// `f(x) − f(y)` for an edge, computed from increments on rays.
    pub fn difference(&self, graph: &ExtendedGraph, x: &VertexId, y: &VertexId) -> Result<f64> {
        let step = |ray: &str, lo: usize, hi: usize| -> Result<Option<f64>> {
            if hi == lo + 1 {
                Ok(Some(self.increment(graph.ray(ray)?, lo)))
            } else {
                Ok(None)
            }
        };
        let direct = match (x, y) {
            (VertexId::Ray { ray: a, index: i }, VertexId::Ray { ray: b, index: j }) if a == b => {
                if let Some(d) = step(a, *i, *j)? {
                    Some(-d)
                } else {
                    step(a, *j, *i)?
                }
            }
            (VertexId::Core(_), VertexId::Ray { ray, index: 1 }) if &graph.ray(ray)?.attach == x => {
                Some(-self.increment(graph.ray(ray)?, 0))
            }
            (VertexId::Ray { ray, index: 1 }, VertexId::Core(_)) if &graph.ray(ray)?.attach == y => {
                Some(self.increment(graph.ray(ray)?, 0))
            }
            _ => None,
        };
        match direct {
            Some(d) => Ok(d),
            None => Ok(self.value(graph, x)? - self.value(graph, y)?),
        }
    }

    /// Values on `truncate(depth)`, accumulated along each ray.
    pub fn on_truncation(&self, graph: &ExtendedGraph, depth: usize) -> Result<VertexFunction> {
        let mut out = VertexFunction::new();
        for v in graph.core.vertices() {
            out.set(v.clone(), self.core.value(v));
        }
        for ray in &graph.rays {
            let mut acc = self.core.value(&ray.attach);
            for k in 1..=depth {
                acc += self.increment(ray, k - 1);
                out.set(ray.vertex(k), acc);
            }
        }
        Ok(out)
    }

    /// `|Σ_y b(x,y)(f(x) − f(y))| / max(1, Σ_y b(x,y)|f(x) − f(y)|)`.
    ///
    /// Scale-free harmonicity test at `x`. It avoids both the `1/m(x)` factor
    /// and subtraction of nearby values, neither of which survives the graded
    /// weights found deep along rays.
    pub fn flux_residual(&self, graph: &ExtendedGraph, x: &VertexId) -> Result<f64> {
        let mut net = 0.0;
        let mut abs = 0.0;
        for (y, b) in graph.neighbors(x)? {
            let d = b * self.difference(graph, x, &y)?;
            net += d;
            abs += d.abs();
        }
        Ok(net.abs() / abs.max(1.0))
    }

    /// `sup |f|` along a ray beyond index `from`, or `None` when unbounded.
    pub fn ray_sup_from(&self, graph: &ExtendedGraph, ray: &RaySpec, from: usize) -> Result<Option<f64>> {
        let start = self.value(graph, &ray.vertex(from.max(1)))?;
        let Some(p) = self.rays.get(&ray.id) else {
            return Ok(Some(start.abs()));
        };
        let explicit_end = p.increments.len().max(from.max(1));
        let mut acc = start;
        let mut lo = acc;
        let mut hi = acc;
        for j in from.max(1)..explicit_end {
            acc += p.increment(ray, j);
            lo = lo.min(acc);
            hi = hi.max(acc);
        }
        if p.flux == 0.0 {
            return Ok(Some(lo.abs().max(hi.abs())));
        }
        match ray.resistance_from(explicit_end) {
            SeriesSum::Finite { value, error } => {
                let limit = acc + p.flux * value;
                let slack = p.flux.abs() * error;
                Ok(Some(lo.abs().max(hi.abs()).max(limit.abs() + slack)))
            }
            _ => Ok(None),
        }
    }
}
