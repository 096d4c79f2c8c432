//! Finite weighted graphs over a measure space.
//!
//! A graph is a symmetric, nonnegative edge weight `b` on a finite vertex set
//! together with a strictly positive vertex measure `m`. The formal Laplacian
//!
//! ```text
//! ℒf(x) = (1/m(x)) Σ_y b(x,y) (f(x) − f(y))
//! ```
//!
//! and the energy form `𝒬(f,g) = ½ Σ_{x,y} b(x,y)(f(x)−f(y))(g(x)−g(y))` are the
//! two primitives everything else is built from.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Vertex label. Core vertices carry an opaque text label; ray vertices are
/// addressed by `(ray id, index)` with `index ≥ 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum VertexId {
    Core(String),
    Ray { ray: String, index: usize },
}

impl VertexId {
    pub fn core(label: impl Into<String>) -> Self {
        VertexId::Core(label.into())
    }

    pub fn ray(ray: impl Into<String>, index: usize) -> Self {
        VertexId::Ray {
            ray: ray.into(),
            index,
        }
    }

    pub fn is_core(&self) -> bool {
        matches!(self, VertexId::Core(_))
    }
}

/// Integer-looking labels sort numerically and before free text, so `-1 < 2 < 10 < a`.
pub(crate) fn label_cmp(a: &str, b: &str) -> Ordering {
    match (a.parse::<i64>(), b.parse::<i64>()) {
        (Ok(x), Ok(y)) => x.cmp(&y).then_with(|| a.cmp(b)),
        (Ok(_), Err(_)) => Ordering::Less,
        (Err(_), Ok(_)) => Ordering::Greater,
        (Err(_), Err(_)) => a.cmp(b),
    }
}

impl Ord for VertexId {
    fn cmp(&self, other: &Self) -> Ordering {
        use VertexId::*;
        match (self, other) {
            (Core(a), Core(b)) => label_cmp(a, b),
            (Core(_), Ray { .. }) => Ordering::Less,
            (Ray { .. }, Core(_)) => Ordering::Greater,
            (Ray { ray: r1, index: i1 }, Ray { ray: r2, index: i2 }) => {
                label_cmp(r1, r2).then(i1.cmp(i2))
            }
        }
    }
}

impl PartialOrd for VertexId {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VertexId::Core(label) => write!(f, "{label}"),
            VertexId::Ray { ray, index } => write!(f, "{ray}#{index}"),
        }
    }
}

impl Serialize for VertexId {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl From<&str> for VertexId {
    fn from(label: &str) -> Self {
        VertexId::Core(label.to_string())
    }
}

/// A single violated graph invariant.
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    AsymmetricWeight {
        u: VertexId,
        v: VertexId,
        forward: f64,
        backward: f64,
    },
    SelfLoop { v: VertexId, weight: f64 },
    NegativeWeight { u: VertexId, v: VertexId, weight: f64 },
    NonFiniteWeight { u: VertexId, v: VertexId },
    NonpositiveMeasure { v: VertexId, measure: f64 },
    UnknownEndpoint { v: VertexId },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::AsymmetricWeight {
                u,
                v,
                forward,
                backward,
            } => write!(f, "asymmetric weight ({u},{v}): {forward} vs {backward}"),
            Violation::SelfLoop { v, weight } => write!(f, "self-loop weight at {v}: {weight}"),
            Violation::NegativeWeight { u, v, weight } => {
                write!(f, "negative weight ({u},{v}): {weight}")
            }
            Violation::NonFiniteWeight { u, v } => write!(f, "non-finite weight ({u},{v})"),
            Violation::NonpositiveMeasure { v, measure } => {
                write!(f, "nonpositive measure at {v}: {measure}")
            }
            Violation::UnknownEndpoint { v } => write!(f, "edge endpoint {v} has no measure"),
        }
    }
}

/// Finite vertex set with edge weights `b` and vertex measure `m`.
///
/// Weights are stored sparsely per direction; an absent entry means `b = 0`.
/// [`FiniteWeightedGraph::set_weight`] keeps the two directions in sync, while
/// [`FiniteWeightedGraph::set_directed_weight`] writes one direction only so
/// malformed input can be represented and reported by [`validate`](Self::validate).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FiniteWeightedGraph {
    measure: BTreeMap<VertexId, f64>,
    adj: BTreeMap<VertexId, BTreeMap<VertexId, f64>>,
}

impl FiniteWeightedGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, v: impl Into<VertexId>, measure: f64) -> &mut Self {
        let v = v.into();
        self.adj.entry(v.clone()).or_default();
        self.measure.insert(v, measure);
        self
    }

    /// Sets `b(u,v) = b(v,u) = weight`. A zero weight removes the edge.
    pub fn set_weight(&mut self, u: impl Into<VertexId>, v: impl Into<VertexId>, weight: f64) -> &mut Self {
        let (u, v) = (u.into(), v.into());
        self.set_directed_weight(u.clone(), v.clone(), weight);
        self.set_directed_weight(v, u, weight);
        self
    }

    pub fn set_directed_weight(&mut self, u: impl Into<VertexId>, v: impl Into<VertexId>, weight: f64) -> &mut Self {
        let (u, v) = (u.into(), v.into());
        let row = self.adj.entry(u).or_default();
        if weight == 0.0 {
            row.remove(&v);
        } else {
            row.insert(v, weight);
        }
        self
    }

    pub fn len(&self) -> usize {
        self.measure.len()
    }

    pub fn is_empty(&self) -> bool {
        self.measure.is_empty()
    }

    pub fn contains(&self, v: &VertexId) -> bool {
        self.measure.contains_key(v)
    }

    pub fn vertices(&self) -> impl Iterator<Item = &VertexId> + '_ {
        self.measure.keys()
    }

    pub fn vertex_set(&self) -> BTreeSet<VertexId> {
        self.measure.keys().cloned().collect()
    }

    pub fn measure(&self, v: &VertexId) -> Result<f64> {
        self.measure.get(v).copied().ok_or_else(|| Error::UnknownVertex(v.clone()))
    }

    pub fn total_measure(&self) -> f64 {
        self.measure.values().sum()
    }

    pub fn weight(&self, u: &VertexId, v: &VertexId) -> f64 {
        self.adj.get(u).and_then(|row| row.get(v)).copied().unwrap_or(0.0)
    }

    /// Neighbors `y ∼ x` with their weights `b(x,y) > 0`.
    pub fn neighbors<'a>(&'a self, x: &VertexId) -> impl Iterator<Item = (&'a VertexId, f64)> + 'a {
        self.adj
            .get(x)
            .into_iter()
            .flat_map(|row| row.iter().filter(|(_, &b)| b > 0.0).map(|(y, &b)| (y, b)))
    }

    /// Undirected edges `(u, v, b)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (&VertexId, &VertexId, f64)> + '_ {
        self.adj.iter().flat_map(|(u, row)| {
            row.iter()
                .filter(move |(v, &b)| u < *v && b > 0.0)
                .map(move |(v, &b)| (u, v, b))
        })
    }

    pub fn edge_count(&self) -> usize {
        self.edges().count()
    }

    fn check(&self, x: &VertexId) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::UnknownVertex(x.clone()))
        }
    }

    /// Reports every violated invariant; empty iff the graph is valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (v, &m) in &self.measure {
            if !(m > 0.0) || !m.is_finite() {
                out.push(Violation::NonpositiveMeasure { v: v.clone(), measure: m });
            }
        }
        for (u, row) in &self.adj {
            if !self.measure.contains_key(u) {
                out.push(Violation::UnknownEndpoint { v: u.clone() });
            }
            for (v, &b) in row {
                if !self.measure.contains_key(v) && !self.adj.contains_key(v) {
                    out.push(Violation::UnknownEndpoint { v: v.clone() });
                }
                if u == v {
                    out.push(Violation::SelfLoop { v: u.clone(), weight: b });
                    continue;
                }
                if !b.is_finite() {
                    out.push(Violation::NonFiniteWeight { u: u.clone(), v: v.clone() });
                    continue;
                }
                if b < 0.0 {
                    out.push(Violation::NegativeWeight {
                        u: u.clone(),
                        v: v.clone(),
                        weight: b,
                    });
                }
                let back = self.weight(v, u);
                // each asymmetric pair is reported once, from its smaller endpoint
                if u < v && (b - back).abs() > 1e-12 {
                    out.push(Violation::AsymmetricWeight {
                        u: u.clone(),
                        v: v.clone(),
                        forward: b,
                        backward: back,
                    });
                }
            }
        }
        // entries only present in the reverse direction
        for (u, row) in &self.adj {
            for (v, &b) in row {
                if v < u && self.weight(v, u) == 0.0 && b != 0.0 {
                    out.push(Violation::AsymmetricWeight {
                        u: v.clone(),
                        v: u.clone(),
                        forward: 0.0,
                        backward: b,
                    });
                }
            }
        }
        out
    }

    /// `ℒf(x)`. Values absent from `f` are read as zero.
    pub fn laplacian_at(&self, f: &VertexFunction, x: &VertexId) -> Result<f64> {
        let m = self.measure(x)?;
        let fx = f.value(x);
        let flux: f64 = self.neighbors(x).map(|(y, b)| b * (fx - f.value(y))).sum();
        Ok(flux / m)
    }

    /// `ℒf` on every vertex.
    pub fn laplacian(&self, f: &VertexFunction) -> VertexFunction {
        VertexFunction::from_fn(self, |x| self.laplacian_at(f, x).unwrap_or(0.0))
    }

    /// The bilinear energy form `𝒬(f,g)`.
    pub fn energy_pair(&self, f: &VertexFunction, g: &VertexFunction) -> f64 {
        self.edges()
            .map(|(u, v, b)| b * (f.value(u) - f.value(v)) * (g.value(u) - g.value(v)))
            .sum()
    }

    /// `𝒬(f) = ½ Σ_{x,y} b(x,y)(f(x)−f(y))²`.
    pub fn energy(&self, f: &VertexFunction) -> f64 {
        self.edges()
            .map(|(u, v, b)| {
                let d = f.value(u) - f.value(v);
                // a vanishing difference contributes nothing, even across an overflowed weight
                if d == 0.0 {
                    0.0
                } else {
                    b * d * d
                }
            })
            .sum()
    }

    /// `⟨f, g⟩_m`.
    pub fn inner(&self, f: &VertexFunction, g: &VertexFunction) -> f64 {
        self.measure.iter().map(|(x, m)| f.value(x) * g.value(x) * m).sum()
    }

    pub fn norm_sq(&self, f: &VertexFunction) -> f64 {
        self.inner(f, f)
    }

    /// `Deg(x) = (1/m(x)) Σ_y b(x,y)`.
    pub fn weighted_degree(&self, x: &VertexId) -> Result<f64> {
        let m = self.measure(x)?;
        Ok(self.neighbors(x).map(|(_, b)| b).sum::<f64>() / m)
    }

    /// `∂Ω = {x ∈ Ω | ∃ y ∼ x, y ∉ Ω}`.
    pub fn boundary(&self, omega: &BTreeSet<VertexId>) -> Result<BTreeSet<VertexId>> {
        for x in omega {
            self.check(x)?;
        }
        Ok(omega
            .iter()
            .filter(|x| self.neighbors(x).any(|(y, _)| !omega.contains(y)))
            .cloned()
            .collect())
    }

    /// Maximal connected vertex sets, each sorted, ordered by smallest label.
    pub fn connected_components(&self) -> Vec<Vec<VertexId>> {
        let mut seen = BTreeSet::new();
        let mut comps = Vec::new();
        for start in self.measure.keys() {
            if seen.contains(start) {
                continue;
            }
            let mut comp = Vec::new();
            let mut queue = VecDeque::from([start.clone()]);
            seen.insert(start.clone());
            while let Some(x) = queue.pop_front() {
                for (y, _) in self.neighbors(&x) {
                    if seen.insert(y.clone()) {
                        queue.push_back(y.clone());
                    }
                }
                comp.push(x);
            }
            comp.sort();
            comps.push(comp);
        }
        comps
    }

    pub fn is_connected(&self) -> bool {
        self.connected_components().len() <= 1
    }

    /// Subgraph induced on `keep`.
    pub fn induced(&self, keep: &BTreeSet<VertexId>) -> FiniteWeightedGraph {
        let mut g = FiniteWeightedGraph::new();
        for v in keep {
            if let Some(&m) = self.measure.get(v) {
                g.add_vertex(v.clone(), m);
            }
        }
        for (u, v, b) in self.edges() {
            if keep.contains(u) && keep.contains(v) {
                g.set_weight(u.clone(), v.clone(), b);
            }
        }
        g
    }

    /// `Σ_y b(x,y) · min(1/Deg(x), 1/Deg(y))`, the quantity the intrinsic bound compares to `m(x)`.
    pub fn min_degree_load(&self, x: &VertexId) -> Result<f64> {
        let dx = self.weighted_degree(x)?;
        let mut total = 0.0;
        for (y, b) in self.neighbors(x) {
            let dy = self.weighted_degree(y)?;
            total += b * (1.0 / dx).min(1.0 / dy);
        }
        Ok(total)
    }
}

/// Real-valued function on vertices; vertices without an entry read as zero.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct VertexFunction {
    values: BTreeMap<VertexId, f64>,
}

impl VertexFunction {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_fn(graph: &FiniteWeightedGraph, mut f: impl FnMut(&VertexId) -> f64) -> Self {
        VertexFunction {
            values: graph.vertices().map(|v| (v.clone(), f(v))).collect(),
        }
    }

    pub fn constant(graph: &FiniteWeightedGraph, c: f64) -> Self {
        Self::from_fn(graph, |_| c)
    }

    pub fn indicator(graph: &FiniteWeightedGraph, set: &BTreeSet<VertexId>) -> Self {
        Self::from_fn(graph, |v| if set.contains(v) { 1.0 } else { 0.0 })
    }

    pub fn get(&self, v: &VertexId) -> Option<f64> {
        self.values.get(v).copied()
    }

    pub fn value(&self, v: &VertexId) -> f64 {
        self.get(v).unwrap_or(0.0)
    }

    pub fn set(&mut self, v: VertexId, value: f64) {
        self.values.insert(v, value);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&VertexId, f64)> + '_ {
        self.values.iter().map(|(v, &x)| (v, x))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn scaled(&self, c: f64) -> Self {
        VertexFunction {
            values: self.values.iter().map(|(v, &x)| (v.clone(), c * x)).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.values().fold(0.0, |a, &x| a.max(x.abs()))
    }
}

impl FromIterator<(VertexId, f64)> for VertexFunction {
    fn from_iter<I: IntoIterator<Item = (VertexId, f64)>>(iter: I) -> Self {
        VertexFunction {
            values: iter.into_iter().collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> VertexId {
        VertexId::core(s)
    }

    fn path3() -> FiniteWeightedGraph {
        let mut g = FiniteWeightedGraph::new();
        g.add_vertex("1", 1.0).add_vertex("2", 0.5).add_vertex("3", 1.0);
        g.set_weight("1", "2", 2.0).set_weight("2", "3", 4.0);
        g
    }

    #[test]
    fn valid_two_vertex_graph_has_empty_report() {
        let mut g = FiniteWeightedGraph::new();
        g.add_vertex("u", 1.0).add_vertex("v", 1.0).set_weight("u", "v", 1.0);
        assert!(g.validate().is_empty());
    }

    #[test]
    fn asymmetric_weight_reported() {
        let mut g = FiniteWeightedGraph::new();
        g.add_vertex("u", 1.0).add_vertex("v", 1.0);
        g.set_directed_weight("u", "v", 1.0).set_directed_weight("v", "u", 2.0);
        let report = g.validate();
        assert_eq!(report.len(), 1);
        assert!(report[0].to_string().starts_with("asymmetric weight (u,v)"));
    }

    #[test]
    fn one_sided_weight_reported() {
        let mut g = FiniteWeightedGraph::new();
        g.add_vertex("u", 1.0).add_vertex("v", 1.0);
        g.set_directed_weight("v", "u", 2.0);
        let report = g.validate();
        assert_eq!(report.len(), 1);
        assert!(matches!(report[0], Violation::AsymmetricWeight { .. }));
    }

    #[test]
    fn nonpositive_measure_and_self_loop_reported() {
        let mut g = FiniteWeightedGraph::new();
        g.add_vertex("u", 0.0).add_vertex("v", 1.0);
        g.set_directed_weight("v", "v", 1.0);
        let report = g.validate();
        assert!(report.iter().any(|r| r.to_string() == "nonpositive measure at u: 0"));
        assert!(report.iter().any(|r| matches!(r, Violation::SelfLoop { .. })));
    }

    #[test]
    fn laplacian_examples() {
        let mut g = FiniteWeightedGraph::new();
        g.add_vertex("x", 1.0).add_vertex("y", 1.0).set_weight("x", "y", 3.0);
        let f: VertexFunction = [(v("x"), 1.0), (v("y"), 0.0)].into_iter().collect();
        assert_eq!(g.laplacian_at(&f, &v("x")).unwrap(), 3.0);

        let g = path3();
        let f: VertexFunction = [(v("1"), 0.0), (v("2"), 1.0), (v("3"), 2.0)].into_iter().collect();
        assert!((g.laplacian_at(&f, &v("2")).unwrap() + 4.0).abs() < 1e-15);
        assert!(matches!(g.laplacian_at(&f, &v("9")), Err(Error::UnknownVertex(_))));

        let c = VertexFunction::constant(&g, 3.5);
        for x in g.vertices() {
            assert_eq!(g.laplacian_at(&c, x).unwrap(), 0.0);
        }
    }

    #[test]
    fn energy_examples() {
        let mut g = FiniteWeightedGraph::new();
        g.add_vertex("x", 1.0).add_vertex("y", 1.0).set_weight("x", "y", 1.0);
        let f: VertexFunction = [(v("x"), 0.0), (v("y"), 1.0)].into_iter().collect();
        assert_eq!(g.energy(&f), 1.0);
        assert_eq!(g.energy(&VertexFunction::constant(&g, 2.0)), 0.0);

        let g = path3();
        let f: VertexFunction = [(v("1"), 0.0), (v("2"), 1.0), (v("3"), 2.0)].into_iter().collect();
        assert!((g.energy(&f) - 6.0).abs() < 1e-14);
        // ⟨ℒf, f⟩_m oracle
        let lf = g.laplacian(&f);
        assert!((g.inner(&lf, &f) - 6.0).abs() < 1e-14);
    }

    #[test]
    fn degree_examples() {
        let mut g = FiniteWeightedGraph::new();
        g.add_vertex("x", 1.0).add_vertex("y", 1.0).add_vertex("z", 2.0).set_weight("x", "y", 3.0);
        assert_eq!(g.weighted_degree(&v("x")).unwrap(), 3.0);
        assert_eq!(g.weighted_degree(&v("z")).unwrap(), 0.0);

        // half-line b(k,k+1) = 2^k, m(k) = 2^-k around k = 2
        let mut h = FiniteWeightedGraph::new();
        for k in 1..=3 {
            h.add_vertex(k.to_string().as_str(), 2f64.powi(-k));
        }
        h.set_weight("1", "2", 2.0).set_weight("2", "3", 4.0);
        assert_eq!(h.weighted_degree(&v("2")).unwrap(), 24.0);
    }

    #[test]
    fn boundary_examples() {
        let mut g = FiniteWeightedGraph::new();
        for k in 1..=4 {
            g.add_vertex(k.to_string().as_str(), 1.0);
        }
        g.set_weight("1", "2", 1.0).set_weight("2", "3", 1.0).set_weight("3", "4", 1.0);
        let all = g.vertex_set();
        assert!(g.boundary(&all).unwrap().is_empty());
        let omega: BTreeSet<_> = [v("1")].into();
        assert_eq!(g.boundary(&omega).unwrap(), omega);
        let omega: BTreeSet<_> = [v("1"), v("2")].into();
        assert_eq!(g.boundary(&omega).unwrap(), [v("2")].into());
        let bad: BTreeSet<_> = [v("7")].into();
        assert!(g.boundary(&bad).is_err());
    }

    #[test]
    fn components() {
        let mut g = FiniteWeightedGraph::new();
        g.add_vertex("a", 1.0).add_vertex("b", 1.0).set_weight("a", "b", 1.0);
        assert_eq!(g.connected_components().len(), 1);
        let mut h = FiniteWeightedGraph::new();
        h.add_vertex("b", 1.0).add_vertex("a", 1.0);
        let comps = h.connected_components();
        assert_eq!(comps, vec![vec![v("a")], vec![v("b")]]);
    }

    #[test]
    fn label_order_is_numeric_first() {
        let mut ids = vec![v("10"), v("a"), v("2"), v("-1"), VertexId::ray("r", 1)];
        ids.sort();
        assert_eq!(ids, vec![v("-1"), v("2"), v("10"), v("a"), VertexId::ray("r", 1)]);
    }
}
