//! Harmonic and λ-harmonic functions along rays.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::extended::{ExtendedGraph, RayProfile, RaySpec};
use crate::graph::{FiniteWeightedGraph, VertexFunction, VertexId};
use crate::sequence::{cumulative_square_sum, SeriesSum};

/// `max_{x ∈ interior} |ℒf(x)|`.
pub fn harmonic_residual(g: &FiniteWeightedGraph, f: &VertexFunction, interior: &BTreeSet<VertexId>) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for x in interior {
        worst = worst.max(g.laplacian_at(f, x)?.abs());
    }
    Ok(worst)
}

/// The harmonic continuation along `ray` determined by `v(0) = v0` at the
/// attach vertex and `v(1) = v1`: constant flux `C = b01 (v1 − v0)`.
pub fn harmonic_ray_profile(v0: f64, v1: f64, b01: f64) -> RayProfile {
    RayProfile {
        increments: vec![v1 - v0],
        flux: b01 * (v1 - v0),
    }
}

/// `v(r+1) = v1 + C Σ_{k=1}^{r} 1/b(x_k, x_{k+1})` with `C = b01 (v1 − v0)`.
pub fn extend_harmonic_on_ray(v0: f64, v1: f64, b01: f64, ray: &RaySpec, r: usize) -> Result<f64> {
    if r == 0 {
        return Err(Error::InvalidArgument("index r must be at least 1".into()));
    }
    if !(b01 > 0.0) {
        return Err(Error::InvalidArgument("b01 must be positive".into()));
    }
    let c = b01 * (v1 - v0);
    Ok(v1 + c * (1..=r).map(|k| 1.0 / ray.weight(k)).sum::<f64>())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RayClassification {
    pub ray: String,
    /// `Σ_{k ≥ 1} 1/b(x_k, x_{k+1})`.
    pub sum_inv_b: SeriesSum,
    /// `Σ_{r ≥ 1} m(x_r)`.
    pub sum_m: SeriesSum,
    /// `Σ_{r ≥ 1} (Σ_{k ≤ r} 1/b(x_k, x_{k+1}))² m(x_{r+1})`.
    pub imw_sum: SeriesSum,
    pub bounded_nonconstant_harmonic_possible: bool,
    pub l2_nonconstant_extension_possible: bool,
    pub esa_fails_on_ray: bool,
}

pub fn classify_ray(ray: &RaySpec) -> RayClassification {
    let inv = ray.weights.expansion().recip();
    let next = ray.measures.expansion().shift(1);
    let sum_inv_b = inv.sum_from(1);
    let imw_sum = cumulative_square_sum(&inv, &next, 1);
    RayClassification {
        ray: ray.id.clone(),
        bounded_nonconstant_harmonic_possible: sum_inv_b.is_finite(),
        l2_nonconstant_extension_possible: imw_sum.is_finite(),
        esa_fails_on_ray: imw_sum.is_finite(),
        sum_inv_b,
        sum_m: ray.measure_from(1),
        imw_sum,
    }
}

/// Shape of graphs that are a single line.
#[derive(Clone, Debug, PartialEq)]
pub enum LineShape {
    /// Core path followed by one ray; `core` runs from the free end to the attach vertex.
    HalfLine { core: Vec<VertexId>, ray: String },
    /// One ray at each end of a core path; `core` runs from the first ray's attach vertex to the second's.
    TwoSided { core: Vec<VertexId>, rays: [String; 2] },
}

/// Recognizes graphs whose vertices form a single (half- or two-sided) line.
pub fn line_shape(e: &ExtendedGraph) -> Option<LineShape> {
    let core = &e.core;
    if core.is_empty() || !core.is_connected() || core.edge_count() + 1 != core.len() || e.rays.is_empty() || e.rays.len() > 2 {
        return None;
    }
    let degree = |v: &VertexId| core.neighbors(v).count() + e.rays_at(v).count();
    if core.vertices().any(|v| degree(v) > 2) {
        return None;
    }
    let start = e.rays[0].attach.clone();
    let mut order = vec![start.clone()];
    let mut prev: Option<VertexId> = None;
    let mut cur = start;
    loop {
        let next = core.neighbors(&cur).map(|(y, _)| y.clone()).find(|y| Some(y) != prev.as_ref());
        match next {
            Some(n) => {
                prev = Some(cur);
                cur = n.clone();
                order.push(n);
            }
            None => break,
        }
    }
    match e.rays.len() {
        1 => {
            order.reverse();
            Some(LineShape::HalfLine {
                core: order,
                ray: e.rays[0].id.clone(),
            })
        }
        _ => {
            if e.rays[1].attach != *order.last().expect("nonempty") {
                return None;
            }
            Some(LineShape::TwoSided {
                core: order,
                rays: [e.rays[0].id.clone(), e.rays[1].id.clone()],
            })
        }
    }
}

/// A half-line `1, 2, 3, …` viewed through an [`ExtendedGraph`].
#[derive(Clone, Debug)]
pub struct HalfLineView<'a> {
    core: Vec<VertexId>,
    core_b: Vec<f64>,
    core_m: Vec<f64>,
    ray: &'a RaySpec,
}

impl<'a> HalfLineView<'a> {
    pub fn new(e: &'a ExtendedGraph) -> Result<Self> {
        let Some(LineShape::HalfLine { core, ray }) = line_shape(e) else {
            return Err(Error::Precondition("graph is not a half-line".into()));
        };
        let core_b = core.windows(2).map(|w| e.core.weight(&w[0], &w[1])).collect();
        let core_m = core.iter().map(|v| e.core.measure(v)).collect::<Result<_>>()?;
        Ok(HalfLineView {
            core,
            core_b,
            core_m,
            ray: e.ray(&ray)?,
        })
    }

    pub fn ray(&self) -> &RaySpec {
        self.ray
    }

    /// Vertex `n ≥ 1`.
    pub fn vertex(&self, n: usize) -> VertexId {
        let l = self.core.len();
        if n <= l {
            self.core[n - 1].clone()
        } else {
            self.ray.vertex(n - l)
        }
    }

    /// `b(n, n+1)`.
    pub fn b(&self, n: usize) -> f64 {
        let l = self.core.len();
        if n < l {
            self.core_b[n - 1]
        } else {
            self.ray.weight(n - l)
        }
    }

    /// `m(n)`.
    pub fn m(&self, n: usize) -> f64 {
        let l = self.core.len();
        if n <= l {
            self.core_m[n - 1]
        } else {
            self.ray.measure(n - l)
        }
    }

    /// `m(X)`.
    pub fn total_measure(&self) -> SeriesSum {
        let core: f64 = self.core_m.iter().sum();
        match self.ray.measure_from(1) {
            SeriesSum::Finite { value, error } => SeriesSum::Finite { value: value + core, error },
            other => other,
        }
    }

    /// `Σ_n 1/b(n, n+1)`.
    pub fn resistance(&self) -> SeriesSum {
        let core: f64 = self.core_b.iter().map(|b| 1.0 / b).sum();
        match self.ray.resistance_from(0) {
            SeriesSum::Finite { value, error } => SeriesSum::Finite { value: value + core, error },
            other => other,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LambdaHarmonic {
    pub lambda: f64,
    /// `f(1), …, f(depth + 1)`.
    pub values: Vec<f64>,
    /// `f(n+1) − f(n)` for `n = 1 … depth`.
    #[serde(skip)]
    pub increments: Vec<f64>,
    /// Largest relative residual of the three-term recursion over `n = 1 … depth`.
    pub max_recursion_residual: f64,
    pub strictly_increasing: bool,
    /// From the criterion: with `m(X) < ∞`, `f` is bounded iff `Σ 1/b < ∞`.
    pub bounded: Option<bool>,
    pub in_l2: Option<bool>,
    /// `Σ_{n ≤ depth+1} f(n)² m(n)`.
    pub l2_partial_sum: f64,
    pub growth_certificate: String,
}

/// Solves `ℒf = λ f` on a half-line from `f(1) = f1`.
///
/// The recursion is run on fluxes `F_n = b(n,n+1)(f(n+1) − f(n))`, which obey
/// `F_n = F_{n−1} − λ m(n) f(n)` with `F_0 = 0`. For `λ < 0` and `f1 > 0` every
/// term is positive, so no cancellation occurs.
pub fn lambda_harmonic_ray(e: &ExtendedGraph, lambda: f64, f1: f64, depth: usize) -> Result<LambdaHarmonic> {
    if !(lambda < 0.0) {
        return Err(Error::InvalidArgument(format!("λ must be negative, got {lambda}")));
    }
    if f1 == 0.0 || !f1.is_finite() {
        return Err(Error::InvalidArgument("f(1) must be nonzero".into()));
    }
    let line = HalfLineView::new(e)?;
    let mut values = vec![f1];
    let mut increments = Vec::with_capacity(depth);
    let mut flux = 0.0;
    for n in 1..=depth {
        let f = values[n - 1];
        flux -= lambda * line.m(n) * f;
        let d = flux / line.b(n);
        increments.push(d);
        values.push(f + d);
    }
    let mut worst: f64 = 0.0;
    for n in 1..=depth {
        let f = values[n - 1];
        let out = line.b(n) * increments[n - 1];
        let inn = if n == 1 { 0.0 } else { line.b(n - 1) * increments[n - 2] };
        let rhs = lambda * line.m(n) * f;
        // b(n,n−1)(f(n)−f(n−1)) + b(n,n+1)(f(n)−f(n+1)) − λ m(n) f(n)
        let net = inn - out - rhs;
        let scale = inn.abs() + out.abs() + rhs.abs();
        if scale > 0.0 {
            worst = worst.max(net.abs() / scale);
        }
    }
    let strictly_increasing = if f1 > 0.0 {
        increments.iter().all(|&d| d > 0.0)
    } else {
        increments.iter().all(|&d| d < 0.0)
    };
    let l2_partial_sum = values.iter().enumerate().map(|(i, f)| f * f * line.m(i + 1)).sum();
    let measure = line.total_measure();
    let resistance = line.resistance();
    let (bounded, in_l2, growth_certificate) = match (&measure, &resistance) {
        (SeriesSum::Finite { .. }, SeriesSum::Finite { .. }) => (
            Some(true),
            Some(true),
            "m(X) < ∞ and Σ 1/b < ∞: f is bounded, hence square integrable".to_string(),
        ),
        (SeriesSum::Finite { .. }, SeriesSum::Divergent) => (
            Some(false),
            None,
            "m(X) < ∞ and Σ 1/b = ∞: f is unbounded".to_string(),
        ),
        (SeriesSum::Divergent, _) => (
            None,
            Some(false),
            "f is monotone with |f| ≥ |f(1)| > 0 and m(X) = ∞: not square integrable".to_string(),
        ),
        _ => (None, None, "criterion not computable for these sequence rules".to_string()),
    };
    Ok(LambdaHarmonic {
        lambda,
        values,
        increments,
        max_recursion_residual: worst,
        strictly_increasing,
        bounded,
        in_l2,
        l2_partial_sum,
        growth_certificate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequence::SequenceRule;

    fn standard_ray() -> ExtendedGraph {
        let mut core = FiniteWeightedGraph::new();
        core.add_vertex("1", 0.5);
        ExtendedGraph::new(core).with_ray(RaySpec::new(
            "r",
            "1",
            SequenceRule::geometric(2.0, 2.0),
            SequenceRule::geometric(0.5, 0.5),
        ))
    }

    fn ray(w: SequenceRule, m: SequenceRule) -> RaySpec {
        RaySpec::new("r", "0", w, m)
    }

    #[test]
    fn residual_examples() {
        let mut g = FiniteWeightedGraph::new();
        g.add_vertex("x", 2.0).add_vertex("y", 1.0).set_weight("x", "y", 3.0);
        let all = g.vertex_set();
        assert_eq!(harmonic_residual(&g, &VertexFunction::constant(&g, 4.0), &all).unwrap(), 0.0);
        let delta: VertexFunction = [(VertexId::core("x"), 1.0)].into_iter().collect();
        let only_x: BTreeSet<VertexId> = [VertexId::core("x")].into();
        assert_eq!(harmonic_residual(&g, &delta, &only_x).unwrap(), g.weighted_degree(&VertexId::core("x")).unwrap());
    }

    #[test]
    fn extension_worked_values() {
        let r = ray(SequenceRule::geometric(1.0, 4.0), SequenceRule::constant(1.0));
        assert_eq!(extend_harmonic_on_ray(0.0, 1.0, 1.0, &r, 1).unwrap(), 1.25);
        assert_eq!(extend_harmonic_on_ray(0.0, 1.0, 1.0, &r, 2).unwrap(), 1.3125);
        assert!((extend_harmonic_on_ray(0.0, 1.0, 1.0, &r, 60).unwrap() - 4.0 / 3.0).abs() < 1e-15);
        assert_eq!(extend_harmonic_on_ray(2.0, 2.0, 5.0, &r, 9).unwrap(), 2.0);
    }

    #[test]
    fn classification_examples() {
        let c = classify_ray(&ray(SequenceRule::geometric(1.0, 4.0), SequenceRule::geometric(1.0, 0.5)));
        assert!(c.sum_inv_b.is_finite() && c.sum_m.is_finite() && c.imw_sum.is_finite());
        assert!(c.bounded_nonconstant_harmonic_possible && c.l2_nonconstant_extension_possible && c.esa_fails_on_ray);

        let c = classify_ray(&ray(SequenceRule::constant(1.0), SequenceRule::constant(1.0)));
        assert!(c.sum_inv_b.is_divergent() && c.sum_m.is_divergent() && c.imw_sum.is_divergent());
        assert!(!c.bounded_nonconstant_harmonic_possible && !c.esa_fails_on_ray);

        let c = classify_ray(&ray(SequenceRule::geometric(1.0, 2.0), SequenceRule::constant(1.0)));
        assert!((c.sum_inv_b.value().unwrap() - 1.0).abs() < 1e-15);
        assert!(c.imw_sum.is_divergent());
        assert!(c.bounded_nonconstant_harmonic_possible && !c.l2_nonconstant_extension_possible);
    }

    #[test]
    fn lambda_harmonic_standard_ray() {
        let r = lambda_harmonic_ray(&standard_ray(), -1.0, 1.0, 200).unwrap();
        assert_eq!(r.values[1], 1.25);
        assert!(r.strictly_increasing);
        assert_eq!(r.bounded, Some(true));
        assert_eq!(r.in_l2, Some(true));
        assert!(r.max_recursion_residual <= 1e-12);
        assert!(lambda_harmonic_ray(&standard_ray(), 0.0, 1.0, 5).is_err());
        assert!(lambda_harmonic_ray(&standard_ray(), -1.0, 0.0, 5).is_err());
    }

    #[test]
    fn shapes() {
        let e = standard_ray();
        assert!(matches!(line_shape(&e), Some(LineShape::HalfLine { .. })));
        let mut core = FiniteWeightedGraph::new();
        core.add_vertex("1", 1.0).add_vertex("-1", 1.0).set_weight("1", "-1", 1.0);
        let two = ExtendedGraph::new(core)
            .with_ray(RaySpec::new("pos", "1", SequenceRule::constant(1.0), SequenceRule::constant(1.0)))
            .with_ray(RaySpec::new("neg", "-1", SequenceRule::constant(1.0), SequenceRule::constant(1.0)));
        assert!(matches!(line_shape(&two), Some(LineShape::TwoSided { .. })));
        let star = two.clone().with_ray(RaySpec::new("x", "1", SequenceRule::constant(1.0), SequenceRule::constant(1.0)));
        assert_eq!(line_shape(&star), None);
    }
}
