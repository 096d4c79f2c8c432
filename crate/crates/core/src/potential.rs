//! Equilibrium potentials, capacities and Green's functions by exhaustion.
//!
//! Every quantity is computed on the nested truncations `K_n = truncate(n)`
//! with the vertices beyond `K_n` grounded. Because rays are paths, the
//! discarded part of a ray of finite resistance acts on `K_n` exactly like a
//! single resistor of size `Σ_{k ≥ n} 1/b` to ground, which gives the
//! infinite-graph limits in closed form. Those limits certify the error of
//! the exhaustion traces.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::extended::{ExtendedFunction, ExtendedGraph, RayProfile};
use crate::graph::{FiniteWeightedGraph, VertexFunction, VertexId};
use crate::sequence::SeriesSum;
use crate::solvers::{self, DirichletOperator, SolveOptions};

/// Green's function values beyond this are treated as divergence.
pub const DIVERGENCE_THRESHOLD: f64 = 1e12;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum TraceVerdict {
    /// The limit lies within `error` of `limit`.
    Converged { limit: f64, error: f64 },
    /// Ran out of depth; `bound` is the last value, a one-sided bound by monotonicity.
    MonotoneUnconverged { bound: f64 },
    DivergentTail,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceTrace {
    pub depths: Vec<usize>,
    pub values: Vec<f64>,
    pub verdict: TraceVerdict,
}

impl ConvergenceTrace {
    pub fn last(&self) -> Option<f64> {
        self.values.last().copied()
    }

    pub fn is_nonincreasing(&self, slack: f64) -> bool {
        self.values.windows(2).all(|w| w[1] <= w[0] + slack * w[0].abs().max(1.0))
    }

    pub fn is_nondecreasing(&self, slack: f64) -> bool {
        self.values.windows(2).all(|w| w[1] >= w[0] - slack * w[0].abs().max(1.0))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExhaustionOptions {
    /// Successive values closer than `tol · max(1, |value|)` count as converged.
    pub tol: f64,
    pub max_depth: usize,
}

impl Default for ExhaustionOptions {
    fn default() -> Self {
        ExhaustionOptions {
            tol: 1e-10,
            max_depth: 200,
        }
    }
}

impl ExhaustionOptions {
    fn check(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::InvalidArgument("tolerance must be positive".into()));
        }
        if self.max_depth == 0 {
            return Err(Error::InvalidArgument("max depth must be at least 1".into()));
        }
        Ok(())
    }

    fn settled(&self, prev: f64, next: f64) -> bool {
        (next - prev).abs() < self.tol * next.abs().max(1.0)
    }
}

fn check_omega(e: &ExtendedGraph, omega: &BTreeSet<VertexId>) -> Result<()> {
    if omega.is_empty() {
        return Err(Error::InvalidArgument("Ω must be nonempty".into()));
    }
    for v in omega {
        if !v.is_core() || !e.core.contains(v) {
            return Err(Error::InvalidArgument(format!("Ω must consist of core vertices; {v} is not one")));
        }
    }
    Ok(())
}

/// Solves `ℒφ = 0` off `Ω` inside `op`'s interior, `φ = 1` on `Ω`, `φ = 0` on
/// grounded vertices. Interior components that touch neither `Ω` nor ground
/// carry `φ = 0`.
fn equilibrium_on(graph: FiniteWeightedGraph, k: &BTreeSet<VertexId>, omega: &BTreeSet<VertexId>, ground: &BTreeMap<VertexId, f64>) -> Result<VertexFunction> {
    let free: BTreeSet<VertexId> = k.difference(omega).cloned().collect();
    let mut reach = BTreeSet::new();
    for comp in graph.induced(k).connected_components() {
        if comp.iter().any(|v| omega.contains(v)) {
            reach.extend(comp);
        }
    }
    let interior: BTreeSet<VertexId> = free.intersection(&reach).cloned().collect();
    let mut phi: VertexFunction = omega.iter().map(|v| (v.clone(), 1.0)).collect();
    if interior.is_empty() {
        return Ok(phi);
    }
    let mut rhs = VertexFunction::new();
    for x in &interior {
        let s: f64 = graph.neighbors(x).filter(|(y, _)| omega.contains(*y)).map(|(_, b)| b).sum();
        if s > 0.0 {
            rhs.set(x.clone(), s / graph.measure(x)?);
        }
    }
    let g: BTreeMap<VertexId, f64> = ground.iter().filter(|(v, _)| interior.contains(*v)).map(|(v, c)| (v.clone(), *c)).collect();
    let op = DirichletOperator::new(graph, interior)?.with_ground(g)?;
    let u = solvers::solve(&op, &rhs, &SolveOptions::default())?;
    for (v, x) in u.iter() {
        phi.set(v.clone(), x);
    }
    Ok(phi)
}

/// Equilibrium potential `φ_n` of `Ω` in `K_n = truncate(depth)`.
///
/// The result is listed on `K_n`; it vanishes everywhere else.
pub fn equilibrium_potential(e: &ExtendedGraph, omega: &BTreeSet<VertexId>, depth: usize) -> Result<VertexFunction> {
    check_omega(e, omega)?;
    let graph = e.truncate(depth + 1)?;
    let k = e.truncation_vertices(depth);
    let mut phi = equilibrium_on(graph, &k, omega, &BTreeMap::new())?;
    for v in &k {
        if phi.get(v).is_none() {
            phi.set(v.clone(), 0.0);
        }
    }
    Ok(phi)
}

/// `𝒬(φ_n)`, including the edges from `K_n` to the grounded layer.
pub fn equilibrium_energy(e: &ExtendedGraph, phi: &VertexFunction, depth: usize) -> Result<f64> {
    Ok(e.truncate(depth + 1)?.energy(phi))
}

/// Exact `cap(Ω)` of the infinite graph, from the tail-grounded truncation.
pub fn capacity_limit(e: &ExtendedGraph, omega: &BTreeSet<VertexId>, depth: usize) -> Result<f64> {
    check_omega(e, omega)?;
    let op = e.tail_grounded(depth)?;
    let k = op.interior().clone();
    let ground = op.ground().clone();
    let graph = op.graph().clone();
    let phi = equilibrium_on(graph.clone(), &k, omega, &ground)?;
    let tail: f64 = ground.iter().map(|(v, c)| c * phi.value(v).powi(2)).sum();
    Ok(graph.energy(&phi) + tail)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CapacityResult {
    pub value: f64,
    pub trace: ConvergenceTrace,
    /// Capacity computed with exact resistors in place of the ray tails.
    pub exact_limit: f64,
}

/// `cap(Ω) = lim 𝒬(φ_n)`.
pub fn capacity(e: &ExtendedGraph, omega: &BTreeSet<VertexId>, opts: &ExhaustionOptions) -> Result<CapacityResult> {
    opts.check()?;
    check_omega(e, omega)?;
    let mut depths = Vec::new();
    let mut values = Vec::new();
    let mut converged = false;
    // without rays every truncation is the whole graph: one direct solve
    let finite = e.rays.is_empty();
    for depth in 1..=opts.max_depth {
        let phi = equilibrium_potential(e, omega, depth)?;
        let q = equilibrium_energy(e, &phi, depth)?;
        converged = finite || values.last().is_some_and(|&p| opts.settled(p, q));
        depths.push(depth);
        values.push(q);
        if converged {
            break;
        }
    }
    let last = *values.last().expect("max_depth ≥ 1");
    let last_depth = *depths.last().expect("max_depth ≥ 1");
    let exact = capacity_limit(e, omega, last_depth)?;
    let grounded = e.rays.iter().any(|r| matches!(r.resistance_from(0), SeriesSum::Finite { .. }));
    let verdict = if !grounded {
        // no finite-resistance path to infinity: the limit is zero, whatever the trace says
        TraceVerdict::Converged { limit: 0.0, error: 0.0 }
    } else if converged {
        TraceVerdict::Converged {
            limit: last,
            error: (last - exact).max(0.0) + 1e-14 * last,
        }
    } else {
        TraceVerdict::MonotoneUnconverged { bound: last }
    };
    let value = match verdict {
        TraceVerdict::Converged { limit, .. } => limit,
        _ => last,
    };
    Ok(CapacityResult {
        value,
        trace: ConvergenceTrace { depths, values, verdict },
        exact_limit: if grounded { exact } else { 0.0 },
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GreenEstimate {
    pub pole: VertexId,
    /// Final depth of the exhaustion.
    pub depth: usize,
    /// `g_n` on `truncate(depth)`.
    #[serde(skip)]
    pub values: VertexFunction,
    /// Trace of `g_n(o)`.
    pub trace: ConvergenceTrace,
    pub transient: bool,
    /// The infinite-graph limit: core values and the current leaving along each ray.
    #[serde(skip)]
    pub limit: Option<ExtendedFunction>,
    /// Bound on `Σ g² m` over ray vertices beyond `depth`, when certifiable.
    pub tail_l2_mass: Option<f64>,
}

impl GreenEstimate {
    pub fn is_converged(&self) -> bool {
        matches!(self.trace.verdict, TraceVerdict::Converged { .. })
    }

    /// Limit value at any vertex of the infinite graph.
    pub fn limit_value(&self, e: &ExtendedGraph, v: &VertexId) -> Result<f64> {
        match &self.limit {
            Some(f) => f.value(e, v),
            None => Err(Error::DivergentTail("graph is recurrent; no Green limit".into())),
        }
    }
}

fn pole_rhs(e: &ExtendedGraph, o: &VertexId) -> Result<VertexFunction> {
    let m = e.core.measure(o)?;
    Ok([(o.clone(), 1.0 / m)].into_iter().collect())
}

/// `g_n = L_n⁻¹ 1̂_o` on `truncate(depth)`.
pub fn green_at_depth(e: &ExtendedGraph, o: &VertexId, depth: usize) -> Result<VertexFunction> {
    let op = e.dirichlet(depth)?;
    solvers::solve(&op, &pole_rhs(e, o)?, &SolveOptions::default())
}

/// Whether the component of `o` reaches infinity through a ray of finite resistance.
pub fn is_transient_at(e: &ExtendedGraph, o: &VertexId) -> bool {
    e.core
        .connected_components()
        .into_iter()
        .find(|c| c.contains(o))
        .is_some_and(|comp| {
            e.rays
                .iter()
                .any(|r| comp.contains(&r.attach) && r.resistance_from(1).is_finite())
        })
}

/// Limit Green's function from the tail-grounded truncation at `depth`.
pub fn green_limit(e: &ExtendedGraph, o: &VertexId, depth: usize) -> Result<ExtendedFunction> {
    let op = e.tail_grounded(depth)?;
    let comp: BTreeSet<VertexId> = e
        .core
        .connected_components()
        .into_iter()
        .find(|c| c.contains(o))
        .ok_or_else(|| Error::UnknownVertex(o.clone()))?
        .into_iter()
        .collect();
    // restrict to the pole's component; other components carry g = 0
    let mut keep: BTreeSet<VertexId> = comp.clone();
    for r in e.rays.iter().filter(|r| comp.contains(&r.attach)) {
        keep.extend((1..=depth).map(|k| r.vertex(k)));
    }
    let graph = op.graph().induced(&keep);
    let ground: BTreeMap<VertexId, f64> = op.ground().iter().filter(|(v, _)| keep.contains(*v)).map(|(v, c)| (v.clone(), *c)).collect();
    let op = DirichletOperator::new(graph, keep)?.with_ground(ground)?;
    let g = solvers::solve(&op, &pole_rhs(e, o)?, &SolveOptions::default())?;
    let mut core = VertexFunction::new();
    for v in e.core.vertices() {
        core.set(v.clone(), g.value(v));
    }
    let mut rays = BTreeMap::new();
    for r in &e.rays {
        let flux = match r.resistance_from(0) {
            SeriesSum::Finite { value, .. } if comp.contains(&r.attach) => -core.value(&r.attach) / value,
            _ => 0.0,
        };
        rays.insert(r.id.clone(), RayProfile::harmonic(flux));
    }
    Ok(ExtendedFunction { core, rays })
}

/// Exhaustion Green's function `g(x) = G(o, x)`, monitored at `o`.
pub fn green_function(e: &ExtendedGraph, o: &VertexId, opts: &ExhaustionOptions) -> Result<GreenEstimate> {
    opts.check()?;
    if !o.is_core() || !e.core.contains(o) {
        return Err(Error::UnknownVertex(o.clone()));
    }
    let transient = is_transient_at(e, o);
    let mut depths = Vec::new();
    let mut values = Vec::new();
    let mut last_g = VertexFunction::new();
    let mut converged = false;
    let mut blew_up = false;
    for depth in 1..=opts.max_depth {
        let g = green_at_depth(e, o, depth)?;
        let v = g.value(o);
        converged = values.last().is_some_and(|&p| opts.settled(p, v));
        depths.push(depth);
        values.push(v);
        last_g = g;
        blew_up = v > DIVERGENCE_THRESHOLD;
        if converged || blew_up {
            break;
        }
    }
    let depth = *depths.last().expect("max_depth ≥ 1");
    let last = *values.last().expect("max_depth ≥ 1");
    let (verdict, limit, tail_l2_mass) = if transient && !blew_up {
        let limit = green_limit(e, o, depth)?;
        let exact = limit.core.value(o);
        let verdict = if converged {
            TraceVerdict::Converged {
                limit: last,
                error: (exact - last).max(0.0) + 1e-14 * exact,
            }
        } else {
            TraceVerdict::MonotoneUnconverged { bound: last }
        };
        let mut tail = Some(0.0);
        for r in &e.rays {
            let beyond = limit.value(e, &r.vertex(depth + 1))?;
            tail = match (tail, r.measure_from(depth + 1)) {
                (Some(t), SeriesSum::Finite { value, error }) => Some(t + beyond * beyond * (value + error)),
                (Some(t), _) if beyond == 0.0 => Some(t),
                _ => None,
            };
        }
        (verdict, Some(limit), tail)
    } else {
        (TraceVerdict::DivergentTail, None, None)
    };
    Ok(GreenEstimate {
        pole: o.clone(),
        depth,
        values: last_g,
        trace: ConvergenceTrace { depths, values, verdict },
        transient: transient && !blew_up,
        limit,
        tail_l2_mass,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrossCheck {
    /// `max_x |h(x) − g_n(x)| / max_x |g_n(x)|`.
    pub discrepancy: f64,
    /// `e^{−λT}/λ / √(m(o) · min m) / max |g_n|`, an upper bound for the discrepancy.
    pub bound: f64,
    pub lambda_min: f64,
}

/// Compares the heat-kernel time integral up to `T` with the linear solve for `g_n`.
pub fn heat_green_crosscheck(e: &ExtendedGraph, o: &VertexId, depth: usize, horizon: f64) -> Result<CrossCheck> {
    let op = e.dirichlet(depth)?;
    let g = solvers::solve(&op, &pole_rhs(e, o)?, &SolveOptions::default())?;
    let h = solvers::heat_integral_detailed(&op, o, horizon)?;
    let scale = g.max_abs();
    let diff = op.vertices().iter().map(|v| (h.values.value(v) - g.value(v)).abs()).fold(0.0, f64::max);
    let m_o = e.core.measure(o)?;
    let m_min = op.vertices().iter().map(|v| op.graph().measure(v)).collect::<Result<Vec<_>>>()?.into_iter().fold(f64::INFINITY, f64::min);
    let lambda = h.lambda_min;
    Ok(CrossCheck {
        discrepancy: diff / scale,
        bound: (-lambda * horizon).exp() / lambda / (m_o * m_min).sqrt() / scale,
        lambda_min: lambda,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum L2BoundCheck {
    Applicable(L2BoundReport),
    NotApplicable { reason: String },
}

impl L2BoundCheck {
    pub fn holds(&self) -> Option<bool> {
        match self {
            L2BoundCheck::Applicable(r) => Some(r.holds),
            L2BoundCheck::NotApplicable { .. } => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct L2BoundReport {
    pub depth: usize,
    /// `‖g_n‖_{ℓ²(K_n ∖ Ω, m)}`.
    pub lhs: f64,
    /// `C_n · √(𝒬(φ_n) / λ(K_n))`.
    pub rhs: f64,
    /// `C_n = max_{∂Ω} g_n`.
    pub c: f64,
    /// `𝒬(φ_n)`.
    pub energy: f64,
    /// `λ₀` of the Dirichlet restriction to `K_n`.
    pub lambda: f64,
    /// `lhs ≤ rhs`, up to relative rounding `1e−9`.
    pub holds: bool,
    /// Upper bound for `‖g‖_{ℓ²(X ∖ Ω)}` of the limit, including ray tails, when certifiable.
    pub lhs_limit_upper: Option<f64>,
    /// `C · √cap(Ω) / √λ(K_n)` from the exact limits; `λ(K_n) ≥ λ₀`, so this
    /// undershoots the right-hand side of the infinite-graph inequality.
    pub rhs_limit_lower: Option<f64>,
}

/// Checks `‖g‖_{ℓ²(X∖Ω)} ≤ (C/√λ₀)·√cap(Ω)` at truncation `depth`.
///
/// The inequality holds exactly for the truncated objects: `g_n ≤ C_n φ_n`
/// by the maximum principle and `‖φ_n‖² ≤ 𝒬(φ_n)/λ(K_n)` since `φ_n` is
/// supported in `K_n`. The limit quantities are reported beside it.
pub fn greens_l2_bound_check(
    e: &ExtendedGraph,
    o: &VertexId,
    omega: &BTreeSet<VertexId>,
    depth: usize,
    tol: f64,
) -> Result<L2BoundCheck> {
    check_omega(e, omega)?;
    if !omega.contains(o) {
        return Err(Error::InvalidArgument("Ω must contain the pole o".into()));
    }
    if e.rays.is_empty() && omega.len() == e.core.len() {
        return Ok(L2BoundCheck::Applicable(L2BoundReport {
            depth,
            lhs: 0.0,
            rhs: 0.0,
            c: 0.0,
            energy: 0.0,
            lambda: 0.0,
            holds: true,
            lhs_limit_upper: Some(0.0),
            rhs_limit_lower: Some(0.0),
        }));
    }
    if !is_transient_at(e, o) {
        return Ok(L2BoundCheck::NotApplicable {
            reason: "graph is recurrent at the pole; no Green's function".into(),
        });
    }
    let op = e.dirichlet(depth)?;
    let eig = solvers::smallest_eigenvalue(&op, &SolveOptions::default())?;
    if eig.value <= tol {
        return Ok(L2BoundCheck::NotApplicable {
            reason: format!("λ₀ estimate {:e} is not above tolerance {tol:e}", eig.value),
        });
    }
    let g = solvers::solve(&op, &pole_rhs(e, o)?, &SolveOptions::default())?;
    let phi = equilibrium_potential(e, omega, depth)?;
    let energy = equilibrium_energy(e, &phi, depth)?;
    let graph = op.graph();
    let boundary = graph.boundary(omega)?;
    let c = boundary.iter().map(|x| g.value(x)).fold(0.0, f64::max);
    let mut lhs2 = 0.0;
    for v in op.vertices().iter().filter(|v| !omega.contains(*v)) {
        lhs2 += g.value(v).powi(2) * graph.measure(v)?;
    }
    let lhs = lhs2.sqrt();
    let rhs = c * (energy / eig.value).sqrt();

    let limit = green_limit(e, o, depth)?;
    let mut tail = Some(0.0);
    let mut lim2 = 0.0;
    for v in op.vertices().iter().filter(|v| !omega.contains(*v)) {
        lim2 += limit.value(e, v)?.powi(2) * graph.measure(v)?;
    }
    for r in &e.rays {
        let beyond = limit.value(e, &r.vertex(depth + 1))?;
        tail = match (tail, r.measure_from(depth + 1)) {
            (Some(t), SeriesSum::Finite { value, error }) => Some(t + beyond * beyond * (value + error)),
            (Some(t), _) if beyond == 0.0 => Some(t),
            _ => None,
        };
    }
    let c_limit = boundary.iter().map(|x| limit.core.value(x)).fold(0.0, f64::max);
    let cap = capacity_limit(e, omega, depth)?;
    Ok(L2BoundCheck::Applicable(L2BoundReport {
        depth,
        lhs,
        rhs,
        c,
        energy,
        lambda: eig.value,
        holds: lhs <= rhs * (1.0 + 1e-9),
        lhs_limit_upper: tail.map(|t| (lim2 + t).sqrt()),
        rhs_limit_lower: Some(c_limit * (cap / eig.value).sqrt()),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extended::RaySpec;
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

    fn one() -> BTreeSet<VertexId> {
        [VertexId::core("1")].into()
    }

    #[test]
    fn equilibrium_potential_worked_value() {
        // K = half-line {1,2,3,4} grounded at 5, i.e. truncation depth 3
        let phi = equilibrium_potential(&standard_ray(), &one(), 3).unwrap();
        assert!((phi.value(&VertexId::ray("r", 1)) - 7.0 / 15.0).abs() < 1e-15);
        assert_eq!(phi.value(&VertexId::core("1")), 1.0);
    }

    #[test]
    fn capacity_of_standard_ray() {
        let c = capacity(&standard_ray(), &one(), &ExhaustionOptions::default()).unwrap();
        assert!((c.value - 1.0).abs() < 1e-9);
        assert!((c.exact_limit - 1.0).abs() < 1e-14);
        assert!(c.trace.is_nonincreasing(1e-14));
    }

    #[test]
    fn finite_graph_whole_core_has_zero_capacity() {
        let mut core = FiniteWeightedGraph::new();
        core.add_vertex("a", 1.0).add_vertex("b", 2.0).set_weight("a", "b", 1.0);
        let e = ExtendedGraph::new(core);
        let omega: BTreeSet<VertexId> = ["a", "b"].iter().map(|&s| VertexId::core(s)).collect();
        let c = capacity(&e, &omega, &ExhaustionOptions::default()).unwrap();
        assert_eq!(c.value, 0.0);
    }

    #[test]
    fn green_on_standard_ray() {
        let g = green_function(&standard_ray(), &VertexId::core("1"), &ExhaustionOptions { tol: 1e-12, max_depth: 60 }).unwrap();
        assert!(g.transient);
        assert!(g.is_converged());
        assert!((g.values.value(&VertexId::core("1")) - 1.0).abs() < 1e-11);
        assert!((g.values.value(&VertexId::ray("r", 1)) - 0.5).abs() < 1e-11);
        let e = standard_ray();
        assert!((g.limit_value(&e, &VertexId::ray("r", 9)).unwrap() - 2f64.powi(-9)).abs() < 1e-15);
    }

    #[test]
    fn green_two_vertex_core() {
        let mut core = FiniteWeightedGraph::new();
        core.add_vertex("o", 1.0).add_vertex("a", 1.0).set_weight("o", "a", 1.0);
        let e = ExtendedGraph::new(core).with_ray(RaySpec::new(
            "r",
            "a",
            SequenceRule::geometric(2.0, 2.0),
            SequenceRule::geometric(0.5, 0.5),
        ));
        let g = green_function(&e, &VertexId::core("o"), &ExhaustionOptions::default()).unwrap();
        let lim = g.limit.unwrap();
        assert!((lim.core.value(&VertexId::core("o")) - 2.0).abs() < 1e-13);
        assert!((lim.core.value(&VertexId::core("a")) - 1.0).abs() < 1e-13);
    }

    #[test]
    fn recurrent_line() {
        let mut core = FiniteWeightedGraph::new();
        core.add_vertex("1", 1.0);
        let e = ExtendedGraph::new(core).with_ray(RaySpec::new(
            "r",
            "1",
            SequenceRule::constant(1.0),
            SequenceRule::constant(1.0),
        ));
        let g = green_function(&e, &VertexId::core("1"), &ExhaustionOptions { tol: 1e-10, max_depth: 30 }).unwrap();
        assert!(!g.transient);
        assert_eq!(g.trace.verdict, TraceVerdict::DivergentTail);
        // g_n(1) is the resistance to the grounded vertex
        assert!((g.trace.values[9] - 11.0).abs() < 1e-10);
    }

    #[test]
    fn crosscheck_horizon_zero() {
        let mut core = FiniteWeightedGraph::new();
        core.add_vertex("x", 1.0);
        let e = ExtendedGraph::new(core).with_ray(RaySpec::new(
            "r",
            "x",
            SequenceRule::constant(2.0),
            SequenceRule::constant(1.0),
        ));
        let c = heat_green_crosscheck(&e, &VertexId::core("x"), 1, 0.0).unwrap();
        assert!((c.discrepancy - 1.0).abs() < 1e-15);
    }

    #[test]
    fn l2_bound_worked_example() {
        let e = standard_ray();
        let r = greens_l2_bound_check(&e, &VertexId::core("1"), &one(), 30, 1e-7).unwrap();
        let L2BoundCheck::Applicable(r) = r else { panic!() };
        assert!(r.holds);
        assert!((r.lhs_limit_upper.unwrap() - (1.0f64 / 14.0).sqrt()).abs() < 1e-9);
        assert!(r.lambda <= 4.0);
    }
}
