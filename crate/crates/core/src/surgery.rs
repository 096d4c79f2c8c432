//! Vertex excision: remove `o`, attach rays where `g` differs from `g(o)` and
//! pendants where it agrees, and continue `g` harmonically.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::diagnose::LiouvilleWitness;
use crate::error::{Error, Result};
use crate::extended::{ExtendedFunction, ExtendedGraph, RayProfile, RaySpec};
use crate::graph::{FiniteWeightedGraph, VertexFunction, VertexId};
use crate::harmonic::classify_ray;
use crate::potential::GreenEstimate;
use crate::sequence::{SequenceRule, SeriesSum};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NeighborPartition {
    pub pole: VertexId,
    /// Neighbors with `g(x) ≠ g(o)`.
    pub n_o: Vec<VertexId>,
    /// Neighbors with `g(x) = g(o)`.
    pub n_c: Vec<VertexId>,
}

fn green_limit(g: &GreenEstimate) -> Result<&ExtendedFunction> {
    if !g.is_converged() {
        return Err(Error::Precondition(format!("Green estimate at {} has not converged", g.pole)));
    }
    g.limit
        .as_ref()
        .ok_or_else(|| Error::Precondition("Green estimate has no limit (recurrent graph)".into()))
}

fn check_pole(e: &ExtendedGraph, o: &VertexId) -> Result<()> {
    if !o.is_core() || !e.core.contains(o) {
        return Err(Error::UnknownVertex(o.clone()));
    }
    if e.rays_at(o).next().is_some() {
        return Err(Error::Precondition(format!("pole {o} carries a ray; surgery needs a pole whose neighbors are all core vertices")));
    }
    Ok(())
}

/// `x ∈ N_o` iff `|g(x) − g(o)| > tol · max(1, |g(o)|)`.
pub fn partition_neighbors(e: &ExtendedGraph, o: &VertexId, g: &GreenEstimate, tol: f64) -> Result<NeighborPartition> {
    check_pole(e, o)?;
    if &g.pole != o {
        return Err(Error::Precondition(format!("Green estimate has pole {}, not {o}", g.pole)));
    }
    let limit = green_limit(g)?;
    let go = limit.core.value(o);
    let threshold = tol * go.abs().max(1.0);
    let (mut n_o, mut n_c) = (Vec::new(), Vec::new());
    for (x, _) in e.core.neighbors(o) {
        if (limit.core.value(x) - go).abs() > threshold {
            n_o.push(x.clone());
        } else {
            n_c.push(x.clone());
        }
    }
    if n_o.is_empty() {
        return Err(Error::Precondition(format!(
            "N_o is empty at {o}: tolerance {tol:e} too large or Green values inaccurate"
        )));
    }
    Ok(NeighborPartition { pole: o.clone(), n_o, n_c })
}

/// Edge weights and measures for a ray attached at some `x ∈ N_o`.
#[derive(Clone, Debug, PartialEq)]
pub struct NewRay {
    pub weights: SequenceRule,
    pub measures: SequenceRule,
}

impl NewRay {
    /// Measures `½, ¼, …` on the new vertices.
    pub fn with_default_measure(weights: SequenceRule) -> Self {
        NewRay {
            weights,
            measures: SequenceRule::geometric(0.5, 0.5),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pendant {
    pub weight: f64,
    pub measure: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SurgeredGraph {
    pub graph: ExtendedGraph,
    pub removed: VertexId,
    /// `x ∈ N_o` ↦ id of the ray attached at `x`.
    pub attached: BTreeMap<VertexId, String>,
    /// `x ∈ N_c` ↦ pendant vertex `x_c`.
    pub pendants: BTreeMap<VertexId, VertexId>,
}

pub fn new_ray_id(x: &VertexId) -> String {
    format!("{x}+")
}

pub fn pendant_id(x: &VertexId) -> VertexId {
    VertexId::core(format!("{x}_c"))
}

pub fn excise_and_attach(
    e: &ExtendedGraph,
    partition: &NeighborPartition,
    rays: &BTreeMap<VertexId, NewRay>,
    pendants: &BTreeMap<VertexId, Pendant>,
) -> Result<SurgeredGraph> {
    let o = &partition.pole;
    check_pole(e, o)?;
    for x in &partition.n_o {
        if !rays.contains_key(x) {
            return Err(Error::Precondition(format!("no ray specification for {x} in N_o")));
        }
    }
    if let Some(x) = rays.keys().find(|x| !partition.n_o.contains(x)) {
        return Err(Error::InvalidArgument(format!("ray specification for {x}, which is not in N_o")));
    }
    for x in &partition.n_c {
        match pendants.get(x) {
            None => return Err(Error::Precondition(format!("no pendant specification for {x} in N_c"))),
            Some(p) if !(p.weight > 0.0 && p.measure > 0.0) => {
                return Err(Error::InvalidArgument(format!("pendant at {x} needs positive weight and measure")))
            }
            _ => {}
        }
    }
    if let Some(x) = pendants.keys().find(|x| !partition.n_c.contains(x)) {
        return Err(Error::InvalidArgument(format!("pendant specification for {x}, which is not in N_c")));
    }

    let keep: BTreeSet<VertexId> = e.core.vertices().filter(|v| *v != o).cloned().collect();
    let mut core: FiniteWeightedGraph = e.core.induced(&keep);
    let mut pendant_map = BTreeMap::new();
    for (x, p) in pendants {
        let xc = pendant_id(x);
        if core.contains(&xc) {
            return Err(Error::InvalidArgument(format!("pendant label {xc} already in use")));
        }
        core.add_vertex(xc.clone(), p.measure);
        core.set_weight(x.clone(), xc.clone(), p.weight);
        pendant_map.insert(x.clone(), xc);
    }
    let mut graph = ExtendedGraph::new(core);
    graph.rays = e.rays.clone();
    let mut attached = BTreeMap::new();
    for (x, new_ray) in rays {
        let id = new_ray_id(x);
        if graph.rays.iter().any(|r| r.id == id) {
            return Err(Error::InvalidArgument(format!("ray id {id} already in use")));
        }
        graph.rays.push(RaySpec::new(id.clone(), x.clone(), new_ray.weights.clone(), new_ray.measures.clone()));
        attached.insert(x.clone(), id);
    }
    graph.check()?;
    Ok(SurgeredGraph {
        graph,
        removed: o.clone(),
        attached,
        pendants: pendant_map,
    })
}

/// The harmonic continuation `g_o` of the Green's function to the surgered graph.
///
/// On the ray at `x ∈ N_o` the first step is
/// `g_o(x_1) = g(x) + (1/b_o(x,x_1)) Σ_{y ≠ o} b(x,y)(g(x) − g(y))`, after which
/// the profile carries the constant flux `C = b_o(x,x_1)(g_o(x_1) − g(x))`.
pub fn extend_green(e: &ExtendedGraph, g: &GreenEstimate, s: &SurgeredGraph) -> Result<ExtendedFunction> {
    let limit = green_limit(g)?;
    if g.pole != s.removed {
        return Err(Error::Precondition(format!("Green pole {} differs from the removed vertex {}", g.pole, s.removed)));
    }
    let go = limit.core.value(&s.removed);
    let mut core = VertexFunction::new();
    for v in s.graph.core.vertices() {
        core.set(v.clone(), limit.core.value(v));
    }
    for xc in s.pendants.values() {
        core.set(xc.clone(), go);
    }
    let mut rays = limit.rays.clone();
    for (x, id) in &s.attached {
        let mut outflow = 0.0;
        for (y, b) in e.neighbors(x)? {
            if y != s.removed {
                outflow += b * limit.difference(e, x, &y)?;
            }
        }
        if outflow == 0.0 {
            return Err(Error::Precondition(format!("g_o would be constant on the ray at {x}; partition does not match g")));
        }
        // d_0 = outflow / b_o(x, x_1), so the flux of the profile is the outflow itself
        rays.insert(id.clone(), RayProfile::harmonic(outflow));
    }
    Ok(ExtendedFunction { core, rays })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum L2Norm {
    /// `‖g_o‖ ≤ sqrt(partial + tail_bound)` with `partial` the truncation sum.
    Finite { value: f64, partial: f64, tail_bound: f64 },
    Divergent { ray: String },
    Undetermined { reason: String },
}

impl L2Norm {
    pub fn is_finite(&self) -> bool {
        matches!(self, L2Norm::Finite { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SurgeryReport {
    pub depth: usize,
    /// Largest scale-free flux residual over core vertices and ray vertices up to `depth`.
    pub max_interior_residual: f64,
    pub worst_vertex: Option<VertexId>,
    pub l2_norm_with_tail: L2Norm,
    /// Smallest vertex label of the component carrying the witness.
    pub nonconstant_component: Option<VertexId>,
    pub rays_pass_summability: bool,
    pub theorem_conclusion: bool,
}

/// Range of `|f|` along a harmonic ray tail from index `from` on, or `None` when unbounded.
fn tail_abs_range(f: &ExtendedFunction, e: &ExtendedGraph, ray: &RaySpec, from: usize) -> Result<Option<(f64, f64)>> {
    let Some(sup) = f.ray_sup_from(e, ray, from)? else {
        return Ok(None);
    };
    let start = f.value(e, &ray.vertex(from))?;
    let profile = f.rays.get(&ray.id);
    let inf = match profile {
        None => start.abs(),
        Some(p) if p.increments.len() <= from => match ray.resistance_from(from) {
            SeriesSum::Finite { value, error } => {
                let end = start + p.flux * value;
                let slack = p.flux.abs() * error;
                if start.signum() == end.signum() && end.abs() > slack {
                    start.abs().min(end.abs() - slack)
                } else {
                    0.0
                }
            }
            _ => start.abs(),
        },
        Some(_) => 0.0,
    };
    Ok(Some((inf, sup)))
}

pub fn verify_surgery(s: &SurgeredGraph, g_o: &ExtendedFunction, depth: usize, tol: f64) -> Result<SurgeryReport> {
    if depth == 0 {
        return Err(Error::InvalidArgument("depth must be at least 1".into()));
    }
    let e = &s.graph;
    let mut worst = 0.0;
    let mut worst_vertex = None;
    let mut scan = |v: VertexId| -> Result<()> {
        let r = g_o.flux_residual(e, &v)?;
        if r > worst || worst_vertex.is_none() {
            worst = r.max(worst);
            worst_vertex = Some(v);
        }
        Ok(())
    };
    for v in e.core.vertices() {
        scan(v.clone())?;
    }
    for ray in &e.rays {
        for k in 1..=depth {
            scan(ray.vertex(k))?;
        }
    }

    let values = g_o.on_truncation(e, depth)?;
    let mut partial = 0.0;
    for (v, x) in values.iter() {
        partial += x * x * e.measure(v)?;
    }
    let mut l2 = None;
    let mut tail_bound = 0.0;
    for ray in &e.rays {
        let range = tail_abs_range(g_o, e, ray, depth + 1)?;
        match (range, ray.measure_from(depth + 1)) {
            (Some((_, sup)), SeriesSum::Finite { value, error }) => tail_bound += sup * sup * (value + error),
            (Some((inf, _)), SeriesSum::Divergent) if inf > 0.0 => {
                l2 = Some(L2Norm::Divergent { ray: ray.id.clone() });
                break;
            }
            (Some((_, sup)), SeriesSum::Divergent) if sup == 0.0 => {}
            _ => {
                l2 = Some(L2Norm::Undetermined {
                    reason: format!("tail of ray {} not certifiable", ray.id),
                });
                break;
            }
        }
    }
    let l2 = l2.unwrap_or(L2Norm::Finite {
        value: (partial + tail_bound).sqrt(),
        partial,
        tail_bound,
    });

    let mut nonconstant_component = None;
    for comp in e.core_components() {
        let comp_set: BTreeSet<&VertexId> = comp.iter().collect();
        let comp_rays: Vec<&RaySpec> = e.rays.iter().filter(|r| comp_set.contains(&r.attach)).collect();
        if comp_rays.is_empty() {
            continue;
        }
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for v in comp.iter().cloned().chain(comp_rays.iter().flat_map(|r| (1..=depth).map(|k| r.vertex(k)))) {
            let x = values.value(&v);
            lo = lo.min(x);
            hi = hi.max(x);
        }
        if hi - lo > tol {
            nonconstant_component = comp.first().cloned();
            break;
        }
    }

    let rays_pass_summability = s
        .attached
        .values()
        .all(|id| e.ray(id).map(|r| classify_ray(r).imw_sum.is_finite()).unwrap_or(false));
    let theorem_conclusion = worst <= tol && l2.is_finite() && nonconstant_component.is_some();
    Ok(SurgeryReport {
        depth,
        max_interior_residual: worst,
        worst_vertex,
        l2_norm_with_tail: l2,
        nonconstant_component,
        rays_pass_summability,
        theorem_conclusion,
    })
}

impl SurgeryReport {
    /// The witness in the form consumed by the diagnostic, when the conclusion holds.
    pub fn liouville_witness(&self, s: &SurgeredGraph, g_o: &ExtendedFunction, sample_depth: usize) -> Result<Option<LiouvilleWitness>> {
        let L2Norm::Finite { value, .. } = self.l2_norm_with_tail else {
            return Ok(None);
        };
        if !self.theorem_conclusion {
            return Ok(None);
        }
        Ok(Some(LiouvilleWitness {
            description: format!("harmonic continuation of the Green's function after removing {}", s.removed),
            sample: g_o.on_truncation(&s.graph, sample_depth)?,
            l2_norm: value,
            max_residual: self.max_interior_residual,
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{green_function, ExhaustionOptions};

    fn base() -> ExtendedGraph {
        let mut core = FiniteWeightedGraph::new();
        core.add_vertex("o", 1.0).add_vertex("a", 1.0).set_weight("o", "a", 1.0);
        ExtendedGraph::new(core).with_ray(RaySpec::new(
            "r",
            "a",
            SequenceRule::geometric(2.0, 2.0),
            SequenceRule::geometric(0.5, 0.5),
        ))
    }

    fn new_ray() -> NewRay {
        NewRay {
            weights: SequenceRule::table(vec![2.0], SequenceRule::geometric(4.0, 4.0)),
            measures: SequenceRule::geometric(1.0, 0.5),
        }
    }

    fn o() -> VertexId {
        VertexId::core("o")
    }

    #[test]
    fn partition_of_worked_example() {
        let e = base();
        let g = green_function(&e, &o(), &ExhaustionOptions::default()).unwrap();
        for tol in [1e-6, 5e-7] {
            let p = partition_neighbors(&e, &o(), &g, tol).unwrap();
            assert_eq!(p.n_o, vec![VertexId::core("a")]);
            assert!(p.n_c.is_empty());
        }
    }

    #[test]
    fn dead_end_neighbor_goes_to_n_c() {
        let mut e = base();
        e.core.add_vertex("c", 1.0).set_weight("o", "c", 3.0);
        let g = green_function(&e, &o(), &ExhaustionOptions::default()).unwrap();
        let p = partition_neighbors(&e, &o(), &g, 1e-8).unwrap();
        assert_eq!(p.n_o, vec![VertexId::core("a")]);
        assert_eq!(p.n_c, vec![VertexId::core("c")]);

        let rays = BTreeMap::from([(VertexId::core("a"), new_ray())]);
        let pendants = BTreeMap::from([(VertexId::core("c"), Pendant { weight: 1.0, measure: 1.0 })]);
        let s = excise_and_attach(&e, &p, &rays, &pendants).unwrap();
        let xc = VertexId::core("c_c");
        assert_eq!(s.graph.core.neighbors(&xc).map(|(y, _)| y.clone()).collect::<Vec<_>>(), vec![VertexId::core("c")]);
        assert_eq!(s.graph.core_components().len(), 2);
        let g_o = extend_green(&e, &g, &s).unwrap();
        assert_eq!(g_o.core.value(&xc), g.limit.as_ref().unwrap().core.value(&o()));
        let rep = verify_surgery(&s, &g_o, 30, 1e-10).unwrap();
        assert!(rep.theorem_conclusion, "{rep:?}");
        assert_eq!(rep.nonconstant_component, Some(VertexId::core("a")));
    }

    #[test]
    fn worked_extension_values() {
        let e = base();
        let g = green_function(&e, &o(), &ExhaustionOptions::default()).unwrap();
        let p = partition_neighbors(&e, &o(), &g, 1e-8).unwrap();
        let s = excise_and_attach(&e, &p, &BTreeMap::from([(VertexId::core("a"), new_ray())]), &BTreeMap::new()).unwrap();
        assert!(!s.graph.contains(&o()));
        let g_o = extend_green(&e, &g, &s).unwrap();
        let id = new_ray_id(&VertexId::core("a"));
        let v = |k| g_o.value(&s.graph, &VertexId::ray(&id, k)).unwrap();
        assert!((v(1) - 1.5).abs() < 1e-12);
        assert!((v(2) - 1.75).abs() < 1e-12);
        assert!((v(200) - (1.5 + 1.0 / 3.0)).abs() < 1e-12);
        let rep = verify_surgery(&s, &g_o, 60, 1e-10).unwrap();
        assert!(rep.theorem_conclusion && rep.rays_pass_summability, "{rep:?}");
    }

    #[test]
    fn unit_measure_breaks_conclusion() {
        let e = base();
        let g = green_function(&e, &o(), &ExhaustionOptions::default()).unwrap();
        let p = partition_neighbors(&e, &o(), &g, 1e-8).unwrap();
        let mut ray = new_ray();
        ray.measures = SequenceRule::constant(1.0);
        let s = excise_and_attach(&e, &p, &BTreeMap::from([(VertexId::core("a"), ray)]), &BTreeMap::new()).unwrap();
        let g_o = extend_green(&e, &g, &s).unwrap();
        let rep = verify_surgery(&s, &g_o, 60, 1e-10).unwrap();
        assert!(matches!(rep.l2_norm_with_tail, L2Norm::Divergent { .. }));
        assert!(!rep.theorem_conclusion && !rep.rays_pass_summability);
    }

    #[test]
    fn rejects_missing_specs() {
        let e = base();
        let g = green_function(&e, &o(), &ExhaustionOptions::default()).unwrap();
        let p = partition_neighbors(&e, &o(), &g, 1e-8).unwrap();
        assert!(excise_and_attach(&e, &p, &BTreeMap::new(), &BTreeMap::new()).is_err());
        assert!(partition_neighbors(&e, &VertexId::core("a"), &g, 1e-8).is_err());
    }
}
