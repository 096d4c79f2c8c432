//! Edge length functions, path metrics and completeness.

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeMap, BinaryHeap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::extended::{ExtendedGraph, RaySpec};
use crate::graph::{FiniteWeightedGraph, VertexId};
use crate::sequence::{Expansion, SequenceRule, SeriesSum};

/// Explicitly streamed terms before switching to a tail bound.
const STREAM_TERMS: usize = 4096;
/// Ray vertices checked explicitly in [`check_intrinsic`] beyond the rule prefixes.
const EXPLICIT_CHECK: usize = 64;

/// Lengths `σ(x_k, x_{k+1})`, `k ≥ 0`, along one ray (`x_0` the attach vertex).
#[derive(Clone, Debug, PartialEq)]
pub enum RayLengths {
    Rule(SequenceRule),
    /// Min-degree lengths evaluated from the ray itself; tails are bounded by
    /// `σ_k ≤ sqrt(m(x_{k+1}) / b(x_k, x_{k+1}))`.
    Degree { ray: RaySpec, attach_degree: f64 },
}

fn ray_degree(ray: &RaySpec, attach_degree: f64, k: usize) -> f64 {
    if k == 0 {
        attach_degree
    } else {
        (ray.weight(k - 1) + ray.weight(k)) / ray.measure(k)
    }
}

fn min_degree_sigma(ray: &RaySpec, attach_degree: f64, k: usize) -> f64 {
    1.0 / ray_degree(ray, attach_degree, k).max(ray_degree(ray, attach_degree, k + 1)).sqrt()
}

impl RayLengths {
    pub fn value(&self, k: usize) -> f64 {
        match self {
            RayLengths::Rule(r) => r.value(k),
            RayLengths::Degree { ray, attach_degree } => min_degree_sigma(ray, *attach_degree, k),
        }
    }

    /// `Σ_{k < n} σ_k`.
    pub fn partial(&self, n: usize) -> f64 {
        match self {
            RayLengths::Rule(r) => r.partial_sum(0, n),
            RayLengths::Degree { .. } => (0..n).map(|k| self.value(k)).sum(),
        }
    }

    /// `Σ_{k ≥ n} σ_k`.
    pub fn tail_from(&self, n: usize) -> SeriesSum {
        match self {
            RayLengths::Rule(r) => r.sum_from(n),
            RayLengths::Degree { ray, .. } => {
                let envelope = ray.measures.expansion().shift(1).mul(&ray.weights.expansion().recip()).powf(0.5);
                let end = n + STREAM_TERMS;
                match envelope.sum_from(end) {
                    SeriesSum::Finite { value, error } => {
                        let head: f64 = (n..end).map(|k| self.value(k)).sum();
                        SeriesSum::Finite {
                            value: head + value / 2.0,
                            error: value / 2.0 + error + head * 1e-15,
                        }
                    }
                    _ => SeriesSum::not_computable("upper envelope of the min-degree lengths is not summable"),
                }
            }
        }
    }

    pub fn total(&self) -> SeriesSum {
        self.tail_from(0)
    }
}

/// A length function `σ`: a value per core edge and a rule per ray.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LengthFunction {
    core: BTreeMap<(VertexId, VertexId), f64>,
    rays: BTreeMap<String, RayLengths>,
}

fn key(x: &VertexId, y: &VertexId) -> (VertexId, VertexId) {
    if x <= y {
        (x.clone(), y.clone())
    } else {
        (y.clone(), x.clone())
    }
}

impl LengthFunction {
    pub fn new() -> Self {
        Self::default()
    }

    /// `σ ≡ c` on every edge of `e`.
    pub fn constant(e: &ExtendedGraph, c: f64) -> Self {
        let mut s = LengthFunction::new();
        for (x, y, _) in e.core.edges() {
            s.set_core(x, y, c);
        }
        for r in &e.rays {
            s.set_ray(&r.id, RayLengths::Rule(SequenceRule::constant(c)));
        }
        s
    }

    pub fn set_core(&mut self, x: &VertexId, y: &VertexId, sigma: f64) -> &mut Self {
        self.core.insert(key(x, y), sigma);
        self
    }

    pub fn set_ray(&mut self, id: &str, lengths: RayLengths) -> &mut Self {
        self.rays.insert(id.to_string(), lengths);
        self
    }

    pub fn ray(&self, id: &str) -> Option<&RayLengths> {
        self.rays.get(id)
    }

    /// `σ(x, y)` for a core edge or a ray edge (including truncation vertices).
    pub fn edge_length(&self, e: &ExtendedGraph, x: &VertexId, y: &VertexId) -> Option<f64> {
        let on_ray = |ray: &str, k: usize| self.rays.get(ray).map(|l| l.value(k));
        match (x, y) {
            (VertexId::Core(_), VertexId::Core(_)) => self.core.get(&key(x, y)).copied(),
            (VertexId::Ray { ray: a, index: i }, VertexId::Ray { ray: b, index: j }) if a == b && i.abs_diff(*j) == 1 => {
                on_ray(a, *i.min(j))
            }
            (VertexId::Core(_), VertexId::Ray { ray, index: 1 }) | (VertexId::Ray { ray, index: 1 }, VertexId::Core(_)) => {
                let attach = if x.is_core() { x } else { y };
                match e.ray(ray) {
                    Ok(r) if &r.attach == attach => on_ray(ray, 0),
                    _ => None,
                }
            }
            _ => None,
        }
    }

    /// Checks that `σ` is positive exactly on the edges of `e`.
    pub fn validate(&self, e: &ExtendedGraph) -> Result<()> {
        let mut problems = Vec::new();
        for (x, y, _) in e.core.edges() {
            match self.core.get(&key(x, y)) {
                Some(&s) if s > 0.0 && s.is_finite() => {}
                Some(&s) => problems.push(format!("length {s} on edge {x}~{y} is not positive")),
                None => problems.push(format!("no length on edge {x}~{y}")),
            }
        }
        for (x, y) in self.core.keys() {
            if e.core.weight(x, y) <= 0.0 {
                problems.push(format!("length given on non-edge {x}~{y}"));
            }
        }
        for r in &e.rays {
            match self.rays.get(&r.id) {
                Some(RayLengths::Rule(rule)) => {
                    if let Err(err) = rule.validate() {
                        problems.push(format!("ray {}: {err}", r.id));
                    }
                }
                Some(RayLengths::Degree { .. }) => {}
                None => problems.push(format!("no lengths on ray {}", r.id)),
            }
        }
        for id in self.rays.keys() {
            if e.ray(id).is_err() {
                problems.push(format!("lengths given for unknown ray {id}"));
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidGraph(problems))
        }
    }
}

/// `(prefix, first, ratio)` with `value(k) = prefix[k]` for `k < prefix.len()` and
/// `first · ratio^{k − prefix.len()}` afterwards.
fn eventually_geometric(rule: &SequenceRule) -> Option<(Vec<f64>, f64, f64)> {
    match rule {
        SequenceRule::Geometric { first, ratio } => Some((Vec::new(), *first, *ratio)),
        SequenceRule::Power { exponent, coeff } if *exponent == 0.0 => Some((Vec::new(), *coeff, 1.0)),
        SequenceRule::Power { .. } => None,
        SequenceRule::Table { values, tail } => {
            let (p, a, r) = eventually_geometric(tail)?;
            let mut prefix = values.clone();
            prefix.extend(p);
            Some((prefix, a, r))
        }
    }
}

/// `σ(x, y) = min(1/√Deg(x), 1/√Deg(y))` with `Deg(x) = Σ_y b(x,y) / m(x)`.
pub fn degree_length(e: &ExtendedGraph) -> Result<LengthFunction> {
    e.check()?;
    let mut deg = BTreeMap::new();
    for x in e.core.vertices() {
        let total: f64 = e.neighbors(x)?.iter().map(|(_, b)| b).sum();
        if total <= 0.0 {
            continue;
        }
        deg.insert(x.clone(), total / e.core.measure(x)?);
    }
    let mut s = LengthFunction::new();
    for (x, y, _) in e.core.edges() {
        s.set_core(x, y, 1.0 / deg[x].max(deg[y]).sqrt());
    }
    for r in &e.rays {
        let attach_degree = deg[&r.attach];
        let lengths = match (eventually_geometric(&r.weights), eventually_geometric(&r.measures)) {
            (Some((pw, _, rw)), Some((pm, _, rm))) => {
                let p = pw.len().max(pm.len());
                let prefix: Vec<f64> = (0..=p).map(|k| min_degree_sigma(r, attach_degree, k)).collect();
                let first = min_degree_sigma(r, attach_degree, p + 1);
                RayLengths::Rule(SequenceRule::table(prefix, SequenceRule::geometric(first, (rm / rw).sqrt())))
            }
            _ => RayLengths::Degree {
                ray: r.clone(),
                attach_degree,
            },
        };
        s.set_ray(&r.id, lengths);
    }
    Ok(s)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntrinsicCheck {
    pub passes: bool,
    /// Minimum of `m(x) − Σ_y b(x,y) σ(x,y)²` over the explicitly checked vertices.
    pub min_slack: f64,
    pub worst_vertex: VertexId,
    /// Whether the condition is proven on every ray vertex beyond the explicit range.
    pub tail_certified: bool,
}

/// `Σ_y b(x,y) σ(x,y)² ≤ m(x)` at every vertex.
pub fn check_intrinsic(e: &ExtendedGraph, sigma: &LengthFunction) -> Result<IntrinsicCheck> {
    sigma.validate(e)?;
    let mut min_slack = f64::INFINITY;
    let mut worst = None;
    let mut ok = true;
    let mut note = |v: VertexId, load: f64, m: f64| {
        let slack = m - load;
        if load > m * (1.0 + 1e-12) {
            ok = false;
        }
        if slack < min_slack {
            min_slack = slack;
            worst = Some(v);
        }
    };
    for x in e.core.vertices() {
        let mut load = 0.0;
        for (y, b) in e.neighbors(x)? {
            let s = sigma.edge_length(e, x, &y).expect("validated");
            load += b * s * s;
        }
        note(x.clone(), load, e.core.measure(x)?);
    }
    let mut tail_certified = true;
    for r in &e.rays {
        let lengths = sigma.ray(&r.id).expect("validated");
        let rule = match lengths {
            RayLengths::Rule(rule) => Some(rule),
            RayLengths::Degree { .. } => None,
        };
        let s2 = |k: usize| lengths.value(k).powi(2);
        let prefix_len = |x: &SequenceRule| x.expansion().prefix.len();
        let n = EXPLICIT_CHECK + prefix_len(&r.weights).max(prefix_len(&r.measures)) + rule.map_or(0, prefix_len);
        for k in 1..=n {
            note(r.vertex(k), r.weight(k - 1) * s2(k - 1) + r.weight(k) * s2(k), r.measure(k));
        }
        if let Some(rule) = rule {
            // f(j+1) = (w_j σ_j² + w_{j+1} σ_{j+1}²) / m_{j+1} ≤ 1 for all j ≥ n
            let w = r.weights.expansion();
            let sq = rule.expansion().powf(2.0);
            let inv_m = r.measures.expansion().shift(1).recip();
            let t1 = w.mul(&sq).mul(&inv_m);
            let t2 = w.shift(1).mul(&sq.shift(1)).mul(&inv_m);
            let bound = |x: &Expansion| x.tail.sup_from(n.max(x.prefix.len()));
            tail_certified &= matches!((bound(&t1), bound(&t2)), (Some(a), Some(b)) if a + b <= 1.0 + 1e-12);
        }
    }
    Ok(IntrinsicCheck {
        passes: ok && tail_certified,
        min_slack,
        worst_vertex: worst.ok_or_else(|| Error::InvalidArgument("graph has no vertices".into()))?,
        tail_certified,
    })
}

#[derive(PartialEq)]
struct Dist(f64);

impl Eq for Dist {}

impl PartialOrd for Dist {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dist {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Shortest-path distances `d_σ(x, ·)` on a finite graph whose vertices belong to `e`.
pub fn distances_from(g: &FiniteWeightedGraph, e: &ExtendedGraph, sigma: &LengthFunction, x: &VertexId) -> Result<BTreeMap<VertexId, f64>> {
    if !g.contains(x) {
        return Err(Error::UnknownVertex(x.clone()));
    }
    let mut dist: BTreeMap<VertexId, f64> = BTreeMap::new();
    let mut heap = BinaryHeap::new();
    heap.push(Reverse((Dist(0.0), x.clone())));
    while let Some(Reverse((Dist(d), v))) = heap.pop() {
        if dist.contains_key(&v) {
            continue;
        }
        dist.insert(v.clone(), d);
        for (y, _) in g.neighbors(&v) {
            if dist.contains_key(y) {
                continue;
            }
            let s = sigma
                .edge_length(e, &v, y)
                .ok_or_else(|| Error::InvalidArgument(format!("no length on edge {v}~{y}")))?;
            heap.push(Reverse((Dist(d + s), y.clone())));
        }
    }
    Ok(dist)
}

/// `d_σ(x, y)`, or `None` when `x` and `y` lie in different components.
pub fn path_metric(g: &FiniteWeightedGraph, e: &ExtendedGraph, sigma: &LengthFunction, x: &VertexId, y: &VertexId) -> Result<Option<f64>> {
    if !g.contains(y) {
        return Err(Error::UnknownVertex(y.clone()));
    }
    Ok(distances_from(g, e, sigma, x)?.get(y).copied())
}

/// Total `σ`-length `Σ_{k ≥ 0} σ(x_k, x_{k+1})` of a ray.
pub fn ray_length(sigma: &LengthFunction, ray: &str) -> Result<SeriesSum> {
    sigma
        .ray(ray)
        .map(RayLengths::total)
        .ok_or_else(|| Error::UnknownRay(ray.to_string()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RayLengthEntry {
    pub ray: String,
    pub length: SeriesSum,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Completeness {
    Complete,
    /// Every ray of finite length; each is an escape route of finite length.
    Incomplete { witnesses: Vec<RayLengthEntry> },
    Undetermined { reason: String },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompletenessVerdict {
    pub ray_lengths: Vec<RayLengthEntry>,
    pub verdict: Completeness,
    pub intrinsic: IntrinsicCheck,
}

impl CompletenessVerdict {
    pub fn witness(&self, ray: &str) -> Option<f64> {
        match &self.verdict {
            Completeness::Incomplete { witnesses } => witnesses.iter().find(|w| w.ray == ray).and_then(|w| w.length.value()),
            _ => None,
        }
    }
}

/// Complete iff every ray has infinite `σ`-length.
pub fn completeness_verdict(e: &ExtendedGraph, sigma: &LengthFunction) -> Result<CompletenessVerdict> {
    let intrinsic = check_intrinsic(e, sigma)?;
    let ray_lengths: Vec<RayLengthEntry> = e
        .rays
        .iter()
        .map(|r| {
            Ok(RayLengthEntry {
                ray: r.id.clone(),
                length: ray_length(sigma, &r.id)?,
            })
        })
        .collect::<Result<_>>()?;
    let witnesses: Vec<RayLengthEntry> = ray_lengths.iter().filter(|r| r.length.is_finite()).cloned().collect();
    let verdict = if !witnesses.is_empty() {
        Completeness::Incomplete { witnesses }
    } else if let Some(r) = ray_lengths.iter().find(|r| !r.length.is_divergent()) {
        Completeness::Undetermined {
            reason: format!("length of ray {} is not computable", r.ray),
        }
    } else {
        Completeness::Complete
    };
    Ok(CompletenessVerdict {
        ray_lengths,
        verdict,
        intrinsic,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

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

    #[test]
    fn degree_length_on_standard_ray() {
        let e = standard_ray();
        let s = degree_length(&e).unwrap();
        let l = s.ray("r").unwrap();
        for k in 0..40 {
            // half-line edge (k+1, k+2)
            let hand = 2f64.powi(-(k as i32 + 1)) / 6f64.sqrt();
            assert!((l.value(k) - hand).abs() <= 1e-15 * hand, "{k}");
        }
        let total = ray_length(&s, "r").unwrap().value().unwrap();
        assert!((total - 1.0 / 6f64.sqrt()).abs() < 1e-14);
        let c = check_intrinsic(&e, &s).unwrap();
        assert!(c.passes && c.min_slack >= 0.0);
    }

    #[test]
    fn unit_length_fails_intrinsic_and_is_complete() {
        let e = standard_ray();
        let s = LengthFunction::constant(&e, 1.0);
        let c = check_intrinsic(&e, &s).unwrap();
        assert!(!c.passes);
        let v = completeness_verdict(&e, &s).unwrap();
        assert_eq!(v.verdict, Completeness::Complete);
    }

    #[test]
    fn two_vertex_unit_length() {
        let mut core = FiniteWeightedGraph::new();
        core.add_vertex("x", 1.0).add_vertex("y", 1.0).set_weight("x", "y", 1.0);
        let e = ExtendedGraph::new(core);
        let s = degree_length(&e).unwrap();
        let (x, y) = (VertexId::core("x"), VertexId::core("y"));
        assert_eq!(s.edge_length(&e, &x, &y), Some(1.0));
        assert_eq!(path_metric(&e.core, &e, &s, &x, &y).unwrap(), Some(1.0));
        assert_eq!(path_metric(&e.core, &e, &s, &x, &x).unwrap(), Some(0.0));
    }

    #[test]
    fn triangle_shortcut() {
        let mut core = FiniteWeightedGraph::new();
        core.add_vertex("a", 1.0).add_vertex("b", 1.0).add_vertex("c", 1.0);
        core.set_weight("a", "b", 1.0).set_weight("b", "c", 1.0).set_weight("a", "c", 1.0);
        let e = ExtendedGraph::new(core);
        let (a, b, c) = (VertexId::core("a"), VertexId::core("b"), VertexId::core("c"));
        let mut s = LengthFunction::new();
        s.set_core(&a, &b, 1.0).set_core(&b, &c, 1.0).set_core(&a, &c, 3.0);
        assert_eq!(path_metric(&e.core, &e, &s, &a, &c).unwrap(), Some(2.0));
    }

    #[test]
    fn power_lengths_are_finite() {
        let mut e = standard_ray();
        e.rays[0].measures = SequenceRule::power(1.0, -4.0);
        let mut s = LengthFunction::new();
        s.set_ray("r", RayLengths::Rule(SequenceRule::power(1.0, -2.0)));
        let total = ray_length(&s, "r").unwrap();
        let exact = std::f64::consts::PI.powi(2) / 6.0;
        assert!((total.value().unwrap() - exact).abs() <= total.upper().unwrap() - total.value().unwrap() + 1e-12);
        let d = degree_length(&e).unwrap();
        assert!(matches!(d.ray("r"), Some(RayLengths::Degree { .. })));
        assert!(ray_length(&d, "r").unwrap().is_finite());
    }

    #[test]
    fn additivity() {
        let s = degree_length(&standard_ray()).unwrap();
        let l = s.ray("r").unwrap();
        let total = l.total().value().unwrap();
        for n in [1, 5, 30] {
            assert!((l.partial(n) + l.tail_from(n).value().unwrap() - total).abs() < 1e-12);
        }
    }
}
