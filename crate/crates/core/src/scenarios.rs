//! Shipped graphs and the scenario registry.

use std::collections::{BTreeMap, BTreeSet};

use serde_json::json;

use crate::diagnose::{diagnose, DiagnoseOptions, DiagnosticReport, EsaEvidence, LiouvilleEvidence};
use crate::error::{Error, Result};
use crate::extended::{ExtendedFunction, ExtendedGraph, RaySpec};
use crate::graph::{FiniteWeightedGraph, VertexFunction, VertexId};
use crate::harmonic::harmonic_residual;
use crate::io::GraphDocument;
use crate::metrics::{completeness_verdict, degree_length, Completeness, LengthFunction};
use crate::potential::{capacity, green_function, ExhaustionOptions, TraceVerdict};
use crate::report::RunReport;
use crate::sequence::{SequenceRule, SeriesSum};
use crate::spectral::{rayleigh, PositivityVerdict};
use crate::surgery::{excise_and_attach, extend_green, partition_neighbors, verify_surgery, NewRay, SurgeredGraph, SurgeryReport};

pub const SCENARIOS: [&str; 5] = [
    "example-3-2-i",
    "example-3-2-ii",
    "halfline-green",
    "surgery-demo",
    "metric-incompleteness",
];

/// Core vertex `1` with `m = ½` followed by the ray `r` with
/// `b(x_k, x_{k+1}) = 2^{k+1}` and `m(x_k) = 2^{−(k+1)}`: the half-line
/// `b(n, n+1) = 2ⁿ`, `m(n) = 2⁻ⁿ`.
pub fn standard_ray() -> ExtendedGraph {
    let mut core = FiniteWeightedGraph::new();
    core.add_vertex("1", 0.5);
    ExtendedGraph::new(core).with_ray(RaySpec::new(
        "r",
        "1",
        SequenceRule::geometric(2.0, 2.0),
        SequenceRule::geometric(0.5, 0.5),
    ))
}

/// Half-line with unit weights and unit measure.
pub fn unit_line() -> ExtendedGraph {
    let mut core = FiniteWeightedGraph::new();
    core.add_vertex("1", 1.0);
    ExtendedGraph::new(core).with_ray(RaySpec::new("r", "1", SequenceRule::constant(1.0), SequenceRule::constant(1.0)))
}

/// The standard half-line glued at `1` to `−1, −2, …` with unit weights and
/// unit measure; vertex `−n` is `neg#(n−1)` for `n ≥ 2`.
pub fn two_sided_line() -> ExtendedGraph {
    let mut core = FiniteWeightedGraph::new();
    core.add_vertex("1", 0.5).add_vertex("-1", 1.0).set_weight("1", "-1", 1.0);
    ExtendedGraph::new(core)
        .with_ray(RaySpec::new(
            "pos",
            "1",
            SequenceRule::geometric(2.0, 2.0),
            SequenceRule::geometric(0.5, 0.5),
        ))
        .with_ray(RaySpec::new("neg", "-1", SequenceRule::constant(1.0), SequenceRule::constant(1.0)))
}

/// Vertex `−n` of [`two_sided_line`].
pub fn negative_vertex(n: usize) -> VertexId {
    assert!(n >= 1);
    if n == 1 {
        VertexId::core("-1")
    } else {
        VertexId::ray("neg", n - 1)
    }
}

/// `o ~ a` with unit weight and measure, and the standard-type ray at `a`.
pub fn surgery_base() -> ExtendedGraph {
    let mut core = FiniteWeightedGraph::new();
    core.add_vertex("o", 1.0).add_vertex("a", 1.0).set_weight("o", "a", 1.0);
    ExtendedGraph::new(core).with_ray(RaySpec::new(
        "r",
        "a",
        SequenceRule::geometric(2.0, 2.0),
        SequenceRule::geometric(0.5, 0.5),
    ))
}

/// New ray at `a`: `b_o(a, x_1) = 2`, `b_o(x_n, x_{n+1}) = 4ⁿ`, and
/// `m_o(x_r) = 2^{−r}` (or `1` when `unit_measure`).
pub fn surgery_new_ray(unit_measure: bool) -> NewRay {
    NewRay {
        weights: SequenceRule::table(vec![2.0], SequenceRule::geometric(4.0, 4.0)),
        measures: if unit_measure {
            SequenceRule::constant(1.0)
        } else {
            SequenceRule::geometric(1.0, 0.5)
        },
    }
}

#[derive(Clone, Debug)]
pub struct SurgeryRun {
    pub surgered: SurgeredGraph,
    pub g_o: ExtendedFunction,
    pub report: SurgeryReport,
}

/// Partition, attach, extend and verify on [`surgery_base`] at pole `o`.
pub fn run_surgery_demo(unit_measure: bool, depth: usize, tol: f64) -> Result<SurgeryRun> {
    let e = surgery_base();
    let o = VertexId::core("o");
    let g = green_function(&e, &o, &ExhaustionOptions::default())?;
    let p = partition_neighbors(&e, &o, &g, 1e-8)?;
    let rays = p.n_o.iter().map(|x| (x.clone(), surgery_new_ray(unit_measure))).collect();
    let surgered = excise_and_attach(&e, &p, &rays, &BTreeMap::new())?;
    let g_o = extend_green(&e, &g, &surgered)?;
    let report = verify_surgery(&surgered, &g_o, depth, tol)?;
    Ok(SurgeryRun { surgered, g_o, report })
}

/// `f(−n) = f(−2) + C (n − 2)` on `−1, …, −n_max` of [`two_sided_line`], and
/// its largest `|ℒf|` over `−2, …, −(n_max − 1)`.
pub fn linear_witness(f2: f64, c: f64, n_max: usize) -> Result<(VertexFunction, f64)> {
    let e = two_sided_line();
    let g = e.truncate(n_max)?;
    let f: VertexFunction = (1..=n_max).map(|n| (negative_vertex(n), f2 + c * (n as f64 - 2.0))).collect();
    let interior: BTreeSet<VertexId> = (2..n_max).map(negative_vertex).collect();
    // the function is only needed on X₂; extend by its value at −1 elsewhere
    let mut full = f.clone();
    for v in g.vertices() {
        if full.get(v).is_none() {
            full.set(v.clone(), f.value(&negative_vertex(1)));
        }
    }
    let r = harmonic_residual(&g, &full, &interior)?;
    Ok((f, r))
}

/// Rayleigh quotient of `1_{K_n}`, `K_n = {−1, …, −n}`, on a truncation of [`two_sided_line`].
pub fn indicator_quotient(n: usize) -> Result<f64> {
    let e = two_sided_line();
    let g = e.truncate(n + 1)?;
    let phi: VertexFunction = (1..=n).map(|k| (negative_vertex(k), 1.0)).collect();
    rayleigh(&g, &phi)
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ScenarioOptions {
    pub tol: Option<f64>,
    pub depth: Option<usize>,
    pub max_depth: Option<usize>,
}

fn verdict_name(v: &PositivityVerdict) -> &'static str {
    match v {
        PositivityVerdict::StrictlyPositive { .. } => "strictly-positive",
        PositivityVerdict::Vanishing { .. } => "vanishing",
        PositivityVerdict::Undetermined { .. } => "undetermined",
    }
}

fn measure_name(s: &SeriesSum) -> String {
    match s {
        SeriesSum::Finite { value, .. } => format!("finite ({value})"),
        SeriesSum::Divergent => "infinite".into(),
        SeriesSum::NotComputable { .. } => "not computable".into(),
    }
}

pub fn liouville_name(l: &LiouvilleEvidence) -> &'static str {
    match l {
        LiouvilleEvidence::HoldsByStructure { .. } => "holds-by-structure",
        LiouvilleEvidence::HoldsByImplication { .. } => "holds-by-implication",
        LiouvilleEvidence::FailsWithWitness { .. } => "fails-with-witness",
        LiouvilleEvidence::Undetermined { .. } => "undetermined",
    }
}

pub fn esa_name(e: &EsaEvidence) -> &'static str {
    match e {
        EsaEvidence::FailsWithReason { .. } => "fails-with-reason",
        EsaEvidence::HoldsByCitedCriterion { .. } => "holds-by-cited-criterion",
        EsaEvidence::HoldsByImplication { .. } => "holds-by-implication",
        EsaEvidence::Undetermined { .. } => "undetermined",
    }
}

/// Copies the headline fields of a diagnostic into `report`.
pub fn record_diagnosis(report: &mut RunReport, d: &DiagnosticReport) {
    report
        .verdict("lambda0", verdict_name(&d.lambda0.verdict))
        .verdict("total_measure", measure_name(&d.total_measure))
        .verdict("l2_liouville", liouville_name(&d.l2_liouville_evidence))
        .verdict("esa", esa_name(&d.esa_evidence))
        .series("lambda0_truncations", d.lambda0.depths.clone(), d.lambda0.eigenvalues.clone())
        .result("diagnosis", d);
    report.implications_applied = d.implications_applied.clone();
}

fn exhaustion(opts: &ScenarioOptions) -> ExhaustionOptions {
    let mut ex = ExhaustionOptions::default();
    if let Some(t) = opts.tol {
        ex.tol = t;
    }
    if let Some(d) = opts.max_depth {
        ex.max_depth = d;
    }
    ex
}

fn diagnose_options(opts: &ScenarioOptions) -> DiagnoseOptions {
    let mut d = DiagnoseOptions::default();
    if let Some(m) = opts.max_depth {
        d.spectral = d.spectral.with_max_depth(m);
    }
    d
}

pub fn run_scenario(name: &str, opts: &ScenarioOptions) -> Result<RunReport> {
    match name {
        "example-3-2-i" => finite_measure_halfline(opts),
        "example-3-2-ii" => two_sided(opts),
        "halfline-green" => halfline_green(opts),
        "surgery-demo" => surgery_demo(opts),
        "metric-incompleteness" => metric_incompleteness(opts),
        other => Err(Error::InvalidArgument(format!(
            "unknown scenario {other:?}; available: {}",
            SCENARIOS.join(", ")
        ))),
    }
}

fn finite_measure_halfline(opts: &ScenarioOptions) -> Result<RunReport> {
    let e = standard_ray();
    let mut report = RunReport::new("example-3-2-i", json!({ "graph": GraphDocument::from_graph(&e) }));
    report.note("weights 2^n and measures 2^-n are one concrete member of the hypothesis class (finite measure, finite resistance)");
    let d = report.timed("diagnose", || diagnose(&e, &diagnose_options(opts)))?;
    record_diagnosis(&mut report, &d);
    if let Some(lh) = &d.lambda_harmonic {
        report
            .result(
                "lambda_harmonic_witness",
                json!({
                    "lambda": lh.lambda,
                    "depth": lh.values.len() - 1,
                    "f2": lh.values[1],
                    "max_recursion_residual": lh.max_recursion_residual,
                    "residual_tol": 1e-12,
                    "strictly_increasing": lh.strictly_increasing,
                    "bounded": lh.bounded,
                    "in_l2": lh.in_l2,
                    "l2_partial_sum": lh.l2_partial_sum,
                }),
            )
            .series(
                "lambda_harmonic",
                (1..=lh.values.len().min(40)).collect(),
                lh.values.iter().take(40).copied().collect(),
            );
    }
    Ok(report)
}

fn two_sided(opts: &ScenarioOptions) -> Result<RunReport> {
    let e = two_sided_line();
    let mut report = RunReport::new("example-3-2-ii", json!({ "graph": GraphDocument::from_graph(&e) }));
    let d = report.timed("diagnose", || diagnose(&e, &diagnose_options(opts)))?;
    record_diagnosis(&mut report, &d);
    if let EsaEvidence::FailsWithReason { literature_cited: true, .. } = d.esa_evidence {
        report.note("ESA failure rests on a cited boundary-capacity argument and is not computed");
    }
    let sizes: Vec<usize> = vec![1, 2, 5, 10, 100, 1000];
    let mut quotients = Vec::new();
    for &n in &sizes {
        quotients.push(indicator_quotient(n)?);
    }
    let formula: Vec<f64> = sizes.iter().map(|&n| 2.0 / n as f64).collect();
    report
        .result(
            "indicator_quotients",
            json!({ "n": sizes, "quotient": quotients, "two_over_measure": formula, "tol": 1e-12 }),
        )
        .series("indicator_quotient", sizes, quotients);
    let (_, residual) = linear_witness(1.0, 0.5, 60)?;
    report.result(
        "linear_harmonic_witness",
        json!({ "f_minus_2": 1.0, "slope": 0.5, "depth": 60, "max_residual": residual, "tol": 1e-12 }),
    );
    Ok(report)
}

fn halfline_green(opts: &ScenarioOptions) -> Result<RunReport> {
    let e = standard_ray();
    let o = VertexId::core("1");
    let ex = exhaustion(opts);
    let mut report = RunReport::new(
        "halfline-green",
        json!({ "graph": GraphDocument::from_graph(&e), "pole": "1", "tol": ex.tol, "max_depth": ex.max_depth }),
    );
    let g = report.timed("green", || green_function(&e, &o, &ex))?;
    report.trace("green_at_pole", &g.trace);
    let limit = g
        .limit
        .as_ref()
        .ok_or_else(|| Error::Precondition("standard ray should be transient".into()))?;
    let mut rows = Vec::new();
    for x in 1..=10usize {
        let v = if x == 1 { o.clone() } else { VertexId::ray("r", x - 1) };
        let value = limit.value(&e, &v)?;
        let oracle = 2f64.powi(1 - x as i32);
        rows.push(json!({ "x": x, "g": value, "resistance_oracle": oracle, "rel_err": (value - oracle).abs() / oracle }));
    }
    report.result("green_values", rows).result("green", &g);
    report.verdict(
        "green",
        match g.trace.verdict {
            TraceVerdict::Converged { .. } => "converged",
            TraceVerdict::MonotoneUnconverged { .. } => "monotone-unconverged",
            TraceVerdict::DivergentTail => "divergent-tail",
        },
    );
    let omega: BTreeSet<VertexId> = [o].into();
    let cap = report.timed("capacity", || capacity(&e, &omega, &ex))?;
    report.trace("capacity", &cap.trace).result("capacity", &cap);
    Ok(report)
}

fn surgery_demo(opts: &ScenarioOptions) -> Result<RunReport> {
    let depth = opts.depth.unwrap_or(60);
    let tol = opts.tol.unwrap_or(1e-10);
    let mut report = RunReport::new(
        "surgery-demo",
        json!({ "graph": GraphDocument::from_graph(&surgery_base()), "pole": "o", "depth": depth, "tol": tol }),
    );
    let run = report.timed("surgery", || run_surgery_demo(false, depth, tol))?;
    report
        .result("surgery", &run.report)
        .result("surgered_graph", GraphDocument::from_graph(&run.surgered.graph))
        .verdict("theorem_conclusion", run.report.theorem_conclusion.to_string());
    let flipped = report.timed("surgery_unit_measure", || run_surgery_demo(true, depth, tol))?;
    report
        .result("surgery_unit_measure", &flipped.report)
        .verdict("theorem_conclusion_unit_measure", flipped.report.theorem_conclusion.to_string());

    let mut dopts = diagnose_options(opts);
    dopts.liouville_witness = run.report.liouville_witness(&run.surgered, &run.g_o, 10)?;
    let d = report.timed("diagnose", || diagnose(&run.surgered.graph, &dopts))?;
    record_diagnosis(&mut report, &d);

    let sigma = degree_length(&run.surgered.graph)?;
    let c = completeness_verdict(&run.surgered.graph, &sigma)?;
    report.verdict("completeness", completeness_name(&c.verdict)).result("completeness", &c);
    Ok(report)
}

fn completeness_name(c: &Completeness) -> &'static str {
    match c {
        Completeness::Complete => "complete",
        Completeness::Incomplete { .. } => "incomplete",
        Completeness::Undetermined { .. } => "undetermined",
    }
}

fn metric_incompleteness(_opts: &ScenarioOptions) -> Result<RunReport> {
    let mut report = RunReport::new("metric-incompleteness", json!({ "graphs": ["standard-ray", "surgery-output"] }));
    let e = standard_ray();
    let sigma = degree_length(&e)?;
    let c = completeness_verdict(&e, &sigma)?;
    report
        .verdict("standard_ray_degree_length", completeness_name(&c.verdict))
        .result("standard_ray_degree_length", &c);
    let unit = completeness_verdict(&e, &LengthFunction::constant(&e, 1.0))?;
    report
        .verdict("standard_ray_unit_length", completeness_name(&unit.verdict))
        .result("standard_ray_unit_length", &unit);
    let run = run_surgery_demo(false, 60, 1e-10)?;
    let s = &run.surgered.graph;
    let c = completeness_verdict(s, &degree_length(s)?)?;
    report
        .verdict("surgery_output_degree_length", completeness_name(&c.verdict))
        .result("surgery_output_degree_length", &c);
    report.note("completeness is checked for the supplied intrinsic length functions only");
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_scenario() {
        assert!(run_scenario("nope", &ScenarioOptions::default()).is_err());
    }

    #[test]
    fn indicator_quotients_match_formula() {
        for n in [1, 3, 10, 200] {
            assert!((indicator_quotient(n).unwrap() - 2.0 / n as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn linear_witness_is_harmonic() {
        let (f, r) = linear_witness(1.0, 0.5, 40).unwrap();
        assert!(r <= 1e-12);
        assert_eq!(f.value(&negative_vertex(5)), 2.5);
    }
}
