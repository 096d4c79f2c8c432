use std::collections::BTreeSet;

use potgraph::potential::{capacity, green_function, ExhaustionOptions};
use potgraph::report::{write_csv, RunReport};
use potgraph::scenarios::{run_scenario, ScenarioOptions, SCENARIOS};
use potgraph::{scenarios, FiniteWeightedGraph, ExtendedGraph, VertexId};

#[test]
fn scenarios_are_deterministic() {
    for name in SCENARIOS {
        let mut a = run_scenario(name, &ScenarioOptions::default()).unwrap();
        let mut b = run_scenario(name, &ScenarioOptions::default()).unwrap();
        a.timings_ms.clear();
        b.timings_ms.clear();
        assert_eq!(a, b, "{name}");
    }
}

#[test]
fn trace_series_are_monotone() {
    let e = scenarios::standard_ray();
    let o = VertexId::core("1");
    let g = green_function(&e, &o, &ExhaustionOptions::default()).unwrap();
    assert!(g.trace.values.windows(2).all(|w| w[0] <= w[1]));
    let omega: BTreeSet<_> = [o].into();
    let c = capacity(&e, &omega, &ExhaustionOptions::default()).unwrap();
    let mut r = RunReport::new("t", ());
    r.trace("capacity", &c.trace);
    let mut buf = Vec::new();
    write_csv(&r.traces, &mut buf).unwrap();
    let column: Vec<f64> = String::from_utf8(buf)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    assert!(column.len() > 2);
    assert!(column.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn finite_graph_gives_single_row() {
    let mut core = FiniteWeightedGraph::new();
    core.add_vertex("a", 1.0).add_vertex("b", 2.0).set_weight("a", "b", 1.0);
    let e = ExtendedGraph::new(core);
    let omega: BTreeSet<_> = [VertexId::core("a")].into();
    let c = capacity(&e, &omega, &ExhaustionOptions::default()).unwrap();
    let mut r = RunReport::new("t", ());
    r.trace("capacity", &c.trace);
    let mut buf = Vec::new();
    write_csv(&r.traces, &mut buf).unwrap();
    assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 2);
    assert_eq!(c.value, 0.0);
}
