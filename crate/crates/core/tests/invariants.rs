use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;

use potgraph::harmonic::{classify_ray, extend_harmonic_on_ray};
use potgraph::io;
use potgraph::metrics::{degree_length, path_metric, LengthFunction};
use potgraph::potential::green_at_depth;
use potgraph::{ExtendedGraph, FiniteWeightedGraph, RaySpec, SequenceRule, VertexFunction, VertexId};

#[derive(Clone, Debug)]
struct Shape {
    measures: Vec<f64>,
    /// `(child, parent, weight)` for a spanning tree, then extra edges.
    edges: Vec<(usize, usize, f64)>,
    ray: Option<(usize, f64, f64, f64, f64)>,
}

fn shape() -> impl Strategy<Value = Shape> {
    (2usize..7).prop_flat_map(|n| {
        let measures = prop::collection::vec(0.1f64..5.0, n);
        let tree = (1..n).map(|i| (0..i, 0.1f64..10.0).prop_map(move |(p, w)| (i, p, w))).collect::<Vec<_>>();
        let extra = prop::collection::vec((0..n, 0..n, 0.1f64..10.0), 0..3);
        let ray = prop::option::of((0..n, 0.5f64..3.0, 1.2f64..3.0, 0.2f64..2.0, 0.3f64..0.9));
        (measures, tree, extra, ray).prop_map(|(measures, mut edges, extra, ray)| {
            edges.extend(extra.into_iter().filter(|(a, b, _)| a != b));
            Shape { measures, edges, ray }
        })
    })
}

fn build(s: &Shape) -> ExtendedGraph {
    let mut g = FiniteWeightedGraph::new();
    for (i, m) in s.measures.iter().enumerate() {
        g.add_vertex(i.to_string().as_str(), *m);
    }
    for (a, b, w) in &s.edges {
        g.set_weight(a.to_string().as_str(), b.to_string().as_str(), *w);
    }
    let mut e = ExtendedGraph::new(g);
    if let Some((at, w, rw, m, rm)) = s.ray {
        e = e.with_ray(RaySpec::new("r", at.to_string().as_str(), SequenceRule::geometric(w, rw), SequenceRule::geometric(m, rm)));
    }
    e
}

fn values(g: &FiniteWeightedGraph, seed: &[f64]) -> VertexFunction {
    let mut i = 0;
    VertexFunction::from_fn(g, |_| {
        i += 1;
        seed[i % seed.len()]
    })
}

proptest! {
    #[test]
    fn green_formula_on_finite_graphs(s in shape(), a in prop::collection::vec(-3.0f64..3.0, 1..8), b in prop::collection::vec(-3.0f64..3.0, 1..8)) {
        let g = build(&s).truncate(4).unwrap();
        let f = values(&g, &a);
        let h = values(&g, &b);
        let lhs = g.inner(&g.laplacian(&f), &h);
        let rhs = g.energy_pair(&f, &h);
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + rhs.abs()), "{lhs} vs {rhs}");
        prop_assert!(g.energy(&f) >= 0.0);
        prop_assert!(g.energy(&VertexFunction::constant(&g, 2.5)) == 0.0);
    }

    #[test]
    fn validation_accepts_generated_graphs(s in shape()) {
        let e = build(&s);
        prop_assert!(e.core.validate().is_empty());
        prop_assert!(e.is_connected());
    }

    #[test]
    fn green_maximum_at_pole(s in shape()) {
        prop_assume!(s.ray.is_some());
        let e = build(&s);
        let o = VertexId::core("0");
        let g = green_at_depth(&e, &o, 15).unwrap();
        let at_pole = g.value(&o);
        for (v, x) in g.iter() {
            prop_assert!(x > 0.0, "{v}: {x}");
            prop_assert!(x <= at_pole * (1.0 + 1e-12), "{v}: {x} > {at_pole}");
        }
    }

    #[test]
    fn path_metric_matches_floyd_warshall(s in shape()) {
        let e = build(&s);
        let sigma = degree_length(&e).unwrap();
        let g = e.truncate(3).unwrap();
        let vs: Vec<VertexId> = g.vertices().cloned().collect();
        let n = vs.len();
        let mut d = vec![vec![f64::INFINITY; n]; n];
        for i in 0..n {
            d[i][i] = 0.0;
            for j in 0..n {
                if i != j && g.weight(&vs[i], &vs[j]) > 0.0 {
                    d[i][j] = sigma.edge_length(&e, &vs[i], &vs[j]).unwrap();
                }
            }
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    d[i][j] = d[i][j].min(d[i][k] + d[k][j]);
                }
            }
        }
        let mut metric = BTreeMap::new();
        for i in 0..n {
            for j in 0..n {
                let p = path_metric(&g, &e, &sigma, &vs[i], &vs[j]).unwrap().unwrap();
                prop_assert!((p - d[i][j]).abs() <= 1e-12 * (1.0 + d[i][j]));
                metric.insert((i, j), p);
            }
        }
        for i in 0..n {
            for j in 0..n {
                prop_assert!((metric[&(i, j)] - metric[&(j, i)]).abs() <= 1e-12);
                for k in 0..n {
                    prop_assert!(metric[&(i, j)] <= metric[&(i, k)] + metric[&(k, j)] + 1e-12);
                }
            }
        }
    }

    #[test]
    fn ray_classification_is_scale_invariant(w in 0.1f64..10.0, rw in 0.3f64..3.0, m in 0.1f64..10.0, rm in 0.3f64..3.0, cw in 0.01f64..100.0, cm in 0.01f64..100.0) {
        // keep ratios away from the critical value 1 where the two sides of a dichotomy meet
        prop_assume!((rw - 1.0).abs() > 0.05 && (rm - 1.0).abs() > 0.05 && (rm / rw - 1.0).abs() > 0.05);
        let base = classify_ray(&RaySpec::new("r", "0", SequenceRule::geometric(w, rw), SequenceRule::geometric(m, rm)));
        let scaled = classify_ray(&RaySpec::new("r", "0", SequenceRule::geometric(cw * w, rw), SequenceRule::geometric(cm * m, rm)));
        prop_assert_eq!(base.bounded_nonconstant_harmonic_possible, scaled.bounded_nonconstant_harmonic_possible);
        prop_assert_eq!(base.l2_nonconstant_extension_possible, scaled.l2_nonconstant_extension_possible);
        prop_assert_eq!(base.esa_fails_on_ray, scaled.esa_fails_on_ray);
        prop_assert_eq!(base.sum_inv_b.is_finite(), rw > 1.0);
        prop_assert_eq!(base.sum_m.is_finite(), rm < 1.0);
    }

    #[test]
    fn harmonic_extension_is_monotone(v0 in -2.0f64..2.0, v1 in -2.0f64..2.0, b01 in 0.1f64..10.0, w in 0.1f64..10.0, rw in 0.5f64..4.0) {
        prop_assume!((v1 - v0).abs() > 1e-6);
        let ray = RaySpec::new("r", "0", SequenceRule::geometric(w, rw), SequenceRule::constant(1.0));
        let sign = (v1 - v0).signum();
        let mut prev = v1;
        for r in 1..=30 {
            let v = extend_harmonic_on_ray(v0, v1, b01, &ray, r).unwrap();
            prop_assert!(sign * (v - prev) >= 0.0, "r = {r}: {prev} -> {v}");
            prev = v;
        }
    }

    #[test]
    fn document_round_trip(s in shape()) {
        let e = build(&s);
        let text = io::to_string(&e);
        let back = io::parse(&text).unwrap();
        prop_assert_eq!(&back, &e);
        prop_assert_eq!(io::to_string(&back), text);
    }
}

#[test]
fn unit_length_counts_hops() {
    let e = potgraph::scenarios::unit_line();
    let sigma = LengthFunction::constant(&e, 1.0);
    let g = e.truncate(10).unwrap();
    let far = VertexId::ray("r", 7);
    let d = path_metric(&g, &e, &sigma, &VertexId::core("1"), &far).unwrap();
    assert_eq!(d, Some(7.0));
    let set: BTreeSet<_> = [VertexId::core("1")].into();
    assert_eq!(g.boundary(&set).unwrap().len(), 1);
}
