//! JSON graph documents.
//!
//! ```json
//! {
//!   "vertices": [{"id": "1", "m": 0.5}],
//!   "edges": [],
//!   "rays": [{"id": "r", "attach": "1",
//!             "weights": {"kind": "geometric", "first": 2.0, "ratio": 2.0},
//!             "measures": {"kind": "geometric", "first": 0.5, "ratio": 0.5}}]
//! }
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extended::{ExtendedGraph, RaySpec};
use crate::graph::{FiniteWeightedGraph, VertexId};
use crate::sequence::SequenceRule;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexEntry {
    pub id: String,
    pub m: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeEntry {
    pub u: String,
    pub v: String,
    pub b: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RayEntry {
    pub id: String,
    pub attach: String,
    pub weights: SequenceRule,
    pub measures: SequenceRule,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDocument {
    pub vertices: Vec<VertexEntry>,
    #[serde(default)]
    pub edges: Vec<EdgeEntry>,
    #[serde(default)]
    pub rays: Vec<RayEntry>,
}

fn label(v: &VertexId) -> String {
    v.to_string()
}

impl GraphDocument {
    /// Canonical document: vertices sorted, each edge once with `u < v`.
    pub fn from_graph(e: &ExtendedGraph) -> Self {
        let vertices = e
            .core
            .vertices()
            .map(|v| VertexEntry {
                id: label(v),
                m: e.core.measure(v).expect("listed vertex"),
            })
            .collect();
        let mut edges: Vec<(VertexId, VertexId, f64)> = e
            .core
            .edges()
            .map(|(x, y, b)| if x < y { (x.clone(), y.clone(), b) } else { (y.clone(), x.clone(), b) })
            .collect();
        edges.sort_by(|a, b| (&a.0, &a.1).cmp(&(&b.0, &b.1)));
        edges.dedup_by(|a, b| a.0 == b.0 && a.1 == b.1);
        GraphDocument {
            vertices,
            edges: edges
                .into_iter()
                .map(|(u, v, b)| EdgeEntry {
                    u: label(&u),
                    v: label(&v),
                    b,
                })
                .collect(),
            rays: e
                .rays
                .iter()
                .map(|r| RayEntry {
                    id: r.id.clone(),
                    attach: label(&r.attach),
                    weights: r.weights.clone(),
                    measures: r.measures.clone(),
                })
                .collect(),
        }
    }

    /// Builds the graph, reporting every violation found.
    pub fn to_graph(&self) -> Result<ExtendedGraph> {
        let mut problems = Vec::new();
        let mut core = FiniteWeightedGraph::new();
        let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
        for (i, v) in self.vertices.iter().enumerate() {
            if v.id.contains('#') {
                problems.push(format!("vertices[{i}]: id {:?} contains the reserved character '#'", v.id));
            }
            if let Some(j) = seen.insert(&v.id, i) {
                problems.push(format!("vertex {} listed at vertices[{j}] and vertices[{i}]", v.id));
            }
            core.add_vertex(v.id.as_str(), v.m);
        }
        let mut edges: BTreeMap<(VertexId, VertexId), (usize, f64)> = BTreeMap::new();
        for (i, e) in self.edges.iter().enumerate() {
            let (u, v) = (VertexId::core(&e.u), VertexId::core(&e.v));
            for w in [&e.u, &e.v] {
                if !seen.contains_key(w.as_str()) {
                    problems.push(format!("edges[{i}]: unknown endpoint {w}"));
                }
            }
            if u == v {
                problems.push(format!("edges[{i}]: self-loop at {u}"));
                continue;
            }
            if !(e.b > 0.0 && e.b.is_finite()) {
                problems.push(format!("edges[{i}]: weight {} on {u}~{v} must be positive and finite", e.b));
                continue;
            }
            let key = if u < v { (u.clone(), v.clone()) } else { (v.clone(), u.clone()) };
            if let Some(&(j, b)) = edges.get(&key) {
                if b != e.b {
                    problems.push(format!("edge {u}~{v} is asymmetric: b = {b} at edges[{j}] but b = {} at edges[{i}]", e.b));
                } else {
                    problems.push(format!("edge {u}~{v} listed twice, at edges[{j}] and edges[{i}]"));
                }
                continue;
            }
            edges.insert(key, (i, e.b));
            core.set_weight(u, v, e.b);
        }
        let mut graph = ExtendedGraph::new(core);
        for r in &self.rays {
            graph.rays.push(RaySpec::new(r.id.clone(), r.attach.as_str(), r.weights.clone(), r.measures.clone()));
        }
        problems.extend(graph.validate());
        if problems.is_empty() {
            Ok(graph)
        } else {
            Err(Error::InvalidGraph(problems))
        }
    }
}

pub fn parse(text: &str) -> Result<ExtendedGraph> {
    let doc: GraphDocument = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    doc.to_graph()
}

/// Canonical pretty-printed JSON, newline terminated.
pub fn to_string(e: &ExtendedGraph) -> String {
    let mut s = serde_json::to_string_pretty(&GraphDocument::from_graph(e)).expect("documents serialize");
    s.push('\n');
    s
}

pub fn load(path: impl AsRef<Path>) -> Result<ExtendedGraph> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse(&text)
}

pub fn save(e: &ExtendedGraph, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, to_string(e)).map_err(|err| Error::Io(format!("{}: {err}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    const STANDARD: &str = r#"{
      "vertices": [{"id": "1", "m": 0.5}],
      "rays": [{"id": "r", "attach": "1",
                "weights": {"kind": "geometric", "first": 2.0, "ratio": 2.0},
                "measures": {"kind": "geometric", "first": 0.5, "ratio": 0.5}}]
    }"#;

    #[test]
    fn minimal_document() {
        let g = parse(r#"{"vertices":[{"id":"x","m":1},{"id":"y","m":2}],"edges":[{"u":"x","v":"y","b":1}]}"#).unwrap();
        assert_eq!(g.core.len(), 2);
        assert_eq!(g.core.weight(&"x".into(), &"y".into()), 1.0);
    }

    #[test]
    fn conflicting_duplicate_edge() {
        let err = parse(
            r#"{"vertices":[{"id":"x","m":1},{"id":"y","m":1}],
                "edges":[{"u":"x","v":"y","b":1},{"u":"y","v":"x","b":2}]}"#,
        )
        .unwrap_err();
        let Error::InvalidGraph(p) = err else { panic!() };
        assert!(p[0].contains("edges[0]") && p[0].contains("edges[1]"), "{p:?}");
    }

    #[test]
    fn every_violation_reported() {
        let err = parse(
            r#"{"vertices":[{"id":"x","m":0},{"id":"x","m":1}],
                "edges":[{"u":"x","v":"z","b":1}],
                "rays":[{"id":"r","attach":"q","weights":{"kind":"geometric","first":1,"ratio":1},
                         "measures":{"kind":"geometric","first":-1,"ratio":1}}]}"#,
        )
        .unwrap_err();
        let Error::InvalidGraph(p) = err else { panic!() };
        assert!(p.len() >= 4, "{p:?}");
    }

    #[test]
    fn parse_errors_carry_position() {
        let Error::Parse(msg) = parse("{\"vertices\": [\n  {\"id\": 1}]}").unwrap_err() else { panic!() };
        assert!(msg.contains("line 2"), "{msg}");
    }

    #[test]
    fn canonical_round_trip() {
        let g = parse(STANDARD).unwrap();
        let text = to_string(&g);
        assert_eq!(parse(&text).unwrap(), g);
        assert_eq!(to_string(&parse(&text).unwrap()), text);
    }
}
