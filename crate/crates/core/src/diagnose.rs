//! Combined ℓ²-Liouville / essential self-adjointness diagnostic.

use serde::Serialize;

use crate::error::Result;
use crate::extended::ExtendedGraph;
use crate::graph::VertexFunction;
use crate::harmonic::{classify_ray, lambda_harmonic_ray, line_shape, LambdaHarmonic, LineShape, RayClassification};
use crate::sequence::SeriesSum;
use crate::spectral::{strict_positivity_verdict, PositivityVerdict, SpectralEstimate, SpectralOptions};

/// Three-valued status of a certified property.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Holds,
    Fails,
    Unknown,
}

/// Certified inputs to the implication engine.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Facts {
    pub liouville: Status,
    pub esa: Status,
    pub strictly_positive: Status,
    pub infinite_measure: Status,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Implication {
    /// ESA ⇒ ℓ²-Liouville.
    EsaImpliesLiouville,
    /// Not ℓ²-Liouville ⇒ not ESA (contrapositive of the above).
    NotLiouvilleImpliesNotEsa,
    /// ℓ²-Liouville ∧ λ₀ > 0 ∧ m(X) = ∞ ⇒ ESA.
    LiouvillePositiveInfiniteImpliesEsa,
}

impl Implication {
    pub fn statement(self) -> &'static str {
        match self {
            Implication::EsaImpliesLiouville => "ESA => l2-Liouville",
            Implication::NotLiouvilleImpliesNotEsa => "not l2-Liouville => not ESA",
            Implication::LiouvillePositiveInfiniteImpliesEsa => "l2-Liouville and lambda0 > 0 and m(X) = inf => ESA",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AppliedImplication {
    pub implication: Implication,
    pub statement: String,
    /// `derived` when the conclusion was new, `consistent` when it was already known.
    pub outcome: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EngineOutcome {
    pub facts: Facts,
    pub applied: Vec<AppliedImplication>,
    pub conflicts: Vec<String>,
}

/// Applies every implication whose hypotheses are all certified, to a fixed point.
pub fn apply_implications(mut facts: Facts) -> EngineOutcome {
    let mut applied: Vec<AppliedImplication> = Vec::new();
    let mut conflicts = Vec::new();
    loop {
        let mut changed = false;
        let candidates = [
            (Implication::EsaImpliesLiouville, facts.esa == Status::Holds, Target::Liouville(Status::Holds)),
            (Implication::NotLiouvilleImpliesNotEsa, facts.liouville == Status::Fails, Target::Esa(Status::Fails)),
            (
                Implication::LiouvillePositiveInfiniteImpliesEsa,
                facts.liouville == Status::Holds
                    && facts.strictly_positive == Status::Holds
                    && facts.infinite_measure == Status::Holds,
                Target::Esa(Status::Holds),
            ),
        ];
        for (imp, certified, target) in candidates {
            if !certified || applied.iter().any(|a| a.implication == imp) {
                continue;
            }
            let slot = match target {
                Target::Liouville(_) => &mut facts.liouville,
                Target::Esa(_) => &mut facts.esa,
            };
            let want = target.status();
            let outcome = if *slot == Status::Unknown {
                *slot = want;
                changed = true;
                "derived"
            } else if *slot == want {
                "consistent"
            } else {
                conflicts.push(format!("{} contradicts the recorded evidence", imp.statement()));
                "conflict"
            };
            applied.push(AppliedImplication {
                implication: imp,
                statement: imp.statement().into(),
                outcome: outcome.into(),
            });
        }
        if !changed {
            break;
        }
    }
    EngineOutcome { facts, applied, conflicts }
}

#[derive(Clone, Copy)]
enum Target {
    Liouville(Status),
    Esa(Status),
}

impl Target {
    fn status(self) -> Status {
        match self {
            Target::Liouville(s) | Target::Esa(s) => s,
        }
    }
}

/// A non-constant harmonic function in ℓ², e.g. produced by surgery.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LiouvilleWitness {
    pub description: String,
    /// Sample of the witness on a finite set of vertices.
    pub sample: VertexFunction,
    pub l2_norm: f64,
    pub max_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum LiouvilleEvidence {
    HoldsByStructure { rule: String },
    HoldsByImplication { implication: String },
    FailsWithWitness { witness: LiouvilleWitness },
    Undetermined { reason: String },
}

impl LiouvilleEvidence {
    pub fn status(&self) -> Status {
        match self {
            LiouvilleEvidence::HoldsByStructure { .. } | LiouvilleEvidence::HoldsByImplication { .. } => Status::Holds,
            LiouvilleEvidence::FailsWithWitness { .. } => Status::Fails,
            LiouvilleEvidence::Undetermined { .. } => Status::Unknown,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum EsaEvidence {
    FailsWithReason {
        reasons: Vec<String>,
        /// True when every reason rests on a cited result rather than a computation.
        literature_cited: bool,
    },
    HoldsByCitedCriterion { criterion: String },
    HoldsByImplication { implication: String },
    Undetermined { reason: String },
}

impl EsaEvidence {
    pub fn status(&self) -> Status {
        match self {
            EsaEvidence::FailsWithReason { .. } => Status::Fails,
            EsaEvidence::HoldsByCitedCriterion { .. } | EsaEvidence::HoldsByImplication { .. } => Status::Holds,
            EsaEvidence::Undetermined { .. } => Status::Unknown,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiagnoseOptions {
    pub spectral: SpectralOptions,
    /// λ used for λ-harmonic witnesses.
    pub lambda: f64,
    pub witness_depth: usize,
    pub liouville_witness: Option<LiouvilleWitness>,
}

impl Default for DiagnoseOptions {
    fn default() -> Self {
        DiagnoseOptions {
            spectral: SpectralOptions::default(),
            lambda: -1.0,
            witness_depth: 200,
            liouville_witness: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiagnosticReport {
    pub lambda0: SpectralEstimate,
    pub total_measure: SeriesSum,
    pub l2_liouville_evidence: LiouvilleEvidence,
    pub esa_evidence: EsaEvidence,
    pub rays: Vec<RayClassification>,
    pub lambda_harmonic: Option<LambdaHarmonic>,
    pub facts: Facts,
    pub implications_applied: Vec<AppliedImplication>,
    pub conflicts: Vec<String>,
}

pub fn diagnose(e: &ExtendedGraph, opts: &DiagnoseOptions) -> Result<DiagnosticReport> {
    e.check()?;
    let lambda0 = strict_positivity_verdict(e, &opts.spectral)?;
    let total_measure = e.total_measure();
    let rays: Vec<RayClassification> = e.rays.iter().map(classify_ray).collect();
    let shape = line_shape(e);

    let all_tails_divergent = !rays.is_empty() && rays.iter().all(|r| r.sum_m.is_divergent());

    // ℓ²-Liouville
    let mut liouville = if let Some(w) = &opts.liouville_witness {
        LiouvilleEvidence::FailsWithWitness { witness: w.clone() }
    } else if rays.is_empty() {
        LiouvilleEvidence::HoldsByStructure {
            rule: "finite connected graph: harmonic functions are constant".into(),
        }
    } else if all_tails_divergent {
        LiouvilleEvidence::HoldsByStructure {
            rule: "every infinite path has infinite measure".into(),
        }
    } else {
        match &shape {
            Some(LineShape::HalfLine { .. }) => LiouvilleEvidence::HoldsByStructure {
                rule: "half-line: every harmonic function is constant".into(),
            },
            Some(LineShape::TwoSided { rays: ids, .. }) => {
                match rays.iter().find(|r| ids.contains(&r.ray) && r.sum_inv_b.is_divergent() && r.sum_m.is_divergent()) {
                    Some(r) => LiouvilleEvidence::HoldsByStructure {
                        rule: format!(
                            "line: a non-constant harmonic function grows without bound along ray {} whose measure diverges",
                            r.ray
                        ),
                    },
                    None => LiouvilleEvidence::Undetermined {
                        reason: "two-sided line without a ray forcing growth on infinite measure".into(),
                    },
                }
            }
            None => LiouvilleEvidence::Undetermined {
                reason: "no structural rule applies".into(),
            },
        }
    };
    if !e.is_connected() && !matches!(liouville, LiouvilleEvidence::FailsWithWitness { .. }) {
        liouville = LiouvilleEvidence::Undetermined {
            reason: "graph is disconnected; diagnose each component separately".into(),
        };
    }

    // ESA
    let mut fails: Vec<String> = Vec::new();
    let mut cited_only = true;
    let mut holds: Option<String> = None;
    let mut lambda_harmonic = None;
    match &shape {
        Some(LineShape::HalfLine { ray, .. }) => {
            let c = rays.iter().find(|r| &r.ray == ray).expect("ray of the shape");
            if c.imw_sum.is_finite() {
                fails.push(format!("summability criterion holds on ray {ray} (cited characterization for half-lines)"));
            } else if c.imw_sum.is_divergent() {
                holds = Some(format!("summability criterion fails on ray {ray} (cited characterization for half-lines)"));
            }
            let lh = lambda_harmonic_ray(e, opts.lambda, 1.0, opts.witness_depth)?;
            if lh.in_l2 == Some(true) && lh.max_recursion_residual <= 1e-12 {
                cited_only = false;
                fails.push(format!(
                    "non-trivial lambda-harmonic function in l2 for lambda = {} (recursion residual {:.1e})",
                    opts.lambda, lh.max_recursion_residual
                ));
            }
            lambda_harmonic = Some(lh);
        }
        Some(LineShape::TwoSided { rays: ids, .. }) => {
            if let Some(r) = rays
                .iter()
                .find(|r| ids.contains(&r.ray) && r.sum_m.is_finite() && r.sum_inv_b.is_finite())
            {
                fails.push(format!(
                    "ray {} has finite measure and finite resistance: the Cauchy boundary carries positive capacity (literature-cited, not computed)",
                    r.ray
                ));
            }
        }
        None => {}
    }
    if all_tails_divergent && holds.is_none() {
        holds = Some("every infinite path has infinite measure (literature criterion)".into());
    }
    let esa = match (fails.is_empty(), holds) {
        (false, Some(h)) => EsaEvidence::Undetermined {
            reason: format!("conflicting evidence: {} vs {h}", fails.join("; ")),
        },
        (false, None) => EsaEvidence::FailsWithReason {
            reasons: fails,
            literature_cited: cited_only,
        },
        (true, Some(h)) => EsaEvidence::HoldsByCitedCriterion { criterion: h },
        (true, None) => EsaEvidence::Undetermined {
            reason: "no criterion applies".into(),
        },
    };

    let facts = Facts {
        liouville: liouville.status(),
        esa: esa.status(),
        strictly_positive: match lambda0.verdict {
            PositivityVerdict::StrictlyPositive { .. } => Status::Holds,
            PositivityVerdict::Vanishing { .. } => Status::Fails,
            PositivityVerdict::Undetermined { .. } => Status::Unknown,
        },
        infinite_measure: match total_measure {
            SeriesSum::Divergent => Status::Holds,
            SeriesSum::Finite { .. } => Status::Fails,
            SeriesSum::NotComputable { .. } => Status::Unknown,
        },
    };
    let outcome = apply_implications(facts);
    let mut esa = esa;
    for a in &outcome.applied {
        if a.implication == Implication::NotLiouvilleImpliesNotEsa && a.outcome == "consistent" {
            if let EsaEvidence::FailsWithReason { reasons, literature_cited } = &mut esa {
                reasons.push(format!("non-constant harmonic function in l2 ({})", a.statement));
                *literature_cited = false;
            }
        }
        if a.outcome != "derived" {
            continue;
        }
        match a.implication {
            Implication::EsaImpliesLiouville => {
                liouville = LiouvilleEvidence::HoldsByImplication {
                    implication: a.statement.clone(),
                }
            }
            Implication::LiouvillePositiveInfiniteImpliesEsa => {
                esa = EsaEvidence::HoldsByImplication {
                    implication: a.statement.clone(),
                }
            }
            Implication::NotLiouvilleImpliesNotEsa => {
                esa = EsaEvidence::FailsWithReason {
                    reasons: vec![format!("non-constant harmonic function in l2 ({})", a.statement)],
                    literature_cited: false,
                }
            }
        }
    }

    Ok(DiagnosticReport {
        lambda0,
        total_measure,
        l2_liouville_evidence: liouville,
        esa_evidence: esa,
        rays,
        lambda_harmonic,
        facts: outcome.facts,
        implications_applied: outcome.applied,
        conflicts: outcome.conflicts,
    })
}
