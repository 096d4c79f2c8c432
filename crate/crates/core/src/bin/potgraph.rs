use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use potgraph::diagnose::{diagnose, DiagnoseOptions};
use potgraph::harmonic::classify_ray;
use potgraph::io::{self, GraphDocument};
use potgraph::metrics::{completeness_verdict, degree_length, LengthFunction};
use potgraph::potential::{capacity, green_function, ExhaustionOptions, TraceVerdict};
use potgraph::report::{emit, RunReport};
use potgraph::scenarios::{record_diagnosis, run_scenario, ScenarioOptions, SCENARIOS};
use potgraph::spectral::{strict_positivity_verdict, PositivityVerdict, SpectralOptions};
use potgraph::surgery::{excise_and_attach, extend_green, partition_neighbors, verify_surgery, NewRay, Pendant};
use potgraph::{Error, SequenceRule, VertexId};

/// Potential theory on weighted graphs with geometric ray ends.
#[derive(Parser)]
#[command(name = "potgraph", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Truncation depth for single-depth computations.
    #[arg(long, global = true)]
    depth: Option<usize>,
    /// Convergence tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Largest exhaustion depth.
    #[arg(long, global = true)]
    max_depth: Option<usize>,
    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// json or csv.
    #[arg(long, global = true, default_value = "json")]
    format: String,
}

#[derive(Subcommand)]
enum Command {
    /// Check a graph document and list every violation.
    Validate { graph: PathBuf },
    /// Green's function by exhaustion.
    Green {
        graph: PathBuf,
        #[arg(long)]
        pole: String,
        #[command(flatten)]
        common: Common,
    },
    /// Capacity of a finite core set.
    Capacity {
        graph: PathBuf,
        /// Comma-separated core vertices.
        #[arg(long, value_delimiter = ',')]
        omega: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Bottom of the spectrum and strict positivity.
    Lambda0 {
        graph: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Summability classification of rays.
    ClassifyRay {
        graph: PathBuf,
        /// Ray id (all rays when absent).
        #[arg(long)]
        ray: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Combined ℓ²-Liouville / self-adjointness diagnostic.
    Diagnose {
        graph: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Remove a vertex and continue its Green's function harmonically.
    Surgery {
        graph: PathBuf,
        #[arg(long)]
        pole: String,
        /// Edge weights of each new ray, as a JSON sequence rule.
        #[arg(long)]
        ray_weights: String,
        /// Measures of each new ray, as a JSON sequence rule.
        #[arg(long, default_value = r#"{"kind":"geometric","first":0.5,"ratio":0.5}"#)]
        ray_measures: String,
        #[arg(long, default_value_t = 1.0)]
        pendant_weight: f64,
        #[arg(long, default_value_t = 1.0)]
        pendant_measure: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Completeness for the min-degree (or unit) length.
    Metric {
        graph: PathBuf,
        /// Use unit edge lengths instead of the min-degree length.
        #[arg(long)]
        unit: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Run a shipped scenario.
    Scenario {
        name: String,
        #[command(flatten)]
        common: Common,
    },
}

enum Failure {
    Lib(Error),
    Unconverged(RunReport, Common),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidGraph(_) | Error::Parse(_) | Error::Precondition(_) => 1,
        Error::NonConvergence { .. } | Error::Singular(_) | Error::DivergentTail(_) | Error::TooLarge { .. } => 2,
        _ => 3,
    }
}

fn exhaustion(c: &Common) -> ExhaustionOptions {
    let mut ex = ExhaustionOptions::default();
    if let Some(t) = c.tol {
        ex.tol = t;
    }
    if let Some(d) = c.max_depth {
        ex.max_depth = d;
    }
    ex
}

fn spectral(c: &Common) -> SpectralOptions {
    let mut s = SpectralOptions::default();
    if let Some(t) = c.tol {
        s.tol = t;
    }
    match c.max_depth {
        Some(d) => s.with_max_depth(d),
        None => s,
    }
}

fn rule(text: &str) -> Result<SequenceRule, Error> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("sequence rule: {e}")))
}

fn finish(report: RunReport, c: &Common) -> Result<(), Failure> {
    emit(&report, c.format.parse()?, c.out.as_deref())?;
    Ok(())
}

fn run(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Validate { graph } => {
            let e = io::load(&graph)?;
            println!("valid: {} core vertices, {} edges, {} rays", e.core.len(), e.core.edge_count(), e.rays.len());
            Ok(())
        }
        Command::Green { graph, pole, common } => {
            let e = io::load(&graph)?;
            let ex = exhaustion(&common);
            let mut r = RunReport::new("green", json!({ "graph": GraphDocument::from_graph(&e), "pole": pole, "tol": ex.tol, "max_depth": ex.max_depth }));
            let g = r.timed("green", || green_function(&e, &VertexId::core(&pole), &ex))?;
            r.trace("green_at_pole", &g.trace).result("green", &g);
            if let Some(limit) = &g.limit {
                r.result("limit_core_values", &limit.core);
            }
            if matches!(g.trace.verdict, TraceVerdict::MonotoneUnconverged { .. }) {
                return Err(Failure::Unconverged(r, common));
            }
            finish(r, &common)
        }
        Command::Capacity { graph, omega, common } => {
            let e = io::load(&graph)?;
            let ex = exhaustion(&common);
            let set: BTreeSet<VertexId> = omega.iter().map(|v| VertexId::core(v.as_str())).collect();
            let mut r = RunReport::new("capacity", json!({ "graph": GraphDocument::from_graph(&e), "omega": omega, "tol": ex.tol, "max_depth": ex.max_depth }));
            let c = r.timed("capacity", || capacity(&e, &set, &ex))?;
            r.trace("capacity", &c.trace).result("capacity", &c);
            if matches!(c.trace.verdict, TraceVerdict::MonotoneUnconverged { .. }) {
                return Err(Failure::Unconverged(r, common));
            }
            finish(r, &common)
        }
        Command::Lambda0 { graph, common } => {
            let e = io::load(&graph)?;
            let opts = spectral(&common);
            let mut r = RunReport::new("lambda0", json!({ "graph": GraphDocument::from_graph(&e), "tol": opts.tol, "depths": opts.depths }));
            let est = r.timed("lambda0", || strict_positivity_verdict(&e, &opts))?;
            r.series("lambda0_truncations", est.depths.clone(), est.eigenvalues.clone()).result("lambda0", &est);
            let undetermined = matches!(est.verdict, PositivityVerdict::Undetermined { .. });
            if undetermined {
                return Err(Failure::Unconverged(r, common));
            }
            finish(r, &common)
        }
        Command::ClassifyRay { graph, ray, common } => {
            let e = io::load(&graph)?;
            let rays: Vec<_> = match &ray {
                Some(id) => vec![classify_ray(e.ray(id)?)],
                None => e.rays.iter().map(classify_ray).collect(),
            };
            let mut r = RunReport::new("classify-ray", json!({ "graph": GraphDocument::from_graph(&e), "ray": ray }));
            r.result("rays", rays);
            finish(r, &common)
        }
        Command::Diagnose { graph, common } => {
            let e = io::load(&graph)?;
            let mut opts = DiagnoseOptions {
                spectral: spectral(&common),
                ..DiagnoseOptions::default()
            };
            if let Some(d) = common.depth {
                opts.witness_depth = d;
            }
            let mut r = RunReport::new("diagnose", json!({ "graph": GraphDocument::from_graph(&e), "tol": opts.spectral.tol, "witness_depth": opts.witness_depth }));
            let d = r.timed("diagnose", || diagnose(&e, &opts))?;
            record_diagnosis(&mut r, &d);
            finish(r, &common)
        }
        Command::Surgery {
            graph,
            pole,
            ray_weights,
            ray_measures,
            pendant_weight,
            pendant_measure,
            common,
        } => {
            let e = io::load(&graph)?;
            let o = VertexId::core(&pole);
            let depth = common.depth.unwrap_or(60);
            let tol = common.tol.unwrap_or(1e-10);
            let new_ray = NewRay {
                weights: rule(&ray_weights)?,
                measures: rule(&ray_measures)?,
            };
            let mut r = RunReport::new(
                "surgery",
                json!({ "graph": GraphDocument::from_graph(&e), "pole": pole, "depth": depth, "tol": tol }),
            );
            let g = green_function(&e, &o, &exhaustion(&common))?;
            let p = partition_neighbors(&e, &o, &g, 1e-8)?;
            let rays: BTreeMap<_, _> = p.n_o.iter().map(|x| (x.clone(), new_ray.clone())).collect();
            let pendants: BTreeMap<_, _> = p
                .n_c
                .iter()
                .map(|x| (x.clone(), Pendant { weight: pendant_weight, measure: pendant_measure }))
                .collect();
            let s = excise_and_attach(&e, &p, &rays, &pendants)?;
            let g_o = extend_green(&e, &g, &s)?;
            let rep = r.timed("verify", || verify_surgery(&s, &g_o, depth, tol))?;
            r.result("partition", &p)
                .result("surgered_graph", GraphDocument::from_graph(&s.graph))
                .result("surgery", &rep)
                .verdict("theorem_conclusion", rep.theorem_conclusion.to_string());
            finish(r, &common)
        }
        Command::Metric { graph, unit, common } => {
            let e = io::load(&graph)?;
            let sigma = if unit { LengthFunction::constant(&e, 1.0) } else { degree_length(&e)? };
            let mut r = RunReport::new("metric", json!({ "graph": GraphDocument::from_graph(&e), "length": if unit { "unit" } else { "min-degree" } }));
            let c = completeness_verdict(&e, &sigma)?;
            r.result("completeness", &c);
            finish(r, &common)
        }
        Command::Scenario { name, common } => {
            if !SCENARIOS.contains(&name.as_str()) {
                return Err(Error::InvalidArgument(format!("unknown scenario {name:?}; available: {}", SCENARIOS.join(", "))).into());
            }
            let opts = ScenarioOptions {
                tol: common.tol,
                depth: common.depth,
                max_depth: common.max_depth,
            };
            let r = run_scenario(&name, &opts)?;
            finish(r, &common)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if usage { 3 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
        Err(Failure::Unconverged(report, common)) => {
            if let Err(e) = finish(report, &common).map_err(|f| match f {
                Failure::Lib(e) => e,
                Failure::Unconverged(..) => unreachable!(),
            }) {
                eprintln!("error: {e}");
            }
            eprintln!("error: no convergence within the depth limit");
            ExitCode::from(2)
        }
    }
}
