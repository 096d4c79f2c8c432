pub mod diagnose;
pub mod error;
pub mod extended;
pub mod graph;
pub mod harmonic;
pub mod io;
pub mod metrics;
pub mod potential;
pub mod report;
pub mod scenarios;
pub mod sequence;
pub mod solvers;
pub mod spectral;
pub mod surgery;

pub use error::{Error, Result};
pub use extended::{ExtendedFunction, ExtendedGraph, RayProfile, RaySpec};
pub use graph::{FiniteWeightedGraph, VertexFunction, VertexId, Violation};
pub use sequence::{Expansion, Monomial, SequenceRule, SeriesSum};
