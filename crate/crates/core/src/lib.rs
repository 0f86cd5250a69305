//! Good colimits and fat small object arguments over finite directed multigraphs.
//!
//! The base category is finite directed multigraphs. On top of it the crate
//! provides poset-indexed (good) diagrams, lifting checks, presented cell
//! complexes, classical and fat small object arguments, cell pushdown and
//! retract elimination. Every construction returns a certificate that can be
//! re-verified by recomputation.

pub mod corpus;
pub mod diagrams;
pub mod error;
pub mod graphcat;
pub mod posets;
pub mod report;
pub mod soa;
pub mod suite;

pub use diagrams::{ChainPresentation, Diagram, SmoothDiagram};
pub use error::{Error, Result};
pub use graphcat::{Cocone, Graph, GraphMorphism, Limits, PushoutCertificate};
pub use posets::{FinitePoset, InitialSegment};
pub use soa::{CellComplexPresentation, FactorizationCertificate, GeneratorSet, RetractCertificate};
