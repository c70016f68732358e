//! Branched covers of curves as permutation data.
//!
//! A cover `f : Y -> X` of degree `d` is modeled by its monodromy: handle
//! pairs and branch cycles in `S_d` satisfying the surface relation. From
//! that data this crate computes the components of `Y ×_X Y`, their dual
//! graph, genuine ramification, the Galois closure group, and the derived
//! cover `Y' -> Y`; a numerical front end produces such data from plane
//! curves, and a corpus driver checks the structural facts about them
//! on exhaustive and random families.

pub mod cover;
pub mod fiber;
pub mod gen;
pub mod graphs;
pub mod numono;
pub mod perm;

pub use cover::{BranchedCover, CoverError, CoverFile, CoverReport, Violation};
pub use fiber::{
    DerivedCover, FiberAnalysis, FiberError, FiberReport, Orbital, SchemePoint, SdCertificate,
    SdOutcome, SdRefusal,
};
pub use graphs::{Connectivity, Graph, GraphError};
pub use perm::{parse_cycles, GeneratedGroup, PermError, Permutation, Transitivity};
pub use gen::{CorpusSpec, GenError, Span, VerificationReport};
pub use numono::{MonodromyResult, NumonoError, PlanePolynomial, TrackingConfig};
