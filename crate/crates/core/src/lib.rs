//! Exact tools for quantifying contextuality.
//!
//! The crate enumerates counterfactual value assignments of two-party
//! dichotomic scenarios (CHSH in particular), converts between vertex and
//! facet descriptions of the resulting correlation polytopes, solves the
//! linear program for the minimal weight of contextual assignments needed to
//! reach a target CHSH value, analyses Kochen-Specker hypergraphs, and
//! generates seeded assignment streams. All arithmetic is exact.

pub mod enumeration;
pub mod error;
pub mod ks;
pub mod lp;
pub mod metrics;
pub mod polytope;
pub mod rational;
pub mod scenario;
pub mod simulate;

pub use enumeration::{Assignment, ExpectationRow};
pub use error::{Error, Result};
pub use ks::{Hypergraph, TwoValuedState};
pub use metrics::{ContextualityReport, Mixture};
pub use polytope::{Coordinate, HalfSpace, Polytope, RationalVector};
pub use scenario::{Context, ContextualVariable, Observable, ObservableId, Party, Scenario};
pub use simulate::{Stream, StreamSpec};
