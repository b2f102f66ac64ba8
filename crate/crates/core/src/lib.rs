//! Exact combinatorics of slope sets on a torus and the flat geometry of
//! cusp tori, aimed at bounds on exceptional Dehn surgery slopes.
//!
//! - [`slope`]: slopes, distance, changes of marking.
//! - [`sets`]: diameter, centers, normalization, the `.slopes` format.
//! - [`search`]: exhaustive maximum-cardinality search under a diameter bound.
//! - [`verifier`]: the integral / half-integral counting argument, replayed
//!   on concrete sets and cross-checked against the search.
//! - [`cusp`]: slope lengths, shortest slope, width and the 6-theorem filter.
//! - [`cli`]: the `slopekit` command line.

mod bits;
pub mod cli;
pub mod cusp;
pub mod error;
pub mod search;
pub mod sets;
pub mod slope;
pub mod verifier;

pub use cusp::{load_cusp, save_cusp, CuspTorus, PropositionReport, SlopeLengthReport};
pub use error::{Error, Result};
pub use search::{search, verify_no_larger, SearchConfig, SearchResult};
pub use sets::{load_set, normalize_set, save_set, SlopeSet, Window};
pub use slope::{distance, enumerate_slopes, MarkingTransform, Slope};
pub use verifier::{classify, exhaustive_cross_check, proof_bound, ProofClassification};
