//! Variable-length source coding under context-dependent symbol costs.
//!
//! The crate provides regular cost tables and their cost capacity, finite
//! and iid-block source distributions, exact smooth entropies, a
//! cost-generalized Shannon-Fano-Elias code with an escape word, the
//! associated finite-blocklength bounds, and an exhaustive optimal-code
//! oracle for small instances.

pub mod bounds;
pub mod cost_model;
pub mod error;
pub mod numeric;
pub mod oracle;
pub mod sfe_coder;
pub mod smooth_entropy;
pub mod source_model;

pub use cost_model::{CostFunction, CostTable, Symbol};
pub use error::{Error, Result};
pub use smooth_entropy::{MethodHint, Quantity, SmoothEntropyResult};
pub use source_model::{Distribution, IidSource};
