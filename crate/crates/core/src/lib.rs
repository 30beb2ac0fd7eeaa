//! Exact computation of the invariants `a(X, L)` and `b(X, L)` on polyhedral
//! Neron-Severi models, and a classifier for balanced anticanonical classes
//! of Fano threefolds of small Picard rank.

pub mod classifier;
pub mod cli;
pub mod cone;
pub mod criteria;
pub mod error;
pub mod fano_db;
pub mod intersection;
pub mod invariants;
pub mod linalg;
pub mod rational;
pub mod surfaces;

pub use error::{Error, Result};
