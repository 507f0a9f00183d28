//! Branch-and-bound TSP with linear comparison traces and exact audits.

pub mod audit;
pub mod cli;
pub mod cost;
pub mod error;
pub mod form;
pub mod geometry;
pub mod lp;
pub mod matrix;
pub mod oracle;
pub mod septree;
pub mod solver;
pub mod tour;

pub use cost::CostValue;
pub use error::{Error, Result};
pub use form::AffineForm;
pub use matrix::{CostMatrix, Grid};
pub use septree::{ComparisonEvent, Provenance, Relation, TraceChain};
pub use solver::{branch_bound, Solution};
pub use tour::Tour;
