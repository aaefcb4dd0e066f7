//! Synthetic multivariate time series with explicit dependencies and
//! labeled anomalies.
//!
//! The pipeline is:
//!
//! 1. [`graph::generate_graph`] draws a community-structured dependency graph;
//! 2. [`funcgen::generate_function`] synthesizes one symbolic equation per
//!    variable, reading lagged values of its parents;
//! 3. [`anomaly`] plans anomaly windows and mutates equations;
//! 4. [`sim`] evaluates clean and contaminated tracks side by side and
//!    derives rich labels from the data flow.
//!
//! The crate is `no_std` and only needs `alloc`. File formats and the
//! command line live in the companion `tsforge` crate.

#![cfg_attr(not(any(feature = "std", test)), no_std)]

extern crate alloc;

pub mod anomaly;
pub mod audit;
pub mod expr;
pub mod funcgen;
pub mod graph;
pub mod matrix;
pub mod params;
pub mod rng;
pub mod sim;

pub use anomaly::{AnomalySpec, MutationStrategy};
pub use audit::{audit, AuditViolation};
pub use expr::{parse_expression, Expr, ParseError};
pub use graph::{DependencyGraph, Edge};
pub use matrix::{Label, LabelMatrix, SeriesMatrix};
pub use params::{GenerationParams, ParamError};
pub use sim::{generate_dataset, generate_manual, GenerationResult, ManualAnomaly, ManualSystem};
