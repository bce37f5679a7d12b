//! Energy-aware scheduling of DAG workflows onto grid sites, with a
//! discrete-event simulator, power-gating energy model and scenario
//! generator.
//!
//! The pieces compose as a pipeline: generate or load a [`model::Workflow`]
//! and [`model::Catalog`], map tasks to sites with [`hgreen::hga_map`] or a
//! baseline from [`hgreen::baseline_map`], replay the schedule with
//! [`sim::simulate`] under a [`powergate::GatingPolicy`], and contrast
//! ledgers with [`sim::compare`].

pub mod error;
pub mod hgreen;
pub mod model;
pub mod powergate;
pub mod sim;
pub mod workload;

pub use error::{Error, Result};
