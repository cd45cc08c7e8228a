//! File formats, scenario generators and the experiment harness around
//! [`buoyancy_core`].
//!
//! - [`files`]: graph snapshots, scenario documents and parameter files,
//! - [`snapshot`]: persisted engine state,
//! - [`generate`]: seeded scenario templates,
//! - [`run`]: event-by-event replays with before/after tables,
//! - [`export`]: CSV output for timelines, searches and reports.

pub mod error;
pub mod export;
pub mod files;
pub mod generate;
pub mod run;
pub mod snapshot;
pub mod timefmt;

pub use buoyancy_core as core;
pub use error::{Error, ScenarioError};
