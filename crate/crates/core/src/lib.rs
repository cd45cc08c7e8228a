//! Memory buoyancy kernel.
//!
//! Memory buoyancy (MB) is a normalized score in `[0, 1]` describing how
//! relevant an item of a semantic graph currently is for a user. It rises when
//! the item (or something connected to it) is used and sinks again when it is
//! left alone. This crate holds the pure part of the engine:
//!
//! - [`graph`]: typed things and undirected relations,
//! - [`event`]: the user event vocabulary and scenario validation,
//! - [`record`]: the static/dynamic split of a single score,
//! - [`engine`]: local, global and group scores with context freezing,
//! - [`query`]: threshold search, context listings, reports and timelines.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the scenario
//! generators and the command line live in the `buoyancy` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod engine;
pub mod error;
pub mod event;
pub mod graph;
pub mod params;
pub mod query;
pub mod record;
pub mod time;

pub use engine::{Engine, EngineParts, JournalEntry, RecordKey, RecordOp};
pub use error::{EngineError, GraphError};
pub use event::{Event, EventKind, Scenario, Violation};
pub use graph::{Graph, Relation, Thing, ThingId, ThingType};
pub use params::{DecayRow, EventWeights, ParameterSet, TypeRows};
pub use query::{MbReport, SearchResult};
pub use record::BuoyancyRecord;
pub use time::{ActivityClock, Timestamp, DAY, HOUR, MINUTE};
