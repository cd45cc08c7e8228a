use alloc::string::String;

use thiserror::Error;

use crate::graph::ThingId;
use crate::time::Timestamp;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("a thing with id `{0}` already exists")]
    DuplicateThing(ThingId),
    #[error("unknown thing `{0}`")]
    UnknownThing(ThingId),
    #[error("invalid relation {from} -[{label}]-> {to}: {reason}")]
    InvalidRelation {
        from: ThingId,
        to: ThingId,
        label: String,
        reason: &'static str,
    },
    #[error("`{0}` is not a context")]
    NotAContext(ThingId),
    #[error("invalid thing `{id}`: {reason}")]
    InvalidThing { id: ThingId, reason: &'static str },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("event references unknown or mistyped thing `{0}`")]
    UnknownReference(ThingId),
    #[error("event {kind} is missing its {field}")]
    MalformedEvent { kind: &'static str, field: &'static str },
    #[error("time went backwards: {now} is before {last}")]
    ClockRegression { last: Timestamp, now: Timestamp },
    #[error("record is frozen")]
    FrozenRecord,
    #[error("stimulus weight {0} is outside [0, 1]")]
    InvalidWeight(f64),
    #[error("negative duration {0}")]
    InvalidDuration(f64),
    #[error("invalid interval [{start}, {end}]")]
    InvalidInterval { start: Timestamp, end: Timestamp },
    #[error("threshold {0} is outside [0, 1]")]
    InvalidThreshold(f64),
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParams { name: &'static str, reason: &'static str },
}
