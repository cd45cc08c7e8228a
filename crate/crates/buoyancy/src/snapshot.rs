//! Persisted engine state.
//!
//! A snapshot is a JSON object with these top-level sections, in order:
//!
//! | key               | content                                                   |
//! |-------------------|-----------------------------------------------------------|
//! | `version`         | format version, currently `1`                             |
//! | `scenario`        | name of the scenario being replayed, or `null`            |
//! | `cursor`          | number of scenario events already applied                 |
//! | `params`          | the full parameter set                                    |
//! | `graph`           | graph document, including completion marks                |
//! | `clocks`          | `origin`, `last_applied`, `rules_through` (Unix seconds), the `group` clock and one clock per user as `[wall, activity]` breakpoints |
//! | `active_contexts` | user id → context id                                      |
//! | `records`         | `local`, `global` and `group` record lists                |
//!
//! Record fields are `base`, `last_update` and `stim_history` (activity
//! seconds) plus `frozen_at` (Unix seconds) on local records. Floats are
//! written in shortest round-trip form, so save followed by load restores the
//! state bit for bit.

use std::collections::BTreeMap;

use buoyancy_core::{ActivityClock, BuoyancyRecord, Engine, EngineParts, Graph, ParameterSet, ThingId, Timestamp};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::files::GraphDoc;

pub const VERSION: u32 = 1;

/// Top-level keys in file order.
pub const SECTIONS: [&str; 8] = [
    "version",
    "scenario",
    "cursor",
    "params",
    "graph",
    "clocks",
    "active_contexts",
    "records",
];

/// Engine state plus the replay position it was taken at.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub scenario: Option<String>,
    pub cursor: usize,
    pub engine: Engine,
}

impl Snapshot {
    /// State before any event, with an empty graph.
    pub fn empty(params: ParameterSet) -> Result<Self, Error> {
        Ok(Self {
            scenario: None,
            cursor: 0,
            engine: Engine::new(Graph::new(), params)?,
        })
    }
}

type Breakpoints = Vec<[i64; 2]>;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateDoc {
    version: u32,
    scenario: Option<String>,
    cursor: usize,
    params: ParameterSet,
    graph: GraphDoc,
    clocks: ClocksDoc,
    active_contexts: BTreeMap<String, String>,
    records: RecordsDoc,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ClocksDoc {
    origin: Option<i64>,
    last_applied: Option<i64>,
    rules_through: Option<i64>,
    group: Option<Breakpoints>,
    users: BTreeMap<String, Breakpoints>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RecordsDoc {
    local: Vec<LocalDoc>,
    global: Vec<GlobalDoc>,
    group: Vec<GroupDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LocalDoc {
    resource: String,
    user: String,
    context: String,
    base: f64,
    last_update: i64,
    stim_history: Vec<i64>,
    frozen_at: Option<i64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GlobalDoc {
    resource: String,
    user: String,
    base: f64,
    last_update: i64,
    stim_history: Vec<i64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GroupDoc {
    resource: String,
    base: f64,
    last_update: i64,
    stim_history: Vec<i64>,
}

fn breakpoints(clock: &ActivityClock) -> Breakpoints {
    clock.breakpoints().iter().map(|&(w, a)| [w.secs(), a]).collect()
}

fn clock(points: &Breakpoints, field: &str) -> Result<ActivityClock, Error> {
    ActivityClock::from_breakpoints(points.iter().map(|&[w, a]| (Timestamp(w), a)).collect())
        .ok_or_else(|| Error::Snapshot(format!("{field}: breakpoints must be non-empty and increasing")))
}

pub fn to_json(snapshot: &Snapshot) -> String {
    let parts = snapshot.engine.to_parts();
    let doc = StateDoc {
        version: VERSION,
        scenario: snapshot.scenario.clone(),
        cursor: snapshot.cursor,
        params: parts.params,
        graph: GraphDoc::from_graph(&parts.graph),
        clocks: ClocksDoc {
            origin: parts.origin.map(Timestamp::secs),
            last_applied: parts.last_applied.map(Timestamp::secs),
            rules_through: parts.rules_through.map(Timestamp::secs),
            group: parts.group_clock.as_ref().map(breakpoints),
            users: parts
                .user_clocks
                .iter()
                .map(|(u, c)| (u.to_string(), breakpoints(c)))
                .collect(),
        },
        active_contexts: parts
            .active_context
            .iter()
            .map(|(u, c)| (u.to_string(), c.to_string()))
            .collect(),
        records: RecordsDoc {
            local: parts
                .local
                .iter()
                .map(|((r, u, c), rec)| LocalDoc {
                    resource: r.to_string(),
                    user: u.to_string(),
                    context: c.to_string(),
                    base: rec.base,
                    last_update: rec.last_update,
                    stim_history: rec.stim_history.clone(),
                    frozen_at: rec.frozen_at.map(Timestamp::secs),
                })
                .collect(),
            global: parts
                .global
                .iter()
                .map(|((r, u), rec)| GlobalDoc {
                    resource: r.to_string(),
                    user: u.to_string(),
                    base: rec.base,
                    last_update: rec.last_update,
                    stim_history: rec.stim_history.clone(),
                })
                .collect(),
            group: parts
                .group
                .iter()
                .map(|(r, rec)| GroupDoc {
                    resource: r.to_string(),
                    base: rec.base,
                    last_update: rec.last_update,
                    stim_history: rec.stim_history.clone(),
                })
                .collect(),
        },
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("snapshots always serialize");
    out.push('\n');
    out
}

pub fn from_json(text: &str) -> Result<Snapshot, Error> {
    if let Err(e) = serde_json::from_str::<serde::de::IgnoredAny>(text) {
        if e.is_eof() {
            return Err(Error::Snapshot(truncation_message(text)));
        }
    }
    let de = &mut serde_json::Deserializer::from_str(text);
    let doc: StateDoc = serde_path_to_error::deserialize(de).map_err(|e| Error::Snapshot(e.to_string()))?;
    if doc.version != VERSION {
        return Err(Error::Snapshot(format!(
            "version: expected {VERSION}, found {}",
            doc.version
        )));
    }
    let graph = doc
        .graph
        .to_graph()
        .map_err(|e| Error::Snapshot(format!("graph.{e}")))?;
    let mut user_clocks = BTreeMap::new();
    for (user, points) in &doc.clocks.users {
        user_clocks.insert(
            ThingId::new(user.clone()),
            clock(points, &format!("clocks.users.{user}"))?,
        );
    }
    let group_clock = doc
        .clocks
        .group
        .as_ref()
        .map(|p| clock(p, "clocks.group"))
        .transpose()?;
    let record = |base, last_update, stim_history: &Vec<i64>, frozen_at: Option<i64>| BuoyancyRecord {
        base,
        last_update,
        stim_history: stim_history.clone(),
        frozen_at: frozen_at.map(Timestamp),
    };
    let r = &doc.records;
    let parts = EngineParts {
        graph,
        params: doc.params,
        local: r
            .local
            .iter()
            .map(|d| {
                (
                    (
                        ThingId::new(d.resource.clone()),
                        ThingId::new(d.user.clone()),
                        ThingId::new(d.context.clone()),
                    ),
                    record(d.base, d.last_update, &d.stim_history, d.frozen_at),
                )
            })
            .collect(),
        global: r
            .global
            .iter()
            .map(|d| {
                (
                    (ThingId::new(d.resource.clone()), ThingId::new(d.user.clone())),
                    record(d.base, d.last_update, &d.stim_history, None),
                )
            })
            .collect(),
        group: r
            .group
            .iter()
            .map(|d| {
                (
                    ThingId::new(d.resource.clone()),
                    record(d.base, d.last_update, &d.stim_history, None),
                )
            })
            .collect(),
        active_context: doc
            .active_contexts
            .iter()
            .map(|(u, c)| (ThingId::new(u.clone()), ThingId::new(c.clone())))
            .collect(),
        user_clocks,
        group_clock,
        origin: doc.clocks.origin.map(Timestamp),
        last_applied: doc.clocks.last_applied.map(Timestamp),
        rules_through: doc.clocks.rules_through.map(Timestamp),
    };
    let engine = Engine::from_parts(parts).map_err(|e| Error::Snapshot(format!("inconsistent state: {e}")))?;
    Ok(Snapshot {
        scenario: doc.scenario,
        cursor: doc.cursor,
        engine,
    })
}

/// Names the sections a cut-off snapshot lacks.
fn truncation_message(text: &str) -> String {
    let present = top_level_keys(text);
    let missing: Vec<&str> = SECTIONS
        .iter()
        .copied()
        .filter(|s| !present.iter().any(|p| p == s))
        .collect();
    let last = present.last().map(String::as_str);
    match (missing.as_slice(), last) {
        ([], Some(last)) => format!("truncated: section `{last}` is incomplete"),
        ([], None) => "truncated: empty document".to_owned(),
        (missing, last) => {
            let list = missing.iter().map(|s| format!("`{s}`")).collect::<Vec<_>>().join(", ");
            match last {
                Some(last) => format!("truncated inside section `{last}`; missing section(s) {list}"),
                None => format!("truncated; missing section(s) {list}"),
            }
        }
    }
}

/// Keys of the outermost object, in order of appearance.
fn top_level_keys(text: &str) -> Vec<String> {
    let mut keys = Vec::new();
    let mut depth = 0usize;
    let mut chars = text.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        match c {
            '{' | '[' => depth += 1,
            '}' | ']' => depth = depth.saturating_sub(1),
            '"' => {
                let start = i + 1;
                let mut end = None;
                let mut escaped = false;
                for (j, c) in chars.by_ref() {
                    match c {
                        _ if escaped => escaped = false,
                        '\\' => escaped = true,
                        '"' => {
                            end = Some(j);
                            break;
                        }
                        _ => {}
                    }
                }
                let Some(end) = end else { break };
                if depth == 1 && text[end + 1..].trim_start().starts_with(':') {
                    keys.push(text[start..end].to_owned());
                }
            }
            _ => {}
        }
    }
    keys
}
