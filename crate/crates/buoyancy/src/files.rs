//! JSON documents: graph snapshots, scenarios and parameter files.
//!
//! Timestamps are RFC 3339 UTC strings with whole seconds. Unknown fields,
//! thing types and event kinds are rejected.

use std::collections::BTreeSet;
use std::path::Path;

use buoyancy_core::{Event, EventKind, Graph, ParameterSet, Scenario, Thing, ThingId, ThingType, Violation};
use serde::{Deserialize, Serialize};

use crate::error::{Error, ScenarioError};
use crate::timefmt;

/// Environment variable naming a default parameter file.
pub const PARAMS_ENV: &str = "MB_PARAMS";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThingDoc {
    pub id: String,
    #[serde(rename = "type")]
    pub kind: String,
    pub literals: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub completed: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub completed_at: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub event_start: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationDoc {
    pub source: String,
    pub target: String,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDoc {
    pub things: Vec<ThingDoc>,
    pub relations: Vec<RelationDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EventDoc {
    pub t: String,
    pub actor: String,
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub context: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDoc {
    pub name: String,
    pub horizon: String,
    pub graph: GraphDoc,
    pub events: Vec<EventDoc>,
}

impl GraphDoc {
    pub fn from_graph(graph: &Graph) -> Self {
        let things = graph
            .things()
            .map(|t| ThingDoc {
                id: t.id.to_string(),
                kind: t.kind.name().to_owned(),
                literals: t.literals.iter().cloned().collect(),
                completed: t.completed_at.map(|_| true),
                completed_at: t.completed_at.map(timefmt::format),
                event_start: t.event_start.map(timefmt::format),
            })
            .collect();
        let relations = graph
            .relations()
            .map(|r| RelationDoc {
                source: r.source.to_string(),
                target: r.target.to_string(),
                label: r.label.clone(),
            })
            .collect();
        Self { things, relations }
    }

    pub fn to_graph(&self) -> Result<Graph, String> {
        let mut graph = Graph::new();
        for (i, doc) in self.things.iter().enumerate() {
            let at = |field: &str| format!("things[{i}].{field}");
            let kind = ThingType::from_name(&doc.kind)
                .ok_or_else(|| format!("{}: unknown type `{}`", at("type"), doc.kind))?;
            let completed_at = doc
                .completed_at
                .as_deref()
                .map(timefmt::parse)
                .transpose()
                .map_err(|e| format!("{}: {e}", at("completed_at")))?;
            match (doc.completed, completed_at) {
                (Some(true), None) => {
                    return Err(format!(
                        "{}: completed things need a completion time",
                        at("completed_at")
                    ))
                }
                (Some(false), Some(_)) => {
                    return Err(format!("{}: set on a thing marked not completed", at("completed_at")))
                }
                _ => {}
            }
            let event_start = doc
                .event_start
                .as_deref()
                .map(timefmt::parse)
                .transpose()
                .map_err(|e| format!("{}: {e}", at("event_start")))?;
            let thing = Thing {
                id: ThingId::new(doc.id.clone()),
                kind,
                literals: doc.literals.iter().cloned().collect::<BTreeSet<_>>(),
                completed_at,
                event_start,
            };
            graph.insert(thing).map_err(|e| format!("things[{i}]: {e}"))?;
        }
        for (i, r) in self.relations.iter().enumerate() {
            graph
                .add_relation(
                    &ThingId::new(r.source.clone()),
                    &ThingId::new(r.target.clone()),
                    &r.label,
                )
                .map_err(|e| format!("relations[{i}]: {e}"))?;
        }
        Ok(graph)
    }
}

impl ScenarioDoc {
    pub fn from_scenario(s: &Scenario) -> Self {
        let events = s
            .events
            .iter()
            .map(|e| EventDoc {
                t: timefmt::format(e.at),
                actor: e.actor.to_string(),
                kind: e.kind.name().to_owned(),
                target: e.target.as_ref().map(ToString::to_string),
                context: e.context.as_ref().map(ToString::to_string),
            })
            .collect();
        Self {
            name: s.name.clone(),
            horizon: timefmt::format(s.horizon),
            graph: GraphDoc::from_graph(&s.graph),
            events,
        }
    }
}

fn malformed(msg: impl Into<String>) -> ScenarioError {
    ScenarioError::MalformedDocument(msg.into())
}

/// Parses and validates a scenario document. Nothing is returned unless the
/// whole document is valid.
pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let doc: ScenarioDoc = serde_path_to_error::deserialize(de).map_err(|e| malformed(e.to_string()))?;
    let graph = doc.graph.to_graph().map_err(|e| malformed(format!("graph.{e}")))?;
    let horizon = timefmt::parse(&doc.horizon).map_err(|e| malformed(format!("horizon: {e}")))?;
    let mut events = Vec::with_capacity(doc.events.len());
    for (i, e) in doc.events.iter().enumerate() {
        let at = timefmt::parse(&e.t).map_err(|err| malformed(format!("events[{i}].t: {err}")))?;
        let kind = EventKind::from_name(&e.kind)
            .ok_or_else(|| malformed(format!("events[{i}].kind: unknown kind `{}`", e.kind)))?;
        events.push(Event {
            at,
            actor: ThingId::new(e.actor.clone()),
            kind,
            target: e.target.clone().map(ThingId::new),
            context: e.context.clone().map(ThingId::new),
        });
    }
    let scenario = Scenario {
        name: doc.name,
        graph,
        events,
        horizon,
    };
    scenario.validate().map_err(classify)?;
    Ok(scenario)
}

// Reference and ordering problems get their own error; the first one wins.
fn classify(violations: Vec<Violation>) -> ScenarioError {
    for v in &violations {
        match v {
            Violation::UnknownReference { index, id } => {
                return ScenarioError::UnknownReference {
                    index: *index,
                    id: id.clone(),
                }
            }
            Violation::Unsorted { index } => return ScenarioError::UnsortedEvents { index: *index },
            _ => {}
        }
    }
    ScenarioError::Invalid(violations)
}

/// Pretty-printed JSON with a trailing newline; equal scenarios give equal
/// bytes.
pub fn serialize_scenario(s: &Scenario) -> String {
    let mut out =
        serde_json::to_string_pretty(&ScenarioDoc::from_scenario(s)).expect("scenario documents always serialize");
    out.push('\n');
    out
}

pub fn read_scenario(path: &Path) -> Result<Scenario, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_scenario(&text).map_err(|source| Error::Scenario {
        path: path.to_owned(),
        source,
    })
}

pub fn parse_graph(text: &str) -> Result<Graph, String> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let doc: GraphDoc = serde_path_to_error::deserialize(de).map_err(|e| e.to_string())?;
    doc.to_graph()
}

pub fn serialize_graph(graph: &Graph) -> String {
    let mut out = serde_json::to_string_pretty(&GraphDoc::from_graph(graph)).expect("graph documents always serialize");
    out.push('\n');
    out
}

/// Parses a parameter file. Absent keys keep their defaults.
pub fn parse_params(text: &str) -> Result<ParameterSet, String> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let params: ParameterSet = serde_path_to_error::deserialize(de).map_err(|e| e.to_string())?;
    params.validate().map_err(|e| e.to_string())?;
    Ok(params)
}

/// Loads `path`, else the file named by `MB_PARAMS`, else the defaults.
pub fn load_params(path: Option<&Path>) -> Result<ParameterSet, Error> {
    let env = std::env::var_os(PARAMS_ENV).filter(|v| !v.is_empty());
    let path = match (path, &env) {
        (Some(p), _) => p,
        (None, Some(p)) => Path::new(p),
        (None, None) => return Ok(ParameterSet::default()),
    };
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_params(&text).map_err(|e| Error::Params(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "name": "minimal",
        "horizon": "2018-06-05T00:00:00Z",
        "graph": {
            "things": [
                {"id": "u1", "type": "User", "literals": ["Ann"]},
                {"id": "doc", "type": "Document", "literals": ["Notes"]}
            ],
            "relations": []
        },
        "events": [
            {"t": "2018-06-04T09:00:00Z", "actor": "u1", "kind": "View", "target": "doc"}
        ]
    }"#;

    #[test]
    fn minimal_document() {
        let s = parse_scenario(MINIMAL).unwrap();
        assert_eq!(s.events.len(), 1);
        assert_eq!(s.events[0].kind, EventKind::View);
        s.validate().unwrap();
    }

    #[test]
    fn unknown_reference() {
        let text = MINIMAL.replace(r#""target": "doc""#, r#""target": "ghost""#);
        assert_eq!(
            parse_scenario(&text).unwrap_err(),
            ScenarioError::UnknownReference {
                index: 0,
                id: "ghost".into()
            }
        );
    }

    #[test]
    fn unknown_kind_and_fields_are_malformed() {
        let text = MINIMAL.replace(r#""kind": "View""#, r#""kind": "Delete""#);
        assert!(matches!(
            parse_scenario(&text),
            Err(ScenarioError::MalformedDocument(_))
        ));
        let text = MINIMAL.replace(r#""name": "minimal","#, r#""name": "minimal", "author": "x","#);
        assert!(matches!(
            parse_scenario(&text),
            Err(ScenarioError::MalformedDocument(_))
        ));
        let text = MINIMAL.replace(r#""type": "Document""#, r#""type": "Spreadsheet""#);
        assert!(
            matches!(parse_scenario(&text), Err(ScenarioError::MalformedDocument(m)) if m.contains("things[1].type"))
        );
    }

    #[test]
    fn round_trip_is_byte_stable() {
        let s = parse_scenario(MINIMAL).unwrap();
        let text = serialize_scenario(&s);
        let again = parse_scenario(&text).unwrap();
        assert_eq!(again, s);
        assert_eq!(serialize_scenario(&again), text);
    }

    #[test]
    fn partial_params() {
        let p = parse_params(r#"{"gain": 0.4, "rows": {"Email": {"tau_days": 3, "alpha": 1.1}}}"#).unwrap();
        assert_eq!(p.gain, 0.4);
        assert_eq!(p.rows.Email.tau_days, 3.0);
        assert_eq!(p.rows.Person, ParameterSet::default().rows.Person);
        assert!(parse_params(r#"{"gian": 0.4}"#).is_err());
        assert!(parse_params(r#"{"gain": 1.5}"#).is_err());
    }

    #[test]
    fn completion_flag_must_agree() {
        let doc = r#"{"things": [{"id": "t", "type": "Task", "literals": ["x"], "completed": true}], "relations": []}"#;
        assert!(parse_graph(doc).unwrap_err().contains("completed_at"));
    }
}
