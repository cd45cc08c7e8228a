//! Read side: forgetting as hiding.
//!
//! Nothing is deleted. Things whose buoyancy sinks below a threshold drop out
//! of search results, and the result says how much was left out.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::engine::Engine;
use crate::error::EngineError;
use crate::event::Scenario;
use crate::graph::{ThingId, ThingType};
use crate::params::ParameterSet;
use crate::time::Timestamp;

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    /// Visible matches, highest buoyancy first, ties by id.
    pub hits: Vec<(ThingId, f64)>,
    /// Share of all matches that is visible. 1 when nothing matched.
    pub coverage: f64,
    pub hidden_count: usize,
}

/// Descending by score, ascending by id on ties.
fn by_score_then_id(a: &(ThingId, f64), b: &(ThingId, f64)) -> Ordering {
    b.1.partial_cmp(&a.1)
        .unwrap_or(Ordering::Equal)
        .then_with(|| a.0.cmp(&b.0))
}

/// Keyword search over literals, ranked by the user's global buoyancy.
/// Matches below `threshold` are hidden but counted.
pub fn forgetful_search(
    engine: &Engine,
    keyword: &str,
    threshold: f64,
    user: &ThingId,
    now: Timestamp,
) -> Result<SearchResult, EngineError> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(EngineError::InvalidThreshold(threshold));
    }
    let mut hits = Vec::new();
    let mut hidden_count = 0;
    for id in engine.graph().match_literal(keyword) {
        let mb = engine.global_mb(&id, user, now)?;
        if mb >= threshold {
            hits.push((id, mb));
        } else {
            hidden_count += 1;
        }
    }
    hits.sort_by(by_score_then_id);
    let total = hits.len() + hidden_count;
    let coverage = if hidden_count == 0 {
        1.0
    } else {
        hits.len() as f64 / total as f64
    };
    Ok(SearchResult {
        hits,
        coverage,
        hidden_count,
    })
}

/// Members of a context ordered by the user's local buoyancy in it.
pub fn context_listing(
    engine: &Engine,
    context: &ThingId,
    user: &ThingId,
    now: Timestamp,
) -> Result<Vec<(ThingId, f64)>, EngineError> {
    let members = engine.graph().context_members(context)?;
    let mut listing = members
        .into_iter()
        .map(|m| {
            let mb = engine.local_mb(&m, user, context, now)?;
            Ok((m, mb))
        })
        .collect::<Result<Vec<_>, EngineError>>()?;
    listing.sort_by(by_score_then_id);
    Ok(listing)
}

/// Every buoyancy value of one resource at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct MbReport {
    pub resource: ThingId,
    pub group: f64,
    /// Per user.
    pub global: BTreeMap<ThingId, f64>,
    /// Per `(user, context)`.
    pub local: BTreeMap<(ThingId, ThingId), f64>,
}

/// Cross-section over all record families for `resource`. Every user gets a
/// global entry; local entries cover each context the resource belongs to
/// plus any context holding a record for it. Missing records read as 0.
pub fn mb_report(engine: &Engine, resource: &ThingId, now: Timestamp) -> Result<MbReport, EngineError> {
    let graph = engine.graph();
    graph.get(resource)?;
    let member_of: BTreeSet<ThingId> = graph
        .things()
        .filter(|t| t.kind == ThingType::Context)
        .filter(|t| {
            graph
                .context_members(&t.id)
                .map(|m| m.contains(resource))
                .unwrap_or(false)
        })
        .map(|t| t.id.clone())
        .collect();
    let mut global = BTreeMap::new();
    let mut local = BTreeMap::new();
    for user in graph.ids_of_type(ThingType::User) {
        global.insert(user.clone(), engine.global_mb(resource, user, now)?);
        let mut contexts = member_of.clone();
        contexts.extend(engine.local_contexts_of(resource, user));
        for ctx in contexts {
            let mb = engine.local_mb(resource, user, &ctx, now)?;
            local.insert((user.clone(), ctx), mb);
        }
    }
    Ok(MbReport {
        resource: resource.clone(),
        group: engine.group_mb(resource, now)?,
        global,
        local,
    })
}

/// Replays `scenario` on a private engine and samples the user's global
/// buoyancy of `resource` every `step` seconds from `start` to `end`.
pub fn timeline(
    scenario: &Scenario,
    params: &ParameterSet,
    resource: &ThingId,
    user: &ThingId,
    start: Timestamp,
    end: Timestamp,
    step: i64,
) -> Result<Vec<(Timestamp, f64)>, EngineError> {
    if start > end || step <= 0 {
        return Err(EngineError::InvalidInterval { start, end });
    }
    let mut engine = Engine::new(scenario.graph.clone(), *params)?;
    engine.global_mb(resource, user, start)?;
    let mut pending = scenario.events.iter().peekable();
    let samples = (end.0 - start.0) / step + 1;
    let mut series = Vec::with_capacity(samples as usize);
    for i in 0..samples {
        let t = start.plus(i * step);
        while let Some(ev) = pending.next_if(|ev| ev.at <= t) {
            engine.apply_event(ev)?;
        }
        if engine.last_applied().is_some_and(|last| last <= t) {
            engine.fire_time_rules(t)?;
        }
        series.push((t, engine.global_mb(resource, user, t)?));
    }
    Ok(series)
}
