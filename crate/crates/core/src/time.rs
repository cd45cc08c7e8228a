//! Wall-clock instants and per-user activity time.
//!
//! Wall time is counted in whole seconds since the Unix epoch. Activity time
//! is the part of wall time during which a user was around: every gap between
//! two consecutive events of a clock contributes at most the idle cap, so a
//! three-week vacation costs no more decay than a long weekend.

use alloc::vec::Vec;
use core::fmt;

use crate::error::EngineError;

pub const MINUTE: i64 = 60;
pub const HOUR: i64 = 60 * MINUTE;
pub const DAY: i64 = 24 * HOUR;

/// Seconds since the Unix epoch (UTC).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct Timestamp(pub i64);

impl Timestamp {
    pub const fn secs(self) -> i64 {
        self.0
    }

    pub const fn plus(self, secs: i64) -> Timestamp {
        Timestamp(self.0 + secs)
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "@{}", self.0)
    }
}

/// Piecewise-linear map from wall time to activity seconds.
///
/// Each breakpoint is `(wall, activity)` at an event of this clock. Between
/// breakpoints activity advances one-for-one with wall time until the idle
/// cap is used up, then stands still until the next event.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActivityClock {
    breakpoints: Vec<(Timestamp, i64)>,
}

impl ActivityClock {
    /// A clock whose activity time is zero at `origin`.
    pub fn starting_at(origin: Timestamp) -> Self {
        Self {
            breakpoints: alloc::vec![(origin, 0)],
        }
    }

    /// Rebuilds a clock from stored breakpoints. They must be strictly
    /// increasing in wall time and non-decreasing in activity time.
    pub fn from_breakpoints(breakpoints: Vec<(Timestamp, i64)>) -> Option<Self> {
        if breakpoints.is_empty() {
            return None;
        }
        let ordered = breakpoints
            .windows(2)
            .all(|w| w[0].0 < w[1].0 && w[0].1 <= w[1].1 && w[1].1 - w[0].1 <= w[1].0 .0 - w[0].0 .0);
        ordered.then_some(Self { breakpoints })
    }

    pub fn breakpoints(&self) -> &[(Timestamp, i64)] {
        &self.breakpoints
    }

    pub fn origin(&self) -> Timestamp {
        self.breakpoints[0].0
    }

    pub fn last_event(&self) -> Timestamp {
        self.breakpoints[self.breakpoints.len() - 1].0
    }

    /// Records an event at `wall`. Events before the last one are rejected.
    pub fn advance(&mut self, wall: Timestamp, idle_cap: i64) -> Result<(), EngineError> {
        let last = self.last_event();
        if wall < last {
            return Err(EngineError::ClockRegression { last, now: wall });
        }
        if wall == last {
            return Ok(());
        }
        let activity = self.at(wall, idle_cap);
        self.breakpoints.push((wall, activity));
        Ok(())
    }

    /// Activity seconds accumulated between the origin and `wall`. Instants
    /// before the origin map to zero.
    pub fn at(&self, wall: Timestamp, idle_cap: i64) -> i64 {
        let idx = self.breakpoints.partition_point(|&(w, _)| w <= wall);
        if idx == 0 {
            return 0;
        }
        let (w, a) = self.breakpoints[idx - 1];
        a + (wall.0 - w.0).min(idle_cap)
    }

    /// Activity time that passed between `t0` and `t1`.
    pub fn elapsed(&self, t0: Timestamp, t1: Timestamp, idle_cap: i64) -> Result<i64, EngineError> {
        if t0 > t1 {
            return Err(EngineError::InvalidInterval { start: t0, end: t1 });
        }
        Ok(self.at(t1, idle_cap) - self.at(t0, idle_cap))
    }
}
