use buoyancy_core::{Timestamp, DAY, HOUR, MINUTE};
use chrono::{DateTime, SecondsFormat, Utc};

/// `2018-07-02T09:00:00Z`
pub fn format(ts: Timestamp) -> String {
    match DateTime::<Utc>::from_timestamp(ts.secs(), 0) {
        Some(dt) => dt.to_rfc3339_opts(SecondsFormat::Secs, true),
        None => ts.secs().to_string(),
    }
}

/// Parses an RFC 3339 instant with whole seconds. Offsets other than `Z` are
/// converted to UTC.
pub fn parse(s: &str) -> Result<Timestamp, String> {
    let dt = DateTime::parse_from_rfc3339(s).map_err(|e| format!("invalid timestamp `{s}`: {e}"))?;
    if dt.timestamp_subsec_nanos() != 0 {
        return Err(format!("timestamp `{s}` has sub-second precision"));
    }
    Ok(Timestamp(dt.timestamp()))
}

/// Parses `90`, `45s`, `30m`, `6h`, `1d` or `2w` into seconds.
pub fn parse_duration(s: &str) -> Result<i64, String> {
    let s = s.trim();
    let (digits, unit) = match s.find(|c: char| !c.is_ascii_digit()) {
        Some(i) => s.split_at(i),
        None => (s, "s"),
    };
    let n: i64 = digits.parse().map_err(|_| format!("invalid duration `{s}`"))?;
    let scale = match unit {
        "s" => 1,
        "m" => MINUTE,
        "h" => HOUR,
        "d" => DAY,
        "w" => 7 * DAY,
        _ => return Err(format!("unknown duration unit in `{s}`")),
    };
    n.checked_mul(scale).ok_or_else(|| format!("duration `{s}` overflows"))
}
