//! CSV and text output, and atomic writes.
//!
//! Run tables and search results print scores in shortest round-trip form,
//! so they hold exactly the values the engine computed. Timelines are for
//! plotting and use six decimals.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use buoyancy_core::{MbReport, SearchResult, Timestamp};

use crate::error::Error;
use crate::run::{MbTable, RunReport};
use crate::timefmt;

fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("writing to memory");
    for row in rows {
        w.write_record(&row).expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("writing to memory")).expect("csv input is utf-8")
}

/// `(scope, user, context, mb)` rows of one report: group first, then global
/// per user, then local per user and context.
fn scopes(r: &MbReport) -> Vec<[String; 4]> {
    let mut rows = vec![["group".to_owned(), String::new(), String::new(), r.group.to_string()]];
    for (u, v) in &r.global {
        rows.push(["global".to_owned(), u.to_string(), String::new(), v.to_string()]);
    }
    for ((u, c), v) in &r.local {
        rows.push(["local".to_owned(), u.to_string(), c.to_string(), v.to_string()]);
    }
    rows
}

fn table_rows<'a>(prefix: &'a [String], table: &'a MbTable) -> impl Iterator<Item = Vec<String>> + 'a {
    let time = timefmt::format(table.at);
    table.reports.iter().flat_map(move |r| {
        let time = time.clone();
        scopes(r).into_iter().map(move |[scope, user, ctx, mb]| {
            let mut row = prefix.to_vec();
            row.extend([time.clone(), r.resource.to_string(), scope, user, ctx, mb]);
            row
        })
    })
}

/// Long-format before/after tables, one block per event.
pub fn tables_csv(report: &RunReport) -> String {
    let header = ["event", "phase", "time", "resource", "scope", "user", "context", "mb"];
    let mut rows = Vec::new();
    for step in &report.steps {
        for (phase, table) in [("pre", &step.before), ("post", &step.after)] {
            let prefix = [step.index.to_string(), phase.to_owned()];
            rows.extend(table_rows(&prefix, table).collect::<Vec<_>>());
        }
    }
    csv_text(&header, rows)
}

pub fn final_csv(report: &RunReport) -> String {
    let header = ["time", "resource", "scope", "user", "context", "mb"];
    csv_text(&header, table_rows(&[], &report.last).collect::<Vec<_>>())
}

fn describe(e: &buoyancy_core::Event) -> String {
    let mut s = format!("{} {} {}", timefmt::format(e.at), e.actor, e.kind);
    if let Some(t) = &e.target {
        let _ = write!(s, " {t}");
    }
    if let Some(c) = &e.context {
        let _ = write!(s, " [{c}]");
    }
    s
}

fn brief(r: &MbReport) -> String {
    let mut s = format!("group {:.2}", r.group);
    for (u, v) in &r.global {
        let _ = write!(s, "  {u} {v:.2}");
    }
    for ((u, c), v) in &r.local {
        let _ = write!(s, "  {u}@{c} {v:.2}");
    }
    s
}

/// Readable report: every event with the before and after values of the
/// things that changed, then the final cross-section.
pub fn summary_txt(report: &RunReport) -> String {
    let mut out = format!(
        "scenario {}\n{} events, {} watched things\n",
        report.scenario,
        report.steps.len(),
        report.watched.len()
    );
    for step in &report.steps {
        let _ = writeln!(out, "\n#{} {}", step.index, describe(&step.event));
        for (before, after) in step.before.reports.iter().zip(&step.after.reports) {
            if before != after {
                let _ = writeln!(out, "  {:<16} {}", before.resource.as_str(), brief(before));
                let _ = writeln!(out, "  {:<16} {}", "", brief(after));
            }
        }
    }
    let _ = writeln!(out, "\nat horizon {}", timefmt::format(report.last.at));
    for r in &report.last.reports {
        let _ = writeln!(out, "  {:<16} {}", r.resource.as_str(), brief(r));
    }
    out
}

pub fn timeline_csv(series: &[(Timestamp, f64)]) -> String {
    csv_text(
        &["timestamp", "mb"],
        series.iter().map(|(t, v)| vec![timefmt::format(*t), format!("{v:.6}")]),
    )
}

pub fn search_csv(result: &SearchResult) -> String {
    let rows = result
        .hits
        .iter()
        .enumerate()
        .map(|(i, (id, v))| vec![(i + 1).to_string(), id.to_string(), v.to_string()]);
    let mut out = csv_text(&["rank", "id", "mb"], rows);
    let _ = writeln!(out, "# coverage={} hidden={}", result.coverage, result.hidden_count);
    out
}

fn parent_of(path: &Path) -> &Path {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    }
}

/// Writes `contents` to `path` via a temporary file in the same directory.
pub fn write_file(path: &Path, contents: &str) -> Result<(), Error> {
    let dir = parent_of(path);
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(contents.as_bytes())
        .map_err(|e| Error::io(tmp.path(), e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

/// Creates directory `out` holding `files`. The files are written to a
/// temporary sibling directory that replaces `out` only once complete.
pub fn write_dir(out: &Path, files: &[(&str, String)]) -> Result<(), Error> {
    let parent = parent_of(out);
    std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    let tmp = tempfile::Builder::new()
        .prefix(".mb-out-")
        .tempdir_in(parent)
        .map_err(|e| Error::io(parent, e))?;
    for (name, contents) in files {
        let path = tmp.path().join(name);
        std::fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
    }
    if out.is_dir() {
        std::fs::remove_dir_all(out).map_err(|e| Error::io(out, e))?;
    } else if out.exists() {
        return Err(Error::Usage(format!("{} exists and is not a directory", out.display())));
    }
    let tmp = tmp.keep();
    std::fs::rename(&tmp, out).map_err(|e| Error::io(out, e))
}

/// The artifacts of a run: `tables.csv`, `final.csv` and `summary.txt`.
pub fn write_run(out: &Path, report: &RunReport) -> Result<(), Error> {
    write_dir(
        out,
        &[
            ("tables.csv", tables_csv(report)),
            ("final.csv", final_csv(report)),
            ("summary.txt", summary_txt(report)),
        ],
    )
}
