use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use buoyancy::core::query::{forgetful_search, timeline};
use buoyancy::core::{Engine, ThingId, Timestamp};
use buoyancy::error::Error;
use buoyancy::run::Runner;
use buoyancy::snapshot::{self, Snapshot};
use buoyancy::{export, files, generate, timefmt};
use clap::{Args, Parser, Subcommand};

const EXIT_CODES: &str = "\
Exit codes:
  0  success
  2  usage error (bad arguments, unknown ids)
  3  file not found or not readable/writable
  4  malformed scenario or parameter file
  5  scenario fails validation (unknown references, unsorted events, ...)
  6  engine error while applying events
  7  corrupt or mismatched state snapshot
  8  unknown template or bad template parameter

Environment:
  MB_PARAMS  parameter file used when --params is not given";

/// Memory buoyancy experiments: replay scenarios, export timelines, persist
/// engine state and generate scenarios.
#[derive(Parser)]
#[command(name = "mb", version, after_help = EXIT_CODES)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Replay a scenario and write before/after tables for every event.
    Run {
        scenario: PathBuf,
        #[command(flatten)]
        params: ParamsArg,
        /// Comma-separated thing ids to report (default: all things).
        #[arg(long, value_delimiter = ',')]
        watch: Option<Vec<String>>,
        /// Output directory for tables.csv, final.csv and summary.txt.
        #[arg(long, default_value = "mb-out")]
        out: PathBuf,
    },
    /// Sample a user's global buoyancy of one thing over time as CSV.
    Timeline {
        scenario: PathBuf,
        #[arg(long)]
        resource: String,
        #[arg(long)]
        user: String,
        /// Sampling step: seconds, or a number with s, m, h, d or w.
        #[arg(long, default_value = "1d")]
        step: String,
        /// First sample (default: first event).
        #[arg(long)]
        from: Option<String>,
        /// Last sample (default: scenario horizon).
        #[arg(long)]
        to: Option<String>,
        #[command(flatten)]
        params: ParamsArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Keyword search ranked by buoyancy, hiding what has sunk.
    Search {
        scenario: PathBuf,
        #[arg(long)]
        keyword: String,
        #[arg(long)]
        user: String,
        #[arg(long, default_value_t = 0.1)]
        threshold: f64,
        /// Evaluation time (default: scenario horizon).
        #[arg(long)]
        at: Option<String>,
        #[command(flatten)]
        params: ParamsArg,
        /// CSV destination (default: standard output).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Save or restore engine state.
    #[command(subcommand)]
    Snapshot(SnapshotCommand),
    /// Generate a scenario from a template.
    Gen {
        /// solo-task, group-task, group-task-readers, before-after-event or rome-trip.
        #[arg(long)]
        template: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Template parameter as key=value; repeatable.
        #[arg(long = "param", value_name = "KEY=VALUE")]
        params: Vec<String>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum SnapshotCommand {
    /// Write engine state, optionally after replaying part of a scenario.
    Save {
        state: PathBuf,
        /// Scenario to replay (default: save an empty state).
        #[arg(long)]
        scenario: Option<PathBuf>,
        /// Number of events to apply (default: all).
        #[arg(long)]
        events: Option<usize>,
        #[command(flatten)]
        params: ParamsArg,
    },
    /// Check a saved state; with --scenario, continue the replay from it.
    Load {
        state: PathBuf,
        #[arg(long)]
        scenario: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        watch: Option<Vec<String>>,
        #[arg(long, default_value = "mb-out")]
        out: PathBuf,
    },
}

#[derive(Args)]
struct ParamsArg {
    /// Parameter file (JSON); overrides MB_PARAMS.
    #[arg(long = "params")]
    path: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mb: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn ids(list: Option<Vec<String>>) -> Option<Vec<ThingId>> {
    list.map(|v| v.into_iter().filter(|s| !s.is_empty()).map(ThingId::new).collect())
}

fn instant(s: &str) -> Result<Timestamp, Error> {
    timefmt::parse(s).map_err(Error::Usage)
}

fn require(engine_graph: &buoyancy::core::Graph, id: &str, what: &str) -> Result<ThingId, Error> {
    let id = ThingId::new(id);
    if engine_graph.contains(&id) {
        Ok(id)
    } else {
        Err(Error::Usage(format!("{what} `{id}` is not in the scenario graph")))
    }
}

fn read(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn execute(command: Command) -> Result<(), Error> {
    match command {
        Command::Run {
            scenario,
            params,
            watch,
            out,
        } => {
            let scenario = files::read_scenario(&scenario)?;
            let params = files::load_params(params.path.as_deref())?;
            let mut runner = Runner::new(scenario, params)?;
            if let Some(w) = ids(watch) {
                runner.watch(w)?;
            }
            let (report, _) = runner.finish()?;
            export::write_run(&out, &report)?;
            println!(
                "{}: {} events, results in {}",
                report.scenario,
                report.steps.len(),
                out.display()
            );
        }
        Command::Timeline {
            scenario,
            resource,
            user,
            step,
            from,
            to,
            params,
            out,
        } => {
            let scenario = files::read_scenario(&scenario)?;
            let params = files::load_params(params.path.as_deref())?;
            let resource = require(&scenario.graph, &resource, "resource")?;
            let user = require(&scenario.graph, &user, "user")?;
            let step = timefmt::parse_duration(&step).map_err(Error::Usage)?;
            if step <= 0 {
                return Err(Error::Usage("--step must be positive".into()));
            }
            let start = from
                .as_deref()
                .map(instant)
                .transpose()?
                .or(scenario.events.first().map(|e| e.at));
            let end = to.as_deref().map(instant).transpose()?.unwrap_or(scenario.horizon);
            let series = match start {
                Some(start) if start <= end => timeline(&scenario, &params, &resource, &user, start, end, step)?,
                _ => Vec::new(),
            };
            export::write_file(&out, &export::timeline_csv(&series))?;
        }
        Command::Search {
            scenario,
            keyword,
            user,
            threshold,
            at,
            params,
            out,
        } => {
            let scenario = files::read_scenario(&scenario)?;
            let params = files::load_params(params.path.as_deref())?;
            let user = require(&scenario.graph, &user, "user")?;
            let now = at.as_deref().map(instant).transpose()?.unwrap_or(scenario.horizon);
            let mut engine = Engine::new(scenario.graph.clone(), params)?;
            for ev in scenario.events.iter().take_while(|e| e.at <= now) {
                engine.apply_event(ev)?;
            }
            if engine.last_applied().is_some() {
                engine.fire_time_rules(now)?;
            }
            let result = forgetful_search(&engine, &keyword, threshold, &user, now)?;
            let text = export::search_csv(&result);
            match out {
                Some(path) => export::write_file(&path, &text)?,
                None => print!("{text}"),
            }
        }
        Command::Snapshot(SnapshotCommand::Save {
            state,
            scenario,
            events,
            params,
        }) => {
            let params = files::load_params(params.path.as_deref())?;
            let snap = match scenario {
                None => Snapshot::empty(params)?,
                Some(path) => {
                    let mut runner = Runner::new(files::read_scenario(&path)?, params)?;
                    runner.advance_to(events.unwrap_or(usize::MAX))?;
                    runner.snapshot()
                }
            };
            export::write_file(&state, &snapshot::to_json(&snap))?;
        }
        Command::Snapshot(SnapshotCommand::Load {
            state,
            scenario,
            watch,
            out,
        }) => {
            let snap = snapshot::from_json(&read(&state)?)?;
            match scenario {
                None => {
                    let engine = &snap.engine;
                    println!(
                        "scenario {}, cursor {}, {} things, {} records",
                        snap.scenario.as_deref().unwrap_or("-"),
                        snap.cursor,
                        engine.graph().len(),
                        engine.records().count()
                    );
                }
                Some(path) => {
                    let mut runner = Runner::resume(files::read_scenario(&path)?, snap)?;
                    if let Some(w) = ids(watch) {
                        runner.watch(w)?;
                    }
                    let (report, _) = runner.finish()?;
                    export::write_run(&out, &report)?;
                    println!(
                        "{}: {} events continued, results in {}",
                        report.scenario,
                        report.steps.len(),
                        out.display()
                    );
                }
            }
        }
        Command::Gen {
            template,
            seed,
            params,
            out,
        } => {
            let params = params
                .iter()
                .map(|p| generate::parse_param(p))
                .collect::<Result<BTreeMap<_, _>, _>>()?;
            let scenario = generate::generate(&template, seed, &params)?;
            export::write_file(&out, &files::serialize_scenario(&scenario))?;
        }
    }
    Ok(())
}
