//! The `transit-engine` command line.
//!
//! Exit status is 0 on success, 1 when the inputs are invalid (syntax,
//! validation or malformed data) and 2 when a file cannot be read or written.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::analysis::{
    boarding_alighting_totals, occupancy_by_trip, occupancy_to_csv, speed_stats_to_csv, totals_to_csv, RunOutputs,
};
use crate::energy::{compare_scenarios, comparison_to_csv, reports_to_csv, EnergyReport};
use crate::error::{Error, Result};
use crate::pipeline::{compile, diagnostics_to_json, run_scenario, RunOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_IO: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "transit-engine", version, about = "Compile, run and analyze bus transit scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse, validate and resolve a scenario; print diagnostics as JSON.
    Compile { scenario: PathBuf },
    /// Run every configuration of a scenario and write its outputs.
    Run {
        scenario: PathBuf,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Also write trajectories of background traffic.
        #[arg(long)]
        record_background: bool,
    },
    /// Print analysis tables for a run or configuration directory.
    Analyze {
        dir: PathBuf,
        #[command(flatten)]
        tables: Tables,
    },
    /// Compare per-trip energy economy across run or configuration directories.
    Compare {
        #[arg(required = true)]
        dirs: Vec<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct Tables {
    #[arg(long)]
    occupancy: bool,
    #[arg(long)]
    speeds: bool,
    #[arg(long)]
    boardings: bool,
    #[arg(long)]
    energy: bool,
}

impl Tables {
    fn any(&self) -> bool {
        self.occupancy || self.speeds || self.boardings || self.energy
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Io { .. } => "io",
        Error::Format { .. } => "format",
        Error::Parse(_) => "parse",
        Error::Network(_) => "network",
        Error::Gtfs(_) => "gtfs",
        Error::Demand(_) => "demand",
        Error::Routing(_) => "routing",
        Error::Scenario(_) => "scenario",
        Error::Energy(_) => "energy",
        Error::Analysis(_) => "analysis",
        Error::Catalog(_) => "catalog",
        Error::Validation(_) => "validation",
    }
}

/// Runs the command line and returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            if let Error::Validation(diags) = &e {
                let _ = writeln!(out, "{}", diagnostics_to_json(diags));
                for d in diags {
                    let _ = writeln!(err, "error[validation]: {d}");
                }
            } else {
                let _ = writeln!(err, "error[{}]: {e}", error_kind(&e));
            }
            if e.is_io() {
                EXIT_IO
            } else {
                EXIT_INVALID
            }
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Compile { scenario } => {
            let c = compile(&scenario)?;
            emit(out, &format!("{}\n", diagnostics_to_json(&c.diagnostics)))?;
            log::info!("{} configuration(s) valid", c.configs.len());
            Ok(())
        }
        Command::Run {
            scenario,
            seed,
            out: dir,
            record_background,
        } => {
            let c = compile(&scenario)?;
            let opts = RunOptions {
                seed,
                record_background,
                ..RunOptions::default()
            };
            for run in run_scenario(&c, &opts, &dir)? {
                emit(
                    out,
                    &format!("{}\n", crate::pipeline::config_dir(&dir, run.id).display()),
                )?;
            }
            Ok(())
        }
        Command::Analyze { dir, tables } => analyze(&dir, &tables, out),
        Command::Compare { dirs } => {
            let mut reports: BTreeMap<String, Vec<EnergyReport>> = BTreeMap::new();
            for d in &dirs {
                let configs = config_dirs(d)?;
                let single = configs.len() == 1 && configs[0] == *d;
                for c in configs {
                    let label = if single {
                        label_of(d)
                    } else {
                        format!("{}/{}", label_of(d), label_of(&c))
                    };
                    reports.insert(label, RunOutputs::load(&c)?.energy);
                }
            }
            emit(out, &comparison_to_csv(&compare_scenarios(&reports)))
        }
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes())
        .map_err(|e| Error::io("<stdout>", e))
}

fn label_of(p: &Path) -> String {
    p.file_name()
        .map_or_else(|| p.display().to_string(), |n| n.to_string_lossy().into_owned())
}

/// `dir` itself when it holds one configuration's files, else its `config_*` children.
fn config_dirs(dir: &Path) -> Result<Vec<PathBuf>> {
    if dir.join("trips.csv").is_file() {
        return Ok(vec![dir.to_path_buf()]);
    }
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut dirs = Vec::new();
    for e in entries {
        let p = e.map_err(|e| Error::io(dir, e))?.path();
        if p.is_dir() && label_of(&p).starts_with("config_") {
            dirs.push(p);
        }
    }
    if dirs.is_empty() {
        return Err(Error::io(
            dir,
            std::io::Error::new(std::io::ErrorKind::NotFound, "no configuration outputs found"),
        ));
    }
    dirs.sort();
    Ok(dirs)
}

/// Prefixes every row of a headed CSV table with a `config` column.
fn with_config(label: &str, table: &str, header: &mut bool, out: &mut String) {
    for (i, line) in table.lines().enumerate() {
        if i == 0 {
            if !*header {
                out.push_str("config,");
                out.push_str(line);
                out.push('\n');
                *header = true;
            }
        } else {
            out.push_str(label);
            out.push(',');
            out.push_str(line);
            out.push('\n');
        }
    }
}

fn analyze(dir: &Path, tables: &Tables, out: &mut dyn Write) -> Result<()> {
    let all = !tables.any();
    let runs: Vec<(String, RunOutputs)> = config_dirs(dir)?
        .into_iter()
        .map(|c| Ok((label_of(&c), RunOutputs::load(&c)?)))
        .collect::<Result<_>>()?;
    let mut sections: Vec<String> = Vec::new();
    let mut table = |f: &dyn Fn(&RunOutputs) -> Result<String>| -> Result<()> {
        let mut text = String::new();
        let mut header = false;
        for (label, run) in &runs {
            with_config(label, &f(run)?, &mut header, &mut text);
        }
        sections.push(text);
        Ok(())
    };
    if all || tables.occupancy {
        table(&|r| Ok(occupancy_to_csv(&occupancy_by_trip(&r.stop_events, &r.routes())?)))?;
    }
    if all || tables.speeds {
        table(&|r| Ok(speed_stats_to_csv(&r.route_speed_stats())))?;
    }
    if all || tables.boardings {
        table(&|r| Ok(totals_to_csv(&boarding_alighting_totals(&r.stop_events, &r.routes()))))?;
    }
    if all || tables.energy {
        table(&|r| Ok(reports_to_csv(&r.energy)))?;
    }
    emit(out, &sections.join("\n"))
}
