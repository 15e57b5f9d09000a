//! Scenario-driven experiments on symplectic cocycles.
//!
//! `cocycle-lab <experiment> --scenario FILE [--out DIR] [--seed N]
//! [--set key=value]... [--jobs N]` validates the scenario, runs the
//! experiment and writes `report.json`, `run.log` and any CSV tables to the
//! output directory. Exit codes: `0` success, `2` negative or inconclusive
//! test, `1` error.

pub mod experiments;
pub mod output;
pub mod report;
pub mod scenario;
pub mod schema;

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Arg, ArgAction, ArgMatches, Command};

pub use experiments::{experiment_by_name, registry, Experiment, RunContext};
pub use report::{Outcome, Report};
pub use scenario::{Scenario, ScenarioErrors};

pub const JOBS_ENV: &str = "COCYCLE_LAB_JOBS";

fn common_args() -> Vec<Arg> {
    vec![
        Arg::new("scenario")
            .long("scenario")
            .value_name("PATH")
            .required(true)
            .value_parser(clap::value_parser!(PathBuf))
            .help("Scenario file (TOML)"),
        Arg::new("out")
            .long("out")
            .value_name("DIR")
            .default_value("cocycle-lab-out")
            .value_parser(clap::value_parser!(PathBuf))
            .help("Output directory"),
        Arg::new("seed")
            .long("seed")
            .value_name("N")
            .value_parser(clap::value_parser!(u64))
            .help("Override the scenario's master seed"),
        Arg::new("set")
            .long("set")
            .value_name("KEY=VALUE")
            .action(ArgAction::Append)
            .help("Override a scenario field, e.g. spectrum.iterations=2000"),
        Arg::new("jobs")
            .long("jobs")
            .value_name("N")
            .env(JOBS_ENV)
            .value_parser(clap::value_parser!(usize))
            .help("Worker threads"),
    ]
}

/// The command line, with one subcommand per registered experiment.
pub fn command() -> Command {
    let mut cmd = Command::new("cocycle-lab")
        .version(report::TOOL_VERSION)
        .about("Lyapunov spectra, holonomies and perturbation diagnostics for symplectic cocycles")
        .subcommand_required(true)
        .arg_required_else_help(true);
    for e in registry() {
        cmd = cmd.subcommand(Command::new(e.name()).about(e.about()).args(common_args()));
    }
    cmd
}

/// Run one experiment and write its outputs; returns the outcome.
pub fn execute(name: &str, m: &ArgMatches) -> anyhow::Result<Outcome> {
    let exp = experiment_by_name(name).ok_or_else(|| anyhow::anyhow!("unknown experiment '{name}'"))?;
    if let Some(&jobs) = m.get_one::<usize>("jobs") {
        if jobs == 0 {
            anyhow::bail!("--jobs must be at least 1");
        }
        // The global pool can be set once per process.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
    }
    let path = m.get_one::<PathBuf>("scenario").expect("required");
    let out = m.get_one::<PathBuf>("out").expect("defaulted");
    let overrides: Vec<String> = m.get_many::<String>("set").map(|v| v.cloned().collect()).unwrap_or_default();
    let scenario = Scenario::load(path, m.get_one::<u64>("seed").copied(), &overrides)?;

    let started = Instant::now();
    let started_at = chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true);
    let report = Report::new(name, &scenario, &path.display().to_string(), &overrides, started_at.clone());
    let mut ctx = RunContext {
        scenario,
        report,
        out: output::OutDir::create(out)?,
        generated_at: started_at,
    };
    let outcome = exp.run(&mut ctx)?;
    ctx.report.outcome = outcome;
    ctx.report.wall_clock_seconds = started.elapsed().as_secs_f64();
    let log = ctx.report.log.join("\n") + "\n";
    ctx.out.text("run.log", &log)?;
    ctx.report.outputs = ctx.out.written().to_vec();
    ctx.report.outputs.push("report.json".into());
    let json = ctx.report.validated_json()?;
    ctx.out.text("report.json", &json)?;
    Ok(outcome)
}

/// Parse `args`, run, and map the result to an exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = match command().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let (name, sub) = matches.subcommand().expect("subcommand required");
    match execute(name, sub) {
        Ok(outcome) => {
            eprintln!("{name}: {}", serde_json::to_value(outcome).unwrap_or_default());
            outcome.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}
