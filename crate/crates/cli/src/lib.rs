//! Driver behind the `slly` binary: config merging, command dispatch and
//! report writing.

pub mod args;
pub mod bethe_cmd;
pub mod config;
pub mod error;
pub mod lattice_cmd;
pub mod output;
pub mod susy_cmd;

use serde_json::Value;

use args::{BetheCmd, Cli, Format, Group, LatticeCmd, SusyCmd};
use config::{ConfigFile, Globals, RunConfig};
use error::CliError;

pub struct Outcome {
    pub passed: bool,
    pub result: Value,
    pub csv: Option<String>,
}

impl Outcome {
    pub fn json(passed: bool, result: Value) -> Self {
        Self {
            passed,
            result,
            csv: None,
        }
    }
}

fn bethe_name(cmd: &BetheCmd) -> (&'static str, &args::BetheArgs) {
    match cmd {
        BetheCmd::Collision(a) => ("bethe collision", a),
        BetheCmd::Dimer(a) => ("bethe dimer", a),
        BetheCmd::Trimer(a) => ("bethe trimer", a),
        BetheCmd::MonomerDimer(a) => ("bethe monomer-dimer", a),
        BetheCmd::Nmer(a) => ("bethe nmer", a),
    }
}

fn susy_name(cmd: &SusyCmd) -> (&'static str, &args::SusyArgs) {
    match cmd {
        SusyCmd::Algebra(a) => ("susy algebra", a),
        SusyCmd::ZeroModes(a) => ("susy zero-modes", a),
        SusyCmd::Census(a) => ("susy census", a),
        SusyCmd::Partner(a) => ("susy partner", a),
        SusyCmd::Sector(a) => ("susy sector", a),
    }
}

fn lattice_name(cmd: &LatticeCmd) -> (&'static str, &args::LatticeArgs) {
    match cmd {
        LatticeCmd::Spectrum(a) => ("lattice spectrum", a),
        LatticeCmd::Converge(a) => ("lattice converge", a),
        LatticeCmd::Diagnostic(a) => ("lattice diagnostic", a),
    }
}

/// Effective configuration of a parsed command line.
pub fn resolve(cli: &Cli) -> Result<RunConfig, CliError> {
    let file = match &cli.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let g = Globals {
        output: cli.output.clone(),
        format: cli.format,
        tol: cli.tol,
        seed: cli.seed,
    };
    let cfg = match &cli.group {
        Group::Bethe(cmd) => {
            let (name, a) = bethe_name(cmd);
            RunConfig::bethe(name, a, &file, &g)?
        }
        Group::Susy(cmd) => {
            let (name, a) = susy_name(cmd);
            RunConfig::susy(name, a, &file, &g)?
        }
        Group::Lattice(cmd) => {
            let (name, a) = lattice_name(cmd);
            let mut cfg = RunConfig::lattice(name, a, &file, &g)?;
            lattice_cmd::resolve(cmd, &mut cfg);
            cfg
        }
    };
    if cfg.format == Format::Csv && cfg.command != "lattice converge" {
        return Err(CliError::Config("CSV output is only available for `lattice converge`".into()));
    }
    Ok(cfg)
}

/// Run one command and write its report. Returns the process exit code.
pub fn execute(cli: &Cli) -> Result<i32, CliError> {
    let cfg = resolve(cli)?;
    let outcome = match &cli.group {
        Group::Bethe(cmd) => bethe_cmd::run(cmd, &cfg)?,
        Group::Susy(cmd) => susy_cmd::run(cmd, &cfg)?,
        Group::Lattice(cmd) => lattice_cmd::run(cmd, &cfg)?,
    };
    let report = output::render_report(&cfg, outcome.passed, &outcome.result);
    let csv = outcome.csv.as_deref().filter(|_| cfg.format == Format::Csv);
    match (&cfg.output, csv) {
        (Some(path), Some(table)) => {
            output::write_atomic(path, table)?;
            output::write_atomic(&path.with_extension("json"), &report)?;
        }
        (Some(path), None) => output::write_atomic(path, &report)?,
        (None, Some(table)) => print!("{table}"),
        (None, None) => print!("{report}"),
    }
    eprintln!("{}: {}", cfg.command, if outcome.passed { "PASS" } else { "FAIL" });
    Ok(if outcome.passed { 0 } else { 1 })
}
