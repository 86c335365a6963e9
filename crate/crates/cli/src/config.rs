use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::args::{BetheArgs, DirectionArg, Format, LatticeArgs, SusyArgs};
use crate::error::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum Points {
    One(usize),
    Many(Vec<usize>),
}

/// Every key a config file may carry.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    n: Option<usize>,
    c: Option<f64>,
    k: Option<Vec<f64>>,
    p: Option<f64>,
    q: Option<f64>,
    grade: Option<usize>,
    trials: Option<usize>,
    direction: Option<DirectionArg>,
    sector: Option<usize>,
    #[serde(rename = "box")]
    box_length: Option<f64>,
    points: Option<Points>,
    eigs: Option<usize>,
    budget: Option<usize>,
    max_iter: Option<usize>,
    tol: Option<f64>,
    seed: Option<u64>,
    output: Option<PathBuf>,
    format: Option<Format>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

/// Effective parameters after merging flags over the config file; echoed in
/// every report.
#[derive(Debug, Clone, Default, Serialize)]
pub struct RunConfig {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grade: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub direction: Option<DirectionArg>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sector: Option<usize>,
    #[serde(rename = "box", skip_serializing_if = "Option::is_none")]
    pub box_length: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eigs: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,
    pub tol: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    pub format: Format,
}

pub struct Globals {
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
}

impl RunConfig {
    fn base(command: &str, file: &ConfigFile, g: &Globals, default_tol: f64, default_format: Format) -> Result<Self, CliError> {
        let tol = g.tol.or(file.tol).unwrap_or(default_tol);
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(CliError::Config(format!("tolerance must be positive, got {tol}")));
        }
        Ok(Self {
            command: command.into(),
            tol,
            seed: g.seed.or(file.seed),
            output: g.output.clone().or_else(|| file.output.clone()),
            format: g.format.or(file.format).unwrap_or(default_format),
            ..Default::default()
        })
    }

    pub fn bethe(command: &str, a: &BetheArgs, file: &ConfigFile, g: &Globals) -> Result<Self, CliError> {
        Ok(Self {
            n: a.n.or(file.n),
            c: a.c.or(file.c),
            k: a.k.clone().or_else(|| file.k.clone()),
            p: a.p.or(file.p),
            q: a.q.or(file.q),
            ..Self::base(command, file, g, 1e-10, Format::Json)?
        })
    }

    pub fn susy(command: &str, a: &SusyArgs, file: &ConfigFile, g: &Globals) -> Result<Self, CliError> {
        let tol = if command.ends_with("algebra") { 1e-12 } else { 1e-10 };
        Ok(Self {
            n: a.n.or(file.n),
            c: a.c.or(file.c),
            k: a.k.clone().or_else(|| file.k.clone()),
            grade: a.grade.or(file.grade),
            trials: a.trials.or(file.trials),
            direction: a.direction.or(file.direction),
            ..Self::base(command, file, g, tol, Format::Json)?
        })
    }

    pub fn lattice(command: &str, a: &LatticeArgs, file: &ConfigFile, g: &Globals) -> Result<Self, CliError> {
        let format = if command.ends_with("converge") { Format::Csv } else { Format::Json };
        let points = a.points.clone().or_else(|| {
            file.points.clone().map(|p| match p {
                Points::One(m) => vec![m],
                Points::Many(ms) => ms,
            })
        });
        Ok(Self {
            n: a.n.or(file.n),
            c: a.c.or(file.c),
            sector: a.sector.or(file.sector),
            box_length: a.box_length.or(file.box_length),
            points,
            eigs: a.eigs.or(file.eigs),
            budget: a.budget.or(file.budget),
            max_iter: a.max_iter.or(file.max_iter),
            ..Self::base(command, file, g, 1e-8, format)?
        })
    }
}

pub fn require<T: Clone>(v: &Option<T>, flag: &str) -> Result<T, CliError> {
    v.clone().ok_or_else(|| CliError::Config(format!("missing --{flag}")))
}
