use serde_json::Value;
use slly_lattice::check::{convergence_study, lattice_q_diagnostic, susy_spectrum_check};
use slly_lattice::eigen::SolverOptions;
use slly_lattice::grid::{Grid, DEFAULT_BUDGET};
use slly_lattice::sector::sector_spectrum;

use crate::args::{Format, LatticeCmd};
use crate::config::{require, RunConfig};
use crate::error::CliError;
use crate::Outcome;

const DEFAULT_SEED: u64 = 1;
const DEFAULT_BOX: f64 = 24.0;
const DEFAULT_EIGS: usize = 6;
const DEFAULT_POINTS: usize = 240;
const DEFAULT_REFINEMENTS: [usize; 3] = [119, 239, 479];
const DIAGNOSTIC_BOX: f64 = 6.0;
const DIAGNOSTIC_POINTS: usize = 24;

fn solver(cfg: &RunConfig) -> SolverOptions {
    let mut opts = SolverOptions {
        seed: cfg.seed.unwrap_or(DEFAULT_SEED),
        tol: cfg.tol,
        ..Default::default()
    };
    if let Some(it) = cfg.max_iter {
        opts.max_iter = it;
    }
    opts
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report serializes")
}

fn single_points(cfg: &RunConfig, default: usize) -> Result<usize, CliError> {
    match cfg.points.as_deref() {
        None => Ok(default),
        Some([m]) => Ok(*m),
        Some(ms) => Err(CliError::Config(format!("expected one --points value, got {}", ms.len()))),
    }
}

/// Echo the defaults actually used.
pub fn resolve(cmd: &LatticeCmd, cfg: &mut RunConfig) {
    cfg.seed.get_or_insert(DEFAULT_SEED);
    cfg.budget.get_or_insert(DEFAULT_BUDGET);
    match cmd {
        LatticeCmd::Spectrum(_) => {
            cfg.box_length.get_or_insert(DEFAULT_BOX);
            cfg.eigs.get_or_insert(DEFAULT_EIGS);
            cfg.points.get_or_insert_with(|| vec![DEFAULT_POINTS]);
        }
        LatticeCmd::Converge(_) => {
            cfg.box_length.get_or_insert(DEFAULT_BOX);
            cfg.eigs.get_or_insert(1);
            cfg.points.get_or_insert_with(|| DEFAULT_REFINEMENTS.to_vec());
        }
        LatticeCmd::Diagnostic(_) => {
            cfg.box_length.get_or_insert(DIAGNOSTIC_BOX);
            cfg.points.get_or_insert_with(|| vec![DIAGNOSTIC_POINTS]);
        }
    }
}

pub fn run(cmd: &LatticeCmd, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let n = require(&cfg.n, "n")?;
    let c = require(&cfg.c, "c")?;
    let l = cfg.box_length.unwrap_or(DEFAULT_BOX);
    let budget = cfg.budget.unwrap_or(DEFAULT_BUDGET);
    let opts = solver(cfg);
    if !matches!(cmd, LatticeCmd::Converge(_)) && cfg.format == Format::Csv {
        return Err(CliError::Config("CSV output is only available for `lattice converge`".into()));
    }
    match cmd {
        LatticeCmd::Spectrum(_) => {
            let m = single_points(cfg, DEFAULT_POINTS)?;
            let g = Grid::new(l, m, n)?;
            match cfg.sector {
                Some(sector) => {
                    let k = cfg.eigs.unwrap_or(DEFAULT_EIGS);
                    let r = sector_spectrum(sector, &g, c, k, &opts, budget)?;
                    let passed = r.residuals.iter().all(|&x| x < cfg.tol);
                    Ok(Outcome::json(passed, to_value(&r)))
                }
                None => {
                    let r = susy_spectrum_check(&g, c, &opts, budget)?;
                    Ok(Outcome::json(r.passed, to_value(&r)))
                }
            }
        }
        LatticeCmd::Converge(_) => {
            let sector = require(&cfg.sector, "sector")?;
            let points = cfg.points.clone().unwrap_or_else(|| DEFAULT_REFINEMENTS.to_vec());
            let k = cfg.eigs.unwrap_or(1);
            let r = convergence_study(n, sector, c, l, &points, k, &opts, budget)?;
            let residuals_ok = r.rows.iter().all(|row| row.residuals.iter().all(|&x| x < cfg.tol));
            let passed = residuals_ok && r.decreasing;
            let csv = r.to_csv();
            Ok(Outcome {
                passed,
                result: to_value(&r),
                csv: Some(csv),
            })
        }
        LatticeCmd::Diagnostic(_) => {
            let m = single_points(cfg, DIAGNOSTIC_POINTS)?;
            let g = Grid::new(l, m, n)?;
            let r = lattice_q_diagnostic(&g, c, &opts, budget)?;
            Ok(Outcome::json(r.passed, to_value(&r)))
        }
    }
}
