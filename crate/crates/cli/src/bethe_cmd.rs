use num_complex::Complex64;
use serde_json::{json, Value};
use slly_core::bethe::{
    check_state, collision_state, dimer_momenta, dimer_state, energy, monomer_dimer_momenta,
    monomer_dimer_state, nmer_ground, s_matrix, trimer_momenta, trimer_state,
};
use slly_core::piecewise::RegionFunction;

use crate::args::BetheCmd;
use crate::config::{require, RunConfig};
use crate::error::CliError;
use crate::Outcome;

fn complex_list(k: &[Complex64]) -> Value {
    Value::Array(k.iter().map(|z| json!({"re": z.re, "im": z.im})).collect())
}

/// Pairwise `S(k_i, k_j)`, 1-based, `i < j`. Bound-state momenta sit on the
/// poles, which are reported as `null`.
fn s_table(k: &[Complex64], c: f64) -> Value {
    let mut rows = Vec::new();
    for i in 0..k.len() {
        for j in i + 1..k.len() {
            let s = s_matrix(k[i], k[j], c).ok();
            rows.push(json!({
                "i": i + 1,
                "j": j + 1,
                "s": s.map(|z| json!({"re": z.re, "im": z.im})),
            }));
        }
    }
    Value::Array(rows)
}

pub fn run(cmd: &BetheCmd, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let c = require(&cfg.c, "c")?;
    let (family, momenta, state, expected): (&str, Vec<Complex64>, RegionFunction, f64) = match cmd {
        BetheCmd::Collision(_) => {
            let k = require(&cfg.k, "k")?;
            if let Some(n) = cfg.n {
                if n != k.len() {
                    return Err(CliError::Config(format!("--n {n} but {} momenta given", k.len())));
                }
            }
            let state = collision_state(&k, c)?;
            let e = k.iter().map(|x| x * x).sum();
            ("collision", k.iter().map(|&x| Complex64::new(x, 0.0)).collect(), state, e)
        }
        BetheCmd::Dimer(_) => {
            let p = require(&cfg.p, "p")?;
            let state = dimer_state(p, c)?;
            ("dimer", dimer_momenta(p, c).to_vec(), state, 2.0 * p * p - c * c / 2.0)
        }
        BetheCmd::Trimer(_) => {
            let p = require(&cfg.p, "p")?;
            let state = trimer_state(p, c)?;
            ("trimer", trimer_momenta(p, c).to_vec(), state, 3.0 * p * p - 2.0 * c * c)
        }
        BetheCmd::MonomerDimer(_) => {
            let p = require(&cfg.p, "p")?;
            let q = require(&cfg.q, "q")?;
            let state = monomer_dimer_state(p, q, c)?;
            (
                "monomer-dimer",
                monomer_dimer_momenta(p, q, c).to_vec(),
                state,
                q * q + 2.0 * p * p - c * c / 2.0,
            )
        }
        BetheCmd::Nmer(_) => {
            let n = require(&cfg.n, "n")?;
            if c >= 0.0 {
                return Err(CliError::Config("bound states need an attractive coupling, c < 0".into()));
            }
            let state = nmer_ground(n, c)?;
            let g = c.abs();
            let k: Vec<Complex64> = (0..n)
                .map(|j| Complex64::new(0.0, 0.5 * g * (n as f64 - 1.0 - 2.0 * j as f64)))
                .collect();
            let nf = n as f64;
            ("nmer", k, state, -c * c * nf * (nf * nf - 1.0) / 12.0)
        }
    };
    let e = energy(&momenta)?;
    let r = check_state(&state, e, c)?;
    let energy_error = (e - expected).abs();
    let passed = r.max() < cfg.tol && energy_error < cfg.tol * (1.0 + expected.abs());
    let result = json!({
        "family": family,
        "n": momenta.len(),
        "c": c,
        "momenta": complex_list(&momenta),
        "energy": e,
        "expected_energy": expected,
        "energy_error": energy_error,
        "residuals": {"bulk": r.bulk, "continuity": r.continuity, "jump": r.jump},
        "s_matrix": s_table(&momenta, c),
        "terms": state.term_count(),
    });
    Ok(Outcome::json(passed, result))
}
