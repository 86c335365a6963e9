use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use slly_core::bethe::collision_state;
use slly_core::susy::{
    anticommutator_bulk_check, exchange_sigma_check, q_nilpotency_check, random_spinor, sector_hamiltonian,
    susy_partner, witten_census, zero_mode_alternating, zero_mode_report, zero_mode_top, Direction,
    SpinorFunction, Superpotential,
};

use crate::args::{DirectionArg, SusyCmd};
use crate::config::{require, RunConfig};
use crate::error::CliError;
use crate::Outcome;

/// Symbolic commands stay cheap up to this many particles.
pub const MAX_SYMBOLIC_N: usize = 5;
const DEFAULT_TRIALS: usize = 100;

fn superpotential(cfg: &RunConfig) -> Result<Superpotential, CliError> {
    let n = require(&cfg.n, "n")?;
    if !(2..=MAX_SYMBOLIC_N).contains(&n) {
        return Err(CliError::Config(format!("susy commands need 2 <= N <= {MAX_SYMBOLIC_N}, got {n}")));
    }
    Ok(Superpotential::new(n, require(&cfg.c, "c")?)?)
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report serializes")
}

pub fn run(cmd: &SusyCmd, cfg: &RunConfig) -> Result<Outcome, CliError> {
    match cmd {
        SusyCmd::Algebra(_) => algebra(cfg),
        SusyCmd::ZeroModes(_) => zero_modes(cfg),
        SusyCmd::Census(_) => census(cfg),
        SusyCmd::Partner(_) => partner(cfg),
        SusyCmd::Sector(_) => sector(cfg),
    }
}

fn algebra(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let sp = superpotential(cfg)?;
    let seed = cfg
        .seed
        .ok_or_else(|| CliError::Config("susy algebra is stochastic and needs --seed".into()))?;
    let trials = cfg.trials.unwrap_or(DEFAULT_TRIALS);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut nil, mut anti) = (0.0_f64, 0.0_f64);
    for _ in 0..trials {
        let s = random_spinor(sp.n, None, 2, &mut rng)?;
        nil = nil.max(q_nilpotency_check(&s, &sp)?);
        anti = anti.max(anticommutator_bulk_check(&s, &sp)?);
    }
    let passed = nil < cfg.tol && anti < cfg.tol;
    Ok(Outcome::json(
        passed,
        json!({
            "n": sp.n,
            "c": sp.c,
            "trials": trials,
            "seed": seed,
            "max_nilpotency_residual": nil,
            "max_anticommutator_residual": anti,
        }),
    ))
}

fn zero_modes(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let sp = superpotential(cfg)?;
    let top = zero_mode_report("top", &zero_mode_top(&sp)?, &sp)?;
    let alt = zero_mode_report("alternating", &zero_mode_alternating(&sp)?, &sp)?;
    let sigma = if sp.n <= 3 { Some(exchange_sigma_check(&sp)?) } else { None };
    let passed = top.passed(cfg.tol) && alt.passed(cfg.tol) && sigma.as_ref().is_none_or(|s| s.residual < cfg.tol);
    Ok(Outcome::json(
        passed,
        json!({
            "n": sp.n,
            "c": sp.c,
            "shift": sp.shift(),
            "modes": [to_value(&top), to_value(&alt)],
            "exchange_sigma": sigma.as_ref().map(to_value),
        }),
    ))
}

fn census(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let sp = superpotential(cfg)?;
    let census = witten_census(&sp)?;
    let passed = census.modes.iter().all(|m| m.passed(cfg.tol));
    let mut result = to_value(&census);
    result["n"] = json!(sp.n);
    result["c"] = json!(sp.c);
    Ok(Outcome::json(passed, result))
}

/// Raising starts from the scalar collision state; lowering from the
/// fully occupied sector, where the coupling is attractive.
fn partner(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let k = require(&cfg.k, "k")?;
    let n = cfg.n.unwrap_or(k.len());
    if n != k.len() {
        return Err(CliError::Config(format!("--n {n} but {} momenta given", k.len())));
    }
    let sp = superpotential(&RunConfig { n: Some(n), ..cfg.clone() })?;
    let direction = cfg.direction.unwrap_or(DirectionArg::Raise);
    let (state, dir) = match direction {
        DirectionArg::Raise => (SpinorFunction::single(0, collision_state(&k, sp.c)?)?, Direction::Raise),
        DirectionArg::Lower => (
            SpinorFunction::single((1 << n) - 1, collision_state(&k, -sp.c)?)?,
            Direction::Lower,
        ),
    };
    let e = k.iter().map(|x| x * x).sum::<f64>() + sp.shift();
    let (image, report) = susy_partner(&state, e, dir, &sp)?;
    let accepted = |r: &slly_core::susy::EigenReport| r.bulk < cfg.tol && r.continuity < cfg.tol && r.jump < cfg.tol;
    let passed = accepted(&report.source) && report.partner.as_ref().is_none_or(accepted);
    // Q Q† (or Q† Q) returns 2E times the source on an eigenstate
    let back = match dir {
        Direction::Raise => slly_core::susy::apply_q(&image, &sp)?,
        Direction::Lower => slly_core::susy::apply_q_dagger(&image, &sp)?,
    };
    let round_trip = back.max_diff(&state.scale(Complex64::new(2.0 * e, 0.0))) / (1.0 + state.max_abs_coef());
    Ok(Outcome::json(
        passed,
        json!({
            "n": n,
            "c": sp.c,
            "momenta": k,
            "energy": e,
            "report": to_value(&report),
            "round_trip_residual": round_trip,
            "partner": to_value(&image),
        }),
    ))
}

fn sector(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let sp = superpotential(cfg)?;
    let grade = require(&cfg.grade, "grade")?;
    let h = sector_hamiltonian(grade, &sp)?;
    let symmetric = h
        .couplings
        .iter()
        .all(|(_, m)| (0..m.len()).all(|i| (0..m.len()).all(|j| m[i][j] == m[j][i])));
    let couplings: Vec<Value> = h
        .couplings
        .iter()
        .map(|((a, b), m)| json!({"pair": [a + 1, b + 1], "block": m}))
        .collect();
    Ok(Outcome::json(
        symmetric,
        json!({
            "n": h.n,
            "grade": h.grade,
            "c": h.c,
            "shift": h.shift,
            "basis": h.labels(),
            "couplings": couplings,
        }),
    ))
}
