//! The N=2 supersymmetric extension: superpotential
//! `W = (c/2) sum_{a<b} |x_a - x_b|`, supercharges
//! `Q = i sqrt(2) sum_j b_j (d_j + dW/dx_j)` and
//! `Q† = i sqrt(2) sum_j b_j† (d_j - dW/dx_j)` acting on spinor-valued
//! piecewise functions, sector Hamiltonians, zero modes and SUSY partners.
//!
//! The super-Hamiltonian `H = {Q, Q†} / 2` is never applied as a single
//! operator. Inside each chamber it is `-Laplacian + shift`; its delta terms
//! are the interface conditions
//! `[(d_a - d_b) F](right) - [(d_a - d_b) F](left) = Lambda_ab F|wall`, with
//! `Lambda_ab` the grade block of [`fock::delta_coupling`] times `2c`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::bethe::nmer_ground;
use crate::error::{Error, Result};
use crate::fock::{self, annihilate, create, state_label, FockBasis};
use crate::piecewise::{
    continuity_residual, enumerate_interfaces, jump_residual, ExpTerm, Region, RegionFunction,
    CONTINUITY_TOL, MAX_PARTICLES,
};

/// Residual threshold for accepting an eigenstate.
pub const EIGEN_TOL: f64 = 1e-10;
/// Energies at or below this count as zero modes.
pub const ZERO_ENERGY_TOL: f64 = 1e-10;

/// `W = (c/2) sum_{a<b} |x_a - x_b|` for `n` particles, `c > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Superpotential {
    pub n: usize,
    pub c: f64,
}

impl Superpotential {
    pub fn new(n: usize, c: f64) -> Result<Self> {
        if !(1..=MAX_PARTICLES).contains(&n) {
            return Err(Error::Size {
                n,
                min: 1,
                max: MAX_PARTICLES,
            });
        }
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::Domain(format!("the superpotential needs c > 0, got {c}")));
        }
        Ok(Self { n, c })
    }

    /// `dW/dx_j` on a chamber: `(c/2) sum_{k != j} sign(x_j - x_k)`.
    pub fn grad_w(&self, r: &Region, j: usize) -> f64 {
        0.5 * self.c * (2.0 * r.rank(j) as f64 - self.n as f64 + 1.0)
    }

    /// `c^2 N (N^2 - 1) / 12`, equal to `sum_j (dW/dx_j)^2` on every chamber.
    pub fn shift(&self) -> f64 {
        let n = self.n as f64;
        self.c * self.c * n * (n * n - 1.0) / 12.0
    }
}

/// Spinor-valued function: one [`RegionFunction`] per occupied Fock basis
/// state; absent components are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorFunction {
    n: usize,
    components: BTreeMap<u32, RegionFunction>,
}

impl SpinorFunction {
    pub fn zero(n: usize) -> Result<Self> {
        if !(1..=MAX_PARTICLES).contains(&n) {
            return Err(Error::Size {
                n,
                min: 1,
                max: MAX_PARTICLES,
            });
        }
        Ok(Self {
            n,
            components: BTreeMap::new(),
        })
    }

    /// Single component `f |state>`.
    pub fn single(state: u32, f: RegionFunction) -> Result<Self> {
        let mut s = Self::zero(f.n())?;
        s.insert(state, f)?;
        Ok(s)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Add `f` to the component of `state`.
    pub fn insert(&mut self, state: u32, f: RegionFunction) -> Result<()> {
        if f.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: f.n(),
            });
        }
        if state >> self.n != 0 {
            return Err(Error::IndexOutOfRange {
                index: state as usize,
                n: 1 << self.n,
            });
        }
        let merged = match self.components.remove(&state) {
            Some(old) => &old + &f,
            None => f,
        };
        if !merged.is_zero() {
            self.components.insert(state, merged);
        }
        Ok(())
    }

    pub fn component(&self, state: u32) -> Option<&RegionFunction> {
        self.components.get(&state)
    }

    pub fn components(&self) -> impl Iterator<Item = (u32, &RegionFunction)> {
        self.components.iter().map(|(&s, f)| (s, f))
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    /// The common grade of all components; `None` for the zero spinor.
    pub fn grade(&self) -> Result<Option<usize>> {
        let mut grades = self.components.keys().map(|s| s.count_ones() as usize);
        let Some(first) = grades.next() else {
            return Ok(None);
        };
        if grades.all(|g| g == first) {
            Ok(Some(first))
        } else {
            Err(Error::MixedGrade)
        }
    }

    pub fn max_abs_coef(&self) -> f64 {
        self.components
            .values()
            .map(RegionFunction::max_abs_coef)
            .fold(0.0, f64::max)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = Self::zero(self.n).expect("valid size");
        for (&state, f) in &self.components {
            out.insert(state, f.scale(s)).expect("same size");
        }
        out
    }

    /// Coefficient-wise max magnitude of `self - other`.
    pub fn max_diff(&self, other: &SpinorFunction) -> f64 {
        let mut diff = self.clone();
        for (&state, f) in &other.components {
            diff.insert(state, -f).expect("same size");
        }
        diff.max_abs_coef()
    }

    /// Per-chamber `(-Laplacian + shift)` applied to every component.
    pub fn bulk_hamiltonian(&self, sp: &Superpotential) -> Self {
        let shift = sp.shift();
        let mut out = Self::zero(self.n).expect("valid size");
        for (&state, f) in &self.components {
            let g = f.map_terms(|_, t| {
                ExpTerm::new(t.coef * (shift - t.laplacian_eigenvalue()), t.kappa.clone())
            });
            out.insert(state, g).expect("same size");
        }
        out
    }
}

#[derive(Serialize)]
struct ComponentJson<'a> {
    state: String,
    occupied: Vec<usize>,
    function: &'a RegionFunction,
}

#[derive(Serialize)]
struct SpinorJson<'a> {
    n: usize,
    components: Vec<ComponentJson<'a>>,
}

impl Serialize for SpinorFunction {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let basis = FockBasis::new(self.n).map_err(serde::ser::Error::custom)?;
        let mut comps: Vec<(usize, u32, &RegionFunction)> = self
            .components
            .iter()
            .map(|(&s, f)| (basis.index_of(s), s, f))
            .collect();
        comps.sort_by_key(|c| c.0);
        SpinorJson {
            n: self.n,
            components: comps
                .into_iter()
                .map(|(_, s, f)| ComponentJson {
                    state: state_label(s, self.n),
                    occupied: (0..self.n).filter(|j| s & (1 << j) != 0).map(|j| j + 1).collect(),
                    function: f,
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

fn check_spinor(s: &SpinorFunction, sp: &Superpotential) -> Result<()> {
    if s.n != sp.n {
        return Err(Error::DimensionMismatch {
            expected: sp.n,
            got: s.n,
        });
    }
    Ok(())
}

fn apply_supercharge(s: &SpinorFunction, sp: &Superpotential, dagger: bool) -> Result<SpinorFunction> {
    check_spinor(s, sp)?;
    let prefactor = Complex64::new(0.0, std::f64::consts::SQRT_2);
    // dagger: b_j† (d_j - w_j); otherwise b_j (d_j + w_j).
    let w_sign = if dagger { -1.0 } else { 1.0 };
    let mut out = SpinorFunction::zero(s.n)?;
    for (&state, f) in &s.components {
        for j in 0..s.n {
            let moved = if dagger { create(state, j) } else { annihilate(state, j) };
            let Some((target, sign)) = moved else {
                continue;
            };
            let factor = prefactor * sign as f64;
            let g = f.map_terms(|r, t| {
                let d = t.kappa[j] + w_sign * sp.grad_w(r, j);
                ExpTerm::new(factor * t.coef * d, t.kappa.clone())
            });
            out.insert(target, g)?;
        }
    }
    Ok(out)
}

/// `Q s`, lowering the grade by one.
pub fn apply_q(s: &SpinorFunction, sp: &Superpotential) -> Result<SpinorFunction> {
    apply_supercharge(s, sp, false)
}

/// `Q† s`, raising the grade by one.
pub fn apply_q_dagger(s: &SpinorFunction, sp: &Superpotential) -> Result<SpinorFunction> {
    apply_supercharge(s, sp, true)
}

/// Grade-`n` block of the super-Hamiltonian: `-Laplacian + shift` on the
/// diagonal and one coupling matrix per particle pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectorHamiltonian {
    pub n: usize,
    pub grade: usize,
    pub c: f64,
    pub shift: f64,
    /// Occupation words of the sector basis, in basis order.
    pub states: Vec<u32>,
    /// `((a, b), Lambda_ab block)` for every pair `a < b`.
    pub couplings: Vec<((usize, usize), Vec<Vec<f64>>)>,
}

impl SectorHamiltonian {
    pub fn coupling(&self, a: usize, b: usize) -> Option<&Vec<Vec<f64>>> {
        let key = if a < b { (a, b) } else { (b, a) };
        self.couplings.iter().find(|(p, _)| *p == key).map(|(_, m)| m)
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn labels(&self) -> Vec<String> {
        self.states.iter().map(|&s| state_label(s, self.n)).collect()
    }
}

pub fn sector_hamiltonian(grade: usize, sp: &Superpotential) -> Result<SectorHamiltonian> {
    let n = sp.n;
    if grade > n {
        return Err(Error::IndexOutOfRange {
            index: grade,
            n: n + 1,
        });
    }
    let basis = FockBasis::new(n)?;
    let mut couplings = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let block = fock::grade_project(&fock::delta_coupling(a, b, n)?, grade)?;
            let scaled = block
                .iter()
                .map(|row| row.iter().map(|v| 2.0 * sp.c * v.re as f64).collect())
                .collect();
            couplings.push(((a, b), scaled));
        }
    }
    Ok(SectorHamiltonian {
        n,
        grade,
        c: sp.c,
        shift: sp.shift(),
        states: basis.grade_states(grade).to_vec(),
        couplings,
    })
}

/// Residuals of a pure-grade spinor as an eigenstate of the super-Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenReport {
    pub grade: usize,
    pub energy: f64,
    pub bulk: f64,
    pub continuity: f64,
    pub jump: f64,
    pub accepted: bool,
}

/// Check `H s = E s`: every term must satisfy `-sum kappa^2 + shift = E`, and
/// every interface the generalized jump condition for its pair's coupling.
pub fn verify_eigenstate(s: &SpinorFunction, e: f64, sp: &Superpotential) -> Result<EigenReport> {
    check_spinor(s, sp)?;
    let grade = s.grade()?.ok_or_else(|| Error::Argument("zero spinor".into()))?;
    let sector = sector_hamiltonian(grade, sp)?;
    let zero = RegionFunction::zero(sp.n)?;
    let fs: Vec<RegionFunction> = sector
        .states
        .iter()
        .map(|st| s.component(*st).cloned().unwrap_or_else(|| zero.clone()))
        .collect();

    let shift = sp.shift();
    let bulk = fs
        .iter()
        .flat_map(|f| f.iter().flat_map(|(_, ts)| ts.iter()))
        .map(|t| (shift - t.laplacian_eigenvalue() - e).norm())
        .fold(0.0, f64::max);

    let mut continuity = 0.0_f64;
    let mut jump = 0.0_f64;
    for iface in enumerate_interfaces(sp.n)? {
        for f in &fs {
            continuity = continuity.max(continuity_residual(f, &iface));
        }
        if continuity > CONTINUITY_TOL {
            return Err(Error::Discontinuous {
                residual: continuity,
            });
        }
        let c = sector.coupling(iface.a, iface.b).expect("all pairs present");
        jump = jump.max(jump_residual(&fs, &iface, c)?);
    }
    Ok(EigenReport {
        grade,
        energy: e,
        bulk,
        continuity,
        jump,
        accepted: bulk < EIGEN_TOL && continuity < EIGEN_TOL && jump < EIGEN_TOL,
    })
}

/// `N`-mer at rest in the fully occupied sector.
pub fn zero_mode_top(sp: &Superpotential) -> Result<SpinorFunction> {
    if sp.n < 2 {
        return Err(Error::Size {
            n: sp.n,
            min: 2,
            max: MAX_PARTICLES,
        });
    }
    SpinorFunction::single((1 << sp.n) - 1, nmer_ground(sp.n, sp.c)?)
}

/// Sign vector over the grade-`(N-1)` basis on which every coupling block
/// acts as `-2c`, normalized to start with `+1`.
pub fn alternating_signs(n: usize) -> Result<Vec<i64>> {
    if !(2..=MAX_PARTICLES).contains(&n) {
        return Err(Error::Size {
            n,
            min: 2,
            max: MAX_PARTICLES,
        });
    }
    let grade = n - 1;
    let blocks: Vec<Vec<Vec<fock::Gauss>>> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .map(|(a, b)| fock::grade_project(&fock::delta_coupling(a, b, n)?, grade))
        .collect::<Result<_>>()?;
    // Each off-diagonal entry u links two states; U v = -v forces
    // v_i = -u v_j along it.
    let mut v = vec![0i64; n];
    v[0] = 1;
    let mut changed = true;
    while changed {
        changed = false;
        for block in &blocks {
            for i in 0..n {
                for j in 0..n {
                    let u = block[i][j].re;
                    if i != j && u != 0 && v[j] != 0 && v[i] == 0 {
                        v[i] = -u * v[j];
                        changed = true;
                    }
                }
            }
        }
    }
    let consistent = v.iter().all(|&x| x != 0)
        && blocks.iter().all(|block| {
            (0..n).all(|i| (0..n).map(|j| block[i][j].re * v[j]).sum::<i64>() == -v[i])
        });
    if !consistent {
        return Err(Error::Argument(format!(
            "no grade-{grade} sign vector is compatible with every coupling"
        )));
    }
    Ok(v)
}

/// `N`-mer at rest times the alternating sign vector in grade `N-1`.
pub fn zero_mode_alternating(sp: &Superpotential) -> Result<SpinorFunction> {
    let signs = alternating_signs(sp.n)?;
    let basis = FockBasis::new(sp.n)?;
    let psi = nmer_ground(sp.n, sp.c)?;
    let mut s = SpinorFunction::zero(sp.n)?;
    for (&state, &sign) in basis.grade_states(sp.n - 1).iter().zip(&signs) {
        s.insert(state, psi.scale(Complex64::new(sign as f64, 0.0)))?;
    }
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistics {
    Bosonic,
    Fermionic,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroModeReport {
    pub name: String,
    pub grade: usize,
    pub statistics: Statistics,
    pub q_residual: f64,
    pub q_dagger_residual: f64,
    pub eigen: EigenReport,
}

impl ZeroModeReport {
    pub fn passed(&self, tol: f64) -> bool {
        self.q_residual < tol && self.q_dagger_residual < tol && self.eigen.accepted
    }
}

pub fn zero_mode_report(name: &str, mode: &SpinorFunction, sp: &Superpotential) -> Result<ZeroModeReport> {
    let grade = mode.grade()?.ok_or_else(|| Error::Argument("zero spinor".into()))?;
    Ok(ZeroModeReport {
        name: name.into(),
        grade,
        statistics: if grade % 2 == 0 {
            Statistics::Bosonic
        } else {
            Statistics::Fermionic
        },
        q_residual: apply_q(mode, sp)?.max_abs_coef(),
        q_dagger_residual: apply_q_dagger(mode, sp)?.max_abs_coef(),
        eigen: verify_eigenstate(mode, 0.0, sp)?,
    })
}

/// Zero-mode count by `K_F` parity over the two constructed modes. Other
/// sectors are not searched, so the counts are lower bounds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WittenCensus {
    pub modes: Vec<ZeroModeReport>,
    pub n_b: usize,
    pub n_f: usize,
    pub index: i64,
    pub lower_bound: bool,
}

pub fn witten_census(sp: &Superpotential) -> Result<WittenCensus> {
    let modes = vec![
        zero_mode_report("top", &zero_mode_top(sp)?, sp)?,
        zero_mode_report("alternating", &zero_mode_alternating(sp)?, sp)?,
    ];
    let n_b = modes.iter().filter(|m| m.statistics == Statistics::Bosonic).count();
    let n_f = modes.len() - n_b;
    Ok(WittenCensus {
        modes,
        n_b,
        n_f,
        index: n_b as i64 - n_f as i64,
        lower_bound: true,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Apply `Q†`.
    Raise,
    /// Apply `Q`.
    Lower,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartnerReport {
    pub direction: Direction,
    pub source: EigenReport,
    /// `None` when the partner vanishes (a supersymmetry singlet).
    pub partner: Option<EigenReport>,
    pub singlet: bool,
}

/// SUSY partner of a verified eigenstate with positive energy `e`.
pub fn susy_partner(
    s: &SpinorFunction,
    e: f64,
    direction: Direction,
    sp: &Superpotential,
) -> Result<(SpinorFunction, PartnerReport)> {
    if e <= ZERO_ENERGY_TOL {
        return Err(Error::Singlet);
    }
    let source = verify_eigenstate(s, e, sp)?;
    if !source.accepted {
        return Err(Error::Argument(format!(
            "source is not an eigenstate at E = {e} (bulk {:e}, jump {:e})",
            source.bulk, source.jump
        )));
    }
    let partner = match direction {
        Direction::Raise => apply_q_dagger(s, sp)?,
        Direction::Lower => apply_q(s, sp)?,
    };
    let report = if partner.max_abs_coef() <= EIGEN_TOL * (1.0 + s.max_abs_coef()) {
        PartnerReport {
            direction,
            source,
            partner: None,
            singlet: true,
        }
    } else {
        PartnerReport {
            direction,
            source,
            partner: Some(verify_eigenstate(&partner, e, sp)?),
            singlet: false,
        }
    };
    Ok((partner, report))
}

/// Worst per-chamber coefficient of `Q Q s` and `Q† Q† s`.
pub fn q_nilpotency_check(s: &SpinorFunction, sp: &Superpotential) -> Result<f64> {
    let qq = apply_q(&apply_q(s, sp)?, sp)?;
    let qdqd = apply_q_dagger(&apply_q_dagger(s, sp)?, sp)?;
    Ok(qq.max_abs_coef().max(qdqd.max_abs_coef()))
}

/// Worst per-chamber coefficient of `{Q, Q†} s / 2 - (-Laplacian + shift) s`.
pub fn anticommutator_bulk_check(s: &SpinorFunction, sp: &Superpotential) -> Result<f64> {
    let qqd = apply_q(&apply_q_dagger(s, sp)?, sp)?;
    let qdq = apply_q_dagger(&apply_q(s, sp)?, sp)?;
    let mut half = qqd;
    for (state, f) in qdq.components() {
        half.insert(state, f.clone())?;
    }
    let half = half.scale(Complex64::new(0.5, 0.0));
    Ok(half.max_diff(&s.bulk_hamiltonian(sp)))
}

/// Random spinor with up to `max_terms` random exponentials per chamber on
/// every Fock basis state (or only on `grade`).
pub fn random_spinor<R: Rng + ?Sized>(
    n: usize,
    grade: Option<usize>,
    max_terms: usize,
    rng: &mut R,
) -> Result<SpinorFunction> {
    let basis = FockBasis::new(n)?;
    let mut s = SpinorFunction::zero(n)?;
    let z = |rng: &mut R| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    for i in 0..basis.dim() {
        if grade.is_some_and(|g| g != basis.grade(i)) {
            continue;
        }
        let f = RegionFunction::from_fn(n, |_| {
            let count = rng.gen_range(1..=max_terms.max(1));
            (0..count)
                .map(|_| ExpTerm::new(z(rng), (0..n).map(|_| z(rng)).collect()))
                .collect()
        })?;
        s.insert(basis.state(i), f)?;
    }
    Ok(s)
}

/// Exchange matrices displayed for `N = 2` (full Fock space) and `N = 3`
/// (grade-2 block); the alternating zero mode is an eigenvector with
/// eigenvalue `-1`.
pub fn exchange_sigma(n: usize) -> Result<Vec<Vec<f64>>> {
    match n {
        2 => Ok(vec![
            vec![1.0, 0.0, 0.0, 0.0],
            vec![0.0, 0.0, 1.0, 0.0],
            vec![0.0, 1.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0, 1.0],
        ]),
        3 => Ok(vec![
            vec![0.0, 0.5, -0.5],
            vec![0.5, 0.0, 0.5],
            vec![-0.5, 0.5, 0.0],
        ]),
        _ => Err(Error::UnsupportedN(n)),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SigmaReport {
    pub n: usize,
    /// Zero-mode amplitudes in the basis the matrix acts on.
    pub vector: Vec<f64>,
    /// `max |Sigma v + v|`.
    pub residual: f64,
}

/// Check that the alternating zero mode is a `-1` eigenvector of the
/// displayed exchange matrix. Amplitudes are read off the identity chamber.
pub fn exchange_sigma_check(sp: &Superpotential) -> Result<SigmaReport> {
    let sigma = exchange_sigma(sp.n)?;
    let mode = zero_mode_alternating(sp)?;
    let basis = FockBasis::new(sp.n)?;
    let states: Vec<u32> = if sp.n == 2 {
        (0..basis.dim()).map(|i| basis.state(i)).collect()
    } else {
        basis.grade_states(2).to_vec()
    };
    let identity = Region::identity(sp.n)?;
    let reference = nmer_ground(sp.n, sp.c)?.terms(&identity)[0].coef;
    let vector: Vec<f64> = states
        .iter()
        .map(|&st| {
            mode.component(st)
                .map(|f| (f.terms(&identity)[0].coef / reference).re)
                .unwrap_or(0.0)
        })
        .collect();
    let residual = sigma
        .iter()
        .zip(&vector)
        .map(|(row, vi)| (row.iter().zip(&vector).map(|(a, b)| a * b).sum::<f64>() + vi).abs())
        .fold(0.0, f64::max);
    Ok(SigmaReport {
        n: sp.n,
        vector,
        residual,
    })
}
