use std::fmt::Write as _;

use serde::Serialize;
use slly_core::fock::{annihilate, FockBasis};

use crate::eigen::{lowest_eigenvalues, SolverOptions};
use crate::error::{Error, Result};
use crate::grid::{check_budget, Grid, GridInfo};
use crate::precond::DirichletPreconditioner;
use crate::sector::{sector_spectrum, shift_constant, SpectrumReport};
use crate::sparse::CsrMatrix;

const SPECTRUM_EIGS: usize = 6;
pub const POSITIVITY_TOL: f64 = 1e-10;

fn require_two(g: &Grid) -> Result<()> {
    if g.n == 2 {
        Ok(())
    } else {
        Err(Error::UnsupportedN(g.n))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SusySpectrumReport {
    pub grid: GridInfo,
    pub c: f64,
    pub shift: f64,
    /// Allowed negativity, `h + 1/L`.
    pub tol_h: f64,
    /// Continuum free floor `shift + 2 pi^2 / L^2` of the scalar sector.
    pub free_floor: f64,
    pub sectors: Vec<SpectrumReport>,
    pub nonnegative: bool,
    pub scalar_above_shift: bool,
    pub bound_below_scattering: bool,
    pub passed: bool,
}

/// Lowest six eigenvalues of each two-particle sector with the ordering and
/// positivity checks.
pub fn susy_spectrum_check(g: &Grid, c: f64, opts: &SolverOptions, budget: usize) -> Result<SusySpectrumReport> {
    require_two(g)?;
    let sectors = (0..=2)
        .map(|grade| sector_spectrum(grade, g, c, SPECTRUM_EIGS, opts, budget))
        .collect::<Result<Vec<_>>>()?;
    let shift = shift_constant(2, c);
    let tol_h = g.h() + 1.0 / g.l;
    let nonnegative = sectors.iter().all(|s| s.eigenvalues[0] >= -tol_h);
    let scalar_above_shift = sectors[0].eigenvalues[0] >= shift - tol_h;
    let bound_below_scattering = sectors[2].eigenvalues[0] < sectors[0].eigenvalues[0];
    Ok(SusySpectrumReport {
        grid: GridInfo::new(g, 1),
        c,
        shift,
        tol_h,
        free_floor: shift + 2.0 * std::f64::consts::PI.powi(2) / (g.l * g.l),
        nonnegative,
        scalar_above_shift,
        bound_below_scattering,
        passed: nonnegative && scalar_above_shift && (c == 0.0 || bound_below_scattering),
        sectors,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub h: f64,
    pub l: f64,
    pub m: usize,
    pub sector: usize,
    pub eigenvalues: Vec<f64>,
    pub residuals: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub n: usize,
    pub c: f64,
    pub sector: usize,
    pub rows: Vec<ConvergenceRow>,
    /// Ground energies decrease with `h`.
    pub decreasing: bool,
    /// `log(|E_1 - E_2| / |E_2 - E_3|) / log(h_1 / h_2)` on the last three
    /// grids; needs no knowledge of the limit.
    pub observed_order: Option<f64>,
    /// Richardson limit of the ground energy at the observed order.
    pub extrapolated: Option<f64>,
}

impl ConvergenceReport {
    pub fn to_csv(&self) -> String {
        let k = self.rows.iter().map(|r| r.eigenvalues.len()).max().unwrap_or(0);
        let mut out = String::from("h,L,sector");
        for j in 1..=k {
            write!(out, ",lambda_{j}").unwrap();
        }
        for j in 1..=k {
            write!(out, ",residual_{j}").unwrap();
        }
        out.push('\n');
        for r in &self.rows {
            write!(out, "{:.16e},{:.16e},{}", r.h, r.l, r.sector).unwrap();
            for v in r.eigenvalues.iter().chain(&r.residuals) {
                write!(out, ",{v:.16e}").unwrap();
            }
            out.push('\n');
        }
        out
    }
}

/// Ground-state energies of one sector on successively refined grids of a
/// fixed box.
#[allow(clippy::too_many_arguments)]
pub fn convergence_study(
    n: usize,
    sector: usize,
    c: f64,
    l: f64,
    points: &[usize],
    k: usize,
    opts: &SolverOptions,
    budget: usize,
) -> Result<ConvergenceReport> {
    if points.len() < 2 {
        return Err(Error::Argument("a convergence study needs at least two grids".into()));
    }
    let mut rows = Vec::with_capacity(points.len());
    for &m in points {
        let g = Grid::new(l, m, n)?;
        let s = sector_spectrum(sector, &g, c, k, opts, budget)?;
        rows.push(ConvergenceRow {
            h: g.h(),
            l,
            m,
            sector,
            eigenvalues: s.eigenvalues,
            residuals: s.residuals,
        });
    }
    let ground: Vec<f64> = rows.iter().map(|r| r.eigenvalues[0]).collect();
    let decreasing = ground.windows(2).all(|w| w[1] < w[0]);
    let (mut observed_order, mut extrapolated) = (None, None);
    if let [.., a, b, c3] = rows.as_slice() {
        let ratio = (a.eigenvalues[0] - b.eigenvalues[0]) / (b.eigenvalues[0] - c3.eigenvalues[0]);
        let refine = a.h / b.h;
        if ratio > 0.0 && ratio.is_finite() {
            let p = ratio.ln() / refine.ln();
            observed_order = Some(p);
            extrapolated = Some(c3.eigenvalues[0] - (b.eigenvalues[0] - c3.eigenvalues[0]) / (refine.powf(p) - 1.0));
        }
    }
    Ok(ConvergenceReport {
        n,
        c,
        sector,
        rows,
        decreasing,
        observed_order,
        extrapolated,
    })
}

/// Real lattice supercharge `sqrt(2) sum_j b_j (D_j^+ + w_j)` on the full Fock
/// space, blocks ordered as the Fock basis. `D^+` is the forward difference
/// with Dirichlet walls and `w_j = (c/2) sum_k sign(i_j - i_k)`, `sign(0) = 0`.
/// The factor `i` of the continuum operator is a global phase and dropped.
pub fn lattice_q(g: &Grid, c: f64) -> Result<CsrMatrix> {
    let n = g.n;
    let basis = FockBasis::new(n)?;
    let p = g.points();
    let h = g.h();
    let r2 = std::f64::consts::SQRT_2;
    Ok(CsrMatrix::from_rows(p * basis.dim(), |r| {
        let (row_block, idx) = (r / p, r % p);
        let target = basis.state(row_block);
        let mut ix = [0usize; 3];
        g.unflatten(idx, &mut ix[..n]);
        let mut row = Vec::new();
        for j in 0..n {
            if target & (1 << j) != 0 {
                continue;
            }
            let source = target | (1 << j);
            let (_, sign) = annihilate(source, j).expect("mode j is occupied");
            let col = basis.index_of(source) * p;
            let w: f64 = (0..n)
                .filter(|&k| k != j)
                .map(|k| 0.5 * c * (ix[j] as f64 - ix[k] as f64).signum() * f64::from(ix[j] != ix[k]))
                .sum();
            let sgn = sign as f64 * r2;
            row.push((col + idx, sgn * (w - 1.0 / h)));
            if ix[j] + 1 < g.m {
                row.push((col + idx + g.stride(j), sgn / h));
            }
        }
        row
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QDiagnosticReport {
    pub grid: GridInfo,
    pub c: f64,
    pub hamiltonian_asymmetry: f64,
    pub min_eigenvalue: f64,
    pub min_residual: f64,
    pub q_squared_max: f64,
    pub q_squared_frobenius: f64,
    pub q_squared_rows: usize,
    /// Largest `min_{a<b} |i_a - i_b|` over grid points where `Q^2` has a
    /// nonzero row.
    pub q_squared_max_diagonal_distance: Option<usize>,
    pub passed: bool,
}

/// Positivity of `H = (Q Q^T + Q^T Q) / 2` and the structure of `Q^2` for the
/// lattice supercharge of two particles.
pub fn lattice_q_diagnostic(g: &Grid, c: f64, opts: &SolverOptions, budget: usize) -> Result<QDiagnosticReport> {
    require_two(g)?;
    if !(c >= 0.0 && c.is_finite()) {
        return Err(Error::Argument(format!("coupling must be finite and >= 0, got {c}")));
    }
    let blocks = 1 << g.n;
    check_budget(g.points() * blocks, budget)?;
    let q = lattice_q(g, c)?;
    let qt = q.transpose();
    let h = q.mul(&qt)?.add_scaled(1.0, &qt.mul(&q)?)?.scaled(0.5);
    let pre = DirichletPreconditioner::new(g.m, g.n, blocks, g.h(), 1.0);
    let e = lowest_eigenvalues(&h, 1, opts, Some(&pre))?;

    let q2 = q.mul(&q)?;
    let p = g.points();
    let mut ix = [0usize; 2];
    let distance = q2
        .nonzero_rows()
        .map(|r| {
            g.unflatten(r % p, &mut ix);
            ix[0].abs_diff(ix[1])
        })
        .max();
    let asym = h.asymmetry();
    Ok(QDiagnosticReport {
        grid: GridInfo::new(g, blocks),
        c,
        hamiltonian_asymmetry: asym,
        min_eigenvalue: e.values[0],
        min_residual: e.residuals[0],
        q_squared_max: q2.max_abs(),
        q_squared_frobenius: q2.frobenius(),
        q_squared_rows: q2.nonzero_rows().count(),
        q_squared_max_diagonal_distance: distance,
        passed: e.values[0] >= -POSITIVITY_TOL && asym == 0.0 && distance.is_none_or(|d| d <= 1),
    })
}
