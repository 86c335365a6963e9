use serde::Serialize;
use slly_core::fock::{delta_coupling, grade_project, state_label, FockBasis};

use crate::eigen::{lowest_eigenvalues, SolverOptions};
use crate::error::{Error, Result};
use crate::grid::{check_budget, Grid, GridInfo, MAX_POINTS_N3};
use crate::precond::DirichletPreconditioner;
use crate::sparse::CsrMatrix;

/// Shift of the preconditioner's Laplacian.
const PRECOND_SIGMA: f64 = 1.0;

/// `c^2 N (N^2 - 1) / 12`.
pub fn shift_constant(n: usize, c: f64) -> f64 {
    let n = n as f64;
    c * c * n * (n * n - 1.0) / 12.0
}

fn check_coupling(c: f64) -> Result<()> {
    if c >= 0.0 && c.is_finite() {
        Ok(())
    } else {
        Err(Error::Argument(format!("coupling must be finite and >= 0, got {c}")))
    }
}

pub(crate) fn check_particles(g: &Grid) -> Result<()> {
    match g.n {
        2 => Ok(()),
        3 if g.m <= MAX_POINTS_N3 => Ok(()),
        3 => Err(Error::Argument(format!(
            "three-particle lattices allow at most {MAX_POINTS_N3} points per axis, got {}",
            g.m
        ))),
        n => Err(Error::UnsupportedN(n)),
    }
}

/// `-Laplacian_h` with Dirichlet walls on a grid of any dimension.
pub fn dirichlet_laplacian(g: &Grid) -> Result<CsrMatrix> {
    let (m, n) = (g.m, g.n);
    let inv_h2 = 1.0 / (g.h() * g.h());
    Ok(CsrMatrix::from_rows(g.points(), |idx| {
        let mut row = Vec::with_capacity(2 * n + 1);
        row.push((idx, 2.0 * n as f64 * inv_h2));
        for axis in 0..n {
            let stride = g.stride(axis);
            let i = (idx / stride) % m;
            if i > 0 {
                row.push((idx - stride, -inv_h2));
            }
            if i + 1 < m {
                row.push((idx + stride, -inv_h2));
            }
        }
        row
    }))
}

/// Grade-`grade` sector of the super-Hamiltonian on the grid. Unknowns are
/// ordered block by block over the sector's Fock states.
#[derive(Debug, Clone)]
pub struct SectorMatrix {
    pub grade: usize,
    pub grid: Grid,
    pub c: f64,
    pub shift: f64,
    pub states: Vec<u32>,
    pub matrix: CsrMatrix,
}

impl SectorMatrix {
    pub fn blocks(&self) -> usize {
        self.states.len()
    }

    pub fn labels(&self) -> Vec<String> {
        self.states.iter().map(|&s| state_label(s, self.grid.n)).collect()
    }

    pub fn preconditioner(&self) -> DirichletPreconditioner {
        DirichletPreconditioner::new(self.grid.m, self.grid.n, self.blocks(), self.grid.h(), PRECOND_SIGMA)
    }
}

/// `-Laplacian_h + shift + sum_{a<b} (2c/h) [i_a = i_b] Lambda_ab|_grade`,
/// with `Lambda_ab / (2c)` from the Fock algebra.
pub fn build_sector_matrix(grade: usize, g: &Grid, c: f64, budget: usize) -> Result<SectorMatrix> {
    check_particles(g)?;
    check_coupling(c)?;
    let n = g.n;
    if grade > n {
        return Err(Error::Argument(format!("grade {grade} exceeds N = {n}")));
    }
    let states = FockBasis::new(n)?.grade_states(grade).to_vec();
    let blocks = states.len();
    let p = g.points();
    check_budget(p * blocks, budget)?;

    let mut lambdas = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let block = grade_project(&delta_coupling(a, b, n)?, grade)?;
            let real: Vec<Vec<f64>> = block
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|z| {
                            debug_assert_eq!(z.im, 0);
                            z.re as f64
                        })
                        .collect()
                })
                .collect();
            lambdas.push((a, b, real));
        }
    }

    let h = g.h();
    let shift = shift_constant(n, c);
    let lap = dirichlet_laplacian(g)?;
    let line = 2.0 * c / h;
    let matrix = CsrMatrix::from_rows(p * blocks, |r| {
        let (s, idx) = (r / p, r % p);
        let mut row: Vec<(usize, f64)> = lap.row(idx).map(|(j, v)| (s * p + j, v)).collect();
        row.push((r, shift));
        let mut ix = [0usize; 3];
        g.unflatten(idx, &mut ix[..n]);
        for (a, b, lam) in &lambdas {
            if ix[*a] == ix[*b] {
                for (t, &v) in lam[s].iter().enumerate() {
                    if v != 0.0 {
                        row.push((t * p + idx, line * v));
                    }
                }
            }
        }
        row
    });
    Ok(SectorMatrix {
        grade,
        grid: *g,
        c,
        shift,
        states,
        matrix,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumReport {
    pub grade: usize,
    pub c: f64,
    pub shift: f64,
    pub grid: GridInfo,
    pub eigenvalues: Vec<f64>,
    pub residuals: Vec<f64>,
    pub iterations: usize,
    pub seed: u64,
}

/// Lowest `k` eigenvalues of one sector, preconditioned by the box Laplacian.
pub fn sector_spectrum(
    grade: usize,
    g: &Grid,
    c: f64,
    k: usize,
    opts: &SolverOptions,
    budget: usize,
) -> Result<SpectrumReport> {
    let sector = build_sector_matrix(grade, g, c, budget)?;
    let pre = sector.preconditioner();
    let e = lowest_eigenvalues(&sector.matrix, k, opts, Some(&pre))?;
    Ok(SpectrumReport {
        grade,
        c,
        shift: sector.shift,
        grid: GridInfo::new(g, sector.blocks()),
        eigenvalues: e.values,
        residuals: e.residuals,
        iterations: e.iterations,
        seed: opts.seed,
    })
}
