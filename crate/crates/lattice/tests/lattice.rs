use proptest::prelude::*;
use slly_lattice::check::{convergence_study, lattice_q, lattice_q_diagnostic, susy_spectrum_check};
use slly_lattice::eigen::{lowest_eigenvalues, SolverOptions};
use slly_lattice::grid::{Grid, DEFAULT_BUDGET};
use slly_lattice::sector::{build_sector_matrix, dirichlet_laplacian, sector_spectrum, shift_constant};
use slly_lattice::precond::DirichletPreconditioner;
use std::f64::consts::PI;

fn opts() -> SolverOptions {
    SolverOptions::default()
}

/// Infinite-lattice two-body bound state at zero total momentum:
/// `sinh(kappa h) = c h / 2`, `E = shift - (4/h^2)(cosh(kappa h) - 1)`.
fn lattice_dimer(c: f64, h: f64) -> f64 {
    shift_constant(2, c) - 4.0 / (h * h) * ((1.0 + 0.25 * c * c * h * h).sqrt() - 1.0)
}

#[test]
fn one_dimensional_dirichlet_ground_state() {
    let g = Grid::new(1.0, 199, 1).unwrap();
    let a = dirichlet_laplacian(&g).unwrap();
    let e = lowest_eigenvalues(&a, 1, &opts(), None).unwrap();
    assert!((e.values[0] / (PI * PI) - 1.0).abs() < 1e-3);
    assert!(e.residuals[0] < 1e-8);
}

#[test]
fn preconditioning_agrees_and_saves_iterations() {
    let g = Grid::new(1.0, 400, 1).unwrap();
    let a = dirichlet_laplacian(&g).unwrap();
    let plain = lowest_eigenvalues(&a, 2, &opts(), None).unwrap();
    let pre = DirichletPreconditioner::new(400, 1, 1, g.h(), 1.0);
    let fast = lowest_eigenvalues(&a, 2, &opts(), Some(&pre)).unwrap();
    for j in 0..2 {
        assert!((fast.values[j] - plain.values[j]).abs() < 1e-8);
    }
    assert!(fast.iterations < plain.iterations, "{} vs {}", fast.iterations, plain.iterations);
}

#[test]
fn free_scalar_sector_approaches_the_box_floor() {
    let c = 1e-6;
    let exact = 2.0 * PI * PI + shift_constant(2, c);
    let errors: Vec<f64> = [31, 63]
        .iter()
        .map(|&m| {
            let s = sector_spectrum(0, &Grid::new(1.0, m, 2).unwrap(), c, 1, &opts(), DEFAULT_BUDGET).unwrap();
            (s.eigenvalues[0] - exact).abs()
        })
        .collect();
    assert!(errors[1] < 0.3 * errors[0], "{errors:?}");
    assert!(errors[1] / exact < 1e-3);
}

#[test]
fn free_sectors_share_one_spectrum() {
    let g = Grid::new(3.0, 20, 2).unwrap();
    let s0 = sector_spectrum(0, &g, 0.0, 3, &opts(), DEFAULT_BUDGET).unwrap();
    let s1 = sector_spectrum(1, &g, 0.0, 6, &opts(), DEFAULT_BUDGET).unwrap();
    let s2 = sector_spectrum(2, &g, 0.0, 3, &opts(), DEFAULT_BUDGET).unwrap();
    for j in 0..3 {
        assert!((s0.eigenvalues[j] - s2.eigenvalues[j]).abs() < 1e-9);
        assert!((s1.eigenvalues[2 * j] - s0.eigenvalues[j]).abs() < 1e-9);
        assert!((s1.eigenvalues[2 * j + 1] - s0.eigenvalues[j]).abs() < 1e-9);
    }
}

#[test]
fn refinement_gain_matches_the_lattice_dimer() {
    let (c, l) = (2.0, 24.0);
    let study = convergence_study(2, 2, c, l, &[119, 239], 1, &opts(), DEFAULT_BUDGET).unwrap();
    let gain = study.rows[0].eigenvalues[0] - study.rows[1].eigenvalues[0];
    let oracle = lattice_dimer(c, study.rows[0].h) - lattice_dimer(c, study.rows[1].h);
    assert!((gain / oracle - 1.0).abs() < 0.02, "{gain} vs {oracle}");
    assert!(study.decreasing);
    assert!(study.observed_order.is_none());
}

#[test]
fn spectrum_ordering_on_a_moderate_box() {
    let g = Grid::new(12.0, 80, 2).unwrap();
    let r = susy_spectrum_check(&g, 2.0, &opts(), DEFAULT_BUDGET).unwrap();
    assert!(r.passed, "{r:?}");
    assert!(r.bound_below_scattering);
    for s in &r.sectors {
        assert!(s.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        assert!(s.residuals.iter().all(|&x| x < 1e-8));
    }
    // the scalar sector sits above the free floor: repulsion only raises it
    assert!(r.sectors[0].eigenvalues[0] > r.free_floor - r.tol_h);
}

#[test]
fn bound_sector_ground_falls_as_the_box_grows() {
    let ground: Vec<f64> = [8.0, 12.0, 16.0]
        .iter()
        .map(|&l| {
            let m = (10.0 * l) as usize - 1;
            let g = Grid::new(l, m, 2).unwrap();
            sector_spectrum(2, &g, 2.0, 1, &opts(), DEFAULT_BUDGET).unwrap().eigenvalues[0]
        })
        .collect();
    assert!(ground.windows(2).all(|w| w[1] < w[0]), "{ground:?}");
}

#[test]
fn reports_are_reproducible() {
    let g = Grid::new(6.0, 40, 2).unwrap();
    let a = sector_spectrum(1, &g, 1.0, 4, &opts(), DEFAULT_BUDGET).unwrap();
    let b = sector_spectrum(1, &g, 1.0, 4, &opts(), DEFAULT_BUDGET).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}

#[test]
fn three_particle_sectors_are_bounded_below_by_zero() {
    let g = Grid::new(6.0, 16, 3).unwrap();
    for grade in 0..=3 {
        let s = sector_spectrum(grade, &g, 1.0, 2, &opts(), DEFAULT_BUDGET).unwrap();
        assert!(s.eigenvalues[0] > 0.0, "grade {grade}: {:?}", s.eigenvalues);
        assert!(s.residuals.iter().all(|&x| x < 1e-8));
    }
}

#[test]
fn lattice_supercharge_diagnostic() {
    let g = Grid::new(6.0, 20, 2).unwrap();
    let free = lattice_q_diagnostic(&g, 0.0, &opts(), DEFAULT_BUDGET).unwrap();
    assert_eq!(free.q_squared_max, 0.0);
    assert_eq!(free.q_squared_rows, 0);
    let r = lattice_q_diagnostic(&g, 2.0, &opts(), DEFAULT_BUDGET).unwrap();
    assert!(r.passed, "{r:?}");
    assert!(r.min_eigenvalue >= -1e-10);
    assert!(r.q_squared_rows > 0);
    assert!(r.q_squared_max_diagonal_distance.unwrap() <= 1);
    assert!(lattice_q_diagnostic(&Grid::new(6.0, 20, 3).unwrap(), 2.0, &opts(), DEFAULT_BUDGET).is_err());
}

fn half_anticommutator(g: &Grid, c: f64) -> slly_lattice::sparse::CsrMatrix {
    let q = lattice_q(g, c).unwrap();
    let qt = q.transpose();
    q.mul(&qt).unwrap().add_scaled(1.0, &qt.mul(&q).unwrap()).unwrap().scaled(0.5)
}

/// Without the superpotential, `(Q Q^T + Q^T Q)/2` is the five-point
/// Laplacian on every Fock block away from the walls.
#[test]
fn free_lattice_supercharge_squares_to_the_laplacian() {
    let g = Grid::new(5.0, 18, 2).unwrap();
    let h = half_anticommutator(&g, 0.0);
    let lap = dirichlet_laplacian(&g).unwrap();
    let p = g.points();
    for block in 0..4 {
        for i in 1..g.m - 1 {
            for j in 1..g.m - 1 {
                let idx = i + g.m * j;
                let r = block * p + idx;
                let mut row: Vec<(usize, f64)> = h.row(r).collect();
                let mut want: Vec<(usize, f64)> = lap.row(idx).map(|(k, v)| (block * p + k, v)).collect();
                row.sort_by_key(|e| e.0);
                want.sort_by_key(|e| e.0);
                assert_eq!(row.len(), want.len());
                for (x, y) in row.iter().zip(&want) {
                    assert_eq!(x.0, y.0);
                    assert!((x.1 - y.1).abs() < 1e-9 * y.1.abs().max(1.0));
                }
            }
        }
    }
}

#[test]
fn lattice_super_hamiltonian_preserves_fermion_number() {
    let g = Grid::new(5.0, 18, 2).unwrap();
    let h = half_anticommutator(&g, 1.5);
    let p = g.points();
    // blocks in Fock order: |0>, |1_1>, |1_2>, |1_2 1_1>
    let grade = |r: usize| [0, 1, 1, 2][r / p];
    for r in 0..h.dim() {
        for (col, _) in h.row(r) {
            assert_eq!(grade(r), grade(col));
        }
    }
}

#[test]
fn convergence_table_columns() {
    let study = convergence_study(2, 0, 1.0, 4.0, &[16, 33, 67], 2, &opts(), DEFAULT_BUDGET).unwrap();
    let csv = study.to_csv();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "h,L,sector,lambda_1,lambda_2,residual_1,residual_2");
    assert_eq!(lines.count(), 3);
    assert!(study.observed_order.is_some());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn sector_matrices_are_exactly_symmetric(n in 2usize..=3, grade in 0usize..=3, m in 16usize..22, c in 0.0..3.0f64) {
        prop_assume!(grade <= n);
        let g = Grid::new(2.0 + c, m, n).unwrap();
        let s = build_sector_matrix(grade, &g, c, DEFAULT_BUDGET).unwrap();
        prop_assert_eq!(s.matrix.asymmetry(), 0.0);
        prop_assert_eq!(s.matrix.dim(), g.points() * s.blocks());
    }
}
