use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use slly_core::bethe::{bethe_coefficients, collision_state, phase_shift, s_matrix, yang_baxter_residual};
use slly_core::fock::{
    annihilation, creation, delta_coupling, fermi_number, gamma_matrices, spin_operator, FockOperator,
    Gauss,
};
use slly_core::piecewise::{
    canonicalize_terms, enumerate_interfaces, enumerate_regions, ExpTerm, RegionFunction, Side,
};
use slly_core::susy::{
    anticommutator_bulk_check, apply_q_dagger, q_nilpotency_check, random_spinor, susy_partner, witten_census,
    Direction, SpinorFunction, Superpotential,
};

fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn momentum() -> impl Strategy<Value = f64> {
    -3.0..3.0f64
}

fn coupling() -> impl Strategy<Value = f64> {
    prop_oneof![0.05..4.0f64, -4.0..-0.05f64]
}

fn distinct(k: &[f64]) -> bool {
    k.iter().enumerate().all(|(i, a)| k[i + 1..].iter().all(|b| (a - b).abs() > 1e-3))
}

fn random_function(n: usize, seed: u64) -> RegionFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_spinor(n, Some(0), 3, &mut rng).unwrap().component(0).unwrap().clone()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn s_matrix_is_unimodular_and_inverts_under_exchange(a in momentum(), b in momentum(), c in coupling()) {
        let (ka, kb) = (cx(a, 0.0), cx(b, 0.0));
        let sab = s_matrix(ka, kb, c).unwrap();
        let sba = s_matrix(kb, ka, c).unwrap();
        prop_assert!((sab.norm() - 1.0).abs() < 1e-13);
        prop_assert!((sab * sba - 1.0).norm() < 1e-13);
        prop_assert!((s_matrix(ka, ka, c).unwrap() + 1.0).norm() < 1e-15);
        let theta = phase_shift(b - a, c).unwrap();
        prop_assert!((cx(0.0, theta).exp() - sab).norm() < 1e-12);
    }

    #[test]
    fn yang_baxter_holds(a in momentum(), b in momentum(), d in momentum(), c in coupling()) {
        let r = yang_baxter_residual(cx(a, 0.0), cx(b, 0.0), cx(d, 0.0), c).unwrap();
        prop_assert!(r < 1e-13);
    }

    /// Walk from the identity by random adjacent exchanges, multiplying by the
    /// two-body S factor at every step, and compare with the closed product.
    #[test]
    fn bethe_coefficients_are_path_independent(
        n in 3usize..=5,
        seed in any::<u64>(),
        c in coupling(),
        steps in proptest::collection::vec(0usize..4, 1..40),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k: Vec<Complex64> = (0..n).map(|_| cx(rand::Rng::gen_range(&mut rng, -3.0..3.0), 0.0)).collect();
        let coeffs = bethe_coefficients(&k, c).unwrap();
        let mut p: Vec<usize> = (0..n).collect();
        let mut walked = coeffs.alpha(&p);
        for step in steps {
            let i = step % (n - 1);
            walked *= s_matrix(k[p[i]], k[p[i + 1]], c).unwrap();
            p.swap(i, i + 1);
            let direct = coeffs.alpha(&p);
            prop_assert!((walked - direct).norm() < 1e-12 * (1.0 + direct.norm()));
        }
    }

    #[test]
    fn canonicalize_is_idempotent(seed in any::<u64>(), n in 1usize..=4) {
        let f = random_function(n, seed);
        let once = f.canonicalize();
        prop_assert_eq!(once.canonicalize(), once.clone());
        for (_, ts) in once.iter() {
            prop_assert_eq!(canonicalize_terms(ts.to_vec()), ts.to_vec());
        }
    }

    #[test]
    fn chamber_derivatives_commute(seed in any::<u64>(), n in 2usize..=4, i in 0usize..4, j in 0usize..4) {
        let (i, j) = (i % n, j % n);
        let f = random_function(n, seed);
        let ij = f.differentiate(i).unwrap().differentiate(j).unwrap();
        let ji = f.differentiate(j).unwrap().differentiate(i).unwrap();
        prop_assert!(ij.max_diff(&ji) < 1e-12);
    }

    #[test]
    fn restriction_is_linear(s1 in any::<u64>(), s2 in any::<u64>(), n in 2usize..=4, re in -2.0..2.0f64, im in -2.0..2.0f64) {
        let (f, g) = (random_function(n, s1), random_function(n, s2));
        let z = cx(re, im);
        let combo = &f + &(&g * z);
        for iface in enumerate_interfaces(n).unwrap() {
            for side in [Side::Left, Side::Right] {
                let lhs = combo.restrict_to_interface(&iface, side);
                let a = f.restrict_to_interface(&iface, side);
                let b = g.restrict_to_interface(&iface, side);
                let mut terms = a.terms.clone();
                terms.extend(b.terms.iter().map(|t| ExpTerm::new(t.coef * z, t.kappa.clone())));
                let rhs = slly_core::piecewise::ExpSum::new(a.dim, terms);
                prop_assert!(lhs.max_diff(&rhs) < 1e-12);
            }
        }
    }

    #[test]
    fn superpotential_square_is_chamber_independent(n in 1usize..=8, c in 0.1..3.0f64) {
        let sp = Superpotential::new(n, c).unwrap();
        let regions = enumerate_regions(n).unwrap();
        let expected = c * c * (n * (n * n - 1)) as f64 / 12.0;
        for r in regions.iter().step_by(regions.len().div_ceil(64)) {
            let sum: f64 = (0..n).map(|j| sp.grad_w(r, j).powi(2)).sum();
            prop_assert!((sum - expected).abs() < 1e-10 * (1.0 + expected));
        }
        prop_assert!((sp.shift() - expected).abs() < 1e-12 * (1.0 + expected));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn supercharge_algebra_on_random_spinors(n in 2usize..=4, c in 0.1..3.0f64, seed in any::<u64>()) {
        let sp = Superpotential::new(n, c).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_spinor(n, None, 2, &mut rng).unwrap();
        let scale = 1.0 + s.max_abs_coef();
        prop_assert!(q_nilpotency_check(&s, &sp).unwrap() < 1e-12 * scale);
        prop_assert!(anticommutator_bulk_check(&s, &sp).unwrap() < 1e-11 * scale);
    }

    #[test]
    fn partners_keep_the_energy(n in 2usize..=3, c in 0.2..3.0f64, k in proptest::collection::vec(momentum(), 3)) {
        let mut k: Vec<f64> = k[..n].to_vec();
        prop_assume!(distinct(&k));
        k.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let sp = Superpotential::new(n, c).unwrap();
        let psi = SpinorFunction::single(0, collision_state(&k, c).unwrap()).unwrap();
        let e = k.iter().map(|x| x * x).sum::<f64>() + sp.shift();
        let (raised, report) = susy_partner(&psi, e, Direction::Raise, &sp).unwrap();
        prop_assert!(report.source.accepted);
        let partner = report.partner.unwrap();
        prop_assert!(partner.accepted, "{:?}", partner);
        prop_assert_eq!(partner.grade, 1);
        // and back down: Q Q† psi = 2 E psi on an eigenstate
        let (lowered, back) = susy_partner(&raised, e, Direction::Lower, &sp).unwrap();
        prop_assert!(back.partner.unwrap().accepted);
        prop_assert!(lowered.max_diff(&psi.scale(cx(2.0 * e, 0.0))) < 1e-9 * (1.0 + e) * psi.max_abs_coef().max(1.0));
    }
}

#[test]
fn zero_modes_and_census_up_to_five() {
    for n in 2..=5 {
        let sp = Superpotential::new(n, 1.3).unwrap();
        let census = witten_census(&sp).unwrap();
        assert_eq!((census.n_b, census.n_f, census.index), (1, 1, 0), "N = {n}");
        for m in &census.modes {
            assert!(m.passed(1e-12), "N = {n}: {m:?}");
        }
    }
}

#[test]
fn raising_grade_zero_state_lands_in_grade_one() {
    let sp = Superpotential::new(3, 0.8).unwrap();
    let psi = SpinorFunction::single(0, collision_state(&[1.0, 0.2, -0.7], 0.8).unwrap()).unwrap();
    assert_eq!(apply_q_dagger(&psi, &sp).unwrap().grade().unwrap(), Some(1));
}

// exact operator identities

fn scalar(n: usize, v: i64) -> FockOperator {
    FockOperator::identity(n).unwrap().scale(Gauss::new(v, 0))
}

#[test]
fn canonical_anticommutation_is_exact() {
    for n in 1..=8 {
        let b: Vec<_> = (0..n).map(|j| annihilation(j, n).unwrap()).collect();
        let bd: Vec<_> = (0..n).map(|j| creation(j, n).unwrap()).collect();
        for i in 0..n {
            for j in 0..n {
                assert!(b[i].anticommutator(&b[j]).is_zero());
                assert!(bd[i].anticommutator(&bd[j]).is_zero());
                let expected = if i == j { scalar(n, 1) } else { FockOperator::zero(n).unwrap() };
                assert_eq!(b[i].anticommutator(&bd[j]), expected, "N = {n}, ({i}, {j})");
            }
        }
    }
}

#[test]
fn clifford_relations_are_exact() {
    for n in 1..=8 {
        let g = gamma_matrices(n).unwrap();
        assert_eq!(g.len(), 2 * n);
        for mu in 0..2 * n {
            assert!(g[mu].is_hermitian());
            for nu in 0..2 * n {
                let expected = if mu == nu { scalar(n, 2) } else { FockOperator::zero(n).unwrap() };
                assert_eq!(g[mu].anticommutator(&g[nu]), expected);
            }
        }
    }
}

/// `[S_ij, S_kl] = -i (d_jk S_il - d_ik S_jl - d_jl S_ik + d_il S_jk)` with
/// `S_kk = 0`.
#[test]
fn so_n_brackets_are_exact() {
    for n in 2..=8 {
        let s = |a: usize, b: usize| {
            if a == b {
                FockOperator::zero(n).unwrap()
            } else {
                spin_operator(a, b, n).unwrap()
            }
        };
        let d = |a: usize, b: usize| i64::from(a == b);
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        for &(i, j) in &pairs {
            for &(k, l) in &pairs {
                let lhs = s(i, j).commutator(&s(k, l));
                let sum = [
                    (d(j, k), s(i, l)),
                    (-d(i, k), s(j, l)),
                    (-d(j, l), s(i, k)),
                    (d(i, l), s(j, k)),
                ]
                .into_iter()
                .fold(FockOperator::zero(n).unwrap(), |acc, (w, op)| &acc + &op.scale(Gauss::new(w, 0)));
                assert_eq!(lhs, sum.scale(Gauss::new(0, -1)), "N = {n}: [S{i}{j}, S{k}{l}]");
            }
        }
    }
}

#[test]
fn delta_coupling_is_a_graded_reflection() {
    for n in 2..=8 {
        let nf = fermi_number(n).unwrap();
        for a in 0..n {
            for b in a + 1..n {
                let lam = delta_coupling(a, b, n).unwrap();
                assert!(lam.is_hermitian());
                assert_eq!(&lam * &lam, scalar(n, 1));
                assert!(lam.commutator(&nf).is_zero());
                let trace: Gauss = (0..lam.dim()).map(|i| lam.get(i, i)).sum();
                // eigenvalues +-1, each with half the space
                assert_eq!(trace, Gauss::new(0, 0));
            }
        }
    }
}
