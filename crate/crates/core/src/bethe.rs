//! Exact eigenstates of the delta-interacting Bose gas on the line:
//! Bethe-ansatz collision states, the bound-state string families, and the
//! two-body S-matrix they are assembled from.
//!
//! On the chamber `Q` (particles ordered `x_{Q_1} < ... < x_{Q_N}`) a Bethe
//! state is `sum_P alpha(P) exp(i sum_m k_{P_m} x_{Q_m})`.

use itertools::Itertools;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::piecewise::{
    enumerate_interfaces, jump_residual, lex_index, continuity_residual, ExpTerm, RegionFunction,
    MAX_PARTICLES,
};

/// `S` has a pole (or the string coefficient a zero) below this.
pub const POLE_TOL: f64 = 1e-14;
/// Energies with a larger imaginary part are not physical.
pub const REALITY_TOL: f64 = 1e-12;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn c64(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn s_parts(ki: Complex64, kj: Complex64, c: f64) -> (Complex64, Complex64) {
    let d = I * (kj - ki);
    (d - c, d + c)
}

fn pole_scale(ki: Complex64, kj: Complex64, c: f64) -> f64 {
    POLE_TOL * (1.0 + c.abs() + ki.norm() + kj.norm())
}

/// Two-body scattering amplitude `S(k_i, k_j) = [i(k_j - k_i) - c] / [i(k_j - k_i) + c]`.
pub fn s_matrix(ki: Complex64, kj: Complex64, c: f64) -> Result<Complex64> {
    let (num, den) = s_parts(ki, kj, c);
    if den.norm() <= pole_scale(ki, kj, c) {
        return Err(Error::Singularity {
            ki: ki.to_string(),
            kj: kj.to_string(),
        });
    }
    Ok(num / den)
}

/// `theta(k) = pi - 2 atan(k / c)`, so that `exp(i theta(k_j - k_i)) = S(k_i, k_j)`.
pub fn phase_shift(k: f64, c: f64) -> Result<f64> {
    if c == 0.0 {
        return Err(Error::Argument("phase shift needs c != 0".into()));
    }
    Ok(std::f64::consts::PI - 2.0 * (k / c).atan())
}

/// `|S(a,b) S(a,c) S(b,c) - S(b,c) S(a,c) S(a,b)|`.
pub fn yang_baxter_residual(ka: Complex64, kb: Complex64, kc: Complex64, c: f64) -> Result<f64> {
    let sab = s_matrix(ka, kb, c)?;
    let sac = s_matrix(ka, kc, c)?;
    let sbc = s_matrix(kb, kc, c)?;
    Ok((sab * sac * sbc - sbc * sac * sab).norm())
}

/// Bethe coefficients for every momentum permutation `P`.
#[derive(Debug, Clone, PartialEq)]
pub struct BetheCoefficients {
    k: Vec<Complex64>,
    c: f64,
    // Indexed by lexicographic rank of P.
    alpha: Vec<Complex64>,
}

impl BetheCoefficients {
    pub fn n(&self) -> usize {
        self.k.len()
    }

    pub fn momenta(&self) -> &[Complex64] {
        &self.k
    }

    pub fn coupling(&self) -> f64 {
        self.c
    }

    /// `alpha(P)` with `P` zero-based.
    pub fn alpha(&self, p: &[usize]) -> Complex64 {
        self.alpha[lex_index(p)]
    }

    /// All `(P, alpha(P))` in lexicographic order of `P`.
    pub fn iter(&self) -> impl Iterator<Item = (Vec<usize>, Complex64)> + '_ {
        (0..self.n()).permutations(self.n()).zip(self.alpha.iter().copied())
    }
}

fn check_count(n: usize) -> Result<()> {
    if (1..=MAX_PARTICLES).contains(&n) {
        Ok(())
    } else {
        Err(Error::Size {
            n,
            min: 1,
            max: MAX_PARTICLES,
        })
    }
}

/// `alpha(P) = alpha(I) * prod_{inversions j<l, P_j > P_l} S(k_{P_l}, k_{P_j})`
/// with `alpha(I) = prod_{j<l} S(k_j, k_l)`.
///
/// Each adjacent exchange `P_i P_{i+1} -> P_{i+1} P_i` then multiplies the
/// coefficient by `S(k_{P_i}, k_{P_{i+1}})`, which is the two-body matching
/// relation.
pub fn bethe_coefficients(k: &[Complex64], c: f64) -> Result<BetheCoefficients> {
    let n = k.len();
    check_count(n)?;
    let mut s = vec![vec![Complex64::new(1.0, 0.0); n]; n];
    for a in 0..n {
        for b in 0..n {
            if a != b {
                s[a][b] = s_matrix(k[a], k[b], c)?;
            }
        }
    }
    let identity: Complex64 = (0..n).tuple_combinations().map(|(a, b)| s[a][b]).product();
    let alpha = (0..n)
        .permutations(n)
        .map(|p| {
            let mut value = identity;
            for (j, l) in (0..n).tuple_combinations() {
                if p[j] > p[l] {
                    value *= s[p[l]][p[j]];
                }
            }
            value
        })
        .collect();
    Ok(BetheCoefficients {
        k: k.to_vec(),
        c,
        alpha,
    })
}

/// Assemble `sum_P alpha(P) exp(i sum_m k_{P_m} x_{Q_m})` on every chamber
/// from a list of `(P, alpha(P))`.
fn assemble(k: &[Complex64], coefficients: &[(Vec<usize>, Complex64)]) -> Result<RegionFunction> {
    let n = k.len();
    RegionFunction::from_fn(n, |region| {
        let q = region.order();
        coefficients
            .iter()
            .map(|(p, alpha)| {
                let mut kappa = vec![Complex64::new(0.0, 0.0); n];
                for m in 0..n {
                    kappa[q[m]] = I * k[p[m]];
                }
                ExpTerm::new(*alpha, kappa)
            })
            .collect()
    })
}

fn check_decreasing(k: &[f64]) -> Result<()> {
    if let Some(bad) = k.iter().find(|x| !x.is_finite()) {
        return Err(Error::Argument(format!("momentum {bad} is not finite")));
    }
    if k.windows(2).any(|w| w[0] <= w[1]) {
        return Err(Error::Argument(
            "collision momenta must be strictly decreasing".into(),
        ));
    }
    Ok(())
}

/// Scattering eigenstate for real, strictly decreasing momenta. With `c < 0`
/// the same construction solves the attractive problem.
pub fn collision_state(k: &[f64], c: f64) -> Result<RegionFunction> {
    check_count(k.len())?;
    check_decreasing(k)?;
    if c == 0.0 {
        return Err(Error::Argument("collision states need c != 0".into()));
    }
    let kc: Vec<Complex64> = k.iter().map(|&x| c64(x)).collect();
    let coefficients = bethe_coefficients(&kc, c)?;
    assemble(&kc, &coefficients.iter().collect::<Vec<_>>())
}

/// Coefficients of a bound state from string momenta.
///
/// Some `S` factors are poles on a string. Perturbing the string and keeping
/// the most singular permutations leaves, for each surviving `P`, the product
/// of the pole numerators, the inverse denominators of vanishing factors and
/// the finite factors. The result is scaled so the first surviving `P` has
/// coefficient 1.
pub fn string_coefficients(k: &[Complex64], c: f64) -> Result<Vec<(Vec<usize>, Complex64)>> {
    let n = k.len();
    check_count(n)?;
    let mut surviving: Vec<(Vec<usize>, Complex64)> = Vec::new();
    let mut best_order = i32::MIN;
    for p in (0..n).permutations(n) {
        let mut order = 0;
        let mut coef = Complex64::new(1.0, 0.0);
        for (j, l) in (0..n).tuple_combinations() {
            if p[j] < p[l] {
                continue;
            }
            let (a, b) = (k[p[l]], k[p[j]]);
            let (num, den) = s_parts(a, b, c);
            let tol = pole_scale(a, b, c);
            if den.norm() <= tol {
                order += 1;
                coef *= num;
            } else if num.norm() <= tol {
                order -= 1;
                coef /= den;
            } else {
                coef *= num / den;
            }
        }
        if order > best_order {
            best_order = order;
            surviving.clear();
        }
        if order == best_order {
            surviving.push((p, coef));
        }
    }
    let scale = surviving[0].1;
    if scale.norm() <= POLE_TOL {
        return Err(Error::DegenerateString(scale.norm()));
    }
    Ok(surviving.into_iter().map(|(p, a)| (p, a / scale)).collect())
}

/// Bound state of an arbitrary conjugation-closed string of momenta.
pub fn string_state(k: &[Complex64], c: f64) -> Result<RegionFunction> {
    energy(k)?;
    let coefficients = string_coefficients(k, c)?;
    assemble(k, &coefficients)
}

fn require_attractive(c: f64) -> Result<()> {
    if c < 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("bound states need c < 0, got {c}")))
    }
}

pub fn dimer_momenta(p: f64, c: f64) -> [Complex64; 2] {
    let g = c.abs();
    [Complex64::new(p, g / 2.0), Complex64::new(p, -g / 2.0)]
}

pub fn trimer_momenta(p: f64, c: f64) -> [Complex64; 3] {
    let g = c.abs();
    [Complex64::new(p, g), c64(p), Complex64::new(p, -g)]
}

pub fn monomer_dimer_momenta(p: f64, q: f64, c: f64) -> [Complex64; 3] {
    let [k1, k2] = dimer_momenta(p, c);
    [k1, k2, c64(q)]
}

/// `exp(2iPX) exp(-(|c|/2)|x_1 - x_2|)`, energy `2P^2 - c^2/2`.
pub fn dimer_state(p: f64, c: f64) -> Result<RegionFunction> {
    require_attractive(c)?;
    string_state(&dimer_momenta(p, c), c)
}

/// `exp(3iPX) exp(-(|c|/2) sum_{a<b} |x_a - x_b|)`, energy `3P^2 - 2c^2`.
pub fn trimer_state(p: f64, c: f64) -> Result<RegionFunction> {
    require_attractive(c)?;
    string_state(&trimer_momenta(p, c), c)
}

/// Dimer of momentum `2P` scattering off a monomer of momentum `Q`, energy
/// `Q^2 + 2P^2 - c^2/2`.
pub fn monomer_dimer_state(p: f64, q: f64, c: f64) -> Result<RegionFunction> {
    require_attractive(c)?;
    if p == q {
        return Err(Error::DegenerateString(0.0));
    }
    string_state(&monomer_dimer_momenta(p, q, c), c)
}

/// `exp(-(|c|/2) sum_{a<b} |x_a - x_b|)`: one real exponential per chamber.
pub fn nmer_ground(n: usize, c: f64) -> Result<RegionFunction> {
    check_count(n)?;
    let g = c.abs();
    RegionFunction::from_fn(n, |region| {
        let kappa = (0..n)
            .map(|j| c64(-(g / 2.0) * (2.0 * region.rank(j) as f64 - n as f64 + 1.0)))
            .collect();
        vec![ExpTerm::new(c64(1.0), kappa)]
    })
}

/// `sum_j k_j^n`.
pub fn conserved_charge(power: u32, k: &[Complex64]) -> Complex64 {
    k.iter().map(|kj| kj.powu(power)).sum()
}

/// `sum_j k_j^2`, rejected when not real.
pub fn energy(k: &[Complex64]) -> Result<f64> {
    let e = conserved_charge(2, k);
    if e.im.abs() > REALITY_TOL * (1.0 + e.re.abs()) {
        return Err(Error::StringValidity(e.im));
    }
    Ok(e.re)
}

/// Worst `|-sum_j kappa_j^2 - E|` over all terms of all chambers.
pub fn bulk_residual(f: &RegionFunction, e: f64) -> f64 {
    f.iter()
        .flat_map(|(_, ts)| ts.iter())
        .map(|t| (-t.laplacian_eigenvalue() - e).norm())
        .fold(0.0, f64::max)
}

/// Residuals of a scalar eigenstate of `-Laplacian + 2c sum delta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateResiduals {
    pub bulk: f64,
    pub continuity: f64,
    pub jump: f64,
}

impl StateResiduals {
    pub fn max(&self) -> f64 {
        self.bulk.max(self.continuity).max(self.jump)
    }
}

/// Bulk, continuity and jump residuals of `f` as an eigenstate with energy `e`
/// for coupling `c`. A discontinuous state reports its continuity residual and
/// an infinite jump residual.
pub fn check_state(f: &RegionFunction, e: f64, c: f64) -> Result<StateResiduals> {
    let coupling = [vec![2.0 * c]];
    let mut continuity = 0.0_f64;
    let mut jump = 0.0_f64;
    for iface in enumerate_interfaces(f.n())? {
        continuity = continuity.max(continuity_residual(f, &iface));
        match jump_residual(std::slice::from_ref(f), &iface, &coupling) {
            Ok(r) => jump = jump.max(r),
            Err(Error::Discontinuous { .. }) => jump = f64::INFINITY,
            Err(e) => return Err(e),
        }
    }
    Ok(StateResiduals {
        bulk: bulk_residual(f, e),
        continuity,
        jump,
    })
}
