//! Fermionic Fock space of `N` modes with exact Gaussian-integer operators.
//!
//! The basis vector for the occupied set `j_n > ... > j_1` is
//! `b†_{j_n} ... b†_{j_1} |0>`. Basis order is by grade, then lexicographic in
//! the descending index list, e.g. for `N = 3`, grade 2:
//! `{2,1}, {3,1}, {3,2}` (one-based). With this convention `b_j` picks up a
//! sign `(-1)^(number of occupied modes above j)`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;

use crate::error::{Error, Result};

/// Exact matrix entries.
pub type Gauss = Complex<i64>;

pub const MAX_MODES: usize = 12;

const ONE: Gauss = Complex::new(1, 0);
const I: Gauss = Complex::new(0, 1);

fn check_modes(n: usize) -> Result<()> {
    if (1..=MAX_MODES).contains(&n) {
        Ok(())
    } else {
        Err(Error::Size {
            n,
            min: 1,
            max: MAX_MODES,
        })
    }
}

fn check_mode(j: usize, n: usize) -> Result<()> {
    if j < n {
        Ok(())
    } else {
        Err(Error::IndexOutOfRange { index: j, n })
    }
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Remove mode `j` from `state`, with the fermionic sign.
pub fn annihilate(state: u32, j: usize) -> Option<(u32, i64)> {
    if state & (1 << j) == 0 {
        return None;
    }
    Some((state ^ (1 << j), sign_above(state, j)))
}

/// Add mode `j` to `state`, with the fermionic sign.
pub fn create(state: u32, j: usize) -> Option<(u32, i64)> {
    if state & (1 << j) != 0 {
        return None;
    }
    Some((state | (1 << j), sign_above(state, j)))
}

fn sign_above(state: u32, j: usize) -> i64 {
    if (state >> (j + 1)).count_ones().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Descending list of occupied modes, the intra-grade sort key.
fn descending(state: u32, n: usize) -> Vec<usize> {
    (0..n).rev().filter(|&j| state & (1 << j) != 0).collect()
}

/// The fixed graded basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FockBasis {
    n: usize,
    states: Vec<u32>,
    position: Vec<usize>,
}

impl FockBasis {
    pub fn new(n: usize) -> Result<Self> {
        check_modes(n)?;
        let mut states: Vec<u32> = (0..1u32 << n).collect();
        states.sort_by_key(|&s| (s.count_ones(), descending(s, n)));
        let mut position = vec![0; states.len()];
        for (i, &s) in states.iter().enumerate() {
            position[s as usize] = i;
        }
        Ok(Self {
            n,
            states,
            position,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    /// Occupation bit word of the `i`-th basis vector.
    pub fn state(&self, i: usize) -> u32 {
        self.states[i]
    }

    pub fn index_of(&self, state: u32) -> usize {
        self.position[state as usize]
    }

    pub fn grade(&self, i: usize) -> usize {
        self.states[i].count_ones() as usize
    }

    /// Basis indices of grade `g`, in order.
    pub fn grade_range(&self, g: usize) -> std::ops::Range<usize> {
        let start: usize = (0..g).map(|k| binomial(self.n, k)).sum();
        start..start + binomial(self.n, g)
    }

    /// Occupation words of grade `g`, in basis order.
    pub fn grade_states(&self, g: usize) -> &[u32] {
        &self.states[self.grade_range(g)]
    }

    /// One-based ket label such as `|1_3 1_1>` or `|0>`.
    pub fn label(&self, i: usize) -> String {
        state_label(self.states[i], self.n)
    }
}

pub fn state_label(state: u32, n: usize) -> String {
    if state == 0 {
        return "|0>".into();
    }
    let modes: Vec<String> = descending(state, n)
        .iter()
        .map(|j| format!("1_{}", j + 1))
        .collect();
    format!("|{}>", modes.join(" "))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
    Mixed,
}

/// Sparse exact operator in the fixed basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FockOperator {
    n: usize,
    // Row-major; each row sorted by column, no explicit zeros.
    rows: Vec<Vec<(usize, Gauss)>>,
}

impl FockOperator {
    pub fn zero(n: usize) -> Result<Self> {
        check_modes(n)?;
        Ok(Self {
            n,
            rows: vec![Vec::new(); 1 << n],
        })
    }

    pub fn identity(n: usize) -> Result<Self> {
        check_modes(n)?;
        Ok(Self {
            n,
            rows: (0..1 << n).map(|i| vec![(i, ONE)]).collect(),
        })
    }

    /// Build from the action on occupation words: `f(s)` lists `(s', v)` with
    /// `op |s> = sum v |s'>`.
    pub fn from_action<F>(n: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(u32) -> Vec<(u32, Gauss)>,
    {
        let basis = FockBasis::new(n)?;
        let mut dense_rows: Vec<Vec<(usize, Gauss)>> = vec![Vec::new(); basis.dim()];
        for col in 0..basis.dim() {
            for (target, v) in f(basis.state(col)) {
                dense_rows[basis.index_of(target)].push((col, v));
            }
        }
        Ok(Self {
            n,
            rows: dense_rows.into_iter().map(normalize_row).collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn get(&self, i: usize, j: usize) -> Gauss {
        match self.rows[i].binary_search_by_key(&j, |&(c, _)| c) {
            Ok(k) => self.rows[i][k].1,
            Err(_) => Complex::new(0, 0),
        }
    }

    pub fn row(&self, i: usize) -> &[(usize, Gauss)] {
        &self.rows[i]
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(Vec::is_empty)
    }

    pub fn to_dense(&self) -> Vec<Vec<Gauss>> {
        (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| self.get(i, j)).collect())
            .collect()
    }

    pub fn adjoint(&self) -> Self {
        let mut rows: Vec<Vec<(usize, Gauss)>> = vec![Vec::new(); self.dim()];
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, v) in row {
                rows[j].push((i, v.conj()));
            }
        }
        Self {
            n: self.n,
            rows: rows.into_iter().map(normalize_row).collect(),
        }
    }

    pub fn is_hermitian(&self) -> bool {
        *self == self.adjoint()
    }

    pub fn scale(&self, s: Gauss) -> Self {
        Self {
            n: self.n,
            rows: self
                .rows
                .iter()
                .map(|r| normalize_row(r.iter().map(|&(j, v)| (j, v * s)).collect()))
                .collect(),
        }
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    pub fn anticommutator(&self, other: &Self) -> Self {
        &(self * other) + &(other * self)
    }

    /// Even if every entry preserves grade parity, odd if every entry flips it.
    pub fn parity(&self) -> Parity {
        let basis = FockBasis::new(self.n).expect("valid size");
        let (mut even, mut odd) = (false, false);
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, _) in row {
                if (basis.grade(i) + basis.grade(j)).is_multiple_of(2) {
                    even = true;
                } else {
                    odd = true;
                }
            }
        }
        match (even, odd) {
            (true, true) => Parity::Mixed,
            (_, true) => Parity::Odd,
            _ => Parity::Even,
        }
    }

    fn check_same(&self, other: &Self) {
        assert_eq!(self.n, other.n, "mode counts differ");
    }
}

fn normalize_row(mut row: Vec<(usize, Gauss)>) -> Vec<(usize, Gauss)> {
    row.sort_by_key(|&(j, _)| j);
    let mut out: Vec<(usize, Gauss)> = Vec::with_capacity(row.len());
    for (j, v) in row {
        match out.last_mut() {
            Some((lj, lv)) if *lj == j => *lv += v,
            _ => out.push((j, v)),
        }
    }
    out.retain(|&(_, v)| v != Complex::new(0, 0));
    out
}

impl Mul for &FockOperator {
    type Output = FockOperator;
    fn mul(self, rhs: &FockOperator) -> FockOperator {
        self.check_same(rhs);
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut acc = Vec::new();
                for &(k, a) in row {
                    acc.extend(rhs.rows[k].iter().map(|&(j, b)| (j, a * b)));
                }
                normalize_row(acc)
            })
            .collect();
        FockOperator { n: self.n, rows }
    }
}

impl Add for &FockOperator {
    type Output = FockOperator;
    fn add(self, rhs: &FockOperator) -> FockOperator {
        self.check_same(rhs);
        let rows = self
            .rows
            .iter()
            .zip(&rhs.rows)
            .map(|(a, b)| normalize_row(a.iter().chain(b).copied().collect()))
            .collect();
        FockOperator { n: self.n, rows }
    }
}

impl Sub for &FockOperator {
    type Output = FockOperator;
    fn sub(self, rhs: &FockOperator) -> FockOperator {
        self + &(-rhs)
    }
}

impl Neg for &FockOperator {
    type Output = FockOperator;
    fn neg(self) -> FockOperator {
        self.scale(Complex::new(-1, 0))
    }
}

impl fmt::Display for FockOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.to_dense() {
            let cells: Vec<String> = row.iter().map(|v| format_gauss(*v)).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

pub fn format_gauss(v: Gauss) -> String {
    match (v.re, v.im) {
        (re, 0) => re.to_string(),
        (0, im) => format!("{im}i"),
        (re, im) if im < 0 => format!("{re}-{}i", -im),
        (re, im) => format!("{re}+{im}i"),
    }
}

/// `b_j`, normalized so that `{b_j, b_k†} = delta_jk`.
pub fn annihilation(j: usize, n: usize) -> Result<FockOperator> {
    check_modes(n)?;
    check_mode(j, n)?;
    FockOperator::from_action(n, |s| {
        annihilate(s, j)
            .map(|(t, sign)| vec![(t, Complex::new(sign, 0))])
            .unwrap_or_default()
    })
}

pub fn creation(j: usize, n: usize) -> Result<FockOperator> {
    check_modes(n)?;
    check_mode(j, n)?;
    FockOperator::from_action(n, |s| {
        create(s, j)
            .map(|(t, sign)| vec![(t, Complex::new(sign, 0))])
            .unwrap_or_default()
    })
}

fn diagonal<F: Fn(u32) -> i64>(n: usize, f: F) -> Result<FockOperator> {
    FockOperator::from_action(n, |s| vec![(s, Complex::new(f(s), 0))])
}

/// `n_j = b_j† b_j`.
pub fn mode_number(j: usize, n: usize) -> Result<FockOperator> {
    check_modes(n)?;
    check_mode(j, n)?;
    diagonal(n, |s| ((s >> j) & 1) as i64)
}

/// `F = sum_j b_j† b_j`.
pub fn fermi_number(n: usize) -> Result<FockOperator> {
    diagonal(n, |s| s.count_ones() as i64)
}

/// `B = N - F`.
pub fn bose_number(n: usize) -> Result<FockOperator> {
    diagonal(n, |s| n as i64 - s.count_ones() as i64)
}

/// `K_F = (-1)^F`.
pub fn klein_f(n: usize) -> Result<FockOperator> {
    diagonal(n, |s| if s.count_ones() % 2 == 0 { 1 } else { -1 })
}

/// `K_B = (-1)^(N - F)`.
pub fn klein_b(n: usize) -> Result<FockOperator> {
    diagonal(n, |s| if (n as u32 - s.count_ones()).is_multiple_of(2) { 1 } else { -1 })
}

/// Euclidean gammas `gamma^j = b_j + b_j†`, `gamma^{N+j} = i (b_j - b_j†)`.
pub fn gamma_matrices(n: usize) -> Result<Vec<FockOperator>> {
    check_modes(n)?;
    let mut out = Vec::with_capacity(2 * n);
    let ladders: Vec<(FockOperator, FockOperator)> = (0..n)
        .map(|j| Ok((annihilation(j, n)?, creation(j, n)?)))
        .collect::<Result<_>>()?;
    for (b, bd) in &ladders {
        out.push(b + bd);
    }
    for (b, bd) in &ladders {
        out.push((b - bd).scale(I));
    }
    Ok(out)
}

/// `S_kl = -i (b_k† b_l - b_l† b_k)`.
pub fn spin_operator(k: usize, l: usize, n: usize) -> Result<FockOperator> {
    check_modes(n)?;
    check_mode(k, n)?;
    check_mode(l, n)?;
    if k == l {
        return Err(Error::Argument("spin operator needs k != l".into()));
    }
    let hop = &(&creation(k, n)? * &annihilation(l, n)?) - &(&creation(l, n)? * &annihilation(k, n)?);
    Ok(hop.scale(-I))
}

/// `Lambda_ab / (2c) = I - n_a - n_b + b_a† b_b + b_b† b_a`, the Fock
/// coefficient of `delta(x_a - x_b)` in the super-Hamiltonian divided by `2c`.
pub fn delta_coupling(a: usize, b: usize, n: usize) -> Result<FockOperator> {
    check_modes(n)?;
    check_mode(a, n)?;
    check_mode(b, n)?;
    if a == b {
        return Err(Error::Argument("delta coupling needs a != b".into()));
    }
    let id = FockOperator::identity(n)?;
    let numbers = &mode_number(a, n)? + &mode_number(b, n)?;
    let hop = &(&creation(a, n)? * &annihilation(b, n)?) + &(&creation(b, n)? * &annihilation(a, n)?);
    Ok(&(&id - &numbers) + &hop)
}

/// Grade-`g` diagonal block in the intra-grade basis order. Fails unless the
/// operator preserves grade.
pub fn grade_project(op: &FockOperator, g: usize) -> Result<Vec<Vec<Gauss>>> {
    let n = op.n();
    if g > n {
        return Err(Error::IndexOutOfRange { index: g, n: n + 1 });
    }
    let basis = FockBasis::new(n)?;
    for (i, row) in op.rows.iter().enumerate() {
        if row.iter().any(|&(j, _)| basis.grade(j) != basis.grade(i)) {
            return Err(Error::Grading);
        }
    }
    let range = basis.grade_range(g);
    Ok(range
        .clone()
        .map(|i| range.clone().map(|j| op.get(i, j)).collect())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(re: i64) -> Gauss {
        Complex::new(re, 0)
    }

    fn real_block(rows: &[&[i64]]) -> Vec<Vec<Gauss>> {
        rows.iter().map(|r| r.iter().map(|&v| g(v)).collect()).collect()
    }

    #[test]
    fn basis_order() {
        let b2 = FockBasis::new(2).unwrap();
        let labels: Vec<String> = (0..4).map(|i| b2.label(i)).collect();
        assert_eq!(labels, ["|0>", "|1_1>", "|1_2>", "|1_2 1_1>"]);
        let b3 = FockBasis::new(3).unwrap();
        let grade2: Vec<String> = b3.grade_range(2).map(|i| b3.label(i)).collect();
        assert_eq!(grade2, ["|1_2 1_1>", "|1_3 1_1>", "|1_3 1_2>"]);
    }

    #[test]
    fn single_mode() {
        let b = annihilation(0, 1).unwrap();
        assert_eq!(b.to_dense(), real_block(&[&[0, 1], &[0, 0]]));
        assert!(matches!(annihilation(1, 1), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn creation_order_antisymmetry() {
        let vac = 0u32;
        let (s1, a1) = create(vac, 1).unwrap();
        let (s12, a2) = create(s1, 0).unwrap();
        let (t1, c1) = create(vac, 0).unwrap();
        let (t12, c2) = create(t1, 1).unwrap();
        assert_eq!(s12, t12);
        assert_eq!(a1 * a2, -(c1 * c2));
    }

    #[test]
    fn cross_anticommutator_vanishes() {
        let b1 = annihilation(0, 3).unwrap();
        let b3d = creation(2, 3).unwrap();
        assert!(b1.anticommutator(&b3d).is_zero());
    }

    #[test]
    fn creation_is_adjoint() {
        for j in 0..4 {
            assert_eq!(creation(j, 4).unwrap(), annihilation(j, 4).unwrap().adjoint());
        }
    }

    #[test]
    fn numbers_and_kleins() {
        let f = fermi_number(2).unwrap();
        assert_eq!(f.to_dense(), real_block(&[&[0, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, 1, 0], &[0, 0, 0, 2]]));
        for n in 1..=5 {
            let prod = &klein_f(n).unwrap() * &klein_b(n).unwrap();
            let sign = if n % 2 == 0 { 1 } else { -1 };
            assert_eq!(prod, FockOperator::identity(n).unwrap().scale(g(sign)));
            let sum = &fermi_number(n).unwrap() + &bose_number(n).unwrap();
            assert_eq!(sum, FockOperator::identity(n).unwrap().scale(g(n as i64)));
        }
    }

    #[test]
    fn grade_dimensions() {
        let b = FockBasis::new(6).unwrap();
        let total: usize = (0..=6).map(|k| b.grade_range(k).len()).sum();
        assert_eq!(total, 64);
        assert_eq!(b.grade_range(3).len(), 20);
    }

    #[test]
    fn fermi_number_projects_to_multiples_of_identity() {
        let f = fermi_number(4).unwrap();
        for k in 0..=4 {
            let block = grade_project(&f, k).unwrap();
            for (i, row) in block.iter().enumerate() {
                for (j, v) in row.iter().enumerate() {
                    assert_eq!(*v, if i == j { g(k as i64) } else { g(0) });
                }
            }
        }
    }

    #[test]
    fn grade_project_rejects_odd() {
        assert!(matches!(
            grade_project(&annihilation(0, 2).unwrap(), 0),
            Err(Error::Grading)
        ));
    }

    #[test]
    fn gammas_single_mode() {
        let gs = gamma_matrices(1).unwrap();
        assert_eq!(gs[0].to_dense(), real_block(&[&[0, 1], &[1, 0]]));
        assert_eq!(&gs[0] * &gs[0], FockOperator::identity(1).unwrap());
        assert!(gs.iter().all(FockOperator::is_hermitian));
    }

    #[test]
    fn spin_bracket_with_ladder() {
        let n = 3;
        let s01 = spin_operator(0, 1, n).unwrap();
        for j in 0..n {
            let lhs = s01.commutator(&annihilation(j, n).unwrap());
            let mut rhs = FockOperator::zero(n).unwrap();
            if j == 0 {
                rhs = annihilation(1, n).unwrap().scale(I);
            }
            if j == 1 {
                rhs = annihilation(0, n).unwrap().scale(-I);
            }
            assert_eq!(lhs, rhs, "j={j}");
        }
        let vac_col: Vec<_> = (0..8).map(|i| s01.get(i, 0)).collect();
        assert!(vac_col.iter().all(|v| *v == g(0)));
        assert!(spin_operator(1, 1, 3).is_err());
    }

    #[test]
    fn delta_coupling_blocks() {
        let l12 = delta_coupling(0, 1, 2).unwrap();
        assert_eq!(grade_project(&l12, 0).unwrap(), real_block(&[&[1]]));
        assert_eq!(grade_project(&l12, 1).unwrap(), real_block(&[&[0, 1], &[1, 0]]));
        assert_eq!(grade_project(&l12, 2).unwrap(), real_block(&[&[-1]]));

        let l12 = delta_coupling(0, 1, 3).unwrap();
        assert_eq!(
            grade_project(&l12, 1).unwrap(),
            real_block(&[&[0, 1, 0], &[1, 0, 0], &[0, 0, 1]])
        );
        let l13 = delta_coupling(0, 2, 3).unwrap();
        assert_eq!(
            grade_project(&l13, 2).unwrap(),
            real_block(&[&[0, 0, -1], &[0, -1, 0], &[-1, 0, 0]])
        );
        assert!(delta_coupling(1, 1, 3).is_err());
    }

    #[test]
    fn delta_coupling_squares_to_identity() {
        let n = 4;
        let id = FockOperator::identity(n).unwrap();
        for a in 0..n {
            for b in a + 1..n {
                let l = delta_coupling(a, b, n).unwrap();
                assert_eq!(&l * &l, id);
                assert!(l.is_hermitian());
                assert!(l.commutator(&fermi_number(n).unwrap()).is_zero());
                let trace: i64 = (0..l.dim()).map(|i| l.get(i, i).re).sum();
                assert_eq!(trace, 0);
            }
        }
    }

    #[test]
    fn parity_labels() {
        assert_eq!(annihilation(0, 3).unwrap().parity(), Parity::Odd);
        assert_eq!(fermi_number(3).unwrap().parity(), Parity::Even);
        let mixed = &annihilation(0, 2).unwrap() + &FockOperator::identity(2).unwrap();
        assert_eq!(mixed.parity(), Parity::Mixed);
    }
}
