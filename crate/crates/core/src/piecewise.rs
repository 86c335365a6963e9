//! Exact calculus for piecewise complex-exponential functions on the chamber
//! decomposition of R^N cut out by the hyperplanes `x_a = x_b`.
//!
//! A chamber ([`Region`]) is labeled by the permutation that orders the
//! coordinates from left to right. On each chamber a [`RegionFunction`] is a
//! finite sum of terms `coef * exp(sum_j kappa_j x_j)`. Derivatives act term by
//! term inside each chamber; everything that happens on the hyperplanes is
//! expressed through restrictions to an [`Interface`] and the matching
//! residuals built from them.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

use itertools::Itertools;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Two exponents are the same when every component agrees within this.
pub const KAPPA_TOL: f64 = 1e-12;
/// Terms with `|coef|` at or below this are dropped.
pub const DROP_TOL: f64 = 1e-14;
/// Points closer than this to a hyperplane cannot be evaluated.
pub const HYPERPLANE_TOL: f64 = 1e-9;
/// Interface precondition used by [`jump_residual`].
pub const CONTINUITY_TOL: f64 = 1e-10;
/// Largest particle count for chamber enumeration (10! chambers).
pub const MAX_PARTICLES: usize = 10;

fn check_size(n: usize) -> Result<()> {
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

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// Position of a permutation in lexicographic order.
pub(crate) fn lex_index(order: &[usize]) -> usize {
    let n = order.len();
    let mut index = 0;
    for i in 0..n {
        let smaller_after = order[i + 1..].iter().filter(|&&p| p < order[i]).count();
        index += smaller_after * factorial(n - 1 - i);
    }
    index
}

/// An ordering chamber `x_{order[0]} < x_{order[1]} < ... < x_{order[n-1]}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Region {
    order: Vec<usize>,
    rank: Vec<usize>,
}

impl Region {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let n = order.len();
        check_size(n)?;
        let mut rank = vec![usize::MAX; n];
        for (pos, &p) in order.iter().enumerate() {
            if p >= n {
                return Err(Error::IndexOutOfRange { index: p, n });
            }
            if rank[p] != usize::MAX {
                return Err(Error::Argument(format!(
                    "order {order:?} is not a permutation"
                )));
            }
            rank[p] = pos;
        }
        Ok(Self { order, rank })
    }

    /// The chamber `x_0 < x_1 < ... < x_{n-1}`.
    pub fn identity(n: usize) -> Result<Self> {
        Self::new((0..n).collect())
    }

    pub fn n(&self) -> usize {
        self.order.len()
    }

    /// Particle indices from left to right.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Zero-based position of particle `j` counted from the left.
    pub fn rank(&self, j: usize) -> usize {
        self.rank[j]
    }

    /// Lexicographic index of this chamber among all `n!` chambers.
    pub fn index(&self) -> usize {
        lex_index(&self.order)
    }

    /// The chamber obtained by exchanging the particles at positions `pos`
    /// and `pos + 1`.
    pub fn swap_adjacent(&self, pos: usize) -> Region {
        let mut order = self.order.clone();
        order.swap(pos, pos + 1);
        let mut rank = self.rank.clone();
        rank[order[pos]] = pos;
        rank[order[pos + 1]] = pos + 1;
        Region { order, rank }
    }

    /// The chamber containing `x`, or an error when `x` is too close to a
    /// coincidence hyperplane.
    pub fn containing(x: &[f64]) -> Result<Region> {
        check_size(x.len())?;
        let order: Vec<usize> = (0..x.len())
            .sorted_by(|&i, &j| x[i].total_cmp(&x[j]))
            .collect();
        let min_gap = order
            .windows(2)
            .map(|w| x[w[1]] - x[w[0]])
            .fold(f64::INFINITY, f64::min);
        if !(min_gap > HYPERPLANE_TOL) {
            return Err(Error::AmbiguousPoint {
                tol: HYPERPLANE_TOL,
            });
        }
        Region::new(order)
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.n() <= 9 {
            write!(f, "R_")?;
            for p in &self.order {
                write!(f, "{}", p + 1)?;
            }
            Ok(())
        } else {
            write!(f, "R_({})", self.order.iter().map(|p| p + 1).join(","))
        }
    }
}

fn build_regions(n: usize) -> Vec<Region> {
    (0..n)
        .permutations(n)
        .map(|order| Region::new(order).expect("permutation"))
        .collect()
}

/// Cached chamber list for `n`, in lexicographic order.
pub(crate) fn regions_of(n: usize) -> &'static [Region] {
    static CACHE: [OnceLock<Vec<Region>>; MAX_PARTICLES + 1] =
        [const { OnceLock::new() }; MAX_PARTICLES + 1];
    CACHE[n].get_or_init(|| build_regions(n))
}

/// All `n!` chambers in lexicographic order of their permutation.
pub fn enumerate_regions(n: usize) -> Result<Vec<Region>> {
    check_size(n)?;
    Ok(regions_of(n).to_vec())
}

/// Sign of `x_a - x_b` on the chamber.
pub fn sign_value(r: &Region, a: usize, b: usize) -> Result<i32> {
    let n = r.n();
    for idx in [a, b] {
        if idx >= n {
            return Err(Error::IndexOutOfRange { index: idx, n });
        }
    }
    if a == b {
        return Err(Error::Argument("sign_value needs two distinct particles".into()));
    }
    Ok(if r.rank(a) > r.rank(b) { 1 } else { -1 })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// The chamber with `x_a < x_b`.
    Left,
    /// The chamber with `x_a > x_b`.
    Right,
}

/// Common wall of two chambers differing by one adjacent exchange of the
/// particles `a < b`. On `left`, `x_a < x_b`; on `right`, `x_b < x_a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interface {
    pub left: Region,
    pub right: Region,
    pub a: usize,
    pub b: usize,
}

impl Interface {
    pub fn region(&self, side: Side) -> &Region {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }
}

impl fmt::Display for Interface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}|{} (x{}=x{})",
            self.left,
            self.right,
            self.a + 1,
            self.b + 1
        )
    }
}

/// One interface per pair of adjacent chambers, `n! (n-1) / 2` in total.
pub fn enumerate_interfaces(n: usize) -> Result<Vec<Interface>> {
    check_size(n)?;
    let mut out = Vec::with_capacity(factorial(n) * (n - 1) / 2);
    for region in regions_of(n) {
        for pos in 0..n - 1 {
            let (p, q) = (region.order[pos], region.order[pos + 1]);
            // Emit each wall once, from the chamber where the smaller index
            // sits to the left.
            if p < q {
                out.push(Interface {
                    left: region.clone(),
                    right: region.swap_adjacent(pos),
                    a: p,
                    b: q,
                });
            }
        }
    }
    Ok(out)
}

/// `coef * exp(sum_j kappa_j x_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpTerm {
    pub coef: Complex64,
    pub kappa: Vec<Complex64>,
}

impl ExpTerm {
    pub fn new(coef: Complex64, kappa: Vec<Complex64>) -> Self {
        Self { coef, kappa }
    }

    /// A plane wave `coef * exp(i sum_j k_j x_j)`.
    pub fn plane_wave(coef: Complex64, k: &[f64]) -> Self {
        Self {
            coef,
            kappa: k.iter().map(|&kj| Complex64::new(0.0, kj)).collect(),
        }
    }

    pub fn eval(&self, x: &[f64]) -> Complex64 {
        let exponent: Complex64 = self.kappa.iter().zip(x).map(|(k, &xj)| k * xj).sum();
        self.coef * exponent.exp()
    }

    /// `sum_j kappa_j^2`, the eigenvalue of the Laplacian on this term.
    pub fn laplacian_eigenvalue(&self) -> Complex64 {
        self.kappa.iter().map(|k| k * k).sum()
    }

    fn same_exponent(&self, other: &ExpTerm) -> bool {
        self.kappa.len() == other.kappa.len()
            && self
                .kappa
                .iter()
                .zip(&other.kappa)
                .all(|(x, y)| (x.re - y.re).abs() <= KAPPA_TOL && (x.im - y.im).abs() <= KAPPA_TOL)
    }
}

fn cmp_kappa(x: &[Complex64], y: &[Complex64]) -> std::cmp::Ordering {
    x.iter()
        .zip(y)
        .map(|(a, b)| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)))
        .find(|o| o.is_ne())
        .unwrap_or(std::cmp::Ordering::Equal)
}

/// Merge terms with equal exponents, drop negligible coefficients and sort.
///
/// Each incoming term joins the first kept representative whose exponent
/// matches; the representative's exponent is kept. Applying this twice gives
/// the same result bit for bit.
pub fn canonicalize_terms(terms: Vec<ExpTerm>) -> Vec<ExpTerm> {
    let mut kept: Vec<ExpTerm> = Vec::with_capacity(terms.len());
    for term in terms {
        match kept.iter_mut().find(|k| k.same_exponent(&term)) {
            Some(rep) => rep.coef += term.coef,
            None => kept.push(term),
        }
    }
    kept.retain(|t| t.coef.norm() > DROP_TOL);
    kept.sort_by(|x, y| cmp_kappa(&x.kappa, &y.kappa));
    kept
}

fn max_abs_coef(terms: &[ExpTerm]) -> f64 {
    terms.iter().map(|t| t.coef.norm()).fold(0.0, f64::max)
}

/// An exponential sum on a single domain; restrictions to an interface land
/// here, in the `n - 1` variables left after eliminating `x_b`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpSum {
    pub dim: usize,
    pub terms: Vec<ExpTerm>,
}

impl ExpSum {
    pub fn new(dim: usize, terms: Vec<ExpTerm>) -> Self {
        Self {
            dim,
            terms: canonicalize_terms(terms),
        }
    }

    pub fn max_abs_coef(&self) -> f64 {
        max_abs_coef(&self.terms)
    }

    /// Coefficient-wise max magnitude of `self - other` after canonicalization.
    pub fn max_diff(&self, other: &ExpSum) -> f64 {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().map(|t| ExpTerm::new(-t.coef, t.kappa.clone())));
        max_abs_coef(&canonicalize_terms(terms))
    }
}

/// Substitute `x_b := x_a` in every term.
fn restrict_terms(terms: &[ExpTerm], a: usize, b: usize) -> Vec<ExpTerm> {
    terms
        .iter()
        .map(|t| {
            let mut kappa = t.kappa.clone();
            let kb = kappa[b];
            kappa[a] += kb;
            kappa.remove(b);
            ExpTerm::new(t.coef, kappa)
        })
        .collect()
}

/// A function on R^N given on every chamber by an exponential sum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "RegionFunctionJson", try_from = "RegionFunctionJson")]
pub struct RegionFunction {
    n: usize,
    // Indexed by lexicographic chamber index.
    terms: Vec<Vec<ExpTerm>>,
}

impl RegionFunction {
    pub fn zero(n: usize) -> Result<Self> {
        check_size(n)?;
        Ok(Self {
            n,
            terms: vec![Vec::new(); factorial(n)],
        })
    }

    /// The same constant on every chamber.
    pub fn constant(n: usize, value: Complex64) -> Result<Self> {
        Self::from_fn(n, |_| vec![ExpTerm::new(value, vec![Complex64::new(0.0, 0.0); n])])
    }

    /// Build from a per-chamber term generator; the result is canonical.
    pub fn from_fn<F>(n: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(&Region) -> Vec<ExpTerm>,
    {
        check_size(n)?;
        let mut terms = Vec::with_capacity(factorial(n));
        for region in regions_of(n) {
            let t = f(region);
            if let Some(bad) = t.iter().find(|t| t.kappa.len() != n) {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: bad.kappa.len(),
                });
            }
            terms.push(canonicalize_terms(t));
        }
        Ok(Self { n, terms })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn regions(&self) -> &'static [Region] {
        regions_of(self.n)
    }

    pub fn terms(&self, region: &Region) -> &[ExpTerm] {
        &self.terms[region.index()]
    }

    /// Chambers paired with their terms, in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = (&'static Region, &[ExpTerm])> + '_ {
        regions_of(self.n)
            .iter()
            .zip(self.terms.iter().map(Vec::as_slice))
    }

    pub fn term_count(&self) -> usize {
        self.terms.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(Vec::is_empty)
    }

    pub fn canonicalize(&self) -> Self {
        Self {
            n: self.n,
            terms: self.terms.iter().cloned().map(canonicalize_terms).collect(),
        }
    }

    /// Apply a term-wise map on every chamber and canonicalize.
    pub fn map_terms<F>(&self, mut f: F) -> Self
    where
        F: FnMut(&Region, &ExpTerm) -> ExpTerm,
    {
        let terms = self
            .iter()
            .map(|(r, ts)| canonicalize_terms(ts.iter().map(|t| f(r, t)).collect()))
            .collect();
        Self { n: self.n, terms }
    }

    fn check_index(&self, j: usize) -> Result<()> {
        if j < self.n {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange { index: j, n: self.n })
        }
    }

    /// Per-chamber partial derivative with respect to `x_j`.
    pub fn differentiate(&self, j: usize) -> Result<Self> {
        self.check_index(j)?;
        Ok(self.map_terms(|_, t| ExpTerm::new(t.coef * t.kappa[j], t.kappa.clone())))
    }

    /// Multiply by the chamber-constant sign of `x_a - x_b`.
    pub fn multiply_sign(&self, a: usize, b: usize) -> Result<Self> {
        self.check_index(a)?;
        self.check_index(b)?;
        if a == b {
            return Err(Error::Argument("multiply_sign needs two distinct particles".into()));
        }
        Ok(self.multiply_region_constant(|r| if r.rank(a) > r.rank(b) { 1.0 } else { -1.0 }))
    }

    /// Multiply by a function that is constant on each chamber.
    pub fn multiply_region_constant<F>(&self, mut f: F) -> Self
    where
        F: FnMut(&Region) -> f64,
    {
        let terms = self
            .iter()
            .map(|(r, ts)| {
                let s = f(r);
                canonicalize_terms(
                    ts.iter()
                        .map(|t| ExpTerm::new(t.coef * s, t.kappa.clone()))
                        .collect(),
                )
            })
            .collect();
        Self { n: self.n, terms }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.map_terms(|_, t| ExpTerm::new(t.coef * s, t.kappa.clone()))
    }

    /// Value at a point strictly inside a chamber.
    pub fn evaluate(&self, x: &[f64]) -> Result<Complex64> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        let region = Region::containing(x)?;
        Ok(self.terms(&region).iter().map(|t| t.eval(x)).sum())
    }

    /// Limit onto the wall of `iface` from the chosen side, as an exponential
    /// sum in the variables other than `x_b`.
    pub fn restrict_to_interface(&self, iface: &Interface, side: Side) -> ExpSum {
        let terms = self.terms(iface.region(side));
        ExpSum::new(self.n - 1, restrict_terms(terms, iface.a, iface.b))
    }

    pub fn max_abs_coef(&self) -> f64 {
        self.terms.iter().map(|t| max_abs_coef(t)).fold(0.0, f64::max)
    }

    /// Coefficient-wise max magnitude of `self - other`.
    pub fn max_diff(&self, other: &RegionFunction) -> f64 {
        (self - other).max_abs_coef()
    }

    fn combine(&self, other: &RegionFunction, sign: f64) -> RegionFunction {
        assert_eq!(self.n, other.n, "particle counts differ");
        let terms = self
            .terms
            .iter()
            .zip(&other.terms)
            .map(|(x, y)| {
                let mut t = x.clone();
                t.extend(y.iter().map(|t| ExpTerm::new(t.coef * sign, t.kappa.clone())));
                canonicalize_terms(t)
            })
            .collect();
        RegionFunction { n: self.n, terms }
    }
}

impl Add for &RegionFunction {
    type Output = RegionFunction;
    fn add(self, rhs: &RegionFunction) -> RegionFunction {
        self.combine(rhs, 1.0)
    }
}

impl Sub for &RegionFunction {
    type Output = RegionFunction;
    fn sub(self, rhs: &RegionFunction) -> RegionFunction {
        self.combine(rhs, -1.0)
    }
}

impl Neg for &RegionFunction {
    type Output = RegionFunction;
    fn neg(self) -> RegionFunction {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul<Complex64> for &RegionFunction {
    type Output = RegionFunction;
    fn mul(self, rhs: Complex64) -> RegionFunction {
        self.scale(rhs)
    }
}

/// Max coefficient mismatch between the two one-sided limits on the wall.
pub fn continuity_residual(f: &RegionFunction, iface: &Interface) -> f64 {
    let left = f.restrict_to_interface(iface, Side::Left);
    let right = f.restrict_to_interface(iface, Side::Right);
    left.max_diff(&right)
}

/// Residual of the generalized derivative-jump condition
///
/// `[(d_a - d_b) F_i](right) - [(d_a - d_b) F_i](left) = sum_j C_ij F_j|wall`
///
/// for a vector of functions `F`. The scalar delta-interaction condition is
/// the one-component case with `C = [[2c]]`.
pub fn jump_residual(fs: &[RegionFunction], iface: &Interface, coupling: &[Vec<f64>]) -> Result<f64> {
    let m = fs.len();
    if coupling.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: coupling.len(),
        });
    }
    if let Some(row) = coupling.iter().find(|row| row.len() != m) {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: row.len(),
        });
    }
    let Some(n) = fs.first().map(RegionFunction::n) else {
        return Ok(0.0);
    };
    if let Some(f) = fs.iter().find(|f| f.n() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: f.n(),
        });
    }
    let worst_gap = fs
        .iter()
        .map(|f| continuity_residual(f, iface))
        .fold(0.0, f64::max);
    if worst_gap > CONTINUITY_TOL {
        return Err(Error::Discontinuous { residual: worst_gap });
    }

    let (a, b) = (iface.a, iface.b);
    let normal_derivative = |terms: &[ExpTerm], sign: f64| -> Vec<ExpTerm> {
        let d: Vec<ExpTerm> = terms
            .iter()
            .map(|t| ExpTerm::new(sign * t.coef * (t.kappa[a] - t.kappa[b]), t.kappa.clone()))
            .collect();
        restrict_terms(&d, a, b)
    };
    let on_wall: Vec<Vec<ExpTerm>> = fs
        .iter()
        .map(|f| restrict_terms(f.terms(&iface.left), a, b))
        .collect();

    let mut worst = 0.0_f64;
    for (i, f) in fs.iter().enumerate() {
        let mut terms = normal_derivative(f.terms(&iface.right), 1.0);
        terms.extend(normal_derivative(f.terms(&iface.left), -1.0));
        for (j, wall) in on_wall.iter().enumerate() {
            let cij = coupling[i][j];
            if cij != 0.0 {
                terms.extend(wall.iter().map(|t| ExpTerm::new(-cij * t.coef, t.kappa.clone())));
            }
        }
        worst = worst.max(max_abs_coef(&canonicalize_terms(terms)));
    }
    Ok(worst)
}

/// Worst continuity and jump residual of a scalar function over all
/// interfaces, for the coupling `C = [[jump]]`.
pub fn scalar_matching_residuals(f: &RegionFunction, jump: f64) -> Result<(f64, f64)> {
    let mut continuity = 0.0_f64;
    let mut jump_res = 0.0_f64;
    let coupling = [vec![jump]];
    for iface in enumerate_interfaces(f.n())? {
        continuity = continuity.max(continuity_residual(f, &iface));
        jump_res = jump_res.max(jump_residual(std::slice::from_ref(f), &iface, &coupling)?);
    }
    Ok((continuity, jump_res))
}

#[derive(Serialize, Deserialize)]
struct ComplexJson {
    re: f64,
    im: f64,
}

impl From<Complex64> for ComplexJson {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    re: f64,
    im: f64,
    kappa: Vec<ComplexJson>,
}

#[derive(Serialize, Deserialize)]
struct RegionJson {
    /// One-based particle labels from left to right.
    order: Vec<usize>,
    terms: Vec<TermJson>,
}

/// Wire shape: `{n, regions: [{order: [..], terms: [{re, im, kappa: [{re, im}..]}..]}..]}`.
#[derive(Serialize, Deserialize)]
struct RegionFunctionJson {
    n: usize,
    regions: Vec<RegionJson>,
}

impl From<RegionFunction> for RegionFunctionJson {
    fn from(f: RegionFunction) -> Self {
        let regions = f
            .iter()
            .map(|(r, ts)| RegionJson {
                order: r.order().iter().map(|p| p + 1).collect(),
                terms: ts
                    .iter()
                    .map(|t| TermJson {
                        re: t.coef.re,
                        im: t.coef.im,
                        kappa: t.kappa.iter().map(|&k| k.into()).collect(),
                    })
                    .collect(),
            })
            .collect();
        Self { n: f.n, regions }
    }
}

impl TryFrom<RegionFunctionJson> for RegionFunction {
    type Error = Error;

    fn try_from(json: RegionFunctionJson) -> Result<Self> {
        let mut f = RegionFunction::zero(json.n)?;
        for region in json.regions {
            let order = region
                .order
                .iter()
                .map(|&p| {
                    p.checked_sub(1)
                        .ok_or_else(|| Error::Argument("region labels are one-based".into()))
                })
                .collect::<Result<Vec<_>>>()?;
            let r = Region::new(order)?;
            if r.n() != json.n {
                return Err(Error::DimensionMismatch {
                    expected: json.n,
                    got: r.n(),
                });
            }
            let mut terms = Vec::with_capacity(region.terms.len());
            for t in region.terms {
                if t.kappa.len() != json.n {
                    return Err(Error::DimensionMismatch {
                        expected: json.n,
                        got: t.kappa.len(),
                    });
                }
                terms.push(ExpTerm::new(
                    Complex64::new(t.re, t.im),
                    t.kappa.iter().map(|k| Complex64::new(k.re, k.im)).collect(),
                ));
            }
            let idx = r.index();
            f.terms[idx].extend(terms);
            f.terms[idx] = canonicalize_terms(std::mem::take(&mut f.terms[idx]));
        }
        Ok(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// `exp(-(g/2) |x_1 - x_2|)` on two particles.
    fn dimer(g: f64) -> RegionFunction {
        RegionFunction::from_fn(2, |r| {
            let s = if r.rank(0) > r.rank(1) { 1.0 } else { -1.0 };
            vec![ExpTerm::new(c(1.0, 0.0), vec![c(-0.5 * g * s, 0.0), c(0.5 * g * s, 0.0)])]
        })
        .unwrap()
    }

    #[test]
    fn region_counts() {
        assert_eq!(enumerate_regions(1).unwrap().len(), 1);
        let r3: Vec<String> = enumerate_regions(3)
            .unwrap()
            .iter()
            .map(|r| r.to_string())
            .collect();
        assert_eq!(r3, ["R_123", "R_132", "R_213", "R_231", "R_312", "R_321"]);
        assert!(matches!(enumerate_regions(0), Err(Error::Size { .. })));
        assert!(matches!(enumerate_regions(11), Err(Error::Size { .. })));
    }

    #[test]
    fn region_index_matches_enumeration() {
        for (i, r) in enumerate_regions(4).unwrap().iter().enumerate() {
            assert_eq!(r.index(), i);
        }
    }

    #[test]
    fn interface_counts_and_orientation() {
        let two = enumerate_interfaces(2).unwrap();
        assert_eq!(two.len(), 1);
        assert_eq!((two[0].a, two[0].b), (0, 1));
        assert_eq!(enumerate_interfaces(3).unwrap().len(), 6);
        for iface in enumerate_interfaces(4).unwrap() {
            assert!(iface.left.rank(iface.a) < iface.left.rank(iface.b));
            assert!(iface.right.rank(iface.a) > iface.right.rank(iface.b));
            assert_eq!(iface.left.rank(iface.a) + 1, iface.left.rank(iface.b));
        }
    }

    #[test]
    fn sign_values() {
        let id = Region::new(vec![0, 1, 2]).unwrap();
        assert_eq!(sign_value(&id, 0, 1).unwrap(), -1);
        let rev = Region::new(vec![2, 1, 0]).unwrap();
        assert_eq!(sign_value(&rev, 0, 2).unwrap(), 1);
        assert!(matches!(sign_value(&id, 1, 1), Err(Error::Argument(_))));
    }

    #[test]
    fn three_sign_products_sum_to_one() {
        let one = RegionFunction::constant(3, c(1.0, 0.0)).unwrap();
        let t1 = one.multiply_sign(0, 1).unwrap().multiply_sign(0, 2).unwrap();
        let t2 = one.multiply_sign(1, 0).unwrap().multiply_sign(1, 2).unwrap();
        let t3 = one.multiply_sign(0, 2).unwrap().multiply_sign(1, 2).unwrap();
        let sum = &(&t1 + &t2) + &t3;
        assert_eq!(sum.max_diff(&one), 0.0);
    }

    #[test]
    fn multiply_sign_on_two_particles() {
        let one = RegionFunction::constant(2, c(1.0, 0.0)).unwrap();
        let s = one.multiply_sign(0, 1).unwrap();
        assert_eq!(s.evaluate(&[1.0, 0.0]).unwrap(), c(1.0, 0.0));
        assert_eq!(s.evaluate(&[0.0, 1.0]).unwrap(), c(-1.0, 0.0));
        assert_eq!(s.multiply_sign(0, 1).unwrap(), one);
        assert!(one.multiply_sign(0, 0).is_err());
    }

    #[test]
    fn derivative_scales_by_kappa() {
        let f = RegionFunction::from_fn(2, |_| {
            vec![ExpTerm::new(c(2.0, 0.0), vec![c(0.0, 1.0), c(0.0, -1.0)])]
        })
        .unwrap();
        let d = f.differentiate(0).unwrap();
        for (_, ts) in d.iter() {
            assert_eq!(ts[0].coef, c(0.0, 2.0));
        }
        assert!(f.differentiate(2).is_err());
    }

    #[test]
    fn dimer_is_translation_invariant() {
        let psi = dimer(2.0);
        let total = &psi.differentiate(0).unwrap() + &psi.differentiate(1).unwrap();
        assert!(total.is_zero());
    }

    #[test]
    fn evaluate_points() {
        let one = RegionFunction::constant(3, c(1.0, 0.0)).unwrap();
        assert_eq!(one.evaluate(&[0.3, -1.0, 2.0]).unwrap(), c(1.0, 0.0));
        let v = dimer(2.0).evaluate(&[0.0, 1.0]).unwrap();
        assert!((v - c((-1.0f64).exp(), 0.0)).norm() < 1e-15);
        assert!(matches!(
            dimer(2.0).evaluate(&[0.5, 0.5]),
            Err(Error::AmbiguousPoint { .. })
        ));
    }

    #[test]
    fn restriction_of_plane_wave() {
        let (k1, k2) = (0.7, -0.2);
        let f = RegionFunction::from_fn(2, |_| vec![ExpTerm::plane_wave(c(1.0, 0.0), &[k1, k2])])
            .unwrap();
        let iface = &enumerate_interfaces(2).unwrap()[0];
        let r = f.restrict_to_interface(iface, Side::Left);
        assert_eq!(r.dim, 1);
        assert_eq!(r.terms.len(), 1);
        assert!((r.terms[0].kappa[0] - c(0.0, k1 + k2)).norm() < 1e-15);
    }

    #[test]
    fn dimer_restricts_to_one_from_both_sides() {
        let psi = dimer(3.0);
        let iface = &enumerate_interfaces(2).unwrap()[0];
        for side in [Side::Left, Side::Right] {
            let r = psi.restrict_to_interface(iface, side);
            assert_eq!(r.terms.len(), 1);
            assert_eq!(r.terms[0].coef, c(1.0, 0.0));
            assert_eq!(r.terms[0].kappa[0], c(0.0, 0.0));
        }
    }

    #[test]
    fn constant_is_continuous() {
        let one = RegionFunction::constant(3, c(1.0, 0.0)).unwrap();
        for iface in enumerate_interfaces(3).unwrap() {
            assert_eq!(continuity_residual(&one, &iface), 0.0);
        }
    }

    #[test]
    fn dimer_jump_is_attractive() {
        let g = 2.0;
        let psi = dimer(g);
        let iface = &enumerate_interfaces(2).unwrap()[0];
        let r = jump_residual(std::slice::from_ref(&psi), iface, &[vec![-2.0 * g]]).unwrap();
        assert!(r < 1e-14, "residual {r}");
    }

    #[test]
    fn plane_wave_has_no_jump() {
        let cpl = 1.5;
        let f = RegionFunction::from_fn(2, |_| vec![ExpTerm::plane_wave(c(1.0, 0.0), &[0.4, 0.1])])
            .unwrap();
        let iface = &enumerate_interfaces(2).unwrap()[0];
        let r = jump_residual(std::slice::from_ref(&f), iface, &[vec![2.0 * cpl]]).unwrap();
        assert!((r - 2.0 * cpl).abs() < 1e-14);
    }

    #[test]
    fn jump_rejects_bad_input() {
        let iface = &enumerate_interfaces(2).unwrap()[0];
        let psi = dimer(1.0);
        assert!(matches!(
            jump_residual(std::slice::from_ref(&psi), iface, &[vec![1.0, 0.0]]),
            Err(Error::DimensionMismatch { .. })
        ));
        let step = RegionFunction::constant(2, c(1.0, 0.0))
            .unwrap()
            .multiply_sign(0, 1)
            .unwrap();
        assert!(matches!(
            jump_residual(std::slice::from_ref(&step), iface, &[vec![1.0]]),
            Err(Error::Discontinuous { .. })
        ));
    }

    #[test]
    fn canonicalize_merges_and_drops() {
        let k = vec![c(0.0, 1.0)];
        let terms = vec![
            ExpTerm::new(c(1.0, 0.0), k.clone()),
            ExpTerm::new(c(-1.0, 0.0), vec![c(0.0, 1.0 + 1e-13)]),
            ExpTerm::new(c(0.5, 0.0), vec![c(0.0, 2.0)]),
        ];
        let out = canonicalize_terms(terms);
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].coef, c(0.5, 0.0));
    }

    #[test]
    fn json_shape() {
        let psi = dimer(2.0);
        let v = serde_json::to_value(&psi).unwrap();
        assert_eq!(v["n"], 2);
        assert_eq!(v["regions"][0]["order"], serde_json::json!([1, 2]));
        assert_eq!(v["regions"][0]["terms"][0]["kappa"][0]["re"], 1.0);
        let back: RegionFunction = serde_json::from_value(v).unwrap();
        assert_eq!(back, psi);
    }
}
