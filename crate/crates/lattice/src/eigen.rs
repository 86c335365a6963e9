use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::precond::Preconditioner;
use crate::sparse::{axpy, dot, scale, CsrMatrix};

/// Below this dimension the matrix is diagonalized densely.
pub const DENSE_LIMIT: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverOptions {
    pub seed: u64,
    /// Bound on `||A v - lambda v||` for unit `v`.
    pub tol: f64,
    pub max_iter: usize,
    /// Extra block vectors carried beyond the `k` requested.
    pub guard: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            seed: 1,
            tol: 1e-8,
            max_iter: 3000,
            guard: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Eigenpairs {
    pub values: Vec<f64>,
    pub residuals: Vec<f64>,
    pub iterations: usize,
    #[serde(skip)]
    pub vectors: Vec<Vec<f64>>,
}

fn residual(a: &CsrMatrix, lambda: f64, x: &[f64]) -> f64 {
    let mut ax = vec![0.0; x.len()];
    a.matvec(x, &mut ax);
    axpy(-lambda, x, &mut ax);
    dot(&ax, &ax).sqrt()
}

/// Dense symmetric matrix, row-major.
struct Dense {
    n: usize,
    a: Vec<f64>,
}

impl Dense {
    fn zeros(n: usize) -> Self {
        Self { n, a: vec![0.0; n * n] }
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    fn set(&mut self, i: usize, j: usize, v: f64) {
        self.a[i * self.n + j] = v;
    }
}

/// Cyclic Jacobi with rotations on every off-diagonal entry above `eps`
/// times the local diagonal scale. Returns ascending eigenvalues and the
/// eigenvectors as columns of a row-major `n x n` array.
fn sorted_eigen(mut g: Dense) -> (Vec<f64>, Dense) {
    let n = g.n;
    let mut v = Dense::zeros(n);
    for i in 0..n {
        v.set(i, i, 1.0);
    }
    for _sweep in 0..100 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let apq = g.at(p, q);
                let (app, aqq) = (g.at(p, p), g.at(q, q));
                if apq.abs() <= f64::EPSILON * 1e-2 * (app.abs() * aqq.abs()).sqrt() || apq == 0.0 {
                    g.set(p, q, 0.0);
                    g.set(q, p, 0.0);
                    continue;
                }
                rotated = true;
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (gkp, gkq) = (g.at(k, p), g.at(k, q));
                    g.set(k, p, c * gkp - s * gkq);
                    g.set(k, q, s * gkp + c * gkq);
                }
                for k in 0..n {
                    let (gpk, gqk) = (g.at(p, k), g.at(q, k));
                    g.set(p, k, c * gpk - s * gqk);
                    g.set(q, k, s * gpk + c * gqk);
                }
                g.set(p, q, 0.0);
                g.set(q, p, 0.0);
                for k in 0..n {
                    let (vkp, vkq) = (v.at(k, p), v.at(k, q));
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| g.at(i, i).total_cmp(&g.at(j, j)));
    let values = order.iter().map(|&i| g.at(i, i)).collect();
    let mut vectors = Dense::zeros(n);
    for (col, &src) in order.iter().enumerate() {
        for r in 0..n {
            vectors.set(r, col, v.at(r, src));
        }
    }
    (values, vectors)
}

fn dense(a: &CsrMatrix, k: usize) -> Eigenpairs {
    let n = a.dim();
    let mut g = Dense::zeros(n);
    for i in 0..n {
        for (j, v) in a.row(i) {
            g.set(i, j, v);
        }
    }
    let (values, vecs) = sorted_eigen(g);
    let vectors: Vec<Vec<f64>> = (0..k).map(|c| (0..n).map(|r| vecs.at(r, c)).collect()).collect();
    let residuals = (0..k).map(|c| residual(a, values[c], &vectors[c])).collect();
    Eigenpairs {
        values: values[..k].to_vec(),
        residuals,
        iterations: 0,
        vectors,
    }
}

/// Modified Gram-Schmidt, applied twice. Vectors that lose all but a
/// `1e-8` fraction of their norm are dropped.
fn orthonormalize(vs: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(vs.len());
    for mut v in vs {
        let before = dot(&v, &v).sqrt();
        if before == 0.0 || !before.is_finite() {
            continue;
        }
        for _ in 0..2 {
            for q in &basis {
                let p = dot(q, &v);
                axpy(-p, q, &mut v);
            }
        }
        let after = dot(&v, &v).sqrt();
        if after > 1e-8 * before {
            scale(1.0 / after, &mut v);
            basis.push(v);
        }
    }
    basis
}

fn combine(vs: &[Vec<f64>], coef: impl Fn(usize) -> f64) -> Vec<f64> {
    let mut out = vec![0.0; vs[0].len()];
    for (i, v) in vs.iter().enumerate() {
        let c = coef(i);
        if c != 0.0 {
            axpy(c, v, &mut out);
        }
    }
    out
}

/// `k` smallest eigenpairs of a symmetric matrix by preconditioned LOBPCG
/// (Rayleigh-Ritz on `[X, T R, P]`), started from a seeded random block.
pub fn lowest_eigenvalues(
    a: &CsrMatrix,
    k: usize,
    opts: &SolverOptions,
    pre: Option<&dyn Preconditioner>,
) -> Result<Eigenpairs> {
    let n = a.dim();
    if k == 0 || k > n {
        return Err(Error::Argument(format!("asked for {k} eigenvalues of a {n}-dimensional matrix")));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::Argument("solver tolerance must be positive".into()));
    }
    if n <= DENSE_LIMIT {
        return Ok(dense(a, k));
    }
    let b = (k + opts.guard).min(n / 3);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let start = (0..b).map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
    let mut x = orthonormalize(start);
    let mut p: Vec<Vec<f64>> = Vec::new();
    let mut lambda: Vec<f64> = Vec::new();
    let mut residuals = vec![f64::INFINITY; k];

    for iter in 0..=opts.max_iter {
        let mut basis = x.clone();
        if !lambda.is_empty() {
            let mut w = Vec::with_capacity(b);
            for (i, xi) in x.iter().enumerate() {
                let mut r = vec![0.0; n];
                a.matvec(xi, &mut r);
                axpy(-lambda[i], xi, &mut r);
                let norm = dot(&r, &r).sqrt();
                if i < k {
                    residuals[i] = norm;
                }
                // soft locking: a converged column only feeds rounding noise
                if norm < opts.tol {
                    continue;
                }
                match pre {
                    Some(t) => {
                        let mut tr = vec![0.0; n];
                        t.apply(&r, &mut tr);
                        w.push(tr);
                    }
                    None => w.push(r),
                }
            }
            if residuals.iter().all(|&r| r < opts.tol) {
                return Ok(Eigenpairs {
                    values: lambda[..k].to_vec(),
                    residuals,
                    iterations: iter,
                    vectors: x.into_iter().take(k).collect(),
                });
            }
            if iter == opts.max_iter {
                break;
            }
            basis.extend(w);
            basis.extend(p.iter().cloned());
        }
        let s = orthonormalize(basis);
        let as_: Vec<Vec<f64>> = s
            .iter()
            .map(|v| {
                let mut av = vec![0.0; n];
                a.matvec(v, &mut av);
                av
            })
            .collect();
        let m = s.len();
        let mut g = Dense::zeros(m);
        for i in 0..m {
            for j in i..m {
                let v = 0.5 * (dot(&s[i], &as_[j]) + dot(&s[j], &as_[i]));
                g.set(i, j, v);
                g.set(j, i, v);
            }
        }
        let (values, c) = sorted_eigen(g);
        let nx = x.len().min(m);
        lambda = values[..nx].to_vec();
        let new_x: Vec<Vec<f64>> = (0..nx).map(|col| combine(&s, |i| c.at(i, col))).collect();
        p = (0..nx)
            .map(|col| combine(&s, |i| if i < nx { 0.0 } else { c.at(i, col) }))
            .collect();
        x = new_x;
    }
    Err(Error::NonConvergence {
        iterations: opts.max_iter,
        residuals,
    })
}
