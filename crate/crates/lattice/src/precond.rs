use std::sync::Arc;

use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

pub trait Preconditioner: Sync {
    fn apply(&self, r: &[f64], out: &mut [f64]);
}

/// `(-Laplacian_h + sigma)^{-1}` on each of `blocks` copies of an
/// `M^ndim` Dirichlet grid, diagonalized by DST-I along every axis.
pub struct DirichletPreconditioner {
    m: usize,
    ndim: usize,
    blocks: usize,
    sigma: f64,
    mu: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
}

impl DirichletPreconditioner {
    pub fn new(m: usize, ndim: usize, blocks: usize, h: f64, sigma: f64) -> Self {
        assert!(sigma > 0.0, "the shifted Laplacian must be positive definite");
        let mu = (1..=m)
            .map(|p| {
                let s = (p as f64 * std::f64::consts::PI / (2.0 * (m + 1) as f64)).sin();
                4.0 * s * s / (h * h)
            })
            .collect();
        let fft = FftPlanner::new().plan_fft_forward(2 * (m + 1));
        Self {
            m,
            ndim,
            blocks,
            sigma,
            mu,
            fft,
        }
    }

    fn points(&self) -> usize {
        self.m.pow(self.ndim as u32)
    }

    /// Unnormalized DST-I along `axis`: `X_k = sum_n x_n sin(pi n k / (M + 1))`,
    /// read off the odd extension as `X_k = -Im(Y_k) / 2`.
    fn dst_axis(&self, data: &mut [f64], axis: usize) {
        let m = self.m;
        let stride = m.pow(axis as u32);
        let lines = self.points() / m;
        let start = |line: usize| (line % stride) + (line / stride) * stride * m;
        let transformed: Vec<Vec<f64>> = (0..lines)
            .into_par_iter()
            .with_min_len(64)
            .map_init(
                || {
                    (
                        vec![Complex::new(0.0, 0.0); 2 * (m + 1)],
                        vec![Complex::new(0.0, 0.0); self.fft.get_inplace_scratch_len()],
                    )
                },
                |(buf, scratch), line| {
                    let s = start(line);
                    buf.iter_mut().for_each(|z| *z = Complex::new(0.0, 0.0));
                    for i in 0..m {
                        let v = data[s + i * stride];
                        buf[i + 1] = Complex::new(v, 0.0);
                        buf[2 * (m + 1) - 1 - i] = Complex::new(-v, 0.0);
                    }
                    self.fft.process_with_scratch(buf, scratch);
                    (1..=m).map(|k| -0.5 * buf[k].im).collect()
                },
            )
            .collect();
        for (line, values) in transformed.into_iter().enumerate() {
            let s = start(line);
            for (i, v) in values.into_iter().enumerate() {
                data[s + i * stride] = v;
            }
        }
    }

    fn solve_block(&self, data: &mut [f64]) {
        for axis in 0..self.ndim {
            self.dst_axis(data, axis);
        }
        let m = self.m;
        let norm = (2.0 / (m + 1) as f64).powi(self.ndim as i32);
        data.par_iter_mut().enumerate().for_each(|(idx, v)| {
            let mut lambda = self.sigma;
            let mut rest = idx;
            for _ in 0..self.ndim {
                lambda += self.mu[rest % m];
                rest /= m;
            }
            *v *= norm / lambda;
        });
        for axis in 0..self.ndim {
            self.dst_axis(data, axis);
        }
    }
}

impl Preconditioner for DirichletPreconditioner {
    fn apply(&self, r: &[f64], out: &mut [f64]) {
        let p = self.points();
        assert_eq!(r.len(), p * self.blocks);
        out.copy_from_slice(r);
        for block in out.chunks_mut(p) {
            self.solve_block(block);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::sector::dirichlet_laplacian;

    #[test]
    fn inverts_the_shifted_laplacian() {
        for ndim in 1..=3 {
            let g = Grid::new(2.0, 17, ndim).unwrap();
            let a = dirichlet_laplacian(&g).unwrap();
            let p = g.points();
            let x: Vec<f64> = (0..2 * p).map(|i| ((i * 37 % 11) as f64 - 5.0) / 3.0).collect();
            let mut ax = vec![0.0; 2 * p];
            for b in 0..2 {
                a.matvec(&x[b * p..(b + 1) * p], &mut ax[b * p..(b + 1) * p]);
            }
            for (axi, xi) in ax.iter_mut().zip(&x) {
                *axi += 0.7 * xi;
            }
            let pre = DirichletPreconditioner::new(17, ndim, 2, g.h(), 0.7);
            let mut back = vec![0.0; 2 * p];
            pre.apply(&ax, &mut back);
            let err = back.iter().zip(&x).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
            assert!(err < 1e-11, "ndim {ndim}: {err}");
        }
    }
}
