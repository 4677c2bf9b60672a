//! Pseudo-inverse of a separable operator built from circulant stencils.
//!
//! Every 2-D Fourier mode is an eigenvector of such an operator, so the
//! pseudo-inverse is two FFTs and a pointwise division.

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::Kron2;
use crate::error::{Error, Result};

pub struct KronPinv {
    n: usize,
    /// 1 / eigenvalue per mode (q, p) at q * n + p; zero for the null mode
    inv: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

/// Eigenvalue of the circulant with first column `col` on mode p.
fn symbol(col: &[f64], p: usize) -> Complex64 {
    let n = col.len();
    col.iter()
        .enumerate()
        .map(|(m, c)| {
            let theta = -2.0 * std::f64::consts::PI * ((p * m) % n) as f64 / n as f64;
            Complex64::from_polar(*c, theta)
        })
        .sum()
}

impl KronPinv {
    /// Requires a positive semidefinite operator whose only null mode is
    /// the constant.
    pub fn new(k: &Kron2) -> Result<KronPinv> {
        let n = k.n;
        let first_col = |m: &[f64]| (0..n).map(|r| m[r * n]).collect::<Vec<f64>>();
        let (cd, cd2) = (first_col(&k.d), first_col(&k.d2));
        let sd: Vec<Complex64> = (0..n).map(|p| symbol(&cd, p)).collect();
        let sd2: Vec<Complex64> = (0..n).map(|p| symbol(&cd2, p)).collect();
        let mut eig = vec![0.0; n * n];
        for q in 0..n {
            for p in 0..n {
                eig[q * n + p] = (k.cxx * sd2[p] + k.cyy * sd2[q] + k.cxy * sd[p] * sd[q]).re;
            }
        }
        let scale = eig.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let floor = 1e-12 * scale;
        let mut inv = vec![0.0; n * n];
        for (idx, &e) in eig.iter().enumerate() {
            if idx == 0 {
                if e.abs() > floor {
                    return Err(Error::InvalidInput("operator does not annihilate constants".into()));
                }
            } else if e > floor {
                inv[idx] = 1.0 / e;
            } else {
                return Err(Error::NotPositiveDefinite);
            }
        }
        let mut planner = FftPlanner::new();
        Ok(KronPinv { n, inv, forward: planner.plan_fft_forward(n), inverse: planner.plan_fft_inverse(n) })
    }

    // transform along x (contiguous rows) then along y (columns)
    fn transform(&self, buf: &mut [Complex64], fft: &Arc<dyn Fft<f64>>) {
        let n = self.n;
        fft.process(buf);
        let mut col = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..n {
            for j in 0..n {
                col[j] = buf[j * n + i];
            }
            fft.process(&mut col);
            for j in 0..n {
                buf[j * n + i] = col[j];
            }
        }
    }

    /// x <- A^+ x, the minimum-norm solution; the mean of x is ignored.
    pub fn apply(&self, x: &mut [f64]) {
        let n = self.n;
        let mut buf: Vec<Complex64> = x.iter().map(|v| Complex64::new(*v, 0.0)).collect();
        self.transform(&mut buf, &self.forward);
        for (b, s) in buf.iter_mut().zip(&self.inv) {
            *b *= *s;
        }
        self.transform(&mut buf, &self.inverse);
        let norm = 1.0 / (n * n) as f64;
        for (v, b) in x.iter_mut().zip(&buf) {
            *v = b.re * norm;
        }
    }
}
