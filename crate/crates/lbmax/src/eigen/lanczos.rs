//! Shift-invert block Lanczos with full B-orthogonalization and
//! Rayleigh-Ritz on (A, B) directly, with thick restarts.

use faer::linalg::triangular_solve::{solve_lower_triangular_in_place, solve_upper_triangular_in_place};
use faer::{Mat, MatRef, Par, Side};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::circulant::KronPinv;
use super::skyline::Skyline;
use super::{scaled_residual, EigenPairs, EigenRequest, SymMatrix};
use crate::error::{Error, Result};

const BLOCK: usize = 8;
const SEED: u64 = 0x1b_ad_5eed;

enum Factor {
    Dense(Mat<f64>),
    Sparse(Skyline),
    Diagonal(Vec<f64>),
    /// A separable with circulant stencils and B diagonal: the exact
    /// shift-invert at zero on the B-complement of the constants, with
    /// the constant mode sent to 1 / |sigma|.
    Circulant { pinv: KronPinv, b: Vec<f64>, b_sum: f64, const_gain: f64 },
}

impl Factor {
    fn new(m: &SymMatrix) -> Result<Factor> {
        match m {
            SymMatrix::Dense { n, data } => {
                let mat = MatRef::from_column_major_slice(data, *n, *n);
                let llt = mat.llt(Side::Lower).map_err(|_| Error::NotPositiveDefinite)?;
                Ok(Factor::Dense(llt.L().to_owned()))
            }
            SymMatrix::Sparse(c) => Ok(Factor::Sparse(Skyline::factor(c)?)),
            SymMatrix::Kron(_) => Factor::new(&SymMatrix::dense(m.dim(), m.to_dense())),
            SymMatrix::Diagonal(d) => {
                if d.iter().any(|&v| v <= 0.0) {
                    return Err(Error::NotPositiveDefinite);
                }
                Ok(Factor::Diagonal(d.clone()))
            }
        }
    }

    /// Factor for (A - sigma B) when a cheaper exact route exists.
    fn special(a: &SymMatrix, b: &SymMatrix, sigma: f64) -> Option<Factor> {
        match (a, b) {
            (SymMatrix::Kron(k), SymMatrix::Diagonal(d)) if sigma < 0.0 && d.iter().all(|&v| v > 0.0) => {
                let pinv = KronPinv::new(k).ok()?;
                let b_sum: f64 = d.iter().sum();
                Some(Factor::Circulant { pinv, b: d.clone(), b_sum, const_gain: 1.0 / (-sigma * b_sum) })
            }
            _ => None,
        }
    }

    /// Solve for every column of `x` (n x p, column-major) in place.
    fn solve_block(&self, x: &mut Mat<f64>) {
        match self {
            Factor::Dense(l) => {
                solve_lower_triangular_in_place(l.as_ref(), x.as_mut(), Par::Seq);
                solve_upper_triangular_in_place(l.transpose(), x.as_mut(), Par::Seq);
            }
            Factor::Sparse(s) => {
                for j in 0..x.ncols() {
                    s.solve_in_place(x.col_as_slice_mut(j));
                }
            }
            Factor::Diagonal(d) => {
                for j in 0..x.ncols() {
                    for (v, di) in x.col_as_slice_mut(j).iter_mut().zip(d) {
                        *v /= di;
                    }
                }
            }
            Factor::Circulant { pinv, b, b_sum, const_gain } => {
                for j in 0..x.ncols() {
                    let z = x.col_as_slice_mut(j);
                    let s: f64 = z.iter().sum();
                    // drop the component along B 1, invert, then make the
                    // result B-orthogonal to the constants
                    for (zi, bi) in z.iter_mut().zip(b) {
                        *zi -= bi * s / b_sum;
                    }
                    pinv.apply(z);
                    let t: f64 = z.iter().zip(b).map(|(zi, bi)| zi * bi).sum::<f64>() / b_sum;
                    let c = const_gain * s - t;
                    z.iter_mut().for_each(|zi| *zi += c);
                }
            }
        }
    }
}

struct Basis {
    n: usize,
    v: Vec<Vec<f64>>,
    bv: Vec<Vec<f64>>,
    av: Vec<Vec<f64>>,
    /// projected A, stored full
    t: Vec<Vec<f64>>,
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

impl Basis {
    fn len(&self) -> usize {
        self.v.len()
    }

    /// B-orthogonalize `w` against the basis (two passes) and append it.
    /// Returns false if `w` lies numerically in the span.
    fn push(&mut self, a: &SymMatrix, b: &SymMatrix, mut w: Vec<f64>) -> bool {
        let mut bw = b.apply(&w);
        let n0 = dot(&w, &bw).max(0.0).sqrt();
        if n0 == 0.0 || !n0.is_finite() {
            return false;
        }
        for _ in 0..2 {
            let c: Vec<f64> = self.bv.iter().map(|bv| dot(bv, &w)).collect();
            for (cj, vj) in c.iter().zip(&self.v) {
                if *cj != 0.0 {
                    for (wi, vi) in w.iter_mut().zip(vj) {
                        *wi -= cj * vi;
                    }
                }
            }
            bw = b.apply(&w);
        }
        let nrm = dot(&w, &bw).max(0.0).sqrt();
        if nrm <= 1e-10 * n0 {
            return false;
        }
        for (wi, bi) in w.iter_mut().zip(bw.iter_mut()) {
            *wi /= nrm;
            *bi /= nrm;
        }
        let aw = a.apply(&w);
        let j = self.v.len();
        let mut row: Vec<f64> = self.v.iter().map(|vi| dot(vi, &aw)).collect();
        row.push(dot(&w, &aw));
        for (i, ti) in self.t.iter_mut().enumerate() {
            ti.push(row[i]);
        }
        self.t.push(row);
        debug_assert_eq!(self.t.len(), j + 1);
        self.v.push(w);
        self.bv.push(bw);
        self.av.push(aw);
        true
    }

    /// Ritz pairs of the projected problem, ascending.
    fn ritz(&self) -> (Vec<f64>, Mat<f64>) {
        let m = self.len();
        let t = Mat::<f64>::from_fn(m, m, |i, j| 0.5 * (self.t[i][j] + self.t[j][i]));
        let eig = t.self_adjoint_eigen(Side::Lower).expect("small symmetric eigenproblem");
        let vals = (0..m).map(|i| eig.S()[i]).collect();
        (vals, eig.U().to_owned())
    }

    fn combine(&self, cols: &[Vec<f64>], y: &Mat<f64>, j: usize) -> Vec<f64> {
        let mut x = vec![0.0; self.n];
        for (i, c) in cols.iter().enumerate() {
            let yi = y[(i, j)];
            if yi != 0.0 {
                for (xv, cv) in x.iter_mut().zip(c) {
                    *xv += yi * cv;
                }
            }
        }
        x
    }
}

pub(super) fn block_lanczos(a: &SymMatrix, b: &SymMatrix, req: &EigenRequest) -> Result<EigenPairs> {
    let n = a.dim();
    let k = req.k;
    let p = BLOCK.min(n);
    let sigma = if req.shift != 0.0 {
        req.shift
    } else {
        -1e-6 * (a.trace() / b.trace()).abs().max(1e-300)
    };
    let factor = match Factor::special(a, b, sigma) {
        Some(f) => f,
        None => Factor::new(&a.shifted(b, sigma))?,
    };
    let (na, nb) = (a.norm1(), b.norm1());
    let cap = n.min((k + 2 * p).max(3 * k + 2 * p).max(6 * p) + p);
    let keep = (k + p).min(cap.saturating_sub(p)).max(k);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);

    let mut basis = Basis { n, v: Vec::new(), bv: Vec::new(), av: Vec::new(), t: Vec::new() };
    let mut block: Vec<Vec<f64>> = (0..p).map(|_| (0..n).map(|_| rng.gen::<f64>() - 0.5).collect()).collect();
    let mut best: Option<EigenPairs> = None;
    let mut restarts = 0;

    loop {
        // apply (A - sigma B)^{-1} B to the current block and extend
        let mut x = Mat::<f64>::zeros(n, block.len());
        for (j, v) in block.iter().enumerate() {
            b.matvec(v, x.col_as_slice_mut(j));
        }
        factor.solve_block(&mut x);
        let mut added = Vec::new();
        for j in 0..x.ncols() {
            if basis.len() >= cap {
                break;
            }
            let w = x.col_as_slice(j).to_vec();
            if basis.push(a, b, w) {
                added.push(basis.v.len() - 1);
            }
        }
        // replace a collapsed block with fresh random directions
        let mut tries = 0;
        while added.len() < p.min(cap - basis.len().min(cap)).max(if basis.len() < k { 1 } else { 0 }) && tries < 4 * p {
            tries += 1;
            let w: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() - 0.5).collect();
            if basis.push(a, b, w) {
                added.push(basis.v.len() - 1);
            }
        }
        let full = basis.len() >= cap || basis.len() == n;
        if basis.len() >= k + p.min(n - k) || full {
            let (theta, y) = basis.ritz();
            let m = basis.len();
            let want = k.min(m);
            let mut vals = Vec::with_capacity(want);
            let mut vecs = Vec::with_capacity(want);
            let mut res = Vec::with_capacity(want);
            for j in 0..want {
                let xj = basis.combine(&basis.v, &y, j);
                vals.push(theta[j]);
                res.push(scaled_residual(a, b, na, nb, theta[j], &xj));
                vecs.push(xj);
            }
            let converged = want == k && res.iter().all(|&r| r <= req.tol);
            let cand = EigenPairs { values: vals, vectors: vecs, residuals: res, converged };
            if converged {
                return Ok(cand);
            }
            let better = match &best {
                None => true,
                Some(bp) => cand.values.len() >= bp.values.len() && cand.max_residual() <= bp.max_residual(),
            };
            if better {
                best = Some(cand);
            }
            if full {
                if basis.len() == n || restarts >= req.max_iter {
                    return Ok(best.unwrap());
                }
                restarts += 1;
                // thick restart on the leading Ritz vectors
                let kk = keep.min(m);
                let v: Vec<Vec<f64>> = (0..kk).map(|j| basis.combine(&basis.v, &y, j)).collect();
                let bv: Vec<Vec<f64>> = (0..kk).map(|j| basis.combine(&basis.bv, &y, j)).collect();
                let av: Vec<Vec<f64>> = (0..kk).map(|j| basis.combine(&basis.av, &y, j)).collect();
                let mut t = vec![vec![0.0; kk]; kk];
                for (i, ti) in t.iter_mut().enumerate() {
                    ti[i] = theta[i];
                }
                // next block: the unconverged Ritz vectors, then the next ones
                let first_bad = best.as_ref().map(|bp| bp.residuals.iter().position(|&r| r > req.tol).unwrap_or(0)).unwrap_or(0);
                let lo = first_bad.min(kk.saturating_sub(p));
                block = v[lo..(lo + p).min(kk)].to_vec();
                basis = Basis { n, v, bv, av, t };
                continue;
            }
        }
        block = added.iter().map(|&i| basis.v[i].clone()).collect();
        if block.is_empty() {
            block = (0..p).map(|_| (0..n).map(|_| rng.gen::<f64>() - 0.5).collect()).collect();
        }
    }
}
