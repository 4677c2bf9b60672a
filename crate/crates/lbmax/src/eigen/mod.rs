//! Generalized symmetric eigenproblems A x = lambda B x with B positive
//! definite, smallest eigenpairs first.
//!
//! Two independent routes are provided: a full dense solve after Cholesky
//! reduction (`dense_reference`) and shift-invert block Lanczos with full
//! reorthogonalization in the B-inner product.

mod circulant;
mod lanczos;
pub mod skyline;
pub mod sparse;

use faer::linalg::triangular_solve::{solve_lower_triangular_in_place, solve_upper_triangular_in_place};
use faer::{Mat, MatRef, Par, Side};

use crate::error::{invalid, Error, Result};
pub use sparse::Csr;

/// Symmetric matrix in one of the storage forms used by the solvers.
#[derive(Debug, Clone)]
pub enum SymMatrix {
    /// n x n, row-major (equal to column-major by symmetry)
    Dense { n: usize, data: Vec<f64> },
    Sparse(Csr),
    Diagonal(Vec<f64>),
    /// c_xx (I x D2) + c_xy (D x D) + c_yy (D2 x I) on an n x n grid stored
    /// with x fastest, from 1D stencils D (antisymmetric) and D2
    /// (symmetric), each n x n row-major
    Kron(Kron2),
}

/// Separable second-order operator on a periodic n x n grid.
#[derive(Debug, Clone)]
pub struct Kron2 {
    pub n: usize,
    pub d: Vec<f64>,
    pub d2: Vec<f64>,
    pub cxx: f64,
    pub cxy: f64,
    pub cyy: f64,
}

impl Kron2 {
    // y[j][i] = sum_l m[i][l] x[j][l]: the stencil along x
    fn along_x(&self, m: &[f64], x: &[f64], y: &mut [f64]) {
        let n = self.n;
        for j in 0..n {
            let xr = &x[j * n..(j + 1) * n];
            for i in 0..n {
                y[j * n + i] = m[i * n..(i + 1) * n].iter().zip(xr).map(|(a, b)| a * b).sum();
            }
        }
    }

    // y[j][i] = sum_l m[j][l] x[l][i]: the stencil along y
    fn along_y(&self, m: &[f64], x: &[f64], y: &mut [f64]) {
        let n = self.n;
        y.iter_mut().for_each(|v| *v = 0.0);
        for j in 0..n {
            let yr = &mut y[j * n..(j + 1) * n];
            for l in 0..n {
                let c = m[j * n + l];
                if c != 0.0 {
                    for (yv, xv) in yr.iter_mut().zip(&x[l * n..(l + 1) * n]) {
                        *yv += c * xv;
                    }
                }
            }
        }
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        let nn = self.n * self.n;
        let mut t = vec![0.0; nn];
        let mut u = vec![0.0; nn];
        self.along_x(&self.d2, x, y);
        y.iter_mut().for_each(|v| *v *= self.cxx);
        self.along_y(&self.d2, x, &mut t);
        for (yv, tv) in y.iter_mut().zip(&t) {
            *yv += self.cyy * tv;
        }
        if self.cxy != 0.0 {
            self.along_x(&self.d, x, &mut t);
            self.along_y(&self.d, &t, &mut u);
            for (yv, uv) in y.iter_mut().zip(&u) {
                *yv += self.cxy * uv;
            }
        }
    }

    /// Entry ((j, i), (jp, ip)).
    fn entry(&self, j: usize, i: usize, jp: usize, ip: usize) -> f64 {
        let n = self.n;
        let mut v = self.cxy * self.d[i * n + ip] * self.d[j * n + jp];
        if j == jp {
            v += self.cxx * self.d2[i * n + ip];
        }
        if i == ip {
            v += self.cyy * self.d2[j * n + jp];
        }
        v
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.n;
        let nn = n * n;
        let mut m = vec![0.0; nn * nn];
        for j in 0..n {
            for i in 0..n {
                let row = &mut m[(j * n + i) * nn..(j * n + i + 1) * nn];
                for jp in 0..n {
                    for ip in 0..n {
                        row[jp * n + ip] = self.entry(j, i, jp, ip);
                    }
                }
            }
        }
        m
    }

    /// Row sums of absolute values; rows differ only through the stencils,
    /// which are circulant, so every row has the same sum.
    fn norm1(&self) -> f64 {
        let n = self.n;
        let mut s = 0.0;
        for jp in 0..n {
            for ip in 0..n {
                s += self.entry(0, 0, jp, ip).abs();
            }
        }
        s
    }

    fn trace(&self) -> f64 {
        let n = self.n;
        (0..n).flat_map(|j| (0..n).map(move |i| (j, i))).map(|(j, i)| self.entry(j, i, j, i)).sum()
    }
}

impl SymMatrix {
    pub fn dense(n: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), n * n);
        SymMatrix::Dense { n, data }
    }

    pub fn dim(&self) -> usize {
        match self {
            SymMatrix::Dense { n, .. } => *n,
            SymMatrix::Sparse(c) => c.n,
            SymMatrix::Diagonal(d) => d.len(),
            SymMatrix::Kron(k) => k.n * k.n,
        }
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        match self {
            SymMatrix::Dense { n, data } => {
                for (i, yi) in y.iter_mut().enumerate().take(*n) {
                    let row = &data[i * n..(i + 1) * n];
                    *yi = row.iter().zip(x).map(|(a, b)| a * b).sum();
                }
            }
            SymMatrix::Sparse(c) => c.matvec(x, y),
            SymMatrix::Diagonal(d) => {
                for i in 0..d.len() {
                    y[i] = d[i] * x[i];
                }
            }
            SymMatrix::Kron(k) => k.matvec(x, y),
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim()];
        self.matvec(x, &mut y);
        y
    }

    /// Largest absolute row sum.
    pub fn norm1(&self) -> f64 {
        match self {
            SymMatrix::Dense { n, data } => {
                (0..*n).map(|i| data[i * n..(i + 1) * n].iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
            }
            SymMatrix::Sparse(c) => c.norm1(),
            SymMatrix::Diagonal(d) => d.iter().fold(0.0, |m, v| m.max(v.abs())),
            SymMatrix::Kron(k) => k.norm1(),
        }
    }

    pub fn trace(&self) -> f64 {
        match self {
            SymMatrix::Dense { n, data } => (0..*n).map(|i| data[i * n + i]).sum(),
            SymMatrix::Sparse(c) => c.diagonal().iter().sum(),
            SymMatrix::Diagonal(d) => d.iter().sum(),
            SymMatrix::Kron(k) => k.trace(),
        }
    }

    pub fn to_dense(&self) -> Vec<f64> {
        match self {
            SymMatrix::Dense { data, .. } => data.clone(),
            SymMatrix::Sparse(c) => c.to_dense(),
            SymMatrix::Diagonal(d) => {
                let n = d.len();
                let mut m = vec![0.0; n * n];
                for i in 0..n {
                    m[i * n + i] = d[i];
                }
                m
            }
            SymMatrix::Kron(k) => k.to_dense(),
        }
    }

    fn as_faer(&self) -> Mat<f64> {
        let n = self.dim();
        match self {
            SymMatrix::Dense { data, .. } => MatRef::from_column_major_slice(data, n, n).to_owned(),
            _ => {
                let d = self.to_dense();
                MatRef::from_column_major_slice(&d, n, n).to_owned()
            }
        }
    }

    /// self - sigma * other, keeping the cheapest storage that fits both.
    pub fn shifted(&self, other: &SymMatrix, sigma: f64) -> SymMatrix {
        use SymMatrix::*;
        match (self, other) {
            (Diagonal(a), Diagonal(b)) => Diagonal(a.iter().zip(b).map(|(x, y)| x - sigma * y).collect()),
            (Sparse(a), Sparse(b)) => Sparse(a.add_scaled(b, -sigma)),
            (Sparse(a), Diagonal(b)) => {
                let d = Csr::from_triplets(a.n, &b.iter().enumerate().map(|(i, &v)| (i, i, v)).collect::<Vec<_>>());
                Sparse(a.add_scaled(&d, -sigma))
            }
            (Kron(k), Diagonal(b)) => {
                let n = k.n * k.n;
                let mut m = k.to_dense();
                for i in 0..n {
                    m[i * n + i] -= sigma * b[i];
                }
                Dense { n, data: m }
            }
            (Dense { n, data }, Diagonal(b)) => {
                let mut m = data.clone();
                for i in 0..*n {
                    m[i * n + i] -= sigma * b[i];
                }
                Dense { n: *n, data: m }
            }
            _ => {
                let n = self.dim();
                let a = self.to_dense();
                let b = other.to_dense();
                Dense { n, data: a.iter().zip(&b).map(|(x, y)| x - sigma * y).collect() }
            }
        }
    }
}

/// Which route `solve_generalized` takes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    /// full dense for small problems or many requested pairs, Lanczos otherwise
    #[default]
    Auto,
    Dense,
    Lanczos,
}

#[derive(Debug, Clone)]
pub struct EigenRequest {
    /// number of eigenpairs wanted (smallest first)
    pub k: usize,
    /// tolerance on the scaled residual
    pub tol: f64,
    /// cap on Lanczos restarts
    pub max_iter: usize,
    /// shift for shift-invert; 0 selects one automatically below the spectrum
    pub shift: f64,
    pub method: Method,
}

impl EigenRequest {
    pub fn new(k: usize) -> Self {
        EigenRequest { k, tol: 1e-9, max_iter: 40, shift: 0.0, method: Method::Auto }
    }

    pub fn method(mut self, m: Method) -> Self {
        self.method = m;
        self
    }
}

/// Eigenpairs in ascending order, eigenvectors B-orthonormal.
#[derive(Debug, Clone)]
pub struct EigenPairs {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    /// ||A x - lambda B x|| / (||x|| (||A||_1 + |lambda| ||B||_1))
    pub residuals: Vec<f64>,
    pub converged: bool,
}

impl EigenPairs {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().cloned().fold(0.0, f64::max)
    }

    pub fn into_result(self) -> Result<EigenPairs> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NoConvergence { max_residual: self.max_residual(), iterations: 0 })
        }
    }
}

pub const DENSE_CAP: usize = 5000;
const AUTO_DENSE_DIM: usize = 400;

pub fn scaled_residual(a: &SymMatrix, b: &SymMatrix, na: f64, nb: f64, lambda: f64, x: &[f64]) -> f64 {
    let ax = a.apply(x);
    let bx = b.apply(x);
    let r: f64 = ax.iter().zip(&bx).map(|(p, q)| (p - lambda * q).powi(2)).sum::<f64>().sqrt();
    let xn: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    r / (xn * (na + lambda.abs() * nb)).max(f64::MIN_POSITIVE)
}

fn check_pair(a: &SymMatrix, b: &SymMatrix) -> Result<usize> {
    let n = a.dim();
    if b.dim() != n {
        return invalid(format!("dimension mismatch: A is {n}, B is {}", b.dim()));
    }
    if n == 0 {
        return invalid("empty matrices");
    }
    Ok(n)
}

/// Smallest `req.k` eigenpairs of A x = lambda B x.
///
/// On non-convergence the best iterate is returned with `converged = false`.
pub fn solve_generalized(a: &SymMatrix, b: &SymMatrix, req: &EigenRequest) -> Result<EigenPairs> {
    let n = check_pair(a, b)?;
    if req.k < 1 || req.k > n {
        return invalid(format!("requested {} eigenpairs of a {n}-dimensional problem", req.k));
    }
    if req.tol <= 0.0 {
        return invalid("tolerance must be positive");
    }
    let method = match req.method {
        Method::Auto => {
            if n <= AUTO_DENSE_DIM || req.k * 4 > n {
                Method::Dense
            } else {
                Method::Lanczos
            }
        }
        m => m,
    };
    match method {
        Method::Dense => {
            if n > DENSE_CAP {
                return invalid(format!("dense path limited to dimension {DENSE_CAP}, got {n}"));
            }
            let (vals, vecs) = dense_pairs(a, b, Some(req.k))?;
            let (na, nb) = (a.norm1(), b.norm1());
            let residuals: Vec<f64> =
                vals.iter().zip(&vecs).map(|(&l, x)| scaled_residual(a, b, na, nb, l, x)).collect();
            let converged = residuals.iter().all(|&r| r <= req.tol);
            Ok(EigenPairs { values: vals, vectors: vecs, residuals, converged })
        }
        _ => lanczos::block_lanczos(a, b, req),
    }
}

/// Full ascending spectrum by dense Cholesky reduction and a symmetric
/// eigendecomposition. Independent of the Lanczos route.
pub fn dense_reference(a: &SymMatrix, b: &SymMatrix) -> Result<Vec<f64>> {
    let n = check_pair(a, b)?;
    if n > DENSE_CAP {
        return invalid(format!("dense reference limited to dimension {DENSE_CAP}, got {n}"));
    }
    Ok(dense_pairs(a, b, None)?.0)
}

/// Full dense solve returning the first `k` (or all) eigenpairs.
pub fn dense_pairs(a: &SymMatrix, b: &SymMatrix, k: Option<usize>) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = check_pair(a, b)?;
    let k = k.unwrap_or(n).min(n);
    let mut c = a.as_faer();
    // reduce to a standard problem C = L^{-1} A L^{-T}
    let back: Box<dyn Fn(&mut [f64])> = match b {
        SymMatrix::Diagonal(d) => {
            if d.iter().any(|&v| v <= 0.0 || !v.is_finite()) {
                return Err(Error::NotPositiveDefinite);
            }
            let s: Vec<f64> = d.iter().map(|v| 1.0 / v.sqrt()).collect();
            for j in 0..n {
                for i in 0..n {
                    c[(i, j)] *= s[i] * s[j];
                }
            }
            Box::new(move |y: &mut [f64]| {
                for i in 0..y.len() {
                    y[i] *= s[i];
                }
            })
        }
        _ => {
            let bm = b.as_faer();
            let llt = bm.llt(Side::Lower).map_err(|_| Error::NotPositiveDefinite)?;
            let l = llt.L().to_owned();
            solve_lower_triangular_in_place(l.as_ref(), c.as_mut(), Par::Seq);
            let mut ct = c.transpose().to_owned();
            solve_lower_triangular_in_place(l.as_ref(), ct.as_mut(), Par::Seq);
            c = ct;
            Box::new(move |y: &mut [f64]| {
                let mut m = Mat::<f64>::from_fn(y.len(), 1, |i, _| y[i]);
                solve_upper_triangular_in_place(l.transpose(), m.as_mut(), Par::Seq);
                for i in 0..y.len() {
                    y[i] = m[(i, 0)];
                }
            })
        }
    };
    // symmetrize against rounding
    for j in 0..n {
        for i in 0..j {
            let v = 0.5 * (c[(i, j)] + c[(j, i)]);
            c[(i, j)] = v;
            c[(j, i)] = v;
        }
    }
    let eig = c.self_adjoint_eigen(Side::Lower).map_err(|_| Error::NoConvergence { max_residual: f64::NAN, iterations: 0 })?;
    let s = eig.S();
    let u = eig.U();
    let mut vals = Vec::with_capacity(k);
    let mut vecs = Vec::with_capacity(k);
    for j in 0..k {
        vals.push(s[j]);
        let mut y: Vec<f64> = (0..n).map(|i| u[(i, j)]).collect();
        back(&mut y);
        vecs.push(y);
    }
    Ok((vals, vecs))
}
