//! Spectral collocation on the periodic square [0, 2pi]^2.
//!
//! The (a,b)-flat torus is pulled back to the square, where its
//! Laplace-Beltrami operator becomes
//! -(4pi^2/b^2) [(a^2+b^2) d_xx - 2a d_xy + d_yy]
//! and derivatives are applied with the periodic Toeplitz stencils.
//! Grid values are stored row-major with x fastest: index = j * n + i for
//! the node (x_i, y_j) = (i h, j h).

use std::f64::consts::PI;

use crate::eigen::{solve_generalized, EigenRequest, Kron2, Method, SymMatrix};
use crate::error::{invalid, Error, Result};
use crate::lattice::TorusParams;
use crate::moduli::Move;
use crate::result::EigenResult;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodicGrid {
    pub n: usize,
    pub h: f64,
}

impl PeriodicGrid {
    pub fn new(n: usize) -> Result<Self> {
        if n < 8 || n % 2 != 0 {
            return invalid(format!("grid size must be even and at least 8, got {n}"));
        }
        Ok(PeriodicGrid { n, h: 2.0 * PI / n as f64 })
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Coordinates (x, y) of the node with flat index `idx`.
    pub fn node(&self, idx: usize) -> (f64, f64) {
        ((idx % self.n) as f64 * self.h, (idx / self.n) as f64 * self.h)
    }

    /// Quadrature weight of one node for the flat measure of the (a,b) torus.
    pub fn node_weight(&self, p: &TorusParams) -> f64 {
        p.b / (4.0 * PI * PI) * self.h * self.h
    }
}

/// Conformal factor sampled at the grid nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct GridConformalFactor {
    pub n: usize,
    pub values: Vec<f64>,
}

impl GridConformalFactor {
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n * n {
            return invalid(format!("expected {} grid values, got {}", n * n, values.len()));
        }
        if values.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
            return invalid("conformal factor must be finite and strictly positive");
        }
        Ok(GridConformalFactor { n, values })
    }

    pub fn constant(n: usize, c: f64) -> Self {
        GridConformalFactor { n, values: vec![c; n * n] }
    }

    pub fn from_fn(grid: &PeriodicGrid, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let v = (0..grid.len()).map(|i| {
            let (x, y) = grid.node(i);
            f(x, y)
        });
        GridConformalFactor::new(grid.n, v.collect())
    }
}

fn check_stencil_size(n: usize) -> Result<()> {
    if n < 4 || n % 2 != 0 {
        return invalid(format!("Toeplitz stencils need even n >= 4, got {n}"));
    }
    Ok(())
}

/// First-derivative periodic stencil, n x n row-major.
pub fn toeplitz_d(n: usize) -> Result<Vec<f64>> {
    check_stencil_size(n)?;
    let h = 2.0 * PI / n as f64;
    let col: Vec<f64> = (0..n)
        .map(|k| if k == 0 { 0.0 } else { 0.5 * sign(k) / (0.5 * k as f64 * h).tan() })
        .collect();
    Ok(toeplitz(n, &col))
}

/// Second-derivative periodic stencil, n x n row-major.
pub fn toeplitz_d2(n: usize) -> Result<Vec<f64>> {
    check_stencil_size(n)?;
    let h = 2.0 * PI / n as f64;
    let col: Vec<f64> = (0..n)
        .map(|k| {
            if k == 0 {
                -PI * PI / (3.0 * h * h) - 1.0 / 6.0
            } else {
                let s = (0.5 * k as f64 * h).sin();
                -0.5 * sign(k) / (s * s)
            }
        })
        .collect();
    Ok(toeplitz(n, &col))
}

fn sign(k: usize) -> f64 {
    if k % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

// entry (i, j) depends on (i - j) mod n
fn toeplitz(n: usize, col: &[f64]) -> Vec<f64> {
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            m[i * n + j] = col[(i + n - j) % n];
        }
    }
    m
}

/// Coefficients (c_xx, c_xy, c_yy) with -Delta = c_xx Dxx + c_xy Dxy + c_yy Dyy.
fn coefficients(p: &TorusParams) -> (f64, f64, f64) {
    let s = -4.0 * PI * PI / (p.b * p.b);
    (s * (p.a * p.a + p.b * p.b), -2.0 * s * p.a, s)
}

/// Dense n^2 x n^2 matrix c_xx Dxx + c_xy Dxy + c_yy Dyy on the grid.
pub fn assemble_second_order(grid: &PeriodicGrid, cxx: f64, cxy: f64, cyy: f64) -> Vec<f64> {
    let n = grid.n;
    let d = toeplitz_d(n).expect("grid sizes are valid stencil sizes");
    let d2 = toeplitz_d2(n).expect("grid sizes are valid stencil sizes");
    let nn = n * n;
    let mut m = vec![0.0; nn * nn];
    for j in 0..n {
        for jp in 0..n {
            let djj = d[j * n + jp];
            let d2jj = d2[j * n + jp];
            for i in 0..n {
                let row = (j * n + i) * nn + jp * n;
                let out = &mut m[row..row + n];
                for (ip, o) in out.iter_mut().enumerate() {
                    // the mixed product (I x D)(D x I) = D x D since the factors commute
                    let mut v = cxy * d[i * n + ip] * djj;
                    if j == jp {
                        v += cxx * d2[i * n + ip];
                    }
                    if i == ip {
                        v += cyy * d2jj;
                    }
                    *o = v;
                }
            }
        }
    }
    m
}

/// Dense matrix of -Delta for the (a,b)-flat torus pulled back to the grid.
pub fn assemble_lb(p: TorusParams, grid: &PeriodicGrid) -> Result<SymMatrix> {
    p.validate()?;
    let (cxx, cxy, cyy) = coefficients(&p);
    let mut m = assemble_second_order(grid, cxx, cxy, cyy);
    symmetrize(&mut m, grid.len());
    Ok(SymMatrix::dense(grid.len(), m))
}

pub(crate) fn symmetrize(m: &mut [f64], n: usize) {
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (m[i * n + j] + m[j * n + i]);
            m[i * n + j] = v;
            m[j * n + i] = v;
        }
    }
}

/// c_xx Dxx + c_xy Dxy + c_yy Dyy in separable form, applied in O(n^3).
pub fn second_order_operator(grid: &PeriodicGrid, cxx: f64, cxy: f64, cyy: f64) -> SymMatrix {
    let n = grid.n;
    let d = toeplitz_d(n).expect("grid sizes are valid stencil sizes");
    let d2 = toeplitz_d2(n).expect("grid sizes are valid stencil sizes");
    SymMatrix::Kron(Kron2 { n, d, d2, cxx, cxy, cyy })
}

/// -Delta of the (a,b)-flat torus on the grid in separable form.
pub fn lb_operator(p: TorusParams, grid: &PeriodicGrid) -> Result<SymMatrix> {
    p.validate()?;
    let (cxx, cxy, cyy) = coefficients(&p);
    Ok(second_order_operator(grid, cxx, cxy, cyy))
}

/// A flat torus on a fixed grid with its assembled operator, reusable across
/// many conformal factors.
#[derive(Debug, Clone)]
pub struct GridProblem {
    pub params: TorusParams,
    pub grid: PeriodicGrid,
    pub operator: SymMatrix,
    pub method: Method,
}

impl GridProblem {
    pub fn new(params: TorusParams, n: usize) -> Result<Self> {
        let grid = PeriodicGrid::new(n)?;
        let operator = lb_operator(params, &grid)?;
        Ok(GridProblem { params, grid, operator, method: Method::Auto })
    }

    pub fn with_method(mut self, m: Method) -> Self {
        self.method = m;
        self
    }

    pub fn volume(&self, omega: &GridConformalFactor) -> f64 {
        self.grid.node_weight(&self.params) * omega.values.iter().sum::<f64>()
    }

    pub fn solve(&self, omega: &GridConformalFactor, k_max: usize) -> Result<EigenResult> {
        if omega.n != self.grid.n {
            return invalid("conformal factor does not match the grid");
        }
        GridConformalFactor::new(omega.n, omega.values.clone())?;
        let w = self.grid.node_weight(&self.params);
        let b = SymMatrix::Diagonal(omega.values.clone());
        let req = EigenRequest::new(k_max + 1).method(self.method);
        let pairs = solve_generalized(&self.operator, &b, &req)?;
        if !pairs.converged {
            return Err(Error::NoConvergence { max_residual: pairs.max_residual(), iterations: req.max_iter });
        }
        let s = 1.0 / w.sqrt();
        let vecs = pairs.vectors.into_iter().map(|v| v.into_iter().map(|x| x * s).collect()).collect();
        // the discrete operator has eigenvalues w.r.t. the unit-weight grid;
        // both sides carry the same quadrature weight so lambda is unchanged
        Ok(EigenResult::new(pairs.values, vecs, self.volume(omega), pairs.residuals))
    }
}

/// Smallest k_max+1 eigenpairs of -Delta psi = lambda omega psi.
pub fn solve_weighted(p: TorusParams, grid: &PeriodicGrid, omega: &GridConformalFactor, k_max: usize) -> Result<EigenResult> {
    GridProblem { params: p, grid: *grid, operator: lb_operator(p, grid)?, method: Method::Auto }.solve(omega, k_max)
}

/// Carry grid values along one moduli move so that the weighted torus is
/// isometric before and after.
pub fn transport(values: &[f64], n: usize, m: Move) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for j in 0..n {
        for i in 0..n {
            let src = match m {
                Move::Reflect => j * n + (n - i) % n,
                Move::Shift(s) => {
                    let si = (i as i64 + s * j as i64).rem_euclid(n as i64) as usize;
                    j * n + si
                }
                Move::Invert => ((n - i) % n) * n + j,
            };
            out[j * n + i] = values[src];
        }
    }
    out
}
