//! Derivatives of simple eigenvalues with respect to the conformal factor
//! and the flat-torus moduli, and the product rule for Lambda = lambda * vol.
//!
//! All formulas are derivatives of the discrete eigenproblem, so they agree
//! with finite differences of the discrete eigenvalues.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::fem::{hat_quadratic_forms, MeshProblem, TriMesh};
use crate::lattice::TorusParams;
use crate::result::EigenResult;
use crate::eigen::SymMatrix;
use crate::spectral::{second_order_operator, GridProblem};

/// Default relative gap below which an eigenvalue counts as multiple.
pub const SIMPLICITY_GAP: f64 = 1e-6;

/// Derivatives of one eigenvalue and of its normalized value.
///
/// `d_omega` is a density against the unweighted base measure: the
/// derivative in direction delta-omega is sum_i measure_i d_omega_i delta_i.
#[derive(Debug, Clone, Serialize)]
pub struct EigenGradient {
    pub lambda: f64,
    pub volume: f64,
    pub d_omega: Vec<f64>,
    pub d_a: Option<f64>,
    pub d_b: Option<f64>,
    pub d_omega_normalized: Vec<f64>,
    pub d_a_normalized: Option<f64>,
    pub d_b_normalized: Option<f64>,
    /// false when the gap to a neighbouring eigenvalue is below the threshold
    pub simple: bool,
}

fn check_index(res: &EigenResult, k: usize) -> Result<()> {
    if k >= res.eigenvalues.len() || k >= res.eigenvectors.len() {
        return invalid(format!("eigenpair {k} not available"));
    }
    Ok(())
}

/// Is lambda_k separated from its neighbours? Needs lambda_{k+1} in `res`
/// for a two-sided check.
pub fn is_simple(res: &EigenResult, k: usize, threshold: f64) -> bool {
    let l = res.eigenvalues[k];
    let tol = threshold * l.abs().max(1.0);
    let below = k == 0 || l - res.eigenvalues[k - 1] > tol;
    let above = k + 1 >= res.eigenvalues.len() || res.eigenvalues[k + 1] - l > tol;
    below && above
}

/// Normalized gradients by the product rule.
///
/// `dvol_omega` is the density of d(vol)/d(omega) against the same base
/// measure as `d_omega`; for the flat torus d(vol)/db = vol/b and
/// d(vol)/da = 0.
pub fn grad_normalized(lambda: f64, vol: f64, d_omega: &[f64], dvol_omega: &[f64], d_a: Option<f64>, d_b: Option<f64>, b: Option<f64>) -> Result<(Vec<f64>, Option<f64>, Option<f64>)> {
    if !(vol > 0.0) {
        return invalid("volume must be positive");
    }
    let dw = d_omega.iter().zip(dvol_omega).map(|(g, m)| vol * g + lambda * m).collect();
    let da = d_a.map(|g| vol * g);
    let db = match (d_b, b) {
        (Some(g), Some(b)) => Some(vol * g + lambda * vol / b),
        _ => None,
    };
    Ok((dw, da, db))
}

/// Grid omega-gradient density: -lambda psi^2 at each node.
pub fn grad_omega_grid(res: &EigenResult, k: usize) -> Result<Vec<f64>> {
    check_index(res, k)?;
    let l = res.eigenvalues[k];
    Ok(res.eigenvectors[k].iter().map(|p| -l * p * p).collect())
}

fn quad_form(m: &SymMatrix, x: &[f64]) -> f64 {
    m.apply(x).iter().zip(x).map(|(a, b)| a * b).sum()
}

/// Moduli derivatives (d_a, d_b) of lambda_k on the spectral grid.
pub fn grad_moduli(problem: &GridProblem, res: &EigenResult, k: usize) -> Result<(f64, f64)> {
    check_index(res, k)?;
    let p = problem.params;
    let grid = &problem.grid;
    let w = grid.node_weight(&p);
    let psi = &res.eigenvectors[k];
    let l = res.eigenvalues[k];
    let s = 4.0 * PI * PI / (p.b * p.b);
    // Delta_a = (4pi^2/b^2) [2a Dxx - 2 Dxy]
    let da_op = second_order_operator(grid, s * 2.0 * p.a, -2.0 * s, 0.0);
    let dxx = second_order_operator(grid, 1.0, 0.0, 0.0);
    let d_a = -w * quad_form(&da_op, psi);
    let d_b = -2.0 * l / p.b - 8.0 * PI * PI / p.b * w * quad_form(&dxx, psi);
    Ok((d_a, d_b))
}

/// Full gradient of lambda_k and Lambda_k for a grid problem.
pub fn grid_gradient(problem: &GridProblem, res: &EigenResult, k: usize, with_moduli: bool) -> Result<EigenGradient> {
    let d_omega = grad_omega_grid(res, k)?;
    let (d_a, d_b) = if with_moduli {
        let (a, b) = grad_moduli(problem, res, k)?;
        (Some(a), Some(b))
    } else {
        (None, None)
    };
    let ones = vec![1.0; d_omega.len()];
    let l = res.eigenvalues[k];
    let (dwn, dan, dbn) = grad_normalized(l, res.volume, &d_omega, &ones, d_a, d_b, Some(problem.params.b))?;
    Ok(EigenGradient {
        lambda: l,
        volume: res.volume,
        d_omega,
        d_a,
        d_b,
        d_omega_normalized: dwn,
        d_a_normalized: dan,
        d_b_normalized: dbn,
        simple: is_simple(res, k, SIMPLICITY_GAP),
    })
}

/// Mesh omega-gradient density: -lambda * (x^T M^(l) x) / m_l with m_l the
/// lumped vertex area.
pub fn grad_omega_mesh(problem: &MeshProblem, res: &EigenResult, k: usize) -> Result<Vec<f64>> {
    check_index(res, k)?;
    let l = res.eigenvalues[k];
    let q = hat_quadratic_forms(&problem.mesh, &res.eigenvectors[k]);
    Ok(q.iter().zip(&problem.lumped).map(|(qi, mi)| -l * qi / mi).collect())
}

pub fn mesh_gradient(problem: &MeshProblem, res: &EigenResult, k: usize) -> Result<EigenGradient> {
    let d_omega = grad_omega_mesh(problem, res, k)?;
    let l = res.eigenvalues[k];
    let ones = vec![1.0; d_omega.len()];
    let (dwn, _, _) = grad_normalized(l, res.volume, &d_omega, &ones, None, None, None)?;
    Ok(EigenGradient {
        lambda: l,
        volume: res.volume,
        d_omega,
        d_a: None,
        d_b: None,
        d_omega_normalized: dwn,
        d_a_normalized: None,
        d_b_normalized: None,
        simple: is_simple(res, k, SIMPLICITY_GAP),
    })
}

/// Moduli derivatives of lambda_k on a flat-torus mesh built by
/// `torus_mesh`, using parameter-space derivatives of the hat functions.
///
/// In parameter coordinates (s, t) the stiffness is
/// (1/b) int [(a^2+b^2) u_s v_s - a (u_s v_t + u_t v_s) + u_t v_t] and the
/// weighted mass is b int omega u v, so d/da and d/db act on these pieces.
pub fn grad_moduli_mesh(mesh: &TriMesh, p: TorusParams, res: &EigenResult, k: usize) -> Result<(f64, f64)> {
    check_index(res, k)?;
    let uv = match &mesh.uv {
        Some(uv) => uv,
        None => return invalid("moduli gradient on a mesh needs parameter coordinates"),
    };
    let x = &res.eigenvectors[k];
    let l = res.eigenvalues[k];
    let wrap = |d: f64| d - (d + 0.5).floor();
    let (mut kss, mut kst, mut ktt) = (0.0, 0.0, 0.0);
    for tri in &mesh.triangles {
        let p0 = uv[tri[0]];
        let e1 = [wrap(uv[tri[1]][0] - p0[0]), wrap(uv[tri[1]][1] - p0[1])];
        let e2 = [wrap(uv[tri[2]][0] - p0[0]), wrap(uv[tri[2]][1] - p0[1])];
        let det = e1[0] * e2[1] - e1[1] * e2[0];
        let area = 0.5 * det.abs();
        // gradients of the hat functions in (s, t)
        let g1 = [e2[1] / det, -e2[0] / det];
        let g2 = [-e1[1] / det, e1[0] / det];
        let g0 = [-g1[0] - g2[0], -g1[1] - g2[1]];
        let gx = [g0, g1, g2];
        let fs: f64 = (0..3).map(|i| gx[i][0] * x[tri[i]]).sum();
        let ft: f64 = (0..3).map(|i| gx[i][1] * x[tri[i]]).sum();
        kss += area * fs * fs;
        kst += area * 2.0 * fs * ft;
        ktt += area * ft * ft;
    }
    let (a, b) = (p.a, p.b);
    let d_a = (2.0 * a * kss - kst) / b;
    // x^T M x = 1 and M scales like b
    let d_b = -(a * a * kss - a * kst + ktt) / (b * b) + kss - l / b;
    Ok((d_a, d_b))
}
