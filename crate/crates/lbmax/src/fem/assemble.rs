use rayon::prelude::*;

use super::mesh::{area_from_len2, TriMesh};
use crate::eigen::{solve_generalized, Csr, EigenRequest, Method, SymMatrix};
use crate::error::{invalid, Error, Result};
use crate::result::EigenResult;

/// Conformal factor at mesh vertices, linear on each triangle.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshConformalFactor {
    pub values: Vec<f64>,
}

impl MeshConformalFactor {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
            return invalid("conformal factor must be finite and strictly positive");
        }
        Ok(MeshConformalFactor { values })
    }

    pub fn constant(n: usize, c: f64) -> Self {
        MeshConformalFactor { values: vec![c; n] }
    }
}

/// Stiffness and weighted mass matrices of the P1 discretization.
#[derive(Debug, Clone)]
pub struct AssembledPair {
    pub stiffness: Csr,
    pub mass: Csr,
}

const CHUNK: usize = 1024;

/// Per-triangle local matrices: (stiffness 3x3, area, cotangents).
fn local_stiffness(l: [f64; 3]) -> Option<([[f64; 3]; 3], f64)> {
    let area = area_from_len2(l);
    if !(area > 0.0) {
        return None;
    }
    // cot of the angle at corner i, edge i is opposite corner i
    let cot = |i: usize| (l[(i + 1) % 3] + l[(i + 2) % 3] - l[i]) / (4.0 * area);
    let mut k = [[0.0; 3]; 3];
    for i in 0..3 {
        let (j, m) = ((i + 1) % 3, (i + 2) % 3);
        let w = 0.5 * cot(i);
        k[j][m] -= w;
        k[m][j] -= w;
        k[j][j] += w;
        k[m][m] += w;
    }
    Some((k, area))
}

/// Weighted mass with omega interpolated linearly, integrated exactly.
fn local_mass(area: f64, w: [f64; 3]) -> [[f64; 3]; 3] {
    let mut m = [[0.0; 3]; 3];
    for i in 0..3 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        m[i][i] = area * (w[i] / 10.0 + (w[j] + w[k]) / 30.0);
        m[i][j] = area * ((w[i] + w[j]) / 30.0 + w[k] / 60.0);
        m[j][i] = m[i][j];
    }
    m
}

/// Assemble stiffness and mass; `omega = None` means the unit factor.
pub fn assemble(mesh: &TriMesh, omega: Option<&MeshConformalFactor>) -> Result<AssembledPair> {
    let n = mesh.num_vertices();
    if let Some(w) = omega {
        if w.values.len() != n {
            return invalid(format!("conformal factor has {} values for {} vertices", w.values.len(), n));
        }
    }
    let nt = mesh.num_triangles();
    let chunks: Vec<Result<(Vec<(usize, usize, f64)>, Vec<(usize, usize, f64)>)>> = (0..nt.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut ka = Vec::with_capacity(9 * CHUNK);
            let mut mb = Vec::with_capacity(9 * CHUNK);
            for t in c * CHUNK..((c + 1) * CHUNK).min(nt) {
                let tri = mesh.triangles[t];
                let (k, area) = local_stiffness(mesh.tri_len2(t)).ok_or(Error::DegenerateTriangle(t))?;
                let w = match omega {
                    Some(o) => [o.values[tri[0]], o.values[tri[1]], o.values[tri[2]]],
                    None => [1.0; 3],
                };
                let m = local_mass(area, w);
                for i in 0..3 {
                    for j in 0..3 {
                        ka.push((tri[i], tri[j], k[i][j]));
                        mb.push((tri[i], tri[j], m[i][j]));
                    }
                }
            }
            Ok((ka, mb))
        })
        .collect();
    let mut ka = Vec::with_capacity(9 * nt);
    let mut mb = Vec::with_capacity(9 * nt);
    for c in chunks {
        let (k, m) = c?;
        ka.extend(k);
        mb.extend(m);
    }
    Ok(AssembledPair { stiffness: Csr::from_triplets(n, &ka), mass: Csr::from_triplets(n, &mb) })
}

/// Per-vertex lumped area: one third of the incident triangle areas.
pub fn lumped_areas(mesh: &TriMesh) -> Vec<f64> {
    let mut m = vec![0.0; mesh.num_vertices()];
    for t in 0..mesh.num_triangles() {
        let a = mesh.triangle_area(t) / 3.0;
        for &v in &mesh.triangles[t] {
            m[v] += a;
        }
    }
    m
}

/// Mass matrix of a single hat function weight: entries of the matrix
/// M^(l) with (M^(l))_ij = integral of e_l e_i e_j, accumulated into
/// `out[l] = x^T M^(l) x` for a given vector x.
pub fn hat_quadratic_forms(mesh: &TriMesh, x: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; mesh.num_vertices()];
    for t in 0..mesh.num_triangles() {
        let tri = mesh.triangles[t];
        let area = mesh.triangle_area(t);
        for l in 0..3 {
            let mut w = [0.0; 3];
            w[l] = 1.0;
            let m = local_mass(area, w);
            let mut s = 0.0;
            for i in 0..3 {
                for j in 0..3 {
                    s += m[i][j] * x[tri[i]] * x[tri[j]];
                }
            }
            out[tri[l]] += s;
        }
    }
    out
}

/// FEM problem on a fixed mesh: the stiffness matrix is assembled once.
#[derive(Debug, Clone)]
pub struct MeshProblem {
    pub mesh: TriMesh,
    pub stiffness: Csr,
    pub lumped: Vec<f64>,
    pub method: Method,
    pub tol: f64,
}

impl MeshProblem {
    pub fn new(mesh: TriMesh) -> Result<Self> {
        mesh.validate()?;
        let pair = assemble(&mesh, None)?;
        let lumped = lumped_areas(&mesh);
        Ok(MeshProblem { mesh, stiffness: pair.stiffness, lumped, method: Method::Auto, tol: 1e-9 })
    }

    pub fn with_method(mut self, m: Method) -> Self {
        self.method = m;
        self
    }

    pub fn mass(&self, omega: &MeshConformalFactor) -> Result<Csr> {
        Ok(assemble(&self.mesh, Some(omega))?.mass)
    }

    pub fn solve(&self, omega: &MeshConformalFactor, k_max: usize) -> Result<EigenResult> {
        MeshConformalFactor::new(omega.values.clone())?;
        let mass = self.mass(omega)?;
        solve_pair(&self.stiffness, mass, k_max, self.method, self.tol)
    }
}

fn solve_pair(stiffness: &Csr, mass: Csr, k_max: usize, method: Method, tol: f64) -> Result<EigenResult> {
    let volume = mass.sum();
    let a = SymMatrix::Sparse(stiffness.clone());
    let b = SymMatrix::Sparse(mass);
    let mut req = EigenRequest::new(k_max + 1).method(method);
    req.tol = tol;
    let pairs = solve_generalized(&a, &b, &req)?;
    if !pairs.converged {
        return Err(Error::NoConvergence { max_residual: pairs.max_residual(), iterations: req.max_iter });
    }
    Ok(EigenResult::new(pairs.values, pairs.vectors, volume, pairs.residuals))
}

/// Smallest k_max+1 eigenpairs of A x = lambda B x on the mesh.
pub fn solve_mesh(mesh: &TriMesh, omega: Option<&MeshConformalFactor>, k_max: usize) -> Result<EigenResult> {
    mesh.validate()?;
    let pair = assemble(mesh, omega)?;
    solve_pair(&pair.stiffness, pair.mass, k_max, Method::Auto, 1e-9)
}
