//! Closed-form spectra of flat tori.
//!
//! The (a,b)-flat torus is the plane modulo the lattice spanned by (1,0) and
//! (a,b). Its Laplace-Beltrami eigenvalues are indexed by integer pairs
//! (c1,c2) of the dual lattice:
//!
//! lambda = 4 pi^2 [c1^2 (1 + a^2/b^2) - 2 c1 c2 a / b^2 + c2^2 / b^2].

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

const FOUR_PI2: f64 = 4.0 * PI * PI;

/// A point (a, b) of the upper half plane identifying an (a,b)-flat torus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusParams {
    pub a: f64,
    pub b: f64,
}

impl TorusParams {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        let p = TorusParams { a, b };
        p.validate()?;
        Ok(p)
    }

    pub fn square() -> Self {
        TorusParams { a: 0.0, b: 1.0 }
    }

    pub fn equilateral() -> Self {
        TorusParams { a: 0.5, b: 3f64.sqrt() / 2.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.a.is_finite() || !self.b.is_finite() {
            return invalid(format!("torus parameters must be finite, got ({}, {})", self.a, self.b));
        }
        if self.b <= 0.0 {
            return invalid(format!("torus parameter b must be positive, got {}", self.b));
        }
        Ok(())
    }

    /// Coefficients (q11, q12, q22) of the integer quadratic form
    /// c1^2 (a^2+b^2) - 2 a c1 c2 + c2^2; lambda is this times 4 pi^2 / b^2.
    fn form(&self) -> (f64, f64, f64) {
        (self.a * self.a + self.b * self.b, -self.a, 1.0)
    }

    /// Smallest eigenvalue of the unscaled quadratic form.
    fn form_min_eig(&self) -> f64 {
        let (p, q, r) = self.form();
        let tr = p + r;
        let disc = ((p - r) * (p - r) + 4.0 * q * q).sqrt();
        // det / larger root avoids cancellation
        let det = p * r - q * q;
        det / (0.5 * (tr + disc))
    }

    fn scale(&self) -> f64 {
        FOUR_PI2 / (self.b * self.b)
    }
}

/// One eigenvalue with the dual-lattice indices that produce it.
///
/// The pair (-c1, -c2) always produces the same value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeEigenvalue {
    pub lambda: f64,
    pub c1: i64,
    pub c2: i64,
}

impl LatticeEigenvalue {
    pub fn multiplicity_note(&self) -> String {
        if self.c1 == 0 && self.c2 == 0 {
            "constant".to_string()
        } else {
            format!("({},{}) pairs with ({},{})", self.c1, self.c2, -self.c1, -self.c2)
        }
    }
}

fn form_value(p: &TorusParams, c1: i64, c2: i64) -> f64 {
    let (q11, q12, q22) = p.form();
    let (x, y) = (c1 as f64, c2 as f64);
    q11 * x * x + 2.0 * q12 * x * y + q22 * y * y
}

/// All lattice points in the box |c1|, |c2| <= radius, sorted by
/// (form value, c1, c2).
fn sorted_box(p: &TorusParams, radius: i64) -> Vec<(f64, i64, i64)> {
    let mut pts = Vec::with_capacity(((2 * radius + 1) * (2 * radius + 1)) as usize);
    for c1 in -radius..=radius {
        for c2 in -radius..=radius {
            pts.push((form_value(p, c1, c2), c1, c2));
        }
    }
    pts.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
    pts
}

/// The k_max+1 smallest eigenvalues (index 0 is the constant mode), sorted
/// ascending with ties ordered by (c1, c2).
pub fn flat_torus_spectrum(p: TorusParams, k_max: usize) -> Result<Vec<LatticeEigenvalue>> {
    p.validate()?;
    // initial box with at least k_max+1 points gives an upper bound on the
    // k_max-th form value
    let mut r0 = 1i64;
    while ((2 * r0 + 1) * (2 * r0 + 1)) as usize <= k_max {
        r0 += 1;
    }
    let initial = sorted_box(&p, r0);
    let bound = initial[k_max].0;
    // every lattice point with value <= bound lies in the disc |c|^2 <= bound / mu_min
    let mu = p.form_min_eig();
    let radius = ((bound / mu).sqrt() * (1.0 + 1e-12)).floor() as i64 + 1;
    let pts = if radius <= r0 { initial } else { sorted_box(&p, radius) };
    let s = p.scale();
    Ok(pts
        .into_iter()
        .take(k_max + 1)
        .map(|(q, c1, c2)| LatticeEigenvalue { lambda: s * q, c1, c2 })
        .collect())
}

/// Volume-normalized eigenvalues b * lambda_k for k = 0..=k_max.
pub fn normalized_spectrum(p: TorusParams, k_max: usize) -> Result<Vec<f64>> {
    Ok(flat_torus_spectrum(p, k_max)?.into_iter().map(|e| e.lambda * p.b).collect())
}

/// Exhaustive k-th eigenvalue over the box |c1|, |c2| <= radius.
///
/// Fails when a point outside the box could undercut the returned value.
pub fn brute_force_kth(p: TorusParams, k: usize, radius: i64) -> Result<f64> {
    p.validate()?;
    if radius < 0 {
        return invalid("radius must be non-negative");
    }
    let pts = sorted_box(&p, radius);
    if k >= pts.len() {
        return Err(Error::RadiusInsufficient { radius, k });
    }
    let q = pts[k].0;
    let outside = p.form_min_eig() * ((radius + 1) * (radius + 1)) as f64;
    if q > outside {
        return Err(Error::RadiusInsufficient { radius, k });
    }
    Ok(p.scale() * q)
}

/// Closed-form local maximizer of Lambda_k over the moduli domain restricted
/// to a^2 + b^2 >= (ceil(k/2) - 1)^2. Returns the value and the optimal torus.
pub fn best_flat_torus_closed_form(k: usize) -> Result<(f64, TorusParams)> {
    if k < 1 {
        return invalid("k must be at least 1");
    }
    let m = k.div_ceil(2) as f64;
    let b = (m * m - 0.25).sqrt();
    Ok((FOUR_PI2 * m * m / b, TorusParams { a: 0.5, b }))
}

/// Lambda_k sampled on a rectangular (a, b) grid over the fundamental
/// domain: a from -1/2 to 1/2 and b from sqrt(3)/2 to `b_max`, endpoints
/// included. Samples with a^2 + b^2 below max(1, min_modulus^2) are outside
/// the admissible set and masked out.
#[derive(Debug, Clone, PartialEq)]
pub struct Landscape {
    pub k: usize,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    /// row-major with one row per b value; NaN where masked
    pub values: Vec<f64>,
    pub inside: Vec<bool>,
}

pub fn landscape(k: usize, na: usize, nb: usize, b_max: f64, min_modulus: f64) -> Result<Landscape> {
    let b_min = 0.75f64.sqrt();
    if na < 2 || nb < 2 || !(b_max > b_min) || !b_max.is_finite() {
        return invalid(format!("need na, nb >= 2 and b_max > sqrt(3)/2, got {na}, {nb}, {b_max}"));
    }
    let a: Vec<f64> = (0..na).map(|i| -0.5 + i as f64 / (na - 1) as f64).collect();
    let b: Vec<f64> = (0..nb).map(|j| b_min + (b_max - b_min) * j as f64 / (nb - 1) as f64).collect();
    let r2 = min_modulus.max(1.0).powi(2);
    let cells: Vec<(f64, bool)> = (0..na * nb)
        .into_par_iter()
        .map(|idx| {
            let (ai, bj) = (a[idx % na], b[idx / na]);
            // tolerate rounding on the unit circle so corners of F stay in
            if ai * ai + bj * bj < r2 * (1.0 - 1e-12) {
                return Ok((f64::NAN, false));
            }
            let p = TorusParams::new(ai, bj)?;
            Ok((normalized_spectrum(p, k)?[k], true))
        })
        .collect::<Result<_>>()?;
    let (values, inside) = cells.into_iter().unzip();
    Ok(Landscape { k, a, b, values, inside })
}

impl Landscape {
    /// Largest admissible sample as (value, a, b, flat index).
    pub fn argmax(&self) -> Option<(f64, f64, f64, usize)> {
        let na = self.a.len();
        (0..self.values.len())
            .filter(|&i| self.inside[i])
            .max_by(|&i, &j| self.values[i].total_cmp(&self.values[j]))
            .map(|i| (self.values[i], self.a[i % na], self.b[i / na], i))
    }

    /// Largest change between the sample at `idx` and its admissible grid
    /// neighbours: the resolution of the grid around that sample.
    pub fn local_variation(&self, idx: usize) -> f64 {
        let (na, nb) = (self.a.len(), self.b.len());
        let (i, j) = ((idx % na) as i64, (idx / na) as i64);
        let mut v: f64 = 0.0;
        for (di, dj) in [(-1, 0), (1, 0), (0, -1), (0, 1)] {
            let (x, y) = (i + di, j + dj);
            if x >= 0 && y >= 0 && (x as usize) < na && (y as usize) < nb {
                let n = y as usize * na + x as usize;
                if self.inside[n] {
                    v = v.max((self.values[n] - self.values[idx]).abs());
                }
            }
        }
        v
    }
}
