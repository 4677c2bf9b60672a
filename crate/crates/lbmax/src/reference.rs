//! Analytic and semi-analytic comparison spectra: round sphere, kissing
//! spheres, disjoint unions and tori of revolution.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::eigen::{dense_pairs, SymMatrix};
use crate::error::{invalid, Error, Result};

const EIGHT_PI: f64 = 8.0 * PI;

/// A labelled list of normalized eigenvalues, Lambda_0 first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceSpectrum {
    pub label: String,
    pub normalized: Vec<f64>,
    pub provenance: String,
}

/// Round sphere: 4 pi l(l+1) with multiplicity 2l+1, for k = 0..=k_max.
pub fn sphere_spectrum(k_max: usize) -> ReferenceSpectrum {
    let mut v = Vec::with_capacity(k_max + 1);
    let mut l = 0usize;
    while v.len() <= k_max {
        for _ in 0..(2 * l + 1) {
            if v.len() <= k_max {
                v.push(4.0 * PI * (l * (l + 1)) as f64);
            }
        }
        l += 1;
    }
    ReferenceSpectrum { label: "round sphere".into(), normalized: v, provenance: "4 pi l(l+1), multiplicity 2l+1".into() }
}

/// First nonzero normalized eigenvalue of k equal spheres touching at
/// points: Lambda_k = 8 pi k. The spectrum starts with a k-fold zero block
/// followed by a 3k-fold block at this value.
pub fn kissing_spheres(k: usize) -> Result<f64> {
    if k < 1 {
        return invalid("k must be at least 1");
    }
    Ok(EIGHT_PI * k as f64)
}

/// Lambda_{k+1} after adding a round sphere of the optimal size to a
/// surface with Lambda_k = `base`.
pub fn attach_sphere(base: f64) -> Result<f64> {
    if !(base >= 0.0) {
        return invalid("base value must be non-negative");
    }
    Ok(EIGHT_PI + base)
}

/// Equilateral flat torus with k-1 attached spheres.
pub fn equilateral_plus_spheres(k: usize) -> Result<f64> {
    if k < 1 {
        return invalid("k must be at least 1");
    }
    Ok(8.0 * PI * PI / 3f64.sqrt() + EIGHT_PI * (k - 1) as f64)
}

/// Eigenvalues (not normalized) of a disjoint union: the sorted multiset
/// union of the parts, with the total volume.
pub fn disjoint_union(parts: &[(Vec<f64>, f64)]) -> (Vec<f64>, f64) {
    let mut all: Vec<f64> = parts.iter().flat_map(|p| p.0.iter().copied()).collect();
    all.sort_by(f64::total_cmp);
    (all, parts.iter().map(|p| p.1).sum())
}

/// Conformal factor of the Moebius dilation of the unit sphere at height z.
pub fn sphere_isometric_factor(alpha: f64, z: &[f64]) -> Vec<f64> {
    let (c, s) = (alpha.cosh(), alpha.sinh());
    z.iter().map(|&z| 1.0 / (c + s * z).powi(2)).collect()
}

/// Tube and center radii (r, R) of the unit-area torus of revolution with
/// R / r = a^2.
pub fn torus_radii(a: f64) -> (f64, f64) {
    (1.0 / (2.0 * PI * a), a / (2.0 * PI))
}

const MODE_TOL: f64 = 1e-9;
const HORN_TOL: f64 = 1e-8;
const N_START: usize = 33;
const N_CAP: usize = 2049;

/// First-derivative periodic stencil for an odd number of points.
fn odd_stencil(n: usize) -> Vec<f64> {
    let h = 2.0 * PI / n as f64;
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let k = (i + n - j) % n;
            if k != 0 {
                let s = if k % 2 == 0 { 1.0 } else { -1.0 };
                d[i * n + j] = 0.5 * s / (0.5 * k as f64 * h).sin();
            }
        }
    }
    d
}

/// Lowest `count` eigenvalues of Fourier mode m on the periodic grid with n
/// (odd) points, in the weighted symmetric form
/// D^T diag(c/r) D + diag(m^2 r / c) against diag(r c), c = R + r cos u.
fn periodic_mode(a: f64, m: usize, n: usize, count: usize) -> Result<Vec<f64>> {
    let (r, big_r) = torus_radii(a);
    let h = 2.0 * PI / n as f64;
    let d = odd_stencil(n);
    let c: Vec<f64> = (0..n).map(|j| big_r + r * (j as f64 * h).cos()).collect();
    let mut k = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let mut s = 0.0;
            for l in 0..n {
                s += d[l * n + i] * (c[l] / r) * d[l * n + j];
            }
            k[i * n + j] = s;
        }
        k[i * n + i] += (m * m) as f64 * r / c[i];
    }
    let mass = SymMatrix::Diagonal(c.iter().map(|ci| r * ci).collect());
    let (vals, _) = dense_pairs(&SymMatrix::dense(n, k), &mass, Some(count.min(n)))?;
    Ok(vals)
}

/// Lowest `count` eigenvalues of mode m for the horn torus (a = 1), solved
/// on the tube cut at the pinch with a trigonometric Galerkin basis in
/// theta = (u - pi)/2 in (0, pi): cos(j theta) for m = 0 and sin(j theta)
/// for m > 0. All integrals are even trigonometric polynomials and are
/// computed exactly with the midpoint rule.
fn horn_mode(m: usize, nb: usize, count: usize) -> Result<Vec<f64>> {
    let (r, _) = torus_radii(1.0);
    let q = 4 * nb + 16;
    let w = PI / q as f64;
    let mut k = vec![0.0; nb * nb];
    let mut mm = vec![0.0; nb * nb];
    let mut phi = vec![0.0; nb];
    let mut dphi = vec![0.0; nb];
    let mut ratio = vec![0.0; nb];
    for qi in 0..q {
        let th = (qi as f64 + 0.5) * w;
        let s = th.sin();
        let s2 = s * s;
        for (b, j) in (0..nb).map(|b| (b, if m == 0 { b } else { b + 1 })) {
            let jf = j as f64;
            if m == 0 {
                phi[b] = (jf * th).cos();
                dphi[b] = -0.5 * jf * (jf * th).sin();
            } else {
                phi[b] = (jf * th).sin();
                dphi[b] = 0.5 * jf * (jf * th).cos();
            }
        }
        if m > 0 {
            // sin(j th) / sin(th) = U_{j-1}(cos th)
            let x = th.cos();
            for b in 0..nb {
                ratio[b] = match b {
                    0 => 1.0,
                    1 => 2.0 * x,
                    _ => 2.0 * x * ratio[b - 1] - ratio[b - 2],
                };
            }
        }
        // dt = 2 dtheta, c = 2 r sin^2(theta)
        for i in 0..nb {
            for j in 0..nb {
                let mut kv = 2.0 * s2 * dphi[i] * dphi[j];
                if m > 0 {
                    kv += 0.5 * (m * m) as f64 * ratio[i] * ratio[j];
                }
                k[i * nb + j] += 2.0 * w * kv;
                mm[i * nb + j] += 2.0 * w * 2.0 * r * r * s2 * phi[i] * phi[j];
            }
        }
    }
    let (vals, _) = dense_pairs(&SymMatrix::dense(nb, k), &SymMatrix::dense(nb, mm), Some(count.min(nb)))?;
    Ok(vals)
}

fn max_rel_change(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(p, q)| (p - q).abs() / p.abs().max(1.0)).fold(0.0, f64::max)
}

/// Refine until two successive resolutions agree to `tol`. Roundoff grows
/// with the resolution, so refinement also stops, keeping the earlier
/// result, once the changes start to grow after reaching near the target.
fn refine(mut size: usize, cap: usize, tol: f64, grow: impl Fn(usize) -> usize, solve: impl Fn(usize) -> Result<Vec<f64>>) -> Result<Vec<f64>> {
    let mut prev = solve(size)?;
    let mut last_change = f64::INFINITY;
    while size < cap {
        size = grow(size);
        let next = solve(size)?;
        let change = max_rel_change(&prev, &next);
        if change <= tol {
            return Ok(next);
        }
        if change > last_change && last_change <= 1e3 * tol {
            return Ok(prev);
        }
        last_change = change;
        prev = next;
    }
    Err(Error::NoConvergence { max_residual: last_change, iterations: size })
}

/// Lowest `count` eigenvalues of one Fourier mode, refined until two
/// successive resolutions agree.
pub fn torus_mode(a: f64, m: usize, count: usize) -> Result<Vec<f64>> {
    if a == 1.0 {
        return refine(24, 512, HORN_TOL, |nb| 2 * nb, |nb| horn_mode(m, nb, count));
    }
    let n0 = N_START.max(2 * count + 1) | 1;
    refine(n0, N_CAP, MODE_TOL, |n| 2 * n - 1, |n| periodic_mode(a, m, n, count))
}

/// Normalized spectrum (area one, so Lambda = lambda) of the torus of
/// revolution with aspect parameter a >= 1, where a^2 = R / r.
pub fn embedded_torus_spectrum(a: f64, k_max: usize) -> Result<ReferenceSpectrum> {
    if !(a >= 1.0) || !a.is_finite() {
        return invalid(format!("aspect parameter must be at least 1, got {a}"));
    }
    let want = k_max + 1;
    let mut merged: Vec<f64> = Vec::new();
    let mut m = 0usize;
    loop {
        let vals = torus_mode(a, m, want)?;
        // the m^2 potential term makes each mode's ground value increase with m
        if m > 0 && merged.len() >= want && vals[0] > merged[want - 1] {
            break;
        }
        for v in vals {
            merged.push(v);
            if m > 0 {
                merged.push(v);
            }
        }
        merged.sort_by(f64::total_cmp);
        m += 1;
        if m > 4 * want + 64 {
            return Err(Error::IterationCap("Fourier mode cap reached".into()));
        }
    }
    merged.truncate(want);
    Ok(ReferenceSpectrum { label: format!("torus of revolution a={a}"), normalized: merged, provenance: "separable periodic mode problems".into() })
}

/// Maximize Lambda_k over the aspect parameter: coarse sweep over
/// [1, a_max] then golden-section refinement around the best sample.
pub fn best_embedded_torus(k: usize) -> Result<(f64, f64)> {
    best_embedded_torus_in(k, 4.0, 0.01)
}

pub fn best_embedded_torus_in(k: usize, a_max: f64, step: f64) -> Result<(f64, f64)> {
    if k < 1 {
        return invalid("k must be at least 1");
    }
    let f = |a: f64| embedded_torus_spectrum(a, k).map(|s| s.normalized[k]);
    let n = ((a_max - 1.0) / step).round() as usize;
    let xs: Vec<f64> = (0..=n).map(|i| 1.0 + i as f64 * step).collect();
    let ys = xs.iter().map(|&a| f(a)).collect::<Result<Vec<f64>>>()?;
    let i = (0..ys.len()).max_by(|&x, &y| ys[x].total_cmp(&ys[y])).unwrap();
    if i == ys.len() - 1 {
        return Err(Error::NoBracket(format!("maximum of Lambda_{k} at the sweep end a = {a_max}")));
    }
    let (mut lo, mut hi) = (xs[i.saturating_sub(1)], xs[i + 1]);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    while hi - lo > 1e-7 {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2)?;
        }
    }
    let (mut best_a, mut best) = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    if ys[i] > best {
        best_a = xs[i];
        best = ys[i];
    }
    Ok((best_a, best))
}
