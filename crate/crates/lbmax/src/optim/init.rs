//! Starting conformal factors.

use std::f64::consts::PI;

use rand::Rng;

use crate::error::Result;
use crate::lattice::TorusParams;

/// Values drawn uniformly in log space between lo and hi.
pub fn log_uniform<R: Rng>(n: usize, lo: f64, hi: f64, rng: &mut R) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|_| (a + (b - a) * rng.gen::<f64>()).exp()).collect()
}

/// `count` nearly equidistributed points on the unit sphere (Fibonacci
/// lattice).
pub fn sphere_points(count: usize) -> Vec<[f64; 3]> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / count as f64;
            let r = (1.0 - z * z).sqrt();
            let t = golden * i as f64;
            [r * t.cos(), r * t.sin(), z]
        })
        .collect()
}

/// Uniformly random point on the unit sphere.
pub fn random_sphere_point<R: Rng>(rng: &mut R) -> [f64; 3] {
    let z = 2.0 * rng.gen::<f64>() - 1.0;
    let t = 2.0 * PI * rng.gen::<f64>();
    let r = (1.0 - z * z).sqrt();
    [r * t.cos(), r * t.sin(), z]
}

/// base + amplitude * sum_c exp(-|x - c|^2 / (2 width^2)) at each point.
pub fn gaussian_sum(points: &[[f64; 3]], centers: &[[f64; 3]], width: f64, base: f64, amplitude: f64) -> Vec<f64> {
    points
        .iter()
        .map(|p| {
            let s: f64 = centers
                .iter()
                .map(|c| {
                    let d2 = (p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2) + (p[2] - c[2]).powi(2);
                    (-d2 / (2.0 * width * width)).exp()
                })
                .sum();
            base + amplitude * s
        })
        .collect()
}

/// Mean of the area factors of conformal dilations of the unit sphere
/// toward each center with strength t in [0, 1): each term integrates to
/// the sphere's area, so the caps share it equally.
pub fn dilated_caps(points: &[[f64; 3]], centers: &[[f64; 3]], t: f64) -> Vec<f64> {
    let m = centers.len() as f64;
    points
        .iter()
        .map(|p| {
            centers
                .iter()
                .map(|c| {
                    let dot = p[0] * c[0] + p[1] * c[1] + p[2] * c[2];
                    ((1.0 - t * t) / (1.0 + t * t - 2.0 * t * dot)).powi(2)
                })
                .sum::<f64>()
                / m
        })
        .collect()
}

/// Gaussian bumps on the periodic square [0, 2pi)^2 of an n x n grid,
/// distances measured with wrap-around.
pub fn periodic_gaussian_sum(n: usize, centers: &[[f64; 2]], width: f64, base: f64, amplitude: f64) -> Vec<f64> {
    let h = 2.0 * PI / n as f64;
    let wrap = |d: f64| {
        let d = d.rem_euclid(2.0 * PI);
        d.min(2.0 * PI - d)
    };
    (0..n * n)
        .map(|idx| {
            let (x, y) = ((idx % n) as f64 * h, (idx / n) as f64 * h);
            let s: f64 = centers
                .iter()
                .map(|c| {
                    let (dx, dy) = (wrap(x - c[0]), wrap(y - c[1]));
                    (-(dx * dx + dy * dy) / (2.0 * width * width)).exp()
                })
                .sum();
            base + amplitude * s
        })
        .collect()
}

/// Flat factor `base` plus one stereographic sphere bubble of scale `eps`
/// holding extra area `area`, centred at the physical point `center` of
/// the torus with parameters `params`. Grid nodes are those of an n x n
/// grid on [0, 2pi)^2; distances use the nearest lattice translate.
pub fn periodic_bubble(n: usize, params: TorusParams, center: [f64; 2], eps: f64, area: f64, base: f64) -> Vec<f64> {
    let h = 2.0 * PI / n as f64;
    let period = 2.0 * PI;
    (0..n * n)
        .map(|idx| {
            let (u, v) = ((idx % n) as f64 * h, (idx / n) as f64 * h);
            let (x, y) = (u + params.a * v, params.b * v);
            let mut r2 = f64::MAX;
            for j in -2..=2 {
                for i in -2..=2 {
                    let dx = x - center[0] - period * (i as f64 + params.a * j as f64);
                    let dy = y - center[1] - period * params.b * j as f64;
                    r2 = r2.min(dx * dx + dy * dy);
                }
            }
            base + area / PI * eps * eps / (eps * eps + r2).powi(2)
        })
        .collect()
}

/// Random start on the unit sphere. For k = 1, log-uniform values on
/// [0.5, 2]. For k >= 2, k dilated caps of random strength in [0.5, 0.8]
/// at random centres, antipodal when k = 2.
pub fn random_sphere_start<R: Rng>(points: &[[f64; 3]], k: usize, rng: &mut R) -> Vec<f64> {
    if k <= 1 {
        return log_uniform(points.len(), 0.5, 2.0, rng);
    }
    let first = random_sphere_point(rng);
    let mut centers = vec![first];
    if k == 2 {
        centers.push([-first[0], -first[1], -first[2]]);
    } else {
        centers.extend((1..k).map(|_| random_sphere_point(rng)));
    }
    let t = rng.gen_range(0.5..0.8);
    dilated_caps(points, &centers, t)
}

/// Random moduli and conformal factor for an n x n torus grid. The moduli
/// are uniform over a in [-1/2, 1/2) and a band of b above the unit circle
/// (b in [1, 1.6) for k = 1, [0.85, 1.3) inside F for k >= 2); the factor
/// comes from [`random_torus_factor`].
pub fn random_torus_start<R: Rng>(n: usize, k: usize, omega_hi: f64, rng: &mut R) -> Result<(TorusParams, Vec<f64>)> {
    let p = if k <= 1 {
        TorusParams::new(rng.gen_range(-0.5..0.5), rng.gen_range(1.0..1.6))?
    } else {
        loop {
            let a: f64 = rng.gen_range(-0.5..0.5);
            let b: f64 = rng.gen_range(0.85..1.3);
            if a * a + b * b >= 1.0 {
                break TorusParams::new(a, b)?;
            }
        }
    };
    Ok((p, random_torus_factor(n, k, p, omega_hi, rng)))
}

/// Random conformal factor on the torus `p`. For k = 1, three smooth
/// Gaussian bumps. For k >= 2, k - 1 sphere bubbles that together double
/// the flat area, each as narrow as the upper bound `omega_hi` allows with
/// some slack.
pub fn random_torus_factor<R: Rng>(n: usize, k: usize, p: TorusParams, omega_hi: f64, rng: &mut R) -> Vec<f64> {
    let two_pi = 2.0 * PI;
    if k <= 1 {
        let centers: Vec<[f64; 2]> = (0..3).map(|_| [rng.gen_range(0.0..two_pi), rng.gen_range(0.0..two_pi)]).collect();
        return periodic_gaussian_sum(n, &centers, 0.8, 1.0, 0.5);
    }
    let bubbles = k - 1;
    let area = 0.5 * two_pi * two_pi * p.b / bubbles as f64;
    let mut omega = vec![1.0; n * n];
    for _ in 0..bubbles {
        let eps_min = (area / (PI * 0.5 * omega_hi)).sqrt();
        let eps = rng.gen_range(eps_min..1.5 * eps_min);
        let center = [rng.gen_range(0.0..two_pi), rng.gen_range(0.0..two_pi) * p.b];
        for (w, v) in omega.iter_mut().zip(periodic_bubble(n, p, center, eps, area, 0.0)) {
            *w += v;
        }
    }
    omega
}
