//! Compare the analytic eigenvalue gradient on a spectral grid with central
//! differences along a random direction.
//!
//! cargo run --release --example gradient_check -- [k]

use lbmax::eigen::Method;
use lbmax::gradients::{grid_gradient, is_simple, SIMPLICITY_GAP};
use lbmax::lattice::TorusParams;
use lbmax::spectral::{GridConformalFactor, GridProblem, PeriodicGrid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> lbmax::Result<()> {
    let k = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2);
    let n = 16;
    let h = 1e-5;
    let p = TorusParams::new(0.17, 1.08)?;
    let grid = PeriodicGrid::new(n)?;
    let omega = GridConformalFactor::from_fn(&grid, |x, y| (0.3 * x.cos() - 0.2 * (x + y).sin()).exp())?;
    let pr = GridProblem::new(p, n)?.with_method(Method::Dense);
    let res = pr.solve(&omega, k + 1)?;
    println!("Lambda_{k} = {:.6}, simple: {}", res.normalized[k], is_simple(&res, k, SIMPLICITY_GAP));
    let g = grid_gradient(&pr, &res, k, true)?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let dir: Vec<f64> = (0..grid.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let lam = |s: f64| -> lbmax::Result<f64> {
        let w: Vec<f64> = omega.values.iter().zip(&dir).map(|(o, d)| o + s * d).collect();
        Ok(pr.solve(&GridConformalFactor::new(n, w)?, k + 1)?.normalized[k])
    };
    let fd = (lam(h)? - lam(-h)?) / (2.0 * h);
    let w = grid.node_weight(&p);
    let an: f64 = g.d_omega_normalized.iter().zip(&dir).map(|(g, d)| w * g * d).sum();
    println!("directional derivative: analytic {an:.10e}, central difference {fd:.10e}");
    println!("d/da {:.8e}, d/db {:.8e}", g.d_a_normalized.unwrap_or(f64::NAN), g.d_b_normalized.unwrap_or(f64::NAN));
    Ok(())
}
