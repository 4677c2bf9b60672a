//! Spectral convergence of the grid discretization for a smooth conformal
//! factor on the equilateral torus.
//!
//! cargo run --release --example spectral_convergence

use lbmax::lattice::TorusParams;
use lbmax::spectral::{GridConformalFactor, GridProblem, PeriodicGrid};

fn main() -> lbmax::Result<()> {
    let p = TorusParams::equilateral();
    let k = 16;
    let solve = |n: usize| -> lbmax::Result<Vec<f64>> {
        let grid = PeriodicGrid::new(n)?;
        let omega = GridConformalFactor::from_fn(&grid, |x, y| (x.cos() + y.cos()).exp())?;
        Ok(GridProblem::new(p, n)?.solve(&omega, k)?.eigenvalues)
    };
    let finest = solve(96)?;
    println!("n    max relative difference to n = 96 over k <= {k}");
    for n in [8, 12, 16, 24, 32, 48, 64] {
        let l = solve(n)?;
        let d = (1..=k).map(|i| (l[i] - finest[i]).abs() / finest[i]).fold(0.0, f64::max);
        println!("{n:<4} {d:.3e}");
    }
    Ok(())
}
