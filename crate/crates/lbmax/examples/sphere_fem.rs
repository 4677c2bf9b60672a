//! Piecewise-linear finite elements on refined icospheres against the exact
//! sphere spectrum.
//!
//! cargo run --release --example sphere_fem -- [max_subdivisions]

use std::f64::consts::PI;

use lbmax::eigen::Method;
use lbmax::fem::{icosphere, MeshConformalFactor, MeshProblem};
use lbmax::reference;

fn main() -> lbmax::Result<()> {
    let max_s = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(4);
    let exact = reference::sphere_spectrum(8).normalized;
    let mut prev: Option<f64> = None;
    for s in 1..=max_s {
        let pr = MeshProblem::new(icosphere(s, 1.0)?)?.with_method(Method::Auto);
        let res = pr.solve(&MeshConformalFactor::constant(pr.lumped.len(), 1.0), 8)?;
        let err = (1..=8).map(|k| (res.eigenvalues[k] - exact[k] / (4.0 * PI)) / (exact[k] / (4.0 * PI))).fold(0.0, f64::max);
        let rate = prev.map_or(String::new(), |e| format!("  ratio {:.2}", e / err));
        println!("s = {s}  vertices {:>6}  max relative error {err:.3e}{rate}", pr.lumped.len());
        prev = Some(err);
    }
    Ok(())
}
