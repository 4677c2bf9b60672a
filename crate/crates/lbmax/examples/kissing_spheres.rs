//! Chains of touching spheres approach the value 8 pi k for Lambda_k.
//!
//! cargo run --release --example kissing_spheres -- [subdivisions]

use lbmax::fem::{MeshConformalFactor, MeshProblem};
use lbmax::io::commands::kissing_mesh;
use lbmax::reference;

fn main() -> lbmax::Result<()> {
    let s = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    for k in 1..=5 {
        let pr = MeshProblem::new(kissing_mesh(k, s)?)?;
        let res = pr.solve(&MeshConformalFactor::constant(pr.lumped.len(), 1.0), k)?;
        let target = reference::kissing_spheres(k)?;
        println!("{k} spheres: Lambda_{k} = {:.4}, limit {target:.4} ({:+.2}%)", res.normalized[k], 100.0 * (res.normalized[k] / target - 1.0));
    }
    Ok(())
}
