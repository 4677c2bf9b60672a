//! Maximize Lambda_k over conformal factors on an icosphere.
//!
//! cargo run --release --example conformal_sphere -- [subdivisions] [k] [starts]

use std::time::Instant;

use lbmax::fem::{icosphere, MeshProblem};
use lbmax::optim::{init, maximize_conformal, multistart, OptimConfig, Surface};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> lbmax::Result<()> {
    let args: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let s = args.first().copied().unwrap_or(3);
    let k = args.get(1).copied().unwrap_or(1);
    let starts = args.get(2).copied().unwrap_or(3);
    let problem = MeshProblem::new(icosphere(s, 1.0)?)?;
    let config = OptimConfig { k, ..OptimConfig::default() };
    let t0 = Instant::now();
    let (runs, best) = multistart(starts, |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed + i as u64);
        let omega0 = init::random_sphere_start(&problem.mesh.vertices, k, &mut rng);
        maximize_conformal(&Surface::Mesh(&problem), &omega0, &config)
    });
    for (i, r) in runs.iter().enumerate() {
        match r {
            Ok(r) => println!("start {i}: Lambda_{k} = {:.4} after {} steps ({:?})", r.final_lambda(), r.history.len() - 1, r.termination),
            Err(e) => println!("start {i}: failed: {e}"),
        }
    }
    if let Some(b) = best {
        let r = runs[b].as_ref().unwrap();
        let w = &r.final_omega;
        let mut sorted = w.clone();
        sorted.sort_by(f64::total_cmp);
        let median = sorted[w.len() / 2];
        let peaks = problem.mesh.local_maxima(w, 2.0 * median).len();
        println!("best Lambda_{k} = {:.4}, {peaks} peaks above twice the median omega, {:.1}s", r.final_lambda(), t0.elapsed().as_secs_f64());
    }
    Ok(())
}
