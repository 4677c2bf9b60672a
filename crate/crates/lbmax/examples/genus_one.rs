//! Maximize Lambda_k jointly over the conformal factor and the flat-torus
//! moduli on a spectral grid.
//!
//! cargo run --release --example genus_one -- [n] [k] [starts]

use std::time::Instant;

use lbmax::eigen::Method;
use lbmax::optim::{init, maximize_moduli, multistart, OptimConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> lbmax::Result<()> {
    let args: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let n = args.first().copied().unwrap_or(32);
    let k = args.get(1).copied().unwrap_or(1);
    let starts = args.get(2).copied().unwrap_or(3);
    let config = OptimConfig { k, vary_moduli: true, ..OptimConfig::default() };
    let t0 = Instant::now();
    let (runs, best) = multistart(starts, |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed + i as u64);
        let (p, omega0) = init::random_torus_start(n, k, config.omega_hi, &mut rng)?;
        maximize_moduli(n, p, &omega0, Method::Auto, &config)
    });
    for (i, r) in runs.iter().enumerate() {
        match r {
            Ok(r) => {
                let p = r.final_params.unwrap();
                println!("start {i}: Lambda_{k} = {:.4} at (a, b) = ({:.4}, {:.4}) after {} steps, {} domain moves ({:?})", r.final_lambda(), p.a, p.b, r.history.len() - 1, r.canonical_events.len(), r.termination);
            }
            Err(e) => println!("start {i}: failed: {e}"),
        }
    }
    if let Some(b) = best {
        println!("best Lambda_{k} = {:.4}, {:.1}s", runs[b].as_ref().unwrap().final_lambda(), t0.elapsed().as_secs_f64());
    }
    Ok(())
}
