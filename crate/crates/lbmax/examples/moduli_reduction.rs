//! Reduce random lattice parameters to the fundamental domain and check that
//! the normalized spectrum does not change.
//!
//! cargo run --example moduli_reduction -- [count]

use lbmax::lattice::{normalized_spectrum, TorusParams};
use lbmax::moduli;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> lbmax::Result<()> {
    let count = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(8);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..count {
        let p = TorusParams::new(rng.gen_range(-4.0..4.0), rng.gen_range(0.05..3.0))?;
        let c = moduli::canonicalize(p)?;
        let (s, t) = (normalized_spectrum(p, 8)?, normalized_spectrum(c, 8)?);
        let drift = s.iter().zip(&t).map(|(x, y)| (x - y).abs() / x.max(1.0)).fold(0.0, f64::max);
        println!("({:+.4}, {:.4}) -> ({:+.4}, {:.4})  Lambda_1 = {:.4}  max relative drift {drift:.1e}", p.a, p.b, c.a, c.b, t[1]);
    }
    Ok(())
}
