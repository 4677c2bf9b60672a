//! Normalized spectrum of a flat torus with lattice basis (1, 0), (a, b).
//!
//! cargo run --example flat_torus_spectrum -- [a] [b] [k]

use lbmax::lattice::{normalized_spectrum, TorusParams};

fn main() -> lbmax::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let a = args.first().and_then(|s| s.parse().ok()).unwrap_or(0.5);
    let b = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(0.75f64.sqrt());
    let k = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(12);
    let spec = normalized_spectrum(TorusParams::new(a, b)?, k)?;
    println!("(a, b) = ({a}, {b})");
    let mut i = 1;
    while i <= k {
        // group numerically equal values into one line with their multiplicity
        let j = (i..=k).take_while(|&j| (spec[j] - spec[i]).abs() <= 1e-9 * spec[i]).count();
        println!("Lambda_{i}..{} = {:.6} (multiplicity {j})", i + j - 1, spec[i]);
        i += j;
    }
    Ok(())
}
