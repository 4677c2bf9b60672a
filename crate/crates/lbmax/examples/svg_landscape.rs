//! Write heatmaps of Lambda_k over the flat-torus moduli domain.
//!
//! cargo run --release --example svg_landscape -- [out_dir]

use std::path::PathBuf;

use lbmax::io::commands::{flat_sweep, landscape_svg};

fn main() -> lbmax::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "landscapes".into()));
    std::fs::create_dir_all(&dir)?;
    for m in flat_sweep(&[1, 2, 3, 4], 121, 121, 3.0, false)? {
        let path = dir.join(format!("landscape_k{}.svg", m.k));
        std::fs::write(&path, landscape_svg(&m)?)?;
        let (v, a, b, _) = m.argmax().expect("admissible samples");
        println!("k = {}: sampled maximum {v:.4} at ({a:.3}, {b:.3}) -> {}", m.k, path.display());
    }
    Ok(())
}
