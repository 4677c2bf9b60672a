//! Spectra of tori of revolution: the horn torus and the best aspect for
//! odd k.
//!
//! cargo run --release --example embedded_torus

use lbmax::reference;

fn main() -> lbmax::Result<()> {
    let horn = reference::embedded_torus_spectrum(1.0, 8)?;
    println!("horn torus Lambda_1..8: {:.4?}", &horn.normalized[1..]);
    for k in [1, 3, 5, 7] {
        let (a, v) = reference::best_embedded_torus(k)?;
        println!("k = {k}: best Lambda_k = {v:.4} at aspect {a:.4}");
    }
    Ok(())
}
