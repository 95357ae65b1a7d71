//! Splitting a fixed photon budget between the OPA and two balanced coherent
//! inputs with conjugate phases.
//!
//! Run with `cargo run --release --example total_resource`.

use su11::analytic::{f_two_coherent_max, f_vacuum};

fn main() {
    let total = 4.0;
    println!("{:>8} {:>10} {:>10} {:>14}", "fraction", "n_kappa", "n_in", "phase-sum QFI");
    let mut best = (0.0, 0.0);
    for i in 0..=20 {
        let x = i as f64 / 20.0;
        let nk = x * total;
        let g = (nk / 2.0).sqrt().asinh();
        let n_in = (1.0 - x) * total;
        let f = if n_in > 0.0 { f_two_coherent_max(g, n_in) } else { f_vacuum(g) };
        if f > best.1 {
            best = (x, f);
        }
        println!("{x:>8.2} {nk:>10.4} {n_in:>10.4} {f:>14.6}");
    }
    println!("best split: OPA fraction {:.2}, QFI {:.6}", best.0, best.1);
}
