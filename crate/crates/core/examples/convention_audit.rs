//! The radical `sqrt(n (n + 1)) * ...` that reproduces `sinh 4g` only when
//! `n = sinh^2 g`; with `n = 2 sinh^2 g` it is off by a large margin.
//!
//! Run with `cargo run --release --example convention_audit`.

use su11::analytic::RadicalAudit;

fn main() {
    println!("{:>5} {:>14} {:>14} {:>14}", "g", "sinh 4g", "n = sinh^2 g", "n = 2 sinh^2 g");
    for g in [0.1, 0.25, 0.5, 1.0, 1.5] {
        let a = RadicalAudit::new(g);
        println!("{g:>5} {:>14.8} {:>14.8} {:>14.8}", a.sinh4g, a.single, a.double);
    }
}
