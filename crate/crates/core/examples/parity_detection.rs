//! Parity detection on mode B after the second (inverting) OPA: scan the
//! phase sum and locate the largest classical Fisher information.
//!
//! Run with `cargo run --release --example parity_detection`.

use num_complex::Complex64;
use su11::analytic::f_parity_cl;
use su11::metrology::{default_parity_grid, parity_cfi, parity_cfi_max};
use su11::{InterferometerConfig, ModeSpec};

fn main() -> su11::Result<()> {
    let (a2, r, g) = (1.0f64, 0.5, 0.5);
    let cfg = InterferometerConfig::new(ModeSpec::coherent(Complex64::new(a2.sqrt(), 0.0)), ModeSpec::squeezed(r), g);
    let (_, cutoff) = cfg.run(|c| cfg.pure_output(c))?;
    let points = parity_cfi(&cfg.clone().with_cutoff(cutoff), &default_parity_grid(0.6))?;
    for p in points.iter().filter(|p| p.phi > 0.0).step_by(12) {
        match p.cfi {
            Some(f) => println!("phi_s {:>10.4e}  parity {:>+.8}  CFI {f:.8}", p.phi, p.parity),
            None => println!("phi_s {:>10.4e}  parity {:>+.8}  CFI indeterminate", p.phi, p.parity),
        }
    }
    let best = parity_cfi_max(&points).expect("grid has determinate points");
    println!(
        "maximum CFI {:.8} at phi_s = {:.3e}; closed form {:.8}",
        best.cfi.unwrap_or(0.0),
        best.phi,
        f_parity_cl(g, a2, r)
    );
    Ok(())
}
