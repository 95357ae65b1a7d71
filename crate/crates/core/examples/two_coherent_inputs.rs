//! Two coherent inputs: the phase-sum bound against its closed form, and the
//! optimum reached by conjugate amplitudes.
//!
//! Run with `cargo run --release --example two_coherent_inputs`.

use std::f64::consts::PI;

use num_complex::Complex64;
use su11::analytic::{f_two_coherent, f_two_coherent_max};
use su11::metrology::qfim;
use su11::{InterferometerConfig, ModeSpec};

fn main() -> su11::Result<()> {
    let g = 0.5;
    let alpha = Complex64::from_polar(1.0, PI / 4.0);
    for beta_phase in [-PI / 4.0, 0.0, PI / 4.0, PI / 2.0] {
        let beta = Complex64::from_polar(1.0, beta_phase);
        let cfg = InterferometerConfig::new(ModeSpec::coherent(alpha), ModeSpec::coherent(beta), g);
        let (state, _) = cfg.run(|c| cfg.pure_output(c))?;
        let info = qfim(&state)?.bound_phi_s.information();
        println!(
            "arg(beta) = {beta_phase:+.4}: 1/bound {info:.10}, closed form {:.10}",
            f_two_coherent(g, alpha, beta)?
        );
    }
    println!("maximum over phases at n_in = 2: {:.10}", f_two_coherent_max(g, 2.0));
    Ok(())
}
