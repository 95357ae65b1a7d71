//! Two-parameter estimation of the phase sum and half difference.
//!
//! With one vacuum input the phase-sum bound equals the inverse of the
//! phase-averaged QFI, so the photon-number variance of the input drops out.
//! A Fock input carries no information on the difference, and the bound is
//! taken from the sum block alone.
//!
//! Run with `cargo run --release --example two_parameter_qfim`.

use num_complex::Complex64;
use su11::analytic::{f_averaged, qfim_one_vacuum};
use su11::metrology::qfim;
use su11::{InterferometerConfig, ModeSpec};

fn main() -> su11::Result<()> {
    let g = 0.5;
    for a in [ModeSpec::coherent(Complex64::new(1.0, 0.0)), ModeSpec::Fock(1), ModeSpec::Vacuum] {
        let cfg = InterferometerConfig::new(a.clone(), ModeSpec::Vacuum, g);
        let (state, _) = cfg.run(|c| cfg.pure_output(c))?;
        let m = qfim(&state)?;
        let (dd, ds, ss) = qfim_one_vacuum(g, a.mean_photons(), a.photon_variance());
        println!("input {a:?}");
        println!("  F_dd {:.10} (closed form {dd:.10})", m.f_dd);
        println!("  F_ds {:.10} (closed form {ds:.10})", m.f_ds);
        println!("  F_ss {:.10} (closed form {ss:.10})", m.f_ss);
        println!(
            "  bound on phi_s {:.10}, inverse of the averaged QFI {:.10}, bound on phi_d {}",
            m.bound_phi_s.value(),
            1.0 / f_averaged(g, a.mean_photons()),
            if m.bound_phi_d.is_singular() { "singular".to_string() } else { format!("{:.10}", m.bound_phi_d.value()) }
        );
    }
    Ok(())
}
