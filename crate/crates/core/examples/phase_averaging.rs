//! Phase-averaged inputs: the QFI collapses to `(n + 1) n_kappa (n_kappa + 2)`
//! for every input with the same mean photon number, whatever the phase
//! model. The convexity and SLD engines agree on the mixed state.
//!
//! Run with `cargo run --release --example phase_averaging`.

use num_complex::Complex64;
use su11::analytic::f_averaged;
use su11::metrology::qfi_for_config;
use su11::{GeneratorKind, InterferometerConfig, ModeSpec, QfiMethod};

fn main() -> su11::Result<()> {
    let g = 0.6;
    let inputs = [
        ModeSpec::coherent(Complex64::new(1.0, 0.0)),
        ModeSpec::Fock(1),
        ModeSpec::NumberMixture(vec![0.5, 0.0, 0.5]),
        ModeSpec::squeezed(0.4),
    ];
    for a in inputs {
        let n = a.mean_photons();
        println!("input {a:?}: mean photons {n:.6}, closed form {:.10}", f_averaged(g, n));
        for kind in [GeneratorKind::Upper, GeneratorKind::Lower, GeneratorKind::Sum] {
            let cfg = InterferometerConfig::new(a.clone(), ModeSpec::Vacuum, g)
                .with_model(kind)
                .averaged(true);
            let (convex, _) = qfi_for_config(&cfg, QfiMethod::Convexity)?;
            let (sld, _) = qfi_for_config(&cfg, QfiMethod::Sld)?;
            println!(
                "  {:<2} convexity {:.10}  sld {:.10}",
                kind.label(),
                convex.value,
                sld.value
            );
        }
    }
    Ok(())
}
