//! Independent QFI engines on the same state: the variance formula, the
//! fidelity finite difference, the convexity sum and the SLD eigen-expansion.
//!
//! Run with `cargo run --release --example oracle_triangle`.

use num_complex::Complex64;
use su11::metrology::{phase_family, qfi_ensemble_convexity, qfi_fidelity_fd, qfi_pure, qfi_sld, DEFAULT_STEP};
use su11::{DiagonalGenerator, GeneratorKind, InterferometerConfig, ModeSpec, NumberDiagonalEnsemble};

fn main() -> su11::Result<()> {
    let cfg = InterferometerConfig::new(ModeSpec::coherent(Complex64::new(0.8, 0.3)), ModeSpec::Vacuum, 0.7);
    let (state, cutoff) = cfg.run(|c| cfg.pure_output(c))?;
    for kind in [GeneratorKind::Upper, GeneratorKind::Lower, GeneratorKind::Sum, GeneratorKind::Difference] {
        let gen = DiagonalGenerator::new(kind, &cutoff);
        let variance = qfi_pure(&state, &gen)?;
        let fidelity = qfi_fidelity_fd(phase_family(&state, kind), 0.0, DEFAULT_STEP)?;
        let single = NumberDiagonalEnsemble::pure(state.clone());
        let convex = qfi_ensemble_convexity(&single, &gen)?;
        let sld = qfi_sld(&single, &gen)?;
        println!(
            "{:<2} variance {:.10}  fidelity {:.10} (residual {:.1e})  convexity {:.10}  sld {:.10}",
            kind.label(),
            variance.value,
            fidelity.value,
            fidelity.residual,
            convex.value,
            sld.value
        );
    }

    let averaged = cfg.clone().averaged(true);
    let (ens, cutoff) = averaged.run(|c| averaged.ensemble_output(c))?;
    let gen = DiagonalGenerator::new(GeneratorKind::Upper, &cutoff);
    println!(
        "phase-averaged, {} branches: convexity {:.10}  sld {:.10}",
        ens.len(),
        qfi_ensemble_convexity(&ens, &gen)?.value,
        qfi_sld(&ens, &gen)?.value
    );
    Ok(())
}
