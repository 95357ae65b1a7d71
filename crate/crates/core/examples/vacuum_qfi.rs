//! QFI of the vacuum-seeded interferometer for every phase model, next to
//! the closed form `n_kappa (n_kappa + 2)`.
//!
//! Run with `cargo run --release --example vacuum_qfi`.

use su11::analytic::f_vacuum;
use su11::metrology::qfi_for_config;
use su11::{GeneratorKind, InterferometerConfig, ModeSpec, QfiMethod};

fn main() -> su11::Result<()> {
    println!("{:>5} {:>6} {:>16} {:>16} {:>6}", "g", "model", "numeric", "closed form", "K");
    for g in [0.25, 0.5, 1.0] {
        for model in [GeneratorKind::Upper, GeneratorKind::Lower, GeneratorKind::Sum] {
            let cfg = InterferometerConfig::new(ModeSpec::Vacuum, ModeSpec::Vacuum, g).with_model(model);
            let (r, _) = qfi_for_config(&cfg, QfiMethod::Variance)?;
            println!(
                "{g:>5} {:>6} {:>16.10} {:>16.10} {:>6}",
                model.label(),
                r.value,
                f_vacuum(g),
                r.cutoff_used.max_total()
            );
        }
    }
    Ok(())
}
