//! A coherent state in one input and vacuum in the other: the QFI depends on
//! which arm carries the phase, and on which input is populated.
//!
//! Run with `cargo run --release --example coherent_vacuum_models`.

use num_complex::Complex64;
use su11::analytic::{f_gong, gong_model_for};
use su11::metrology::qfi_for_config;
use su11::{GeneratorKind, InterferometerConfig, ModeSpec, QfiMethod};

fn main() -> su11::Result<()> {
    let g = 0.5;
    let coherent = ModeSpec::coherent(Complex64::new(1.0, 0.0));
    for (label, a, b, in_a) in [
        ("coherent x vacuum", coherent.clone(), ModeSpec::Vacuum, true),
        ("vacuum x coherent", ModeSpec::Vacuum, coherent.clone(), false),
    ] {
        println!("{label}, g = {g}, |amplitude|^2 = 1");
        for kind in [GeneratorKind::Upper, GeneratorKind::Lower, GeneratorKind::Sum] {
            let cfg = InterferometerConfig::new(a.clone(), b.clone(), g).with_model(kind);
            let (r, _) = qfi_for_config(&cfg, QfiMethod::Variance)?;
            let model = gong_model_for(kind, in_a).expect("u, l and s have closed forms");
            println!(
                "  generator {:<2} numeric {:>12.8}  closed form '{}' {:>12.8}",
                kind.label(),
                r.value,
                model.label(),
                f_gong(g, 1.0, model)
            );
        }
    }
    Ok(())
}
