//! Coherent light in one input and squeezed vacuum in the other: the
//! two-parameter phase-sum bound is tighter than the single-parameter QFI,
//! and parity detection sits below both.
//!
//! Run with `cargo run --release --example coherent_squeezed_bounds`.

use num_complex::Complex64;
use su11::analytic::{f_coh_sq, f_diff, f_li, f_parity_cl};
use su11::metrology::qfim;
use su11::{InterferometerConfig, ModeSpec};

fn main() -> su11::Result<()> {
    println!("{:>5} {:>5} {:>5} {:>14} {:>14} {:>14} {:>14} {:>12}", "|a|^2", "r", "g", "1/bound", "two-param", "single QFI", "parity", "difference");
    for (a2, r, g) in [(1.0f64, 0.5, 0.5), (0.5, 0.3, 0.3), (1.0, 0.3, 0.5)] {
        let cfg = InterferometerConfig::new(
            ModeSpec::coherent(Complex64::new(a2.sqrt(), 0.0)),
            ModeSpec::squeezed(r),
            g,
        );
        let (state, _) = cfg.run(|c| cfg.pure_output(c))?;
        let m = qfim(&state)?;
        println!(
            "{a2:>5} {r:>5} {g:>5} {:>14.8} {:>14.8} {:>14.8} {:>14.8} {:>12.3e}",
            m.bound_phi_s.information(),
            f_coh_sq(g, a2, r),
            f_li(g, a2, r),
            f_parity_cl(g, a2, r),
            f_diff(g, a2, r)
        );
    }
    Ok(())
}
