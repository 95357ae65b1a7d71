//! Selects the closed form that applies to a configuration, if any.

use num_complex::Complex64;

use crate::analytic::{self, gong_model_for, Formula, GongModel};
use crate::fock::GeneratorKind;
use crate::interferometer::InterferometerConfig;
use crate::states::ModeSpec;

/// One closed-form value to compare against a numeric quantity.
#[derive(Debug, Clone, PartialEq)]
pub struct Reference {
    /// Numeric quantity it matches: `1/bound_phi_s`, `f_dd`, `f_ds` or `f_ss`.
    pub quantity: &'static str,
    pub name: &'static str,
    pub value: f64,
}

fn is_number_diagonal(spec: &ModeSpec) -> bool {
    matches!(spec, ModeSpec::Vacuum | ModeSpec::Fock(_) | ModeSpec::NumberMixture(_))
}

fn coherent_amplitude(spec: &ModeSpec) -> Option<Complex64> {
    match spec {
        ModeSpec::Coherent { re, im } => Some(Complex64::new(*re, *im)),
        _ => None,
    }
}

/// Real coherent amplitude in A, phase-zero squeezed vacuum in B, pump phase zero.
fn coherent_squeezed(cfg: &InterferometerConfig) -> Option<(f64, f64)> {
    match (&cfg.mode_a, &cfg.mode_b) {
        (ModeSpec::Coherent { re, im }, ModeSpec::SqueezedVacuum { r, phase })
            if *im == 0.0 && *phase == 0.0 && cfg.pump_phase == 0.0 =>
        {
            Some((re * re, *r))
        }
        _ => None,
    }
}

/// Mean photon number of the populated mode when the other one is vacuum,
/// with `true` when the populated mode is A.
fn one_vacuum(cfg: &InterferometerConfig) -> Option<(&ModeSpec, bool)> {
    match (&cfg.mode_a, &cfg.mode_b) {
        (a, ModeSpec::Vacuum) => Some((a, true)),
        (ModeSpec::Vacuum, b) => Some((b, false)),
        _ => None,
    }
}

/// Closed form for the single-phase QFI of `cfg`.
pub fn qfi_reference(cfg: &InterferometerConfig) -> Option<(&'static str, f64)> {
    let g = cfg.gain;
    if cfg.model == GeneratorKind::Difference {
        return None;
    }
    let (populated, in_a) = one_vacuum(cfg)?;
    if *populated == ModeSpec::Vacuum {
        return Some((Formula::FVacuum.name(), analytic::f_vacuum(g)));
    }
    let diagonal_after_averaging = cfg.averaging || is_number_diagonal(populated);
    if diagonal_after_averaging && matches!(cfg.model, GeneratorKind::Upper | GeneratorKind::Lower | GeneratorKind::Sum) {
        return Some((Formula::FAveraged.name(), analytic::f_averaged(g, populated.mean_photons())));
    }
    let alpha = coherent_amplitude(populated)?;
    let model = gong_model_for(cfg.model, in_a)?;
    Some((Formula::FGong.name(), analytic::f_gong(g, alpha.norm_sqr(), model)))
}

/// Closed forms for the two-parameter QFIM of `cfg`.
pub fn qfim_references(cfg: &InterferometerConfig) -> Vec<Reference> {
    let g = cfg.gain;
    let mut out = Vec::new();
    if cfg.averaging {
        return out;
    }
    if let Some((populated, in_a)) = one_vacuum(cfg) {
        let n = populated.mean_photons();
        out.push(Reference {
            quantity: "1/bound_phi_s",
            name: if n == 0.0 { Formula::FVacuum.name() } else { Formula::FAveraged.name() },
            value: analytic::f_averaged(g, n),
        });
        if in_a {
            let (dd, ds, ss) = analytic::qfim_one_vacuum(g, n, populated.photon_variance());
            out.push(Reference { quantity: "f_dd", name: "qfim_one_vacuum.f_dd", value: dd });
            out.push(Reference { quantity: "f_ds", name: "qfim_one_vacuum.f_ds", value: ds });
            out.push(Reference { quantity: "f_ss", name: "qfim_one_vacuum.f_ss", value: ss });
        }
        return out;
    }
    if let (Some(alpha), Some(beta)) = (coherent_amplitude(&cfg.mode_a), coherent_amplitude(&cfg.mode_b)) {
        if cfg.pump_phase == 0.0 {
            if let Ok(v) = analytic::f_two_coherent(g, alpha, beta) {
                out.push(Reference {
                    quantity: "1/bound_phi_s",
                    name: Formula::FTwoCoherent.name(),
                    value: v,
                });
            }
        }
        return out;
    }
    if let Some((a2, r)) = coherent_squeezed(cfg) {
        out.push(Reference {
            quantity: "1/bound_phi_s",
            name: Formula::FCohSq.name(),
            value: analytic::f_coh_sq(g, a2, r),
        });
        out.push(Reference {
            quantity: "f_ss",
            name: Formula::FLi.name(),
            value: analytic::f_li(g, a2, r),
        });
    }
    out
}

/// Closed form for the largest parity-detection CFI of `cfg`.
pub fn parity_reference(cfg: &InterferometerConfig) -> Option<(&'static str, f64)> {
    if cfg.averaging || cfg.second_gain.is_some_and(|g2| g2 != cfg.gain) {
        return None;
    }
    if cfg.mode_a == ModeSpec::Vacuum && cfg.mode_b == ModeSpec::Vacuum {
        return Some((Formula::FVacuum.name(), analytic::f_vacuum(cfg.gain)));
    }
    let (a2, r) = coherent_squeezed(cfg)?;
    Some((Formula::FParityCl.name(), analytic::f_parity_cl(cfg.gain, a2, r)))
}

/// The closed form named `formula` evaluated for `cfg`, when it applies;
/// used by `sweep` for its analytic columns.
pub fn analytic_for_config(cfg: &InterferometerConfig, formula: Formula) -> Option<f64> {
    let g = cfg.gain;
    let amp = |s: &ModeSpec| match s {
        ModeSpec::Vacuum => Some(Complex64::new(0.0, 0.0)),
        other => coherent_amplitude(other),
    };
    match formula {
        Formula::FVacuum => Some(analytic::f_vacuum(g)),
        Formula::FGong => {
            let (populated, in_a) = one_vacuum(cfg)?;
            let n = match populated {
                ModeSpec::Vacuum => 0.0,
                other => coherent_amplitude(other)?.norm_sqr(),
            };
            let model = gong_model_for(cfg.model, in_a).unwrap_or(GongModel::S);
            Some(analytic::f_gong(g, n, model))
        }
        Formula::FAveraged => Some(analytic::f_averaged(g, one_vacuum(cfg)?.0.mean_photons())),
        Formula::BoundPhiSOneVacuum => {
            let (populated, _) = one_vacuum(cfg)?;
            Some(analytic::bound_phi_s_one_vacuum(g, populated.mean_photons(), populated.photon_variance()).value())
        }
        Formula::FTwoCoherent => {
            let (alpha, beta) = (amp(&cfg.mode_a)?, amp(&cfg.mode_b)?);
            if alpha.norm_sqr() + beta.norm_sqr() == 0.0 {
                Some(analytic::f_vacuum(g))
            } else {
                analytic::f_two_coherent(g, alpha, beta).ok()
            }
        }
        Formula::FTwoCoherentMax => {
            let n_in = amp(&cfg.mode_a)?.norm_sqr() + amp(&cfg.mode_b)?.norm_sqr();
            Some(analytic::f_two_coherent_max(g, n_in))
        }
        Formula::FCohSq | Formula::FLi | Formula::FDiff | Formula::FParityCl => {
            let (a2, r) = match (&cfg.mode_a, &cfg.mode_b) {
                (ModeSpec::Coherent { re, im }, ModeSpec::SqueezedVacuum { r, .. }) => (re * re + im * im, *r),
                (ModeSpec::Coherent { re, im }, ModeSpec::Vacuum) => (re * re + im * im, 0.0),
                (ModeSpec::Vacuum, ModeSpec::SqueezedVacuum { r, .. }) => (0.0, *r),
                (ModeSpec::Vacuum, ModeSpec::Vacuum) => (0.0, 0.0),
                _ => return None,
            };
            Some(match formula {
                Formula::FCohSq => analytic::f_coh_sq(g, a2, r),
                Formula::FLi => analytic::f_li(g, a2, r),
                Formula::FDiff => analytic::f_diff(g, a2, r),
                _ => analytic::f_parity_cl(g, a2, r),
            })
        }
    }
}
