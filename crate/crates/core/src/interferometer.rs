//! End-to-end interferometer configuration and the cutoff escalation policy.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{FockCutoff, GeneratorKind, NumberDiagonalEnsemble, TwoModePureState};
use crate::opa::{apply_opa_ensemble, OpaParams, OpaPropagator};
use crate::states::{phase_average_ensemble, product_state, ModeSpec, TwoModeInput};

/// Largest total photon number the escalation policy will try by default.
pub const DEFAULT_MAX_CUTOFF: usize = 320;

/// Full description of one interferometer run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterferometerConfig {
    pub mode_a: ModeSpec,
    pub mode_b: ModeSpec,
    pub gain: f64,
    #[serde(default)]
    pub pump_phase: f64,
    /// Generator of the single unknown phase.
    pub model: GeneratorKind,
    /// Phase-average the input before the first OPA.
    #[serde(default)]
    pub averaging: bool,
    /// Gain of the second OPA; `None` means balanced (same as the first).
    #[serde(default)]
    pub second_gain: Option<f64>,
    /// Fixed cutoff; `None` lets the escalation policy pick one.
    #[serde(default)]
    pub cutoff: Option<FockCutoff>,
    #[serde(default = "default_guard")]
    pub guard: usize,
    #[serde(default = "default_tail_tol")]
    pub tail_tol: f64,
}

fn default_guard() -> usize {
    FockCutoff::default().guard()
}

fn default_tail_tol() -> f64 {
    FockCutoff::default().tail_tol()
}

impl InterferometerConfig {
    pub fn new(mode_a: ModeSpec, mode_b: ModeSpec, gain: f64) -> Self {
        InterferometerConfig {
            mode_a,
            mode_b,
            gain,
            pump_phase: 0.0,
            model: GeneratorKind::Upper,
            averaging: false,
            second_gain: None,
            cutoff: None,
            guard: default_guard(),
            tail_tol: default_tail_tol(),
        }
    }

    pub fn with_model(mut self, model: GeneratorKind) -> Self {
        self.model = model;
        self
    }

    pub fn averaged(mut self, on: bool) -> Self {
        self.averaging = on;
        self
    }

    pub fn with_tail_tol(mut self, tail_tol: f64) -> Self {
        self.tail_tol = tail_tol;
        self
    }

    pub fn with_cutoff(mut self, cutoff: FockCutoff) -> Self {
        self.cutoff = Some(cutoff);
        self
    }

    pub fn opa(&self) -> Result<OpaParams> {
        OpaParams::new(self.gain, self.pump_phase)
    }

    pub fn second_opa(&self) -> Result<OpaParams> {
        Ok(OpaParams::new(self.second_gain.unwrap_or(self.gain), self.pump_phase)?.inverted())
    }

    /// Initial cutoff guess from the mean photon number after the first OPA.
    pub fn suggested_cutoff(&self) -> Result<FockCutoff> {
        let vacuum = FockCutoff::for_opa_vacuum(self.gain, self.guard, self.tail_tol)?;
        let n_in = self.mode_a.mean_photons() + self.mode_b.mean_photons();
        let spread = (self.mode_a.photon_variance() + self.mode_b.photon_variance()).sqrt();
        let boost = (2.0 * self.gain).cosh();
        let digits = -self.tail_tol.log10();
        let input_span = (n_in + digits * (spread + 1.0)) * boost;
        let k = vacuum.max_total() + input_span.ceil() as usize;
        FockCutoff::new(k.max(4), self.guard, self.tail_tol)
    }

    /// Prepared (and optionally phase-averaged) input.
    pub fn input(&self, cutoff: &FockCutoff) -> Result<TwoModeInput> {
        let input = product_state(&self.mode_a, &self.mode_b, cutoff)?;
        if !self.averaging {
            return Ok(input);
        }
        let ens = input.into_ensemble();
        phase_average_ensemble(&ens).map(TwoModeInput::Mixed)
    }

    /// Pure state after the first OPA; errors if the input is mixed.
    pub fn pure_output(&self, cutoff: &FockCutoff) -> Result<TwoModePureState> {
        match self.input(cutoff)? {
            TwoModeInput::Pure(s) => {
                OpaPropagator::new(self.gain, *cutoff).apply(&s, self.pump_phase)
            }
            TwoModeInput::Mixed(_) => Err(Error::Precondition(
                "configuration describes a mixed state; a pure state is required".into(),
            )),
        }
    }

    /// State after the first OPA as an ensemble (single branch for pure inputs).
    pub fn ensemble_output(&self, cutoff: &FockCutoff) -> Result<NumberDiagonalEnsemble> {
        let ens = self.input(cutoff)?.into_ensemble();
        apply_opa_ensemble(&ens, &self.opa()?)
    }

    /// Runs `f` at the configured cutoff, or escalates from the suggested one.
    pub fn run<T>(&self, f: impl FnMut(&FockCutoff) -> Result<T>) -> Result<(T, FockCutoff)> {
        match self.cutoff {
            Some(c) => {
                let mut f = f;
                f(&c).map(|v| (v, c))
            }
            None => escalate(self.suggested_cutoff()?, DEFAULT_MAX_CUTOFF, f),
        }
    }
}

/// Doubles `max_total` (clamped to `cap`) until `f` stops reporting truncation loss.
pub fn escalate<T>(
    start: FockCutoff,
    cap: usize,
    mut f: impl FnMut(&FockCutoff) -> Result<T>,
) -> Result<(T, FockCutoff)> {
    let mut cutoff = start.with_max_total(start.max_total().min(cap))?;
    loop {
        match f(&cutoff) {
            Ok(v) => return Ok((v, cutoff)),
            Err(e @ Error::Convergence { .. }) => {
                if cutoff.max_total() >= cap {
                    return Err(e);
                }
                let next = (cutoff.max_total() * 2).min(cap);
                cutoff = cutoff.with_max_total(next)?;
            }
            Err(e) => return Err(e),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn escalation_doubles_until_converged() {
        let start = FockCutoff::new(5, 12, 1e-10).unwrap();
        let mut tried = Vec::new();
        let (value, used) = escalate(start, 100, |c| {
            tried.push(c.max_total());
            if c.max_total() < 30 {
                Err(Error::Convergence { deficit: 1.0, tail_tol: 1e-10, suggested_max_total: 0 })
            } else {
                Ok(c.max_total())
            }
        })
        .unwrap();
        assert_eq!(tried, vec![5, 10, 20, 40]);
        assert_eq!((value, used.max_total()), (40, 40));

        let capped = escalate(start, 12, |_| -> Result<()> {
            Err(Error::Convergence { deficit: 1.0, tail_tol: 1e-10, suggested_max_total: 0 })
        });
        assert!(capped.unwrap_err().is_convergence());
    }

    #[test]
    fn suggested_cutoff_is_usable() {
        let cfg = InterferometerConfig::new(ModeSpec::coherent(Complex64::new(1.0, 0.0)), ModeSpec::squeezed(0.5), 0.5);
        let start = cfg.suggested_cutoff().unwrap();
        let (_, used) = cfg.run(|c| cfg.pure_output(c)).unwrap();
        assert!(used.max_total() <= 2 * start.max_total(), "{} from {}", used.max_total(), start.max_total());
    }

    #[test]
    fn averaged_input_is_an_ensemble() {
        let cfg = InterferometerConfig::new(ModeSpec::coherent(Complex64::new(1.0, 0.0)), ModeSpec::Vacuum, 0.5)
            .averaged(true);
        let (ens, _) = cfg.run(|c| cfg.ensemble_output(c)).unwrap();
        assert!(ens.len() > 10);
        assert!(cfg.run(|c| cfg.pure_output(c)).is_err());
    }
}
