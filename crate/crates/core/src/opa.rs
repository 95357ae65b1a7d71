//! Optical elements of the SU(1,1) interferometer: the two-mode squeezer,
//! the phase-shift models and the inverted squeezer used before detection.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{
    Branch, FockCutoff, GeneratorKind, NumberDiagonalEnsemble, TwoModePureState,
};
use crate::ladder::LadderPropagator;

/// Gain and pump phase of an optical parametric amplifier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OpaParams {
    gain: f64,
    pump_phase: f64,
}

impl OpaParams {
    pub fn new(gain: f64, pump_phase: f64) -> Result<Self> {
        if !(gain >= 0.0 && gain.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "OPA gain must be finite and non-negative, got {gain}"
            )));
        }
        if !pump_phase.is_finite() {
            return Err(Error::InvalidParameter("pump phase must be finite".into()));
        }
        Ok(OpaParams { gain, pump_phase })
    }

    pub fn gain(&self) -> f64 {
        self.gain
    }

    pub fn pump_phase(&self) -> f64 {
        self.pump_phase
    }

    /// Mean photon number the OPA generates from vacuum, `2 sinh^2 g`.
    pub fn n_kappa(&self) -> f64 {
        2.0 * self.gain.sinh().powi(2)
    }

    /// Same gain, pump shifted by pi: the inverse squeezer.
    pub fn inverted(&self) -> Self {
        OpaParams {
            gain: self.gain,
            pump_phase: self.pump_phase + PI,
        }
    }
}

/// Unknown-phase configurations inside the interferometer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseModel {
    Upper(f64),
    Lower(f64),
    Split(f64),
    TwoPhase { sum: f64, diff: f64 },
}

impl PhaseModel {
    /// Per-arm phases `(phi_1, phi_2)`.
    pub fn arm_phases(&self) -> (f64, f64) {
        match *self {
            PhaseModel::Upper(phi) => (phi, 0.0),
            PhaseModel::Lower(phi) => (0.0, phi),
            PhaseModel::Split(phi) => (phi / 2.0, phi / 2.0),
            PhaseModel::TwoPhase { sum, diff } => ((sum + diff) / 2.0, (sum - diff) / 2.0),
        }
    }

    /// Phase acquired by `|n_a, n_b>`.
    pub fn phase(&self, n_a: usize, n_b: usize) -> f64 {
        match *self {
            PhaseModel::Upper(phi) => GeneratorKind::Upper.eigenvalue(n_a, n_b) * phi,
            PhaseModel::Lower(phi) => GeneratorKind::Lower.eigenvalue(n_a, n_b) * phi,
            PhaseModel::Split(phi) => GeneratorKind::Sum.eigenvalue(n_a, n_b) * phi,
            PhaseModel::TwoPhase { sum, diff } => {
                GeneratorKind::Sum.eigenvalue(n_a, n_b) * sum
                    + GeneratorKind::Difference.eigenvalue(n_a, n_b) * diff
            }
        }
    }

    /// Single-parameter model for a generator; `None` for the difference and
    /// number operators, which have no arm interpretation here.
    pub fn for_generator(kind: GeneratorKind, phi: f64) -> Option<Self> {
        match kind {
            GeneratorKind::Upper => Some(PhaseModel::Upper(phi)),
            GeneratorKind::Lower => Some(PhaseModel::Lower(phi)),
            GeneratorKind::Sum => Some(PhaseModel::Split(phi)),
            _ => None,
        }
    }
}

/// Things a diagonal phase shift can act on.
pub trait PhaseShift: Sized {
    fn phase_shifted(&self, model: &PhaseModel) -> Self;
}

impl PhaseShift for TwoModePureState {
    fn phase_shifted(&self, model: &PhaseModel) -> Self {
        self.map_phase(|na, nb| model.phase(na, nb))
    }
}

impl PhaseShift for NumberDiagonalEnsemble {
    fn phase_shifted(&self, model: &PhaseModel) -> Self {
        let branches = self
            .branches()
            .iter()
            .map(|b| Branch {
                weight: b.weight,
                label: b.label,
                state: b.state.phase_shifted(model),
            })
            .collect();
        NumberDiagonalEnsemble::from_parts_unchecked(branches, *self.cutoff())
    }
}

/// `exp(i g phi)` for the generator(s) selected by `model`; exactly norm preserving.
pub fn apply_phase<T: PhaseShift>(target: &T, model: &PhaseModel) -> T {
    target.phase_shifted(model)
}

/// Two-mode squeezer `exp[g (e^{i theta} a^dag b^dag - e^{-i theta} a b)]`
/// on a truncated space, decomposed into its `n_a - n_b` diagonal blocks.
///
/// Block propagators depend only on the gain and the diagonal, so one
/// propagator serves every pump phase; blocks are built on first use.
#[derive(Debug)]
pub struct OpaPropagator {
    gain: f64,
    cutoff: FockCutoff,
    blocks: Vec<OnceLock<LadderPropagator>>,
}

impl OpaPropagator {
    pub fn new(gain: f64, cutoff: FockCutoff) -> Self {
        let w = cutoff.working_total();
        OpaPropagator {
            gain,
            cutoff,
            blocks: (0..=w).map(|_| OnceLock::new()).collect(),
        }
    }

    pub fn gain(&self) -> f64 {
        self.gain
    }

    pub fn cutoff(&self) -> &FockCutoff {
        &self.cutoff
    }

    /// Propagator of the diagonal `|n_a - n_b| = offset` on the working space.
    pub fn block(&self, offset: usize) -> &LadderPropagator {
        self.blocks[offset].get_or_init(|| {
            let pairs = (self.cutoff.working_total() - offset) / 2;
            let couplings: Vec<f64> = (0..pairs)
                .map(|k| self.gain * (((offset + k + 1) * (k + 1)) as f64).sqrt())
                .collect();
            LadderPropagator::new(&couplings)
        })
    }

    /// Largest entry of `U^dag U - 1` for one diagonal block.
    pub fn unitarity_residual(&self, offset: usize) -> f64 {
        let core = self.block(offset).core();
        let gram = core.transpose() * core;
        let mut worst = 0.0f64;
        for i in 0..gram.nrows() {
            for j in 0..gram.ncols() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((gram[(i, j)] - target).abs());
            }
        }
        worst
    }

    /// Applies the squeezer with the given pump phase, discarding the guard band.
    pub fn apply(&self, state: &TwoModePureState, pump_phase: f64) -> Result<TwoModePureState> {
        let out = self.apply_unchecked(state, pump_phase)?;
        let tail_tol = self.cutoff.tail_tol();
        if out.norm_deficit() > tail_tol {
            return Err(Error::Convergence {
                deficit: out.norm_deficit(),
                tail_tol,
                suggested_max_total: self.cutoff.max_total() * 2,
            });
        }
        Ok(out)
    }

    /// As [`apply`](Self::apply) but leaves the tolerance check to the caller.
    pub fn apply_unchecked(
        &self,
        state: &TwoModePureState,
        pump_phase: f64,
    ) -> Result<TwoModePureState> {
        let k_max = self.cutoff.max_total();
        if state.cutoff().max_total() != k_max {
            return Err(Error::Dimension(format!(
                "propagator built for max_total = {k_max}, state has {}",
                state.cutoff().max_total()
            )));
        }
        let w = self.cutoff.working_total();
        let zero = Complex64::new(0.0, 0.0);
        let mut out = vec![zero; self.cutoff.len()];
        let mut discarded = 0.0;

        for diag in state.diagonal_support() {
            let offset = diag.unsigned_abs() as usize;
            let site = |k: usize| -> (usize, usize) {
                if diag >= 0 {
                    (offset + k, k)
                } else {
                    (k, offset + k)
                }
            };
            let len = (w - offset) / 2 + 1;
            let chain: Vec<Complex64> = (0..len)
                .map(|k| {
                    let (na, nb) = site(k);
                    state.amplitude(na, nb)
                })
                .collect();
            let evolved = self.block(offset).apply(&chain, pump_phase);
            for (k, amp) in evolved.into_iter().enumerate() {
                let (na, nb) = site(k);
                match self.cutoff.index(na, nb) {
                    Some(i) => out[i] = amp,
                    None => discarded += amp.norm_sqr(),
                }
            }
        }

        Ok(TwoModePureState::from_parts_unchecked(
            self.cutoff,
            out,
            state.norm_deficit() + discarded,
        ))
    }
}

/// First squeezer of the interferometer.
pub fn apply_opa(state: &TwoModePureState, params: &OpaParams) -> Result<TwoModePureState> {
    OpaPropagator::new(params.gain(), *state.cutoff()).apply(state, params.pump_phase())
}

/// Branchwise [`apply_opa`]; weights are unchanged and the tolerance applies
/// to the weighted total deficit.
///
/// Branches carrying negligible weight may individually lose more than
/// `tail_tol` of their norm, as long as the ensemble as a whole does not.
pub fn apply_opa_ensemble(
    ens: &NumberDiagonalEnsemble,
    params: &OpaParams,
) -> Result<NumberDiagonalEnsemble> {
    let prop = OpaPropagator::new(params.gain(), *ens.cutoff());
    apply_opa_ensemble_with(&prop, ens, params.pump_phase())
}

pub fn apply_opa_ensemble_with(
    prop: &OpaPropagator,
    ens: &NumberDiagonalEnsemble,
    pump_phase: f64,
) -> Result<NumberDiagonalEnsemble> {
    let branches = ens
        .branches()
        .iter()
        .map(|b| {
            Ok(Branch {
                weight: b.weight,
                label: b.label,
                state: prop.apply_unchecked(&b.state, pump_phase)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let out = NumberDiagonalEnsemble::from_parts_unchecked(branches, *ens.cutoff());
    let tail_tol = ens.cutoff().tail_tol();
    if out.norm_deficit() > tail_tol {
        return Err(Error::Convergence {
            deficit: out.norm_deficit(),
            tail_tol,
            suggested_max_total: ens.cutoff().max_total() * 2,
        });
    }
    Ok(out)
}

/// Squeezer with the pump shifted by pi, undoing [`apply_opa`] at zero internal phase.
pub fn second_opa(state: &TwoModePureState, params: &OpaParams) -> Result<TwoModePureState> {
    apply_opa(state, &params.inverted())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::inner_product;

    fn cutoff(k: usize) -> FockCutoff {
        FockCutoff::new(k, 12, 1e-10).unwrap()
    }

    fn binomial(n: usize, k: usize) -> f64 {
        (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
    }

    #[test]
    fn zero_gain_is_identity() {
        let c = cutoff(10);
        let st = TwoModePureState::basis(c, 3, 1).unwrap();
        let out = apply_opa(&st, &OpaParams::new(0.0, 0.7).unwrap()).unwrap();
        assert_eq!(out.amplitudes(), st.amplitudes());
        assert_eq!(out.norm_deficit(), 0.0);
    }

    #[test]
    fn fock_branch_matches_closed_form() {
        // c_{n,k} = e^{ik theta} sqrt(C(n+k,k)) tanh^k g / cosh^{n+1} g on |n+k, k>
        for g in [0.3, 1.0] {
            let theta = 0.6;
            let c = cutoff(if g > 0.5 { 160 } else { 60 });
            for n in 0..=5 {
                let st = TwoModePureState::basis(c, n, 0).unwrap();
                let out = apply_opa(&st, &OpaParams::new(g, theta).unwrap()).unwrap();
                for k in 0..20 {
                    let expect = Complex64::from_polar(
                        binomial(n + k, k).sqrt() * g.tanh().powi(k as i32)
                            / g.cosh().powi(n as i32 + 1),
                        k as f64 * theta,
                    );
                    let got = out.amplitude(n + k, k);
                    assert!((got - expect).norm() < 1e-12, "g={g} n={n} k={k}: {got} vs {expect}");
                }
            }
        }
    }

    #[test]
    fn lower_mode_branch_mirrors_upper() {
        let c = cutoff(60);
        let p = OpaParams::new(0.4, -0.3).unwrap();
        let up = apply_opa(&TwoModePureState::basis(c, 2, 0).unwrap(), &p).unwrap();
        let down = apply_opa(&TwoModePureState::basis(c, 0, 2).unwrap(), &p).unwrap();
        for k in 0..25 {
            assert!((up.amplitude(2 + k, k) - down.amplitude(k, 2 + k)).norm() < 1e-14);
        }
    }

    #[test]
    fn diagonal_is_conserved_exactly() {
        let c = cutoff(60);
        let p = OpaParams::new(0.5, 0.2).unwrap();
        for (na, nb) in [(0, 0), (4, 1), (1, 3)] {
            let st = TwoModePureState::basis(c, na, nb).unwrap();
            let out = apply_opa(&st, &p).unwrap();
            let d = na as i64 - nb as i64;
            for (a, b, amp) in out.iter() {
                if a as i64 - b as i64 != d {
                    assert_eq!(amp, Complex64::new(0.0, 0.0));
                }
            }
            assert_eq!(out.diagonal_support(), vec![d]);
        }
    }

    #[test]
    fn round_trip_through_inverse_squeezer() {
        let c = cutoff(60);
        let p = OpaParams::new(0.8, 0.4).unwrap();
        let vac = TwoModePureState::vacuum(c);
        let back = second_opa(&apply_opa(&vac, &p).unwrap(), &p).unwrap();
        assert!((back.amplitude(0, 0) - Complex64::new(1.0, 0.0)).norm() < 1e-10);
        assert!((back.norm_sqr() - 1.0).abs() < 1e-10);

        let mid = apply_phase(&apply_opa(&vac, &p).unwrap(), &PhaseModel::Split(0.0));
        let back = second_opa(&mid, &p).unwrap();
        assert!((back.amplitude(0, 0) - Complex64::new(1.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn insufficient_cutoff_is_reported() {
        let c = cutoff(6);
        let p = OpaParams::new(1.5, 0.0).unwrap();
        let err = apply_opa(&TwoModePureState::vacuum(c), &p).unwrap_err();
        match err {
            Error::Convergence { suggested_max_total, deficit, .. } => {
                assert_eq!(suggested_max_total, 12);
                assert!(deficit > 1e-10);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn phase_models_compose() {
        let c = cutoff(40);
        let p = OpaParams::new(0.4, 0.0).unwrap();
        let st = apply_opa(&TwoModePureState::basis(c, 2, 1).unwrap(), &p).unwrap();
        let phi = 0.37;
        let a = apply_phase(&apply_phase(&st, &PhaseModel::Upper(phi)), &PhaseModel::Lower(phi));
        let b = apply_phase(&st, &PhaseModel::TwoPhase { sum: 2.0 * phi, diff: 0.0 });
        for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
            assert!((x - y).norm() < 1e-15);
        }
        let z = apply_phase(&st, &PhaseModel::Split(0.0));
        assert_eq!(z.amplitudes(), st.amplitudes());

        let (ps, pd) = (0.9, -0.25);
        let basis = TwoModePureState::basis(c, 3, 1).unwrap();
        let shifted = apply_phase(&basis, &PhaseModel::TwoPhase { sum: ps, diff: pd });
        let expect = Complex64::from_polar(1.0, ps * 4.0 / 2.0 + pd * 2.0 / 2.0);
        assert!((shifted.amplitude(3, 1) - expect).norm() < 1e-15);
        assert_eq!(PhaseModel::TwoPhase { sum: ps, diff: pd }.arm_phases(), ((ps + pd) / 2.0, (ps - pd) / 2.0));
    }

    #[test]
    fn phase_shift_preserves_norm_and_overlaps() {
        let c = cutoff(40);
        let p = OpaParams::new(0.3, 0.0).unwrap();
        let s = apply_opa(&TwoModePureState::basis(c, 1, 0).unwrap(), &p).unwrap();
        let t = apply_phase(&s, &PhaseModel::Upper(1.3));
        assert!((t.norm_sqr() - s.norm_sqr()).abs() < 1e-15);
        let ov = inner_product(&s, &t).unwrap();
        assert!(ov.norm() < 1.0);
    }
}
