//! Input-state preparation: single-mode states, two-mode products and the
//! phase-averaged (photon-number diagonal) mixture.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{Branch, FockCutoff, NumberDiagonalEnsemble, TwoModePureState};
use crate::ladder::LadderPropagator;

/// Amplitudes below this magnitude count as absent when checking that a mode is empty.
const VACUUM_TOL: f64 = 1e-14;

/// Single-mode input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeSpec {
    Vacuum,
    Fock(usize),
    Coherent { re: f64, im: f64 },
    SqueezedVacuum { r: f64, phase: f64 },
    /// Photon-number mixture `sum_n p_n |n><n|`.
    NumberMixture(Vec<f64>),
}

impl ModeSpec {
    pub fn coherent(alpha: Complex64) -> Self {
        ModeSpec::Coherent {
            re: alpha.re,
            im: alpha.im,
        }
    }

    pub fn squeezed(r: f64) -> Self {
        ModeSpec::SqueezedVacuum { r, phase: 0.0 }
    }

    pub fn is_mixture(&self) -> bool {
        matches!(self, ModeSpec::NumberMixture(_))
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ModeSpec::Coherent { re, im } if !(re.is_finite() && im.is_finite()) => Err(
                Error::InvalidParameter("coherent amplitude must be finite".into()),
            ),
            ModeSpec::SqueezedVacuum { r, phase } if !(*r >= 0.0 && r.is_finite() && phase.is_finite()) => {
                Err(Error::InvalidParameter(format!(
                    "squeezing strength must be finite and non-negative, got {r}"
                )))
            }
            ModeSpec::NumberMixture(p) => {
                if p.is_empty() {
                    return Err(Error::InvalidParameter("number mixture is empty".into()));
                }
                if p.iter().any(|&x| !(x >= 0.0)) {
                    return Err(Error::InvalidParameter(
                        "number mixture probabilities must be non-negative".into(),
                    ));
                }
                let total: f64 = p.iter().sum();
                if (total - 1.0).abs() > 1e-12 {
                    return Err(Error::InvalidParameter(format!(
                        "number mixture probabilities sum to {total}, not 1"
                    )));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Mean photon number of the untruncated state.
    pub fn mean_photons(&self) -> f64 {
        match self {
            ModeSpec::Vacuum => 0.0,
            ModeSpec::Fock(n) => *n as f64,
            ModeSpec::Coherent { re, im } => re * re + im * im,
            ModeSpec::SqueezedVacuum { r, .. } => r.sinh().powi(2),
            ModeSpec::NumberMixture(p) => p.iter().enumerate().map(|(n, w)| n as f64 * w).sum(),
        }
    }

    /// Photon-number variance of the untruncated state.
    pub fn photon_variance(&self) -> f64 {
        match self {
            ModeSpec::Vacuum | ModeSpec::Fock(_) => 0.0,
            ModeSpec::Coherent { .. } => self.mean_photons(),
            ModeSpec::SqueezedVacuum { r, .. } => 2.0 * (r.sinh() * r.cosh()).powi(2),
            ModeSpec::NumberMixture(p) => {
                let m = self.mean_photons();
                p.iter().enumerate().map(|(n, w)| w * (n as f64 - m).powi(2)).sum()
            }
        }
    }
}

/// Truncated single-mode amplitudes `c_0 .. c_K` and the weight lost beyond `K`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeAmplitudes {
    pub amplitudes: Vec<Complex64>,
    pub norm_deficit: f64,
}

impl ModeAmplitudes {
    pub fn mean_photons(&self) -> f64 {
        let norm: f64 = self.amplitudes.iter().map(|c| c.norm_sqr()).sum();
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(n, c)| n as f64 * c.norm_sqr())
            .sum::<f64>()
            / norm
    }
}

fn ln_factorial(n: usize) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

fn coherent_amplitudes(alpha: Complex64, levels: usize) -> Vec<Complex64> {
    let n_alpha = alpha.norm_sqr();
    (0..=levels)
        .map(|n| {
            if n_alpha == 0.0 {
                return if n == 0 { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
            }
            // e^{-|a|^2/2} a^n / sqrt(n!) in log-magnitude form
            let ln_mag = -n_alpha / 2.0 + n as f64 * alpha.norm().ln() - 0.5 * ln_factorial(n);
            Complex64::from_polar(ln_mag.exp(), n as f64 * alpha.arg())
        })
        .collect()
}

/// Squeezed vacuum from the single-mode generator
/// `(r/2)(e^{i phi} a^dag^2 - e^{-i phi} a^2)` exponentiated on the even levels.
fn squeezed_amplitudes(r: f64, phase: f64, cutoff: &FockCutoff) -> (Vec<Complex64>, f64) {
    let k = cutoff.max_total();
    let w = cutoff.working_total();
    let pairs = w / 2;
    let couplings: Vec<f64> = (0..pairs)
        .map(|m| 0.5 * r * (((2 * m + 1) * (2 * m + 2)) as f64).sqrt())
        .collect();
    let prop = LadderPropagator::new(&couplings);
    let mut seed = vec![Complex64::new(0.0, 0.0); pairs + 1];
    seed[0] = Complex64::new(1.0, 0.0);
    let even = prop.apply(&seed, phase);

    let mut amps = vec![Complex64::new(0.0, 0.0); k + 1];
    let mut discarded = 0.0;
    for (m, c) in even.into_iter().enumerate() {
        if 2 * m <= k {
            amps[2 * m] = c;
        } else {
            discarded += c.norm_sqr();
        }
    }
    (amps, discarded)
}

fn tail_error(deficit: f64, cutoff: &FockCutoff) -> Error {
    Error::Convergence {
        deficit,
        tail_tol: cutoff.tail_tol(),
        suggested_max_total: cutoff.max_total() * 2,
    }
}

/// Truncated amplitudes of a pure single-mode input.
pub fn prepare_pure(spec: &ModeSpec, cutoff: &FockCutoff) -> Result<ModeAmplitudes> {
    spec.validate()?;
    let k = cutoff.max_total();
    let (amplitudes, norm_deficit) = match *spec {
        ModeSpec::Vacuum => {
            let mut a = vec![Complex64::new(0.0, 0.0); k + 1];
            a[0] = Complex64::new(1.0, 0.0);
            (a, 0.0)
        }
        ModeSpec::Fock(n) => {
            if n > k {
                return Err(Error::Cutoff {
                    requested: n,
                    max_total: k,
                });
            }
            let mut a = vec![Complex64::new(0.0, 0.0); k + 1];
            a[n] = Complex64::new(1.0, 0.0);
            (a, 0.0)
        }
        ModeSpec::Coherent { re, im } => {
            let a = coherent_amplitudes(Complex64::new(re, im), k);
            let kept: f64 = a.iter().map(|c| c.norm_sqr()).sum();
            (a, (1.0 - kept).max(0.0))
        }
        ModeSpec::SqueezedVacuum { r, phase } => squeezed_amplitudes(r, phase, cutoff),
        ModeSpec::NumberMixture(_) => {
            return Err(Error::Precondition(
                "a number mixture has no pure-state amplitudes".into(),
            ))
        }
    };
    if norm_deficit > cutoff.tail_tol() {
        return Err(tail_error(norm_deficit, cutoff));
    }
    Ok(ModeAmplitudes {
        amplitudes,
        norm_deficit,
    })
}

fn tensor(a: &[Complex64], b: &[Complex64], cutoff: &FockCutoff) -> Result<TwoModePureState> {
    let amplitudes: Vec<Complex64> = cutoff.levels().map(|(na, nb)| a[na] * b[nb]).collect();
    let kept: f64 = amplitudes.iter().map(|c| c.norm_sqr()).sum();
    let deficit = (1.0 - kept).max(0.0);
    if deficit > cutoff.tail_tol() {
        return Err(tail_error(deficit, cutoff));
    }
    TwoModePureState::from_amplitudes(*cutoff, amplitudes, deficit)
}

/// A prepared two-mode input.
#[derive(Debug, Clone, PartialEq)]
pub enum TwoModeInput {
    Pure(TwoModePureState),
    Mixed(NumberDiagonalEnsemble),
}

impl TwoModeInput {
    pub fn into_ensemble(self) -> NumberDiagonalEnsemble {
        match self {
            TwoModeInput::Pure(s) => NumberDiagonalEnsemble::pure(s),
            TwoModeInput::Mixed(e) => e,
        }
    }

    pub fn norm_deficit(&self) -> f64 {
        match self {
            TwoModeInput::Pure(s) => s.norm_deficit(),
            TwoModeInput::Mixed(e) => e.norm_deficit(),
        }
    }
}

/// `a (x) b` on the triangular index set. A number mixture on either side
/// yields one branch per populated photon number.
pub fn product_state(a: &ModeSpec, b: &ModeSpec, cutoff: &FockCutoff) -> Result<TwoModeInput> {
    match (a, b) {
        (ModeSpec::NumberMixture(_), ModeSpec::NumberMixture(_)) => Err(Error::Unsupported(
            "both inputs are number mixtures; only one mixed input is supported".into(),
        )),
        (ModeSpec::NumberMixture(p), other) => {
            mixture_branches(p, other, cutoff, true).map(TwoModeInput::Mixed)
        }
        (other, ModeSpec::NumberMixture(p)) => {
            mixture_branches(p, other, cutoff, false).map(TwoModeInput::Mixed)
        }
        _ => {
            let pa = prepare_pure(a, cutoff)?;
            let pb = prepare_pure(b, cutoff)?;
            tensor(&pa.amplitudes, &pb.amplitudes, cutoff).map(TwoModeInput::Pure)
        }
    }
}

fn mixture_branches(
    probabilities: &[f64],
    other: &ModeSpec,
    cutoff: &FockCutoff,
    mixture_in_a: bool,
) -> Result<NumberDiagonalEnsemble> {
    ModeSpec::NumberMixture(probabilities.to_vec()).validate()?;
    let partner = prepare_pure(other, cutoff)?;
    let k = cutoff.max_total();
    let mut branches = Vec::new();
    for (n, &p) in probabilities.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        if n > k {
            return Err(Error::Cutoff {
                requested: n,
                max_total: k,
            });
        }
        let mut fock = vec![Complex64::new(0.0, 0.0); k + 1];
        fock[n] = Complex64::new(1.0, 0.0);
        let amplitudes: Vec<Complex64> = cutoff
            .levels()
            .map(|(na, nb)| {
                if mixture_in_a {
                    fock[na] * partner.amplitudes[nb]
                } else {
                    partner.amplitudes[na] * fock[nb]
                }
            })
            .collect();
        let kept: f64 = amplitudes.iter().map(|c| c.norm_sqr()).sum();
        let state = TwoModePureState::from_parts_unchecked(*cutoff, amplitudes, (1.0 - kept).max(0.0));
        branches.push(Branch {
            weight: p,
            label: n,
            state,
        });
    }
    let ens = NumberDiagonalEnsemble::new(branches)?;
    if ens.norm_deficit() > cutoff.tail_tol() {
        return Err(tail_error(ens.norm_deficit(), cutoff));
    }
    Ok(ens)
}

/// Removes the common phase reference of an input whose mode B is vacuum,
/// leaving `sum_n p_n |n><n| (x) |0><0|` with `p_n = |c_n|^2`.
pub fn phase_average(state: &TwoModePureState) -> Result<NumberDiagonalEnsemble> {
    if let Some((na, nb, c)) = state
        .iter()
        .find(|&(_, nb, c)| nb > 0 && c.norm() > VACUUM_TOL)
    {
        return Err(Error::Precondition(format!(
            "phase averaging needs mode B in vacuum, found amplitude {c} at |{na},{nb}>"
        )));
    }
    let cutoff = *state.cutoff();
    let mut branches = Vec::new();
    for n in 0..=cutoff.max_total() {
        let p = state.amplitude(n, 0).norm_sqr();
        if p > 0.0 {
            branches.push(Branch {
                weight: p,
                label: n,
                state: TwoModePureState::basis(cutoff, n, 0)?,
            });
        }
    }
    let ens = NumberDiagonalEnsemble::from_parts_unchecked(branches, cutoff);
    if ens.norm_deficit() > cutoff.tail_tol() {
        return Err(tail_error(ens.norm_deficit(), &cutoff));
    }
    Ok(ens)
}

/// Branchwise [`phase_average`], merging branches that land on the same photon number.
pub fn phase_average_ensemble(ens: &NumberDiagonalEnsemble) -> Result<NumberDiagonalEnsemble> {
    let cutoff = *ens.cutoff();
    let mut weights: BTreeMap<usize, f64> = BTreeMap::new();
    for b in ens.branches() {
        for sub in phase_average(&b.state)?.branches() {
            *weights.entry(sub.label).or_default() += b.weight * sub.weight;
        }
    }
    let branches = weights
        .into_iter()
        .map(|(n, w)| {
            Ok(Branch {
                weight: w,
                label: n,
                state: TwoModePureState::basis(cutoff, n, 0)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    NumberDiagonalEnsemble::new(branches)
}

/// Photon-number distribution of mode A (for inputs with mode B in vacuum).
pub fn mode_a_distribution(state: &TwoModePureState) -> Vec<f64> {
    (0..=state.cutoff().max_total())
        .map(|n| state.amplitude(n, 0).norm_sqr())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cutoff(k: usize) -> FockCutoff {
        FockCutoff::new(k, 12, 1e-10).unwrap()
    }

    #[test]
    fn vacuum_and_zero_coherent_agree_exactly() {
        let c = cutoff(10);
        let v = prepare_pure(&ModeSpec::Vacuum, &c).unwrap();
        let z = prepare_pure(&ModeSpec::coherent(Complex64::new(0.0, 0.0)), &c).unwrap();
        assert_eq!(v, z);
        assert_eq!(v.amplitudes[0], Complex64::new(1.0, 0.0));
        assert!(v.amplitudes[1..].iter().all(|c| *c == Complex64::new(0.0, 0.0)));
    }

    #[test]
    fn coherent_mean_photon_number() {
        let c = cutoff(40);
        let st = prepare_pure(&ModeSpec::coherent(Complex64::new(1.0, 0.0)), &c).unwrap();
        // brute-force <n> over the prepared vector
        let mean: f64 = st
            .amplitudes
            .iter()
            .enumerate()
            .map(|(n, a)| n as f64 * a.norm_sqr())
            .sum();
        assert!((mean - 1.0).abs() < 1e-10);
    }

    #[test]
    fn squeezed_vacuum_matches_closed_form() {
        // (e^{i phi} tanh r)^m sqrt((2m)!) / (2^m m!) / sqrt(cosh r) on |2m>
        for (r, phi) in [(0.5, 0.0), (0.3, 1.1), (1.0, -0.4)] {
            let c = cutoff(120);
            let st = prepare_pure(&ModeSpec::SqueezedVacuum { r, phase: phi }, &c).unwrap();
            for m in 0..=40 {
                let ln = 0.5 * ln_factorial(2 * m) - ln_factorial(m) - m as f64 * 2f64.ln();
                let expect = Complex64::from_polar(
                    (ln + m as f64 * r.tanh().ln()).exp() / r.cosh().sqrt(),
                    m as f64 * phi,
                );
                assert!((st.amplitudes[2 * m] - expect).norm() < 1e-11, "r={r} m={m} err={}", (st.amplitudes[2 * m] - expect).norm());
                if 2 * m + 1 <= 80 {
                    assert_eq!(st.amplitudes[2 * m + 1], Complex64::new(0.0, 0.0));
                }
            }
        }
        let st = prepare_pure(&ModeSpec::squeezed(0.5), &cutoff(40)).unwrap();
        assert!((st.mean_photons() - 0.5f64.sinh().powi(2)).abs() < 1e-10);
    }

    #[test]
    fn preparation_errors() {
        let c = cutoff(5);
        assert!(matches!(
            prepare_pure(&ModeSpec::Fock(6), &c),
            Err(Error::Cutoff { requested: 6, max_total: 5 })
        ));
        assert!(matches!(
            prepare_pure(&ModeSpec::squeezed(2.0), &c),
            Err(Error::Convergence { suggested_max_total: 10, .. })
        ));
        assert!(matches!(
            prepare_pure(&ModeSpec::coherent(Complex64::new(3.0, 0.0)), &c),
            Err(Error::Convergence { .. })
        ));
        assert!(prepare_pure(&ModeSpec::NumberMixture(vec![0.5, 0.5]), &c).is_err());
        assert!(ModeSpec::NumberMixture(vec![0.5, 0.4]).validate().is_err());
        assert!(ModeSpec::NumberMixture(vec![1.5, -0.5]).validate().is_err());
    }

    #[test]
    fn product_of_vacua() {
        let c = cutoff(4);
        match product_state(&ModeSpec::Vacuum, &ModeSpec::Vacuum, &c).unwrap() {
            TwoModeInput::Pure(s) => assert_eq!(s, TwoModePureState::vacuum(c)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn coherent_product_has_poisson_marginal() {
        let c = cutoff(40);
        let s = match product_state(&ModeSpec::coherent(Complex64::new(1.0, 0.0)), &ModeSpec::Vacuum, &c).unwrap() {
            TwoModeInput::Pure(s) => s,
            other => panic!("{other:?}"),
        };
        let dist = mode_a_distribution(&s);
        let mut fact = 1.0;
        for (n, p) in dist.iter().enumerate().take(20) {
            if n > 0 {
                fact *= n as f64;
            }
            assert!((p - (-1f64).exp() / fact).abs() < 1e-15);
        }
        let mean: f64 = dist.iter().enumerate().map(|(n, p)| n as f64 * p).sum();
        assert!((mean - 1.0).abs() < 1e-10);
    }

    #[test]
    fn mixture_product_branches() {
        let c = cutoff(6);
        let ens = match product_state(&ModeSpec::NumberMixture(vec![0.5, 0.5]), &ModeSpec::Vacuum, &c).unwrap() {
            TwoModeInput::Mixed(e) => e,
            other => panic!("{other:?}"),
        };
        assert_eq!(ens.len(), 2);
        assert_eq!(ens.branches()[0].state, TwoModePureState::basis(c, 0, 0).unwrap());
        assert_eq!(ens.branches()[1].state, TwoModePureState::basis(c, 1, 0).unwrap());
        assert_eq!(ens.branches()[1].weight, 0.5);

        let both = product_state(&ModeSpec::NumberMixture(vec![1.0]), &ModeSpec::NumberMixture(vec![1.0]), &c);
        assert!(matches!(both, Err(Error::Unsupported(_))));

        let mirrored = product_state(&ModeSpec::Vacuum, &ModeSpec::NumberMixture(vec![0.0, 1.0]), &c).unwrap();
        let e = mirrored.into_ensemble();
        assert_eq!(e.branches()[0].state, TwoModePureState::basis(c, 0, 1).unwrap());
    }

    #[test]
    fn phase_average_requires_vacuum_partner() {
        let c = cutoff(6);
        let st = TwoModePureState::basis(c, 0, 1).unwrap();
        assert!(matches!(phase_average(&st), Err(Error::Precondition(_))));
        let vac = phase_average(&TwoModePureState::vacuum(c)).unwrap();
        assert_eq!(vac.len(), 1);
        assert_eq!(vac.branches()[0].weight, 1.0);
    }
}
