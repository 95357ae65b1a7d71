//! Quantum Fisher information engines.
//!
//! Four independent routes are provided so that each can serve as an oracle
//! for the others:
//!
//! * [`qfi_pure`]: four times the generator variance of a pure state.
//! * [`qfi_ensemble_convexity`]: weighted sum of branch QFIs for ensembles
//!   whose branches stay orthogonal under the phase evolution.
//! * [`qfi_sld`] / [`qfi_sld_dense`]: the spectral formula of the symmetric
//!   logarithmic derivative on the assembled density operator.
//! * [`qfi_fidelity_fd`]: finite differences of the state overlap.
//!
//! [`qfim`] fills the two-parameter (phase sum, phase difference) matrix and
//! [`parity_cfi`] simulates parity detection behind the inverse squeezer.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{
    covariance, inner_product, raw_variance, variance, DiagonalGenerator, FockCutoff,
    GeneratorKind, NumberDiagonalEnsemble, TwoModePureState,
};
use crate::interferometer::InterferometerConfig;
use crate::opa::{apply_phase, OpaPropagator, PhaseModel};
use crate::states::TwoModeInput;

/// Eigenvalue floor of the SLD spectral sum.
pub const SLD_EIGEN_FLOOR: f64 = 1e-12;

/// Branch overlap above which the convexity decomposition is refused.
pub const CONVEXITY_OVERLAP_TOL: f64 = 1e-8;

/// Default finite-difference step for overlap and parity derivatives.
pub const DEFAULT_STEP: f64 = 1e-4;

/// Determinants at or below this are treated as singular.
pub const SINGULAR_DET: f64 = 1e-14;

/// Points with `1 - P^2` below this are reported as indeterminate.
pub const PARITY_FRINGE_GUARD: f64 = 1e-10;

/// Default limit on the dense density-operator dimension in [`qfi_sld_dense`].
pub const DEFAULT_DENSE_LIMIT: usize = 1500;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QfiMethod {
    Variance,
    Sld,
    FidelityFd,
    Convexity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QfiResult {
    pub value: f64,
    pub method: QfiMethod,
    pub cutoff_used: FockCutoff,
    /// Method-specific self-consistency diagnostic:
    /// raw-vs-centred moment mismatch (variance), largest branch overlap
    /// (convexity), discarded eigenvalue weight (sld), step-halving change
    /// (fidelity_fd).
    pub residual: f64,
    /// False when the finite-difference residual exceeds `1e-4 * value`.
    pub converged: bool,
}

/// `4 Var(gen)` of a pure state.
pub fn qfi_pure(state: &TwoModePureState, gen: &DiagonalGenerator) -> Result<QfiResult> {
    let var = variance(state, gen)?;
    let raw = raw_variance(state, gen)?;
    Ok(QfiResult {
        value: 4.0 * var,
        method: QfiMethod::Variance,
        cutoff_used: *state.cutoff(),
        residual: 4.0 * (raw - var).abs(),
        converged: true,
    })
}

/// `sum_n p_n F(psi_n)` for an ensemble whose branches occupy disjoint
/// `n_a - n_b` diagonals, so that they stay orthogonal under any diagonal
/// phase evolution.
pub fn qfi_ensemble_convexity(
    ens: &NumberDiagonalEnsemble,
    gen: &DiagonalGenerator,
) -> Result<QfiResult> {
    let overlap = ens.max_overlap();
    if overlap > CONVEXITY_OVERLAP_TOL {
        return Err(Error::Precondition(format!(
            "branches overlap by {overlap:.3e}; the convexity decomposition does not apply"
        )));
    }
    let supports: Vec<Vec<i64>> = ens.branches().iter().map(|b| b.state.diagonal_support()).collect();
    for (i, si) in supports.iter().enumerate() {
        for sj in &supports[i + 1..] {
            if si.iter().any(|d| sj.binary_search(d).is_ok()) {
                return Err(Error::Precondition(
                    "branches share an n_a - n_b diagonal, so orthogonality is not \
                     preserved by the phase evolution"
                        .into(),
                ));
            }
        }
    }
    let total = ens.total_weight();
    let mut value = 0.0;
    for b in ens.branches() {
        value += b.weight * 4.0 * variance(&b.state, gen)?;
    }
    Ok(QfiResult {
        value: value / total,
        method: QfiMethod::Convexity,
        cutoff_used: *ens.cutoff(),
        residual: overlap,
        converged: true,
    })
}

/// Mixed-state QFI from the SLD spectral formula, working in the range of `rho`.
///
/// The nonzero spectrum comes from the Gram matrix of the weighted branches,
/// so branches need not be orthogonal. Pairs of range vectors contribute
/// `2 (l_i - l_j)^2 |G_ij|^2 / (l_i + l_j)`; pairs with one kernel vector are
/// summed through the completeness relation as `4 l_i (|G e_i|^2 - sum_j |G_ji|^2)`.
pub fn qfi_sld(ens: &NumberDiagonalEnsemble, gen: &DiagonalGenerator) -> Result<QfiResult> {
    let total = ens.total_weight();
    let dim = ens.cutoff().len();
    let cols: Vec<Vec<Complex64>> = ens
        .branches()
        .iter()
        .map(|b| {
            let scale = (b.weight / total / b.state.norm_sqr()).sqrt();
            b.state.amplitudes().iter().map(|c| c * scale).collect()
        })
        .collect();
    if let Some(g) = cols.first() {
        if g.len() != gen.values().len() {
            return Err(Error::Dimension("generator and ensemble cutoffs differ".into()));
        }
    }
    let r = cols.len();
    let mut gram = DMatrix::<Complex64>::zeros(r, r);
    for i in 0..r {
        for j in 0..r {
            gram[(i, j)] = cols[i].iter().zip(&cols[j]).map(|(a, b)| a.conj() * b).sum();
        }
    }
    let eig = SymmetricEigen::new(gram);

    let mut lambdas = Vec::new();
    let mut vecs: Vec<Vec<Complex64>> = Vec::new();
    let mut dropped = 0.0;
    for (m, &lam) in eig.eigenvalues.iter().enumerate() {
        if lam <= SLD_EIGEN_FLOOR {
            dropped += lam.abs();
            continue;
        }
        let mut e = vec![Complex64::new(0.0, 0.0); dim];
        for (i, col) in cols.iter().enumerate() {
            let u = eig.eigenvectors[(i, m)];
            for (x, c) in e.iter_mut().zip(col) {
                *x += c * u;
            }
        }
        let s = 1.0 / lam.sqrt();
        e.iter_mut().for_each(|x| *x *= s);
        lambdas.push(lam);
        vecs.push(e);
    }

    let g = gen.values();
    let ge: Vec<Vec<Complex64>> = vecs
        .iter()
        .map(|e| e.iter().zip(g).map(|(x, v)| x * v).collect())
        .collect();
    let n = vecs.len();
    let mut gmat = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            gmat[(i, j)] = vecs[i].iter().zip(&ge[j]).map(|(a, b)| a.conj() * b).sum();
        }
    }
    let mut value = 0.0;
    for i in 0..n {
        let norm_ge: f64 = ge[i].iter().map(|x| x.norm_sqr()).sum();
        let mut in_range = 0.0;
        for j in 0..n {
            let gij = gmat[(j, i)].norm_sqr();
            in_range += gij;
            let (li, lj) = (lambdas[i], lambdas[j]);
            if li + lj > SLD_EIGEN_FLOOR {
                value += 2.0 * (li - lj).powi(2) * gij / (li + lj);
            }
        }
        value += 4.0 * lambdas[i] * (norm_ge - in_range).max(0.0);
    }
    Ok(QfiResult {
        value,
        method: QfiMethod::Sld,
        cutoff_used: *ens.cutoff(),
        residual: dropped,
        converged: true,
    })
}

/// SLD QFI from the full eigendecomposition of the density operator assembled
/// on every basis state any branch touches.
pub fn qfi_sld_dense(
    ens: &NumberDiagonalEnsemble,
    gen: &DiagonalGenerator,
    max_dim: usize,
) -> Result<QfiResult> {
    let active: Vec<usize> = (0..ens.cutoff().len())
        .filter(|&i| ens.branches().iter().any(|b| b.state.amplitudes()[i].norm_sqr() > 0.0))
        .collect();
    let d = active.len();
    if d > max_dim {
        return Err(Error::Resource(format!(
            "density operator needs dimension {d}, limit is {max_dim}"
        )));
    }
    if gen.values().len() != ens.cutoff().len() {
        return Err(Error::Dimension("generator and ensemble cutoffs differ".into()));
    }
    let total = ens.total_weight();
    let mut rho = DMatrix::<Complex64>::zeros(d, d);
    for b in ens.branches() {
        let w = b.weight / total / b.state.norm_sqr();
        let amps = b.state.amplitudes();
        for (x, &ix) in active.iter().enumerate() {
            let ax = amps[ix];
            if ax.norm_sqr() == 0.0 {
                continue;
            }
            for (y, &iy) in active.iter().enumerate() {
                rho[(x, y)] += ax * amps[iy].conj() * w;
            }
        }
    }
    let g: Vec<f64> = active.iter().map(|&i| gen.values()[i]).collect();
    // d rho / d phi for rho(phi) = e^{-i G phi} rho e^{i G phi}
    let mut drho = DMatrix::<Complex64>::zeros(d, d);
    for x in 0..d {
        for y in 0..d {
            drho[(x, y)] = Complex64::new(0.0, -(g[x] - g[y])) * rho[(x, y)];
        }
    }
    let eig = SymmetricEigen::new(rho);
    let v = &eig.eigenvectors;
    let dd = v.adjoint() * drho * v;
    let mut value = 0.0;
    let mut dropped = 0.0;
    for i in 0..d {
        let li = eig.eigenvalues[i];
        if li.abs() <= SLD_EIGEN_FLOOR {
            dropped += li.abs();
        }
        for j in 0..d {
            let s = li + eig.eigenvalues[j];
            if s > SLD_EIGEN_FLOOR {
                value += 2.0 * dd[(i, j)].norm_sqr() / s;
            }
        }
    }
    Ok(QfiResult {
        value,
        method: QfiMethod::Sld,
        cutoff_used: *ens.cutoff(),
        residual: dropped,
        converged: true,
    })
}

/// Family `phi -> exp(i gen phi) state`.
pub fn phase_family(
    state: &TwoModePureState,
    kind: GeneratorKind,
) -> impl Fn(f64) -> Result<TwoModePureState> + '_ {
    move |phi| Ok(state.map_phase(|na, nb| kind.eigenvalue(na, nb) * phi))
}

fn fd_estimate<F>(family: &F, phi0: f64, step: f64) -> Result<(f64, FockCutoff)>
where
    F: Fn(f64) -> Result<TwoModePureState>,
{
    let lo = family(phi0 - step)?;
    let hi = family(phi0 + step)?;
    let ov = inner_product(&lo, &hi)?.norm() / (lo.norm_sqr() * hi.norm_sqr()).sqrt();
    let span = 2.0 * step;
    Ok((8.0 * (1.0 - ov) / (span * span), *lo.cutoff()))
}

/// Pure-state QFI from `F ~ 8 (1 - |<psi(phi0 - h)|psi(phi0 + h)>|) / (2h)^2`.
///
/// `residual` is the change under halving `h`; `converged` is false when it
/// exceeds `1e-4` of the value.
pub fn qfi_fidelity_fd<F>(family: F, phi0: f64, step: f64) -> Result<QfiResult>
where
    F: Fn(f64) -> Result<TwoModePureState>,
{
    if !(step > 0.0) {
        return Err(Error::InvalidParameter("finite-difference step must be positive".into()));
    }
    let (coarse, cutoff) = fd_estimate(&family, phi0, step)?;
    let (fine, _) = fd_estimate(&family, phi0, step / 2.0)?;
    let residual = (coarse - fine).abs();
    Ok(QfiResult {
        value: coarse.max(0.0),
        method: QfiMethod::FidelityFd,
        cutoff_used: cutoff,
        residual,
        converged: residual <= 1e-4 * coarse.abs() || residual < 1e-10,
    })
}

/// QFI of the configuration's phase model by the chosen method, with the
/// norm deficit of the state it was computed on.
///
/// `Variance` and `FidelityFd` need a pure (un-averaged) input; `Convexity`
/// and `Sld` accept both.
pub fn qfi_for_config(config: &InterferometerConfig, method: QfiMethod) -> Result<(QfiResult, f64)> {
    let kind = config.model;
    let (result, _) = config.run(|c| {
        let gen = DiagonalGenerator::new(kind, c);
        match method {
            QfiMethod::Variance => {
                let st = config.pure_output(c)?;
                Ok((qfi_pure(&st, &gen)?, st.norm_deficit()))
            }
            QfiMethod::FidelityFd => {
                let st = config.pure_output(c)?;
                Ok((qfi_fidelity_fd(phase_family(&st, kind), 0.0, DEFAULT_STEP)?, st.norm_deficit()))
            }
            QfiMethod::Convexity => {
                let ens = config.ensemble_output(c)?;
                Ok((qfi_ensemble_convexity(&ens, &gen)?, ens.norm_deficit()))
            }
            QfiMethod::Sld => {
                let ens = config.ensemble_output(c)?;
                Ok((qfi_sld(&ens, &gen)?, ens.norm_deficit()))
            }
        }
    })?;
    Ok(result)
}

/// A Cramér-Rao variance bound, or the marker that the information matrix is singular.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    Finite(f64),
    Singular,
}

impl Bound {
    /// Variance bound; infinite when singular.
    pub fn value(&self) -> f64 {
        match *self {
            Bound::Finite(v) => v,
            Bound::Singular => f64::INFINITY,
        }
    }

    /// Reciprocal of the bound; zero when singular.
    pub fn information(&self) -> f64 {
        match *self {
            Bound::Finite(v) => 1.0 / v,
            Bound::Singular => 0.0,
        }
    }

    pub fn is_singular(&self) -> bool {
        matches!(self, Bound::Singular)
    }
}

/// Diagonal elements at or below this count as "parameter leaves the state unchanged".
pub const NULL_INFORMATION: f64 = 1e-12;

/// Cramér-Rao bounds `(phi_s, phi_d)` from the 2x2 information matrix.
///
/// With a regular matrix these are `F_dd / det` and `F_ss / det`. When the
/// determinant vanishes because one parameter does not move the state at all
/// (its diagonal element, and hence the cross terms, are zero), that
/// parameter is not a nuisance and the other bound is `1 / F_own`; every
/// other singular case is flagged.
pub fn two_parameter_bounds(f_dd: f64, f_ds: f64, f_sd: f64, f_ss: f64) -> (Bound, Bound) {
    let det = f_dd * f_ss - f_ds * f_sd;
    if det > SINGULAR_DET {
        return (Bound::Finite(f_dd / det), Bound::Finite(f_ss / det));
    }
    let lone = |own: f64, other: f64| {
        if other.abs() <= NULL_INFORMATION && own > NULL_INFORMATION {
            Bound::Finite(1.0 / own)
        } else {
            Bound::Singular
        }
    };
    (lone(f_ss, f_dd), lone(f_dd, f_ss))
}

/// Two-parameter (phase difference, phase sum) quantum Fisher information matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QfiMatrix {
    pub f_dd: f64,
    pub f_ds: f64,
    pub f_sd: f64,
    pub f_ss: f64,
    /// `Var(phi_s) >= F_dd / det`.
    pub bound_phi_s: Bound,
    /// `Var(phi_d) >= F_ss / det`.
    pub bound_phi_d: Bound,
    pub cutoff_used: FockCutoff,
}

impl QfiMatrix {
    pub fn from_elements(f_dd: f64, f_ds: f64, f_sd: f64, f_ss: f64, cutoff_used: FockCutoff) -> Self {
        let (bound_phi_s, bound_phi_d) = two_parameter_bounds(f_dd, f_ds, f_sd, f_ss);
        QfiMatrix {
            f_dd,
            f_ds,
            f_sd,
            f_ss,
            bound_phi_s,
            bound_phi_d,
            cutoff_used,
        }
    }

    pub fn determinant(&self) -> f64 {
        self.f_dd * self.f_ss - self.f_ds * self.f_sd
    }

    /// Smaller eigenvalue of the symmetrised matrix.
    pub fn min_eigenvalue(&self) -> f64 {
        let off = 0.5 * (self.f_ds + self.f_sd);
        let mean = 0.5 * (self.f_dd + self.f_ss);
        let half_gap = (0.25 * (self.f_dd - self.f_ss).powi(2) + off * off).sqrt();
        mean - half_gap
    }

    pub fn asymmetry(&self) -> f64 {
        (self.f_ds - self.f_sd).abs()
    }
}

/// QFIM over `(phi_d, phi_s)` with generators `g_d`, `g_s`.
///
/// The two generators commute, so `F_ij = 4 Cov(g_i, g_j)` needs no symmetric ordering.
pub fn qfim(state: &TwoModePureState) -> Result<QfiMatrix> {
    let c = state.cutoff();
    let gd = DiagonalGenerator::new(GeneratorKind::Difference, c);
    let gs = DiagonalGenerator::new(GeneratorKind::Sum, c);
    Ok(QfiMatrix::from_elements(
        4.0 * covariance(state, &gd, &gd)?,
        4.0 * covariance(state, &gd, &gs)?,
        4.0 * covariance(state, &gs, &gd)?,
        4.0 * covariance(state, &gs, &gs)?,
        *c,
    ))
}

/// One point of a parity-detection scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParityPoint {
    pub phi: f64,
    /// `<(-1)^{n_b}>` after the second OPA.
    pub parity: f64,
    /// `None` where `1 - P^2 < 1e-10`.
    pub cfi: Option<f64>,
}

/// Parity pipeline for one configuration at a fixed cutoff.
pub struct ParityPipeline {
    after_first: TwoModePureState,
    second: OpaPropagator,
    second_phase: f64,
}

impl ParityPipeline {
    pub fn new(config: &InterferometerConfig, cutoff: &FockCutoff) -> Result<Self> {
        let input = match config.input(cutoff)? {
            TwoModeInput::Pure(s) => s,
            TwoModeInput::Mixed(_) => {
                return Err(Error::Unsupported(
                    "parity simulation needs pure product inputs".into(),
                ))
            }
        };
        let first = config.opa()?;
        let second = config.second_opa()?;
        let prop_first = OpaPropagator::new(first.gain(), *cutoff);
        let after_first = prop_first.apply(&input, first.pump_phase())?;
        let second_prop = if second.gain() == first.gain() {
            prop_first
        } else {
            OpaPropagator::new(second.gain(), *cutoff)
        };
        Ok(ParityPipeline {
            after_first,
            second: second_prop,
            second_phase: second.pump_phase(),
        })
    }

    /// Output state for phase sum `phi`.
    pub fn output(&self, phi: f64) -> Result<TwoModePureState> {
        let shifted = apply_phase(&self.after_first, &PhaseModel::Split(phi));
        self.second.apply(&shifted, self.second_phase)
    }

    pub fn parity(&self, phi: f64) -> Result<f64> {
        let out = self.output(phi)?;
        let mut num = 0.0;
        let mut den = 0.0;
        for (_, nb, c) in out.iter() {
            let w = c.norm_sqr();
            num += if nb % 2 == 0 { w } else { -w };
            den += w;
        }
        Ok(num / den)
    }

    /// Binary-outcome CFI `(dP/dphi)^2 / (1 - P^2)` with a central difference.
    pub fn point(&self, phi: f64, step: f64) -> Result<ParityPoint> {
        let p = self.parity(phi)?;
        let dp = (self.parity(phi + step)? - self.parity(phi - step)?) / (2.0 * step);
        let denom = 1.0 - p * p;
        Ok(ParityPoint {
            phi,
            parity: p,
            cfi: (denom >= PARITY_FRINGE_GUARD).then(|| dp * dp / denom),
        })
    }
}

/// Parity-detection CFI over a grid of phase sums, with the configuration's
/// cutoff (or the escalation policy when none is set).
pub fn parity_cfi(config: &InterferometerConfig, grid: &[f64]) -> Result<Vec<ParityPoint>> {
    let (points, _) = config.run(|cutoff| {
        let pipe = ParityPipeline::new(config, cutoff)?;
        grid.iter().map(|&phi| pipe.point(phi, DEFAULT_STEP)).collect()
    })?;
    Ok(points)
}

/// Phase grid for locating the parity CFI maximum: log-spaced on both sides
/// of the dark fringe plus a uniform grid out to `span`.
pub fn default_parity_grid(span: f64) -> Vec<f64> {
    let mut grid = Vec::new();
    let decades = 60;
    for i in 0..=decades {
        let phi = 1e-3 * (span / 1e-3).powf(i as f64 / decades as f64);
        grid.push(phi);
        grid.push(-phi);
    }
    let uniform = 80;
    for i in 1..uniform {
        let phi = -span + 2.0 * span * i as f64 / uniform as f64;
        if phi.abs() > 1e-3 {
            grid.push(phi);
        }
    }
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    grid
}

/// Largest determinate CFI on the grid.
pub fn parity_cfi_max(points: &[ParityPoint]) -> Option<ParityPoint> {
    points
        .iter()
        .filter(|p| p.cfi.is_some())
        .copied()
        .max_by(|a, b| a.cfi.partial_cmp(&b.cfi).unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::Branch;
    use crate::opa::{apply_opa, OpaParams};

    fn cutoff(k: usize) -> FockCutoff {
        FockCutoff::new(k, 12, 1e-10).unwrap()
    }

    #[test]
    fn fock_state_has_no_information() {
        let c = cutoff(8);
        let st = TwoModePureState::basis(c, 3, 2).unwrap();
        let gen = DiagonalGenerator::new(GeneratorKind::Upper, &c);
        assert_eq!(qfi_pure(&st, &gen).unwrap().value, 0.0);
    }

    #[test]
    fn commuting_mixture_has_zero_sld_qfi() {
        let c = cutoff(4);
        let branches = c
            .levels()
            .map(|(na, nb)| Branch {
                weight: 1.0 / c.len() as f64,
                label: na,
                state: TwoModePureState::basis(c, na, nb).unwrap(),
            })
            .collect();
        let ens = NumberDiagonalEnsemble::new(branches).unwrap();
        let gen = DiagonalGenerator::new(GeneratorKind::Sum, &c);
        assert!(qfi_sld(&ens, &gen).unwrap().value.abs() < 1e-12);
        assert!(qfi_sld_dense(&ens, &gen, 100).unwrap().value.abs() < 1e-12);
    }

    #[test]
    fn sld_routes_agree_on_non_orthogonal_mixture() {
        let c = cutoff(30);
        let p = OpaParams::new(0.4, 0.3).unwrap();
        let a = apply_opa(&TwoModePureState::basis(c, 1, 0).unwrap(), &p).unwrap();
        let b = apply_opa(&TwoModePureState::basis(c, 0, 1).unwrap(), &p).unwrap();
        // overlapping pair: a and a phase-shifted copy share a diagonal
        let a2 = apply_phase(&a, &PhaseModel::Upper(0.8));
        let ens = NumberDiagonalEnsemble::from_parts_unchecked(
            vec![
                Branch { weight: 0.5, label: 1, state: a },
                Branch { weight: 0.3, label: 1, state: a2 },
                Branch { weight: 0.2, label: 0, state: b },
            ],
            c,
        );
        let gen = DiagonalGenerator::new(GeneratorKind::Upper, &c);
        let range = qfi_sld(&ens, &gen).unwrap().value;
        let dense = qfi_sld_dense(&ens, &gen, 2000).unwrap().value;
        assert!((range - dense).abs() < 1e-8 * dense, "{range} vs {dense}");
        assert!(qfi_ensemble_convexity(&ens, &gen).is_err());
    }

    #[test]
    fn dense_sld_respects_resource_limit() {
        let c = cutoff(30);
        let p = OpaParams::new(0.4, 0.0).unwrap();
        let st = apply_opa(&TwoModePureState::basis(c, 0, 0).unwrap(), &p).unwrap();
        let ens = NumberDiagonalEnsemble::pure(st);
        let gen = DiagonalGenerator::new(GeneratorKind::Upper, &c);
        assert!(matches!(qfi_sld_dense(&ens, &gen, 4), Err(Error::Resource(_))));
    }

    #[test]
    fn constant_family_has_zero_fd_qfi() {
        let st = TwoModePureState::basis(cutoff(4), 1, 1).unwrap();
        let r = qfi_fidelity_fd(|_| Ok(st.clone()), 0.0, DEFAULT_STEP).unwrap();
        assert_eq!(r.value, 0.0);
        assert!(r.converged);
    }

    #[test]
    fn singular_qfim_is_flagged() {
        // phi_d does not act: phi_s keeps its single-parameter bound
        let m = QfiMatrix::from_elements(0.0, 0.0, 0.0, 5.0, cutoff(2));
        assert_eq!(m.bound_phi_s, Bound::Finite(0.2));
        assert!(m.bound_phi_d.is_singular());
        assert_eq!(m.bound_phi_d.value(), f64::INFINITY);
        // rank one with both parameters active
        let m = QfiMatrix::from_elements(1.0, 2.0, 2.0, 4.0, cutoff(2));
        assert!(m.bound_phi_s.is_singular() && m.bound_phi_d.is_singular());
        let m = QfiMatrix::from_elements(2.0, 1.0, 1.0, 2.0, cutoff(2));
        assert!((m.bound_phi_d.value() - 2.0 / 3.0).abs() < 1e-15);
        assert!((m.min_eigenvalue() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn parity_grid_is_sorted_and_avoids_the_fringe() {
        let g = default_parity_grid(0.5);
        assert!(g.windows(2).all(|w| w[0] <= w[1]));
        assert!(g.iter().all(|p| p.abs() >= 1e-3 - 1e-15));
    }
}
