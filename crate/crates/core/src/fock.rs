//! Truncated two-mode Fock space.
//!
//! States live on the triangular index set `n_a + n_b <= max_total`. Every
//! construction records the probability it had to discard in `norm_deficit`,
//! and moments divide by the retained norm so truncation bias stays of the
//! order of the discarded weight.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack allowed above unit norm for accumulated rounding.
pub const NORM_EXCESS_TOL: f64 = 1e-12;

/// Maximum overlap tolerated between members of a [`NumberDiagonalEnsemble`].
pub const ORTHOGONALITY_TOL: f64 = 1e-10;

/// Truncation policy for the two-mode Fock basis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FockCutoff {
    max_total: usize,
    guard: usize,
    tail_tol: f64,
}

impl Default for FockCutoff {
    fn default() -> Self {
        FockCutoff {
            max_total: 40,
            guard: 12,
            tail_tol: 1e-10,
        }
    }
}

impl FockCutoff {
    pub fn new(max_total: usize, guard: usize, tail_tol: f64) -> Result<Self> {
        if max_total < 1 {
            return Err(Error::InvalidParameter("max_total must be at least 1".into()));
        }
        if !(tail_tol > 0.0 && tail_tol < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "tail_tol must lie in (0, 1), got {tail_tol}"
            )));
        }
        Ok(FockCutoff {
            max_total,
            guard,
            tail_tol,
        })
    }

    /// Smallest cutoff whose two-mode squeezed vacuum tail,
    /// `sum_{k > K} tanh^{2k}(g) / cosh^2(g) = tanh^{2(K+1)}(g)`, is below `tail_tol`.
    pub fn for_opa_vacuum(gain: f64, guard: usize, tail_tol: f64) -> Result<Self> {
        if !(tail_tol > 0.0 && tail_tol < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "tail_tol must lie in (0, 1), got {tail_tol}"
            )));
        }
        let t2 = gain.abs().tanh().powi(2);
        let mut pairs = 0usize;
        let mut tail = t2;
        while tail >= tail_tol {
            pairs += 1;
            tail *= t2;
        }
        FockCutoff::new((2 * pairs).max(1), guard, tail_tol)
    }

    pub fn max_total(&self) -> usize {
        self.max_total
    }

    pub fn guard(&self) -> usize {
        self.guard
    }

    pub fn tail_tol(&self) -> f64 {
        self.tail_tol
    }

    /// Total photon number used while building unitaries, before the guard band is cut.
    pub fn working_total(&self) -> usize {
        self.max_total + self.guard
    }

    pub fn with_max_total(&self, max_total: usize) -> Result<Self> {
        FockCutoff::new(max_total, self.guard, self.tail_tol)
    }

    pub fn with_tail_tol(&self, tail_tol: f64) -> Result<Self> {
        FockCutoff::new(self.max_total, self.guard, tail_tol)
    }

    pub fn doubled(&self) -> Self {
        FockCutoff {
            max_total: self.max_total * 2,
            ..*self
        }
    }

    /// Number of retained basis states.
    pub fn len(&self) -> usize {
        triangle_len(self.max_total)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Flat storage index of `|n_a, n_b>`, if it is retained.
    pub fn index(&self, n_a: usize, n_b: usize) -> Option<usize> {
        (n_a + n_b <= self.max_total).then(|| triangle_index(self.max_total, n_a, n_b))
    }

    /// All retained `(n_a, n_b)` pairs in storage order.
    pub fn levels(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let k = self.max_total;
        (0..=k).flat_map(move |na| (0..=k - na).map(move |nb| (na, nb)))
    }
}

pub(crate) fn triangle_len(max_total: usize) -> usize {
    (max_total + 1) * (max_total + 2) / 2
}

pub(crate) fn triangle_index(max_total: usize, n_a: usize, n_b: usize) -> usize {
    debug_assert!(n_a + n_b <= max_total);
    // rows of length max_total + 1, max_total, ...
    n_a * (max_total + 1) - n_a * n_a.saturating_sub(1) / 2 + n_b
}

/// Pure state of two bosonic modes, truncated at a total photon number.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModePureState {
    amplitudes: Vec<Complex64>,
    cutoff: FockCutoff,
    norm_deficit: f64,
}

impl TwoModePureState {
    /// Wraps raw amplitudes, checking length and the norm window.
    pub fn from_amplitudes(
        cutoff: FockCutoff,
        amplitudes: Vec<Complex64>,
        norm_deficit: f64,
    ) -> Result<Self> {
        if amplitudes.len() != cutoff.len() {
            return Err(Error::Dimension(format!(
                "expected {} amplitudes for max_total = {}, got {}",
                cutoff.len(),
                cutoff.max_total(),
                amplitudes.len()
            )));
        }
        let state = TwoModePureState {
            amplitudes,
            cutoff,
            norm_deficit: norm_deficit.max(0.0),
        };
        state.check_norm()?;
        Ok(state)
    }

    pub(crate) fn from_parts_unchecked(
        cutoff: FockCutoff,
        amplitudes: Vec<Complex64>,
        norm_deficit: f64,
    ) -> Self {
        debug_assert_eq!(amplitudes.len(), cutoff.len());
        TwoModePureState {
            amplitudes,
            cutoff,
            norm_deficit: norm_deficit.max(0.0),
        }
    }

    pub fn vacuum(cutoff: FockCutoff) -> Self {
        Self::basis(cutoff, 0, 0).expect("vacuum is always retained")
    }

    pub fn basis(cutoff: FockCutoff, n_a: usize, n_b: usize) -> Result<Self> {
        let idx = cutoff.index(n_a, n_b).ok_or(Error::Cutoff {
            requested: n_a + n_b,
            max_total: cutoff.max_total(),
        })?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); cutoff.len()];
        amplitudes[idx] = Complex64::new(1.0, 0.0);
        Ok(TwoModePureState {
            amplitudes,
            cutoff,
            norm_deficit: 0.0,
        })
    }

    pub fn cutoff(&self) -> &FockCutoff {
        &self.cutoff
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Amplitude of `|n_a, n_b>`; zero outside the retained set.
    pub fn amplitude(&self, n_a: usize, n_b: usize) -> Complex64 {
        self.cutoff
            .index(n_a, n_b)
            .map(|i| self.amplitudes[i])
            .unwrap_or_default()
    }

    /// `(n_a, n_b, amplitude)` over the retained set.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        self.cutoff
            .levels()
            .zip(self.amplitudes.iter())
            .map(|((na, nb), &c)| (na, nb, c))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm_deficit(&self) -> f64 {
        self.norm_deficit
    }

    /// Values of `n_a - n_b` that carry nonzero amplitude, ascending.
    pub fn diagonal_support(&self) -> Vec<i64> {
        let mut diags: Vec<i64> = self
            .iter()
            .filter(|(_, _, c)| c.norm_sqr() > 0.0)
            .map(|(na, nb, _)| na as i64 - nb as i64)
            .collect();
        diags.sort_unstable();
        diags.dedup();
        diags
    }

    /// Same state on a larger triangle, zero padded.
    pub fn embed(&self, cutoff: FockCutoff) -> Result<Self> {
        if cutoff.max_total() < self.cutoff.max_total() {
            return Err(Error::Dimension(format!(
                "cannot embed max_total = {} into the smaller max_total = {}",
                self.cutoff.max_total(),
                cutoff.max_total()
            )));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); cutoff.len()];
        for (na, nb, c) in self.iter() {
            amplitudes[triangle_index(cutoff.max_total(), na, nb)] = c;
        }
        Ok(TwoModePureState {
            amplitudes,
            cutoff,
            norm_deficit: self.norm_deficit,
        })
    }

    /// Multiplies every amplitude by `exp(i * phase(n_a, n_b))`.
    pub fn map_phase(&self, phase: impl Fn(usize, usize) -> f64) -> Self {
        let amplitudes = self
            .iter()
            .map(|(na, nb, c)| c * Complex64::from_polar(1.0, phase(na, nb)))
            .collect();
        TwoModePureState {
            amplitudes,
            cutoff: self.cutoff,
            norm_deficit: self.norm_deficit,
        }
    }

    fn check_norm(&self) -> Result<()> {
        let norm = self.norm_sqr();
        if norm > 1.0 + NORM_EXCESS_TOL {
            return Err(Error::Precondition(format!(
                "state norm {norm} exceeds one"
            )));
        }
        let lost = (1.0 - norm).max(self.norm_deficit);
        if lost > self.cutoff.tail_tol() {
            return Err(Error::Convergence {
                deficit: lost,
                tail_tol: self.cutoff.tail_tol(),
                suggested_max_total: self.cutoff.max_total() * 2,
            });
        }
        Ok(())
    }

    fn require_same_cutoff(&self, other: &Self) -> Result<()> {
        if self.cutoff.max_total() != other.cutoff.max_total() {
            return Err(Error::Dimension(format!(
                "cutoff mismatch: max_total {} vs {}",
                self.cutoff.max_total(),
                other.cutoff.max_total()
            )));
        }
        Ok(())
    }
}

/// Which diagonal operator a [`DiagonalGenerator`] represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    /// Phase in the upper arm, `a^dag a`.
    Upper,
    /// Phase in the lower arm, `b^dag b`.
    Lower,
    /// Phase split equally, `(a^dag a + b^dag b) / 2`.
    Sum,
    /// Half the photon-number difference, `(a^dag a - b^dag b) / 2`.
    Difference,
    NumberA,
    NumberB,
}

impl GeneratorKind {
    pub const ALL: [GeneratorKind; 6] = [
        GeneratorKind::Upper,
        GeneratorKind::Lower,
        GeneratorKind::Sum,
        GeneratorKind::Difference,
        GeneratorKind::NumberA,
        GeneratorKind::NumberB,
    ];

    pub fn eigenvalue(self, n_a: usize, n_b: usize) -> f64 {
        let (a, b) = (n_a as f64, n_b as f64);
        match self {
            GeneratorKind::Upper | GeneratorKind::NumberA => a,
            GeneratorKind::Lower | GeneratorKind::NumberB => b,
            GeneratorKind::Sum => (a + b) / 2.0,
            GeneratorKind::Difference => (a - b) / 2.0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            GeneratorKind::Upper => "u",
            GeneratorKind::Lower => "l",
            GeneratorKind::Sum => "s",
            GeneratorKind::Difference => "d",
            GeneratorKind::NumberA => "number_a",
            GeneratorKind::NumberB => "number_b",
        }
    }
}

/// Real operator diagonal in the Fock basis, tabulated on the retained set.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalGenerator {
    kind: GeneratorKind,
    values: Vec<f64>,
    max_total: usize,
}

impl DiagonalGenerator {
    pub fn new(kind: GeneratorKind, cutoff: &FockCutoff) -> Self {
        DiagonalGenerator {
            kind,
            values: cutoff
                .levels()
                .map(|(na, nb)| kind.eigenvalue(na, nb))
                .collect(),
            max_total: cutoff.max_total(),
        }
    }

    pub fn kind(&self) -> GeneratorKind {
        self.kind
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, n_a: usize, n_b: usize) -> Option<f64> {
        (n_a + n_b <= self.max_total).then(|| self.values[triangle_index(self.max_total, n_a, n_b)])
    }

    fn check(&self, state: &TwoModePureState) -> Result<()> {
        if self.max_total != state.cutoff.max_total() {
            return Err(Error::Dimension(format!(
                "generator tabulated for max_total = {}, state has {}",
                self.max_total,
                state.cutoff.max_total()
            )));
        }
        Ok(())
    }
}

/// `<x|y>` over the shared index set.
pub fn inner_product(x: &TwoModePureState, y: &TwoModePureState) -> Result<Complex64> {
    x.require_same_cutoff(y)?;
    Ok(x.amplitudes
        .iter()
        .zip(&y.amplitudes)
        .map(|(a, b)| a.conj() * b)
        .sum())
}

fn weighted_mean(state: &TwoModePureState, values: &[f64]) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for (c, v) in state.amplitudes.iter().zip(values) {
        let w = c.norm_sqr();
        num += w * v;
        den += w;
    }
    num / den
}

/// `<gen>`, divided by the retained norm.
pub fn expectation(state: &TwoModePureState, gen: &DiagonalGenerator) -> Result<f64> {
    gen.check(state)?;
    Ok(weighted_mean(state, &gen.values))
}

/// `<g1 g2> - <g1><g2>` for two commuting diagonal generators.
///
/// Evaluated as a centred sum, which is exactly symmetric in its arguments and
/// reduces bit-for-bit to [`variance`] when `g1 == g2`.
pub fn covariance(
    state: &TwoModePureState,
    g1: &DiagonalGenerator,
    g2: &DiagonalGenerator,
) -> Result<f64> {
    g1.check(state)?;
    g2.check(state)?;
    let m1 = weighted_mean(state, &g1.values);
    let m2 = weighted_mean(state, &g2.values);
    let mut num = 0.0;
    let mut den = 0.0;
    for ((c, v1), v2) in state.amplitudes.iter().zip(&g1.values).zip(&g2.values) {
        let w = c.norm_sqr();
        num += w * ((v1 - m1) * (v2 - m2));
        den += w;
    }
    Ok(num / den)
}

/// `<gen^2> - <gen>^2`, clamped at zero.
pub fn variance(state: &TwoModePureState, gen: &DiagonalGenerator) -> Result<f64> {
    Ok(covariance(state, gen, gen)?.max(0.0))
}

/// `<gen^2> - <gen>^2` evaluated from raw moments, without centring or clamping.
///
/// Only used as a self-consistency diagnostic against [`variance`].
pub fn raw_variance(state: &TwoModePureState, gen: &DiagonalGenerator) -> Result<f64> {
    gen.check(state)?;
    let mut m1 = 0.0;
    let mut m2 = 0.0;
    let mut den = 0.0;
    for (c, v) in state.amplitudes.iter().zip(&gen.values) {
        let w = c.norm_sqr();
        m1 += w * v;
        m2 += w * v * v;
        den += w;
    }
    m1 /= den;
    m2 /= den;
    Ok(m2 - m1 * m1)
}

/// One member of a [`NumberDiagonalEnsemble`].
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub weight: f64,
    /// Photon number of the mode-A input this branch descends from.
    pub label: usize,
    pub state: TwoModePureState,
}

/// Mixture of mutually orthogonal pure states, `sum_n p_n |psi_n><psi_n|`.
#[derive(Debug, Clone, PartialEq)]
pub struct NumberDiagonalEnsemble {
    branches: Vec<Branch>,
    cutoff: FockCutoff,
}

impl NumberDiagonalEnsemble {
    /// Validates weights, shared cutoff and pairwise orthogonality.
    pub fn new(branches: Vec<Branch>) -> Result<Self> {
        let cutoff = *branches
            .first()
            .ok_or_else(|| Error::InvalidParameter("ensemble needs at least one branch".into()))?
            .state
            .cutoff();
        for b in &branches {
            if b.state.cutoff().max_total() != cutoff.max_total() {
                return Err(Error::Dimension(
                    "ensemble branches must share one cutoff".into(),
                ));
            }
            if !(b.weight >= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "branch weight {} is negative",
                    b.weight
                )));
            }
        }
        let ens = NumberDiagonalEnsemble { branches, cutoff };
        let total = ens.total_weight();
        if total > 1.0 + NORM_EXCESS_TOL {
            return Err(Error::InvalidParameter(format!(
                "branch weights sum to {total} > 1"
            )));
        }
        if 1.0 - total > cutoff.tail_tol() {
            return Err(Error::Convergence {
                deficit: 1.0 - total,
                tail_tol: cutoff.tail_tol(),
                suggested_max_total: cutoff.max_total() * 2,
            });
        }
        let overlap = ens.max_overlap();
        if overlap >= ORTHOGONALITY_TOL {
            return Err(Error::Precondition(format!(
                "ensemble branches overlap by {overlap:.3e}"
            )));
        }
        Ok(ens)
    }

    pub(crate) fn from_parts_unchecked(branches: Vec<Branch>, cutoff: FockCutoff) -> Self {
        NumberDiagonalEnsemble { branches, cutoff }
    }

    /// Single pure branch of unit weight.
    pub fn pure(state: TwoModePureState) -> Self {
        let cutoff = *state.cutoff();
        NumberDiagonalEnsemble {
            branches: vec![Branch {
                weight: 1.0,
                label: 0,
                state,
            }],
            cutoff,
        }
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn cutoff(&self) -> &FockCutoff {
        &self.cutoff
    }

    pub fn len(&self) -> usize {
        self.branches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.branches.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.branches.iter().map(|b| b.weight).sum()
    }

    /// Probability lost to truncation: missing weight plus each branch's own deficit.
    pub fn norm_deficit(&self) -> f64 {
        let missing = (1.0 - self.total_weight()).max(0.0);
        missing
            + self
                .branches
                .iter()
                .map(|b| b.weight * b.state.norm_deficit())
                .sum::<f64>()
    }

    /// Largest `|<psi_i|psi_j>|` over distinct branches.
    pub fn max_overlap(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, bi) in self.branches.iter().enumerate() {
            for bj in &self.branches[i + 1..] {
                let ov = inner_product(&bi.state, &bj.state)
                    .map(|z| z.norm())
                    .unwrap_or(f64::INFINITY);
                worst = worst.max(ov);
            }
        }
        worst
    }

    /// Ensemble mean of a diagonal observable.
    pub fn expectation(&self, gen: &DiagonalGenerator) -> Result<f64> {
        let mut acc = 0.0;
        let mut total = 0.0;
        for b in &self.branches {
            acc += b.weight * expectation(&b.state, gen)?;
            total += b.weight;
        }
        Ok(acc / total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cutoff(k: usize) -> FockCutoff {
        FockCutoff::new(k, 4, 1e-10).unwrap()
    }

    #[test]
    fn triangular_index_is_dense_and_ordered() {
        let c = cutoff(7);
        for (expected, (na, nb)) in c.levels().enumerate() {
            assert_eq!(c.index(na, nb), Some(expected));
        }
        assert_eq!(c.len(), 36);
        assert_eq!(c.index(4, 4), None);
    }

    #[test]
    fn cutoff_rejects_bad_parameters() {
        assert!(FockCutoff::new(0, 0, 1e-10).is_err());
        assert!(FockCutoff::new(5, 0, 0.0).is_err());
        assert!(FockCutoff::new(5, 0, 1.0).is_err());
        assert!(FockCutoff::new(1, 0, 0.5).is_ok());
    }

    #[test]
    fn vacuum_cutoff_covers_thermal_tail() {
        for g in [0.0, 0.3, 1.0, 1.5] {
            let c = FockCutoff::for_opa_vacuum(g, 12, 1e-10).unwrap();
            let pairs = c.max_total() / 2;
            let tail = (g as f64).tanh().powi(2 * (pairs as i32 + 1));
            assert!(tail < 1e-10, "g = {g}: tail {tail}");
            if pairs > 0 {
                let looser = (g as f64).tanh().powi(2 * pairs as i32);
                assert!(looser >= 1e-10);
            }
        }
    }

    #[test]
    fn basis_states_are_orthonormal() {
        let c = cutoff(6);
        let v = TwoModePureState::vacuum(c);
        let x = TwoModePureState::basis(c, 0, 1).unwrap();
        assert_eq!(inner_product(&v, &x).unwrap(), Complex64::new(0.0, 0.0));
        assert!((inner_product(&x, &x).unwrap().re - 1.0).abs() < 1e-12);
        assert!(matches!(
            TwoModePureState::basis(c, 4, 3),
            Err(Error::Cutoff { requested: 7, .. })
        ));
    }

    #[test]
    fn cutoff_mismatch_is_a_dimension_error() {
        let a = TwoModePureState::vacuum(cutoff(4));
        let b = TwoModePureState::vacuum(cutoff(5));
        assert!(matches!(inner_product(&a, &b), Err(Error::Dimension(_))));
        let gen = DiagonalGenerator::new(GeneratorKind::Upper, &cutoff(5));
        assert!(matches!(expectation(&a, &gen), Err(Error::Dimension(_))));
    }

    #[test]
    fn generator_algebra_holds_on_every_level() {
        let c = cutoff(9);
        let u = DiagonalGenerator::new(GeneratorKind::Upper, &c);
        let l = DiagonalGenerator::new(GeneratorKind::Lower, &c);
        let s = DiagonalGenerator::new(GeneratorKind::Sum, &c);
        let d = DiagonalGenerator::new(GeneratorKind::Difference, &c);
        for i in 0..c.len() {
            assert_eq!(s.values()[i], (u.values()[i] + l.values()[i]) / 2.0);
            assert_eq!(d.values()[i], (u.values()[i] - l.values()[i]) / 2.0);
        }
        assert_eq!(d.value(3, 5), Some(-1.0));
        assert_eq!(s.value(3, 4), Some(3.5));
    }

    #[test]
    fn fock_states_have_no_fluctuations() {
        let c = cutoff(8);
        for (na, nb) in [(0, 0), (3, 1), (2, 6)] {
            let st = TwoModePureState::basis(c, na, nb).unwrap();
            for k1 in GeneratorKind::ALL {
                let g1 = DiagonalGenerator::new(k1, &c);
                assert_eq!(variance(&st, &g1).unwrap(), 0.0);
                assert_eq!(expectation(&st, &g1).unwrap(), k1.eigenvalue(na, nb));
                for k2 in GeneratorKind::ALL {
                    let g2 = DiagonalGenerator::new(k2, &c);
                    assert_eq!(covariance(&st, &g1, &g2).unwrap(), 0.0);
                }
            }
        }
    }

    #[test]
    fn superposition_moments() {
        // (|0,0> + |2,0>)/sqrt2: <n_a> = 1, var = 1
        let c = cutoff(4);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = vec![Complex64::new(0.0, 0.0); c.len()];
        amps[c.index(0, 0).unwrap()] = Complex64::new(h, 0.0);
        amps[c.index(2, 0).unwrap()] = Complex64::new(0.0, h);
        let st = TwoModePureState::from_amplitudes(c, amps, 0.0).unwrap();
        let u = DiagonalGenerator::new(GeneratorKind::Upper, &c);
        let d = DiagonalGenerator::new(GeneratorKind::Difference, &c);
        assert!((expectation(&st, &u).unwrap() - 1.0).abs() < 1e-15);
        assert!((variance(&st, &u).unwrap() - 1.0).abs() < 1e-15);
        assert!((covariance(&st, &u, &d).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(
            covariance(&st, &u, &d).unwrap(),
            covariance(&st, &d, &u).unwrap()
        );
        assert_eq!(st.diagonal_support(), vec![0, 2]);
    }

    #[test]
    fn norm_window_is_enforced() {
        let c = cutoff(3);
        let mut amps = vec![Complex64::new(0.0, 0.0); c.len()];
        amps[0] = Complex64::new(0.9, 0.0);
        assert!(matches!(
            TwoModePureState::from_amplitudes(c, amps.clone(), 0.0),
            Err(Error::Convergence { .. })
        ));
        amps[0] = Complex64::new(1.1, 0.0);
        assert!(matches!(
            TwoModePureState::from_amplitudes(c, amps, 0.0),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn ensemble_validation() {
        let c = cutoff(4);
        let a = TwoModePureState::basis(c, 0, 0).unwrap();
        let b = TwoModePureState::basis(c, 1, 0).unwrap();
        let ok = NumberDiagonalEnsemble::new(vec![
            Branch { weight: 0.5, label: 0, state: a.clone() },
            Branch { weight: 0.5, label: 1, state: b },
        ])
        .unwrap();
        assert_eq!(ok.len(), 2);
        assert_eq!(ok.max_overlap(), 0.0);

        let dup = NumberDiagonalEnsemble::new(vec![
            Branch { weight: 0.5, label: 0, state: a.clone() },
            Branch { weight: 0.5, label: 1, state: a.clone() },
        ]);
        assert!(matches!(dup, Err(Error::Precondition(_))));

        let short = NumberDiagonalEnsemble::new(vec![Branch { weight: 0.5, label: 0, state: a }]);
        assert!(matches!(short, Err(Error::Convergence { .. })));
    }
}
