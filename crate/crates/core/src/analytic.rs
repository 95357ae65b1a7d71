//! Closed-form precision bounds.
//!
//! Every function is a pure function of the physical parameters. The gain
//! enters through `n_kappa = 2 sinh^2 g` (the mean photon number an OPA
//! generates from vacuum), except `sinh(4g)`, which is always taken from `g`
//! directly; see [`radical_sinh4g`] for why.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::GeneratorKind;
use crate::metrology::Bound;

/// `2 sinh^2 g`.
pub fn n_kappa(g: f64) -> f64 {
    2.0 * g.sinh().powi(2)
}

/// Named physical parameters shared by the formulas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyticParams {
    pub g: f64,
    /// `|alpha|^2`.
    pub n_alpha: f64,
    /// `|beta|^2`; also the coherent photon number of the single-coherent formulas.
    pub n_beta: f64,
    pub alpha: Complex64,
    pub beta: Complex64,
    pub r: f64,
    /// Mean photon number of the mode-A input.
    pub n_chi_bar: f64,
    /// Photon-number variance of the mode-A input.
    pub v_chi: f64,
    /// `n_alpha + n_beta`.
    pub n_in: f64,
    /// Phase model of the single-coherent formulas.
    pub model: GongModel,
}

impl AnalyticParams {
    pub fn new(g: f64) -> Self {
        AnalyticParams {
            g,
            n_alpha: 0.0,
            n_beta: 0.0,
            alpha: Complex64::new(0.0, 0.0),
            beta: Complex64::new(0.0, 0.0),
            r: 0.0,
            n_chi_bar: 0.0,
            v_chi: 0.0,
            n_in: 0.0,
            model: GongModel::U,
        }
    }

    pub fn with_alpha(mut self, alpha: Complex64) -> Self {
        self.alpha = alpha;
        self.n_alpha = alpha.norm_sqr();
        self.n_in = self.n_alpha + self.n_beta;
        self
    }

    pub fn with_beta(mut self, beta: Complex64) -> Self {
        self.beta = beta;
        self.n_beta = beta.norm_sqr();
        self.n_in = self.n_alpha + self.n_beta;
        self
    }

    pub fn n_kappa(&self) -> f64 {
        n_kappa(self.g)
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("g", self.g),
            ("n_alpha", self.n_alpha),
            ("n_beta", self.n_beta),
            ("r", self.r),
            ("n_chi_bar", self.n_chi_bar),
            ("v_chi", self.v_chi),
            ("n_in", self.n_in),
        ];
        for (name, v) in fields {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        if !(self.alpha.re.is_finite() && self.alpha.im.is_finite() && self.beta.re.is_finite() && self.beta.im.is_finite()) {
            return Err(Error::InvalidParameter("amplitudes must be finite".into()));
        }
        if (self.n_in - self.n_alpha - self.n_beta).abs() > 1e-12 * self.n_in.max(1.0) {
            return Err(Error::InvalidParameter(format!(
                "n_in = {} differs from n_alpha + n_beta = {}",
                self.n_in,
                self.n_alpha + self.n_beta
            )));
        }
        Ok(())
    }
}

/// Catalogue of the closed forms that depend only on [`AnalyticParams`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Formula {
    FVacuum,
    FGong,
    FAveraged,
    BoundPhiSOneVacuum,
    FTwoCoherent,
    FTwoCoherentMax,
    FCohSq,
    FLi,
    FDiff,
    FParityCl,
}

impl Formula {
    pub const ALL: [Formula; 10] = [
        Formula::FVacuum,
        Formula::FGong,
        Formula::FAveraged,
        Formula::BoundPhiSOneVacuum,
        Formula::FTwoCoherent,
        Formula::FTwoCoherentMax,
        Formula::FCohSq,
        Formula::FLi,
        Formula::FDiff,
        Formula::FParityCl,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Formula::FVacuum => "f_vacuum",
            Formula::FGong => "f_gong",
            Formula::FAveraged => "f_averaged",
            Formula::BoundPhiSOneVacuum => "bound_phi_s_one_vacuum",
            Formula::FTwoCoherent => "f_two_coherent",
            Formula::FTwoCoherentMax => "f_two_coherent_max",
            Formula::FCohSq => "f_coh_sq",
            Formula::FLi => "f_li",
            Formula::FDiff => "f_diff",
            Formula::FParityCl => "f_parity_cl",
        }
    }

    /// Parameters the formula reads, as they are named on the command line.
    pub fn inputs(self) -> &'static [&'static str] {
        match self {
            Formula::FVacuum => &["g"],
            Formula::FGong => &["g", "n_beta", "model"],
            Formula::FAveraged => &["g", "n_chi_bar"],
            Formula::BoundPhiSOneVacuum => &["g", "n_chi_bar", "v_chi"],
            Formula::FTwoCoherent => &["g", "alpha", "beta"],
            Formula::FTwoCoherentMax => &["g", "n_in"],
            Formula::FCohSq | Formula::FLi | Formula::FDiff | Formula::FParityCl => &["g", "n_alpha", "r"],
        }
    }

    pub fn from_name(name: &str) -> Option<Formula> {
        Formula::ALL.into_iter().find(|f| f.name() == name)
    }

    /// Evaluates the formula; a singular bound evaluates to infinity.
    pub fn evaluate(self, p: &AnalyticParams) -> Result<f64> {
        p.validate()?;
        Ok(match self {
            Formula::FVacuum => f_vacuum(p.g),
            Formula::FGong => f_gong(p.g, p.n_beta, p.model),
            Formula::FAveraged => f_averaged(p.g, p.n_chi_bar),
            Formula::BoundPhiSOneVacuum => bound_phi_s_one_vacuum(p.g, p.n_chi_bar, p.v_chi).value(),
            Formula::FTwoCoherent => f_two_coherent(p.g, p.alpha, p.beta)?,
            Formula::FTwoCoherentMax => f_two_coherent_max(p.g, p.n_in),
            Formula::FCohSq => f_coh_sq(p.g, p.n_alpha, p.r),
            Formula::FLi => f_li(p.g, p.n_alpha, p.r),
            Formula::FDiff => f_diff(p.g, p.n_alpha, p.r),
            Formula::FParityCl => f_parity_cl(p.g, p.n_alpha, p.r),
        })
    }
}

/// Vacuum-input QFI, identical for all three phase models: `n_kappa (n_kappa + 2)`.
pub fn f_vacuum(g: f64) -> f64 {
    let n = n_kappa(g);
    n * (n + 2.0)
}

/// The three single-phase models of the un-averaged coherent-input formulas.
///
/// `U` and `L` differ only in the sign of the `2 cosh 2g` term; `S` has no
/// such term. Which one a numeric generator reproduces depends on which input
/// mode is populated; see [`gong_model_for`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GongModel {
    U,
    L,
    S,
}

impl GongModel {
    pub const ALL: [GongModel; 3] = [GongModel::U, GongModel::L, GongModel::S];

    pub fn label(self) -> &'static str {
        match self {
            GongModel::U => "u",
            GongModel::L => "l",
            GongModel::S => "s",
        }
    }
}

/// `n cosh 4g + sinh^2 2g + n (1 -/+ 2 cosh 2g)` for `U`/`L`; `S` drops the last term.
pub fn f_gong(g: f64, n_beta: f64, model: GongModel) -> f64 {
    let base = n_beta * (4.0 * g).cosh() + (2.0 * g).sinh().powi(2);
    let c = 2.0 * (2.0 * g).cosh();
    match model {
        GongModel::U => base + n_beta * (1.0 - c),
        GongModel::L => base + n_beta * (1.0 + c),
        GongModel::S => base,
    }
}

/// Formula matching generator `kind` when the coherent input sits in mode A
/// (`populated_a = true`) or in mode B.
///
/// The `U` formula belongs to the phase on the arm *opposite* the populated
/// input; the generator on the populated arm gives `L`.
pub fn gong_model_for(kind: GeneratorKind, populated_a: bool) -> Option<GongModel> {
    match (kind, populated_a) {
        (GeneratorKind::Sum, _) => Some(GongModel::S),
        (GeneratorKind::Upper | GeneratorKind::NumberA, true) => Some(GongModel::L),
        (GeneratorKind::Lower | GeneratorKind::NumberB, true) => Some(GongModel::U),
        (GeneratorKind::Upper | GeneratorKind::NumberA, false) => Some(GongModel::U),
        (GeneratorKind::Lower | GeneratorKind::NumberB, false) => Some(GongModel::L),
        (GeneratorKind::Difference, _) => None,
    }
}

/// Phase-averaged QFI for any mode-A input with mode-B vacuum: `(n + 1) n_kappa (n_kappa + 2)`.
pub fn f_averaged(g: f64, n_chi_bar: f64) -> f64 {
    (n_chi_bar + 1.0) * f_vacuum(g)
}

/// Two-parameter bound on the phase sum for mode-B vacuum.
///
/// `v_chi` is accepted and ignored: the photon-number variance cancels
/// between the QFIM elements.
pub fn bound_phi_s_one_vacuum(g: f64, n_chi_bar: f64, _v_chi: f64) -> Bound {
    let info = f_averaged(g, n_chi_bar);
    if info > 0.0 {
        Bound::Finite(1.0 / info)
    } else {
        Bound::Singular
    }
}

/// QFIM elements `(F_dd, F_ds, F_ss)` for a mode-A input of mean `n` and variance `v` with mode-B vacuum.
pub fn qfim_one_vacuum(g: f64, n_chi_bar: f64, v_chi: f64) -> (f64, f64, f64) {
    let c = (2.0 * g).cosh();
    let s2 = (2.0 * g).sinh().powi(2);
    (v_chi, v_chi * c, v_chi * c * c + (1.0 + n_chi_bar) * s2)
}

/// QFI on the phase sum for two coherent inputs (pump phase zero).
///
/// Errors for `n_in = 0`, where [`f_vacuum`] applies instead.
pub fn f_two_coherent(g: f64, alpha: Complex64, beta: Complex64) -> Result<f64> {
    let (na, nb) = (alpha.norm_sqr(), beta.norm_sqr());
    let n_in = na + nb;
    if n_in == 0.0 {
        return Err(Error::InvalidParameter(
            "two-coherent formula needs n_in > 0; use f_vacuum for vacuum inputs".into(),
        ));
    }
    let nk = n_kappa(g);
    let vac = nk * (nk + 2.0);
    Ok((n_in * n_in * vac + 4.0 * na * nb * (nk + 1.0).powi(2)) / n_in
        + vac
        + 2.0 * (alpha * beta).re * (4.0 * g).sinh())
}

/// Maximum of [`f_two_coherent`] at fixed `n_in`, reached for equal amplitudes with conjugate phases.
pub fn f_two_coherent_max(g: f64, n_in: f64) -> f64 {
    let nk = n_kappa(g);
    (n_in + 1.0) * nk * (nk + 2.0) + n_in * (nk + 1.0).powi(2) + n_in * (4.0 * g).sinh()
}

fn sq_first_term(g: f64, alpha_sq: f64, r: f64) -> f64 {
    (2.0 * g).sinh().powi(2) * (alpha_sq * (2.0 * r).exp() + r.cosh().powi(2))
}

/// Two-parameter phase-sum information for a coherent (real amplitude) and a squeezed-vacuum input.
pub fn f_coh_sq(g: f64, alpha_sq: f64, r: f64) -> f64 {
    let s = (2.0 * r).sinh().powi(2);
    let den = 4.0 * alpha_sq + 2.0 * s;
    let second = if den > 0.0 { 8.0 * alpha_sq * s / den } else { 0.0 };
    sq_first_term(g, alpha_sq, r) + (2.0 * g).cosh().powi(2) * second
}

/// Single-parameter QFI for the same input, ignoring the phase-difference nuisance.
pub fn f_li(g: f64, alpha_sq: f64, r: f64) -> f64 {
    sq_first_term(g, alpha_sq, r)
        + (2.0 * g).cosh().powi(2) * (alpha_sq + 0.5 * (2.0 * r).sinh().powi(2))
}

/// `f_coh_sq - f_li` in factored form; zero in the degenerate vacuum case.
pub fn f_diff(g: f64, alpha_sq: f64, r: f64) -> f64 {
    let c4 = (4.0 * r).cosh() - 1.0;
    let den = 4.0 * (4.0 * alpha_sq + c4);
    if den == 0.0 {
        return 0.0;
    }
    -(2.0 * g).cosh().powi(2) * (c4 - 4.0 * alpha_sq).powi(2) / den
}

/// Classical Fisher information of parity detection for the coherent/squeezed input.
pub fn f_parity_cl(g: f64, alpha_sq: f64, r: f64) -> f64 {
    sq_first_term(g, alpha_sq, r)
}

/// Phase-difference bound `F_ss / (F_dd F_ss - F_ds^2)`, with the singular
/// cases resolved as in [`crate::metrology::two_parameter_bounds`].
pub fn bound_mzi_phi_d(f_dd: f64, f_ss: f64, f_ds: f64) -> Bound {
    crate::metrology::two_parameter_bounds(f_dd, f_ds, f_ds, f_ss).1
}

/// Phase-sum bound `F_dd / (F_dd F_ss - F_ds^2)`.
pub fn bound_phi_s(f_dd: f64, f_ss: f64, f_ds: f64) -> Bound {
    crate::metrology::two_parameter_bounds(f_dd, f_ds, f_ds, f_ss).0
}

/// `4 sqrt(n (n + 1)) (2n + 1)`, an expression sometimes quoted for `sinh 4g`.
///
/// It equals `sinh 4g` only for `n = sinh^2 g`, not for `n = n_kappa(g) = 2 sinh^2 g`.
pub fn radical_sinh4g(n: f64) -> f64 {
    4.0 * (n * (n + 1.0)).sqrt() * (2.0 * n + 1.0)
}

/// Result of evaluating the radical `sinh 4g` expression under both photon-number conventions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadicalAudit {
    pub g: f64,
    pub sinh4g: f64,
    /// Radical with `n = sinh^2 g`.
    pub single: f64,
    /// Radical with `n = 2 sinh^2 g`.
    pub double: f64,
}

impl RadicalAudit {
    pub fn new(g: f64) -> Self {
        RadicalAudit {
            g,
            sinh4g: (4.0 * g).sinh(),
            single: radical_sinh4g(g.sinh().powi(2)),
            double: radical_sinh4g(n_kappa(g)),
        }
    }

    pub fn single_deviation(&self) -> f64 {
        relative_deviation(self.single, self.sinh4g)
    }

    pub fn double_deviation(&self) -> f64 {
        relative_deviation(self.double, self.sinh4g)
    }
}

/// Relative deviation when `|reference| >= 1e-6`, absolute otherwise.
pub fn relative_deviation(value: f64, reference: f64) -> f64 {
    let diff = (value - reference).abs();
    if reference.abs() >= 1e-6 {
        diff / reference.abs()
    } else {
        diff
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn documented_values() {
        assert_eq!(f_vacuum(0.0), 0.0);
        assert_relative_eq!(f_vacuum(1.0), 13.1541, max_relative = 1e-5);
        assert_relative_eq!(f_gong(0.5, 1.0, GongModel::U), 3.05714, max_relative = 1e-5);
        assert_relative_eq!(f_gong(0.5, 1.0, GongModel::L), 9.22946, max_relative = 1e-5);
        assert_relative_eq!(f_gong(0.5, 1.0, GongModel::S), 5.14329, max_relative = 1e-5);
        assert_relative_eq!(f_averaged(0.5, 1.0), 2.76220, max_relative = 1e-5);
        assert_relative_eq!(bound_phi_s_one_vacuum(0.5, 1.0, 3.0).value(), 0.36203, max_relative = 1e-4);
        let one = Complex64::new(1.0, 0.0);
        assert_relative_eq!(f_two_coherent(0.5, one, one).unwrap(), 16.1592, max_relative = 1e-5);
        assert_relative_eq!(f_two_coherent_max(0.5, 2.0), 16.1592, max_relative = 1e-5);
        assert_relative_eq!(f_coh_sq(0.5, 1.0, 0.5), 9.4007, max_relative = 1e-4);
        assert_relative_eq!(f_li(0.5, 1.0, 0.5), 9.53570, max_relative = 1e-5);
        assert_relative_eq!(f_diff(0.5, 1.0, 0.5), -0.1349, max_relative = 1e-3);
        assert_relative_eq!(f_parity_cl(0.5, 1.0, 0.5), 5.51033, max_relative = 1e-5);
        assert_relative_eq!(bound_mzi_phi_d(2.0, 2.0, 1.0).value(), 2.0 / 3.0, max_relative = 1e-15);
    }

    #[test]
    fn limits_collapse_to_vacuum() {
        for g in [0.1, 0.6, 1.3] {
            let v = f_vacuum(g);
            assert_relative_eq!(v, (2.0 * g).sinh().powi(2), max_relative = 1e-12);
            for m in GongModel::ALL {
                assert_relative_eq!(f_gong(g, 0.0, m), v, max_relative = 1e-12);
            }
            assert_relative_eq!(f_averaged(g, 0.0), v, max_relative = 1e-12);
            assert_relative_eq!(f_coh_sq(g, 0.0, 0.0), v, max_relative = 1e-15);
            assert_relative_eq!(f_li(g, 0.0, 0.0), v, max_relative = 1e-15);
            assert_relative_eq!(f_two_coherent_max(g, 0.0), v, max_relative = 1e-12);
        }
    }

    #[test]
    fn reductions() {
        let g = 0.4;
        let a = Complex64::new(0.8, 0.3);
        let zero = Complex64::new(0.0, 0.0);
        assert_relative_eq!(f_two_coherent(g, a, zero).unwrap(), f_averaged(g, a.norm_sqr()), max_relative = 1e-12);
        assert!(f_two_coherent(g, zero, zero).is_err());
        assert_relative_eq!(f_coh_sq(g, 0.7, 0.0), f_averaged(g, 0.7), max_relative = 1e-12);
        let r: f64 = 0.35;
        assert_relative_eq!(f_coh_sq(g, 0.0, r), f_averaged(g, r.sinh().powi(2)), max_relative = 1e-12);
        // vanishing numerator
        let alpha_sq = ((4.0 * r).cosh() - 1.0) / 4.0;
        assert!(f_diff(g, alpha_sq, r).abs() < 1e-15);
    }

    #[test]
    fn two_parameter_bound_ignores_variance() {
        let b: Vec<f64> = [0.0, 1.0, 10.0].iter().map(|&v| bound_phi_s_one_vacuum(0.5, 1.0, v).value()).collect();
        assert!(b.windows(2).all(|w| w[0] == w[1]));
        assert!(bound_phi_s_one_vacuum(0.0, 1.0, 0.0).is_singular());
        let (dd, ds, ss) = qfim_one_vacuum(0.5, 1.0, 1.0);
        assert_relative_eq!(bound_phi_s(dd, ss, ds).value(), 1.0 / f_averaged(0.5, 1.0), max_relative = 1e-12);
        assert_relative_eq!(bound_mzi_phi_d(2.0, 5.0, 0.0).value(), 0.5);
        assert_eq!(bound_phi_s(2.0, 5.0, 1.0), bound_mzi_phi_d(5.0, 2.0, 1.0));
    }

    #[test]
    fn gong_ordering_and_mapping() {
        for g in [0.2, 0.7] {
            for n in [0.5, 2.0] {
                let (u, l, s) = (f_gong(g, n, GongModel::U), f_gong(g, n, GongModel::L), f_gong(g, n, GongModel::S));
                assert!(l >= s && s >= u);
            }
        }
        assert_eq!(gong_model_for(GeneratorKind::Upper, true), Some(GongModel::L));
        assert_eq!(gong_model_for(GeneratorKind::Upper, false), Some(GongModel::U));
        assert_eq!(gong_model_for(GeneratorKind::Difference, true), None);
    }

    #[test]
    fn catalogue_matches_direct_calls() {
        let p = AnalyticParams::new(0.5).with_alpha(Complex64::new(1.0, 0.0)).with_beta(Complex64::new(1.0, 0.0));
        assert_eq!(Formula::FTwoCoherent.evaluate(&p).unwrap(), f_two_coherent(0.5, p.alpha, p.beta).unwrap());
        assert_eq!(Formula::FTwoCoherentMax.evaluate(&p).unwrap(), f_two_coherent_max(0.5, 2.0));
        for f in Formula::ALL {
            assert_eq!(Formula::from_name(f.name()), Some(f));
            assert!(f.inputs().contains(&"g"));
        }
        let mut bad = p;
        bad.n_in = 5.0;
        assert!(Formula::FVacuum.evaluate(&bad).is_err());
        assert_eq!(Formula::BoundPhiSOneVacuum.evaluate(&AnalyticParams::new(0.0)).unwrap(), f64::INFINITY);
    }

    #[test]
    fn radical_identity_needs_single_convention() {
        for g in [0.1, 0.5, 1.0] {
            let audit = RadicalAudit::new(g);
            assert!(audit.single_deviation() < 1e-12);
            assert!(audit.double_deviation() > 1e-2);
        }
    }
}
