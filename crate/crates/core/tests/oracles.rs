//! Values frozen from independent oracles.
//!
//! The oracle here is a dense matrix exponential of the squeezer generator on
//! a square Fock box `n_a, n_b <= N`, built with nalgebra and sharing no code
//! with the library's ladder decomposition. Expectation values, QFIs and QFIM
//! elements are then summed directly over the box. The frozen constants were
//! produced by this oracle and by the closed forms, and the library must
//! reproduce them.

use std::f64::consts::PI;

use approx::assert_relative_eq;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use su11::analytic;
use su11::fock::{expectation, DiagonalGenerator, GeneratorKind};
use su11::metrology::{qfi_ensemble_convexity, qfi_for_config, qfi_pure, qfi_sld_dense, qfim};
use su11::{FockCutoff, InterferometerConfig, ModeSpec, QfiMethod, TwoModePureState};

const BOX: usize = 80;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn idx_in(n: usize, na: usize, nb: usize) -> usize {
    na * (n + 1) + nb
}

fn idx(na: usize, nb: usize) -> usize {
    idx_in(BOX, na, nb)
}

/// `exp[g (e^{i theta} a^dag b^dag - e^{-i theta} a b)]` on the square box
/// `n_a, n_b <= n`, as one dense exponential per fixed `n_a - n_b` block.
struct DenseSqueezer {
    n: usize,
    /// For each block: the box indices it covers and its exponential.
    blocks: Vec<(Vec<usize>, DMatrix<Complex64>)>,
}

impl DenseSqueezer {
    fn new(n: usize, g: f64, theta: f64) -> Self {
        let pump = Complex64::from_polar(1.0, theta);
        let mut blocks = Vec::new();
        for delta in -(n as i64)..=(n as i64) {
            let sites: Vec<(usize, usize)> = (0..=n)
                .filter_map(|nb| {
                    let na = nb as i64 + delta;
                    (na >= 0 && na as usize <= n).then_some((na as usize, nb))
                })
                .collect();
            let len = sites.len();
            let mut k = DMatrix::<Complex64>::zeros(len, len);
            for j in 0..len.saturating_sub(1) {
                let (na, nb) = sites[j];
                let amp = ((na + 1) as f64 * (nb + 1) as f64).sqrt() * g;
                k[(j + 1, j)] += pump * amp;
                k[(j, j + 1)] -= pump.conj() * amp;
            }
            let indices = sites.iter().map(|&(na, nb)| idx_in(n, na, nb)).collect();
            blocks.push((indices, k.exp()));
        }
        DenseSqueezer { n, blocks }
    }

    fn apply(&self, psi: &DVector<Complex64>) -> DVector<Complex64> {
        let mut out = DVector::<Complex64>::zeros(psi.len());
        for (indices, u) in &self.blocks {
            let local = DVector::from_iterator(indices.len(), indices.iter().map(|&i| psi[i]));
            let mapped = u * local;
            for (k, &i) in indices.iter().enumerate() {
                out[i] = mapped[k];
            }
        }
        out
    }

    fn basis(&self, na: usize, nb: usize) -> DVector<Complex64> {
        let dim = (self.n + 1) * (self.n + 1);
        let mut v = DVector::<Complex64>::zeros(dim);
        v[idx_in(self.n, na, nb)] = c(1.0);
        self.apply(&v)
    }
}

fn coherent(alpha: Complex64) -> Vec<Complex64> {
    let mut v = Vec::with_capacity(BOX + 1);
    let mut term = c((-alpha.norm_sqr() / 2.0).exp());
    for n in 0..=BOX {
        if n > 0 {
            term = term * alpha / (n as f64).sqrt();
        }
        v.push(term);
    }
    v
}

fn fock(n: usize) -> Vec<Complex64> {
    let mut v = vec![c(0.0); BOX + 1];
    v[n] = c(1.0);
    v
}

fn product(a: &[Complex64], b: &[Complex64]) -> DVector<Complex64> {
    let mut v = DVector::<Complex64>::zeros((BOX + 1) * (BOX + 1));
    for na in 0..=BOX {
        for nb in 0..=BOX {
            v[idx(na, nb)] = a[na] * b[nb];
        }
    }
    v
}

/// Dense oracle output state for a product input.
fn oracle_state(a: &[Complex64], b: &[Complex64], g: f64, theta: f64) -> DVector<Complex64> {
    DenseSqueezer::new(BOX, g, theta).apply(&product(a, b))
}

/// Number statistics summed directly over the box: means and covariance of `(n_a, n_b)`.
struct Moments {
    mean_a: f64,
    mean_b: f64,
    var_a: f64,
    var_b: f64,
    cov_ab: f64,
}

fn moments(psi: &DVector<Complex64>) -> Moments {
    let (mut w, mut ma, mut mb, mut aa, mut bb, mut ab) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for na in 0..=BOX {
        for nb in 0..=BOX {
            let p = psi[idx(na, nb)].norm_sqr();
            let (x, y) = (na as f64, nb as f64);
            w += p;
            ma += p * x;
            mb += p * y;
            aa += p * x * x;
            bb += p * y * y;
            ab += p * x * y;
        }
    }
    let (ma, mb) = (ma / w, mb / w);
    Moments {
        mean_a: ma,
        mean_b: mb,
        var_a: aa / w - ma * ma,
        var_b: bb / w - mb * mb,
        cov_ab: ab / w - ma * mb,
    }
}

/// `(F_dd, F_ds, F_ss)` for `d = (n_a - n_b)/2`, `s = (n_a + n_b)/2`.
fn oracle_qfim(m: &Moments) -> (f64, f64, f64) {
    let dd = m.var_a + m.var_b - 2.0 * m.cov_ab;
    let ds = m.var_a - m.var_b;
    let ss = m.var_a + m.var_b + 2.0 * m.cov_ab;
    (dd, ds, ss)
}

fn library_state(a: ModeSpec, b: ModeSpec, g: f64, theta: f64) -> TwoModePureState {
    let mut cfg = InterferometerConfig::new(a, b, g);
    cfg.pump_phase = theta;
    cfg.run(|k| cfg.pure_output(k)).unwrap().0
}

#[test]
fn ladder_amplitudes_match_the_dense_exponential() {
    let alpha = Complex64::new(0.8, -0.4);
    let beta = Complex64::from_polar(0.7, PI / 3.0);
    let cases = [
        (ModeSpec::coherent(alpha), ModeSpec::Vacuum, coherent(alpha), fock(0), 0.5, 0.3),
        (ModeSpec::coherent(alpha), ModeSpec::coherent(beta), coherent(alpha), coherent(beta), 0.4, -1.1),
        (ModeSpec::Fock(2), ModeSpec::Fock(1), fock(2), fock(1), 0.35, 2.0),
    ];
    let k = FockCutoff::new(60, 12, 1e-10).unwrap();
    for (sa, sb, va, vb, g, theta) in cases {
        let mut cfg = InterferometerConfig::new(sa, sb, g).with_cutoff(k);
        cfg.pump_phase = theta;
        let lib = cfg.pure_output(&k).unwrap();
        let oracle = oracle_state(&va, &vb, g, theta);
        let mut worst = 0.0f64;
        for (na, nb, amp) in lib.iter() {
            if na <= BOX && nb <= BOX {
                worst = worst.max((amp - oracle[idx(na, nb)]).norm());
            }
        }
        assert!(worst < 1e-11, "largest amplitude difference {worst:e} at g = {g}");
    }
}

#[test]
fn vacuum_expectations() {
    // <n_a> = sinh^2 1 on the vacuum, cosh^2 1 + sinh^2 1 on |1,0>
    let k = FockCutoff::new(120, 12, 1e-10).unwrap();
    let gen = DiagonalGenerator::new(GeneratorKind::Upper, &k);
    let vac = InterferometerConfig::new(ModeSpec::Vacuum, ModeSpec::Vacuum, 1.0).with_cutoff(k);
    let one = InterferometerConfig::new(ModeSpec::Fock(1), ModeSpec::Vacuum, 1.0).with_cutoff(k);
    let e0 = expectation(&vac.pure_output(&k).unwrap(), &gen).unwrap();
    let e1 = expectation(&one.pure_output(&k).unwrap(), &gen).unwrap();
    assert_relative_eq!(e0, 1.0f64.sinh().powi(2), max_relative = 1e-10);
    assert_relative_eq!(e0, 1.381097845541816, max_relative = 1e-10);
    assert_relative_eq!(e1, 3.7621956910836314, max_relative = 1e-10);
    let q = qfi_pure(&vac.pure_output(&k).unwrap(), &gen).unwrap().value;
    // four times sinh^2 1 cosh^2 1
    assert_relative_eq!(q / 4.0, 3.2885291045, max_relative = 1e-9);
}

#[test]
fn two_mode_squeezed_vacuum_qfi() {
    // exact amplitudes tanh^n g / cosh g give 4 sinh^2 g cosh^2 g = sinh^2 2g
    let frozen = 13.154116418;
    assert_relative_eq!((2.0f64).sinh().powi(2), frozen, max_relative = 1e-10);
    assert_relative_eq!(analytic::f_vacuum(1.0), frozen, max_relative = 1e-10);
    for model in [GeneratorKind::Upper, GeneratorKind::Lower, GeneratorKind::Sum] {
        let cfg = InterferometerConfig::new(ModeSpec::Vacuum, ModeSpec::Vacuum, 1.0).with_model(model);
        let (r, _) = qfi_for_config(&cfg, QfiMethod::Variance).unwrap();
        assert_relative_eq!(r.value, frozen, max_relative = 1e-9);
        let (fd, _) = qfi_for_config(&cfg, QfiMethod::FidelityFd).unwrap();
        assert_relative_eq!(fd.value, frozen, max_relative = 1e-4);
    }
}

#[test]
fn coherent_vacuum_qfis_from_the_dense_oracle() {
    let g = 0.5;
    let m = moments(&oracle_state(&coherent(c(1.0)), &fock(0), g, 0.0));
    let (_, _, ss) = oracle_qfim(&m);
    // coherent in A: generator on A gives 9.22946, on B 3.05714, split 5.14329
    let frozen = [(GeneratorKind::Upper, 9.229454806), (GeneratorKind::Lower, 3.057132267), (GeneratorKind::Sum, 5.143293537)];
    assert_relative_eq!(4.0 * m.var_a, frozen[0].1, max_relative = 1e-8);
    assert_relative_eq!(4.0 * m.var_b, frozen[1].1, max_relative = 1e-8);
    assert_relative_eq!(ss, frozen[2].1, max_relative = 1e-8);
    for (kind, value) in frozen {
        let cfg = InterferometerConfig::new(ModeSpec::coherent(c(1.0)), ModeSpec::Vacuum, g).with_model(kind);
        assert_relative_eq!(qfi_for_config(&cfg, QfiMethod::Variance).unwrap().0.value, value, max_relative = 1e-8);
        assert_relative_eq!(qfi_for_config(&cfg, QfiMethod::FidelityFd).unwrap().0.value, value, max_relative = 1e-4);
    }
    // mirrored input: the two arm formulas swap
    let mirrored = InterferometerConfig::new(ModeSpec::Vacuum, ModeSpec::coherent(c(1.0)), g);
    assert_relative_eq!(qfi_for_config(&mirrored, QfiMethod::Variance).unwrap().0.value, 3.057132267, max_relative = 1e-8);
    assert_relative_eq!(m.mean_a, 1.0 * (0.5f64).cosh().powi(2) + (0.5f64).sinh().powi(2), max_relative = 1e-10);
    assert_relative_eq!(m.mean_b, 2.0 * (0.5f64).sinh().powi(2), max_relative = 1e-10);
}

#[test]
fn one_vacuum_qfim_elements() {
    let g = 0.5;
    let m = moments(&oracle_state(&coherent(c(1.0)), &fock(0), g, 0.0));
    let (dd, ds, ss) = oracle_qfim(&m);
    let frozen = (1.0, 1.543080635, 5.143293537, 0.362030830);
    assert_relative_eq!(dd, frozen.0, max_relative = 1e-8);
    assert_relative_eq!(ds, frozen.1, max_relative = 1e-8);
    assert_relative_eq!(ss, frozen.2, max_relative = 1e-8);
    assert_relative_eq!(dd / (dd * ss - ds * ds), frozen.3, max_relative = 1e-8);
    // F_ds / 4
    assert_relative_eq!(ds / 4.0, 0.385770159, max_relative = 1e-8);

    let lib = qfim(&library_state(ModeSpec::coherent(c(1.0)), ModeSpec::Vacuum, g, 0.0)).unwrap();
    assert_relative_eq!(lib.f_dd, frozen.0, max_relative = 1e-8);
    assert_relative_eq!(lib.f_ds, frozen.1, max_relative = 1e-8);
    assert_relative_eq!(lib.f_sd, frozen.1, max_relative = 1e-8);
    assert_relative_eq!(lib.f_ss, frozen.2, max_relative = 1e-8);
    assert_relative_eq!(lib.bound_phi_s.value(), frozen.3, max_relative = 1e-8);
}

#[test]
fn vacuum_qfim_is_singular_in_the_difference() {
    let lib = qfim(&library_state(ModeSpec::Vacuum, ModeSpec::Vacuum, 1.0, 0.0)).unwrap();
    assert!(lib.f_dd.abs() < 1e-12);
    assert!(lib.bound_phi_d.is_singular());
    assert_relative_eq!(lib.f_ss, 13.154116418, max_relative = 1e-9);
    assert_relative_eq!(lib.bound_phi_s.information(), 13.154116418, max_relative = 1e-9);
}

#[test]
fn two_coherent_bound_from_the_dense_oracle() {
    let g = 0.5;
    let frozen = 16.159210043;
    for (alpha, beta) in [
        (c(1.0), c(1.0)),
        (Complex64::from_polar(1.0, PI / 4.0), Complex64::from_polar(1.0, -PI / 4.0)),
    ] {
        let m = moments(&oracle_state(&coherent(alpha), &coherent(beta), g, 0.0));
        let (dd, ds, ss) = oracle_qfim(&m);
        assert_relative_eq!(dd * ss - ds * ds, dd / (1.0 / frozen), max_relative = 1e-8);
        let lib = qfim(&library_state(ModeSpec::coherent(alpha), ModeSpec::coherent(beta), g, 0.0)).unwrap();
        assert_relative_eq!(lib.bound_phi_s.information(), frozen, max_relative = 1e-8);
        assert_relative_eq!(analytic::f_two_coherent(g, alpha, beta).unwrap(), frozen, max_relative = 1e-9);
    }
    assert_relative_eq!(analytic::f_two_coherent_max(g, 2.0), frozen, max_relative = 1e-9);
}

#[test]
fn coherent_squeezed_values() {
    // squeezed amplitudes are prepared by the library; the oracle evolves them densely
    let (a2, r, g) = (1.0f64, 0.5, 0.5);
    let k = FockCutoff::new(BOX, 12, 1e-10).unwrap();
    let sq = su11::states::prepare_pure(&ModeSpec::squeezed(r), &k).unwrap();
    let m = moments(&oracle_state(&coherent(c(a2.sqrt())), &sq.amplitudes, g, 0.0));
    let (dd, ds, ss) = oracle_qfim(&m);
    let frozen_coh_sq = 9.400821534;
    let frozen_li = 9.535697168;
    assert_relative_eq!((dd * ss - ds * ds) / dd, frozen_coh_sq, max_relative = 1e-7);
    assert_relative_eq!(ss, frozen_li, max_relative = 1e-7);
    assert_relative_eq!(analytic::f_coh_sq(g, a2, r), frozen_coh_sq, max_relative = 1e-9);
    assert_relative_eq!(analytic::f_li(g, a2, r), frozen_li, max_relative = 1e-9);
    assert_relative_eq!(analytic::f_diff(g, a2, r), frozen_coh_sq - frozen_li, max_relative = 1e-7);
    assert_relative_eq!(analytic::f_parity_cl(g, a2, r), 5.510334770, max_relative = 1e-9);
}

#[test]
fn squeezed_vacuum_preparation() {
    let k = FockCutoff::new(40, 12, 1e-10).unwrap();
    let sq = su11::states::prepare_pure(&ModeSpec::squeezed(0.5), &k).unwrap();
    let mean: f64 = sq.amplitudes.iter().enumerate().map(|(n, a)| n as f64 * a.norm_sqr()).sum();
    assert_relative_eq!(mean, 0.271540317, max_relative = 1e-8);
    for (n, a) in sq.amplitudes.iter().enumerate() {
        if n % 2 == 1 {
            assert_eq!(*a, c(0.0));
        }
    }
}

#[test]
fn phase_averaged_qfi_from_the_dense_density_matrix() {
    // mode-A photon numbers 0..=6 with Poisson(1) weights, renormalised
    let (g, n) = (0.4, 24);
    let mut p: Vec<f64> = (0..=6)
        .map(|k| (-1.0f64).exp() / (1..=k).map(|j| j as f64).product::<f64>())
        .collect();
    let total: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= total);
    let mean: f64 = p.iter().enumerate().map(|(k, x)| k as f64 * x).sum();

    // rho = sum_k p_k S|k,0><k,0|S^dag; SLD QFI from its full eigen-decomposition
    let squeezer = DenseSqueezer::new(n, g, 0.0);
    let dim = (n + 1) * (n + 1);
    // at zero pump phase the squeezer and the Fock inputs are real, so rho is real symmetric
    let mut rho = DMatrix::<f64>::zeros(dim, dim);
    for (k, &w) in p.iter().enumerate() {
        let col = squeezer.basis(k, 0);
        assert!(col.iter().all(|z| z.im.abs() < 1e-14));
        let re = col.map(|z| z.re);
        rho += (&re * re.transpose()) * w;
    }
    // a tiny uniform shift keeps the eigensolver away from the exactly
    // degenerate kernel (it returns NaN there); differences of eigenvalues
    // are unchanged and the denominators move by 2e-13
    let shift = 1e-13;
    let eig = (rho + DMatrix::<f64>::identity(dim, dim) * shift).symmetric_eigen();
    let v = &eig.eigenvectors;
    // G = n_a is diagonal in the box basis: G_ij = sum_m v_mi n_a(m) v_mj
    let n_a: Vec<f64> = (0..dim).map(|m| (m / (n + 1)) as f64).collect();
    let weighted = DMatrix::from_fn(dim, dim, |m, j| v[(m, j)] * n_a[m]);
    let gm = v.transpose() * weighted;
    let mut qfi = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            let (li, lj) = (eig.eigenvalues[i] - shift, eig.eigenvalues[j] - shift);
            let (li, lj) = (li.max(0.0), lj.max(0.0));
            if li + lj > 1e-12 {
                qfi += 2.0 * (li - lj).powi(2) / (li + lj) * gm[(i, j)].powi(2);
            }
        }
    }
    let expected = analytic::f_averaged(g, mean);
    assert_relative_eq!(qfi, expected, max_relative = 1e-7);

    let cfg = InterferometerConfig::new(ModeSpec::NumberMixture(p), ModeSpec::Vacuum, g);
    let (ens, k) = cfg.run(|k| cfg.ensemble_output(k)).unwrap();
    let lib_gen = DiagonalGenerator::new(GeneratorKind::Upper, &k);
    let convex = qfi_ensemble_convexity(&ens, &lib_gen).unwrap().value;
    let dense = qfi_sld_dense(&ens, &lib_gen, 4000).unwrap().value;
    assert_relative_eq!(convex, expected, max_relative = 1e-9);
    assert_relative_eq!(dense, expected, max_relative = 1e-8);
}
