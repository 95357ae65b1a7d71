//! Exponentials of phase-covariant ladder generators.
//!
//! Both the two-mode squeezer restricted to one `n_a - n_b` diagonal and the
//! single-mode squeezer restricted to the even levels act on a chain of
//! states `|0>, |1>, ..., |m>` through a generator
//!
//! ```text
//! A[k+1, k] =  e^{i theta} c_k
//! A[k, k+1] = -e^{-i theta} c_k
//! ```
//!
//! with real couplings `c_k >= 0`. Writing `A = P S (-i T) S^dag P^dag` with
//! `P = diag(e^{ik theta})`, `S = diag(i^k)` and `T` the real symmetric
//! tridiagonal matrix of couplings, the exponential follows from the spectral
//! decomposition of `T`. The `theta`-independent core `exp(A_0)` is real and
//! is stored once per chain.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

/// `exp(A)` for one chain, stored at `theta = 0`.
#[derive(Debug, Clone)]
pub struct LadderPropagator {
    core: DMatrix<f64>,
}

impl LadderPropagator {
    /// Builds `exp(A_0)` from the chain couplings; the chain has `couplings.len() + 1` sites.
    pub fn new(couplings: &[f64]) -> Self {
        let n = couplings.len() + 1;
        let mut t = DMatrix::<f64>::zeros(n, n);
        for (k, &c) in couplings.iter().enumerate() {
            t[(k + 1, k)] = c;
            t[(k, k + 1)] = c;
        }
        let eig = SymmetricEigen::new(t);
        let v = &eig.eigenvectors;
        let phases: Vec<Complex64> = eig
            .eigenvalues
            .iter()
            .map(|&lam| Complex64::from_polar(1.0, -lam))
            .collect();

        // exp(-iT)[j,k] = sum_m V[j,m] V[k,m] e^{-i lambda_m}; the S conjugation
        // multiplies entry (j,k) by i^{j-k}, and the result is real.
        let mut core = DMatrix::<f64>::zeros(n, n);
        for j in 0..n {
            for k in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for (m, ph) in phases.iter().enumerate() {
                    acc += ph * (v[(j, m)] * v[(k, m)]);
                }
                let rot = match (j as i64 - k as i64).rem_euclid(4) {
                    0 => Complex64::new(1.0, 0.0),
                    1 => Complex64::new(0.0, 1.0),
                    2 => Complex64::new(-1.0, 0.0),
                    _ => Complex64::new(0.0, -1.0),
                };
                core[(j, k)] = (rot * acc).re;
            }
        }
        LadderPropagator { core }
    }

    pub fn len(&self) -> usize {
        self.core.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.core.nrows() == 0
    }

    pub fn core(&self) -> &DMatrix<f64> {
        &self.core
    }

    /// `exp(A) x` with the pump phase restored as `P exp(A_0) P^dag`.
    pub fn apply(&self, input: &[Complex64], theta: f64) -> Vec<Complex64> {
        let n = self.len();
        assert_eq!(input.len(), n, "chain length mismatch");
        let rotated: Vec<Complex64> = input
            .iter()
            .enumerate()
            .map(|(k, &x)| x * Complex64::from_polar(1.0, -(k as f64) * theta))
            .collect();
        let nonzero: Vec<usize> = (0..n).filter(|&k| rotated[k] != Complex64::new(0.0, 0.0)).collect();
        (0..n)
            .map(|j| {
                let acc: Complex64 = nonzero.iter().map(|&k| rotated[k] * self.core[(j, k)]).sum();
                acc * Complex64::from_polar(1.0, j as f64 * theta)
            })
            .collect()
    }
}
