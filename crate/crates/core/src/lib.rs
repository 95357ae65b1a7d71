//! Quantum Fisher information for SU(1,1) interferometers in a truncated
//! two-mode Fock basis, together with the closed-form precision bounds they
//! are checked against.
//!
//! The pipeline is: prepare an input ([`states`]), amplify it with a two-mode
//! squeezer ([`opa`]), imprint a phase generated by a photon-number operator
//! ([`fock::GeneratorKind`]), and evaluate the QFI or QFIM ([`metrology`]).
//! [`analytic`] holds the closed forms and [`verify`] the named checks that
//! compare the two.

pub mod analytic;
pub mod cli;
pub mod error;
pub mod fock;
pub mod interferometer;
mod ladder;
pub mod metrology;
pub mod opa;
pub mod states;
pub mod verify;

pub use error::{Error, Result};
pub use fock::{DiagonalGenerator, FockCutoff, GeneratorKind, NumberDiagonalEnsemble, TwoModePureState};
pub use interferometer::InterferometerConfig;
pub use metrology::{Bound, QfiMatrix, QfiMethod, QfiResult};
pub use opa::{OpaParams, PhaseModel};
pub use states::ModeSpec;
