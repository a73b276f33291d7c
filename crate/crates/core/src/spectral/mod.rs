//! Eigenvalues of the tridiagonal blocks by the characteristic-value
//! recursion, with a dense diagonalization kept alongside as an
//! independent check.

mod characteristic;
mod dense;
mod solve;
mod splitting;

pub use characteristic::{characteristic, coalescence_jet, count_below, CharacteristicValue, CoalescenceJet};
pub use dense::{dense_complex_eigenvalues, dense_oracle};
pub use solve::{
    auto_truncation, block_eigenvalues, initial_truncation, solve_spectrum, solve_spectrum_with, SolveOptions,
    Spectrum, SpectrumEntry,
};
pub use splitting::tunneling_splitting;

pub(crate) use characteristic::value_and_slope;
pub(crate) use solve::{safeguarded_newton, Probe};
