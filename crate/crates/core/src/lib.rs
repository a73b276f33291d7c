//! Spectral solver for the C₃ hindered rigid rotor `-d²/dφ² + λ cos 3φ`
//! and its space-time-symmetric counterpart with an imaginary barrier.
//!
//! The kernels are generic over the scalar field ([`Real`]): `f32`, `f64`,
//! or the software [`DoubleDouble`] when ~31 digits are needed. Exact
//! perturbation coefficients use arbitrary-size rationals.

pub mod error;
pub mod perturbation;
pub mod rotor;
pub mod scalar;
pub mod spectral;
pub mod st;

pub use error::{Error, Result};
pub use perturbation::{asymptotic_energy, evaluate_series, rs_series, RationalSeries, SeriesValue};
pub use rotor::{build_block, BarrierKind, BlockOperator, Coupling, SymmetrySpecies};
pub use scalar::{DoubleDouble, Real};
pub use spectral::{
    auto_truncation, characteristic, count_below, dense_oracle, solve_spectrum, tunneling_splitting,
    CharacteristicValue, Spectrum,
};
pub use st::{
    complex_pair_continuation, ep_scan, find_exceptional_point, real_spectrum_st, ComplexPair, EpSeed,
    ExceptionalPoint,
};

pub type Spectrum64 = Spectrum<f64>;
pub type SpectrumDd = Spectrum<DoubleDouble>;
pub type Block64 = BlockOperator<f64>;
pub type BlockDd = BlockOperator<DoubleDouble>;
pub type Coupling64 = Coupling<f64>;
pub type CouplingDd = Coupling<DoubleDouble>;
pub type ExceptionalPoint64 = ExceptionalPoint<f64>;
pub type ExceptionalPointDd = ExceptionalPoint<DoubleDouble>;
