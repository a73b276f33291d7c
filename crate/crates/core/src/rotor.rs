//! Symmetry blocks of the hindered rotor `H = -d²/dφ² + λ cos 3φ`.
//!
//! Energies are in units of the rotational constant `B = ħ²/2I` and the
//! coupling is the reduced barrier `λ = V₃/B`. In the Fourier basis
//! `e^{i(3m+s)φ}` each symmetry block is tridiagonal with diagonal
//! `(3m+s)²` and off-diagonal `λ/2`. The totally symmetric states split
//! further by parity into a cosine block (`A+`, first coupling `λ/√2`
//! because of the constant function's normalization) and a sine block
//! (`A-`).

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SymmetrySpecies {
    /// Even (cosine) A states.
    APlus,
    /// Odd (sine) A states.
    AMinus,
    /// E states with `s = -1`.
    EA,
    /// E states with `s = +1`.
    EB,
    /// All A states in the two-sided exponential basis (`s = 0`).
    RawA,
}

impl SymmetrySpecies {
    pub const ALL: [SymmetrySpecies; 5] = [
        SymmetrySpecies::APlus,
        SymmetrySpecies::AMinus,
        SymmetrySpecies::EA,
        SymmetrySpecies::EB,
        SymmetrySpecies::RawA,
    ];

    /// Angular-momentum offset `s` of the exponential basis, for the
    /// two-sided blocks.
    pub fn offset(self) -> Option<i64> {
        match self {
            SymmetrySpecies::EA => Some(-1),
            SymmetrySpecies::EB => Some(1),
            SymmetrySpecies::RawA => Some(0),
            SymmetrySpecies::APlus | SymmetrySpecies::AMinus => None,
        }
    }

    pub fn is_two_sided(self) -> bool {
        self.offset().is_some()
    }

    /// Unperturbed energies of the block at truncation `n`, in basis order.
    pub fn diagonal(self, n: usize) -> Vec<i64> {
        let n = n as i64;
        match self {
            SymmetrySpecies::APlus => (0..=n).map(|j| 9 * j * j).collect(),
            SymmetrySpecies::AMinus => (1..=n).map(|j| 9 * j * j).collect(),
            _ => {
                let s = self.offset().unwrap_or(0);
                (-n..=n).map(|m| (3 * m + s).pow(2)).collect()
            }
        }
    }

    /// The `count` lowest unperturbed energies, ascending.
    pub fn unperturbed_levels(self, count: usize) -> Vec<i64> {
        let mut d = self.diagonal(count + 1);
        d.sort_unstable();
        d.truncate(count);
        d
    }

    /// Multipliers `w_k` with `p_k = w_k λ²` for the off-diagonal products,
    /// as exact fractions `(num, den)`.
    pub fn coupling_weights(self, n: usize) -> Vec<(i64, i64)> {
        let dim = self.diagonal(n).len();
        (1..dim)
            .map(|k| {
                if self == SymmetrySpecies::APlus && k == 1 {
                    (1, 2)
                } else {
                    (1, 4)
                }
            })
            .collect()
    }

    pub fn label(self) -> &'static str {
        match self {
            SymmetrySpecies::APlus => "A+",
            SymmetrySpecies::AMinus => "A-",
            SymmetrySpecies::EA => "EA",
            SymmetrySpecies::EB => "EB",
            SymmetrySpecies::RawA => "rawA",
        }
    }
}

impl fmt::Display for SymmetrySpecies {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseSpeciesError(pub String);

impl fmt::Display for ParseSpeciesError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown symmetry species `{}` (expected A+, A-, EA, EB or rawA)", self.0)
    }
}

impl std::error::Error for ParseSpeciesError {}

impl FromStr for SymmetrySpecies {
    type Err = ParseSpeciesError;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "a+" | "aplus" | "a1" => Ok(SymmetrySpecies::APlus),
            "a-" | "aminus" | "a2" => Ok(SymmetrySpecies::AMinus),
            "ea" | "e_a" => Ok(SymmetrySpecies::EA),
            "eb" | "e_b" => Ok(SymmetrySpecies::EB),
            "rawa" | "raw-a" | "a0" => Ok(SymmetrySpecies::RawA),
            _ => Err(ParseSpeciesError(s.to_owned())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BarrierKind {
    /// Hermitian rotor, potential `λ cos 3φ`.
    Real,
    /// Space-time-symmetric rotor, potential `i g cos 3φ`.
    Imaginary,
}

/// Reduced barrier strength: `λ` for the real barrier, `g` for `i g`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Coupling<T> {
    pub kind: BarrierKind,
    pub magnitude: T,
}

impl<T: Real> Coupling<T> {
    pub fn real(lambda: T) -> Self {
        Self { kind: BarrierKind::Real, magnitude: lambda }
    }

    pub fn imaginary(g: T) -> Self {
        Self { kind: BarrierKind::Imaginary, magnitude: g }
    }

    pub fn is_real(&self) -> bool {
        self.kind == BarrierKind::Real
    }

    /// Square of the potential strength: `λ²`, or `(ig)² = -g²`.
    pub fn strength_squared(&self) -> T {
        let m2 = self.magnitude * self.magnitude;
        match self.kind {
            BarrierKind::Real => m2,
            BarrierKind::Imaginary => -m2,
        }
    }

    /// `V(φ)`; complex because the imaginary barrier is `i g cos 3φ`.
    pub fn potential_value(&self, phi: f64) -> Complex64 {
        let v = self.magnitude.approx() * (3.0 * phi).cos();
        match self.kind {
            BarrierKind::Real => Complex64::new(v, 0.0),
            BarrierKind::Imaginary => Complex64::new(0.0, v),
        }
    }

    pub fn with_magnitude(&self, magnitude: T) -> Self {
        Self { kind: self.kind, magnitude }
    }
}

/// Period of the potential.
pub const C3_PERIOD: f64 = 2.0 * PI / 3.0;

/// Truncated tridiagonal operator of one symmetry block.
///
/// Off-diagonal elements are stored only through their products
/// `p_k = b_k c_k`, which is all the determinant recursion consumes; for
/// the imaginary barrier the products are negative and everything stays
/// real.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockOperator<T> {
    pub species: SymmetrySpecies,
    pub coupling: Coupling<T>,
    pub truncation: usize,
    pub diag: Vec<T>,
    /// `offprod[k - 1]` couples rows `k - 1` and `k`.
    pub offprod: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> BlockOperator<T> {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// `∂p_k/∂(magnitude)`, used by the exceptional-point Newton solver.
    pub fn offprod_derivative(&self) -> Vec<T> {
        let two_m = self.coupling.magnitude + self.coupling.magnitude;
        let sign = match self.coupling.kind {
            BarrierKind::Real => T::one(),
            BarrierKind::Imaginary => -T::one(),
        };
        self.weights.iter().map(|&w| sign * w * two_m).collect()
    }

    /// Same block at a different coupling magnitude.
    pub fn with_magnitude(&self, magnitude: T) -> Self {
        let coupling = self.coupling.with_magnitude(magnitude);
        let s2 = coupling.strength_squared();
        Self {
            species: self.species,
            coupling,
            truncation: self.truncation,
            diag: self.diag.clone(),
            offprod: self.weights.iter().map(|&w| w * s2).collect(),
            weights: self.weights.clone(),
        }
    }

    /// Symmetric (real barrier) or complex-symmetric (imaginary barrier)
    /// off-diagonal elements, `b_k = sqrt(p_k)` or `i sqrt(-p_k)`.
    pub fn offdiag_elements(&self) -> Vec<Complex64> {
        self.offprod
            .iter()
            .map(|p| {
                let p = p.approx();
                if p >= 0.0 {
                    Complex64::new(p.sqrt(), 0.0)
                } else {
                    Complex64::new(0.0, (-p).sqrt())
                }
            })
            .collect()
    }
}

/// Builds the truncated operator of `species` at `coupling`.
///
/// `n` bounds the Fourier index: `0..=n` for `A+`, `1..=n` for `A-` and
/// `-n..=n` for the two-sided blocks.
pub fn build_block<T: Real>(
    species: SymmetrySpecies,
    coupling: Coupling<T>,
    n: usize,
) -> Result<BlockOperator<T>> {
    if n < 2 {
        return Err(Error::TruncationTooSmall(n));
    }
    if !coupling.magnitude.is_finite() {
        return Err(Error::NonFiniteCoupling);
    }
    let diag = species.diagonal(n).into_iter().map(T::of_int).collect();
    let weights: Vec<T> = species
        .coupling_weights(n)
        .into_iter()
        .map(|(a, b)| T::of_int(a) / T::of_int(b))
        .collect();
    let s2 = coupling.strength_squared();
    let offprod = weights.iter().map(|&w| w * s2).collect();
    Ok(BlockOperator { species, coupling, truncation: n, diag, offprod, weights })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aplus_block_at_unit_barrier() {
        let b = build_block(SymmetrySpecies::APlus, Coupling::real(1.0), 3).unwrap();
        assert_eq!(b.diag, vec![0.0, 9.0, 36.0, 81.0]);
        assert_eq!(b.offprod, vec![0.5, 0.25, 0.25]);
        assert_eq!(b.dim(), 4);
    }

    #[test]
    fn ea_block_at_zero_barrier() {
        let b = build_block(SymmetrySpecies::EA, Coupling::real(0.0), 2).unwrap();
        // m = -2..=2 with s = -1.
        assert_eq!(b.diag, vec![49.0, 16.0, 1.0, 4.0, 25.0]);
        assert!(b.offprod.iter().all(|&p| p == 0.0));
        let mut d = b.diag.clone();
        d.sort_by(f64::total_cmp);
        assert_eq!(&d[..3], &[1.0, 4.0, 16.0]);
    }

    #[test]
    fn aminus_imaginary_products_are_negative() {
        let b = build_block(SymmetrySpecies::AMinus, Coupling::imaginary(2.0), 3).unwrap();
        assert_eq!(b.diag, vec![9.0, 36.0, 81.0]);
        assert_eq!(b.offprod, vec![-1.0, -1.0]);
    }

    #[test]
    fn two_sided_dimension() {
        for s in [SymmetrySpecies::EA, SymmetrySpecies::EB, SymmetrySpecies::RawA] {
            let b = build_block(s, Coupling::real(0.3), 7).unwrap();
            assert_eq!(b.dim(), 15);
            assert!(b.offprod.iter().all(|&p| (p - 0.0225).abs() < 1e-17));
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert_eq!(
            build_block(SymmetrySpecies::RawA, Coupling::real(1.0), 1).unwrap_err(),
            Error::TruncationTooSmall(1)
        );
        assert_eq!(
            build_block(SymmetrySpecies::RawA, Coupling::real(f64::NAN), 4).unwrap_err(),
            Error::NonFiniteCoupling
        );
        assert_eq!(
            build_block(SymmetrySpecies::RawA, Coupling::imaginary(f64::INFINITY), 4).unwrap_err(),
            Error::NonFiniteCoupling
        );
    }

    #[test]
    fn ea_and_eb_are_mirror_images() {
        let a = build_block(SymmetrySpecies::EA, Coupling::real(3.7), 9).unwrap();
        let b = build_block(SymmetrySpecies::EB, Coupling::real(3.7), 9).unwrap();
        let mut da = a.diag.clone();
        let mut db = b.diag.clone();
        da.sort_by(f64::total_cmp);
        db.sort_by(f64::total_cmp);
        assert_eq!(da, db);
        assert_eq!(a.offprod, b.offprod);
        let rev: Vec<f64> = b.diag.iter().rev().copied().collect();
        assert_eq!(a.diag, rev);
    }

    #[test]
    fn potential_examples() {
        let c = Coupling::real(2.0);
        assert!((c.potential_value(0.0).re - 2.0).abs() < 1e-15);
        assert!((c.potential_value(PI / 3.0).re + 2.0).abs() < 1e-15);
        assert!((Coupling::real(1.0).potential_value(C3_PERIOD).re - 1.0).abs() < 1e-15);
        let v = Coupling::imaginary(1.5).potential_value(0.0);
        assert_eq!(v, Complex64::new(0.0, 1.5));
    }

    #[test]
    fn offprod_derivative_matches_difference() {
        let b = build_block(SymmetrySpecies::APlus, Coupling::imaginary(2.0), 4).unwrap();
        let h = 1e-6;
        let up = b.with_magnitude(2.0 + h);
        let dn = b.with_magnitude(2.0 - h);
        for ((d, u), l) in b.offprod_derivative().iter().zip(&up.offprod).zip(&dn.offprod) {
            assert!((d - (u - l) / (2.0 * h)).abs() < 1e-8);
        }
    }

    #[test]
    fn species_parse_and_display() {
        for s in SymmetrySpecies::ALL {
            assert_eq!(s.to_string().parse::<SymmetrySpecies>().unwrap(), s);
        }
        assert!("B".parse::<SymmetrySpecies>().is_err());
    }

    #[test]
    fn unperturbed_levels_sorted() {
        assert_eq!(SymmetrySpecies::EA.unperturbed_levels(5), vec![1, 4, 16, 25, 49]);
        assert_eq!(SymmetrySpecies::RawA.unperturbed_levels(5), vec![0, 9, 9, 36, 36]);
        assert_eq!(SymmetrySpecies::AMinus.unperturbed_levels(2), vec![9, 36]);
    }
}
