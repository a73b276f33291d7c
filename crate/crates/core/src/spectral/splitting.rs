use crate::error::{Error, Result};
use crate::rotor::{Coupling, SymmetrySpecies};
use crate::scalar::Real;

use super::solve::solve_spectrum;

/// Tunneling splitting of the `n`-th A doublet,
/// `Δ_n = ε(A+, level n) - ε(A-, level n-1)`.
///
/// The two members live in different parity blocks, so each is a simple
/// root of its own recursion and the difference carries no quasi-degenerate
/// cancellation beyond the final subtraction.
pub fn tunneling_splitting<T: Real>(n: usize, lambda: T, tol: T) -> Result<T> {
    if n == 0 {
        return Err(Error::InvalidSplittingIndex);
    }
    if lambda.is_zero() {
        return Err(Error::ZeroCoupling);
    }
    let c = Coupling::real(lambda);
    let even = solve_spectrum(SymmetrySpecies::APlus, c, n + 1, tol)?;
    let odd = solve_spectrum(SymmetrySpecies::AMinus, c, n, tol)?;
    Ok(even.entries[n].value - odd.entries[n - 1].value)
}
