//! Rayleigh–Schrödinger series of the symmetry blocks in powers of the
//! barrier, and the large-barrier harmonic limit.
//!
//! Each parity or E block is nondegenerate at zero coupling, so plain
//! nondegenerate perturbation theory applies. The recursion runs over any
//! field; with [`BigRational`] the coefficients are exact.

use std::fmt;
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed, Zero};

use crate::error::{Error, Result};
use crate::rotor::{Coupling, SymmetrySpecies};
use crate::scalar::Real;

/// Largest supported order in the barrier.
pub const MAX_ORDER: usize = 40;

/// Energy corrections `E⁽⁰⁾ … E⁽ᵒʳᵈᵉʳ⁾` of the basis state `index` for
/// `H = diag + λ V`, where `V` is tridiagonal with `upper[i] = V[i][i+1]`
/// and `lower[i] = V[i+1][i]`.
///
/// Intermediate normalization: `⟨index|ψ⁽ᵏ⁾⟩ = 0` for `k ≥ 1`, so that
/// `E⁽ᵏ⁾ = (V ψ⁽ᵏ⁻¹⁾)[index]` and
/// `ψ⁽ᵏ⁾ = R (V ψ⁽ᵏ⁻¹⁾ - Σⱼ E⁽ʲ⁾ ψ⁽ᵏ⁻ʲ⁾)` with the reduced resolvent
/// `R = Σ_{m≠index} |m⟩⟨m| / (E⁽⁰⁾ - d_m)`. Only products
/// `upper[i]·lower[i]` reach the energies, so a non-symmetric split of a
/// symmetric coupling is fine.
pub fn rs_coefficients<F>(diag: &[i64], upper: &[F], lower: &[F], index: usize, order: usize) -> Vec<F>
where
    F: Clone + Num + Neg<Output = F> + FromPrimitive,
{
    let m = diag.len();
    assert!(index < m, "state index outside the basis");
    assert!(upper.len() + 1 == m && lower.len() + 1 == m, "coupling length mismatch");
    let d0 = diag[index];
    let denom: Vec<Option<F>> = diag
        .iter()
        .map(|&d| (d != d0).then(|| F::from_i64(d0 - d).expect("integer fits the field")))
        .collect();
    if denom.iter().enumerate().any(|(i, x)| i != index && x.is_none()) {
        panic!("unperturbed level {d0} is degenerate within the block");
    }

    let apply_v = |v: &[F]| -> Vec<F> {
        (0..m)
            .map(|i| {
                let mut acc = F::zero();
                if i + 1 < m {
                    acc = acc + upper[i].clone() * v[i + 1].clone();
                }
                if i > 0 {
                    acc = acc + lower[i - 1].clone() * v[i - 1].clone();
                }
                acc
            })
            .collect()
    };

    let mut energies = vec![F::from_i64(d0).expect("integer fits the field")];
    let mut psi: Vec<Vec<F>> = vec![(0..m).map(|i| if i == index { F::one() } else { F::zero() }).collect()];
    for k in 1..=order {
        let mut rhs = apply_v(&psi[k - 1]);
        energies.push(rhs[index].clone());
        for j in 1..=k {
            if energies[j].is_zero() {
                continue;
            }
            for (r, p) in rhs.iter_mut().zip(&psi[k - j]) {
                *r = r.clone() - energies[j].clone() * p.clone();
            }
        }
        let next = rhs
            .into_iter()
            .zip(&denom)
            .map(|(r, dn)| match dn {
                Some(dn) => r / dn.clone(),
                None => F::zero(),
            })
            .collect();
        psi.push(next);
    }
    energies
}

/// Exact even-order coefficients `[ε⁽⁰⁾, ε⁽²⁾, ε⁽⁴⁾, …]` of one level.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalSeries {
    pub species: SymmetrySpecies,
    pub level: usize,
    pub coeffs: Vec<BigRational>,
    /// Highest power of λ included.
    pub order: usize,
}

impl RationalSeries {
    /// `"num/den"` strings (bare integers when the denominator is 1).
    pub fn coefficient_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(|c| c.to_string()).collect()
    }

    /// Coefficient of `λ^power`; zero for odd powers.
    pub fn coefficient(&self, power: usize) -> Option<BigRational> {
        if power > self.order {
            None
        } else if power % 2 == 1 {
            Some(BigRational::zero())
        } else {
            Some(self.coeffs[power / 2].clone())
        }
    }
}

impl fmt::Display for RationalSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.coefficient_strings().join(", "))
    }
}

/// Internal truncation that makes order `max_order` exact for `level`.
pub fn series_truncation(level: usize, max_order: usize) -> usize {
    level + max_order / 2 + 2
}

/// Basis index and diagonal of `level` in `species` at truncation `n`.
fn locate_level(species: SymmetrySpecies, level: usize, n: usize) -> (usize, Vec<i64>) {
    let diag = species.diagonal(n);
    let index = if species.is_two_sided() {
        let mut order: Vec<usize> = (0..diag.len()).collect();
        order.sort_by_key(|&i| diag[i]);
        order[level]
    } else {
        level
    };
    (index, diag)
}

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Off-diagonal split `upper = 1/2`, `lower = 2 w_k` reproducing the
/// products `w_k` of the block.
fn split_weights<F>(species: SymmetrySpecies, n: usize, mk: impl Fn(i64, i64) -> F) -> (Vec<F>, Vec<F>) {
    species
        .coupling_weights(n)
        .into_iter()
        .map(|(a, b)| (mk(1, 2), mk(2 * a, b)))
        .unzip()
}

/// Rayleigh–Schrödinger series of `level` (ascending within the block) to
/// `λ^max_order`, in exact rational arithmetic.
pub fn rs_series(species: SymmetrySpecies, level: usize, max_order: usize) -> Result<RationalSeries> {
    if species == SymmetrySpecies::RawA {
        return Err(Error::DegenerateSpecies(species));
    }
    if max_order % 2 == 1 {
        return Err(Error::OddOrder(max_order));
    }
    if max_order > MAX_ORDER {
        return Err(Error::OrderTooLarge(max_order));
    }
    let n = series_truncation(level, max_order);
    let (index, diag) = locate_level(species, level, n);
    let (upper, lower) = split_weights(species, n, ratio);
    let all = rs_coefficients(&diag, &upper, &lower, index, max_order);
    for (k, c) in all.iter().enumerate() {
        assert!(k % 2 == 0 || c.is_zero(), "odd-order correction {k} is nonzero: {c}");
    }
    let coeffs = all.into_iter().step_by(2).collect();
    Ok(RationalSeries { species, level, coeffs, order: max_order })
}

/// Floating-point version of [`rs_series`] over any [`Real`] field.
pub fn rs_series_in<T: Real>(species: SymmetrySpecies, level: usize, max_order: usize) -> Result<Vec<T>> {
    if species == SymmetrySpecies::RawA {
        return Err(Error::DegenerateSpecies(species));
    }
    if max_order % 2 == 1 {
        return Err(Error::OddOrder(max_order));
    }
    let n = series_truncation(level, max_order);
    let (index, diag) = locate_level(species, level, n);
    let (upper, lower) = split_weights(species, n, |a, b| T::of_int(a) / T::of_int(b));
    Ok(rs_coefficients(&diag, &upper, &lower, index, max_order).into_iter().step_by(2).collect())
}

/// Nearest value of an exact rational in the field `T`.
pub fn rational_to<T: Real>(q: &BigRational) -> T {
    let parse = |b: &BigInt| T::parse_decimal(&b.to_string()).expect("integer literal parses");
    let sign = if q.is_negative() { -T::one() } else { T::one() };
    sign * parse(&q.numer().abs()) / parse(q.denom())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesValue<T> {
    pub value: T,
    /// Highest-order term included; a rough truncation-error estimate.
    pub last_term: T,
}

/// Sums the series at `coupling`. Only even powers appear, so the sum is
/// real for the imaginary barrier too (`λ² → -g²`).
pub fn evaluate_series<T: Real>(series: &RationalSeries, coupling: &Coupling<T>) -> SeriesValue<T> {
    let x = coupling.strength_squared();
    let mut power = T::one();
    let mut value = T::zero();
    let mut last_term = T::zero();
    for c in &series.coeffs {
        last_term = rational_to::<T>(c) * power;
        value += last_term;
        power *= x;
    }
    SeriesValue { value, last_term }
}

/// Harmonic-well limit `-λ + 3 √(λ/2) (2v + 1)` of level `v` for a large
/// barrier. The `O(1)` anharmonic remainder is not included.
pub fn asymptotic_energy<T: Real>(v: usize, lambda: T) -> Result<T> {
    if !(lambda > T::zero()) || !lambda.is_finite() {
        return Err(Error::NonPositiveBarrier(lambda.approx()));
    }
    let two = T::of_int(2);
    let quanta = T::of_usize(2 * v + 1);
    Ok(-lambda + T::of_int(3) * (lambda / two).sqrt() * quanta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::DoubleDouble;

    fn strs(s: &RationalSeries) -> Vec<String> {
        s.coefficient_strings()
    }

    #[test]
    fn ground_a_state_series() {
        let s = rs_series(SymmetrySpecies::APlus, 0, 6).unwrap();
        assert_eq!(strs(&s), ["0", "-1/18", "7/23328", "-29/8503056"]);
        assert_eq!(s.to_string(), "0, -1/18, 7/23328, -29/8503056");
    }

    #[test]
    fn ground_e_state_series() {
        let s = rs_series(SymmetrySpecies::EA, 0, 6).unwrap();
        assert_eq!(strs(&s), ["1", "-1/10", "83/32000", "-4581/30800000"]);
        assert_eq!(rs_series(SymmetrySpecies::EB, 0, 6).unwrap().coeffs, s.coeffs);
    }

    #[test]
    fn third_doublet_agrees_through_fourth_order() {
        let odd = rs_series(SymmetrySpecies::AMinus, 2, 4).unwrap();
        let even = rs_series(SymmetrySpecies::APlus, 3, 4).unwrap();
        assert_eq!(strs(&odd), ["81", "1/630", "187/8001504000"]);
        assert_eq!(odd.coeffs, even.coeffs);
        let odd6 = rs_series(SymmetrySpecies::AMinus, 2, 6).unwrap();
        let even6 = rs_series(SymmetrySpecies::APlus, 3, 6).unwrap();
        assert_eq!(odd6.coeffs[3].to_string(), "-5861633/342986069260800000");
        assert_eq!(even6.coeffs[3].to_string(), "6743617/342986069260800000");
    }

    #[test]
    fn truncation_margin_does_not_change_coefficients() {
        for species in [SymmetrySpecies::APlus, SymmetrySpecies::AMinus, SymmetrySpecies::EA] {
            let s = rs_series(species, 2, 10).unwrap();
            let n = series_truncation(2, 10) + 6;
            let (index, diag) = locate_level(species, 2, n);
            let (u, l) = split_weights(species, n, ratio);
            let wide: Vec<BigRational> = rs_coefficients(&diag, &u, &l, index, 10).into_iter().step_by(2).collect();
            assert_eq!(s.coeffs, wide);
        }
    }

    #[test]
    fn float_series_tracks_rational() {
        let exact = rs_series(SymmetrySpecies::EA, 3, 12).unwrap();
        let approx = rs_series_in::<f64>(SymmetrySpecies::EA, 3, 12).unwrap();
        for (q, x) in exact.coeffs.iter().zip(&approx) {
            let qf: f64 = rational_to(q);
            assert!((qf - x).abs() <= 1e-14 * qf.abs().max(1e-300));
        }
    }

    #[test]
    fn rejects_bad_requests() {
        assert_eq!(
            rs_series(SymmetrySpecies::RawA, 0, 4).unwrap_err(),
            Error::DegenerateSpecies(SymmetrySpecies::RawA)
        );
        assert_eq!(rs_series(SymmetrySpecies::APlus, 0, 5).unwrap_err(), Error::OddOrder(5));
        assert_eq!(rs_series(SymmetrySpecies::APlus, 0, 42).unwrap_err(), Error::OrderTooLarge(42));
    }

    #[test]
    fn order_zero_is_the_unperturbed_level() {
        assert_eq!(strs(&rs_series(SymmetrySpecies::AMinus, 0, 0).unwrap()), ["9"]);
        assert_eq!(strs(&rs_series(SymmetrySpecies::EA, 4, 2).unwrap()), ["49", "1/374"]);
    }

    #[test]
    fn evaluation_at_real_and_imaginary_coupling() {
        let s = rs_series(SymmetrySpecies::APlus, 0, 6).unwrap();
        let v = evaluate_series(&s, &Coupling::real(0.1));
        // -1e-2/18 + 7e-4/23328 - 29e-6/8503056
        let want = -0.01 / 18.0 + 7e-4 / 23328.0 - 29e-6 / 8503056.0;
        assert!((v.value - want).abs() < 1e-18);
        assert!((v.value + 5.555255521073835e-4).abs() < 1e-15);
        assert_eq!(evaluate_series(&s, &Coupling::real(0.0)).value, 0.0);

        let e = rs_series(SymmetrySpecies::EA, 0, 6).unwrap();
        let st = evaluate_series(&e, &Coupling::imaginary(1.0));
        let want = 1.0 + 0.1 + 83.0 / 32000.0 + 4581.0 / 30800000.0;
        assert!((st.value - want).abs() < 1e-15);
        assert!((st.last_term - 4581.0 / 30800000.0).abs() < 1e-18);
    }

    #[test]
    fn rational_conversion_in_extended_field() {
        let q = BigRational::new(BigInt::from(-5_861_633), BigInt::from(342_986_069_260_800_000i64));
        let x: DoubleDouble = rational_to(&q);
        let back = x * <DoubleDouble as Real>::of_int(342_986_069_260_800_000);
        assert!((back + DoubleDouble::from_f64(5_861_633.0)).abs().approx() < 1e-22);
    }

    #[test]
    fn asymptotic_examples() {
        assert_eq!(asymptotic_energy(0, 50.0).unwrap(), -35.0);
        let a0 = asymptotic_energy(0, 1e4).unwrap();
        assert!((a0 - (-1e4 + 3.0 * 5000f64.sqrt())).abs() < 1e-9);
        // Two quanta apart: 3 √5000 · (5 - 1).
        let gap = asymptotic_energy(2, 1e4).unwrap() - a0;
        assert!((gap - 12.0 * 5000f64.sqrt()).abs() < 1e-9);
        assert!(asymptotic_energy(0, 0.0).is_err());
        assert!(asymptotic_energy(0, -1.0).is_err());
    }
}
