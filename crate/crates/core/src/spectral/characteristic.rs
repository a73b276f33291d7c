//! Leading-principal-minor recursion of `A - εI` for a tridiagonal block:
//!
//! ```text
//! D₋₁ = 1,  D₀ = d₀ - ε,  D_k = (d_k - ε) D_{k-1} - p_k D_{k-2}
//! ```
//!
//! Equivalently, the Fourier coefficients of a trial solution propagated
//! from one end of the truncated basis; the last minor vanishes exactly at
//! the eigenvalues of the truncated operator. Minors grow like
//! `∏ (d_k - ε)`, so every tracked quantity is rescaled by a common power
//! of ten whenever one of them leaves `[-1, 1]`.

use crate::error::{Error, Result};
use crate::rotor::BlockOperator;
use crate::scalar::{Real, Recursive};

/// Final minor `mantissa · 10^exponent`, with the Sturm count when the
/// block is Hermitian.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CharacteristicValue<T> {
    pub mantissa: T,
    pub exponent: i64,
    /// Eigenvalues strictly below ε (real barrier only).
    pub sign_changes: Option<usize>,
}

impl<T: Real> CharacteristicValue<T> {
    pub fn is_root(&self) -> bool {
        self.mantissa.is_zero()
    }

    /// `-1`, `0` or `1`.
    pub fn sign(&self) -> i8 {
        if self.mantissa > T::zero() {
            1
        } else if self.mantissa < T::zero() {
            -1
        } else {
            0
        }
    }

    /// `log10 |D|`, `-inf` at a root.
    pub fn log10_abs(&self) -> f64 {
        self.mantissa.approx().abs().log10() + self.exponent as f64
    }

    /// Unscaled value; saturates to ±inf when out of `f64` range.
    pub fn value_f64(&self) -> f64 {
        self.mantissa.approx() * 10f64.powf(self.exponent as f64)
    }
}

/// Rescale `vals` in place when the largest exceeds 1; returns the power of
/// ten removed.
#[inline]
fn rescale<F: Recursive>(vals: &mut [F]) -> i64 {
    let m = vals.iter().fold(0.0f64, |acc, v| acc.max(v.magnitude()));
    if m <= 1.0 || !m.is_finite() {
        return 0;
    }
    let e = m.log10().ceil() as i32;
    let factor = F::Re::pow10(-e);
    for v in vals.iter_mut() {
        *v = v.scale(factor);
    }
    e as i64
}

/// Evaluates the characteristic value of `block` at `eps`.
pub fn characteristic<T: Real>(block: &BlockOperator<T>, eps: T) -> CharacteristicValue<T> {
    let sturm = sturm_pass(block, eps);
    CharacteristicValue {
        mantissa: sturm.value,
        exponent: sturm.exponent,
        sign_changes: block.coupling.is_real().then_some(sturm.count),
    }
}

/// Number of eigenvalues of the truncated block strictly below `eps`.
pub fn count_below<T: Real>(block: &BlockOperator<T>, eps: T) -> Result<usize> {
    if !block.coupling.is_real() {
        return Err(Error::RealBarrierRequired("count_below"));
    }
    Ok(sturm_pass(block, eps).count)
}

/// One pass of the recursion: final minor, its ε-derivative and the number
/// of sign changes along the minor sequence.
#[derive(Clone, Copy, Debug)]
pub(crate) struct SturmPass<T> {
    pub value: T,
    pub slope: T,
    pub exponent: i64,
    pub count: usize,
}

impl<T: Real> SturmPass<T> {
    /// Newton correction `D / D'`.
    pub fn step(&self) -> T {
        self.value / self.slope
    }
}

pub(crate) fn sturm_pass<T: Real>(block: &BlockOperator<T>, eps: T) -> SturmPass<T> {
    let d = &block.diag;
    let p = &block.offprod;
    // [D_{k-2}, D_{k-1}, D'_{k-2}, D'_{k-1}]
    let mut s = [T::one(), d[0] - eps, T::zero(), -T::one()];
    let mut exponent = rescale(&mut s);
    // A zero minor takes the sign of its predecessor: the count is then the
    // limit from below, i.e. strictly-below semantics.
    let mut prev_sign = 1i8;
    let mut count = 0usize;
    let mut track = |v: T, prev: &mut i8| {
        let sg = if v > T::zero() {
            1
        } else if v < T::zero() {
            -1
        } else {
            *prev
        };
        if sg != *prev {
            count += 1;
        }
        *prev = sg;
    };
    track(s[1], &mut prev_sign);
    for k in 1..d.len() {
        let a = d[k] - eps;
        let pk = p[k - 1];
        let dk = a * s[1] - pk * s[0];
        let dpk = -s[1] + a * s[3] - pk * s[2];
        s = [s[1], dk, s[3], dpk];
        exponent += rescale(&mut s);
        track(s[1], &mut prev_sign);
    }
    SturmPass { value: s[1], slope: s[3], exponent, count }
}

/// Final minor and its ε-derivative over a real or complex argument.
pub(crate) fn value_and_slope<F: Recursive>(block: &BlockOperator<F::Re>, eps: F) -> (F, F, i64) {
    let d = &block.diag;
    let p = &block.offprod;
    let mut s = [F::one(), F::from_re(d[0]) - eps, F::zero(), -F::one()];
    let mut exponent = rescale(&mut s);
    for k in 1..d.len() {
        let a = F::from_re(d[k]) - eps;
        let pk = F::from_re(p[k - 1]);
        let dk = a * s[1] - pk * s[0];
        let dpk = -s[1] + a * s[3] - pk * s[2];
        s = [s[1], dk, s[3], dpk];
        exponent += rescale(&mut s);
    }
    (s[1], s[3], exponent)
}

/// `D` and the derivatives entering the coalescence system
/// `D = ∂D/∂ε = 0`, all carrying the same power-of-ten scale.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoalescenceJet<T> {
    pub d: T,
    pub d_e: T,
    pub d_ee: T,
    pub d_g: T,
    pub d_eg: T,
    pub exponent: i64,
}

/// Simultaneous recursions for `D`, `∂D/∂ε`, `∂²D/∂ε²`, `∂D/∂g` and
/// `∂²D/∂ε∂g`, where `g` is the coupling magnitude of `block`.
pub fn coalescence_jet<T: Real>(block: &BlockOperator<T>, eps: T) -> CoalescenceJet<T> {
    let d = &block.diag;
    let p = &block.offprod;
    let dp = block.offprod_derivative();
    // prev2/prev1 for each of D, De, Dee, Dg, Deg.
    let z = T::zero();
    let mut s = [
        T::one(),
        d[0] - eps,
        z,
        -T::one(),
        z,
        z,
        z,
        z,
        z,
        z,
    ];
    let mut exponent = rescale(&mut s);
    for k in 1..d.len() {
        let a = d[k] - eps;
        let pk = p[k - 1];
        let qk = dp[k - 1];
        let [d2, d1, e2, e1, ee2, ee1, g2, g1, eg2, eg1] = s;
        let dn = a * d1 - pk * d2;
        let en = -d1 + a * e1 - pk * e2;
        let een = -(e1 + e1) + a * ee1 - pk * ee2;
        let gn = a * g1 - qk * d2 - pk * g2;
        let egn = -g1 + a * eg1 - qk * e2 - pk * eg2;
        s = [d1, dn, e1, en, ee1, een, g1, gn, eg1, egn];
        exponent += rescale(&mut s);
    }
    CoalescenceJet { d: s[1], d_e: s[3], d_ee: s[5], d_g: s[7], d_eg: s[9], exponent }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rotor::{build_block, Coupling, SymmetrySpecies};
    use crate::scalar::DoubleDouble;
    use num_complex::Complex64;

    /// Determinant of `A - εI` by Gaussian elimination on the dense matrix.
    fn dense_det(block: &BlockOperator<f64>, eps: f64) -> f64 {
        let n = block.dim();
        let off: Vec<f64> = block.offprod.iter().map(|p| p.sqrt()).collect();
        let mut a = vec![vec![0.0; n]; n];
        for i in 0..n {
            a[i][i] = block.diag[i] - eps;
            if i + 1 < n {
                a[i][i + 1] = off[i];
                a[i + 1][i] = off[i];
            }
        }
        let mut det = 1.0;
        for c in 0..n {
            let piv = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
            if piv != c {
                a.swap(piv, c);
                det = -det;
            }
            det *= a[c][c];
            for r in c + 1..n {
                let f = a[r][c] / a[c][c];
                for k in c..n {
                    a[r][k] -= f * a[c][k];
                }
            }
        }
        det
    }

    #[test]
    fn matches_dense_determinant() {
        let b = build_block(SymmetrySpecies::RawA, Coupling::real(1.3), 3).unwrap();
        for &e in &[-2.0, 0.5, 8.7, 20.0, 50.0] {
            let cv = characteristic(&b, e);
            let want = dense_det(&b, e);
            assert!((cv.value_f64() - want).abs() <= 1e-9 * want.abs(), "{e}: {} vs {want}", cv.value_f64());
        }
    }

    #[test]
    fn zero_coupling_hits_diagonal_exactly() {
        for s in SymmetrySpecies::ALL {
            let b = build_block(s, Coupling::real(0.0), 5).unwrap();
            for &dj in &b.diag {
                assert!(characteristic(&b, dj).is_root());
            }
        }
    }

    #[test]
    fn mantissa_stays_bounded_at_large_truncation() {
        let b = build_block(SymmetrySpecies::RawA, Coupling::real(3.0), 200).unwrap();
        let cv = characteristic(&b, -1000.0);
        assert!(cv.mantissa.abs() <= 1.0);
        assert!(cv.exponent > 300, "minor should exceed f64 range, exponent {}", cv.exponent);
        assert!(cv.value_f64().is_infinite());
    }

    #[test]
    fn aplus_ground_state_bracket() {
        // Dense diagonalization puts the λ = 1 ground state at -0.0552588496,
        // the next level at 9.046.
        let b = build_block(SymmetrySpecies::APlus, Coupling::real(1.0), 6).unwrap();
        assert_eq!(characteristic(&b, -0.056).sign_changes, Some(0));
        assert_eq!(characteristic(&b, -0.055).sign_changes, Some(1));
        assert_eq!(characteristic(&b, 0.1).sign_changes, Some(1));
        assert_eq!(characteristic(&b, 9.1).sign_changes, Some(2));
    }

    #[test]
    fn counts() {
        let ap = build_block(SymmetrySpecies::APlus, Coupling::real(0.0), 5).unwrap();
        assert_eq!(count_below(&ap, 10.0).unwrap(), 2);
        let am = build_block(SymmetrySpecies::AMinus, Coupling::real(0.0), 5).unwrap();
        assert_eq!(count_below(&am, 9.0).unwrap(), 0);
        assert_eq!(count_below(&am, 9.0 + 1e-12).unwrap(), 1);
        let raw = build_block(SymmetrySpecies::RawA, Coupling::real(0.1), 10).unwrap();
        assert_eq!(count_below(&raw, 9.0001).unwrap(), 2);
        let st = build_block(SymmetrySpecies::EA, Coupling::imaginary(1.0), 5).unwrap();
        assert!(count_below(&st, 1.0).is_err());
        assert_eq!(characteristic(&st, 1.0).sign_changes, None);
    }

    #[test]
    fn published_root_is_a_near_zero() {
        let raw = build_block(SymmetrySpecies::RawA, Coupling::real(0.1), 10).unwrap();
        let (v, dv, _) = value_and_slope(&raw, 8.99990740760586);
        // Distance to the root in energy units.
        assert!((v / dv).abs() < 1e-13);
    }

    #[test]
    fn slope_matches_finite_difference() {
        let b = build_block(SymmetrySpecies::EA, Coupling::real(2.0), 6).unwrap();
        let e = 3.3;
        let (v, dv, ex) = value_and_slope(&b, e);
        let h = 1e-5;
        let (vp, _, exp_p) = value_and_slope(&b, e + h);
        let (vm, _, exp_m) = value_and_slope(&b, e - h);
        let scale = |x: f64, ex2: i64| x * 10f64.powi((ex2 - ex) as i32);
        let fd = (scale(vp, exp_p) - scale(vm, exp_m)) / (2.0 * h);
        assert!((fd - dv).abs() < 1e-6 * dv.abs().max(v.abs()));
    }

    #[test]
    fn complex_argument_agrees_on_real_axis() {
        let b = build_block(SymmetrySpecies::APlus, Coupling::imaginary(2.5), 8).unwrap();
        let (vr, dr, er) = value_and_slope(&b, 4.2);
        let (vc, dc, ec) = value_and_slope(&b, Complex64::new(4.2, 0.0));
        assert_eq!(er, ec);
        assert_eq!(vc, Complex64::new(vr, 0.0));
        assert_eq!(dc, Complex64::new(dr, 0.0));
    }

    #[test]
    fn jet_derivatives_match_differences() {
        let g = 2.2;
        let b = build_block(SymmetrySpecies::EA, Coupling::imaginary(g), 6).unwrap();
        let e = 2.1;
        let jet = coalescence_jet(&b, e);
        let unscale = |j: &CoalescenceJet<f64>, x: f64| x * 10f64.powi((j.exponent - jet.exponent) as i32);
        let h = 1e-5;
        let gp = coalescence_jet(&b.with_magnitude(g + h), e);
        let gm = coalescence_jet(&b.with_magnitude(g - h), e);
        let fd_g = (unscale(&gp, gp.d) - unscale(&gm, gm.d)) / (2.0 * h);
        let fd_eg = (unscale(&gp, gp.d_e) - unscale(&gm, gm.d_e)) / (2.0 * h);
        let ep = coalescence_jet(&b, e + h);
        let em = coalescence_jet(&b, e - h);
        let fd_ee = (unscale(&ep, ep.d_e) - unscale(&em, em.d_e)) / (2.0 * h);
        let tol = 1e-6 * jet.d.abs().max(jet.d_e.abs()).max(jet.d_ee.abs());
        assert!((fd_g - jet.d_g).abs() < tol);
        assert!((fd_eg - jet.d_eg).abs() < tol);
        assert!((fd_ee - jet.d_ee).abs() < tol);
    }

    #[test]
    fn extended_field_runs_the_same_recursion() {
        let lam: DoubleDouble = "0.1".parse().unwrap();
        let b = build_block(SymmetrySpecies::RawA, Coupling::real(lam), 10).unwrap();
        let e: DoubleDouble = "9.0001".parse().unwrap();
        assert_eq!(count_below(&b, e).unwrap(), 2);
    }
}
