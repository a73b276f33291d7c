//! Space-time-symmetric rotor `-d²/dφ² + i g cos 3φ`.
//!
//! With an imaginary barrier the off-diagonal products are `-g²/4`
//! (`-g²/2` for the first `A+` link), so the characteristic value stays a
//! real polynomial in ε and the unbroken phase is handled in real
//! arithmetic. Sturm counting does not apply; real roots are located by a
//! sign scan with extra refinement at local minima of `|D|`, where a
//! nearly coalesced pair hides between two samples.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::rotor::{build_block, BlockOperator, Coupling, SymmetrySpecies};
use crate::scalar::Real;
use crate::spectral::{
    characteristic, coalescence_jet, initial_truncation, safeguarded_newton, value_and_slope, Probe, Spectrum,
};

const TRUNCATION_STEP: usize = 10;
const TRUNCATION_CAP: usize = 2000;
const MAX_ITERATIONS: usize = 500;

fn sign_of<T: Real>(x: T) -> i8 {
    if x > T::zero() {
        1
    } else if x < T::zero() {
        -1
    } else {
        0
    }
}

/// Scan window and initial grid spacing for the `k` lowest levels.
fn scan_window<T: Real>(species: SymmetrySpecies, g: T, k: usize) -> (T, T, T) {
    let top = species.unperturbed_levels(k)[k - 1];
    let mut distinct = species.unperturbed_levels(2 * k + 2);
    distinct.dedup();
    let next = distinct.iter().copied().find(|&d| d > top).unwrap_or(top + 1);
    let min_gap = distinct
        .windows(2)
        .take_while(|w| w[0] <= top)
        .map(|w| w[1] - w[0])
        .min()
        .unwrap_or(1)
        .min(1);
    let lo = T::of_int(distinct[0] - 1) - (g + g).abs();
    let hi = T::of_int(top + next) / T::of_int(2);
    (lo, hi, T::of_int(min_gap) / T::of_int(8))
}

/// Extremum of `D` inside `[a, b]`, located by bisection on the sign of `D'`.
fn extremum<T: Real>(block: &BlockOperator<T>, mut a: T, mut b: T) -> Result<T> {
    let two = T::of_int(2);
    let slope_sign = |x: T| sign_of(value_and_slope::<T>(block, x).1);
    let sa = slope_sign(a);
    for _ in 0..MAX_ITERATIONS {
        let floor = T::of_int(4) * T::epsilon() * a.abs().max(b.abs()).max(T::one());
        let mid = (a + b) / two;
        if b - a <= floor {
            return Ok(mid);
        }
        let sm = slope_sign(mid);
        if sm == 0 {
            return Ok(mid);
        }
        if sm == sa {
            a = mid;
        } else {
            b = mid;
        }
    }
    Err(Error::ScanExhausted)
}

/// Newton-polished root inside a sign-change bracket.
fn polish<T: Real>(block: &BlockOperator<T>, lo: T, hi: T) -> Result<(T, T)> {
    let s_lo = sign_of(characteristic(block, lo).mantissa);
    safeguarded_newton(lo, hi, MAX_ITERATIONS, |x| {
        let (d, dp, _) = value_and_slope::<T>(block, x);
        let s = sign_of(d);
        let below = if s == 0 { None } else { Some(s == s_lo) };
        Probe { below, step: d / dp }
    })
}

/// All real roots of the block inside `[lo, hi]`, ascending.
fn real_roots_in<T: Real>(block: &BlockOperator<T>, lo: T, hi: T, h: T) -> Result<Vec<(T, T)>> {
    // Offset the grid so it does not land on the integer unperturbed levels.
    let start = lo + h * T::cast(0.371);
    let samples = ((hi - start) / h).approx().ceil().max(1.0) as usize + 1;
    let xs: Vec<T> = (0..samples).map(|i| start + h * T::of_usize(i)).collect();
    let vals: Vec<_> = xs.iter().map(|&x| characteristic(block, x)).collect();
    let mut roots = Vec::new();
    for i in 0..samples {
        let (x, v) = (xs[i], vals[i]);
        if v.is_root() {
            roots.push((x, T::zero()));
            continue;
        }
        if i + 1 < samples {
            let w = vals[i + 1];
            if !w.is_root() && v.sign() != w.sign() {
                roots.push(polish(block, x, xs[i + 1])?);
            }
        }
        if i > 0 && i + 1 < samples {
            let (u, w) = (vals[i - 1], vals[i + 1]);
            let same = u.sign() == v.sign() && v.sign() == w.sign();
            if same && v.log10_abs() < u.log10_abs() && v.log10_abs() < w.log10_abs() {
                // |D| dips without crossing: a close pair may straddle the dip.
                let m = extremum(block, xs[i - 1], xs[i + 1])?;
                let dm = characteristic(block, m);
                if dm.is_root() {
                    let floor = T::of_int(4) * T::epsilon() * m.abs().max(T::one());
                    roots.push((m, floor));
                    roots.push((m, floor));
                } else if dm.sign() != v.sign() {
                    roots.push(polish(block, xs[i - 1], m)?);
                    roots.push(polish(block, m, xs[i + 1])?);
                }
            }
        }
    }
    roots.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    Ok(roots)
}

fn roots_at<T: Real>(species: SymmetrySpecies, g: T, k: usize, n: usize) -> Result<Vec<(T, T)>> {
    let block = build_block(species, Coupling::imaginary(g), n)?;
    let (lo, hi, h) = scan_window(species, g, k);
    let mut roots = real_roots_in(&block, lo, hi, h)?;
    roots.truncate(k);
    Ok(roots)
}

/// Real eigenvalues among the `k` lowest levels of `species` at imaginary
/// barrier `i g`. Fewer than `k` entries means some of those levels have
/// turned into complex-conjugate pairs.
pub fn real_spectrum_st<T: Real>(species: SymmetrySpecies, g: T, k: usize, tol: T) -> Result<Spectrum<T>> {
    if k == 0 {
        return Err(Error::NoLevels);
    }
    if !(tol > T::zero()) || !tol.is_finite() {
        return Err(Error::InvalidTolerance);
    }
    if !g.is_finite() {
        return Err(Error::NonFiniteCoupling);
    }
    let mut n = initial_truncation(&Coupling::imaginary(g), k).max(2);
    if g.is_zero() {
        let roots = species.unperturbed_levels(k).into_iter().map(|d| (T::of_int(d), T::zero()));
        return Ok(Spectrum::from_values(species, n, roots));
    }
    let mut current = roots_at(species, g, k, n)?;
    loop {
        let next_n = n + TRUNCATION_STEP;
        if next_n > TRUNCATION_CAP {
            return Err(Error::TruncationCap { cap: TRUNCATION_CAP });
        }
        let next = roots_at(species, g, k, next_n)?;
        let stable = current.len() == next.len()
            && current.iter().zip(&next).all(|(a, b)| {
                let noise = T::of_int(64) * T::epsilon() * a.0.abs().max(T::one());
                (a.0 - b.0).abs() < (tol / T::of_int(10)).max(noise)
            });
        if stable {
            if current.iter().any(|r| r.1 > tol) {
                return Err(Error::NoConvergence { what: "eigenvalue tolerance", iterations: MAX_ITERATIONS });
            }
            return Ok(Spectrum::from_values(species, n, current));
        }
        n = next_n;
        current = next;
    }
}

/// Starting guess for [`find_exceptional_point`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpSeed {
    pub species: SymmetrySpecies,
    pub g: f64,
    pub eps: f64,
    pub pair: (usize, usize),
}

/// Index `j` such that removing `prev[j]` and `prev[j + 1]` best explains
/// `cur`.
fn vanished_pair(prev: &[f64], cur: &[f64]) -> usize {
    (0..prev.len() - 1)
        .min_by(|&a, &b| {
            let cost = |j: usize| -> f64 {
                prev.iter()
                    .enumerate()
                    .filter(|(i, _)| *i != j && *i != j + 1)
                    .zip(cur)
                    .map(|((_, p), c)| (p - c).abs())
                    .sum()
            };
            cost(a).total_cmp(&cost(b))
        })
        .unwrap_or(0)
}

/// Sweeps `g` over `range` tracking the `k` lowest real roots, and returns
/// a seed for every adjacent pair that disappears between samples or whose
/// gap passes through an interior local minimum.
///
/// Roots keep the level labels they carry at the start of the range, so
/// pairs are reported by their unperturbed ordering even after lower
/// pairs have left the real axis.
pub fn ep_scan(species: SymmetrySpecies, range: (f64, f64), step: f64, k: usize) -> Result<Vec<EpSeed>> {
    let (a, b) = range;
    if !(a >= 0.0 && b <= 100.0 && a < b) || !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidScanRange(a, b));
    }
    if k < 2 {
        return Err(Error::NoLevels);
    }
    let steps = ((b - a) / step).round().max(1.0) as usize;
    let mut seeds = Vec::new();
    // (g, roots, labels) of the last two samples.
    let mut history: Vec<(f64, Vec<f64>, Vec<usize>)> = Vec::new();
    for i in 0..=steps {
        let g = (a + step * i as f64).min(b);
        let roots = real_spectrum_st(species, g, k, 1e-10)?.values();
        let labels = match history.last() {
            None => (0..roots.len()).collect(),
            Some((gp, prev, prev_labels)) => {
                let mut labels = prev_labels.clone();
                let mut prev = prev.clone();
                while roots.len() + 2 <= prev.len() {
                    let j = vanished_pair(&prev, &roots);
                    seeds.push(EpSeed {
                        species,
                        g: 0.5 * (gp + g),
                        eps: 0.5 * (prev[j] + prev[j + 1]),
                        pair: (labels[j], labels[j + 1]),
                    });
                    prev.drain(j..j + 2);
                    labels.drain(j..j + 2);
                }
                let mut next = labels.iter().max().map_or(0, |m| m + 1);
                while labels.len() < roots.len() {
                    labels.push(next);
                    next += 1;
                }
                labels.truncate(roots.len());
                labels
            }
        };
        if let [.., (_, r0, l0), (g1, r1, l1)] = history.as_slice() {
            if l0 == l1 && *l1 == labels {
                for j in 0..roots.len().saturating_sub(1) {
                    let gap = |r: &[f64]| r[j + 1] - r[j];
                    if gap(r1) < gap(r0) && gap(r1) < gap(&roots) && gap(r1) > 0.0 {
                        seeds.push(EpSeed {
                            species,
                            g: *g1,
                            eps: 0.5 * (r1[j] + r1[j + 1]),
                            pair: (labels[j], labels[j + 1]),
                        });
                    }
                }
            }
        }
        history.push((g, roots, labels));
        if history.len() > 2 {
            history.remove(0);
        }
    }
    Ok(seeds)
}

/// Point `(g_e, ε_e)` where two real levels of the block coalesce.
#[derive(Clone, Debug, PartialEq)]
pub struct ExceptionalPoint<T> {
    pub species: SymmetrySpecies,
    pub pair: (usize, usize),
    pub g_e: T,
    pub eps_e: T,
    /// `|D / D_εε|` at the solution.
    pub residual_d: T,
    /// `|D_ε / D_εε|` at the solution.
    pub residual_dd: T,
    pub precision_digits: u32,
    pub truncation: usize,
}

/// Newton on `D = D_ε = 0` at fixed truncation.
fn coalesce_at<T: Real>(block: &BlockOperator<T>, mut g: T, mut eps: T, digits: u32) -> Result<(T, T)> {
    let target = T::pow10(-(digits as i32)).max(T::of_int(64) * T::epsilon());
    let g0 = g;
    for _ in 0..100 {
        let j = coalescence_jet(&block.with_magnitude(g), eps);
        let det = j.d_e * j.d_eg - j.d_g * j.d_ee;
        let scale = (j.d_e * j.d_eg).abs().max((j.d_g * j.d_ee).abs());
        if det.is_zero() || det.abs() <= T::of_int(16) * T::epsilon() * scale {
            return Err(Error::SingularJacobian);
        }
        // [D_ε D_g; D_εε D_εg] (dε, dg) = (D, D_ε)
        let de = (j.d * j.d_eg - j.d_g * j.d_e) / det;
        let dg = (j.d_e * j.d_e - j.d_ee * j.d) / det;
        eps -= de;
        g -= dg;
        if !g.is_finite() || !eps.is_finite() || !(g > T::zero()) || g > g0 * T::of_int(4) + T::of_int(10) {
            return Err(Error::NewtonDivergence);
        }
        if de.abs() <= target * eps.abs().max(T::one()) && dg.abs() <= target * g.abs().max(T::one()) {
            return Ok((g, eps));
        }
    }
    Err(Error::NewtonDivergence)
}

/// Refines `seed` to the exceptional point of `pair`, raising the
/// truncation until `g_e` and `ε_e` are stable to `digits` digits.
pub fn find_exceptional_point<T: Real>(
    species: SymmetrySpecies,
    pair: (usize, usize),
    seed: &EpSeed,
    digits: u32,
) -> Result<ExceptionalPoint<T>> {
    if pair.0 >= pair.1 {
        return Err(Error::InvalidPair(pair.0, pair.1));
    }
    if digits > T::DIGITS {
        return Err(Error::PrecisionUnavailable { requested: digits, available: T::DIGITS });
    }
    if !(seed.g > 0.0) || !seed.g.is_finite() || !seed.eps.is_finite() {
        return Err(Error::NewtonDivergence);
    }
    let target = T::pow10(-(digits as i32)).max(T::of_int(64) * T::epsilon());
    let mut n = initial_truncation(&Coupling::imaginary(seed.g), pair.1 + 1) + TRUNCATION_STEP;
    let mut g = T::cast(seed.g);
    let mut eps = T::cast(seed.eps);
    let mut prev: Option<(T, T)> = None;
    loop {
        if n > TRUNCATION_CAP {
            return Err(Error::TruncationCap { cap: TRUNCATION_CAP });
        }
        let block = build_block(species, Coupling::imaginary(g), n)?;
        let (gn, en) = coalesce_at(&block, g, eps, digits)?;
        if let Some((gp, ep)) = prev {
            if (gn - gp).abs() <= target * gn.abs() && (en - ep).abs() <= target * en.abs().max(T::one()) {
                let j = coalescence_jet(&block.with_magnitude(gn), en);
                return Ok(ExceptionalPoint {
                    species,
                    pair,
                    g_e: gn,
                    eps_e: en,
                    residual_d: (j.d / j.d_ee).abs(),
                    residual_dd: (j.d_e / j.d_ee).abs(),
                    precision_digits: digits,
                    truncation: n,
                });
            }
        }
        prev = Some((gn, en));
        g = gn;
        eps = en;
        n += TRUNCATION_STEP;
    }
}

/// Upper member of a complex-conjugate pair beyond an exceptional point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexPair<T> {
    pub g: T,
    /// Member with non-negative imaginary part.
    pub value: Complex<T>,
}

impl<T: Real> ComplexPair<T> {
    pub fn conjugate(&self) -> Complex<T> {
        Complex::new(self.value.re, -self.value.im)
    }
}

/// Complex Newton on `D(z) = 0`. Close to the branch point the pair is
/// nearly double and corrections bottom out at roughly `sqrt(eps)` times
/// the root separation; once they stop shrinking at that level the
/// iterate is accepted.
fn complex_newton<T: Real>(block: &BlockOperator<T>, mut z: Complex<T>) -> Result<Complex<T>> {
    let mut last = T::zero();
    for it in 0..60 {
        let (d, dp, _) = value_and_slope::<Complex<T>>(block, z);
        let step = d / dp;
        let size = step.re.abs().max(step.im.abs());
        let scale = z.re.abs().max(z.im.abs()).max(T::one());
        if it > 0 && size >= last / T::of_int(2) && last <= T::epsilon().sqrt() * scale {
            return Ok(z);
        }
        z = z - step;
        if !z.re.is_finite() || !z.im.is_finite() {
            break;
        }
        if size <= T::of_int(64) * T::epsilon() * scale {
            return Ok(z);
        }
        last = size;
    }
    Err(Error::NoConvergence { what: "complex pair continuation", iterations: 60 })
}

/// Follows the pair born at `ep` out to coupling `g`, stepping uniformly
/// in `sqrt(g - g_e)` from the square-root expansion at the branch point.
pub fn complex_pair_continuation<T: Real>(
    species: SymmetrySpecies,
    pair: (usize, usize),
    ep: &ExceptionalPoint<T>,
    g: T,
) -> Result<ComplexPair<T>> {
    if pair != ep.pair || species != ep.species {
        return Err(Error::InvalidPair(pair.0, pair.1));
    }
    if g < ep.g_e || !g.is_finite() {
        return Err(Error::NotBeyondExceptionalPoint { g: g.approx(), g_e: ep.g_e.approx() });
    }
    let zero = T::zero();
    if g == ep.g_e {
        return Ok(ComplexPair { g, value: Complex::new(ep.eps_e, zero) });
    }
    let base = build_block(species, Coupling::imaginary(ep.g_e), ep.truncation)?;
    let jet = coalescence_jet(&base, ep.eps_e);
    let curvature = (T::of_int(2) * jet.d_g / jet.d_ee).abs().sqrt();
    let s_target = (g - ep.g_e).sqrt();
    let m = ((s_target / T::cast(0.01)).approx().ceil() as usize).max(16);
    let ds = s_target / T::of_usize(m);
    let mut prev: Option<Complex<T>> = None;
    let mut z = Complex::new(ep.eps_e, zero);
    for i in 1..=m {
        let s = ds * T::of_usize(i);
        let gi = if i == m { g } else { ep.g_e + s * s };
        let predicted = match prev {
            Some(p) => z + (z - p),
            None => Complex::new(ep.eps_e, curvature * s),
        };
        let block = base.with_magnitude(gi);
        let next = complex_newton(&block, predicted)?;
        let drift = next - predicted;
        let allowed = (z - predicted).norm_sqr().sqrt().max(ds * curvature) / T::of_int(2);
        if !(next.im > zero) || drift.norm_sqr().sqrt() > allowed {
            return Err(Error::BranchLost(gi.approx()));
        }
        prev = Some(z);
        z = next;
    }
    Ok(ComplexPair { g, value: z })
}
