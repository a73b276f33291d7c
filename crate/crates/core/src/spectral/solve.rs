use crate::error::{Error, Result};
use crate::rotor::{build_block, BlockOperator, Coupling, SymmetrySpecies};
use crate::scalar::Real;

use super::characteristic::sturm_pass;

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumEntry<T> {
    pub species: SymmetrySpecies,
    pub level: usize,
    pub value: T,
    /// Last Newton correction `|D / D'|` at the root, in energy units.
    pub residual: T,
}

/// Lowest eigenvalues of one block, ascending.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum<T> {
    pub entries: Vec<SpectrumEntry<T>>,
    pub truncation_used: usize,
}

impl<T: Real> Spectrum<T> {
    pub fn values(&self) -> Vec<T> {
        self.entries.iter().map(|e| e.value).collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn value(&self, level: usize) -> Option<T> {
        self.entries.get(level).map(|e| e.value)
    }

    pub(crate) fn from_values(
        species: SymmetrySpecies,
        truncation: usize,
        roots: impl IntoIterator<Item = (T, T)>,
    ) -> Self {
        let entries = roots
            .into_iter()
            .enumerate()
            .map(|(level, (value, residual))| SpectrumEntry { species, level, value, residual })
            .collect();
        Self { entries, truncation_used: truncation }
    }
}

/// Knobs for [`solve_spectrum_with`]; the defaults are what
/// [`solve_spectrum`] uses.
#[derive(Clone, Debug)]
pub struct SolveOptions {
    /// Fixed truncation; `None` selects one with [`auto_truncation`].
    pub truncation: Option<usize>,
    /// Step by which `N` grows while testing stability.
    pub increment: usize,
    /// Hard cap on `N`.
    pub max_truncation: usize,
    /// Iteration budget per root (isolation plus polishing).
    pub max_iterations: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { truncation: None, increment: 10, max_truncation: 2000, max_iterations: 500 }
    }
}

/// Outcome of probing a trial energy against a bracketed root.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Probe<T> {
    /// `Some(true)` when the trial lies below the root, `None` on an exact hit.
    pub below: Option<bool>,
    /// Newton correction `D / D'`.
    pub step: T,
}

/// Newton iteration kept inside `[lo, hi]`: steps that leave the bracket,
/// or fail to halve it, fall back to bisection. Returns the root and the
/// size of the last correction.
pub(crate) fn safeguarded_newton<T: Real>(
    mut lo: T,
    mut hi: T,
    max_iterations: usize,
    mut probe: impl FnMut(T) -> Probe<T>,
) -> Result<(T, T)> {
    let two = T::of_int(2);
    let mut x = (lo + hi) / two;
    let mut last_width = hi - lo;
    for _ in 0..max_iterations {
        let floor = T::of_int(4) * T::epsilon() * x.abs().max(T::one());
        let pr = probe(x);
        match pr.below {
            None => return Ok((x, T::zero())),
            Some(true) => lo = x,
            Some(false) => hi = x,
        }
        let step = pr.step;
        if step.is_finite() && step.abs() <= floor {
            return Ok((x - step, step.abs()));
        }
        let width = hi - lo;
        if width <= floor {
            return Ok(((lo + hi) / two, width));
        }
        let cand = x - step;
        let newton_ok = step.is_finite() && cand > lo && cand < hi && width <= last_width / two + floor;
        last_width = width;
        x = if newton_ok { cand } else { (lo + hi) / two };
    }
    Err(Error::NoConvergence { what: "root polishing", iterations: max_iterations })
}

fn check_inputs<T: Real>(coupling: &Coupling<T>, k: usize, tol: T) -> Result<()> {
    if !coupling.is_real() {
        return Err(Error::RealBarrierRequired("solve_spectrum"));
    }
    if k == 0 {
        return Err(Error::NoLevels);
    }
    if !(tol > T::zero()) || !tol.is_finite() {
        return Err(Error::InvalidTolerance);
    }
    if !coupling.magnitude.is_finite() {
        return Err(Error::NonFiniteCoupling);
    }
    Ok(())
}

/// Gershgorin interval of the block.
fn gershgorin<T: Real>(block: &BlockOperator<T>) -> (T, T) {
    let b: Vec<T> = block.offprod.iter().map(|p| p.abs().sqrt()).collect();
    let mut lo = block.diag[0];
    let mut hi = block.diag[0];
    for (i, &d) in block.diag.iter().enumerate() {
        let left = if i > 0 { b[i - 1] } else { T::zero() };
        let right = b.get(i).copied().unwrap_or_else(T::zero);
        lo = lo.min(d - left - right);
        hi = hi.max(d + left + right);
    }
    let pad = T::one() + (hi - lo).abs() * T::cast(1e-3);
    (lo - pad, hi + pad)
}

/// The `k` lowest eigenvalues of a Hermitian block at its own truncation.
///
/// Each root is isolated by Sturm bisection until the count changes by
/// exactly one across the bracket, then polished by Newton with the
/// simultaneous derivative recursion.
pub fn block_eigenvalues<T: Real>(block: &BlockOperator<T>, k: usize, tol: T) -> Result<Spectrum<T>> {
    block_eigenvalues_with(block, k, tol, SolveOptions::default().max_iterations)
}

fn block_eigenvalues_with<T: Real>(
    block: &BlockOperator<T>,
    k: usize,
    tol: T,
    max_iterations: usize,
) -> Result<Spectrum<T>> {
    check_inputs(&block.coupling, k, tol)?;
    let k = k.min(block.dim());
    if block.offprod.iter().all(|p| p.is_zero()) {
        // Decoupled basis: the diagonal is the spectrum.
        let mut d = block.diag.clone();
        d.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        let roots = d.into_iter().take(k).map(|x| (x, T::zero()));
        return Ok(Spectrum::from_values(block.species, block.truncation, roots));
    }
    let two = T::of_int(2);
    let (glo, ghi) = gershgorin(block);
    let mut roots = Vec::with_capacity(k);
    let mut floor_lo = glo;
    for j in 0..k {
        // Isolate: count(lo) == j and count(hi) == j + 1.
        let mut lo = floor_lo;
        let mut hi = ghi;
        let mut iters = 0;
        let mut cluster = false;
        loop {
            let clo = sturm_pass(block, lo).count;
            let chi = sturm_pass(block, hi).count;
            if clo == j && chi == j + 1 {
                break;
            }
            let floor = T::of_int(4) * T::epsilon() * lo.abs().max(hi.abs()).max(T::one());
            if hi - lo <= floor {
                // Degenerate to working precision.
                cluster = true;
                break;
            }
            let mid = (lo + hi) / two;
            if sturm_pass(block, mid).count <= j {
                lo = mid;
            } else {
                hi = mid;
            }
            iters += 1;
            if iters > max_iterations {
                return Err(Error::NoConvergence { what: "Sturm isolation", iterations: iters });
            }
        }
        let (root, residual) = if cluster {
            ((lo + hi) / two, hi - lo)
        } else {
            safeguarded_newton(lo, hi, max_iterations, |x| {
                let s = sturm_pass(block, x);
                let below = if s.value.is_zero() { None } else { Some(s.count <= j) };
                Probe { below, step: s.step() }
            })?
        };
        let reachable = T::of_int(4) * T::epsilon() * root.abs().max(T::one());
        if tol < reachable {
            return Err(Error::ToleranceUnreachable {
                tol: tol.approx(),
                scale: root.abs().approx(),
                digits: T::DIGITS,
            });
        }
        if residual > tol {
            return Err(Error::NoConvergence { what: "eigenvalue tolerance", iterations: max_iterations });
        }
        floor_lo = lo;
        roots.push((root, residual));
    }
    Ok(Spectrum::from_values(block.species, block.truncation, roots))
}

/// First truncation tried by [`auto_truncation`].
pub fn initial_truncation<T: Real>(coupling: &Coupling<T>, k: usize) -> usize {
    k + (2.0 * coupling.magnitude.abs().approx().sqrt()).ceil() as usize + 8
}

/// Runs the truncation search and returns the accepted `N` together with
/// the spectrum computed there.
fn converge_truncation<T: Real>(
    species: SymmetrySpecies,
    coupling: Coupling<T>,
    k: usize,
    tol: T,
    opts: &SolveOptions,
) -> Result<(usize, Spectrum<T>)> {
    check_inputs(&coupling, k, tol)?;
    let mut n = initial_truncation(&coupling, k).max(2);
    if n > opts.max_truncation {
        return Err(Error::TruncationCap { cap: opts.max_truncation });
    }
    let solve = |n: usize| -> Result<Spectrum<T>> {
        let block = build_block(species, coupling, n)?;
        block_eigenvalues_with(&block, k, tol, opts.max_iterations)
    };
    let mut current = solve(n)?;
    let threshold = tol / T::of_int(10);
    loop {
        let next_n = n + opts.increment.max(1);
        if next_n > opts.max_truncation {
            return Err(Error::TruncationCap { cap: opts.max_truncation });
        }
        let next = solve(next_n)?;
        let stable = current.entries.len() == next.entries.len()
            && current.entries.iter().zip(&next.entries).all(|(a, b)| {
                let noise = T::of_int(8) * T::epsilon() * a.value.abs().max(T::one());
                (a.value - b.value).abs() < threshold.max(noise)
            });
        if stable {
            return Ok((n, current));
        }
        n = next_n;
        current = next;
    }
}

/// Smallest tested truncation at which the `k` lowest eigenvalues move by
/// less than `tol / 10` when `N` grows by the fixed increment.
pub fn auto_truncation<T: Real>(
    species: SymmetrySpecies,
    coupling: Coupling<T>,
    k: usize,
    tol: T,
) -> Result<usize> {
    converge_truncation(species, coupling, k, tol, &SolveOptions::default()).map(|(n, _)| n)
}

/// The `k` lowest eigenvalues of `species` at a real barrier, with the
/// truncation chosen automatically.
pub fn solve_spectrum<T: Real>(
    species: SymmetrySpecies,
    coupling: Coupling<T>,
    k: usize,
    tol: T,
) -> Result<Spectrum<T>> {
    solve_spectrum_with(species, coupling, k, tol, &SolveOptions::default())
}

pub fn solve_spectrum_with<T: Real>(
    species: SymmetrySpecies,
    coupling: Coupling<T>,
    k: usize,
    tol: T,
    opts: &SolveOptions,
) -> Result<Spectrum<T>> {
    match opts.truncation {
        Some(n) => {
            check_inputs(&coupling, k, tol)?;
            let block = build_block(species, coupling, n)?;
            block_eigenvalues_with(&block, k, tol, opts.max_iterations)
        }
        None => converge_truncation(species, coupling, k, tol, opts).map(|(_, s)| s),
    }
}
