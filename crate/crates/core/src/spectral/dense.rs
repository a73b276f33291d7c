//! Full diagonalization of the dense truncated matrix. Shares nothing with
//! the recursion route, which is the point: it is the cross-check.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::rotor::BlockOperator;

use super::solve::Spectrum;

const MAX_DIM: usize = 5000;

fn dense_matrix(block: &BlockOperator<f64>) -> DMatrix<Complex64> {
    let n = block.dim();
    let off = block.offdiag_elements();
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            Complex64::new(block.diag[i], 0.0)
        } else if i + 1 == j {
            off[i]
        } else if j + 1 == i {
            off[j]
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// The `k` lowest eigenvalues of a Hermitian block by dense symmetric
/// diagonalization.
pub fn dense_oracle(block: &BlockOperator<f64>, k: usize) -> Result<Spectrum<f64>> {
    if !block.coupling.is_real() {
        return Err(Error::RealBarrierRequired("dense_oracle"));
    }
    let n = block.dim();
    if n > MAX_DIM {
        return Err(Error::OracleTooLarge(n));
    }
    let m = dense_matrix(block).map(|z| z.re);
    let norm = m.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev.truncate(k);
    let bound = f64::EPSILON * norm * n as f64;
    Ok(Spectrum::from_values(block.species, block.truncation, ev.into_iter().map(|v| (v, bound))))
}

/// All eigenvalues of the complex-symmetric matrix of an imaginary-barrier
/// block (off-diagonal `i g/2`), sorted by real part then imaginary part.
pub fn dense_complex_eigenvalues(block: &BlockOperator<f64>) -> Result<Vec<Complex64>> {
    let n = block.dim();
    if n > MAX_DIM {
        return Err(Error::OracleTooLarge(n));
    }
    let schur = dense_matrix(block)
        .try_schur(1e-14, 100_000)
        .ok_or(Error::NoConvergence { what: "complex Schur decomposition", iterations: 100_000 })?;
    let mut ev: Vec<Complex64> = schur
        .eigenvalues()
        .ok_or(Error::NoConvergence { what: "complex Schur decomposition", iterations: 100_000 })?
        .iter()
        .copied()
        .collect();
    ev.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(ev)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rotor::{build_block, Coupling, SymmetrySpecies};

    #[test]
    fn zero_coupling_returns_diagonal() {
        let b = build_block(SymmetrySpecies::APlus, Coupling::real(0.0), 5).unwrap();
        let s = dense_oracle(&b, 6).unwrap();
        assert_eq!(s.values(), vec![0.0, 9.0, 36.0, 81.0, 144.0, 225.0]);
    }

    #[test]
    fn e_blocks_share_a_spectrum() {
        let a = dense_oracle(&build_block(SymmetrySpecies::EA, Coupling::real(3.7), 20).unwrap(), 6).unwrap();
        let b = dense_oracle(&build_block(SymmetrySpecies::EB, Coupling::real(3.7), 20).unwrap(), 6).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_imaginary_barrier() {
        let b = build_block(SymmetrySpecies::EA, Coupling::imaginary(1.0), 5).unwrap();
        assert!(dense_oracle(&b, 2).is_err());
    }

    #[test]
    fn complex_eigenvalues_are_real_at_weak_imaginary_barrier() {
        let b = build_block(SymmetrySpecies::EA, Coupling::imaginary(1.0), 10).unwrap();
        let ev = dense_complex_eigenvalues(&b).unwrap();
        assert_eq!(ev.len(), 21);
        assert!(ev.iter().take(4).all(|z| z.im.abs() < 1e-9));
        // 1 + 1/10 + 83/32000 + 4581/30800000 to sixth order.
        assert!((ev[0].re - 1.102743).abs() < 1e-4);
    }
}
