//! Dense operators on the truncated Fock basis `|0>, ..., |D−1>`.

use crate::error::{domain, Error, Result};
use crate::specfun::ln_falling_factorial;
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Complex `D × D` operator in the truncated number basis.
pub type Operator = DMatrix<Complex64>;

pub const MIN_DIM: usize = 2;
pub const MAX_DIM: usize = 4096;

/// Number of retained Fock levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct FockCutoff(usize);

impl FockCutoff {
    pub fn new(dim: usize) -> Result<Self> {
        if !(MIN_DIM..=MAX_DIM).contains(&dim) {
            return domain(format!("cutoff {dim} outside [{MIN_DIM}, {MAX_DIM}]"));
        }
        Ok(FockCutoff(dim))
    }

    pub fn dim(self) -> usize {
        self.0
    }
}

impl TryFrom<usize> for FockCutoff {
    type Error = Error;
    fn try_from(d: usize) -> Result<Self> {
        FockCutoff::new(d)
    }
}

impl From<FockCutoff> for usize {
    fn from(c: FockCutoff) -> usize {
        c.0
    }
}

/// `sqrt(n! / (n − s)!)`, the amplitude of `a^s |n>`.
pub(crate) fn ladder_amplitude(n: usize, s: usize) -> f64 {
    if s > n {
        return 0.0;
    }
    if n <= 170 {
        let mut acc = 1.0;
        for i in 0..s {
            acc *= (n - i) as f64;
        }
        acc.sqrt()
    } else {
        (0.5 * ln_falling_factorial(n, s)).exp()
    }
}

/// Matrix of `a^s`: entry `(n − s, n)` is `sqrt(n! / (n − s)!)`.
///
/// Exact on the truncated space, since `a^s` only lowers.
pub fn ladder_power_matrix(s: usize, cutoff: FockCutoff) -> Result<Operator> {
    let d = cutoff.dim();
    if s >= d {
        return domain(format!("ladder power {s} must be below the cutoff {d}"));
    }
    let mut op = Operator::zeros(d, d);
    for n in s..d {
        op[(n - s, n)] = Complex64::new(ladder_amplitude(n, s), 0.0);
    }
    Ok(op)
}

/// Truncated matrix of `a†^s`, the transpose of [`ladder_power_matrix`].
///
/// Amplitude pushed above level `D − 1` is dropped.
pub fn creation_power_matrix(s: usize, cutoff: FockCutoff) -> Result<Operator> {
    ladder_power_matrix(s, cutoff).map(|m| m.transpose())
}

/// Largest entry modulus of `M − M†`.
pub fn hermiticity_residual(m: &Operator) -> f64 {
    let mut worst: f64 = 0.0;
    for j in 0..m.nrows() {
        for k in 0..m.ncols() {
            worst = worst.max((m[(j, k)] - m[(k, j)].conj()).norm());
        }
    }
    worst
}

/// Frobenius norm of the top-left `block × block` corner.
pub fn block_frobenius(m: &Operator, block: usize) -> f64 {
    let b = block.min(m.nrows()).min(m.ncols());
    let mut acc = 0.0;
    for j in 0..b {
        for k in 0..b {
            acc += m[(j, k)].norm_sqr();
        }
    }
    acc.sqrt()
}

/// Hermitian matrix in the truncated Fock basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: Operator,
}

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = 1e-10;

impl DensityMatrix {
    pub fn new(entries: Operator) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return domain("density matrix must be square");
        }
        FockCutoff::new(entries.nrows())?;
        let h = hermiticity_residual(&entries);
        if !(h <= HERMITIAN_TOL * entries.norm().max(1.0)) {
            return domain(format!("matrix is not Hermitian (max |M - M†| = {h:e})"));
        }
        Ok(DensityMatrix { entries })
    }

    /// `|m><m|` in `dim` levels.
    pub fn projector(m: usize, cutoff: FockCutoff) -> Result<Self> {
        let d = cutoff.dim();
        if m >= d {
            return domain(format!("level {m} outside cutoff {d}"));
        }
        let mut e = Operator::zeros(d, d);
        e[(m, m)] = Complex64::new(1.0, 0.0);
        Ok(DensityMatrix { entries: e })
    }

    pub fn from_diagonal(probs: &[f64]) -> Result<Self> {
        let d = probs.len();
        let mut e = Operator::zeros(d, d);
        for (i, &p) in probs.iter().enumerate() {
            e[(i, i)] = Complex64::new(p, 0.0);
        }
        DensityMatrix::new(e)
    }

    /// Pure state `|ψ><ψ|` from amplitudes.
    pub fn from_pure(amplitudes: &[Complex64]) -> Result<Self> {
        let v = nalgebra::DVector::from_column_slice(amplitudes);
        DensityMatrix::new(&v * v.adjoint())
    }

    pub(crate) fn from_raw(entries: Operator) -> Self {
        DensityMatrix { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &Operator {
        &self.entries
    }

    pub fn into_entries(self) -> Operator {
        self.entries
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace().re
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.entries[(i, i)].re).collect()
    }

    /// `Tr(ρ a†a)`.
    pub fn mean_photon(&self) -> f64 {
        self.diagonal()
            .iter()
            .enumerate()
            .map(|(n, p)| n as f64 * p)
            .sum()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let eig = nalgebra::SymmetricEigen::new(self.entries.clone());
        eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Unit trace and no eigenvalue below `−PSD_TOL`.
    pub fn is_state(&self) -> bool {
        (self.trace() - 1.0).abs() <= 1e-10 && self.min_eigenvalue() >= -PSD_TOL
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        (&self.entries - &other.entries)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cut(d: usize) -> FockCutoff {
        FockCutoff::new(d).unwrap()
    }

    #[test]
    fn cutoff_bounds() {
        assert!(FockCutoff::new(1).is_err());
        assert!(FockCutoff::new(2).is_ok());
        assert!(FockCutoff::new(4096).is_ok());
        assert!(FockCutoff::new(4097).is_err());
    }

    #[test]
    fn ladder_examples() {
        let id = ladder_power_matrix(0, cut(6)).unwrap();
        assert_eq!(id, Operator::identity(6, 6));
        let a = ladder_power_matrix(1, cut(6)).unwrap();
        assert_eq!(a[(0, 1)].re, 1.0);
        assert!((a[(1, 2)].re - 2f64.sqrt()).abs() < 1e-15);
        let a2 = ladder_power_matrix(2, cut(6)).unwrap();
        assert!((a2[(0, 2)].re - 2f64.sqrt()).abs() < 1e-15);
        assert!(ladder_power_matrix(6, cut(6)).is_err());
    }

    #[test]
    fn ladder_powers_compose() {
        let c = cut(12);
        let a = ladder_power_matrix(1, c).unwrap();
        let a3 = ladder_power_matrix(3, c).unwrap();
        let diff = (&a * &a * &a - a3).norm();
        assert!(diff < 1e-12);
    }

    #[test]
    fn truncated_commutator_is_identity_on_safe_block() {
        let d = 20;
        let a = ladder_power_matrix(1, cut(d)).unwrap();
        let ad = creation_power_matrix(1, cut(d)).unwrap();
        let comm = &a * &ad - &ad * &a;
        let diff = comm - Operator::identity(d, d);
        assert!(block_frobenius(&diff, d - 2) < 1e-12);
        // the top level carries the truncation artefact
        assert!(diff[(d - 1, d - 1)].norm() > 1.0);
    }

    #[test]
    fn density_matrix_validation() {
        let mut e = Operator::zeros(3, 3);
        e[(0, 1)] = Complex64::new(0.0, 1.0);
        assert!(DensityMatrix::new(e.clone()).is_err());
        e[(1, 0)] = Complex64::new(0.0, -1.0);
        assert!(DensityMatrix::new(e).is_ok());
        let p = DensityMatrix::projector(2, cut(4)).unwrap();
        assert!(p.is_state());
        assert_eq!(p.mean_photon(), 2.0);
        let bad = DensityMatrix::from_diagonal(&[1.2, -0.2]).unwrap();
        assert!(!bad.is_state());
    }
}
