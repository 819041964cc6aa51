use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::{Error, Result};

use super::index::check_dims;
use super::unitary::UnitaryMatrix;
use super::StateVector;

/// Max entrywise deviation allowed from Hermitian symmetry and unit trace.
pub const HERMITICITY_TOLERANCE: f64 = 1e-12;

/// Eigenvalue floor: eigenvalues may dip this far below zero from roundoff.
pub const EIGENVALUE_FLOOR: f64 = -1e-10;

/// A density matrix over a composite system, stored dense row-major.
///
/// Constructors enforce Hermitian symmetry and unit trace (both within
/// [`HERMITICITY_TOLERANCE`]). Positivity is an invariant of everything this
/// crate produces but is O(n^3) to test, so it is checked on demand through
/// [`DensityMatrix::min_eigenvalue`] rather than at every construction.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dims: Vec<usize>,
    entries: Vec<Complex64>,
}

impl DensityMatrix {
    /// Builds a density matrix from subsystem dimensions and row-major
    /// entries, validating shape, Hermitian symmetry, and unit trace.
    pub fn new(dims: Vec<usize>, entries: Vec<Complex64>) -> Result<Self> {
        let total = check_dims(&dims)?;
        if entries.len() != total * total {
            return Err(Error::LengthMismatch {
                expected: total * total,
                actual: entries.len(),
            });
        }
        let mut herm_dev: f64 = 0.0;
        for i in 0..total {
            for j in i..total {
                let d = (entries[i * total + j] - entries[j * total + i].conj()).norm();
                herm_dev = herm_dev.max(d);
            }
        }
        if herm_dev > HERMITICITY_TOLERANCE {
            return Err(Error::NotHermitian { deviation: herm_dev });
        }
        let trace: Complex64 = (0..total).map(|i| entries[i * total + i]).sum();
        let trace_dev = (trace - Complex64::new(1.0, 0.0)).norm();
        if trace_dev > HERMITICITY_TOLERANCE {
            return Err(Error::TraceNotOne {
                deviation: trace_dev,
            });
        }
        Ok(Self { dims, entries })
    }

    /// Projector `|s><s|` onto a pure state.
    pub fn from_pure(s: &StateVector) -> Self {
        let n = s.dim();
        let amps = s.amplitudes();
        let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            let a = amps[i];
            if a.re == 0.0 && a.im == 0.0 {
                continue;
            }
            for j in 0..n {
                entries[i * n + j] = a * amps[j].conj();
            }
        }
        Self {
            dims: s.dims().to_vec(),
            entries,
        }
    }

    /// Subsystem dimensions.
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Total (product) dimension.
    pub fn dim(&self) -> usize {
        self.dims.iter().product()
    }

    /// Flat row-major entries.
    pub fn matrix(&self) -> &[Complex64] {
        &self.entries
    }

    /// Single entry by (row, column).
    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim() + col]
    }

    /// Real diagonal (the outcome distribution in the computational basis).
    pub fn diagonal(&self) -> Vec<f64> {
        let n = self.dim();
        (0..n).map(|i| self.entries[i * n + i].re).collect()
    }

    /// Conjugation `U rho U^dagger` by a unitary on the full space.
    pub fn transformed(&self, u: &UnitaryMatrix) -> Result<Self> {
        let n = self.dim();
        if u.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: u.dim(),
            });
        }
        let b = super::mat_mul(u.matrix(), &self.entries, n);
        let udag = u.dagger();
        let c = super::mat_mul(&b, udag.matrix(), n);
        Self::new(self.dims.clone(), c)
    }

    /// Tensor product `self (x) other`; subsystems of `self` come first.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let (da, db) = (self.dim(), other.dim());
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        check_dims(&dims)?;
        let n = da * db;
        let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
        for ia in 0..da {
            for ja in 0..da {
                let x = self.entries[ia * da + ja];
                if x.re == 0.0 && x.im == 0.0 {
                    continue;
                }
                for ib in 0..db {
                    for jb in 0..db {
                        entries[(ia * db + ib) * n + (ja * db + jb)] =
                            x * other.entries[ib * db + jb];
                    }
                }
            }
        }
        Self::new(dims, entries)
    }

    /// Convex combination of density matrices; weights must be positive and
    /// sum to one within [`HERMITICITY_TOLERANCE`].
    pub fn mixture(terms: &[(f64, DensityMatrix)]) -> Result<Self> {
        let Some(((_, first), _)) = terms.split_first() else {
            return Err(Error::EmptyMixture);
        };
        let sum: f64 = terms.iter().map(|(w, _)| w).sum();
        if terms.iter().any(|(w, _)| *w <= 0.0) || (sum - 1.0).abs() > HERMITICITY_TOLERANCE {
            return Err(Error::InvalidMixtureWeights {
                deviation: (sum - 1.0).abs(),
            });
        }
        let n = first.dim();
        let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
        for (w, rho) in terms {
            if rho.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    actual: rho.dim(),
                });
            }
            for (e, r) in entries.iter_mut().zip(&rho.entries) {
                *e += *w * r;
            }
        }
        Self::new(first.dims.clone(), entries)
    }

    /// Smallest eigenvalue; for a valid density matrix this is at worst
    /// [`EIGENVALUE_FLOOR`] below zero.
    pub fn min_eigenvalue(&self) -> f64 {
        let n = self.dim();
        let m = DMatrix::from_fn(n, n, |i, j| self.entries[i * n + j]);
        let eig = SymmetricEigen::new(m);
        eig.eigenvalues.iter().fold(f64::INFINITY, |a, &b| a.min(b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn from_pure_is_projector_with_unit_trace() {
        let s = StateVector::new(
            vec![2],
            vec![c(0.5f64.sqrt(), 0.0), c(0.0, 0.5f64.sqrt())],
        )
        .unwrap();
        let rho = DensityMatrix::from_pure(&s);
        assert!((rho.entry(0, 0).re - 0.5).abs() < 1e-15);
        assert!((rho.entry(0, 1) - c(0.0, -0.5)).norm() < 1e-15);
        assert!(rho.min_eigenvalue() > EIGENVALUE_FLOOR);
    }

    #[test]
    fn rejects_non_hermitian_entries() {
        let entries = vec![c(0.5, 0.0), c(0.3, 0.0), c(0.2, 0.0), c(0.5, 0.0)];
        let err = DensityMatrix::new(vec![2], entries).unwrap_err();
        assert!(matches!(err, Error::NotHermitian { .. }));
    }

    #[test]
    fn rejects_wrong_trace() {
        let entries = vec![c(0.7, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.7, 0.0)];
        let err = DensityMatrix::new(vec![2], entries).unwrap_err();
        assert!(matches!(err, Error::TraceNotOne { .. }));
    }

    #[test]
    fn mixture_validates_weights() {
        let a = DensityMatrix::from_pure(&StateVector::basis_state(vec![2], 0).unwrap());
        let b = DensityMatrix::from_pure(&StateVector::basis_state(vec![2], 1).unwrap());
        let m = DensityMatrix::mixture(&[(0.25, a.clone()), (0.75, b.clone())]).unwrap();
        assert!((m.entry(0, 0).re - 0.25).abs() < 1e-15);
        assert!((m.entry(1, 1).re - 0.75).abs() < 1e-15);
        assert!(DensityMatrix::mixture(&[(0.5, a.clone()), (0.4, b.clone())]).is_err());
        assert!(DensityMatrix::mixture(&[(1.5, a), (-0.5, b)]).is_err());
        assert!(DensityMatrix::mixture(&[]).is_err());
    }

    #[test]
    fn tensor_places_first_factor_most_significant() {
        let a = DensityMatrix::from_pure(&StateVector::basis_state(vec![2], 1).unwrap());
        let b = DensityMatrix::from_pure(&StateVector::basis_state(vec![3], 0).unwrap());
        let t = a.tensor(&b).unwrap();
        assert_eq!(t.dims(), &[2, 3]);
        assert!((t.entry(3, 3).re - 1.0).abs() < 1e-15);
    }
}
