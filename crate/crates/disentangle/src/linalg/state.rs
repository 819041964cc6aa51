use num_complex::Complex64;

use crate::{Error, Result, MAX_TOTAL_DIMENSION};

use super::index::{check_dims, strides_of};
use super::DensityMatrix;

/// Norm tolerance enforced on every state vector.
pub const NORM_TOLERANCE: f64 = 1e-12;

/// A pure state of a composite system, stored as a dense amplitude vector.
///
/// Subsystems are indexed big-endian: the first subsystem is the most
/// significant digit of the composite index. For qubits this means
/// `|01001>` is basis state 9 of a five-qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    dims: Vec<usize>,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Builds a state from subsystem dimensions and amplitudes.
    ///
    /// Validates that every dimension is at least 2, that the total dimension
    /// stays under [`MAX_TOTAL_DIMENSION`], that the amplitude count matches,
    /// and that the norm is within [`NORM_TOLERANCE`] of one.
    pub fn new(dims: Vec<usize>, amplitudes: Vec<Complex64>) -> Result<Self> {
        let total = check_dims(&dims)?;
        if amplitudes.len() != total {
            return Err(Error::LengthMismatch {
                expected: total,
                actual: amplitudes.len(),
            });
        }
        let state = Self { dims, amplitudes };
        let deviation = (state.norm() - 1.0).abs();
        if deviation > NORM_TOLERANCE {
            return Err(Error::NotNormalized { deviation });
        }
        Ok(state)
    }

    /// Basis state `|index>` of the composite system.
    pub fn basis_state(dims: Vec<usize>, index: usize) -> Result<Self> {
        let total = check_dims(&dims)?;
        if index >= total {
            return Err(Error::OutcomeOutOfRange {
                outcome: index,
                count: total,
            });
        }
        let mut amplitudes = vec![Complex64::ZERO; total];
        amplitudes[index] = Complex64::ONE;
        Ok(Self { dims, amplitudes })
    }

    /// Subsystem dimensions.
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Total (product) dimension.
    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    /// Number of subsystems.
    pub fn num_subsystems(&self) -> usize {
        self.dims.len()
    }

    /// Flat amplitude slice, composite index order.
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Single amplitude by composite index.
    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amplitudes[index]
    }

    /// Euclidean norm.
    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Inner product `<self|other>` (conjugate-linear in `self`).
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: other.dim(),
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Reinterprets the same amplitudes over a different subsystem split.
    ///
    /// The product of `dims` must match the current total dimension.
    pub fn regrouped(&self, dims: Vec<usize>) -> Result<Self> {
        let total = check_dims(&dims)?;
        if total != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: total,
            });
        }
        Ok(Self {
            dims,
            amplitudes: self.amplitudes.clone(),
        })
    }

    /// Reduced density matrix over the `keep` subsystems (given order),
    /// tracing out everything else.
    pub fn reduced_density(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let (keep_offsets, traced_offsets, keep_dims) = split_offsets(&self.dims, keep)?;
        let dk = keep_offsets.len();
        let mut entries = vec![Complex64::ZERO; dk * dk];
        for &t in &traced_offsets {
            for (i, &ko_i) in keep_offsets.iter().enumerate() {
                let a = self.amplitudes[ko_i + t];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let row = &mut entries[i * dk..(i + 1) * dk];
                for (j, &ko_j) in keep_offsets.iter().enumerate() {
                    row[j] += a * self.amplitudes[ko_j + t].conj();
                }
            }
        }
        DensityMatrix::new(keep_dims, entries)
    }

    pub(crate) fn from_raw(dims: Vec<usize>, amplitudes: Vec<Complex64>) -> Self {
        Self { dims, amplitudes }
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }
}

/// Splits the composite index space into offsets generated by the `keep`
/// subsystems and offsets generated by the complement. Any flat index is
/// uniquely `keep_offset + traced_offset`.
pub(crate) fn split_offsets(
    dims: &[usize],
    keep: &[usize],
) -> Result<(Vec<usize>, Vec<usize>, Vec<usize>)> {
    if keep.is_empty() {
        return Err(Error::EmptySubsystemList);
    }
    let n = dims.len();
    let mut seen = vec![false; n];
    for &k in keep {
        if k >= n {
            return Err(Error::SubsystemOutOfRange { index: k, count: n });
        }
        if seen[k] {
            return Err(Error::DuplicateSubsystem { index: k });
        }
        seen[k] = true;
    }
    let strides = strides_of(dims);
    let keep_dims: Vec<usize> = keep.iter().map(|&k| dims[k]).collect();
    let traced: Vec<usize> = (0..n).filter(|i| !seen[*i]).collect();

    let offsets = |subs: &[usize]| -> Vec<usize> {
        let mut offs = vec![0usize];
        for &s in subs {
            let mut next = Vec::with_capacity(offs.len() * dims[s]);
            for &o in &offs {
                for d in 0..dims[s] {
                    next.push(o + d * strides[s]);
                }
            }
            offs = next;
        }
        offs
    };
    Ok((offsets(keep), offsets(&traced), keep_dims))
}

/// Tensor product `a (x) b`; the subsystems of `a` come first (most
/// significant digits of the composite index).
pub fn tensor_product(a: &StateVector, b: &StateVector) -> Result<StateVector> {
    let total = a.dim().saturating_mul(b.dim());
    if total > MAX_TOTAL_DIMENSION {
        return Err(Error::DimensionTooLarge {
            dim: total,
            max: MAX_TOTAL_DIMENSION,
        });
    }
    let mut dims = a.dims.clone();
    dims.extend_from_slice(&b.dims);
    let mut amplitudes = Vec::with_capacity(total);
    for &x in &a.amplitudes {
        for &y in &b.amplitudes {
            amplitudes.push(x * y);
        }
    }
    Ok(StateVector::from_raw(dims, amplitudes))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn basis_state_sets_single_amplitude() {
        let s = StateVector::basis_state(vec![2, 3], 4).unwrap();
        assert_eq!(s.dims(), &[2, 3]);
        assert_eq!(s.amplitude(4), Complex64::ONE);
        assert_eq!(s.amplitudes().iter().filter(|a| a.norm() > 0.0).count(), 1);
    }

    #[test]
    fn five_qubit_binary_labels_are_big_endian() {
        // |01001> has first (most significant) qubit 0, last qubit 1.
        let s = StateVector::basis_state(vec![2; 5], 9).unwrap();
        assert_eq!(s.amplitude(9), Complex64::ONE);
        let digits = [0, 1, 0, 0, 1];
        let idx = digits.iter().fold(0usize, |acc, &d| acc * 2 + d);
        assert_eq!(idx, 9);
    }

    #[test]
    fn rejects_unnormalized_amplitudes() {
        let err = StateVector::new(vec![2], vec![c(1.0, 0.0), c(0.5, 0.0)]).unwrap_err();
        assert!(matches!(err, Error::NotNormalized { .. }));
    }

    #[test]
    fn rejects_wrong_amplitude_count() {
        let err = StateVector::new(vec![2, 2], vec![Complex64::ONE; 3]).unwrap_err();
        assert!(matches!(err, Error::LengthMismatch { .. }));
    }

    #[test]
    fn rejects_trivial_subsystem() {
        let err = StateVector::basis_state(vec![2, 1], 0).unwrap_err();
        assert!(matches!(err, Error::SubsystemDimension { dim: 1 }));
    }

    #[test]
    fn rejects_dimension_beyond_cap() {
        let err = StateVector::basis_state(vec![2; 16], 0).unwrap_err();
        assert!(matches!(err, Error::DimensionTooLarge { .. }));
    }

    #[test]
    fn tensor_product_index_convention() {
        // |1> (x) |02> over dims [2] and [3, 4] lands on index 1*12 + 0*4 + 2.
        let a = StateVector::basis_state(vec![2], 1).unwrap();
        let b = StateVector::basis_state(vec![3, 4], 2).unwrap();
        let t = tensor_product(&a, &b).unwrap();
        assert_eq!(t.dims(), &[2, 3, 4]);
        assert_eq!(t.amplitude(14), Complex64::ONE);
    }

    #[test]
    fn tensor_product_is_associative_exactly_on_dyadic_amplitudes() {
        let a = StateVector::new(vec![2], vec![c(0.5, 0.0), c(0.0, 0.75f64.sqrt())]).unwrap();
        let b = StateVector::new(vec![2], vec![c(0.0, -1.0), c(0.0, 0.0)]).unwrap();
        let d = StateVector::new(vec![3], vec![c(0.5, 0.5), c(0.5, -0.5), c(0.0, 0.0)]).unwrap();
        let left = tensor_product(&tensor_product(&a, &b).unwrap(), &d).unwrap();
        let right = tensor_product(&a, &tensor_product(&b, &d).unwrap()).unwrap();
        assert_eq!(left.dims(), right.dims());
        assert_eq!(left.amplitudes(), right.amplitudes());
    }

    #[test]
    fn inner_product_is_conjugate_linear_in_left_argument() {
        let a = StateVector::new(vec![2], vec![c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        let b = StateVector::basis_state(vec![2], 1).unwrap();
        assert_eq!(a.inner(&b).unwrap(), c(0.0, -0.8));
    }

    #[test]
    fn regrouped_preserves_amplitudes() {
        let s = StateVector::basis_state(vec![4, 2], 5).unwrap();
        let r = s.regrouped(vec![2, 2, 2]).unwrap();
        assert_eq!(r.amplitude(5), Complex64::ONE);
        assert!(s.regrouped(vec![2, 2]).is_err());
    }
}
