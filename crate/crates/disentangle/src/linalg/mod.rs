//! Dense state-vector / density-matrix kernels for small composite systems.
//!
//! Everything is stored flat and row-major over the composite index, with
//! subsystems in big-endian digit order (first subsystem most significant).
//! Dimensions are validated against [`crate::MAX_TOTAL_DIMENSION`] so the
//! dense representation stays tractable.

mod density;
mod state;
mod unitary;

pub use density::{DensityMatrix, EIGENVALUE_FLOOR, HERMITICITY_TOLERANCE};
pub use state::{tensor_product, StateVector, NORM_TOLERANCE};
pub use unitary::{haar_random_unitary, identity, UnitaryMatrix, UNITARITY_TOLERANCE};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::{Error, Result};

pub(crate) mod index {
    use crate::{Error, Result, MAX_TOTAL_DIMENSION};

    /// Validates subsystem dimensions (each >= 2, product under the cap) and
    /// returns the total dimension.
    pub fn check_dims(dims: &[usize]) -> Result<usize> {
        if dims.is_empty() {
            return Err(Error::EmptySubsystemList);
        }
        let mut total: usize = 1;
        for &d in dims {
            if d < 2 {
                return Err(Error::SubsystemDimension { dim: d });
            }
            total = total.saturating_mul(d);
            if total > MAX_TOTAL_DIMENSION {
                return Err(Error::DimensionTooLarge {
                    dim: total,
                    max: MAX_TOTAL_DIMENSION,
                });
            }
        }
        Ok(total)
    }

    /// Big-endian strides: subsystem `i` advances the flat index by
    /// `strides[i]` per unit digit.
    pub fn strides_of(dims: &[usize]) -> Vec<usize> {
        let mut strides = vec![1; dims.len()];
        for i in (0..dims.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * dims[i + 1];
        }
        strides
    }
}

/// Row-major square matrix product `a * b`, skipping zero entries of `a`.
///
/// The zero-skip makes conjugation cheap for the sparse density matrices the
/// period-finding pipeline produces; for dense inputs it costs one compare
/// per entry.
pub(crate) fn mat_mul(a: &[Complex64], b: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut c = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        let c_row = &mut c[i * n..(i + 1) * n];
        for k in 0..n {
            let aik = a[i * n + k];
            if aik.re == 0.0 && aik.im == 0.0 {
                continue;
            }
            let b_row = &b[k * n..(k + 1) * n];
            for (cv, bv) in c_row.iter_mut().zip(b_row) {
                *cv += aik * bv;
            }
        }
    }
    c
}

/// Applies a unitary to the listed target subsystems of a pure state.
///
/// `u` acts on the tensor product of the target subsystems, whose basis is
/// ordered by the targets as given, big-endian. The remaining subsystems are
/// untouched. Targets must be distinct, in range, and their dimensions must
/// multiply to `u.dim()`.
pub fn apply_unitary(s: &StateVector, u: &UnitaryMatrix, targets: &[usize]) -> Result<StateVector> {
    let (target_offsets, comp_offsets, target_dims) = state::split_offsets(s.dims(), targets)?;
    let local: usize = target_dims.iter().product();
    if local != u.dim() {
        return Err(Error::DimensionMismatch {
            expected: local,
            actual: u.dim(),
        });
    }
    let mut out = s.clone();
    let mut buf = vec![Complex64::new(0.0, 0.0); local];
    let mut nonzero: Vec<(usize, Complex64)> = Vec::with_capacity(local);
    let um = u.matrix();
    for &base in &comp_offsets {
        nonzero.clear();
        for (l, &t) in target_offsets.iter().enumerate() {
            let a = s.amplitudes()[base + t];
            if a.re != 0.0 || a.im != 0.0 {
                nonzero.push((l, a));
            }
        }
        if nonzero.is_empty() {
            continue;
        }
        for (i, slot) in buf.iter_mut().enumerate() {
            let row = &um[i * local..(i + 1) * local];
            *slot = nonzero.iter().map(|&(k, v)| row[k] * v).sum();
        }
        let amps = out.amplitudes_mut();
        for (l, &t) in target_offsets.iter().enumerate() {
            amps[base + t] = buf[l];
        }
    }
    StateVector::new(out.dims().to_vec(), out.amplitudes().to_vec())
}

/// Builds the full-space matrix of a unitary acting on the listed target
/// subsystems (identity elsewhere). Index conventions as [`apply_unitary`].
pub fn embed_unitary(
    u: &UnitaryMatrix,
    dims: &[usize],
    targets: &[usize],
) -> Result<UnitaryMatrix> {
    let total = index::check_dims(dims)?;
    let mut entries = vec![Complex64::new(0.0, 0.0); total * total];
    for j in 0..total {
        let basis = StateVector::basis_state(dims.to_vec(), j)?;
        let col = apply_unitary(&basis, u, targets)?;
        for (i, &a) in col.amplitudes().iter().enumerate() {
            entries[i * total + j] = a;
        }
    }
    UnitaryMatrix::new_unchecked(total, entries)
}

/// Partial trace of a density matrix onto the `keep` subsystems (given
/// order), tracing out the complement.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let (keep_offsets, traced_offsets, keep_dims) = state::split_offsets(rho.dims(), keep)?;
    let dk = keep_offsets.len();
    let total = rho.dim();
    let m = rho.matrix();
    let mut entries = vec![Complex64::new(0.0, 0.0); dk * dk];
    for (i, &ko_i) in keep_offsets.iter().enumerate() {
        for (j, &ko_j) in keep_offsets.iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for &t in &traced_offsets {
                acc += m[(ko_i + t) * total + ko_j + t];
            }
            entries[i * dk + j] = acc;
        }
    }
    DensityMatrix::new(keep_dims, entries)
}

/// Overlap fidelity `|<a|b>|^2` between pure states of equal total dimension.
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr())
}

/// Fidelity `<s|rho|s>` between a pure state and a density matrix.
pub fn fidelity_with_mixed(s: &StateVector, rho: &DensityMatrix) -> Result<f64> {
    let n = s.dim();
    if rho.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: rho.dim(),
        });
    }
    let amps = s.amplitudes();
    let m = rho.matrix();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        let ai = amps[i];
        if ai.re == 0.0 && ai.im == 0.0 {
            continue;
        }
        let row = &m[i * n..(i + 1) * n];
        let rs: Complex64 = row.iter().zip(amps).map(|(r, a)| r * a).sum();
        acc += ai.conj() * rs;
    }
    Ok(acc.re)
}

/// Largest Schmidt coefficient of a pure state across a bipartition.
///
/// `cut` lists the subsystems on one side; it must be a proper nonempty
/// subset. The coefficient is the largest singular value of the amplitude
/// matrix with rows indexed by the cut side.
pub fn largest_schmidt_coefficient(s: &StateVector, cut: &[usize]) -> Result<f64> {
    if cut.is_empty() || cut.len() >= s.num_subsystems() {
        return Err(Error::InvalidCut);
    }
    let (cut_offsets, rest_offsets, _) = state::split_offsets(s.dims(), cut)?;
    let (rows, cols) = (cut_offsets.len(), rest_offsets.len());
    let amps = s.amplitudes();
    // Orient the matrix tall-side-down: singular values are unchanged and the
    // SVD cost scales with the square of the short side.
    let m = if rows <= cols {
        DMatrix::from_fn(rows, cols, |i, j| amps[cut_offsets[i] + rest_offsets[j]])
    } else {
        DMatrix::from_fn(cols, rows, |j, i| amps[cut_offsets[i] + rest_offsets[j]])
    };
    let svd = m.svd(false, false);
    Ok(svd
        .singular_values
        .iter()
        .fold(0.0f64, |acc, &v| acc.max(v)))
}

/// Tests whether a pure state is a product across the cut: the Schmidt
/// defect `1 - lambda_max^2` must be at most `tol`.
pub fn is_product_across(s: &StateVector, cut: &[usize], tol: f64) -> Result<bool> {
    let lambda = largest_schmidt_coefficient(s, cut)?;
    Ok(1.0 - lambda * lambda <= tol)
}

/// Draws a random pure state: i.i.d. complex Gaussian amplitudes,
/// normalized (the uniform distribution on the unit sphere).
pub fn random_state<R: Rng + ?Sized>(dims: Vec<usize>, rng: &mut R) -> Result<StateVector> {
    let total = index::check_dims(&dims)?;
    let mut amps = Vec::with_capacity(total);
    for _ in 0..total {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        amps.push(Complex64::new(re, im));
    }
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in amps.iter_mut() {
        *a /= norm;
    }
    StateVector::new(dims, amps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn bell_pair() -> StateVector {
        let h = 0.5f64.sqrt();
        StateVector::new(
            vec![2, 2],
            vec![c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0)],
        )
        .unwrap()
    }

    #[test]
    fn apply_unitary_flips_a_middle_qubit() {
        let x = UnitaryMatrix::new(
            2,
            vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
        )
        .unwrap();
        let s = StateVector::basis_state(vec![2, 2, 2], 0b000).unwrap();
        let t = apply_unitary(&s, &x, &[1]).unwrap();
        assert_eq!(t.amplitude(0b010), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn apply_unitary_respects_target_order() {
        // A two-qubit swap-like check: apply |ab> -> |ba> permutation matrix
        // on targets [2, 0] of a three-qubit basis state.
        let mut entries = vec![c(0.0, 0.0); 16];
        for a in 0..2usize {
            for b in 0..2usize {
                entries[(b * 2 + a) * 4 + (a * 2 + b)] = c(1.0, 0.0);
            }
        }
        let swap = UnitaryMatrix::new(4, entries).unwrap();
        let s = StateVector::basis_state(vec![2, 2, 2], 0b100).unwrap();
        // Targets [2, 0] read (qubit2, qubit0) = (0, 1); swap writes (1, 0),
        // i.e. qubit2 becomes 1 and qubit0 becomes 0.
        let t = apply_unitary(&s, &swap, &[2, 0]).unwrap();
        assert_eq!(t.amplitude(0b001), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn apply_unitary_validates_targets() {
        let s = StateVector::basis_state(vec![2, 2], 0).unwrap();
        let u = identity(2).unwrap();
        assert!(apply_unitary(&s, &u, &[2]).is_err());
        assert!(apply_unitary(&s, &u, &[0, 0]).is_err());
        assert!(apply_unitary(&s, &u, &[]).is_err());
        assert!(apply_unitary(&s, &u, &[0, 1]).is_err());
    }

    #[test]
    fn embed_unitary_matches_apply() {
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        let u = haar_random_unitary(2, &mut rng).unwrap();
        let dims = [2usize, 2, 2];
        let big = embed_unitary(&u, &dims, &[1]).unwrap();
        let s = random_state(dims.to_vec(), &mut rng).unwrap();
        let via_apply = apply_unitary(&s, &u, &[1]).unwrap();
        let via_embed = apply_unitary(&s, &big, &[0, 1, 2]).unwrap();
        for i in 0..8 {
            assert!((via_apply.amplitude(i) - via_embed.amplitude(i)).norm() < 1e-13);
        }
    }

    #[test]
    fn partial_trace_of_product_state_recovers_factor() {
        let a = StateVector::new(vec![2], vec![c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        let b = StateVector::basis_state(vec![3], 1).unwrap();
        let rho = DensityMatrix::from_pure(&tensor_product(&a, &b).unwrap());
        let ra = partial_trace(&rho, &[0]).unwrap();
        let expect = DensityMatrix::from_pure(&a);
        for i in 0..2 {
            for j in 0..2 {
                assert!((ra.entry(i, j) - expect.entry(i, j)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn partial_trace_of_bell_pair_is_maximally_mixed() {
        let rho = DensityMatrix::from_pure(&bell_pair());
        for keep in [[0usize], [1usize]] {
            let r = partial_trace(&rho, &keep).unwrap();
            assert!((r.entry(0, 0).re - 0.5).abs() < 1e-12);
            assert!((r.entry(1, 1).re - 0.5).abs() < 1e-12);
            assert!(r.entry(0, 1).norm() < 1e-12);
        }
    }

    #[test]
    fn partial_trace_matches_pure_state_reduction() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let s = random_state(vec![2, 3, 2], &mut rng).unwrap();
        let rho = DensityMatrix::from_pure(&s);
        for keep in [vec![0usize], vec![1], vec![2], vec![0, 2], vec![2, 1]] {
            let a = partial_trace(&rho, &keep).unwrap();
            let b = s.reduced_density(&keep).unwrap();
            assert_eq!(a.dims(), b.dims());
            let n = a.dim();
            for i in 0..n {
                for j in 0..n {
                    assert!((a.entry(i, j) - b.entry(i, j)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn unitary_invariance_of_fidelity() {
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        let a = random_state(vec![4], &mut rng).unwrap();
        let b = random_state(vec![4], &mut rng).unwrap();
        let u = haar_random_unitary(4, &mut rng).unwrap();
        let f0 = fidelity(&a, &b).unwrap();
        let f1 = fidelity(
            &apply_unitary(&a, &u, &[0]).unwrap(),
            &apply_unitary(&b, &u, &[0]).unwrap(),
        )
        .unwrap();
        assert!((f0 - f1).abs() < 1e-12);
    }

    #[test]
    fn fidelity_with_mixed_matches_pure_case() {
        let mut rng = ChaCha12Rng::seed_from_u64(13);
        let a = random_state(vec![4], &mut rng).unwrap();
        let b = random_state(vec![4], &mut rng).unwrap();
        let f_pure = fidelity(&a, &b).unwrap();
        let f_mixed = fidelity_with_mixed(&a, &DensityMatrix::from_pure(&b)).unwrap();
        assert!((f_pure - f_mixed).abs() < 1e-12);
    }

    #[test]
    fn product_state_has_trivial_schmidt_defect() {
        let a = StateVector::new(vec![2], vec![c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        let b = StateVector::new(vec![3], vec![c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        let s = tensor_product(&a, &b).unwrap();
        let lambda = largest_schmidt_coefficient(&s, &[0]).unwrap();
        assert!((lambda - 1.0).abs() < 1e-12);
        assert!(is_product_across(&s, &[0], 1e-10).unwrap());
        assert!(is_product_across(&s, &[1], 1e-10).unwrap());
    }

    #[test]
    fn bell_pair_is_maximally_entangled() {
        let s = bell_pair();
        let lambda = largest_schmidt_coefficient(&s, &[0]).unwrap();
        assert!((lambda * lambda - 0.5).abs() < 1e-12);
        assert!(!is_product_across(&s, &[0], 1e-10).unwrap());
    }

    #[test]
    fn schmidt_cut_must_be_proper() {
        let s = bell_pair();
        assert!(largest_schmidt_coefficient(&s, &[]).is_err());
        assert!(largest_schmidt_coefficient(&s, &[0, 1]).is_err());
    }

    #[test]
    fn random_states_are_normalized_and_deterministic() {
        let mut rng = ChaCha12Rng::seed_from_u64(21);
        let a = random_state(vec![6], &mut rng).unwrap();
        assert!((a.norm() - 1.0).abs() < 1e-12);
        let mut rng2 = ChaCha12Rng::seed_from_u64(21);
        let b = random_state(vec![6], &mut rng2).unwrap();
        assert_eq!(a.amplitudes(), b.amplitudes());
    }
}
