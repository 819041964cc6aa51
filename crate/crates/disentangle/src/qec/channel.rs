use num_complex::Complex64;
use rand::Rng;

use crate::linalg::{
    apply_unitary, embed_unitary, haar_random_unitary, tensor_product, StateVector, UnitaryMatrix,
};
use crate::{Error, Result};

use super::code::QuantumCode;

/// Tolerance on mixture-weight normalization.
pub const WEIGHT_TOLERANCE: f64 = 1e-12;

/// A unitary coupling between one physical qubit and a small environment.
///
/// The coupling acts on (qubit, environment) ordered big-endian with the
/// qubit first; the environment starts in `initial_env`. Nothing else about
/// it is assumed — the decoding pipeline must cope with a completely unknown
/// interaction, which is the point of drawing it Haar-random in tests.
#[derive(Debug, Clone)]
pub struct EnvironmentCoupling {
    unitary: UnitaryMatrix,
    initial_env: StateVector,
}

/// The four environment branch vectors of a coupling: the images of
/// `|0> (x) eta` and `|1> (x) eta` split by the qubit's final basis state.
#[derive(Debug, Clone)]
pub struct CouplingBranches {
    /// Environment vector paired with `|0>` in the image of `|0> (x) eta`.
    pub mu: Vec<Complex64>,
    /// Paired with `|1>` in the image of `|0> (x) eta`.
    pub nu: Vec<Complex64>,
    /// Paired with `|0>` in the image of `|1> (x) eta`.
    pub sigma: Vec<Complex64>,
    /// Paired with `|1>` in the image of `|1> (x) eta`.
    pub tau: Vec<Complex64>,
}

impl EnvironmentCoupling {
    /// Builds a coupling from the joint unitary (dimension `2 * d`) and the
    /// environment's initial state (a single subsystem of dimension `d`).
    pub fn new(unitary: UnitaryMatrix, initial_env: StateVector) -> Result<Self> {
        if initial_env.num_subsystems() != 1 {
            return Err(Error::DecoderShape {
                context: "a single-subsystem environment state",
                actual: initial_env.num_subsystems(),
            });
        }
        let expected = 2 * initial_env.dim();
        if unitary.dim() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                actual: unitary.dim(),
            });
        }
        Ok(Self {
            unitary,
            initial_env,
        })
    }

    /// Haar-random coupling with the environment starting in its first basis
    /// state.
    pub fn haar_random<R: Rng + ?Sized>(env_dim: usize, rng: &mut R) -> Result<Self> {
        let unitary = haar_random_unitary(2 * env_dim, rng)?;
        let initial_env = StateVector::basis_state(vec![env_dim], 0)?;
        Self::new(unitary, initial_env)
    }

    /// Environment dimension `d`.
    pub fn env_dim(&self) -> usize {
        self.initial_env.dim()
    }

    /// The joint (qubit, environment) unitary.
    pub fn unitary(&self) -> &UnitaryMatrix {
        &self.unitary
    }

    /// The environment's initial state.
    pub fn initial_env(&self) -> &StateVector {
        &self.initial_env
    }

    /// Computes the four branch vectors by applying the coupling to
    /// `|z> (x) eta` for both qubit basis states and splitting the result.
    pub fn branches(&self) -> Result<CouplingBranches> {
        let d = self.env_dim();
        let mut halves = Vec::with_capacity(4);
        for z in 0..2 {
            let qubit = StateVector::basis_state(vec![2], z)?;
            let joint = tensor_product(&qubit, &self.initial_env)?;
            let image = apply_unitary(&joint, &self.unitary, &[0, 1])?;
            let amps = image.amplitudes();
            halves.push(amps[..d].to_vec());
            halves.push(amps[d..].to_vec());
        }
        let mut it = halves.into_iter();
        Ok(CouplingBranches {
            mu: it.next().unwrap(),
            nu: it.next().unwrap(),
            sigma: it.next().unwrap(),
            tau: it.next().unwrap(),
        })
    }
}

/// A mixed-unitary error channel: `rho -> sum_j p_j U_j rho U_j^dagger`.
#[derive(Debug, Clone)]
pub struct MixedErrorChannel {
    terms: Vec<(f64, UnitaryMatrix)>,
}

impl MixedErrorChannel {
    /// Builds a channel from `(weight, unitary)` pairs; weights must be
    /// positive and sum to one within [`WEIGHT_TOLERANCE`], and all
    /// unitaries must share one dimension.
    pub fn new(terms: Vec<(f64, UnitaryMatrix)>) -> Result<Self> {
        let Some((_, first)) = terms.first() else {
            return Err(Error::EmptyMixture);
        };
        let dim = first.dim();
        let sum: f64 = terms.iter().map(|(w, _)| w).sum();
        if terms.iter().any(|(w, _)| *w <= 0.0) || (sum - 1.0).abs() > WEIGHT_TOLERANCE {
            return Err(Error::InvalidMixtureWeights {
                deviation: (sum - 1.0).abs(),
            });
        }
        for (_, u) in &terms {
            if u.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: u.dim(),
                });
            }
        }
        Ok(Self { terms })
    }

    /// The `(weight, unitary)` pairs.
    pub fn terms(&self) -> &[(f64, UnitaryMatrix)] {
        &self.terms
    }

    /// Dimension the channel acts on.
    pub fn dim(&self) -> usize {
        self.terms[0].1.dim()
    }

    /// Uniform mixture of the identity and every correctable error of a
    /// code, each embedded into the full code block.
    pub fn uniform_pauli(code: &QuantumCode) -> Result<Self> {
        let dims = vec![2usize; code.n_physical()];
        let weight = 1.0 / code.syndrome_count() as f64;
        let mut terms = vec![(weight, crate::linalg::identity(1 << code.n_physical())?)];
        for e in code.errors() {
            terms.push((weight, embed_unitary(&e.kind.gate(), &dims, &[e.qubit])?));
        }
        Self::new(terms)
    }

    /// Random channel: `count` Haar-random single-qubit unitaries on random
    /// qubits of an `n_qubits` block, with random positive weights.
    pub fn random_single_qubit<R: Rng + ?Sized>(
        n_qubits: usize,
        count: usize,
        rng: &mut R,
    ) -> Result<Self> {
        if count == 0 {
            return Err(Error::EmptyMixture);
        }
        let dims = vec![2usize; n_qubits];
        let mut raw = Vec::with_capacity(count);
        for _ in 0..count {
            let qubit = rng.gen_range(0..n_qubits);
            let local = haar_random_unitary(2, rng)?;
            let weight: f64 = rng.gen_range(0.1..1.0);
            raw.push((weight, embed_unitary(&local, &dims, &[qubit])?));
        }
        let total: f64 = raw.iter().map(|(w, _)| w).sum();
        for (w, _) in raw.iter_mut() {
            *w /= total;
        }
        // Exact renormalization can still leave the sum one ulp off; patch
        // the first weight so the channel constructor's check is moot.
        let sum_rest: f64 = raw.iter().skip(1).map(|(w, _)| w).sum();
        raw[0].0 = 1.0 - sum_rest;
        Self::new(raw)
    }
}

/// The computer's state just before encoding: any number of bystander
/// qubits followed by the logical qubit (last subsystem), possibly
/// entangled with each other.
#[derive(Debug, Clone)]
pub struct BystanderState {
    state: StateVector,
}

impl BystanderState {
    /// Validates the shape: at least two subsystems, all qubits, with the
    /// logical qubit last.
    pub fn new(state: StateVector) -> Result<Self> {
        if state.num_subsystems() < 2 {
            return Err(Error::DecoderShape {
                context: "bystanders plus a logical qubit (at least two subsystems)",
                actual: state.num_subsystems(),
            });
        }
        if state.dims().iter().any(|&d| d != 2) {
            return Err(Error::DecoderShape {
                context: "qubit-shaped bystander and logical subsystems",
                actual: state.dim(),
            });
        }
        Ok(Self { state })
    }

    /// The underlying state.
    pub fn state(&self) -> &StateVector {
        &self.state
    }

    /// Number of bystander qubits (everything but the last subsystem).
    pub fn bystander_count(&self) -> usize {
        self.state.num_subsystems() - 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn branches_preserve_total_norm() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let coupling = EnvironmentCoupling::haar_random(4, &mut rng).unwrap();
        let b = coupling.branches().unwrap();
        let norm_sq = |v: &[Complex64]| v.iter().map(|a| a.norm_sqr()).sum::<f64>();
        assert!((norm_sq(&b.mu) + norm_sq(&b.nu) - 1.0).abs() < 1e-12);
        assert!((norm_sq(&b.sigma) + norm_sq(&b.tau) - 1.0).abs() < 1e-12);
        // Unitarity: the two branch pairs are images of orthogonal vectors.
        let dot = |a: &[Complex64], b: &[Complex64]| -> Complex64 {
            a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
        };
        let overlap = dot(&b.mu, &b.sigma) + dot(&b.nu, &b.tau);
        assert!(overlap.norm() < 1e-12);
    }

    #[test]
    fn coupling_validates_shapes() {
        let mut rng = ChaCha12Rng::seed_from_u64(6);
        let u6 = haar_random_unitary(6, &mut rng).unwrap();
        let env4 = StateVector::basis_state(vec![4], 0).unwrap();
        assert!(matches!(
            EnvironmentCoupling::new(u6, env4).unwrap_err(),
            Error::DimensionMismatch { expected: 8, actual: 6 }
        ));
        let u4 = haar_random_unitary(4, &mut rng).unwrap();
        let env22 = StateVector::basis_state(vec![2, 2], 0).unwrap();
        assert!(EnvironmentCoupling::new(u4, env22).is_err());
    }

    #[test]
    fn mixed_channel_validates_weights_and_dims() {
        let id = crate::linalg::identity(2).unwrap();
        assert!(MixedErrorChannel::new(vec![]).is_err());
        assert!(MixedErrorChannel::new(vec![(0.5, id.clone()), (0.4, id.clone())]).is_err());
        let id4 = crate::linalg::identity(4).unwrap();
        assert!(MixedErrorChannel::new(vec![(0.5, id.clone()), (0.5, id4)]).is_err());
        let ok = MixedErrorChannel::new(vec![(1.0, id)]).unwrap();
        assert_eq!(ok.dim(), 2);
    }

    #[test]
    fn uniform_pauli_channel_covers_all_syndromes() {
        let code = QuantumCode::five_qubit();
        let channel = MixedErrorChannel::uniform_pauli(&code).unwrap();
        assert_eq!(channel.terms().len(), 16);
        assert!(channel
            .terms()
            .iter()
            .all(|(w, u)| (*w - 0.0625).abs() < 1e-15 && u.dim() == 32));
    }

    #[test]
    fn random_channel_is_reproducible() {
        let mut a = ChaCha12Rng::seed_from_u64(9);
        let mut b = ChaCha12Rng::seed_from_u64(9);
        let ca = MixedErrorChannel::random_single_qubit(3, 4, &mut a).unwrap();
        let cb = MixedErrorChannel::random_single_qubit(3, 4, &mut b).unwrap();
        let sum: f64 = ca.terms().iter().map(|(w, _)| w).sum();
        assert!((sum - 1.0).abs() < 1e-15);
        for ((wa, ua), (wb, ub)) in ca.terms().iter().zip(cb.terms()) {
            assert_eq!(wa, wb);
            assert_eq!(ua.matrix(), ub.matrix());
        }
    }

    #[test]
    fn bystander_state_needs_qubits() {
        let ok = StateVector::basis_state(vec![2, 2], 0).unwrap();
        assert_eq!(BystanderState::new(ok).unwrap().bystander_count(), 1);
        let single = StateVector::basis_state(vec![2], 0).unwrap();
        assert!(BystanderState::new(single).is_err());
        let wide = StateVector::basis_state(vec![2, 3], 0).unwrap();
        assert!(BystanderState::new(wide).is_err());
    }
}
