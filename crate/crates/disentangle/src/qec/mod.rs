//! Quantum error correction by unitary decoding, with no syndrome
//! measurement anywhere in the pipeline.
//!
//! The encoder `E` maps `|z> (x) |a>` (logical qubit, ancilla block) to the
//! corrupted codeword `E_a |Z_0>`. Its inverse therefore sorts any
//! correctable damage into the ancilla: decoding a corrupted block yields
//! `|z> (x) |a>` — or, for coherent superpositions of errors, mixtures, and
//! environment entanglement, a *product* of the intact logical qubit with
//! some state of the ancilla (and environment) that soaked up the damage.
//! Nothing ever needs to be measured; the ancilla is simply discarded and
//! replaced ([`refresh_ancilla`]) before the next round.
//!
//! [`decode_and_verify`] runs the decoding and reports the facts a skeptic
//! would ask for: is the result really a product across the logical cut, how
//! close, what is the logical fidelity, and how is the (unmeasured) syndrome
//! distributed.

mod channel;
mod code;

pub use channel::{
    BystanderState, CouplingBranches, EnvironmentCoupling, MixedErrorChannel, WEIGHT_TOLERANCE,
};
pub use code::{CodeDescription, PauliError, PauliKind, QuantumCode, CODEWORD_TOLERANCE};

use num_complex::Complex64;

use crate::linalg::index::strides_of;
use crate::linalg::{
    apply_unitary, embed_unitary, fidelity_with_mixed, largest_schmidt_coefficient, partial_trace,
    tensor_product, DensityMatrix, StateVector, UnitaryMatrix,
};
use crate::{Error, Result};

/// Tolerance on error-basis orthonormality (and encoder unitarity).
pub const ERROR_BASIS_TOLERANCE: f64 = 1e-10;

/// Tolerance on superposed-error coefficient normalization.
pub const COEFFICIENT_TOLERANCE: f64 = 1e-12;

/// The corrupted codewords `E_a |Z_0>`, ordered `(z, a)` big-endian to
/// mirror the logical basis `|z> (x) |a>`: index `z * 2^(n-1) + a`.
///
/// For a code flagged complete, verifies that the vectors form an
/// orthonormal basis of the code block within [`ERROR_BASIS_TOLERANCE`].
pub fn build_error_basis(code: &QuantumCode) -> Result<Vec<StateVector>> {
    let s_count = code.syndrome_count();
    let mut basis = Vec::with_capacity(2 * s_count);
    for z in 0..2 {
        for a in 0..s_count {
            basis.push(code.apply_syndrome_error(code.codeword(z), a)?);
        }
    }
    if code.complete() {
        let deviation = basis_gram_deviation(&basis);
        if deviation > ERROR_BASIS_TOLERANCE {
            return Err(Error::ErrorBasisNotOrthonormal { deviation });
        }
    }
    Ok(basis)
}

/// The encoding unitary `E`: column `z * 2^(n-1) + a` is `E_a |Z_0>`, so
/// `E (|z> (x) |a>)` is the corrupted codeword and `E^dagger` decodes.
///
/// Requires the error basis to be orthonormal within
/// [`ERROR_BASIS_TOLERANCE`] regardless of the completeness flag — that is
/// exactly the condition for `E` to be unitary.
pub fn build_encoder(code: &QuantumCode) -> Result<UnitaryMatrix> {
    let basis = build_error_basis(code)?;
    if !code.complete() {
        let deviation = basis_gram_deviation(&basis);
        if deviation > ERROR_BASIS_TOLERANCE {
            return Err(Error::ErrorBasisNotOrthonormal { deviation });
        }
    }
    let n = basis.len();
    let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
    for (col, vector) in basis.iter().enumerate() {
        for (row, &a) in vector.amplitudes().iter().enumerate() {
            entries[row * n + col] = a;
        }
    }
    UnitaryMatrix::new_unchecked(n, entries)
}

fn basis_gram_deviation(basis: &[StateVector]) -> f64 {
    let mut deviation = 0.0f64;
    for i in 0..basis.len() {
        for j in i..basis.len() {
            let g = basis[i]
                .inner(&basis[j])
                .expect("basis vectors share one dimension");
            let expected = if i == j { 1.0 } else { 0.0 };
            deviation = deviation.max((g - Complex64::new(expected, 0.0)).norm());
        }
    }
    deviation
}

/// Encodes a bare logical qubit: adjoins a fresh ancilla block in `|0...0>`
/// and applies the encoder.
pub fn encode(code: &QuantumCode, logical: &StateVector) -> Result<StateVector> {
    if logical.dims() != [2] {
        return Err(Error::DecoderShape {
            context: "a single logical qubit",
            actual: logical.dim(),
        });
    }
    let ancilla = StateVector::basis_state(vec![2; code.n_ancilla()], 0)?;
    let full = tensor_product(logical, &ancilla)?;
    let targets: Vec<usize> = (0..code.n_physical()).collect();
    apply_unitary(&full, &build_encoder(code)?, &targets)
}

/// Encodes the logical qubit of a larger computer state in place: the
/// bystander qubits are untouched, the logical qubit (last subsystem of the
/// computer) becomes the first qubit of the code block.
pub fn encode_with_bystanders(
    code: &QuantumCode,
    computer: &BystanderState,
) -> Result<StateVector> {
    let ancilla = StateVector::basis_state(vec![2; code.n_ancilla()], 0)?;
    let full = tensor_product(computer.state(), &ancilla)?;
    let nb = computer.bystander_count();
    let targets: Vec<usize> = (nb..nb + code.n_physical()).collect();
    apply_unitary(&full, &build_encoder(code)?, &targets)
}

/// Adjoins the coupling's environment (in its initial state) as a trailing
/// subsystem.
pub fn attach_environment(
    s: &StateVector,
    coupling: &EnvironmentCoupling,
) -> Result<StateVector> {
    tensor_product(s, coupling.initial_env())
}

/// Applies a coherent superposition of correctable errors:
/// `sum_a c_a E_a |state>`. The coefficients must be normalized within
/// [`COEFFICIENT_TOLERANCE`]; for a state in the code space the branches are
/// orthonormal, so the output is again a unit vector.
pub fn apply_superposed_error(
    code: &QuantumCode,
    encoded: &StateVector,
    coefficients: &[Complex64],
) -> Result<StateVector> {
    if encoded.dims() != vec![2; code.n_physical()] {
        return Err(Error::DecoderShape {
            context: "a code block of physical qubits",
            actual: encoded.dim(),
        });
    }
    if coefficients.len() != code.syndrome_count() {
        return Err(Error::LengthMismatch {
            expected: code.syndrome_count(),
            actual: coefficients.len(),
        });
    }
    let sum_sq: f64 = coefficients.iter().map(|c| c.norm_sqr()).sum();
    if (sum_sq - 1.0).abs() > COEFFICIENT_TOLERANCE {
        return Err(Error::CoefficientsNotNormalized {
            deviation: (sum_sq - 1.0).abs(),
        });
    }
    // Remove the residual ulp-level drift so downstream norm checks see an
    // exactly normalized combination.
    let scale = sum_sq.sqrt().recip();
    let mut acc = vec![Complex64::new(0.0, 0.0); encoded.dim()];
    for (a, &c) in coefficients.iter().enumerate() {
        if c.re == 0.0 && c.im == 0.0 {
            continue;
        }
        let branch = code.apply_syndrome_error(encoded, a)?;
        let weight = c * scale;
        for (slot, b) in acc.iter_mut().zip(branch.amplitudes()) {
            *slot += weight * b;
        }
    }
    StateVector::new(encoded.dims().to_vec(), acc)
}

/// Applies a mixed-unitary channel: `rho -> sum_j p_j U_j rho U_j^dagger`.
pub fn apply_mixed_error(
    channel: &MixedErrorChannel,
    rho: &DensityMatrix,
) -> Result<DensityMatrix> {
    if channel.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            actual: channel.dim(),
        });
    }
    let mut terms = Vec::with_capacity(channel.terms().len());
    for (w, u) in channel.terms() {
        terms.push((*w, rho.transformed(u)?));
    }
    DensityMatrix::mixture(&terms)
}

/// Entangles one physical qubit with the trailing environment subsystem via
/// the coupling unitary.
pub fn apply_environment_coupling(
    s: &StateVector,
    coupling: &EnvironmentCoupling,
    qubit: usize,
) -> Result<StateVector> {
    let n_sub = s.num_subsystems();
    if n_sub < 2 {
        return Err(Error::DecoderShape {
            context: "a system with a trailing environment subsystem",
            actual: n_sub,
        });
    }
    let env_index = n_sub - 1;
    if s.dims()[env_index] != coupling.env_dim() {
        return Err(Error::DimensionMismatch {
            expected: coupling.env_dim(),
            actual: s.dims()[env_index],
        });
    }
    if qubit >= env_index {
        return Err(Error::SubsystemOutOfRange {
            index: qubit,
            count: env_index,
        });
    }
    if s.dims()[qubit] != 2 {
        return Err(Error::SubsystemDimension {
            dim: s.dims()[qubit],
        });
    }
    apply_unitary(s, coupling.unitary(), &[qubit, env_index])
}

/// One scalar product `<X_{Zy}, X_{Z'y'}>` compared with its required value
/// `1/2 delta_ZZ' delta_yy'`.
#[derive(Debug, Clone, Copy)]
pub struct ScalarProductCheck {
    pub z: usize,
    pub y: usize,
    pub z_prime: usize,
    pub y_prime: usize,
    pub value: Complex64,
    pub expected: f64,
    pub deviation: f64,
}

/// Orthogonality diagnostics for one singled-out physical qubit.
///
/// Each codeword splits as `X_{Z0} (x) |0> + X_{Z1} (x) |1>` on that qubit.
/// A code corrects arbitrary entanglement of the qubit with an environment
/// exactly when the eight class vectors (codeword, phase-, bit-, and
/// combined-error images for both logical values) are mutually orthogonal;
/// the simplest sufficient condition is the ten scalar-product identities
/// reported here.
#[derive(Debug, Clone)]
pub struct OrthogonalityReport {
    pub qubit: usize,
    /// The ten independent scalar products among the four `X_{Zy}`.
    pub scalar_products: Vec<ScalarProductCheck>,
    /// Largest deviation among the ten scalar products.
    pub max_scalar_deviation: f64,
    /// Orthonormality deviation of the eight class vectors.
    pub class_vector_deviation: f64,
}

impl OrthogonalityReport {
    /// Largest deviation across both diagnostics.
    pub fn max_deviation(&self) -> f64 {
        self.max_scalar_deviation.max(self.class_vector_deviation)
    }

    /// Whether every diagnostic is within `tol`.
    pub fn satisfied(&self, tol: f64) -> bool {
        self.max_deviation() <= tol
    }
}

/// Checks the ten scalar-product conditions and the eight-class-vector
/// orthogonality at one physical qubit of the code.
pub fn check_orthogonality_conditions(
    code: &QuantumCode,
    qubit: usize,
) -> Result<OrthogonalityReport> {
    let n = code.n_physical();
    if qubit >= n {
        return Err(Error::SubsystemOutOfRange {
            index: qubit,
            count: n,
        });
    }
    let stride = 1usize << (n - 1 - qubit);
    let half = 1usize << (n - 1);
    let component = |z: usize, y: usize| -> Vec<Complex64> {
        let cw = code.codeword(z);
        (0..half)
            .map(|rest| {
                let (high, low) = (rest / stride, rest % stride);
                cw.amplitude(high * 2 * stride + y * stride + low)
            })
            .collect()
    };
    let labels = [(0usize, 0usize), (0, 1), (1, 0), (1, 1)];
    let components: Vec<Vec<Complex64>> = labels.iter().map(|&(z, y)| component(z, y)).collect();
    let dot = |a: &[Complex64], b: &[Complex64]| -> Complex64 {
        a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
    };
    let mut scalar_products = Vec::with_capacity(10);
    let mut max_scalar_deviation = 0.0f64;
    for i in 0..4 {
        for j in i..4 {
            let (z, y) = labels[i];
            let (z_prime, y_prime) = labels[j];
            let value = dot(&components[i], &components[j]);
            let expected = if z == z_prime && y == y_prime { 0.5 } else { 0.0 };
            let deviation = (value - Complex64::new(expected, 0.0)).norm();
            max_scalar_deviation = max_scalar_deviation.max(deviation);
            scalar_products.push(ScalarProductCheck {
                z,
                y,
                z_prime,
                y_prime,
                value,
                expected,
                deviation,
            });
        }
    }
    // The eight class vectors: for each logical value, the intact codeword
    // and its phase-, bit-, and combined-error images, assembled directly
    // from the X components.
    let assemble = |x_at_0: &[Complex64], s0: f64, x_at_1: &[Complex64], s1: f64| -> Vec<Complex64> {
        let mut full = vec![Complex64::new(0.0, 0.0); 1 << n];
        for rest in 0..half {
            let (high, low) = (rest / stride, rest % stride);
            full[high * 2 * stride + low] = s0 * x_at_0[rest];
            full[high * 2 * stride + stride + low] = s1 * x_at_1[rest];
        }
        full
    };
    let mut class_vectors = Vec::with_capacity(8);
    for z in 0..2 {
        let x0 = &components[2 * z];
        let x1 = &components[2 * z + 1];
        class_vectors.push(assemble(x0, 1.0, x1, 1.0)); // intact codeword
        class_vectors.push(assemble(x0, 1.0, x1, -1.0)); // phase error
        class_vectors.push(assemble(x1, 1.0, x0, 1.0)); // bit error
        class_vectors.push(assemble(x1, -1.0, x0, 1.0)); // combined error
    }
    let mut class_vector_deviation = 0.0f64;
    for i in 0..8 {
        for j in i..8 {
            let g = dot(&class_vectors[i], &class_vectors[j]);
            let expected = if i == j { 1.0 } else { 0.0 };
            class_vector_deviation =
                class_vector_deviation.max((g - Complex64::new(expected, 0.0)).norm());
        }
    }
    Ok(OrthogonalityReport {
        qubit,
        scalar_products,
        max_scalar_deviation,
        class_vector_deviation,
    })
}

/// What unitary decoding left behind, and whether it worked.
#[derive(Debug, Clone)]
pub struct DecodeReport {
    /// Whether the decoded state factorizes across the logical cut at the
    /// requested tolerance.
    pub is_product: bool,
    /// Factorization defect: `1 - lambda_max^2` for pure states, the largest
    /// elementwise deviation from the product of marginals for mixed ones.
    pub product_defect: f64,
    /// Fidelity of the decoded logical side against the expected state.
    pub logical_fidelity: f64,
    /// Born distribution of the (never measured) ancilla block.
    pub syndrome_distribution: Vec<f64>,
}

/// Applies `E^dagger` to the code block of a corrupted pure state and
/// verifies the outcome.
///
/// `expected` is the state the logical side should return to: the logical
/// qubit alone, or bystanders plus logical qubit (logical last). The
/// corrupted state must be laid out as bystanders, code block, and an
/// optional trailing environment.
pub fn decode_and_verify(
    code: &QuantumCode,
    corrupted: &StateVector,
    expected: &StateVector,
    tol: f64,
) -> Result<DecodeReport> {
    if expected.dims().iter().any(|&d| d != 2) {
        return Err(Error::DecoderShape {
            context: "a qubit-shaped expected state",
            actual: expected.dim(),
        });
    }
    let nb = expected.num_subsystems() - 1;
    let n = code.n_physical();
    let dims = corrupted.dims();
    let plain = dims.len() == nb + n;
    let with_env = dims.len() == nb + n + 1;
    if (!plain && !with_env) || dims[..nb + n].iter().any(|&d| d != 2) {
        return Err(Error::DecoderShape {
            context: "bystanders, a code block, and an optional environment",
            actual: corrupted.dim(),
        });
    }
    let targets: Vec<usize> = (nb..nb + n).collect();
    let decoded = apply_unitary(corrupted, &build_encoder(code)?.dagger(), &targets)?;
    let logical_side: Vec<usize> = (0..=nb).collect();
    let lambda = largest_schmidt_coefficient(&decoded, &logical_side)?;
    let product_defect = (1.0 - lambda * lambda).max(0.0);
    let reduced = decoded.reduced_density(&logical_side)?;
    let logical_fidelity = fidelity_with_mixed(expected, &reduced)?;
    let syndrome_distribution = pure_syndrome_marginal(&decoded, nb, n);
    Ok(DecodeReport {
        is_product: product_defect <= tol,
        product_defect,
        logical_fidelity,
        syndrome_distribution,
    })
}

/// Mixed-state version of [`decode_and_verify`]: conjugates by the embedded
/// `E^dagger`, then compares the decoded matrix with the tensor product of
/// its logical and remainder marginals (elementwise).
pub fn decode_and_verify_mixed(
    code: &QuantumCode,
    corrupted: &DensityMatrix,
    expected: &StateVector,
    tol: f64,
) -> Result<DecodeReport> {
    if expected.dims().iter().any(|&d| d != 2) {
        return Err(Error::DecoderShape {
            context: "a qubit-shaped expected state",
            actual: expected.dim(),
        });
    }
    let nb = expected.num_subsystems() - 1;
    let n = code.n_physical();
    let dims = corrupted.dims().to_vec();
    if dims.len() != nb + n || dims.iter().any(|&d| d != 2) {
        return Err(Error::DecoderShape {
            context: "bystander qubits followed by a code block",
            actual: corrupted.dim(),
        });
    }
    let targets: Vec<usize> = (nb..nb + n).collect();
    let decoder = embed_unitary(&build_encoder(code)?.dagger(), &dims, &targets)?;
    let decoded = corrupted.transformed(&decoder)?;
    let logical_side: Vec<usize> = (0..=nb).collect();
    let remainder_side: Vec<usize> = (nb + 1..dims.len()).collect();
    let logical = partial_trace(&decoded, &logical_side)?;
    let remainder = partial_trace(&decoded, &remainder_side)?;
    let product = logical.tensor(&remainder)?;
    let mut product_defect = 0.0f64;
    for (a, b) in decoded.matrix().iter().zip(product.matrix()) {
        product_defect = product_defect.max((a - b).norm());
    }
    let logical_fidelity = fidelity_with_mixed(expected, &logical)?;
    let syndrome_distribution = mixed_syndrome_marginal(&decoded, nb, n);
    Ok(DecodeReport {
        is_product: product_defect <= tol,
        product_defect,
        logical_fidelity,
        syndrome_distribution,
    })
}

/// Discards the (corrupted, unmeasured) ancilla of a decoded block and
/// installs a fresh `|0...0>` ancilla, ready for re-encoding.
pub fn refresh_ancilla(code: &QuantumCode, decoded: &DensityMatrix) -> Result<DensityMatrix> {
    let n = code.n_physical();
    if decoded.dims() != vec![2; n] {
        return Err(Error::DecoderShape {
            context: "a decoded code block (logical qubit plus ancilla)",
            actual: decoded.dim(),
        });
    }
    let logical = partial_trace(decoded, &[0])?;
    let fresh = DensityMatrix::from_pure(&StateVector::basis_state(vec![2; n - 1], 0)?);
    logical.tensor(&fresh)
}

fn pure_syndrome_marginal(decoded: &StateVector, nb: usize, n: usize) -> Vec<f64> {
    let strides = strides_of(decoded.dims());
    let mut out = vec![0.0f64; 1 << (n - 1)];
    for (index, a) in decoded.amplitudes().iter().enumerate() {
        if a.re == 0.0 && a.im == 0.0 {
            continue;
        }
        out[syndrome_of(index, &strides, nb, n)] += a.norm_sqr();
    }
    out
}

fn mixed_syndrome_marginal(decoded: &DensityMatrix, nb: usize, n: usize) -> Vec<f64> {
    let strides = strides_of(decoded.dims());
    let mut out = vec![0.0f64; 1 << (n - 1)];
    for (index, p) in decoded.diagonal().into_iter().enumerate() {
        out[syndrome_of(index, &strides, nb, n)] += p;
    }
    out
}

fn syndrome_of(index: usize, strides: &[usize], nb: usize, n: usize) -> usize {
    strides[nb + 1..nb + n]
        .iter()
        .fold(0, |syndrome, &stride| syndrome * 2 + (index / stride) % 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random_state;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn error_basis_is_orthonormal_and_ordered() {
        let code = QuantumCode::five_qubit();
        let basis = build_error_basis(&code).unwrap();
        assert_eq!(basis.len(), 32);
        assert!(basis_gram_deviation(&basis) < 1e-14);
        // Index (z, a) big-endian: entry 17 is X1 applied to codeword 1.
        let expect = code.apply_syndrome_error(code.codeword(1), 1).unwrap();
        assert_eq!(basis[17].amplitudes(), expect.amplitudes());
        assert_eq!(basis[0].amplitudes(), code.codeword(0).amplitudes());
    }

    #[test]
    fn bit_flip_basis_is_orthonormal_despite_incompleteness() {
        let code = QuantumCode::bit_flip();
        let basis = build_error_basis(&code).unwrap();
        assert_eq!(basis.len(), 8);
        assert!(basis_gram_deviation(&basis) < 1e-14);
    }

    #[test]
    fn incomplete_error_set_is_rejected_by_encoder() {
        // A "code" whose two errors collide: X1 applied to |00> and |11>
        // does not stay orthogonal to the Z1 images, so E is not unitary.
        let cw0 = StateVector::basis_state(vec![2, 2], 0).unwrap();
        let cw1 = StateVector::basis_state(vec![2, 2], 1).unwrap();
        let code = QuantumCode::new(
            "collide",
            cw0,
            cw1,
            vec![PauliError {
                kind: PauliKind::Z,
                qubit: 1,
            }],
            false,
        )
        .unwrap();
        // Z1 fixes |00> (syndrome 1 duplicates syndrome 0 on codeword 0).
        let err = build_encoder(&code).unwrap_err();
        assert!(matches!(err, Error::ErrorBasisNotOrthonormal { .. }));
    }

    #[test]
    fn encoder_maps_logical_basis_to_codewords() {
        for code in [QuantumCode::five_qubit(), QuantumCode::bit_flip()] {
            let encoder = build_encoder(&code).unwrap();
            assert!(encoder.unitarity_deviation() < 1e-12);
            // Real orthogonal: all imaginary parts vanish.
            assert!(encoder.matrix().iter().all(|e| e.im == 0.0));
            for z in 0..2 {
                let logical = StateVector::basis_state(vec![2], z).unwrap();
                let encoded = encode(&code, &logical).unwrap();
                let overlap = encoded.inner(code.codeword(z)).unwrap();
                assert!((overlap - Complex64::new(1.0, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn encode_rejects_non_qubit_input() {
        let code = QuantumCode::bit_flip();
        let wide = StateVector::basis_state(vec![3], 0).unwrap();
        assert!(encode(&code, &wide).is_err());
        let pair = StateVector::basis_state(vec![2, 2], 0).unwrap();
        assert!(encode(&code, &pair).is_err());
    }

    #[test]
    fn encoded_logical_qubit_is_locally_maximally_mixed() {
        // A superposed logical qubit spreads over the block: every physical
        // qubit of the five-qubit code ends up maximally mixed.
        let mut rng = ChaCha12Rng::seed_from_u64(31);
        let code = QuantumCode::five_qubit();
        let logical = random_state(vec![2], &mut rng).unwrap();
        let encoded = encode(&code, &logical).unwrap();
        for qubit in 0..5 {
            let r = encoded.reduced_density(&[qubit]).unwrap();
            assert!((r.entry(0, 0).re - 0.5).abs() < 1e-12);
            assert!(r.entry(0, 1).norm() < 1e-12);
        }
    }

    #[test]
    fn superposed_error_validates_coefficients() {
        let code = QuantumCode::bit_flip();
        let encoded = encode(&code, &StateVector::basis_state(vec![2], 0).unwrap()).unwrap();
        let c = |re: f64| Complex64::new(re, 0.0);
        assert!(matches!(
            apply_superposed_error(&code, &encoded, &[c(1.0)]).unwrap_err(),
            Error::LengthMismatch { expected: 4, .. }
        ));
        assert!(matches!(
            apply_superposed_error(&code, &encoded, &[c(1.0), c(1.0), c(0.0), c(0.0)])
                .unwrap_err(),
            Error::CoefficientsNotNormalized { .. }
        ));
        let half = c(0.5);
        let out = apply_superposed_error(&code, &encoded, &[half, half, half, half]).unwrap();
        assert!((out.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn environment_coupling_checks_layout() {
        let mut rng = ChaCha12Rng::seed_from_u64(8);
        let code = QuantumCode::bit_flip();
        let coupling = EnvironmentCoupling::haar_random(4, &mut rng).unwrap();
        let encoded = encode(&code, &StateVector::basis_state(vec![2], 0).unwrap()).unwrap();
        let with_env = attach_environment(&encoded, &coupling).unwrap();
        assert_eq!(with_env.dims(), &[2, 2, 2, 4]);
        assert!(apply_environment_coupling(&with_env, &coupling, 1).is_ok());
        // The environment slot itself is not a qubit target.
        assert!(apply_environment_coupling(&with_env, &coupling, 3).is_err());
        // Without the environment attached the dimensions cannot match.
        assert!(apply_environment_coupling(&encoded, &coupling, 0).is_err());
    }

    #[test]
    fn syndrome_marginal_reads_ancilla_digits() {
        // |1> (x) |10> has syndrome bits 10 -> label 2.
        let s = StateVector::basis_state(vec![2, 2, 2], 0b110).unwrap();
        let marginal = pure_syndrome_marginal(&s, 0, 3);
        assert_eq!(marginal, vec![0.0, 0.0, 1.0, 0.0]);
        let rho = DensityMatrix::from_pure(&s);
        assert_eq!(mixed_syndrome_marginal(&rho, 0, 3), vec![0.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn refresh_ancilla_resets_the_block() {
        let code = QuantumCode::bit_flip();
        let mut rng = ChaCha12Rng::seed_from_u64(12);
        let decoded = DensityMatrix::from_pure(&random_state(vec![2, 2, 2], &mut rng).unwrap());
        let refreshed = refresh_ancilla(&code, &decoded).unwrap();
        assert_eq!(refreshed.dims(), &[2, 2, 2]);
        // Ancilla back in |00>: only indices 0 and 4 (ancilla digits 00)
        // carry diagonal weight.
        let diag = refreshed.diagonal();
        let off_block: f64 = diag
            .iter()
            .enumerate()
            .filter(|(i, _)| i % 4 != 0)
            .map(|(_, p)| p)
            .sum();
        assert!(off_block < 1e-14);
        let wrong = DensityMatrix::from_pure(&random_state(vec![2, 2], &mut rng).unwrap());
        assert!(refresh_ancilla(&code, &wrong).is_err());
    }
}
