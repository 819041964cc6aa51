//! Numerical demonstrations that a quantum register can be disentangled from
//! the rest of a computation without ever being measured.
//!
//! The crate builds two desk-scale experiments on top of a small dense
//! linear-algebra core:
//!
//! * [`period`] — period finding for a function `f` promised periodic on
//!   `0..K`. The entangled two-register state is pushed through a discrete
//!   Fourier transform, and the output distribution is computed three ways:
//!   measuring the second register first, tracing it out, or keeping the full
//!   state and marginalizing at the end. All three agree to near machine
//!   precision, which is the whole point: the second register never has to be
//!   touched.
//! * [`qec`] — quantum error correction by unitary decoding alone. A logical
//!   qubit is spread over a small code block, corrupted (deterministically,
//!   coherently, as a mixture, or by entangling it with an environment), and
//!   recovered by applying the inverse encoder. No syndrome is read out; the
//!   damage is left behind in the ancilla block as a disentangled by-product.
//!
//! [`linalg`] holds the state/operator types and generic operations,
//! [`registers`] the two-register bookkeeping (indexing, marginals,
//! collapse) used by the period-finding pipeline.

pub mod linalg;
pub mod period;
pub mod qec;
pub mod registers;

pub use linalg::{DensityMatrix, StateVector, UnitaryMatrix};

/// Library version string, embedded in CLI reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Hard cap on the total dimension of any state or operator.
///
/// Keeps every dense kernel in this crate comfortably inside desk-scale
/// memory/time budgets. The largest built-in experiment (period finding with
/// modulus 21) needs `K * M = 1024 * 32 = 32768`, which sits exactly at the
/// cap.
pub const MAX_TOTAL_DIMENSION: usize = 1 << 15;

/// Errors reported by every fallible operation in the crate.
#[derive(Debug, thiserror::Error)]
#[non_exhaustive]
pub enum Error {
    /// An amplitude or matrix buffer does not match the declared dimensions.
    #[error("buffer length {actual} does not match declared dimension {expected}")]
    LengthMismatch { expected: usize, actual: usize },

    /// A subsystem dimension smaller than 2 was requested.
    #[error("subsystem dimension {dim} is invalid (every subsystem must have dimension >= 2)")]
    SubsystemDimension { dim: usize },

    /// A total dimension exceeded [`MAX_TOTAL_DIMENSION`].
    #[error("total dimension {dim} exceeds the supported maximum {max}")]
    DimensionTooLarge { dim: usize, max: usize },

    /// A state vector is not normalized.
    #[error("state vector is not normalized: |norm^2 - 1| = {deviation:.3e}")]
    NotNormalized { deviation: f64 },

    /// A matrix expected to be Hermitian is not.
    #[error("matrix is not Hermitian: max |m - m^dagger| = {deviation:.3e}")]
    NotHermitian { deviation: f64 },

    /// A density matrix trace differs from one.
    #[error("density matrix trace deviates from 1 by {deviation:.3e}")]
    TraceNotOne { deviation: f64 },

    /// A density matrix has a significantly negative eigenvalue.
    #[error("density matrix has negative eigenvalue {eigenvalue:.3e}")]
    NegativeEigenvalue { eigenvalue: f64 },

    /// A matrix expected to be unitary is not.
    #[error("matrix is not unitary: max |u^dagger u - id| = {deviation:.3e}")]
    NotUnitary { deviation: f64 },

    /// Two objects that must share a dimension do not.
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    /// A subsystem index is out of range.
    #[error("subsystem index {index} out of range for {count} subsystems")]
    SubsystemOutOfRange { index: usize, count: usize },

    /// A subsystem list contains a repeated index.
    #[error("subsystem index {index} listed more than once")]
    DuplicateSubsystem { index: usize },

    /// A subsystem list that must be nonempty is empty.
    #[error("subsystem list must be nonempty")]
    EmptySubsystemList,

    /// A bipartition cut is empty or covers every subsystem.
    #[error("cut must be a proper nonempty subset of the subsystems")]
    InvalidCut,

    /// A probability is significantly negative.
    #[error("probability {value:.3e} is below the negative-roundoff budget")]
    NegativeProbability { value: f64 },

    /// A probability vector does not sum to one.
    #[error("probabilities sum to 1 + {deviation:.3e}, outside tolerance")]
    ProbabilitySum { deviation: f64 },

    /// An outcome label is out of range for its register or distribution.
    #[error("outcome {outcome} out of range for {count} outcomes")]
    OutcomeOutOfRange { outcome: usize, count: usize },

    /// A forced collapse asked for an outcome carrying no probability mass.
    #[error("cannot collapse onto outcome {outcome}: probability {probability:.3e} is zero")]
    ZeroProbabilityOutcome { outcome: usize, probability: f64 },

    /// A register layout does not match the state it is applied to.
    #[error("register layout expects total dimension {expected}, state has {actual}")]
    LayoutMismatch { expected: usize, actual: usize },

    /// A period-finding modulus smaller than 2 was requested.
    #[error("modulus {modulus} is invalid (must be at least 2)")]
    ModulusTooSmall { modulus: u64 },

    /// The base of a modular-exponentiation function shares a factor with the
    /// modulus, so the powers of the base are not periodic from x = 0.
    #[error("base {base} is not coprime to modulus {modulus}")]
    NotCoprime { base: u64, modulus: u64 },

    /// The first register is too small for reliable period extraction.
    #[error("first register of 2^{k} points is too small: need 2^k >= 2*N^2 = {required}")]
    RegisterTooSmall { k: u32, required: u64 },

    /// A value table defining a periodic function repeats a value inside one
    /// period, so its true period is shorter than promised.
    #[error("value table repeats {value} inside one period (positions {first} and {second})")]
    TableNotInjective { value: u64, first: usize, second: usize },

    /// A value table is empty.
    #[error("value table must contain at least one period of values")]
    EmptyTable,

    /// An empty sample list was passed to period inference.
    #[error("period inference requires at least one sample")]
    EmptySamples,

    /// Codewords handed to a code constructor are not orthonormal.
    #[error("codewords are not orthonormal: deviation {deviation:.3e}")]
    CodewordsNotOrthonormal { deviation: f64 },

    /// The error list handed to a code constructor has the wrong length.
    #[error("code on {n_physical} qubits needs {expected} correctable errors, got {actual}")]
    ErrorCountMismatch {
        n_physical: usize,
        expected: usize,
        actual: usize,
    },

    /// The error basis of a code flagged as complete is not orthonormal.
    #[error("error basis is not orthonormal: deviation {deviation:.3e}")]
    ErrorBasisNotOrthonormal { deviation: f64 },

    /// Superposed-error coefficients are not normalized.
    #[error("error coefficients are not normalized: |sum - 1| = {deviation:.3e}")]
    CoefficientsNotNormalized { deviation: f64 },

    /// Mixture weights are not a probability vector.
    #[error("mixture weights must be positive and sum to 1 (deviation {deviation:.3e})")]
    InvalidMixtureWeights { deviation: f64 },

    /// A mixture channel has no terms.
    #[error("mixture channel must contain at least one term")]
    EmptyMixture,

    /// A state handed to the decoder has the wrong shape.
    #[error("decoder expected {context}, got total dimension {actual}")]
    DecoderShape {
        context: &'static str,
        actual: usize,
    },
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
