use num_complex::Complex64;
use serde::Serialize;

use crate::linalg::{apply_unitary, StateVector, UnitaryMatrix};
use crate::{Error, Result};

/// Tolerance on codeword orthonormality.
pub const CODEWORD_TOLERANCE: f64 = 1e-12;

/// The single-qubit error classes a code corrects: bit flip, phase flip, and
/// the combined flip applied bit-first (`Z * X`, which keeps every operator
/// real so the encoder comes out real orthogonal).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PauliKind {
    X,
    Z,
    Zx,
}

impl PauliKind {
    /// Lower-case label used in channel specs and reports.
    pub fn label(self) -> &'static str {
        match self {
            PauliKind::X => "x",
            PauliKind::Z => "z",
            PauliKind::Zx => "zx",
        }
    }

    /// The 2x2 matrix of this error class.
    pub fn gate(self) -> UnitaryMatrix {
        let e = |re: f64| Complex64::new(re, 0.0);
        let entries = match self {
            PauliKind::X => vec![e(0.0), e(1.0), e(1.0), e(0.0)],
            PauliKind::Z => vec![e(1.0), e(0.0), e(0.0), e(-1.0)],
            PauliKind::Zx => vec![e(0.0), e(1.0), e(-1.0), e(0.0)],
        };
        UnitaryMatrix::new_unchecked(2, entries).expect("2x2 gate is always in range")
    }
}

/// One correctable error: an error class acting on one physical qubit
/// (0-based index).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PauliError {
    pub kind: PauliKind,
    pub qubit: usize,
}

impl PauliError {
    /// Label like `x3` or `zx1`, with 1-based qubit numbering.
    pub fn label(&self) -> String {
        format!("{}{}", self.kind.label(), self.qubit + 1)
    }
}

/// An error-correcting code: two orthonormal codewords on `n` physical
/// qubits plus the list of correctable single-qubit errors, one per nonzero
/// syndrome label.
///
/// Syndrome label 0 is always the identity; labels `1..2^(n-1)` are the
/// entries of `errors` in order. A code is `complete` when the corrupted
/// codewords `E_a |Z_0>` form an orthonormal basis of the whole space, which
/// is what lets unitary decoding sort every single-qubit error into its own
/// ancilla slot. The five-qubit code is complete; the three-qubit bit-flip
/// code is not (it only distinguishes bit flips).
#[derive(Debug, Clone)]
pub struct QuantumCode {
    name: String,
    n_physical: usize,
    codewords: [StateVector; 2],
    errors: Vec<PauliError>,
    complete: bool,
}

impl QuantumCode {
    /// Builds a code, validating the codewords (qubit-shaped, orthonormal
    /// within [`CODEWORD_TOLERANCE`]) and the error list (one error per
    /// nonzero syndrome, qubit indices in range).
    pub fn new(
        name: impl Into<String>,
        codeword_zero: StateVector,
        codeword_one: StateVector,
        errors: Vec<PauliError>,
        complete: bool,
    ) -> Result<Self> {
        let n_physical = codeword_zero.num_subsystems();
        if n_physical < 2 {
            return Err(Error::DecoderShape {
                context: "a code block of at least two physical qubits",
                actual: n_physical,
            });
        }
        for cw in [&codeword_zero, &codeword_one] {
            if cw.num_subsystems() != n_physical || cw.dims().iter().any(|&d| d != 2) {
                return Err(Error::DecoderShape {
                    context: "codewords on identical qubit registers",
                    actual: cw.dim(),
                });
            }
        }
        let overlap = codeword_zero.inner(&codeword_one)?.norm();
        if overlap > CODEWORD_TOLERANCE {
            return Err(Error::CodewordsNotOrthonormal { deviation: overlap });
        }
        let expected = (1usize << (n_physical - 1)) - 1;
        if errors.len() != expected {
            return Err(Error::ErrorCountMismatch {
                n_physical,
                expected,
                actual: errors.len(),
            });
        }
        for e in &errors {
            if e.qubit >= n_physical {
                return Err(Error::SubsystemOutOfRange {
                    index: e.qubit,
                    count: n_physical,
                });
            }
        }
        Ok(Self {
            name: name.into(),
            n_physical,
            codewords: [codeword_zero, codeword_one],
            errors,
            complete,
        })
    }

    /// The five-qubit perfect code: codewords are the equal-weight sums of
    /// the stabilizer group (generated by XZZXI and its cyclic shifts) acting
    /// on `|00000>` and `|11111>`; the sixteen syndromes cover the identity
    /// plus every X, Z, and Z*X on each qubit.
    pub fn five_qubit() -> Self {
        use PauliKind::*;
        let generators: [&[(usize, PauliKind)]; 4] = [
            &[(0, X), (1, Z), (2, Z), (3, X)],
            &[(1, X), (2, Z), (3, Z), (4, X)],
            &[(0, X), (2, X), (3, Z), (4, Z)],
            &[(0, Z), (1, X), (3, X), (4, Z)],
        ];
        let codeword = |seed: usize| -> StateVector {
            let dims = vec![2usize; 5];
            let mut acc = vec![Complex64::new(0.0, 0.0); 32];
            for subset in 0..16u32 {
                let mut s = StateVector::basis_state(dims.clone(), seed)
                    .expect("five-qubit basis state");
                for (bit, gen) in generators.iter().enumerate() {
                    if subset & (1 << bit) == 0 {
                        continue;
                    }
                    for &(qubit, kind) in gen.iter() {
                        s = apply_unitary(&s, &kind.gate(), &[qubit])
                            .expect("stabilizer factors act on valid qubits");
                    }
                }
                for (slot, a) in acc.iter_mut().zip(s.amplitudes()) {
                    *slot += a;
                }
            }
            // The group has 16 elements and projects |seed> to a state of
            // norm 4, so the amplitudes land exactly on 0 or +/- 1/4.
            for a in acc.iter_mut() {
                *a *= 0.25;
            }
            StateVector::new(dims, acc).expect("stabilizer projection of a basis state")
        };
        let mut errors = Vec::with_capacity(15);
        for kind in [X, Z, Zx] {
            for qubit in 0..5 {
                errors.push(PauliError { kind, qubit });
            }
        }
        Self::new("five-qubit", codeword(0), codeword(0b11111), errors, true)
            .expect("five-qubit construction satisfies the code invariants")
    }

    /// The three-qubit bit-flip code: `|000>` / `|111>` with the three bit
    /// flips as its error set. Incomplete — phase errors escape it — which
    /// makes it the negative control for every completeness claim.
    pub fn bit_flip() -> Self {
        use PauliKind::*;
        let dims = vec![2usize; 3];
        let cw0 = StateVector::basis_state(dims.clone(), 0).expect("|000>");
        let cw1 = StateVector::basis_state(dims, 7).expect("|111>");
        let errors = (0..3).map(|qubit| PauliError { kind: X, qubit }).collect();
        Self::new("bit-flip", cw0, cw1, errors, false)
            .expect("bit-flip construction satisfies the code invariants")
    }

    /// Looks up a built-in code by its report name.
    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "five-qubit" => Some(Self::five_qubit()),
            "bit-flip" => Some(Self::bit_flip()),
            _ => None,
        }
    }

    /// Report name.
    pub fn name(&self) -> &str {
        &self.name
    }

    /// Number of physical qubits `n`.
    pub fn n_physical(&self) -> usize {
        self.n_physical
    }

    /// Number of ancilla qubits exposed by decoding, `n - 1`.
    pub fn n_ancilla(&self) -> usize {
        self.n_physical - 1
    }

    /// Number of syndrome labels, `2^(n-1)`.
    pub fn syndrome_count(&self) -> usize {
        1 << (self.n_physical - 1)
    }

    /// Codeword for logical `z`.
    pub fn codeword(&self, z: usize) -> &StateVector {
        &self.codewords[z]
    }

    /// The correctable errors, syndrome labels `1..syndrome_count()`.
    pub fn errors(&self) -> &[PauliError] {
        &self.errors
    }

    /// Whether the corrupted codewords form a full orthonormal basis.
    pub fn complete(&self) -> bool {
        self.complete
    }

    /// The error with the given nonzero syndrome label.
    pub fn error_for_syndrome(&self, syndrome: usize) -> Result<PauliError> {
        if syndrome == 0 || syndrome >= self.syndrome_count() {
            return Err(Error::OutcomeOutOfRange {
                outcome: syndrome,
                count: self.syndrome_count(),
            });
        }
        Ok(self.errors[syndrome - 1])
    }

    /// Human-readable label for a syndrome: `identity` or the error label.
    pub fn syndrome_label(&self, syndrome: usize) -> Result<String> {
        if syndrome == 0 {
            return Ok("identity".to_string());
        }
        Ok(self.error_for_syndrome(syndrome)?.label())
    }

    /// Applies the error with syndrome label `a` to a state shaped like a
    /// code block (label 0 is the identity).
    pub fn apply_syndrome_error(&self, s: &StateVector, syndrome: usize) -> Result<StateVector> {
        if syndrome >= self.syndrome_count() {
            return Err(Error::OutcomeOutOfRange {
                outcome: syndrome,
                count: self.syndrome_count(),
            });
        }
        if syndrome == 0 {
            return Ok(s.clone());
        }
        let e = self.errors[syndrome - 1];
        apply_unitary(s, &e.kind.gate(), &[e.qubit])
    }

    /// Serializable description of the code: metadata plus codeword
    /// amplitudes as `(re, im)` pairs.
    pub fn description(&self) -> CodeDescription {
        let flatten = |s: &StateVector| -> Vec<(f64, f64)> {
            s.amplitudes().iter().map(|a| (a.re, a.im)).collect()
        };
        CodeDescription {
            name: self.name.clone(),
            n_physical: self.n_physical,
            syndrome_count: self.syndrome_count(),
            complete: self.complete,
            errors: self.errors.iter().map(PauliError::label).collect(),
            codeword_zero: flatten(&self.codewords[0]),
            codeword_one: flatten(&self.codewords[1]),
        }
    }
}

/// JSON-facing description of a [`QuantumCode`].
#[derive(Debug, Clone, Serialize)]
pub struct CodeDescription {
    pub name: String,
    pub n_physical: usize,
    pub syndrome_count: usize,
    pub complete: bool,
    pub errors: Vec<String>,
    pub codeword_zero: Vec<(f64, f64)>,
    pub codeword_one: Vec<(f64, f64)>,
}
