//! Period finding with and without measuring the second register.
//!
//! The pipeline prepares `(1/sqrt(K)) * sum_x |x>|f(x)>` for a function `f`
//! promised periodic with period `p`, applies the discrete Fourier transform
//! to register 1, and asks for the outcome distribution of register 1. That
//! distribution can be computed three ways:
//!
//! 1. measure register 2 first, then transform the collapsed branch
//!    ([`run_with_measurement_forced`] / [`run_with_measurement_sampled`],
//!    averaged by [`measurement_mixture_distribution`]);
//! 2. trace register 2 out and transform the reduced density matrix;
//! 3. never touch register 2 at all and marginalize the full state at the
//!    end (both variants of [`run_without_measurement`]).
//!
//! All three agree to near machine precision — measuring the second register
//! buys nothing, and ignoring it costs nothing. The measured outcome `y`
//! fixes only the offset `c` (smallest `x` with `f(x) = y`), which shifts
//! per-outcome phases that cancel in the probabilities.
//!
//! [`infer_period`] closes the loop: sampled register-1 outcomes are fed
//! through a continued-fraction expansion and merged into a period estimate,
//! confirmed against the function itself.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::linalg::{apply_unitary, StateVector, UnitaryMatrix};
use crate::registers::{
    collapse_forced, measurement_distribution, OutcomeDistribution, Register, RegisterLayout,
};
use crate::{Error, Result, MAX_TOTAL_DIMENSION};

/// Below this magnitude, `sin(pi p r / K)` is treated as exactly zero and the
/// geometric sum takes its singular (all-terms-in-phase) value.
pub const SINGULAR_SIN_THRESHOLD: f64 = 1e-12;

/// A function promised periodic on the first register's domain, plus the
/// register sizes used to simulate it.
///
/// Register 1 holds `K = 2^k` argument points, register 2 `M = 2^m` value
/// points with `M >= N > max f`. The period is computed at construction and
/// exposed for verification; the simulation pipeline itself never consults
/// it until the final cross-check.
#[derive(Debug, Clone)]
pub struct PeriodicFunctionSpec {
    modulus: u64,
    k: u32,
    m: u32,
    period: usize,
    source: FunctionSource,
}

#[derive(Debug, Clone)]
enum FunctionSource {
    ModularExp { base: u64 },
    Table { values: Vec<u64> },
}

impl PeriodicFunctionSpec {
    /// Modular exponentiation `f(x) = base^x mod modulus` with the default
    /// register size `2^k >= 2 * modulus^2`.
    pub fn modular(modulus: u64, base: u64) -> Result<Self> {
        Self::modular_with_register(modulus, base, choose_register_size(modulus))
    }

    /// Modular exponentiation with an explicit register-1 qubit count.
    pub fn modular_with_register(modulus: u64, base: u64, k: u32) -> Result<Self> {
        if modulus < 2 {
            return Err(Error::ModulusTooSmall { modulus });
        }
        if gcd(base % modulus, modulus) != 1 {
            return Err(Error::NotCoprime { base, modulus });
        }
        let period = multiplicative_order(base % modulus, modulus);
        Self::build(
            modulus,
            k,
            period,
            FunctionSource::ModularExp { base: base % modulus },
        )
    }

    /// Explicit table of one full period of values, `f(x) = values[x mod p]`.
    /// The values must be pairwise distinct (a repeat would mean the true
    /// period is shorter than the table).
    pub fn from_table(values: Vec<u64>) -> Result<Self> {
        let modulus = table_modulus(&values)?;
        Self::from_table_with_register(values, choose_register_size(modulus))
    }

    /// Table-backed function with an explicit register-1 qubit count.
    pub fn from_table_with_register(values: Vec<u64>, k: u32) -> Result<Self> {
        let modulus = table_modulus(&values)?;
        for i in 0..values.len() {
            for j in (i + 1)..values.len() {
                if values[i] == values[j] {
                    return Err(Error::TableNotInjective {
                        value: values[i],
                        first: i,
                        second: j,
                    });
                }
            }
        }
        let period = values.len();
        Self::build(modulus, k, period, FunctionSource::Table { values })
    }

    fn build(modulus: u64, k: u32, period: usize, source: FunctionSource) -> Result<Self> {
        let required = 2 * modulus * modulus;
        let k_size = if k >= 63 { u64::MAX } else { 1u64 << k };
        if k_size < required {
            return Err(Error::RegisterTooSmall { k, required });
        }
        let m = value_register_qubits(modulus);
        let bits = k as u64 + m as u64;
        let total = if bits >= u128::BITS as u64 {
            u128::MAX
        } else {
            1u128 << bits
        };
        if total > MAX_TOTAL_DIMENSION as u128 {
            return Err(Error::DimensionTooLarge {
                dim: total.min(usize::MAX as u128) as usize,
                max: MAX_TOTAL_DIMENSION,
            });
        }
        Ok(Self {
            modulus,
            k,
            m,
            period,
            source,
        })
    }

    /// The modulus `N`: all function values lie in `0..N`.
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Register-1 qubit count `k`.
    pub fn k(&self) -> u32 {
        self.k
    }

    /// Register-2 qubit count `m`.
    pub fn m(&self) -> u32 {
        self.m
    }

    /// Register-1 size `K = 2^k`.
    pub fn domain_size(&self) -> usize {
        1 << self.k
    }

    /// Register-2 size `M = 2^m`.
    pub fn value_size(&self) -> usize {
        1 << self.m
    }

    /// The promised period `p` (for verification; the pipeline itself works
    /// without it).
    pub fn period(&self) -> usize {
        self.period
    }

    /// Two-register layout for states over this function.
    pub fn layout(&self) -> RegisterLayout {
        RegisterLayout::new(self.k, self.m).expect("layout was validated at construction")
    }

    /// Evaluates `f(x)`.
    pub fn evaluate(&self, x: usize) -> u64 {
        match &self.source {
            FunctionSource::ModularExp { base } => mod_pow(*base, x as u64, self.modulus),
            FunctionSource::Table { values } => values[x % values.len()],
        }
    }

    /// Smallest `x` with `f(x) = value`, if the value is attained.
    pub fn residue_for_value(&self, value: u64) -> Option<usize> {
        (0..self.period).find(|&x| self.evaluate(x) == value)
    }

    /// Number of domain points congruent to `residue` mod `p`, i.e. `L + 1`
    /// where `L` is the largest shift with `residue + L * p < K`.
    pub fn branch_term_count(&self, residue: usize) -> Result<u64> {
        if residue >= self.period {
            return Err(Error::OutcomeOutOfRange {
                outcome: residue,
                count: self.period,
            });
        }
        Ok(((self.domain_size() - 1 - residue) / self.period) as u64 + 1)
    }
}

fn table_modulus(values: &[u64]) -> Result<u64> {
    let max = *values.iter().max().ok_or(Error::EmptyTable)?;
    // Need at least one qubit in register 2, so the modulus is at least 2.
    Ok((max + 1).max(2))
}

/// Smallest `k` with `2^k >= 2 * modulus^2`, the standard register size that
/// makes continued-fraction period extraction reliable.
pub fn choose_register_size(modulus: u64) -> u32 {
    let required = 2 * modulus * modulus;
    let mut k = 1;
    while (1u64 << k) < required {
        k += 1;
    }
    k
}

fn value_register_qubits(modulus: u64) -> u32 {
    // Bits needed to hold values in 0..modulus (modulus >= 2).
    u64::BITS - (modulus - 1).leading_zeros()
}

fn gcd(a: u64, b: u64) -> u64 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

fn mod_pow(base: u64, mut exp: u64, modulus: u64) -> u64 {
    let mut acc = 1u64;
    let mut base = base % modulus;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % modulus;
        }
        base = base * base % modulus;
        exp >>= 1;
    }
    acc
}

fn multiplicative_order(base: u64, modulus: u64) -> usize {
    let mut acc = base % modulus;
    let mut order = 1usize;
    while acc != 1 {
        acc = acc * base % modulus;
        order += 1;
    }
    order
}

/// Prepares the uniformly weighted entangled state
/// `(1/sqrt(K)) * sum_x |x>|f(x)>` on the function's two-register layout.
pub fn prepare_entangled_state(spec: &PeriodicFunctionSpec) -> Result<StateVector> {
    let layout = spec.layout();
    let k_size = layout.first_size();
    let amp = Complex64::new((k_size as f64).sqrt().recip(), 0.0);
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); layout.total()];
    for x in 0..k_size {
        let y = spec.evaluate(x) as usize;
        amplitudes[layout.composite_index(x, y)?] = amp;
    }
    StateVector::new(layout.dims(), amplitudes)
}

/// Discrete Fourier transform matrix of the given size:
/// `U[r][x] = exp(2 pi i x r / size) / sqrt(size)`.
///
/// The phase argument is reduced with integer arithmetic before the
/// trigonometric evaluation, so entries stay accurate for large `x * r`.
pub fn dft_unitary(size: usize) -> Result<UnitaryMatrix> {
    if size == 0 {
        return Err(Error::SubsystemDimension { dim: 0 });
    }
    let scale = (size as f64).sqrt().recip();
    let step = std::f64::consts::TAU / size as f64;
    let mut entries = vec![Complex64::new(0.0, 0.0); size * size];
    for r in 0..size {
        for x in r..size {
            let phase = ((r as u64 * x as u64) % size as u64) as f64 * step;
            let value = Complex64::from_polar(scale, phase);
            entries[r * size + x] = value;
            entries[x * size + r] = value;
        }
    }
    // Rows r and x are exchanged by transposition and the entry depends only
    // on x * r, so filling both triangles at once is exact; unitarity is
    // analytic (orthogonality of the K-th roots of unity).
    UnitaryMatrix::new_unchecked(size, entries)
}

/// Inputs to the truncated geometric sum
/// `sum_{n=0}^{last} exp(2 pi i p r n / size)`, the amplitude (up to an
/// overall `1/K` style normalization) that the Fourier transform assigns to
/// outcome `r` on the branch with offset residue of period `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GeometricSumInputs {
    pub p: u64,
    pub r: u64,
    pub size: u64,
    pub last: u64,
}

impl GeometricSumInputs {
    /// Validates `size >= 1` (and the crate dimension cap, which keeps the
    /// integer phase reductions overflow-free).
    pub fn new(p: u64, r: u64, size: u64, last: u64) -> Result<Self> {
        if size == 0 {
            return Err(Error::SubsystemDimension { dim: 0 });
        }
        if size > MAX_TOTAL_DIMENSION as u64 {
            return Err(Error::DimensionTooLarge {
                dim: size as usize,
                max: MAX_TOTAL_DIMENSION,
            });
        }
        Ok(Self { p, r, size, last })
    }
}

/// Closed form of the truncated geometric sum:
/// `exp(i pi p r last / size) * sin(pi p r (last+1) / size) / sin(pi p r / size)`,
/// or `last + 1` on the singular branch where `p * r` is a multiple of
/// `size` (all terms in phase).
///
/// All phase arguments are reduced modulo `2 * size` in integer arithmetic
/// first; the naive floating-point products lose several digits once
/// `p * r * last` passes 2^40 or so.
pub fn geometric_sum_closed_form(inputs: &GeometricSumInputs) -> Complex64 {
    let two_size = 2 * inputs.size as u128;
    let pr = (inputs.p as u128 * inputs.r as u128) % two_size;
    let denominator_arg = std::f64::consts::PI * pr as f64 / inputs.size as f64;
    let denominator = denominator_arg.sin();
    if denominator.abs() < SINGULAR_SIN_THRESHOLD {
        return Complex64::new(inputs.last as f64 + 1.0, 0.0);
    }
    let numerator_m = pr * (inputs.last as u128 + 1) % two_size;
    let phase_m = pr * inputs.last as u128 % two_size;
    let numerator = (std::f64::consts::PI * numerator_m as f64 / inputs.size as f64).sin();
    let phase = std::f64::consts::PI * phase_m as f64 / inputs.size as f64;
    Complex64::from_polar(numerator / denominator, phase)
}

/// Result of a run that measures register 2 before the Fourier transform.
#[derive(Debug, Clone)]
pub struct MeasuredRun {
    /// Offset `c` of the selected branch: the smallest `x` with
    /// `f(x)` equal to the measured value.
    pub residue: usize,
    /// The measured register-2 value `f(c)`.
    pub observed_value: u64,
    /// Born-rule weight of this branch, `(L(c) + 1) / K`.
    pub branch_weight: f64,
    /// Register-1 outcome distribution after the Fourier transform.
    pub distribution: OutcomeDistribution,
}

/// Measures register 2 (forcing the branch picked out by `residue`), then
/// Fourier-transforms register 1 of the collapsed state.
pub fn run_with_measurement_forced(
    spec: &PeriodicFunctionSpec,
    residue: usize,
) -> Result<MeasuredRun> {
    let layout = spec.layout();
    if residue >= spec.period() {
        return Err(Error::OutcomeOutOfRange {
            outcome: residue,
            count: spec.period(),
        });
    }
    let observed_value = spec.evaluate(residue);
    let entangled = prepare_entangled_state(spec)?;
    let collapsed = collapse_forced(&entangled, &layout, Register::Second, observed_value as usize)?;
    let transformed = apply_unitary(&collapsed, &dft_unitary(layout.first_size())?, &[0])?;
    let distribution = measurement_distribution(&transformed, &layout, Register::First)?;
    Ok(MeasuredRun {
        residue,
        observed_value,
        branch_weight: spec.branch_term_count(residue)? as f64 / layout.first_size() as f64,
        distribution,
    })
}

/// Measures register 2 with the Born rule (seeded), then Fourier-transforms
/// register 1 of the collapsed state.
pub fn run_with_measurement_sampled(spec: &PeriodicFunctionSpec, seed: u64) -> Result<MeasuredRun> {
    let layout = spec.layout();
    let entangled = prepare_entangled_state(spec)?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let d2 = measurement_distribution(&entangled, &layout, Register::Second)?;
    let observed = d2.sample(&mut rng) as u64;
    let residue = spec
        .residue_for_value(observed)
        .expect("sampled register-2 value always lies in the function's range");
    run_with_measurement_forced(spec, residue)
}

/// Register-1 distribution of the measure-first protocol averaged over the
/// Born weights of every branch: what a long sequence of measured runs
/// converges to.
pub fn measurement_mixture_distribution(
    spec: &PeriodicFunctionSpec,
) -> Result<OutcomeDistribution> {
    let k_size = spec.domain_size();
    let mut mixture = vec![0.0f64; k_size];
    for residue in 0..spec.period() {
        let run = run_with_measurement_forced(spec, residue)?;
        for (slot, p) in mixture.iter_mut().zip(run.distribution.probabilities()) {
            *slot += run.branch_weight * p;
        }
    }
    OutcomeDistribution::new(Register::First, mixture)
}

/// How to compute the register-1 distribution without measuring register 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnmeasuredPath {
    /// Trace out register 2, conjugate the reduced density matrix by the
    /// Fourier transform, and read its diagonal.
    ReducedDensity,
    /// Keep the full entangled state, Fourier-transform register 1, and
    /// marginalize at the very end.
    FullState,
}

/// Register-1 outcome distribution computed while leaving register 2
/// strictly alone.
pub fn run_without_measurement(
    spec: &PeriodicFunctionSpec,
    path: UnmeasuredPath,
) -> Result<OutcomeDistribution> {
    let layout = spec.layout();
    let entangled = prepare_entangled_state(spec)?;
    let dft = dft_unitary(layout.first_size())?;
    match path {
        UnmeasuredPath::FullState => {
            let transformed = apply_unitary(&entangled, &dft, &[0])?;
            measurement_distribution(&transformed, &layout, Register::First)
        }
        UnmeasuredPath::ReducedDensity => {
            let reduced = entangled.reduced_density(&[0])?;
            let diagonal = conjugated_diagonal(&dft, reduced.matrix());
            OutcomeDistribution::new(Register::First, diagonal)
        }
    }
}

/// Diagonal of `U rho U^dagger` without materializing the conjugated matrix:
/// one product `M = rho * U^dagger` (cheap for sparse `rho`), then
/// `d[r] = sum_x U[r][x] * M[x][r]`.
fn conjugated_diagonal(u: &UnitaryMatrix, rho: &[Complex64]) -> Vec<f64> {
    let n = u.dim();
    let udag = u.dagger();
    let m = crate::linalg::mat_mul(rho, udag.matrix(), n);
    let um = u.matrix();
    (0..n)
        .map(|r| {
            let row = &um[r * n..(r + 1) * n];
            row.iter()
                .enumerate()
                .map(|(x, &uv)| uv * m[x * n + r])
                .sum::<Complex64>()
                .re
        })
        .collect()
}

/// Merges sampled register-1 outcomes into a period estimate.
///
/// A sample `r` near a spectral peak approximates some `m/p` by `r/K`, and
/// its best continued-fraction convergent with denominator at most `N` is
/// then `p / gcd(m, p)` — a divisor of the period. Samples from the tails
/// between peaks yield unrelated denominators instead, so no single running
/// combination can be trusted. The inference therefore collects every least
/// common multiple (capped at `N`) reachable from subsets of the per-sample
/// denominators, confirms candidates against the function itself by
/// spot-checking `f(x) = f(x + q)`, and minimizes the first confirmed
/// candidate over its divisors so that a tail denominator cannot inflate
/// the answer. Returns `None` when the samples are inconclusive (all zero,
/// or no reachable candidate confirms).
pub fn infer_period(spec: &PeriodicFunctionSpec, samples: &[u64]) -> Result<Option<u64>> {
    if samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    let k_size = spec.domain_size() as u64;
    let bound = spec.modulus();
    let mut reachable = std::collections::BTreeSet::from([1u64]);
    for &r in samples {
        if r >= k_size {
            return Err(Error::OutcomeOutOfRange {
                outcome: r as usize,
                count: k_size as usize,
            });
        }
        if r == 0 {
            continue;
        }
        if let Some(q) = best_denominator(r, k_size, bound) {
            let merged: Vec<u64> = reachable
                .iter()
                .map(|&l| lcm(l, q))
                .filter(|&l| l <= bound)
                .collect();
            reachable.extend(merged);
        }
    }
    for &candidate in &reachable {
        if !confirms_period(spec, candidate) {
            continue;
        }
        // The confirmed candidate is a multiple of the period; its smallest
        // confirmed divisor is the period itself.
        let period = (1..candidate)
            .find(|&d| candidate % d == 0 && confirms_period(spec, d))
            .unwrap_or(candidate);
        return Ok(Some(period));
    }
    Ok(None)
}

/// Whether `f(x) = f(x + q)` holds at up to sixteen spot-checked positions.
/// One position already settles it for both function sources (modular
/// exponentials are invertible; tables are injective over one period), so
/// sixteen is belt and braces.
fn confirms_period(spec: &PeriodicFunctionSpec, q: u64) -> bool {
    let q = q as usize;
    if q == 0 || q >= spec.domain_size() {
        return false;
    }
    let checks = (spec.domain_size() - q).min(16);
    (0..checks).all(|x| spec.evaluate(x) == spec.evaluate(x + q))
}

/// Largest continued-fraction convergent denominator of `r / size` that does
/// not exceed `bound`.
fn best_denominator(r: u64, size: u64, bound: u64) -> Option<u64> {
    let (mut num, mut den) = (r, size);
    // Convergent denominators q_i = a_i * q_{i-1} + q_{i-2}.
    let (mut q_prev2, mut q_prev1) = (1u64, 0u64);
    let mut best = None;
    while den != 0 {
        let a = num / den;
        let q = a.saturating_mul(q_prev1).saturating_add(q_prev2);
        if q > bound {
            break;
        }
        if q >= 1 {
            best = Some(q);
        }
        (q_prev2, q_prev1) = (q_prev1, q);
        (num, den) = (den, num % den);
    }
    best
}
