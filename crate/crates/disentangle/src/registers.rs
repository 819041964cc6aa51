//! Two-register bookkeeping for the period-finding pipeline.
//!
//! A period-finding state lives on two registers: register 1 holds the
//! function argument (`K = 2^k` points), register 2 the function value
//! (`M = 2^m` points). The composite index is big-endian, register 1 most
//! significant: basis state `|x>|y>` sits at flat index `x * M + y`.
//!
//! This module provides the layout arithmetic, marginal measurement
//! distributions, and projective collapse of one register — the only
//! measurement primitive the rest of the crate ever simulates.

use num_complex::Complex64;
use rand::Rng;

use crate::linalg::StateVector;
use crate::{Error, Result, MAX_TOTAL_DIMENSION};

/// Negative probabilities at most this far below zero are clamped to zero;
/// anything more negative is an error.
pub const NEGATIVE_PROBABILITY_BUDGET: f64 = 1e-14;

/// Tolerance on the total mass of a probability distribution.
pub const PROBABILITY_SUM_TOLERANCE: f64 = 1e-10;

/// Probability floor below which a forced collapse is rejected.
pub const COLLAPSE_PROBABILITY_FLOOR: f64 = 1e-14;

/// Identifies one of the two registers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Register {
    First,
    Second,
}

/// Qubit counts of the two registers: `K = 2^k` points in register 1,
/// `M = 2^m` points in register 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegisterLayout {
    k: u32,
    m: u32,
}

impl RegisterLayout {
    /// Builds a layout; both registers need at least one qubit and the total
    /// dimension must stay under [`MAX_TOTAL_DIMENSION`].
    pub fn new(k: u32, m: u32) -> Result<Self> {
        if k == 0 || m == 0 {
            return Err(Error::SubsystemDimension { dim: 1 });
        }
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
        Ok(Self { k, m })
    }

    /// Qubits in register 1.
    pub fn k(&self) -> u32 {
        self.k
    }

    /// Qubits in register 2.
    pub fn m(&self) -> u32 {
        self.m
    }

    /// Points in register 1 (`K`).
    pub fn first_size(&self) -> usize {
        1 << self.k
    }

    /// Points in register 2 (`M`).
    pub fn second_size(&self) -> usize {
        1 << self.m
    }

    /// Points in the named register.
    pub fn size_of(&self, register: Register) -> usize {
        match register {
            Register::First => self.first_size(),
            Register::Second => self.second_size(),
        }
    }

    /// Total composite dimension `K * M`.
    pub fn total(&self) -> usize {
        self.first_size() * self.second_size()
    }

    /// Subsystem dimensions `[K, M]` for building states on this layout.
    pub fn dims(&self) -> Vec<usize> {
        vec![self.first_size(), self.second_size()]
    }

    /// Flat index of `|x>|y>`.
    pub fn composite_index(&self, x: usize, y: usize) -> Result<usize> {
        if x >= self.first_size() {
            return Err(Error::OutcomeOutOfRange {
                outcome: x,
                count: self.first_size(),
            });
        }
        if y >= self.second_size() {
            return Err(Error::OutcomeOutOfRange {
                outcome: y,
                count: self.second_size(),
            });
        }
        Ok(x * self.second_size() + y)
    }

    /// Inverse of [`RegisterLayout::composite_index`].
    pub fn split_index(&self, index: usize) -> (usize, usize) {
        (index / self.second_size(), index % self.second_size())
    }

    fn check_state(&self, s: &StateVector) -> Result<()> {
        if s.dim() != self.total() {
            return Err(Error::LayoutMismatch {
                expected: self.total(),
                actual: s.dim(),
            });
        }
        Ok(())
    }
}

/// A probability distribution over the basis outcomes of one register.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDistribution {
    register: Register,
    probabilities: Vec<f64>,
}

impl OutcomeDistribution {
    /// Builds a distribution, clamping roundoff-negative entries (within
    /// [`NEGATIVE_PROBABILITY_BUDGET`]) to zero and validating that the mass
    /// sums to one within [`PROBABILITY_SUM_TOLERANCE`].
    pub fn new(register: Register, mut probabilities: Vec<f64>) -> Result<Self> {
        for p in probabilities.iter_mut() {
            if *p < 0.0 {
                if *p < -NEGATIVE_PROBABILITY_BUDGET {
                    return Err(Error::NegativeProbability { value: *p });
                }
                *p = 0.0;
            }
        }
        let sum: f64 = probabilities.iter().sum();
        if (sum - 1.0).abs() > PROBABILITY_SUM_TOLERANCE {
            return Err(Error::ProbabilitySum {
                deviation: sum - 1.0,
            });
        }
        Ok(Self {
            register,
            probabilities,
        })
    }

    /// Which register the outcomes refer to.
    pub fn register(&self) -> Register {
        self.register
    }

    /// Number of outcomes.
    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    /// True when the distribution has no outcomes (never constructible, but
    /// keeps clippy's `len`-without-`is_empty` lint honest).
    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    /// Probability of one outcome.
    pub fn probability(&self, outcome: usize) -> Result<f64> {
        self.probabilities
            .get(outcome)
            .copied()
            .ok_or(Error::OutcomeOutOfRange {
                outcome,
                count: self.probabilities.len(),
            })
    }

    /// Full probability vector.
    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    /// Draws one outcome by inverse-CDF sampling.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let r: f64 = rng.gen();
        let mut acc = 0.0;
        let mut last_positive = 0;
        for (i, &p) in self.probabilities.iter().enumerate() {
            if p > 0.0 {
                last_positive = i;
                acc += p;
                if r < acc {
                    return i;
                }
            }
        }
        // Total mass can fall a hair short of 1; attribute the sliver to the
        // last outcome that carries any probability.
        last_positive
    }

    /// Largest absolute pointwise difference from another distribution.
    pub fn max_abs_difference(&self, other: &Self) -> Result<f64> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                actual: other.len(),
            });
        }
        Ok(self
            .probabilities
            .iter()
            .zip(&other.probabilities)
            .fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs())))
    }
}

/// Marginal measurement distribution of one register of a two-register state.
pub fn measurement_distribution(
    s: &StateVector,
    layout: &RegisterLayout,
    register: Register,
) -> Result<OutcomeDistribution> {
    layout.check_state(s)?;
    let m = layout.second_size();
    let mut probabilities = vec![0.0f64; layout.size_of(register)];
    for (index, a) in s.amplitudes().iter().enumerate() {
        if a.re == 0.0 && a.im == 0.0 {
            continue;
        }
        let slot = match register {
            Register::First => index / m,
            Register::Second => index % m,
        };
        probabilities[slot] += a.norm_sqr();
    }
    OutcomeDistribution::new(register, probabilities)
}

/// Projects a two-register state onto one outcome of the named register and
/// renormalizes. The state keeps its full composite dimensions; amplitudes
/// inconsistent with the outcome become zero.
pub fn collapse_forced(
    s: &StateVector,
    layout: &RegisterLayout,
    register: Register,
    outcome: usize,
) -> Result<StateVector> {
    layout.check_state(s)?;
    if outcome >= layout.size_of(register) {
        return Err(Error::OutcomeOutOfRange {
            outcome,
            count: layout.size_of(register),
        });
    }
    let m = layout.second_size();
    let matches = |index: usize| -> bool {
        match register {
            Register::First => index / m == outcome,
            Register::Second => index % m == outcome,
        }
    };
    let mass: f64 = s
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(i, _)| matches(*i))
        .map(|(_, a)| a.norm_sqr())
        .sum();
    if mass <= COLLAPSE_PROBABILITY_FLOOR {
        return Err(Error::ZeroProbabilityOutcome {
            outcome,
            probability: mass,
        });
    }
    let scale = mass.sqrt().recip();
    let amplitudes: Vec<Complex64> = s
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(i, &a)| {
            if matches(i) {
                a * scale
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    StateVector::new(s.dims().to_vec(), amplitudes)
}

/// Samples an outcome of the named register from the Born distribution, then
/// collapses onto it. Returns the outcome together with the collapsed state.
pub fn collapse_sampled<R: Rng + ?Sized>(
    s: &StateVector,
    layout: &RegisterLayout,
    register: Register,
    rng: &mut R,
) -> Result<(usize, StateVector)> {
    let distribution = measurement_distribution(s, layout, register)?;
    let outcome = distribution.sample(rng);
    let collapsed = collapse_forced(s, layout, register, outcome)?;
    Ok((outcome, collapsed))
}
