//! Seeded, reproducible experiment runner for the disentangle library.
//!
//! Three subcommands:
//! - `period`: runs the period-finding pipeline three ways (measure register
//!   2, trace it out, carry it along) and reports the identical spectra.
//! - `qec`: drives error-correction trials through a chosen noise channel;
//!   decoding is purely unitary and the syndrome is never consulted.
//! - `verify`: prints the per-qubit scalar-product orthogonality report for
//!   a code.
//!
//! Exit codes: 0 success, 1 inconclusive period inference, 2 invalid
//! configuration, 3 internal invariant violation.

mod report;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::Serialize;

use disentangle::linalg::{apply_unitary, random_state, DensityMatrix};
use disentangle::period::{
    infer_period, measurement_mixture_distribution, run_without_measurement,
    PeriodicFunctionSpec, UnmeasuredPath,
};
use disentangle::qec::{
    apply_environment_coupling, apply_mixed_error, apply_superposed_error, attach_environment,
    check_orthogonality_conditions, decode_and_verify, decode_and_verify_mixed, encode,
    DecodeReport, EnvironmentCoupling, MixedErrorChannel, PauliKind, QuantumCode,
};
use report::{Check, Report};

/// Deviation bound used by the aggregate pass/fail checks.
const CHECK_TOLERANCE: f64 = 1e-10;

/// Bound for the per-qubit orthogonality conditions.
const ORTHOGONALITY_TOLERANCE: f64 = 1e-12;

#[derive(Parser)]
#[command(
    name = "disentangle",
    version = disentangle::VERSION,
    about = "Quantum disentanglement at desk scale: period finding that never \
             measures its second register, and error correction that never \
             measures a syndrome"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compare the three period-finding pipelines and infer the period
    Period(PeriodArgs),
    /// Run error-correction trials through a noise channel
    Qec(QecArgs),
    /// Check a code against the per-qubit orthogonality conditions
    Verify(VerifyArgs),
}

#[derive(Args)]
struct PeriodArgs {
    /// Modulus N of f(x) = b^x mod N
    #[arg(long = "N")]
    modulus: u64,
    /// Base b, coprime to N
    #[arg(long = "b")]
    base: u64,
    /// First-register qubit count (default: smallest k with 2^k >= 2N^2)
    #[arg(long)]
    k: Option<u32>,
    /// How many outcomes to sample from the unmeasured distribution
    #[arg(long)]
    samples: usize,
    /// Root RNG seed
    #[arg(long)]
    seed: u64,
    /// Output path for the report
    #[arg(long)]
    out: PathBuf,
    /// Report format: full JSON report or CSV distribution dump
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
}

#[derive(Args)]
struct QecArgs {
    /// Code name: five-qubit or bit-flip
    #[arg(long)]
    code: String,
    /// Noise channel: pauli:<op><idx> (e.g. pauli:zx3), superposed, mixed,
    /// environment, all-paulis, or phase-error
    #[arg(long)]
    channel: String,
    /// Number of trials (ignored for all-paulis, which runs one per error)
    #[arg(long)]
    trials: usize,
    /// Root RNG seed; per-trial seeds are derived deterministically
    #[arg(long)]
    seed: u64,
    /// Environment dimension for the environment channel
    #[arg(long, default_value_t = 4)]
    env_dim: usize,
    /// Output path for the report
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    /// Code name: five-qubit or bit-flip
    #[arg(long)]
    code: String,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
}

impl OutputFormat {
    fn label(self) -> &'static str {
        match self {
            OutputFormat::Json => "json",
            OutputFormat::Csv => "csv",
        }
    }
}

enum CliError {
    Config(String),
    Internal(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "{msg}"),
            CliError::Internal(msg) => write!(f, "internal invariant violation: {msg}"),
        }
    }
}

fn config_error(msg: impl fmt::Display) -> CliError {
    CliError::Config(msg.to_string())
}

/// Errors raised mid-pipeline on inputs that already passed validation.
fn internal_error(err: disentangle::Error) -> CliError {
    CliError::Internal(err.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Period(args) => run_period(args),
        Command::Qec(args) => run_qec(args),
        Command::Verify(args) => run_verify(args),
    };
    match outcome {
        Ok(code) => code,
        Err(err @ CliError::Config(_)) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
        Err(err @ CliError::Internal(_)) => {
            eprintln!("error: {err}");
            ExitCode::from(3)
        }
    }
}

/// SplitMix64 step: decorrelates per-trial seeds from the root seed so
/// trials are independent yet fully reproducible.
fn derive_seed(root: u64, index: u64) -> u64 {
    let mut z = root.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn write_output(path: &PathBuf, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents)
        .map_err(|e| config_error(format!("cannot write {}: {e}", path.display())))
}

// ---------------------------------------------------------------------------
// period
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct PeriodConfig {
    command: &'static str,
    modulus: u64,
    base: u64,
    k: Option<u32>,
    samples: usize,
    seed: u64,
    format: &'static str,
}

#[derive(Serialize)]
struct PeriodResults {
    true_period: u64,
    first_register_qubits: u32,
    second_register_qubits: u32,
    domain_size: usize,
    measured_mixture: Vec<f64>,
    reduced_density: Vec<f64>,
    full_state: Vec<f64>,
    samples: Vec<u64>,
    inferred_period: Option<u64>,
}

fn run_period(args: PeriodArgs) -> Result<ExitCode, CliError> {
    if args.samples == 0 {
        return Err(config_error("--samples must be at least 1"));
    }
    let spec = match args.k {
        Some(k) => PeriodicFunctionSpec::modular_with_register(args.modulus, args.base, k),
        None => PeriodicFunctionSpec::modular(args.modulus, args.base),
    }
    .map_err(config_error)?;

    let mixture = measurement_mixture_distribution(&spec).map_err(internal_error)?;
    let reduced =
        run_without_measurement(&spec, UnmeasuredPath::ReducedDensity).map_err(internal_error)?;
    let full = run_without_measurement(&spec, UnmeasuredPath::FullState).map_err(internal_error)?;
    let d_mr = mixture.max_abs_difference(&reduced).map_err(internal_error)?;
    let d_mf = mixture.max_abs_difference(&full).map_err(internal_error)?;
    let d_rf = reduced.max_abs_difference(&full).map_err(internal_error)?;

    let mut rng = ChaCha12Rng::seed_from_u64(args.seed);
    let samples: Vec<u64> = (0..args.samples)
        .map(|_| reduced.sample(&mut rng) as u64)
        .collect();
    let inferred = infer_period(&spec, &samples).map_err(internal_error)?;
    let true_period = spec.period() as u64;

    let checks = vec![
        Check::bounded("mixture-vs-reduced-max-deviation", d_mr, CHECK_TOLERANCE),
        Check::bounded("mixture-vs-full-max-deviation", d_mf, CHECK_TOLERANCE),
        Check::bounded("reduced-vs-full-max-deviation", d_rf, CHECK_TOLERANCE),
        Check::new(
            "inferred-period-matches",
            inferred == Some(true_period),
            inferred.map_or(true_period as f64, |p| (p as f64 - true_period as f64).abs()),
        ),
    ];
    let report = Report {
        config: PeriodConfig {
            command: "period",
            modulus: args.modulus,
            base: args.base,
            k: args.k,
            samples: args.samples,
            seed: args.seed,
            format: args.format.label(),
        },
        seed: args.seed,
        version: disentangle::VERSION.to_string(),
        results: PeriodResults {
            true_period,
            first_register_qubits: spec.k(),
            second_register_qubits: spec.m(),
            domain_size: spec.domain_size(),
            measured_mixture: mixture.probabilities().to_vec(),
            reduced_density: reduced.probabilities().to_vec(),
            full_state: full.probabilities().to_vec(),
            samples,
            inferred_period: inferred,
        },
        checks,
    };

    let contents = match args.format {
        OutputFormat::Json => report::to_json_string(&report),
        OutputFormat::Csv => report::to_distribution_csv(
            &report.results.measured_mixture,
            &report.results.reduced_density,
            &report.results.full_state,
        ),
    };
    write_output(&args.out, &contents)?;

    let passed = report.checks.iter().filter(|c| c.pass).count();
    let verdict = inferred.map_or_else(|| "inconclusive".to_string(), |p| p.to_string());
    println!(
        "period: N={} b={} true={} inferred={} checks={}/{} -> {}",
        args.modulus,
        args.base,
        true_period,
        verdict,
        passed,
        report.checks.len(),
        args.out.display()
    );
    Ok(if inferred.is_some() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

// ---------------------------------------------------------------------------
// qec
// ---------------------------------------------------------------------------

#[derive(Clone, Copy)]
enum ChannelSpec {
    Pauli(PauliKind, usize),
    Superposed,
    Mixed,
    Environment,
    AllPaulis,
    PhaseError,
}

fn parse_channel(s: &str) -> Result<ChannelSpec, CliError> {
    match s {
        "superposed" => return Ok(ChannelSpec::Superposed),
        "mixed" => return Ok(ChannelSpec::Mixed),
        "environment" => return Ok(ChannelSpec::Environment),
        "all-paulis" => return Ok(ChannelSpec::AllPaulis),
        "phase-error" => return Ok(ChannelSpec::PhaseError),
        _ => {}
    }
    let label = s.strip_prefix("pauli:").ok_or_else(|| {
        config_error(format!(
            "unknown channel '{s}' (expected pauli:<op><idx>, superposed, mixed, \
             environment, all-paulis, or phase-error)"
        ))
    })?;
    // Longest prefix first: zx before z.
    let (kind, index) = if let Some(rest) = label.strip_prefix("zx") {
        (PauliKind::Zx, rest)
    } else if let Some(rest) = label.strip_prefix('z') {
        (PauliKind::Z, rest)
    } else if let Some(rest) = label.strip_prefix('x') {
        (PauliKind::X, rest)
    } else {
        return Err(config_error(format!(
            "unknown error class in '{s}' (expected x, z, or zx)"
        )));
    };
    let qubit_1based: usize = index
        .parse()
        .map_err(|_| config_error(format!("bad qubit index in '{s}'")))?;
    if qubit_1based == 0 {
        return Err(config_error("qubit indices in channel specs are 1-based"));
    }
    Ok(ChannelSpec::Pauli(kind, qubit_1based - 1))
}

#[derive(Serialize)]
struct QecConfig {
    command: &'static str,
    code: String,
    channel: String,
    trials: usize,
    seed: u64,
    env_dim: usize,
}

#[derive(Serialize)]
struct TrialOutcome {
    trial: usize,
    seed: u64,
    description: String,
    is_product: bool,
    product_defect: f64,
    logical_fidelity: f64,
    syndrome_distribution: Vec<f64>,
}

#[derive(Serialize)]
struct QecResults {
    code: String,
    channel: String,
    n_physical: usize,
    syndrome_count: usize,
    total_trials: usize,
    passed_trials: usize,
    min_logical_fidelity: f64,
    max_product_defect: f64,
    trials: Vec<TrialOutcome>,
}

fn random_coefficients(rng: &mut ChaCha12Rng, count: usize) -> Vec<Complex64> {
    let raw: Vec<Complex64> = (0..count)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let norm: f64 = raw.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    raw.into_iter().map(|c| c / norm).collect()
}

/// One decoded trial: what happened, the verification report, and the
/// syndrome slot the damage should occupy (when one is defined).
struct Trial {
    description: String,
    report: DecodeReport,
    expected_syndrome: Option<usize>,
}

fn run_trial(
    code: &QuantumCode,
    channel: ChannelSpec,
    trial: usize,
    rng: &mut ChaCha12Rng,
    env_dim: usize,
) -> Result<Trial, CliError> {
    let logical = random_state(vec![2], rng).map_err(internal_error)?;
    let encoded = encode(code, &logical).map_err(internal_error)?;
    let expected_for = |kind: PauliKind, qubit: usize| {
        code.errors()
            .iter()
            .position(|e| e.kind == kind && e.qubit == qubit)
            .map(|i| i + 1)
    };
    match channel {
        ChannelSpec::Pauli(kind, qubit) => {
            let corrupted =
                apply_unitary(&encoded, &kind.gate(), &[qubit]).map_err(internal_error)?;
            let report = decode_and_verify(code, &corrupted, &logical, CHECK_TOLERANCE)
                .map_err(internal_error)?;
            Ok(Trial {
                description: format!("pauli {}{}", kind.label(), qubit + 1),
                report,
                expected_syndrome: expected_for(kind, qubit),
            })
        }
        ChannelSpec::AllPaulis => {
            let syndrome = trial + 1;
            let corrupted = code
                .apply_syndrome_error(&encoded, syndrome)
                .map_err(internal_error)?;
            let report = decode_and_verify(code, &corrupted, &logical, CHECK_TOLERANCE)
                .map_err(internal_error)?;
            Ok(Trial {
                description: format!(
                    "pauli {}",
                    code.syndrome_label(syndrome).map_err(internal_error)?
                ),
                report,
                expected_syndrome: Some(syndrome),
            })
        }
        ChannelSpec::Superposed => {
            let coefficients = random_coefficients(rng, code.syndrome_count());
            let corrupted = apply_superposed_error(code, &encoded, &coefficients)
                .map_err(internal_error)?;
            let report = decode_and_verify(code, &corrupted, &logical, CHECK_TOLERANCE)
                .map_err(internal_error)?;
            Ok(Trial {
                description: format!(
                    "superposition of all {} error branches",
                    code.syndrome_count()
                ),
                report,
                expected_syndrome: None,
            })
        }
        ChannelSpec::Mixed => {
            let noise = MixedErrorChannel::random_single_qubit(code.n_physical(), 3, rng)
                .map_err(internal_error)?;
            let rho = DensityMatrix::from_pure(&encoded);
            let corrupted = apply_mixed_error(&noise, &rho).map_err(internal_error)?;
            let report = decode_and_verify_mixed(code, &corrupted, &logical, CHECK_TOLERANCE)
                .map_err(internal_error)?;
            Ok(Trial {
                description: "mixture of 3 random single-qubit unitaries".to_string(),
                report,
                expected_syndrome: None,
            })
        }
        ChannelSpec::Environment => {
            let qubit = trial % code.n_physical();
            let coupling = EnvironmentCoupling::haar_random(env_dim, rng).map_err(config_error)?;
            let with_env = attach_environment(&encoded, &coupling).map_err(internal_error)?;
            let coupled =
                apply_environment_coupling(&with_env, &coupling, qubit).map_err(internal_error)?;
            let report = decode_and_verify(code, &coupled, &logical, CHECK_TOLERANCE)
                .map_err(internal_error)?;
            Ok(Trial {
                description: format!("random coupling of qubit {} to a {env_dim}-dimensional environment", qubit + 1),
                report,
                expected_syndrome: None,
            })
        }
        ChannelSpec::PhaseError => {
            let corrupted =
                apply_unitary(&encoded, &PauliKind::Z.gate(), &[0]).map_err(internal_error)?;
            let report = decode_and_verify(code, &corrupted, &logical, CHECK_TOLERANCE)
                .map_err(internal_error)?;
            Ok(Trial {
                description: "phase error z1".to_string(),
                report,
                expected_syndrome: expected_for(PauliKind::Z, 0),
            })
        }
    }
}

fn run_qec(args: QecArgs) -> Result<ExitCode, CliError> {
    let code = QuantumCode::from_name(&args.code)
        .ok_or_else(|| config_error(format!("unknown code '{}'", args.code)))?;
    let channel = parse_channel(&args.channel)?;
    if let ChannelSpec::Pauli(_, qubit) = channel {
        if qubit >= code.n_physical() {
            return Err(config_error(format!(
                "qubit {} out of range for {} ({} physical qubits)",
                qubit + 1,
                code.name(),
                code.n_physical()
            )));
        }
    }
    if args.env_dim < 2 {
        return Err(config_error("--env-dim must be at least 2"));
    }
    let total_trials = match channel {
        ChannelSpec::AllPaulis => code.syndrome_count() - 1,
        _ => args.trials,
    };
    if total_trials == 0 {
        return Err(config_error("--trials must be at least 1"));
    }

    let mut trials = Vec::with_capacity(total_trials);
    let mut syndrome_deviation: Option<f64> = Some(0.0);
    for trial in 0..total_trials {
        let trial_seed = derive_seed(args.seed, trial as u64);
        let mut rng = ChaCha12Rng::seed_from_u64(trial_seed);
        let outcome = run_trial(&code, channel, trial, &mut rng, args.env_dim)?;
        syndrome_deviation = match (syndrome_deviation, outcome.expected_syndrome) {
            (Some(worst), Some(slot)) => {
                Some(worst.max(1.0 - outcome.report.syndrome_distribution[slot]))
            }
            _ => None,
        };
        trials.push(TrialOutcome {
            trial,
            seed: trial_seed,
            description: outcome.description,
            is_product: outcome.report.is_product,
            product_defect: outcome.report.product_defect,
            logical_fidelity: outcome.report.logical_fidelity,
            syndrome_distribution: outcome.report.syndrome_distribution,
        });
    }

    let max_product_defect = trials.iter().map(|t| t.product_defect).fold(0.0, f64::max);
    let max_fidelity_error = trials
        .iter()
        .map(|t| (t.logical_fidelity - 1.0).abs())
        .fold(0.0, f64::max);
    let min_logical_fidelity = trials
        .iter()
        .map(|t| t.logical_fidelity)
        .fold(f64::INFINITY, f64::min);
    let passed_trials = trials
        .iter()
        .filter(|t| t.is_product && (t.logical_fidelity - 1.0).abs() <= CHECK_TOLERANCE)
        .count();

    let mut checks = vec![
        Check::bounded("all-trials-product", max_product_defect, CHECK_TOLERANCE),
        Check::bounded("all-trials-fidelity", max_fidelity_error, CHECK_TOLERANCE),
    ];
    if let Some(deviation) = syndrome_deviation {
        checks.push(Check::bounded(
            "syndrome-point-mass",
            deviation,
            CHECK_TOLERANCE,
        ));
    }

    let report = Report {
        config: QecConfig {
            command: "qec",
            code: args.code.clone(),
            channel: args.channel.clone(),
            trials: args.trials,
            seed: args.seed,
            env_dim: args.env_dim,
        },
        seed: args.seed,
        version: disentangle::VERSION.to_string(),
        results: QecResults {
            code: code.name().to_string(),
            channel: args.channel.clone(),
            n_physical: code.n_physical(),
            syndrome_count: code.syndrome_count(),
            total_trials,
            passed_trials,
            min_logical_fidelity,
            max_product_defect,
            trials,
        },
        checks,
    };
    write_output(&args.out, &report::to_json_string(&report))?;

    let passed = report.checks.iter().filter(|c| c.pass).count();
    println!(
        "qec: code={} channel={} trials {}/{} passed, checks {}/{} -> {}",
        code.name(),
        args.channel,
        report.results.passed_trials,
        report.results.total_trials,
        passed,
        report.checks.len(),
        args.out.display()
    );
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct VerifyConfig {
    command: &'static str,
    code: String,
}

#[derive(Serialize)]
struct ScalarRow {
    z: usize,
    y: usize,
    z_prime: usize,
    y_prime: usize,
    value_re: f64,
    value_im: f64,
    expected: f64,
    deviation: f64,
}

#[derive(Serialize)]
struct QubitOrthogonality {
    qubit: usize,
    scalar_products: Vec<ScalarRow>,
    max_scalar_deviation: f64,
    class_vector_deviation: f64,
    satisfied: bool,
}

#[derive(Serialize)]
struct VerifyResults {
    description: disentangle::qec::CodeDescription,
    orthogonality: Vec<QubitOrthogonality>,
    compliant: bool,
}

fn run_verify(args: VerifyArgs) -> Result<ExitCode, CliError> {
    let code = QuantumCode::from_name(&args.code)
        .ok_or_else(|| config_error(format!("unknown code '{}'", args.code)))?;
    let mut orthogonality = Vec::with_capacity(code.n_physical());
    let mut checks = Vec::with_capacity(code.n_physical());
    for qubit in 0..code.n_physical() {
        let report = check_orthogonality_conditions(&code, qubit).map_err(internal_error)?;
        checks.push(Check::bounded(
            &format!("scalar-products-qubit-{}", qubit + 1),
            report.max_deviation(),
            ORTHOGONALITY_TOLERANCE,
        ));
        orthogonality.push(QubitOrthogonality {
            qubit,
            scalar_products: report
                .scalar_products
                .iter()
                .map(|c| ScalarRow {
                    z: c.z,
                    y: c.y,
                    z_prime: c.z_prime,
                    y_prime: c.y_prime,
                    value_re: c.value.re,
                    value_im: c.value.im,
                    expected: c.expected,
                    deviation: c.deviation,
                })
                .collect(),
            max_scalar_deviation: report.max_scalar_deviation,
            class_vector_deviation: report.class_vector_deviation,
            satisfied: report.satisfied(ORTHOGONALITY_TOLERANCE),
        });
    }
    let compliant = orthogonality.iter().all(|q| q.satisfied);
    let report = Report {
        config: VerifyConfig {
            command: "verify",
            code: args.code.clone(),
        },
        seed: 0,
        version: disentangle::VERSION.to_string(),
        results: VerifyResults {
            description: code.description(),
            orthogonality,
            compliant,
        },
        checks,
    };
    print!("{}", report::to_json_string(&report));
    Ok(ExitCode::SUCCESS)
}
